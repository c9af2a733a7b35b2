"""
Curvature Service
Curvature biform, Ricci 1-forms, curvature scalar and frame-component curvature/torsion
"""

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from models.records import CheckRecord, Tolerance
from services.clifford_service import Multivector
from services.extensor_service import GeometryContext
from utils.errors import ShapeMismatch

CURVATURE_METHODS = ('shape', 'pv_shape', 'comm_half', 'pvpu')
RICCI_METHODS = ('contract', 'doubled', 'operator')


def curvature_biform(ctx: GeometryContext, u: Multivector, v: Multivector,
                     method: str = 'shape') -> Multivector:
    """
    Curvature biform ℜ(u∧v) for tangent 1-forms u, v.

    Args:
        ctx: geometry context
        u, v: tangent 1-form fields
        method: 'shape'     -P(𝒮(u) x 𝒮(v))
                'pv_shape'  P_v(𝒮(u))
                'comm_half' 1/2 sum_c theta^c ∧ [P_v, P_u](theta_c)
                'pvpu'      sum_c theta^c ∧ P_v P_u(theta_c)

    Returns:
        Tangent biform
    """
    if method == 'shape':
        return -ctx.project(ctx.shape_biform(u).cross(ctx.shape_biform(v)))
    if method == 'pv_shape':
        return ctx.p_u_extensor(v, ctx.shape_biform(u))
    if method == 'comm_half':
        out = Multivector.zero(ctx.sig)
        for c in range(ctx.m):
            theta_c = ctx.reciprocal(c)
            vu = ctx.p_u_extensor(v, ctx.p_u_extensor(u, theta_c))
            uv = ctx.p_u_extensor(u, ctx.p_u_extensor(v, theta_c))
            out = out + ctx.theta[c].wedge(vu - uv)
        return out.scale(0.5)
    if method == 'pvpu':
        return _wedge_pp(ctx, v, u)
    raise ValueError(f"Unknown curvature method '{method}'")


def _wedge_pp(ctx: GeometryContext, outer: Multivector, inner: Multivector) -> Multivector:
    """sum_c theta^c ∧ P_outer P_inner(theta_c)"""
    out = Multivector.zero(ctx.sig)
    for c in range(ctx.m):
        moved = ctx.p_u_extensor(outer, ctx.p_u_extensor(inner, ctx.reciprocal(c)))
        out = out + ctx.theta[c].wedge(moved)
    return out


def frame_biforms(ctx: GeometryContext, method: str = 'shape') -> Dict[Tuple[int, int], Multivector]:
    """ℜ(theta_a ∧ theta_b) for every ordered pair, memoized on the context"""
    key = ('frame_biforms', method)
    if key in ctx.cache:
        return dict(ctx.cache[key])
    m = ctx.m
    out = {}
    for a in range(m):
        for b in range(m):
            if a < b:
                out[(a, b)] = curvature_biform(ctx, ctx.reciprocal(a), ctx.reciprocal(b), method)
            elif a > b:
                out[(a, b)] = -out[(b, a)]
            else:
                out[(a, b)] = Multivector.zero(ctx.sig)
    ctx.cache[key] = out
    return dict(out)


def curvature_on(ctx: GeometryContext, biforms: Dict[Tuple[int, int], Multivector],
                 u: Multivector, v: Multivector) -> Multivector:
    """Extend frame values bilinearly: u = sum_a (u . theta^a) theta_a"""
    out = Multivector.zero(ctx.sig)
    for (a, b), value in biforms.items():
        if a < b:
            weight = (u.dot(ctx.theta[a]) * v.dot(ctx.theta[b])
                      - u.dot(ctx.theta[b]) * v.dot(ctx.theta[a]))
            out = out + value.scale(weight)
    return out


# Ricci

def ricci_operator(ctx: GeometryContext, field_: Multivector) -> Multivector:
    """∂∧∂ C = 1/2 sum (theta^a∧theta^b)([D_a, D_b]C - c^k_ab D_k C)"""
    m = ctx.m
    lie = ctx.lie_coefficients
    first = [ctx.covariant_along(a, field_) for a in range(m)]
    out = Multivector.zero(ctx.sig)
    for a in range(m):
        for b in range(a + 1, m):
            commutator = ctx.covariant_along(a, first[b]) - ctx.covariant_along(b, first[a])
            for k in range(m):
                commutator = commutator - first[k].scale(lie[k][a][b])
            out = out + ctx.theta[a].wedge(ctx.theta[b]) * commutator
    return out


def dalembertian(ctx: GeometryContext, field_: Multivector) -> Multivector:
    """∂·∂ C = sum_a eta_a (D_a D_a C - omega^c_aa D_c C)"""
    m = ctx.m
    omega = ctx.connection_coefficients
    first = [ctx.covariant_along(a, field_) for a in range(m)]
    out = Multivector.zero(ctx.sig)
    for a in range(m):
        term = ctx.covariant_along(a, first[a])
        for c in range(m):
            term = term - first[c].scale(omega[c][a][a])
        out = out + term.scale(float(ctx.eta[a]))
    return out


def ricci_oneform(ctx: GeometryContext, v: Multivector, method: str = 'contract',
                  curvature_method: str = 'shape',
                  biforms: Optional[Dict[Tuple[int, int], Multivector]] = None) -> Multivector:
    """
    Ricci 1-form of a tangent 1-form.

    contract: sum_a theta^a ⌟ ℜ(theta_a ∧ v)
    doubled:  1/2 sum_ab (theta^a∧theta^b)(ℜ(theta_a∧theta_b) ⌞ v)
    operator: ∂∧∂ v (v must carry two more jet orders)
    """
    if method == 'operator':
        ctx.require_tangent(v)
        return ricci_operator(ctx, v)
    biforms = biforms if biforms is not None else frame_biforms(ctx, curvature_method)
    out = Multivector.zero(ctx.sig)
    if method == 'contract':
        for a in range(ctx.m):
            value = curvature_on(ctx, biforms, ctx.reciprocal(a), v)
            out = out + ctx.theta[a].lc(value)
        return out
    if method == 'doubled':
        for (a, b), value in biforms.items():
            if a < b:
                out = out + ctx.theta[a].wedge(ctx.theta[b]) * value.rc(v)
        return out
    raise ValueError(f"Unknown Ricci method '{method}'")


def shape_squared(ctx: GeometryContext, v: Multivector) -> Multivector:
    """S²(v) = S(S(v)) by composing the shape operator on jet fields"""
    ctx.require_tangent(v)
    return ctx.shape_of(ctx.shape_of(v))


def curvature_scalar(ctx: GeometryContext, method: str = 'shape',
                     biforms: Optional[Dict[Tuple[int, int], Multivector]] = None) -> float:
    """R = sum_ab (theta^a∧theta^b) . ℜ(theta_a∧theta_b)"""
    biforms = biforms if biforms is not None else frame_biforms(ctx, method)
    total = 0.0
    for (a, b), value in biforms.items():
        if a != b:
            total += ctx.theta[a].wedge(ctx.theta[b]).dot(value).value
    return total


def riemann_from_biforms(ctx: GeometryContext,
                         biforms: Dict[Tuple[int, int], Multivector]) -> np.ndarray:
    """R[d, c, a, b] = R^d_cab = ℜ(theta_a∧theta_b) . (theta^d∧theta_c)"""
    m = ctx.m
    out = np.zeros((m, m, m, m))
    for (a, b), value in biforms.items():
        for d in range(m):
            for c in range(m):
                out[d, c, a, b] = value.dot(ctx.theta[d].wedge(ctx.reciprocal(c))).value
    return out


def lower_first(riemann: np.ndarray, eta: Sequence[int]) -> np.ndarray:
    """R(a, b, c, d) = ℜ(theta_a∧theta_b) . (theta_c∧theta_d) = -eta_d R^d_cab"""
    eta = np.asarray(eta, dtype=float)
    return -np.einsum('d,dcab->abcd', eta, riemann)


# Frame components

def riemann_torsion_components(omega: np.ndarray, lie: np.ndarray, d_omega: np.ndarray,
                               coframe: Optional[Sequence[Multivector]] = None,
                               eta: Optional[Sequence[int]] = None) -> Dict:
    """
    Curvature and torsion components of a metric-compatible frame connection.

    Args:
        omega: omega[a, b, c] = omega^a_bc with D_{e_b} e_c = omega^a_bc e_a
        lie: lie[k, a, b] = c^k_ab with [e_a, e_b] = c^k_ab e_k
        d_omega: d_omega[e, a, b, c] = e_e(omega^a_bc)
        coframe: optional theta^a, used to assemble the torsion extensors
        eta: coframe signs (required with coframe)

    Returns:
        Dict with 'riemann' R[d, c, a, b], 'torsion' T[c, a, b] and, when a coframe
        is given, 'torsion_biforms' {(a, b): t(theta_a∧theta_b)} and
        'cartan_torsion' [Theta(theta^c)]
    """
    omega = np.asarray(omega, dtype=float)
    lie = np.asarray(lie, dtype=float)
    d_omega = np.asarray(d_omega, dtype=float)
    m = omega.shape[0]
    if omega.shape != (m, m, m) or lie.shape != (m, m, m) or d_omega.shape != (m, m, m, m):
        raise ShapeMismatch(
            f"Coefficient arrays disagree: omega {omega.shape}, lie {lie.shape}, d_omega {d_omega.shape}"
        )
    riemann = (np.einsum('adbc->dcab', d_omega)
               - np.einsum('bdac->dcab', d_omega)
               + np.einsum('dak,kbc->dcab', omega, omega)
               - np.einsum('dbk,kac->dcab', omega, omega)
               - np.einsum('kab,dkc->dcab', lie, omega))
    torsion = omega - np.transpose(omega, (0, 2, 1)) - lie
    result = {'riemann': riemann, 'torsion': torsion}
    if coframe is not None:
        if eta is None or len(coframe) != m or len(eta) != m:
            raise ShapeMismatch("Coframe and signs must match the coefficient arrays")
        lowered = [coframe[a].scale(float(eta[a])) for a in range(m)]
        pieces = {}
        for a in range(m):
            for b in range(m):
                out = Multivector.zero(coframe[0].sig)
                for d in range(m):
                    out = out + lowered[d].scale(float(torsion[d, a, b]))
                pieces[(a, b)] = out
        cartan = []
        for c in range(m):
            out = Multivector.zero(coframe[0].sig)
            for k in range(m):
                for l in range(k + 1, m):
                    out = out + coframe[k].wedge(coframe[l]).scale(float(torsion[c, k, l]))
            cartan.append(out)
        result['torsion_biforms'] = pieces
        result['cartan_torsion'] = cartan
    return result


def torsion_extensor(components: Dict, B: Multivector, coframe: Sequence[Multivector]) -> Multivector:
    """t(B) = 1/2 sum_kl (B . theta^k∧theta^l) t(theta_k∧theta_l)"""
    m = len(coframe)
    out = Multivector.zero(B.sig)
    for k in range(m):
        for l in range(m):
            if k != l:
                weight = B.dot(coframe[k].wedge(coframe[l]))
                out = out + components['torsion_biforms'][(k, l)].scale(weight)
    return out.scale(0.5)


def cartan_torsion(components: Dict, c: Multivector, coframe: Sequence[Multivector],
                   eta: Sequence[int]) -> Multivector:
    """Theta(c) = sum_d (theta_d . c) Theta(theta^d)"""
    out = Multivector.zero(c.sig)
    for d, theta in enumerate(coframe):
        weight = c.dot(theta.scale(float(eta[d])))
        out = out + components['cartan_torsion'][d].scale(weight)
    return out


# Samples and symmetries

@dataclass
class CurvatureSample:
    point: Tuple[float, ...]
    method: str
    biforms: Dict[Tuple[int, int], Multivector]
    ricci: List[Multivector]
    scalar: float
    riemann: np.ndarray
    eta: List[int]
    torsion: Optional[np.ndarray] = None
    rho_cycles: List[Multivector] = field(default_factory=list)

    @property
    def lowered(self) -> np.ndarray:
        return lower_first(self.riemann, self.eta)


def curvature_sample(ctx: GeometryContext, method: str = 'shape') -> CurvatureSample:
    biforms = frame_biforms(ctx, method)
    ricci = [ricci_oneform(ctx, ctx.theta[a], 'contract', biforms=biforms) for a in range(ctx.m)]
    cycles = []
    m = ctx.m
    for a in range(m):
        for b in range(m):
            for c in range(m):
                total = Multivector.zero(ctx.sig)
                for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                    total = total + biforms[(x, y)].cross(ctx.reciprocal(z))
                cycles.append(total)
    return CurvatureSample(
        point=ctx.frame.u,
        method=method,
        biforms=biforms,
        ricci=ricci,
        scalar=curvature_scalar(ctx, biforms=biforms),
        riemann=riemann_from_biforms(ctx, biforms),
        eta=list(ctx.eta),
        rho_cycles=cycles,
    )


def validate_symmetries(sample: CurvatureSample,
                        tolerance: Optional[Tolerance] = None) -> List[CheckRecord]:
    """Pair antisymmetries, pair exchange, first Bianchi and the cyclic rho identity"""
    tolerance = tolerance or Tolerance()
    R = sample.lowered
    point = sample.point
    method = sample.method
    records = [
        CheckRecord.compare('riemann_antisymmetric_first_pair', 'R(a,b,c,d) = -R(b,a,c,d)',
                            R, np.transpose(R, (1, 0, 2, 3)), tolerance, point, method, -1),
        CheckRecord.compare('riemann_antisymmetric_second_pair', 'R(a,b,c,d) = -R(a,b,d,c)',
                            R, np.transpose(R, (0, 1, 3, 2)), tolerance, point, method, -1),
        CheckRecord.compare('riemann_pair_exchange', 'R(a,b,c,d) = R(c,d,a,b)',
                            R, np.transpose(R, (2, 3, 0, 1)), tolerance, point, method),
        CheckRecord.vanishes('first_bianchi', 'R(a,b,c,d) + R(b,c,a,d) + R(c,a,b,d) = 0',
                             R + np.transpose(R, (2, 0, 1, 3)) + np.transpose(R, (1, 2, 0, 3)),
                             tolerance, point, method),
    ]
    if sample.torsion is not None:
        riemann = sample.riemann
        cyclic = (riemann + np.transpose(riemann, (0, 2, 3, 1)) + np.transpose(riemann, (0, 3, 1, 2)))
        records.append(CheckRecord.vanishes(
            'torsion_free_commutator_identity', 'cyclic sum of R^d_cab = 0 when T = 0',
            np.concatenate([cyclic.ravel(), sample.torsion.ravel()]), tolerance, point, method))
    if sample.rho_cycles:
        total = np.concatenate([c.value() for c in sample.rho_cycles])
        records.append(CheckRecord.vanishes('cyclic_rho_identity', 'rho(u,v,w) + rho(v,w,u) + rho(w,u,v) = 0',
                                            total, tolerance, point, method))
    return records


class LedgerEntry(NamedTuple):
    relation: str
    sign: int
    literal: int


# lhs = sign * rhs as computed here; literal is the sign the relation is usually quoted with
SIGN_LEDGER: Dict[str, LedgerEntry] = {
    'ricci_doubled': LedgerEntry('doubled Ricci 1-form vs contracted Ricci 1-form', -1, 1),
    'ricci_operator': LedgerEntry('∂∧∂ v vs contracted Ricci 1-form', -1, 1),
    'shape_squared_ricci': LedgerEntry('S²(v) vs -contracted Ricci 1-form', 1, 1),
    'shape_squared_operator': LedgerEntry('S²(v) vs -∂∧∂ v', -1, 1),
    'codifferential_maxwell': LedgerEntry('δF vs 2S²(A)', -1, 1),
    'dirac_maxwell': LedgerEntry('∂F vs -2S²(A)', -1, 1),
    'hills_rearrangement': LedgerEntry('S²(theta^a) vs T^a - T theta^a / 2', -1, 1),
    'killing_dalembertian': LedgerEntry('∂∧∂A vs ∂·∂A', 1, 1),
    'scalar_oracle': LedgerEntry('curvature scalar vs metric oracle', 1, 1),
}


def ledger_sign(key: str) -> int:
    return SIGN_LEDGER[key].sign

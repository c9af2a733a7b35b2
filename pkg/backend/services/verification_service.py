"""
Verification Service
Runs the identity suite over sampled chart points and assembles the verify report
"""

from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from models.records import CheckRecord, SignEntry, Tolerance, VerifyReport, as_values
from services.catalog_service import catalog
from services.clifford_service import Multivector
from services.curvature_service import (CURVATURE_METHODS, SIGN_LEDGER, curvature_biform,
                                        curvature_on, curvature_sample, curvature_scalar,
                                        frame_biforms, ricci_oneform,
                                        riemann_from_biforms, riemann_torsion_components,
                                        shape_squared, validate_symmetries)
from services.expression_service import check_order
from services.extensor_service import GeometryContext
from services.frame_service import Chart, frame_point
from services.killing_service import (KillingField, coderivative, exterior_and_coderivative,
                                      exterior_derivative, hills_report, killing_residual,
                                      maxwell_encoding_residual)
from services.oracle_service import classical_curvature, fd_jacobian, killing_lie_derivative
from utils.errors import BranegeoError, InsufficientJetOrder
from utils.logger import get_logger
from utils.sampling import LCG64, random_points

logger = get_logger('verification')

CHECK_GROUPS = ('frame', 'appendix', 'shape', 'connection', 'curvature', 'operators', 'killing', 'hills')
CONTROL_THRESHOLD = 0.1
FIELD_SEED_OFFSET = 7919


class PointOutcome(NamedTuple):
    records: List[CheckRecord]
    observed: Dict[str, Optional[int]]
    literal: Dict[str, float]
    control_norms: Dict[str, float]


def observed_sign(lhs, rhs) -> Optional[int]:
    left, right = as_values(lhs), as_values(rhs)
    if np.linalg.norm(left) < 1e-12 or np.linalg.norm(right) < 1e-12:
        return None
    return 1 if np.linalg.norm(left - right) <= np.linalg.norm(left + right) else -1


def exit_code_for(records: Sequence[CheckRecord]) -> int:
    """0 pass, 1 failure or error, 3 jet-order shortfall only"""
    statuses = {r.status for r in records}
    if 'fail' in statuses or 'error' in statuses:
        return 1
    if 'insufficient_order' in statuses:
        return 3
    return 0


class VerificationService:
    """Identity suite for one chart"""

    def __init__(self, chart: Chart, tolerance: Optional[Tolerance] = None, order: int = 3,
                 gram_tol: float = 1e-9, fd_step: float = 1e-5,
                 groups: Sequence[str] = CHECK_GROUPS):
        self.chart = chart
        self.tolerance = tolerance or Tolerance()
        self.loose = Tolerance(abs_tol=max(self.tolerance.abs_tol, 1e-6),
                               rel_tol=max(self.tolerance.rel_tol, 1e-6))
        self.order = order
        self.gram_tol = gram_tol
        self.fd_step = fd_step
        self.groups = [g for g in CHECK_GROUPS if g in groups]
        self.observed: Dict[str, Optional[int]] = {}
        self.literal: Dict[str, float] = {}

    # Plumbing

    def _guard(self, records: List[CheckRecord], name: str, identity: str, point,
               fn: Callable[[], object], method: str = ''):
        try:
            out = fn()
        except InsufficientJetOrder as e:
            records.append(CheckRecord.failed(name, identity, 'insufficient_order', str(e), point, method))
            return
        except BranegeoError as e:
            records.append(CheckRecord.failed(name, identity, 'error', f"{type(e).__name__}: {e}", point, method))
            return
        if isinstance(out, CheckRecord):
            records.append(out)
        elif out:
            records.extend(out)

    def _signed(self, key: str, name: str, lhs, rhs, tol: Tolerance, point, method: str = '') -> CheckRecord:
        entry = SIGN_LEDGER[key]
        if self.observed.get(key) is None:
            self.observed[key] = observed_sign(lhs, rhs)
        record = CheckRecord.compare(name, entry.relation, lhs, rhs, tol, point, method, entry.sign,
                                     literal=entry.literal)
        self.literal[key] = max(self.literal.get(key, 0.0), record.literal_residual)
        return record

    # Frame

    def frame_checks(self, ctx: GeometryContext, rng: LCG64) -> List[CheckRecord]:
        frame, point, tol = ctx.frame, ctx.frame.u, self.tolerance
        records = []
        target = np.diag(list(frame.eta_tangent) + list(frame.eta_normal)).astype(float)
        records.append(CheckRecord.compare('frame_gram', 'Gram matrix of the adapted coframe = diag(±1)',
                                           frame.gram(), target, tol, point))
        wedge = [theta.wedge(frame.I_m).norm() for theta in frame.theta]
        records.append(CheckRecord.vanishes('tangent_wedge_volume', 'theta^a ∧ I_m = 0', wedge, tol, point))
        derivative_parts = []
        for a in frame.theta:
            for b in frame.theta:
                product = a.dot(b)
                derivative_parts.extend(product.coeffs[1:].tolist())
        records.append(CheckRecord.vanishes('coframe_jet_orthonormality',
                                            'derivative parts of theta^a . theta^b = 0',
                                            derivative_parts or [0.0], self.loose, point))

        def fd():
            gammas = ctx.frame.gamma
            etas = self.chart.signature.etas
            jet = np.array([[g.coefficient(1 << j).value * etas[j] for j in range(self.chart.n)]
                            for g in gammas])
            return CheckRecord.compare('coordinate_frame_finite_difference',
                                       'gamma_i components = finite-difference Jacobian',
                                       jet, fd_jacobian(self.chart, point, self.fd_step),
                                       Tolerance(abs_tol=1e-6, rel_tol=1e-6), point)
        self._guard(records, 'coordinate_frame_finite_difference', 'gamma_i vs finite differences', point, fd)
        return records

    # Appendix identities of P and P_u

    def appendix_checks(self, ctx: GeometryContext, rng: LCG64) -> List[CheckRecord]:
        point, tol = ctx.frame.u, self.tolerance
        records = []
        C, D = ctx.random_field(rng), ctx.random_field(rng)
        u = ctx.random_tangent_field(rng)
        w = ctx.random_tangent_field(rng)
        P = ctx.project

        records.append(CheckRecord.compare('projection_wedge', 'P(C∧D) = P(C)∧P(D)',
                                           P(C.wedge(D)), P(C).wedge(P(D)), tol, point))
        records.append(CheckRecord.compare('projection_idempotent', 'P(P(C)) = P(C)', P(P(C)), P(C), tol, point))
        records.append(CheckRecord.vanishes('complement_annihilated', 'P(P⊥(C)) = 0',
                                            P(ctx.project_perp(C)), tol, point))
        checks = [
            ('projection_derivative_leibniz', 'P_u(C∧D) = P_u(C)∧P(D) + P(C)∧P_u(D)',
             lambda: (ctx.p_u_extensor(u, C.wedge(D)),
                      ctx.p_u_extensor(u, C).wedge(P(D)) + P(C).wedge(ctx.p_u_extensor(u, D)))),
            ('projection_derivative_split', 'P_u(P(C)) + P(P_u(C)) = P_u(C)',
             lambda: (ctx.p_u_extensor(u, P(C)) + P(ctx.p_u_extensor(u, C)), ctx.p_u_extensor(u, C))),
            ('projection_derivative_normal_form', 'P_u(w) = P⊥(u . d̊w)',
             lambda: (ctx.p_u_extensor(u, w), ctx.project_perp(ctx.along(u, w)))),
            ('projection_derivative_symmetric', 'P_u(w) = P_w(u)',
             lambda: (ctx.p_u_extensor(u, w), ctx.p_u_extensor(w, u))),
            ('projection_derivative_symmetric_projected', 'P_u P(w) = P_w P(u)',
             lambda: (ctx.p_u_extensor(u, P(w)), ctx.p_u_extensor(w, P(u)))),
            ('projection_derivative_tangent_input', 'P P_u(P(X)) = 0',
             lambda: (P(ctx.p_u_extensor(u, P(C))), Multivector.zero(ctx.sig))),
            ('projection_derivative_normal_input', 'P P_u(P⊥(X)) = P_u(P⊥(X))',
             lambda: (P(ctx.p_u_extensor(u, ctx.project_perp(C))), ctx.p_u_extensor(u, ctx.project_perp(C)))),
            ('projection_derivative_pull_through', 'P_u(C_∥ ∧ D_⊥) = C_∥ ∧ P_u(D_⊥)',
             lambda: (ctx.p_u_extensor(u, P(C).wedge(ctx.project_perp(D))),
                      P(C).wedge(ctx.p_u_extensor(u, ctx.project_perp(D))))),
            ('projection_derivative_shape_form', 'P_v(C) = P(C) x 𝒮(v) - P(C x 𝒮(v))',
             lambda: (ctx.p_u_extensor(u, C),
                      P(C).cross(ctx.shape_biform(u)) - P(C.cross(ctx.shape_biform(u))))),
        ]
        for name, identity, fn in checks:
            self._guard(records, name, identity, point,
                        lambda fn=fn, name=name, identity=identity:
                        CheckRecord.compare(name, identity, *fn(), tol, point))
        return records

    # Shape

    def shape_checks(self, ctx: GeometryContext, rng: LCG64) -> List[CheckRecord]:
        point, tol = ctx.frame.u, self.tolerance
        records = []
        v = ctx.random_tangent_field(rng)
        w = ctx.random_tangent_field(rng)
        nu = ctx.random_normal_field(rng)
        I = ctx.I

        def volume_parallel():
            return [CheckRecord.vanishes('volume_parallel', 'D_v I_m = 0',
                                         ctx.covariant_derivative(ctx.reciprocal(a), I), tol, point)
                    for a in range(ctx.m)]

        def biform_relations():
            S = ctx.shape_biform(v)
            return [
                CheckRecord.vanishes('shape_contract_volume', '𝒮(v) ⌟ I_m = 0', S.lc(I), tol, point),
                CheckRecord.vanishes('shape_wedge_volume', '𝒮(v) ∧ I_m = 0', S.wedge(I), tol, point),
                CheckRecord.vanishes('shape_biform_normal', 'P(𝒮(v)) = 0', ctx.project(S), tol, point),
                CheckRecord.compare('shape_biform_from_coframe', '𝒮(v) = -P⊥(v . d̊theta_j) ∧ theta^j',
                                    S, ctx.shape_biform_from_coframe(v), tol, point),
                CheckRecord.compare('shape_symmetric', 'v ⌟ 𝒮(w) = w ⌟ 𝒮(v)',
                                    v.lc(ctx.shape_biform(w)), w.lc(S), tol, point),
            ]

        def operator_relations():
            S_v = ctx.shape_of(v)
            dirac = ctx.restricted_dirac(v)
            intrinsic = ctx.intrinsic_dirac(v)
            frame_sum = Multivector.zero(ctx.sig)
            for a in range(ctx.m):
                frame_sum = frame_sum + ctx.theta[a] * ctx.covariant_along(a, v)
            return [
                CheckRecord.compare('shape_operator_on_tangent', 'S(v) = 𝒮(v)', S_v, ctx.shape_biform(v), tol, point),
                CheckRecord.compare('restricted_dirac_split', 'd̊v = ∂v + S(v)', dirac, intrinsic + S_v, tol, point),
                CheckRecord.compare('restricted_dirac_wedge', 'd̊∧v = ∂∧v + 𝒮(v)',
                                    ctx.restricted_dirac(v, 'wedge'),
                                    ctx.intrinsic_dirac(v, 'wedge') + ctx.shape_biform(v), tol, point),
                CheckRecord.compare('restricted_dirac_contract', 'd̊⌟v = ∂⌟v',
                                    ctx.restricted_dirac(v, 'contract'), ctx.intrinsic_dirac(v, 'contract'),
                                    tol, point),
                CheckRecord.compare('intrinsic_dirac_projection', 'P(d̊v) = sum_a theta^a D_a v',
                                    intrinsic, frame_sum, tol, point),
            ]

        def shape_from_projection_derivative():
            tangent_sum = Multivector.zero(ctx.sig)
            normal_sum = Multivector.zero(ctx.sig)
            for a in range(ctx.m):
                e_a = ctx.reciprocal(a)
                tangent_sum = tangent_sum + ctx.theta[a].wedge(ctx.p_u_extensor(e_a, v))
                normal_sum = normal_sum + ctx.theta[a].lc(ctx.p_u_extensor(e_a, nu))
            return [
                CheckRecord.compare('shape_tangent_projection_derivative', 'S(v) = ∂_u ∧ P_u(v)',
                                    ctx.shape_of(v), tangent_sum, tol, point),
                CheckRecord.compare('shape_normal_projection_derivative', 'S(ν) = ∂_u ⌟ P_u(ν)',
                                    ctx.shape_of(nu), normal_sum, tol, point),
            ]

        self._guard(records, 'volume_parallel', 'D_v I_m = 0', point, volume_parallel)
        self._guard(records, 'shape_biform', '𝒮 relations', point, biform_relations)
        self._guard(records, 'shape_operator', 'd̊ decompositions', point, operator_relations)
        self._guard(records, 'shape_projection_derivative', 'S via P_u', point, shape_from_projection_derivative)
        return records

    # Connection

    def connection_checks(self, ctx: GeometryContext, rng: LCG64) -> List[CheckRecord]:
        point, tol = ctx.frame.u, self.tolerance
        records = []
        v = ctx.random_tangent_field(rng, constant=True)
        A = ctx.random_tangent_field(rng)
        B = ctx.random_tangent_field(rng)

        def gauge():
            omega = ctx.connection_biform(v)
            ambient = ctx.ambient_connection_biform(v)
            out = [
                CheckRecord.compare('connection_projected', 'omega_v = P(ω̊_v)', omega, ctx.project(ambient), tol, point),
                CheckRecord.compare('connection_gauge', 'ω̊_v + 𝒮(v) = omega_v + N(ω̊_v)',
                                    ambient + ctx.shape_biform(v), omega + ctx.normal_block(v), tol, point),
            ]
            for a in range(ctx.m):
                out.append(CheckRecord.compare('connection_rotates_coframe', 'D_v theta^a = omega_v x theta^a',
                                               ctx.covariant_derivative(v, ctx.theta[a]),
                                               omega.cross(ctx.theta[a]), tol, point))
            return out

        def compatibility():
            omega = ctx.connection_coefficients
            m, eta = ctx.m, ctx.eta
            lowered = np.array([[[eta[a] * omega[a][b][c].value for c in range(m)] for b in range(m)]
                                for a in range(m)])
            moved = ctx.covariant_derivative(v, A)
            derivative = ctx.along(v, Multivector.scalar(ctx.sig, A.dot(B))).scalar_part()
            return [
                CheckRecord.compare('connection_antisymmetric', 'omega_abc = -omega_cba (lowered)',
                                    lowered, np.transpose(lowered, (2, 1, 0)), tol, point, sign=-1),
                CheckRecord.compare('covariant_derivative_tangent', 'P(D_v A) = D_v A',
                                    ctx.project(moved), moved, tol, point),
                CheckRecord.compare('covariant_derivative_metric', 'v . d̊(A . B) = D_vA . B + A . D_vB',
                                    derivative, moved.dot(B) + A.dot(ctx.covariant_derivative(v, B)), tol, point),
            ]

        def components():
            arrays = ctx.connection_arrays()
            parts = riemann_torsion_components(arrays['omega'], arrays['lie'], arrays['d_omega'],
                                               ctx.theta, ctx.eta)
            biforms = frame_biforms(ctx)
            return [
                CheckRecord.vanishes('levi_civita_torsion', 'T^c_ab = 0', parts['torsion'], tol, point),
                CheckRecord.compare('riemann_components_intrinsic_extrinsic',
                                    'R^d_cab from omega, c = ℜ(theta_a∧theta_b) . (theta^d∧theta^c)',
                                    parts['riemann'], riemann_from_biforms(ctx, biforms), self.loose, point),
            ]

        self._guard(records, 'connection_gauge', 'connection biform relations', point, gauge)
        self._guard(records, 'connection_compatibility', 'metric compatibility', point, compatibility)
        self._guard(records, 'connection_components', 'component formulas', point, components)
        return records

    # Curvature

    def curvature_checks(self, ctx: GeometryContext, rng: LCG64) -> List[CheckRecord]:
        point, tol = ctx.frame.u, self.tolerance
        records = []
        m = ctx.m
        v = ctx.random_tangent_field(rng)
        C = ctx.random_tangent_multivector(rng)
        reference: Dict[str, Dict] = {}

        def biforms():
            reference['shape'] = frame_biforms(ctx, 'shape')
            return None

        self._guard(records, 'curvature_shape', 'ℜ = -P(𝒮(u) x 𝒮(v))', point, biforms, 'shape')
        if 'shape' not in reference:
            return records
        base = reference['shape']

        for method in CURVATURE_METHODS[1:]:
            def agree(method=method):
                values = frame_biforms(ctx, method)
                return [CheckRecord.compare('curvature_method_agreement', f'ℜ[shape] = ℜ[{method}]',
                                            base[(a, b)], values[(a, b)], tol, point, method)
                        for a in range(m) for b in range(a + 1, m)]
            self._guard(records, 'curvature_method_agreement', f'ℜ[shape] = ℜ[{method}]', point, agree, method)

        def ricci_and_theorem():
            out = []
            contract = ricci_oneform(ctx, v, 'contract', biforms=base)
            out.append(self._signed('ricci_doubled', 'ricci_doubled_vs_contract',
                                    ricci_oneform(ctx, v, 'doubled', biforms=base), contract, tol, point))
            out.append(CheckRecord.vanishes('ricci_wedge_part', '∂_u ∧ ℜ(u∧v) = 0',
                                            sum((ctx.theta[a].wedge(curvature_on(ctx, base, ctx.reciprocal(a), v))
                                                 for a in range(m)), Multivector.zero(ctx.sig)), tol, point))
            return out

        def operator_relations():
            contract = ricci_oneform(ctx, v, 'contract', biforms=base)
            operator = ricci_oneform(ctx, v, 'operator')
            squared = shape_squared(ctx, v)
            return [
                self._signed('ricci_operator', 'ricci_operator_vs_contract', operator, contract, tol, point, 'operator'),
                self._signed('shape_squared_ricci', 'shape_squared_vs_ricci', squared, -contract, tol, point),
                self._signed('shape_squared_operator', 'shape_squared_vs_ricci_operator', squared, -operator,
                             tol, point, 'operator'),
                CheckRecord.vanishes('shape_squared_tangent', 'P⊥(S²(v)) = 0', ctx.project_perp(squared), tol, point),
            ]

        def scalar_and_oracle():
            R = curvature_scalar(ctx, biforms=base)
            oracle = classical_curvature(self.chart, point, self.order)
            out = [self._signed('scalar_oracle', 'scalar_curvature_oracle', R, oracle['scalar'], self.loose, point)]
            if 'gaussian' in oracle:
                out.append(CheckRecord.compare('gaussian_curvature_oracle', 'R / 2 = R_1212 / det g',
                                               R / 2.0, oracle['gaussian'], self.loose, point))
            return out

        def symmetries():
            sample = curvature_sample(ctx, 'shape')
            arrays = ctx.connection_arrays()
            sample.torsion = riemann_torsion_components(arrays['omega'], arrays['lie'], arrays['d_omega'])['torsion']
            return validate_symmetries(sample, tol)

        def commutators():
            out = []
            for i in range(m):
                for j in range(i + 1, m):
                    first = ctx.covariant_coordinate(i, ctx.covariant_coordinate(j, C))
                    second = ctx.covariant_coordinate(j, ctx.covariant_coordinate(i, C))
                    biform = -ctx.project(ctx.shape_coordinate(i).cross(ctx.shape_coordinate(j)))
                    out.append(CheckRecord.compare('covariant_commutator', '[D_i, D_j]C = ℜ(gamma_i∧gamma_j) x C',
                                                   first - second, biform.cross(C), tol, point))
            u_t, w_t = ctx.reciprocal(0), ctx.reciprocal(m - 1)
            x = ctx.random_tangent_field(rng)
            value = curvature_on(ctx, base, u_t, w_t)
            commutator = (ctx.p_u_extensor(u_t, ctx.p_u_extensor(w_t, x))
                          - ctx.p_u_extensor(w_t, ctx.p_u_extensor(u_t, x)))
            out.append(CheckRecord.compare('projection_derivative_commutator', 'ℜ(u∧v) x C = [P_u, P_v]C',
                                           value.cross(x), commutator, tol, point))
            out.append(CheckRecord.compare('projection_derivative_antisymmetry',
                                           '∂_w ∧ P_v P_u(w) = -∂_w ∧ P_u P_v(w)',
                                           curvature_biform(ctx, u_t, w_t, 'pvpu'),
                                           curvature_biform(ctx, w_t, u_t, 'pvpu'), tol, point, sign=-1))
            product = ctx.shape_biform(u_t).cross(ctx.shape_biform(w_t))
            out.append(CheckRecord.compare('shape_commutator_tangent_action', 'P((𝒮(u) x 𝒮(v)) x C) = P(𝒮(u) x 𝒮(v)) x C',
                                           ctx.project(product.cross(x)), ctx.project(product).cross(x), tol, point))
            if ctx.frame.n - m == 1:
                out.append(CheckRecord.vanishes('shape_commutator_normal_part', 'P⊥(𝒮(u) x 𝒮(v)) = 0',
                                                ctx.project_perp(product), tol, point))
            return out

        def structure_equation():
            omega = ctx.connection_coefficients
            forms = [[sum((ctx.theta[k].scale(omega[a][k][b]) for k in range(m)), Multivector.zero(ctx.sig))
                      for b in range(m)] for a in range(m)]
            out = []
            for a in range(m):
                for b in range(m):
                    rhs = exterior_derivative(ctx, forms[a][b])
                    for c in range(m):
                        rhs = rhs + forms[a][c].wedge(forms[c][b])
                    lhs = curvature_on(ctx, base, ctx.theta[a], ctx.reciprocal(b))
                    out.append(CheckRecord.compare('cartan_structure_equation',
                                                   'ℜ(theta^a∧theta_b) = dω^a_b + ω^a_c ∧ ω^c_b',
                                                   lhs, rhs, tol, point))
            return out

        def form_curvature():
            lowered = np.zeros((m, m, m, m))
            rho = np.zeros((m, m, m, m))
            for a in range(m):
                for b in range(m):
                    for c in range(m):
                        moved = base[(a, b)].cross(ctx.reciprocal(c))
                        for d in range(m):
                            lowered[a, b, c, d] = base[(a, b)].dot(ctx.reciprocal(c).wedge(ctx.reciprocal(d))).value
                            rho[a, b, c, d] = moved.dot(ctx.reciprocal(d)).value
            return CheckRecord.compare('form_curvature_components', 'ℜ(a∧b) . (c∧d) = -rho(a,b,c) . d',
                                       lowered, rho, tol, point, sign=-1)

        self._guard(records, 'ricci', 'Ricci 1-forms', point, ricci_and_theorem)
        self._guard(records, 'form_curvature_components', 'form curvature', point, form_curvature)
        self._guard(records, 'ricci_operator', 'Ricci operator relations', point, operator_relations, 'operator')
        self._guard(records, 'scalar_curvature', 'curvature scalar', point, scalar_and_oracle)
        self._guard(records, 'curvature_symmetries', 'symmetries', point, symmetries)
        self._guard(records, 'curvature_commutators', 'commutator identities', point, commutators)
        self._guard(records, 'cartan_structure_equation', 'structure equation', point, structure_equation)
        return records

    # Exterior calculus

    def operators_checks(self, ctx: GeometryContext, rng: LCG64) -> List[CheckRecord]:
        point, tol = ctx.frame.u, self.tolerance
        records = []

        def nilpotent():
            f = Multivector.scalar(ctx.sig, ctx.random_scalar_jet(rng))
            two = ctx.random_tangent_multivector(rng).grade(2)
            return [
                CheckRecord.vanishes('exterior_nilpotent', 'd(d f) = 0',
                                     exterior_derivative(ctx, exterior_derivative(ctx, f)), tol, point),
                CheckRecord.vanishes('coderivative_nilpotent', 'δ(δ B) = 0',
                                     coderivative(ctx, coderivative(ctx, two)), tol, point),
            ]

        def decompositions():
            v = ctx.random_tangent_field(rng)
            parts = exterior_and_coderivative(ctx, v)
            return [
                CheckRecord.compare('dirac_square_hodge', '∂² = -(dδ + δd)', parts['box'], parts['hodge'],
                                    tol, point),
                CheckRecord.compare('dirac_square_split', '∂² = ∂·∂ + ∂∧∂', parts['box'],
                                    parts['dalembertian'] + parts['ricci'], tol, point),
                CheckRecord.compare('dalembertian_remainder', '∂²C - ∂∧∂C = ∂·∂C', parts['remainder'],
                                    parts['dalembertian'], tol, point),
            ]

        self._guard(records, 'exterior_nilpotent', 'd² = 0, δ² = 0', point, nilpotent)
        self._guard(records, 'dirac_square', 'Dirac square decompositions', point, decompositions)
        return records

    # Killing and Maxwell

    def killing_checks(self, ctx: GeometryContext, rng: LCG64,
                       fields: Sequence[KillingField]) -> List[CheckRecord]:
        point, tol = ctx.frame.u, self.tolerance
        records = []
        for field_ in fields:
            if field_.control:
                continue
            label = field_.name

            def field_checks(field_=field_, label=label):
                killing = killing_residual(ctx, field_)
                out = [
                    CheckRecord.bounded('killing_equation', 'D_a A_b + D_b A_a = 0', killing['killing_norm'],
                                        self.loose.abs_tol, point, label),
                    CheckRecord.bounded('killing_divergence', 'δA = 0', killing['div_norm'], tol.abs_tol,
                                        point, label),
                    CheckRecord.vanishes('killing_oracle', 'L_X g = 0',
                                         killing_lie_derivative(self.chart, point, field_.components, self.order),
                                         self.loose, point, label),
                ]
                maxwell = maxwell_encoding_residual(ctx, field_)
                S2 = maxwell['shape_squared']
                out += [
                    self._signed('dirac_maxwell', 'maxwell_encoding', maxwell['dirac_F'], S2.scale(-2.0),
                                 self.loose, point, label),
                    self._signed('codifferential_maxwell', 'maxwell_codifferential', maxwell['codifferential_F'],
                                 S2.scale(2.0), self.loose, point, label),
                    self._signed('killing_dalembertian', 'killing_dalembertian', maxwell['ricci'],
                                 maxwell['dalembertian'], self.loose, point, label),
                    CheckRecord.vanishes('field_strength_closed', 'dF = 0', maxwell['dF'], tol, point, label),
                ]
                return out

            self._guard(records, 'killing', f'Killing field {label}', point, field_checks, label)
        return records

    @staticmethod
    def control_norms(ctx: GeometryContext, fields: Sequence[KillingField]) -> Dict[str, float]:
        norms = {}
        for field_ in fields:
            if field_.control:
                try:
                    norms[field_.name] = killing_residual(ctx, field_)['killing_norm']
                except BranegeoError:
                    continue
        return norms

    def control_checks(self, norms_by_field: Dict[str, List[float]],
                       fields: Sequence[KillingField]) -> List[CheckRecord]:
        """Negative controls must fail the Killing equation somewhere in the sample"""
        records = []
        for field_ in fields:
            if not field_.control:
                continue
            norms = norms_by_field.get(field_.name, [])
            if not norms:
                records.append(CheckRecord.failed('killing_negative_control', 'non-Killing field detected',
                                                  'error', 'no evaluable points', (), field_.name))
                continue
            records.append(CheckRecord.bounded('killing_negative_control', 'non-Killing field detected',
                                               max(norms), CONTROL_THRESHOLD, (), field_.name, above=True,
                                               detail=f"max killing_norm over {len(norms)} points"))
        return records

    # Hills

    def hills_checks(self, ctx: GeometryContext, rng: LCG64) -> List[CheckRecord]:
        point = ctx.frame.u

        def rearrangement():
            report = hills_report(ctx, self.tolerance.abs_tol)
            out = []
            for frame in report['frames']:
                out.append(self._signed('hills_rearrangement', 'hills_rearrangement', frame['shape_squared'],
                                        frame['rhs'], self.loose, point))
            if report['trace_closure'] is not None:
                out.append(CheckRecord.vanishes('hills_trace_closure', 'sum_a theta_a . T^a = T',
                                                report['trace_closure'], self.loose, point))
            for record in out:
                record.detail = f"vacuum={report['vacuum']} trace={report['trace']}"
            return out

        records: List[CheckRecord] = []
        self._guard(records, 'hills_rearrangement', 'vacuum rearrangement', point, rearrangement)
        return records

    # Driver

    def context_at(self, point: Tuple[float, ...]) -> GeometryContext:
        return GeometryContext(frame_point(self.chart, point, self.order, self.gram_tol))

    def run_point(self, index: int, point: Tuple[float, ...], seed: int,
                  fields: Sequence[KillingField]) -> PointOutcome:
        """All groups at one point; the outcome depends only on (seed, index, point)"""
        logger.debug(f"point {index}: {point}")
        self.observed = {}
        self.literal = {}
        try:
            ctx = self.context_at(point)
        except InsufficientJetOrder as e:
            failed = CheckRecord.failed('frame_point', 'adapted frame', 'insufficient_order', str(e), point)
            return PointOutcome([failed], {}, {}, {})
        except BranegeoError as e:
            failed = CheckRecord.failed('frame_point', 'adapted frame', 'error', f"{type(e).__name__}: {e}", point)
            return PointOutcome([failed], {}, {}, {})
        rng = LCG64.stream(seed + FIELD_SEED_OFFSET, index)
        records: List[CheckRecord] = []
        for group in self.groups:
            if group == 'killing':
                records.extend(self.killing_checks(ctx, rng, fields))
            else:
                records.extend(getattr(self, f'{group}_checks')(ctx, rng))
        norms = self.control_norms(ctx, fields) if 'killing' in self.groups else {}
        return PointOutcome(records, dict(self.observed), dict(self.literal), norms)

    def run_points(self, points: Sequence[Tuple[float, ...]], seed: int = 0,
                   fields: Optional[Sequence[KillingField]] = None, workers: int = 1) -> List[CheckRecord]:
        fields = list(fields) if fields is not None else catalog.killing_fields(self.chart)
        points = [tuple(point) for point in points]
        indices = range(len(points))
        if workers > 1 and len(points) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(_run_point, repeat(self), indices, points, repeat(seed), repeat(fields)))
        else:
            outcomes = [self.run_point(i, p, seed, fields) for i, p in zip(indices, points)]

        records: List[CheckRecord] = []
        observed: Dict[str, Optional[int]] = {}
        literal: Dict[str, float] = {}
        norms_by_field: Dict[str, List[float]] = {}
        for outcome in outcomes:
            records.extend(outcome.records)
            for key, sign in outcome.observed.items():
                if observed.get(key) is None:
                    observed[key] = sign
            for key, residual in outcome.literal.items():
                literal[key] = max(literal.get(key, 0.0), residual)
            for name, norm in outcome.control_norms.items():
                norms_by_field.setdefault(name, []).append(norm)
        self.observed = observed
        self.literal = literal
        if 'killing' in self.groups:
            records.extend(self.control_checks(norms_by_field, fields))
        return records

    def ledger(self) -> List[SignEntry]:
        return [SignEntry(relation=entry.relation, expected=entry.sign, observed=self.observed.get(key),
                          literal=entry.literal, literal_residual=self.literal.get(key))
                for key, entry in SIGN_LEDGER.items()]


def _run_point(service: 'VerificationService', index: int, point: Tuple[float, ...], seed: int,
               fields: Sequence[KillingField]) -> PointOutcome:
    return service.run_point(index, point, seed, fields)


def run_verify(chart: Chart, samples: int = 64, seed: int = 42, tolerance: Optional[Tolerance] = None,
               order: int = 3, gram_tol: float = 1e-9, fd_step: float = 1e-5,
               groups: Sequence[str] = CHECK_GROUPS, target: Optional[str] = None,
               points: Optional[Sequence[Tuple[float, ...]]] = None, workers: int = 1) -> VerifyReport:
    """
    Run the identity suite at `samples` seeded points of the chart, or at the given points.
    With workers > 1 the points are spread over a process pool; the report is identical.

    Returns:
        VerifyReport whose exit_code is 0 when every record passes
    """
    check_order(order)
    tolerance = tolerance or Tolerance()
    service = VerificationService(chart, tolerance, order, gram_tol, fd_step, groups)
    if points is None:
        points = random_points(chart.domain, samples, seed)
    points = list(points)
    records = service.run_points(points, seed, workers=workers)

    orientation = {}
    if points:
        try:
            orientation = frame_point(chart, points[0], max(order, 1), gram_tol).signature_record()
        except BranegeoError:
            orientation = {}
    summary = {status: sum(1 for r in records if r.status == status)
               for status in ('pass', 'fail', 'insufficient_order', 'error')}
    code = exit_code_for(records)
    if code == 0:
        logger.info(f"✓ {summary['pass']} checks passed on {target or chart.name}")
    else:
        logger.warning(f"⚠ {target or chart.name}: {summary}")
    return VerifyReport(
        target=target or chart.name,
        seed=seed,
        samples=len(points),
        order=order,
        tolerance=tolerance,
        orientation=orientation,
        sign_ledger=service.ledger(),
        summary=summary,
        exit_code=code,
        checks=records,
    )

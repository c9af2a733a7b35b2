"""
Extensor Geometry Service
Projection, shape and connection extensors of a submanifold at one frame point
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence

import numpy as np

from services.clifford_service import Multivector, Signature
from services.frame_service import Chart, FramePoint, frame_point
from services.jet_service import Jet, get_space
from utils.errors import InsufficientJetOrder, NotTangent
from utils.sampling import LCG64

DIRAC_PARTS = ('full', 'wedge', 'contract')
TANGENT_TOL = 1e-8


@dataclass
class ExtensorSample:
    """Linear map sampled on a basis: values[k] is the image of basis[k]"""

    name: str
    domain_grade: int
    codomain_grade: int
    basis: List[Multivector]
    duals: List[Multivector]
    values: List[Multivector]

    def apply(self, argument: Multivector) -> Multivector:
        out = Multivector.zero(argument.sig)
        for dual, value in zip(self.duals, self.values):
            out = out + value.scale(argument.dot(dual))
        return out


class GeometryContext:
    """
    Extensor calculus at one point of an embedded chart.

    Fields are jet-valued multivectors expanded at the frame point; every
    derivative below is a jet derivative, so each one costs one Taylor order.
    """

    def __init__(self, frame: FramePoint, tangent_tol: float = TANGENT_TOL):
        if frame.order < 1:
            raise InsufficientJetOrder(1, frame.order, 'frame construction')
        self.frame = frame
        self.tangent_tol = tangent_tol
        self.cache: Dict[object, object] = {}

    @classmethod
    def at(cls, chart: Chart, u: Sequence[float], order: int = 3,
           gram_tol: float = 1e-9) -> 'GeometryContext':
        return cls(frame_point(chart, u, order, gram_tol))

    # Frame shortcuts

    @property
    def m(self) -> int:
        return self.frame.m

    @property
    def sig(self) -> Signature:
        return self.frame.sig

    @property
    def theta(self) -> List[Multivector]:
        return self.frame.theta

    @property
    def normal(self) -> List[Multivector]:
        return self.frame.normal

    @property
    def eta(self) -> List[int]:
        return self.frame.eta_tangent

    @property
    def I(self) -> Multivector:
        return self.frame.I_m

    @property
    def I_inverse(self) -> Multivector:
        return self.frame.I_m_inverse

    def reciprocal(self, a: int) -> Multivector:
        return self.frame.reciprocal(a)

    @cached_property
    def frame_vectors(self) -> List[List[Jet]]:
        return [self.frame.frame_vector(a) for a in range(self.m)]

    # Derivatives

    def directional(self, field: Multivector, a: int) -> Multivector:
        """Derivative of a field along the frame vector e_a"""
        out = Multivector.zero(self.sig)
        for i, component in enumerate(self.frame_vectors[a]):
            out = out + field.derivative(i).scale(component)
        return out

    def directional_scalar(self, value: Jet, a: int) -> Jet:
        out = Jet.constant(0.0)
        for i, component in enumerate(self.frame_vectors[a]):
            out = out + value.derivative(i) * component
        return out

    def along(self, v: Multivector, field: Multivector) -> Multivector:
        """v . d̊ F = sum_a (v . theta^a) dF/de_a"""
        out = Multivector.zero(self.sig)
        for a in range(self.m):
            weight = v.dot(self.theta[a])
            out = out + self.directional(field, a).scale(weight)
        return out

    def restricted_dirac(self, field: Multivector, part: str = 'full') -> Multivector:
        """
        d̊F = sum_a theta^a dF/de_a, the ambient Dirac operator restricted to tangent directions.

        Args:
            field: jet-valued multivector field
            part: 'full', 'wedge' or 'contract'
        """
        if part not in DIRAC_PARTS:
            raise ValueError(f"Unknown Dirac part '{part}'")
        out = Multivector.zero(self.sig)
        for a in range(self.m):
            derivative = self.directional(field, a)
            if part == 'wedge':
                term = self.theta[a].wedge(derivative)
            elif part == 'contract':
                term = self.theta[a].lc(derivative)
            else:
                term = self.theta[a] * derivative
            out = out + term
        return out

    # Projections

    def project(self, C: Multivector) -> Multivector:
        """P(C) = (C ⌟ I_m) I_m^-1"""
        return C.lc(self.I) * self.I_inverse

    def project_perp(self, C: Multivector) -> Multivector:
        return C - self.project(C)

    def tangent_residual(self, C: Multivector) -> float:
        return self.project_perp(C).norm()

    def require_tangent(self, C: Multivector):
        residual = self.tangent_residual(C)
        if residual > max(self.tangent_tol * C.norm(), 1e-12):
            raise NotTangent(residual)

    # Shape

    @cached_property
    def shape_frame(self) -> List[Multivector]:
        """S_a = -(dI/de_a) I^-1, the shape biform along theta_a"""
        return [-(self.directional(self.I, a) * self.I_inverse) for a in range(self.m)]

    def shape_coordinate(self, i: int) -> Multivector:
        """Shape biform along the coordinate direction gamma_i"""
        return -(self.I.derivative(i) * self.I_inverse)

    def shape_biform(self, v: Multivector) -> Multivector:
        """𝒮(v) = -(v . d̊ I_m) I_m^-1 for a tangent 1-form v"""
        self.require_tangent(v)
        out = Multivector.zero(self.sig)
        for a in range(self.m):
            out = out + self.shape_frame[a].scale(v.dot(self.theta[a]))
        return out

    def shape_biform_from_coframe(self, v: Multivector) -> Multivector:
        """Same biform built from the coframe: -sum_j P⊥(v . d̊ theta_j) ∧ theta^j"""
        self.require_tangent(v)
        out = Multivector.zero(self.sig)
        for j in range(self.m):
            moved = self.project_perp(self.along(v, self.reciprocal(j)))
            out = out - moved.wedge(self.theta[j])
        return out

    def shape_of(self, field: Multivector) -> Multivector:
        """S(C) = d̊P(C) - P(d̊C)"""
        return self.restricted_dirac(self.project(field)) - self.project(self.restricted_dirac(field))

    def shape_extensor(self) -> ExtensorSample:
        values = [self.shape_frame[a].scale(float(self.eta[a])) for a in range(self.m)]
        return ExtensorSample('shape', 1, 2, list(self.theta),
                              [self.reciprocal(a) for a in range(self.m)], values)

    def p_u_extensor(self, u: Multivector, field: Multivector) -> Multivector:
        """P_u(C) = u . d̊P(C) - P(u . d̊C)"""
        self.require_tangent(u)
        return self.along(u, self.project(field)) - self.project(self.along(u, field))

    # Covariant derivatives

    def covariant_along(self, a: int, field: Multivector) -> Multivector:
        """D_{e_a} C = dC/de_a + S_a x C"""
        return self.directional(field, a) + self.shape_frame[a].cross(field)

    def covariant_coordinate(self, i: int, field: Multivector) -> Multivector:
        return field.derivative(i) + self.shape_coordinate(i).cross(field)

    def covariant_derivative(self, v: Multivector, field: Multivector) -> Multivector:
        """D_v C = v . d̊C + 𝒮(v) x C"""
        return self.along(v, field) + self.shape_biform(v).cross(field)

    def intrinsic_dirac(self, field: Multivector, part: str = 'full') -> Multivector:
        """∂C = P(d̊C) for a tangent field"""
        self.require_tangent(field)
        return self.project(self.restricted_dirac(field, part))

    # Connection

    @cached_property
    def connection_coefficients(self) -> List[List[List[Jet]]]:
        """omega[a][b][c] = -(D_{e_b} theta^a) . theta_c"""
        m = self.m
        moved = [[self.covariant_along(b, self.theta[a]) for b in range(m)] for a in range(m)]
        return [[[-(moved[a][b].dot(self.reciprocal(c))) for c in range(m)]
                 for b in range(m)] for a in range(m)]

    @cached_property
    def lie_coefficients(self) -> List[List[List[Jet]]]:
        """lie[k][a][b]: frame bracket [e_a, e_b] = lie[k][a][b] e_k"""
        m = self.m
        vectors = self.frame_vectors
        bracket = [[[self.directional_scalar(vectors[b][i], a) - self.directional_scalar(vectors[a][i], b)
                     for i in range(m)] for b in range(m)] for a in range(m)]
        gammas = self.frame.gamma
        out = []
        for k in range(m):
            pulls = [self.theta[k].dot(gammas[i]) for i in range(m)]
            out.append([[sum((bracket[a][b][i] * pulls[i] for i in range(m)), Jet.constant(0.0))
                         for b in range(m)] for a in range(m)])
        return out

    def connection_arrays(self) -> Dict[str, np.ndarray]:
        """Numeric omega^a_bc, c^k_ab and d_omega[e,a,b,c] = e_e(omega^a_bc)"""
        if 'connection_arrays' in self.cache:
            return dict(self.cache['connection_arrays'])
        m = self.m
        omega = self.connection_coefficients
        lie = self.lie_coefficients
        d_omega = np.zeros((m, m, m, m))
        for e in range(m):
            for a in range(m):
                for b in range(m):
                    for c in range(m):
                        d_omega[e, a, b, c] = self.directional_scalar(omega[a][b][c], e).value
        arrays = {
            'omega': np.array([[[omega[a][b][c].value for c in range(m)] for b in range(m)] for a in range(m)]),
            'lie': np.array([[[lie[k][a][b].value for b in range(m)] for a in range(m)] for k in range(m)]),
            'd_omega': d_omega,
        }
        self.cache['connection_arrays'] = arrays
        return dict(arrays)

    def connection_biform(self, v: Multivector) -> Multivector:
        """omega_v = 1/2 sum_a (D_v theta_a) ∧ theta^a"""
        out = Multivector.zero(self.sig)
        for a in range(self.m):
            out = out + self.covariant_derivative(v, self.reciprocal(a)).wedge(self.theta[a])
        return out.scale(0.5)

    def ambient_connection_biform(self, v: Multivector) -> Multivector:
        """Connection biform of the full adapted frame: 1/2 sum_A (v . d̊ eps_A) ∧ eps^A"""
        out = Multivector.zero(self.sig)
        for a in range(self.m):
            out = out + self.along(v, self.reciprocal(a)).wedge(self.theta[a])
        for alpha, nu in enumerate(self.normal):
            out = out + self.along(v, self.frame.normal_reciprocal(alpha)).wedge(nu)
        return out.scale(0.5)

    def normal_block(self, v: Multivector) -> Multivector:
        """Normal-normal part of the ambient connection biform"""
        out = Multivector.zero(self.sig)
        for alpha, nu in enumerate(self.normal):
            moved = self.project_perp(self.along(v, self.frame.normal_reciprocal(alpha)))
            out = out + moved.wedge(nu)
        return out.scale(0.5)

    def connection_extensor(self) -> Dict:
        """Connection biforms on the coframe together with the coefficient arrays"""
        duals = [self.reciprocal(a) for a in range(self.m)]
        tangent = [self.connection_biform(t).scale(float(self.eta[a])) for a, t in enumerate(duals)]
        ambient = [self.ambient_connection_biform(t).scale(float(self.eta[a])) for a, t in enumerate(duals)]
        result = self.connection_arrays()
        result['omega_extensor'] = ExtensorSample('connection', 1, 2, list(self.theta), duals, tangent)
        result['ambient_extensor'] = ExtensorSample('ambient_connection', 1, 2, list(self.theta), duals, ambient)
        return result

    # Random fields

    def random_scalar_jet(self, rng: LCG64, space=None) -> Jet:
        """Random polynomial jet in the chart variables"""
        space = space or self.theta[0].space
        return Jet(space, rng.vector(space.size))

    def random_tangent_field(self, rng: LCG64, constant: bool = False) -> Multivector:
        out = Multivector.zero(self.sig)
        for theta in self.theta:
            weight = rng.normal_like() if constant else self.random_scalar_jet(rng)
            out = out + theta.scale(weight)
        return out

    def random_normal_field(self, rng: LCG64) -> Multivector:
        out = Multivector.zero(self.sig)
        for nu in self.normal:
            out = out + nu.scale(self.random_scalar_jet(rng))
        return out

    def random_field(self, rng: LCG64, grade: Optional[int] = None) -> Multivector:
        """Random ambient multivector field with polynomial jet coefficients"""
        space = self.theta[0].space
        coeffs = np.zeros((self.sig.blade_count, space.size))
        for mask in range(self.sig.blade_count):
            if grade is None or bin(mask).count('1') == grade:
                coeffs[mask] = rng.vector(space.size)
        return Multivector(self.sig, coeffs, space)

    def random_tangent_multivector(self, rng: LCG64) -> Multivector:
        """Random element of the tangent algebra with jet coefficients"""
        out = Multivector.scalar(self.sig, self.random_scalar_jet(rng))
        blades = [Multivector.scalar(self.sig, 1.0)]
        for theta in self.theta:
            blades = blades + [b.wedge(theta) for b in blades]
        for blade in blades[1:]:
            out = out + blade.scale(self.random_scalar_jet(rng))
        return out

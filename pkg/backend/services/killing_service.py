"""
Killing and Maxwell Service
Exterior derivative and coderivative, Killing-field checks, the electromagnetic-like
encoding of a Killing field and the vacuum (hills) report
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from services.clifford_service import Multivector
from services.curvature_service import (dalembertian, frame_biforms, ledger_sign, ricci_oneform,
                                        ricci_operator, shape_squared)
from services.extensor_service import GeometryContext
from services.frame_service import Chart, Component, frame_point
from utils.errors import NotKilling
from utils.logger import get_logger

logger = get_logger('killing')


@dataclass
class KillingField:
    """Vector field X = X^i d/du^i given by chart-coordinate expressions"""

    name: str
    components: List[Component]
    control: bool = False

    def oneform(self, ctx: GeometryContext) -> Multivector:
        """Metric dual A = sum_i X^i gamma_i"""
        frame = ctx.frame
        values = frame.chart.evaluate_components(self.components, frame.u, frame.order)
        out = Multivector.zero(ctx.sig)
        for value, gamma in zip(values, frame.gamma):
            out = out + gamma.scale(value)
        return out


def exterior_derivative(ctx: GeometryContext, field_: Multivector) -> Multivector:
    """d C = ∂∧C"""
    return ctx.intrinsic_dirac(field_, 'wedge')


def coderivative(ctx: GeometryContext, field_: Multivector) -> Multivector:
    """δC = -∂⌟C"""
    return -ctx.intrinsic_dirac(field_, 'contract')


def exterior_and_coderivative(ctx: GeometryContext, field_: Multivector) -> Dict[str, Multivector]:
    """
    Both decompositions of the square of the Dirac operator on a tangent field.

    Returns:
        Dict with d, delta, box (∂²C), hodge (-(dδ + δd)C), ricci (∂∧∂C),
        remainder (∂²C - ∂∧∂C) and dalembertian (∂·∂C built directly)
    """
    d = exterior_derivative(ctx, field_)
    delta = coderivative(ctx, field_)
    box = ctx.intrinsic_dirac(ctx.intrinsic_dirac(field_))
    hodge = -(exterior_derivative(ctx, delta) + coderivative(ctx, d))
    ricci = ricci_operator(ctx, field_)
    return {
        'd': d,
        'delta': delta,
        'box': box,
        'hodge': hodge,
        'ricci': ricci,
        'remainder': box - ricci,
        'dalembertian': dalembertian(ctx, field_),
    }


def killing_residual(ctx: GeometryContext, field_: KillingField) -> Dict:
    """
    Symmetrized covariant derivative and divergence of the dual 1-form.

    Returns:
        Dict with killing_norm, div_norm and the matrix (D_a A).theta_b + (D_b A).theta_a
    """
    A = field_.oneform(ctx)
    m = ctx.m
    moved = [ctx.covariant_along(a, A) for a in range(m)]
    matrix = np.zeros((m, m))
    for a in range(m):
        for b in range(m):
            matrix[a, b] = (moved[a].dot(ctx.reciprocal(b)) + moved[b].dot(ctx.reciprocal(a))).value
    divergence = coderivative(ctx, A)
    return {
        'field': field_.name,
        'killing_norm': float(np.linalg.norm(matrix)),
        'div_norm': divergence.norm(),
        'matrix': matrix,
    }


def maxwell_encoding_residual(ctx: GeometryContext, field_: KillingField,
                              killing_tol: float = 1e-6) -> Dict:
    """
    F = dA for the Killing 1-form A and the relations tying it to S²(A).

    The Killing precondition is checked first; a failure is logged and
    reported, and the computation continues.
    """
    killing = killing_residual(ctx, field_)
    precondition = None
    if killing['killing_norm'] > killing_tol or killing['div_norm'] > killing_tol:
        precondition = NotKilling(killing['killing_norm'], killing['div_norm'])
        logger.warning(f"⚠ Killing precondition failed for '{field_.name}' at {ctx.frame.u}: {precondition}")

    A = field_.oneform(ctx)
    F = exterior_derivative(ctx, A)
    dirac_F = ctx.intrinsic_dirac(F)
    delta_F = coderivative(ctx, F)
    dF = exterior_derivative(ctx, F)
    S2 = shape_squared(ctx, A)
    ricci = ricci_operator(ctx, A)
    box = dalembertian(ctx, A)
    sigma = ledger_sign('dirac_maxwell')
    return {
        'field': field_.name,
        'killing': killing,
        'precondition': str(precondition) if precondition else None,
        'F': F,
        'dirac_F': dirac_F,
        'codifferential_F': delta_F,
        'dF': dF,
        'shape_squared': S2,
        'ricci': ricci,
        'dalembertian': box,
        'residual': (dirac_F - (S2.scale(-2.0)).scale(float(sigma))).norm(),
        'literal_residual': (dirac_F + S2.scale(2.0)).norm(),
        'codifferential_residual': (delta_F - S2.scale(2.0 * ledger_sign('codifferential_maxwell'))).norm(),
        'dalembertian_residual': (ricci - box.scale(float(ledger_sign('killing_dalembertian')))).norm(),
    }


def hills_report(ctx: GeometryContext, tol: float = 1e-8) -> Dict:
    """
    Per-frame quantities of the vacuum relation S²(theta^a) = T^a - T theta^a / 2.

    T^a := -ℛ^a + T theta^a / 2 with ℛ^a = ∂∧∂ theta^a; T follows from the trace
    T = 2 sum_a theta_a . ℛ^a / (m - 2) and is undetermined when m = 2. T^a is built from
    the curvature biforms, and the right-hand side takes T back from the trace of the
    T^a themselves, so the comparison with S² also tests the trace closure.
    """
    m = ctx.m
    sigma = ledger_sign('hills_rearrangement')
    ricci = [ricci_operator(ctx, ctx.theta[a]) for a in range(m)]
    biforms = frame_biforms(ctx)
    contracted = [ricci_oneform(ctx, ctx.theta[a], 'contract', biforms=biforms)
                  .scale(float(ledger_sign('ricci_operator'))) for a in range(m)]
    squared = [shape_squared(ctx, ctx.theta[a]) for a in range(m)]
    shape_norms = [ctx.shape_frame[a].norm() for a in range(m)]
    trace_ricci = sum(ctx.reciprocal(a).dot(contracted[a]).value for a in range(m))
    trace: Optional[float] = None if m == 2 else 2.0 * trace_ricci / (m - 2)

    frames = []
    for a in range(m):
        record = {
            'index': a,
            'shape_squared': squared[a],
            'ricci': ricci[a],
            'shape_norm': shape_norms[a],
        }
        record['source'] = None if trace is None else -contracted[a] + ctx.theta[a].scale(0.5 * trace)
        frames.append(record)

    source_trace: Optional[float] = None
    if trace is not None:
        source_trace = sum(ctx.reciprocal(a).dot(frames[a]['source']).value for a in range(m))
    for a, record in enumerate(frames):
        if source_trace is None:
            rhs = -ricci[a]
        else:
            rhs = record['source'] - ctx.theta[a].scale(0.5 * source_trace)
        record['rhs'] = rhs
        record['residual'] = (squared[a] - rhs.scale(float(sigma))).norm()

    vacuum = all(r['shape_squared'].norm() < tol for r in frames)
    return {
        'point': ctx.frame.u,
        'trace': trace if trace is not None else 'undetermined (m=2)',
        'ricci_trace': trace_ricci,
        'trace_closure': None if trace is None else abs(source_trace - trace),
        'frames': frames,
        'vacuum': vacuum,
        'max_shape_norm': max(shape_norms) if shape_norms else 0.0,
    }


def survey_field(chart: Chart, field_: KillingField, points: Sequence[Sequence[float]],
                 order: int = 3, gram_tol: float = 1e-9, killing_tol: float = 1e-6) -> List[Dict]:
    """Killing and Maxwell residual norms of one field at each point"""
    rows = []
    for point in points:
        ctx = GeometryContext(frame_point(chart, point, order, gram_tol))
        result = maxwell_encoding_residual(ctx, field_, killing_tol)
        rows.append({
            'point': [float(x) for x in point],
            'killing_norm': result['killing']['killing_norm'],
            'div_norm': result['killing']['div_norm'],
            'precondition': result['precondition'],
            'maxwell_residual': result['residual'],
            'literal_residual': result['literal_residual'],
            'codifferential_residual': result['codifferential_residual'],
            'dalembertian_residual': result['dalembertian_residual'],
            'field_strength_norm': result['F'].norm(),
        })
    return rows

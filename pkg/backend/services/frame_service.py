"""
Manifold Frame Service
Charts, coordinate coframes, indefinite Gram-Schmidt and adapted orthonormal frames
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from services.clifford_service import Multivector, Signature, pseudoscalar_ops
from services.expression_service import ExpressionAst, chart_variables, evaluate_jets
from services.jet_service import Jet
from utils.errors import DegenerateTangent, IsotropicDirection, NotOrthonormal

Component = Union[ExpressionAst, Callable[[List[Jet]], Jet]]

TIE_TOLERANCE = 1e-12


@dataclass
class Chart:
    """Single-chart embedding U ⊂ R^m -> R^(p,q)"""

    name: str
    params: List[str]
    signature: Signature
    embedding: List[Component]
    domain: List[Tuple[float, float]]
    killing: Dict[str, List[Component]] = field(default_factory=dict)
    controls: Dict[str, List[Component]] = field(default_factory=dict)
    expressions: Dict[str, List[str]] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.embedding) != self.signature.n:
            raise ValueError(
                f"Chart '{self.name}' has {len(self.embedding)} embedding components "
                f"for a {self.signature.n}-dimensional ambient space"
            )
        if self.m >= self.n:
            raise ValueError(f"Chart '{self.name}' needs m < n (got m={self.m}, n={self.n})")
        if len(self.domain) != self.m:
            raise ValueError(f"Chart '{self.name}' domain does not match its {self.m} parameters")

    @property
    def m(self) -> int:
        return len(self.params)

    @property
    def n(self) -> int:
        return self.signature.n

    def evaluate_components(self, components: Sequence[Component], u: Sequence[float],
                            order: int) -> List[Jet]:
        variables = chart_variables(u, order)
        out = []
        for comp in components:
            if callable(comp):
                out.append(Jet.coerce(comp(variables)))
            else:
                out.append(evaluate_jets(comp, variables))
        return out

    def embedding_jets(self, u: Sequence[float], order: int) -> List[Jet]:
        return self.evaluate_components(self.embedding, u, order)

    def position(self, u: Sequence[float]) -> np.ndarray:
        return np.array([j.value for j in self.embedding_jets(u, 0)])

    def in_domain(self, u: Sequence[float]) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(u, self.domain))


class OrthonormalCoframe(NamedTuple):
    coforms: List[Multivector]
    signs: List[int]
    coefficients: List[List[Jet]]
    pivots: List[int]


def coordinate_frame(chart: Chart, u: Sequence[float], order: int) -> List[Multivector]:
    """
    Ambient 1-forms dual to the coordinate tangents.

    gamma_i = sum_j eta_j (dx^j/du^i) dx^j, carrying one jet order less than the embedding.
    """
    x = chart.embedding_jets(u, order)
    sig = chart.signature
    gammas = []
    for i in range(chart.m):
        comps = [x[j].derivative(i) * sig.eta(j) for j in range(chart.n)]
        gammas.append(Multivector.vector(sig, comps))
    return gammas


def _scale_of(vectors: Sequence[Multivector]) -> float:
    gram = np.array([[abs(a.dot(b).value) for b in vectors] for a in vectors])
    return max(1.0, float(gram.max())) if gram.size else 1.0


def orthonormalize(vectors: Sequence[Multivector], sig: Signature, tol: float = 1e-9,
                   count: Optional[int] = None, pivot: str = 'max') -> OrthonormalCoframe:
    """
    Gram-Schmidt under the indefinite scalar product, tracking the jet coefficients.

    Args:
        vectors: jet-valued 1-forms
        sig: ambient signature
        tol: relative tolerance on self-products
        count: number of coforms to produce (default: all inputs)
        pivot: 'max' picks the remaining vector of largest |<v,v>| at every step;
               'sequential' keeps input order and only pivots past null vectors

    Returns:
        OrthonormalCoframe with coforms theta^a = sum_i coefficients[a][i] vectors[i]
    """
    for vec in vectors:
        if vec.sig != sig:
            raise NotOrthonormal(f"Vector signature {vec.sig} differs from {sig}")
    k = len(vectors)
    count = k if count is None else count
    threshold = tol * _scale_of(vectors)
    work = list(vectors)
    rows = [[Jet.constant(1.0 if i == j else 0.0) for j in range(k)] for i in range(k)]
    remaining = list(range(k))
    coforms, signs, coefficients, pivots = [], [], [], []

    while len(coforms) < count:
        if not remaining:
            raise DegenerateTangent(f"Only {len(coforms)} independent directions, need {count}")
        norms = {i: work[i].dot(work[i]) for i in remaining}
        best = _pick(remaining, norms, threshold, pivot)
        if best is None:
            if all(np.max(np.abs(work[i].value())) <= threshold for i in remaining):
                raise DegenerateTangent("Vectors are linearly dependent at this point")
            raise IsotropicDirection("Every remaining direction is null")
        q = norms[best]
        sign = 1 if q.value > 0 else -1
        length = (q * sign) ** 0.5
        theta = work[best] / length
        row = [c / length for c in rows[best]]
        remaining.remove(best)
        for i in remaining:
            proj = theta.dot(work[i]) * sign
            work[i] = work[i] - theta.scale(proj)
            rows[i] = [ri - proj * rb for ri, rb in zip(rows[i], row)]
        coforms.append(theta)
        signs.append(sign)
        coefficients.append(row)
        pivots.append(best)
    return OrthonormalCoframe(coforms, signs, coefficients, pivots)


def _pick(remaining: List[int], norms: Dict[int, Jet], threshold: float,
          pivot: str) -> Optional[int]:
    if pivot == 'sequential':
        first = remaining[0]
        if abs(norms[first].value) > threshold:
            return first
    largest = max(abs(norms[i].value) for i in remaining)
    if largest <= threshold:
        return None
    for i in remaining:
        if abs(norms[i].value) >= largest * (1.0 - TIE_TOLERANCE):
            return i
    return None


def induced_metric(chart: Chart, u: Sequence[float], order: int = 1,
                   tol: float = 1e-9) -> np.ndarray:
    """g_ij = gamma_i . gamma_j at the point"""
    gammas = coordinate_frame(chart, u, max(order, 1))
    g = np.array([[a.dot(b).value for b in gammas] for a in gammas])
    scale = max(1.0, float(np.abs(g).max()))
    if abs(np.linalg.det(g)) < tol * scale ** chart.m:
        raise DegenerateTangent(f"Induced metric is degenerate at {tuple(u)} (det={np.linalg.det(g):.3e})")
    return g


@dataclass
class FramePoint:
    """Adapted orthonormal frame at one chart point, every entry jet-valued"""

    chart: Chart
    u: Tuple[float, ...]
    order: int
    position: np.ndarray
    gamma: List[Multivector]
    theta: List[Multivector]
    normal: List[Multivector]
    eta_tangent: List[int]
    eta_normal: List[int]
    coefficients: List[List[Jet]]
    g: np.ndarray
    I_m: Multivector
    I_m_inverse: Multivector
    I_n: Multivector
    I_n_inverse: Multivector

    @property
    def m(self) -> int:
        return self.chart.m

    @property
    def n(self) -> int:
        return self.chart.n

    @property
    def sig(self) -> Signature:
        return self.chart.signature

    def reciprocal(self, a: int) -> Multivector:
        """theta_a = eta_a theta^a"""
        return self.theta[a].scale(float(self.eta_tangent[a]))

    def normal_reciprocal(self, alpha: int) -> Multivector:
        return self.normal[alpha].scale(float(self.eta_normal[alpha]))

    def frame_vector(self, a: int) -> List[Jet]:
        """Chart components e_a^i of the frame vector dual to theta^a"""
        return [c * float(self.eta_tangent[a]) for c in self.coefficients[a]]

    def coframe(self) -> List[Multivector]:
        return list(self.theta) + list(self.normal)

    def gram(self) -> np.ndarray:
        full = self.coframe()
        return np.array([[a.dot(b).value for b in full] for a in full])

    def signature_record(self) -> Dict[str, str]:
        return {
            'tangent': ''.join('+' if s > 0 else '-' for s in self.eta_tangent),
            'normal': ''.join('+' if s > 0 else '-' for s in self.eta_normal),
        }


def frame_point(chart: Chart, u: Sequence[float], order: int = 3,
                tol: float = 1e-9) -> FramePoint:
    """
    Build the adapted frame at u.

    Tangent coframe: pivoted Gram-Schmidt over gamma_i.
    Normal coframe: Gram-Schmidt continued over the ambient coordinate coframe
    after removing its tangent part.
    """
    u = tuple(float(x) for x in u)
    sig = chart.signature
    gammas = coordinate_frame(chart, u, order)
    g = np.array([[a.dot(b).value for b in gammas] for a in gammas])
    scale = max(1.0, float(np.abs(g).max()))
    if abs(np.linalg.det(g)) < tol * scale ** chart.m:
        raise DegenerateTangent(f"Induced metric is degenerate at {u}")

    tangent = orthonormalize(gammas, sig, tol)
    candidates = []
    for j in range(chart.n):
        e_j = Multivector.basis_vector(sig, j)
        w = e_j
        for theta, eta in zip(tangent.coforms, tangent.signs):
            w = w - theta.scale(theta.dot(e_j) * float(eta))
        candidates.append(w)
    normal = orthonormalize(candidates, sig, tol, count=chart.n - chart.m)

    volume = pseudoscalar_ops(tangent.coforms, tol=1e-7)
    full = pseudoscalar_ops(list(tangent.coforms) + list(normal.coforms), tol=1e-7)
    return FramePoint(
        chart=chart,
        u=u,
        order=order,
        position=chart.position(u),
        gamma=gammas,
        theta=tangent.coforms,
        normal=normal.coforms,
        eta_tangent=tangent.signs,
        eta_normal=normal.signs,
        coefficients=tangent.coefficients,
        g=g,
        I_m=volume['I'],
        I_m_inverse=volume['I_inverse'],
        I_n=full['I'],
        I_n_inverse=full['I_inverse'],
    )

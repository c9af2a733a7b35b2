"""
Clifford Algebra Service
Dense multivectors over Cl(p,q) with jet-valued coefficients
"""

from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from services.jet_service import (
    CONSTANT_SPACE, Jet, JetSpace, common_space, get_space, lift,
)
from utils.errors import (
    GradeOutOfRange, InsufficientJetOrder, NotOrthonormal, SignatureMismatch,
)

MAX_DIMENSION = 12
PRODUCT_KINDS = ('geometric', 'wedge', 'left', 'right')


class Signature:
    """Ordered metric signs of the basis 1-forms"""

    def __init__(self, etas: Sequence[int]):
        etas = tuple(int(e) for e in etas)
        if not etas or len(etas) > MAX_DIMENSION:
            raise ValueError(f"Signature dimension must be 1..{MAX_DIMENSION}, got {len(etas)}")
        if any(e not in (1, -1) for e in etas):
            raise ValueError(f"Signature entries must be +1 or -1, got {etas}")
        self.etas = etas

    @classmethod
    def from_pq(cls, p: int, q: int) -> 'Signature':
        return cls((1,) * p + (-1,) * q)

    @classmethod
    def parse(cls, text: str) -> 'Signature':
        """'+,-,-' -> Signature((1, -1, -1))"""
        etas = []
        for part in text.replace(' ', '').split(','):
            if part in ('+', '+1', '1'):
                etas.append(1)
            elif part in ('-', '-1'):
                etas.append(-1)
            else:
                raise ValueError(f"Invalid signature entry '{part}' in '{text}'")
        return cls(etas)

    @property
    def n(self) -> int:
        return len(self.etas)

    @property
    def p(self) -> int:
        return self.etas.count(1)

    @property
    def q(self) -> int:
        return self.etas.count(-1)

    @property
    def blade_count(self) -> int:
        return 1 << self.n

    def eta(self, i: int) -> int:
        return self.etas[i]

    def __eq__(self, other):
        return isinstance(other, Signature) and other.etas == self.etas

    def __hash__(self):
        return hash(self.etas)

    def __str__(self):
        return ','.join('+' if e > 0 else '-' for e in self.etas)

    def __repr__(self):
        return f"Signature('{self}')"


class _Tables(NamedTuple):
    grades: np.ndarray
    reverse: np.ndarray
    metric: np.ndarray
    rows: np.ndarray
    partner: np.ndarray
    kinds: Dict[str, np.ndarray]


@lru_cache(maxsize=None)
def _tables(etas: tuple) -> _Tables:
    n = len(etas)
    size = 1 << n
    blades = np.arange(size)
    grades = np.array([bin(i).count('1') for i in range(size)])
    neg_mask = sum(1 << i for i, e in enumerate(etas) if e < 0)

    left = blades[:, None]
    right = blades[None, :]
    swaps = np.zeros((size, size), dtype=int)
    shifted = left >> 1
    while np.any(shifted):
        swaps += grades[shifted & right]
        shifted = shifted >> 1
    shared_negative = grades[left & right & neg_mask]
    sign = np.where((swaps + shared_negative) % 2 == 0, 1.0, -1.0)

    # Re-index by (i, k) with j = i ^ k so that products gather into blade k
    partner = left ^ right
    rows = np.broadcast_to(left, (size, size))
    sign_ik = sign[rows, partner]
    keep = {
        'geometric': np.ones((size, size), dtype=bool),
        'wedge': (rows & partner) == 0,
        'left': (rows & partner) == rows,
        'right': (rows & partner) == partner,
    }
    kinds = {kind: np.where(mask, sign_ik, 0.0) for kind, mask in keep.items()}
    reverse = np.where((grades * (grades - 1) // 2) % 2 == 0, 1.0, -1.0)
    metric = np.array([sign[i, i] * reverse[i] for i in range(size)])
    return _Tables(grades, reverse, metric, rows, partner, kinds)


Scalar = Union[int, float, Jet]


class Multivector:
    """
    Multivector with coefficients of shape (2^n, jet size).

    Row k holds the jet coefficient of the blade whose bitmask is k.
    """

    __slots__ = ('sig', 'space', 'coeffs')
    __array_ufunc__ = None

    def __init__(self, sig: Signature, coeffs, space: JetSpace = CONSTANT_SPACE):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None]
        if coeffs.shape != (sig.blade_count, space.size):
            raise ValueError(
                f"Expected coefficients of shape {(sig.blade_count, space.size)}, got {coeffs.shape}"
            )
        self.sig = sig
        self.space = space
        self.coeffs = coeffs

    # Constructors

    @classmethod
    def zero(cls, sig: Signature, space: JetSpace = CONSTANT_SPACE) -> 'Multivector':
        return cls(sig, np.zeros((sig.blade_count, space.size)), space)

    @classmethod
    def blade(cls, sig: Signature, mask: int, coeff: Scalar = 1.0) -> 'Multivector':
        coeff = Jet.coerce(coeff)
        out = np.zeros((sig.blade_count, coeff.space.size))
        out[mask] = coeff.coeffs
        return cls(sig, out, coeff.space)

    @classmethod
    def scalar(cls, sig: Signature, value: Scalar) -> 'Multivector':
        return cls.blade(sig, 0, value)

    @classmethod
    def basis_vector(cls, sig: Signature, index: int) -> 'Multivector':
        return cls.blade(sig, 1 << index)

    @classmethod
    def vector(cls, sig: Signature, components: Sequence[Scalar]) -> 'Multivector':
        """Grade-1 element sum_i c_i e_i"""
        if len(components) != sig.n:
            raise ValueError(f"Expected {sig.n} components, got {len(components)}")
        jets = [Jet.coerce(c) for c in components]
        space = CONSTANT_SPACE
        for jet in jets:
            space = common_space(space, jet.space)
        out = np.zeros((sig.blade_count, space.size))
        for i, jet in enumerate(jets):
            out[1 << i] = lift(jet.coeffs, jet.space, space)
        return cls(sig, out, space)

    @classmethod
    def from_values(cls, sig: Signature, values: Sequence[float]) -> 'Multivector':
        return cls(sig, np.asarray(values, dtype=float)[:, None], CONSTANT_SPACE)

    # Basic structure

    @property
    def order(self) -> int:
        return self.space.order

    def _check(self, other: 'Multivector'):
        if other.sig != self.sig:
            raise SignatureMismatch(self.sig, other.sig)

    def _aligned(self, other: 'Multivector'):
        self._check(other)
        space = common_space(self.space, other.space)
        return space, lift(self.coeffs, self.space, space), lift(other.coeffs, other.space, space)

    def value(self) -> np.ndarray:
        """Coefficients at the expansion point"""
        return self.coeffs[:, 0].copy()

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs[:, 0]))

    def coefficient(self, mask: int) -> Jet:
        return Jet(self.space, self.coeffs[mask].copy())

    def scalar_part(self) -> Jet:
        return self.coefficient(0)

    def lifted(self, space: JetSpace) -> 'Multivector':
        return Multivector(self.sig, lift(self.coeffs, self.space, space), space)

    # Linear structure

    def __add__(self, other):
        if not isinstance(other, Multivector):
            other = Multivector.scalar(self.sig, other)
        space, a, b = self._aligned(other)
        return Multivector(self.sig, a + b, space)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Multivector):
            other = Multivector.scalar(self.sig, other)
        space, a, b = self._aligned(other)
        return Multivector(self.sig, a - b, space)

    def __rsub__(self, other):
        return Multivector.scalar(self.sig, other) - self

    def __neg__(self):
        return Multivector(self.sig, -self.coeffs, self.space)

    def scale(self, factor: Scalar) -> 'Multivector':
        if isinstance(factor, (int, float, np.floating, np.integer)):
            return Multivector(self.sig, self.coeffs * float(factor), self.space)
        factor = Jet.coerce(factor)
        space = common_space(self.space, factor.space)
        a = lift(self.coeffs, self.space, space)
        f = lift(factor.coeffs, factor.space, space)
        if space.is_constant:
            return Multivector(self.sig, a * f, space)
        table = (f @ space.mult_right).reshape(space.size, space.size)
        return Multivector(self.sig, a @ table, space)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return self.product(other, 'geometric')
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(1.0 / Jet.coerce(other))

    # Products

    def product(self, other: 'Multivector', kind: str = 'geometric') -> 'Multivector':
        space, a, b = self._aligned(other)
        tables = _tables(self.sig.etas)
        if space.is_constant:
            pair = (a[:, 0][:, None] * b[:, 0][None, :])[:, :, None]
        else:
            c = space.size
            partial = (a @ space.mult_left).reshape(-1, c, c)
            pair = np.matmul(b, partial)
        gathered = pair[tables.rows, tables.partner]
        out = (tables.kinds[kind][:, :, None] * gathered).sum(axis=0)
        return Multivector(self.sig, out, space)

    def wedge(self, other: 'Multivector') -> 'Multivector':
        return self.product(other, 'wedge')

    def lc(self, other: 'Multivector') -> 'Multivector':
        """Left contraction self ⌟ other"""
        return self.product(other, 'left')

    def rc(self, other: 'Multivector') -> 'Multivector':
        """Right contraction self ⌞ other"""
        return self.product(other, 'right')

    def dot(self, other: 'Multivector') -> Jet:
        """Scalar product <reverse(self) other>_0, zero across different grades"""
        space, a, b = self._aligned(other)
        weighted = a * _tables(self.sig.etas).metric[:, None]
        if space.is_constant:
            return Jet(space, np.array([float(np.sum(weighted[:, 0] * b[:, 0]))]))
        return Jet(space, (weighted.T @ b).ravel() @ space.mult_flat)

    def cross(self, other: 'Multivector') -> 'Multivector':
        """Commutator product (ab - ba)/2"""
        return (self * other - other * self).scale(0.5)

    # Grade operations

    def grade(self, r: int) -> 'Multivector':
        if r < 0 or r > self.sig.n:
            raise GradeOutOfRange(r, self.sig.n)
        mask = (_tables(self.sig.etas).grades == r)[:, None]
        return Multivector(self.sig, np.where(mask, self.coeffs, 0.0), self.space)

    def grades_present(self, tol: float = 0.0) -> List[int]:
        grades = _tables(self.sig.etas).grades
        return sorted({int(g) for g, row in zip(grades, self.coeffs) if np.any(np.abs(row) > tol)})

    def reverse(self) -> 'Multivector':
        return Multivector(self.sig, self.coeffs * _tables(self.sig.etas).reverse[:, None], self.space)

    def blade_inverse(self) -> 'Multivector':
        """Inverse of a blade or versor: reverse / <A reverse(A)>_0"""
        rev = self.reverse()
        norm = (self * rev).scalar_part()
        return rev / norm

    # Jet calculus

    def derivative(self, var: int) -> 'Multivector':
        if self.space.is_constant:
            return Multivector.zero(self.sig)
        if self.order < 1:
            raise InsufficientJetOrder(1, self.order)
        mat = self.space.derivative_matrix(var)
        return Multivector(self.sig, self.coeffs @ mat.T, get_space(self.space.m, self.order - 1))

    def truncate(self, order: int) -> 'Multivector':
        if self.space.is_constant or order >= self.order:
            return self
        return self.lifted(get_space(self.space.m, order))

    def __repr__(self):
        terms = []
        for mask, c in enumerate(self.coeffs[:, 0]):
            if abs(c) > 1e-12:
                name = 'e' + ''.join(str(i + 1) for i in range(self.sig.n) if mask >> i & 1) if mask else ''
                terms.append(f"{c:+.6g}{name}")
        return f"Multivector({' '.join(terms) or '0'}; order={self.order})"


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    return a.product(b, 'geometric')


def graded_products(a: Multivector, b: Multivector, r: Optional[int] = None) -> Dict:
    """All graded products of a and b; grade_r is included when r is given"""
    result = {
        'wedge': a.wedge(b),
        'left_contract': a.lc(b),
        'right_contract': a.rc(b),
        'scalar': a.dot(b),
        'reverse': a.reverse(),
    }
    if r is not None:
        result['grade_r'] = a.grade(r)
    return result


def commutator_x(a: Multivector, b: Multivector) -> Multivector:
    return a.cross(b)


def pseudoscalar_ops(frame_coforms: Sequence[Multivector], tol: float = 1e-9) -> Dict:
    """
    Volume element of an orthonormal coframe.

    Args:
        frame_coforms: mutually orthogonal unit 1-forms (order of the list fixes orientation)
        tol: orthonormality tolerance on the value parts

    Returns:
        Dict with 'I' and 'I_inverse'
    """
    if not frame_coforms:
        raise NotOrthonormal("Empty coframe")
    for a, first in enumerate(frame_coforms):
        for b, second in enumerate(frame_coforms):
            product = first.dot(second).value
            if a != b and abs(product) > tol:
                raise NotOrthonormal(f"Coforms {a} and {b} are not orthogonal ({product:.3e})")
            if a == b and abs(abs(product) - 1.0) > tol:
                raise NotOrthonormal(f"Coform {a} is not unit ({product:.3e})")
    volume = frame_coforms[0]
    for coform in frame_coforms[1:]:
        volume = volume * coform
    return {'I': volume, 'I_inverse': volume.blade_inverse()}

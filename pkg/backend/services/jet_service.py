"""
Jet Arithmetic Service
Truncated multivariate Taylor expansions used as the differentiable scalar type
"""

from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from utils.errors import DomainError, InsufficientJetOrder, ShapeMismatch

Number = Union[int, float]


class JetSpace:
    """
    Coefficient layout for jets in m variables truncated at total degree `order`.

    Coefficient alpha stores (d^alpha f)(x0) / alpha!. Multi-indices are sorted by
    degree first, so the coefficients of every lower order form a prefix.
    """

    def __init__(self, m: int, order: int):
        if m < 0 or order < 0:
            raise ValueError(f"Invalid jet space (m={m}, order={order})")
        self.m = m
        self.order = order
        self.indices: List[Tuple[int, ...]] = []
        for degree in range(order + 1):
            for combo in combinations_with_replacement(range(m), degree):
                alpha = [0] * m
                for var in combo:
                    alpha[var] += 1
                self.indices.append(tuple(alpha))
        if m == 0:
            self.indices = [()]
        self.size = len(self.indices)
        self.index_of: Dict[Tuple[int, ...], int] = {a: k for k, a in enumerate(self.indices)}
        self.degrees = np.array([sum(a) for a in self.indices], dtype=int)
        self.mult = self._build_mult()
        c = self.size
        # reshaped views of mult[a, b, k]: rows a*c+b, rows b over a*c+k, rows a over b*c+k
        self.mult_flat = self.mult.reshape(c * c, c)
        self.mult_right = np.ascontiguousarray(self.mult.transpose(1, 0, 2)).reshape(c, c * c)
        self.mult_left = self.mult.reshape(c, c * c)
        self._deriv: Dict[int, np.ndarray] = {}

    @property
    def is_constant(self) -> bool:
        return self.m == 0

    def size_at(self, order: int) -> int:
        return int(np.count_nonzero(self.degrees <= order))

    def _build_mult(self) -> np.ndarray:
        c = self.size
        mult = np.zeros((c, c, c))
        for a, alpha in enumerate(self.indices):
            for b, beta in enumerate(self.indices):
                gamma = tuple(x + y for x, y in zip(alpha, beta))
                k = self.index_of.get(gamma)
                if k is not None:
                    mult[a, b, k] = 1.0
        return mult

    def derivative_matrix(self, var: int) -> np.ndarray:
        """Matrix mapping order-K coefficients to order-(K-1) coefficients of d/dx_var"""
        if var not in self._deriv:
            lower = get_space(self.m, self.order - 1)
            mat = np.zeros((lower.size, self.size))
            for row, alpha in enumerate(lower.indices):
                raised = list(alpha)
                raised[var] += 1
                mat[row, self.index_of[tuple(raised)]] = alpha[var] + 1
            self._deriv[var] = mat
        return self._deriv[var]

    def __repr__(self):
        return f"JetSpace(m={self.m}, order={self.order})"


@lru_cache(maxsize=None)
def get_space(m: int, order: int) -> JetSpace:
    if m == 0:
        order = 0
    return JetSpace(m, order)


CONSTANT_SPACE = get_space(0, 0)


def common_space(first: JetSpace, second: JetSpace) -> JetSpace:
    """Constants adapt to anything; jets of different orders truncate to the lower one"""
    if first.is_constant:
        return second
    if second.is_constant:
        return first
    if first.m != second.m:
        raise ShapeMismatch(f"Jets over {first.m} and {second.m} variables cannot be mixed")
    return first if first.order <= second.order else second


def lift(coeffs: np.ndarray, source: JetSpace, target: JetSpace) -> np.ndarray:
    """Re-express trailing-axis jet coefficients in the target space"""
    if source is target:
        return coeffs
    if source.is_constant:
        out = np.zeros(coeffs.shape[:-1] + (target.size,))
        out[..., 0] = coeffs[..., 0]
        return out
    return coeffs[..., :target.size]


def mul_coeffs(a: np.ndarray, b: np.ndarray, space: JetSpace) -> np.ndarray:
    if space.is_constant:
        return a * b
    return np.outer(a, b).ravel() @ space.mult_flat


# Univariate Taylor series f^(k)(a)/k!, k = 0..order

def _series_exp(a: float, order: int) -> np.ndarray:
    return np.array([np.exp(a) / factorial(k) for k in range(order + 1)])


def _series_sin(a: float, order: int) -> np.ndarray:
    return np.array([np.sin(a + 0.5 * np.pi * k) / factorial(k) for k in range(order + 1)])


def _series_cos(a: float, order: int) -> np.ndarray:
    return np.array([np.cos(a + 0.5 * np.pi * k) / factorial(k) for k in range(order + 1)])


def _series_sinh(a: float, order: int) -> np.ndarray:
    return np.array([(np.sinh(a) if k % 2 == 0 else np.cosh(a)) / factorial(k)
                     for k in range(order + 1)])


def _series_cosh(a: float, order: int) -> np.ndarray:
    return np.array([(np.cosh(a) if k % 2 == 0 else np.sinh(a)) / factorial(k)
                     for k in range(order + 1)])


def _series_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros_like(num)
    for k in range(len(num)):
        acc = num[k] - sum(den[j] * out[k - j] for j in range(1, k + 1))
        out[k] = acc / den[0]
    return out


def _series_tan(a: float, order: int) -> np.ndarray:
    return _series_divide(_series_sin(a, order), _series_cos(a, order))


def _series_tanh(a: float, order: int) -> np.ndarray:
    return _series_divide(_series_sinh(a, order), _series_cosh(a, order))


def _series_log(a: float, order: int) -> np.ndarray:
    if a <= 0:
        raise DomainError(f"log of nonpositive value {a}")
    out = [np.log(a)]
    for k in range(1, order + 1):
        out.append((-1) ** (k - 1) / (k * a ** k))
    return np.array(out)


def _series_power(a: float, p: float, order: int) -> np.ndarray:
    out = []
    coeff = 1.0
    for k in range(order + 1):
        out.append(coeff * a ** (p - k))
        coeff *= (p - k) / (k + 1)
    return np.array(out)


def _series_sqrt(a: float, order: int) -> np.ndarray:
    if a <= 0:
        raise DomainError(f"sqrt of nonpositive value {a}")
    return _series_power(a, 0.5, order)


SERIES: Dict[str, Callable[[float, int], np.ndarray]] = {
    'exp': _series_exp,
    'sin': _series_sin,
    'cos': _series_cos,
    'tan': _series_tan,
    'sinh': _series_sinh,
    'cosh': _series_cosh,
    'tanh': _series_tanh,
    'log': _series_log,
    'sqrt': _series_sqrt,
}


class Jet:
    """Scalar jet: value plus Taylor coefficients up to the space order"""

    __slots__ = ('space', 'coeffs')
    __array_ufunc__ = None

    def __init__(self, space: JetSpace, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (space.size,):
            raise ShapeMismatch(f"Expected {space.size} jet coefficients, got {coeffs.shape}")
        self.space = space
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value: Number, space: JetSpace = CONSTANT_SPACE) -> 'Jet':
        coeffs = np.zeros(space.size)
        coeffs[0] = value
        return cls(space, coeffs)

    @classmethod
    def variable(cls, space: JetSpace, var: int, value: Number) -> 'Jet':
        coeffs = np.zeros(space.size)
        coeffs[0] = value
        if space.order >= 1:
            alpha = [0] * space.m
            alpha[var] = 1
            coeffs[space.index_of[tuple(alpha)]] = 1.0
        return cls(space, coeffs)

    @staticmethod
    def coerce(other) -> 'Jet':
        if isinstance(other, Jet):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet.constant(float(other))
        raise TypeError(f"Cannot use {type(other).__name__} as a jet")

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    @property
    def order(self) -> int:
        return self.space.order

    def _binary(self, other):
        other = Jet.coerce(other)
        space = common_space(self.space, other.space)
        return (space, lift(self.coeffs, self.space, space),
                lift(other.coeffs, other.space, space))

    def __add__(self, other):
        space, a, b = self._binary(other)
        return Jet(space, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        space, a, b = self._binary(other)
        return Jet(space, a - b)

    def __rsub__(self, other):
        return Jet.coerce(other) - self

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet(self.space, self.coeffs * float(other))
        if not isinstance(other, Jet):
            return NotImplemented
        space, a, b = self._binary(other)
        return Jet(space, mul_coeffs(a, b, space))

    def __rmul__(self, other):
        return self.__mul__(other)

    def reciprocal(self) -> 'Jet':
        if self.value == 0.0:
            raise DomainError("division by a jet with zero value")
        a = self.value
        series = np.array([(-1) ** k / a ** (k + 1) for k in range(self.order + 1)])
        return self.compose(series)

    def __truediv__(self, other):
        other = Jet.coerce(other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return Jet.coerce(other) * self.reciprocal()

    def __pow__(self, exponent: Number):
        p = float(exponent)
        if p.is_integer() and p >= 0:
            result = Jet.constant(1.0, self.space)
            for _ in range(int(p)):
                result = result * self
            return result
        a = self.value
        if p.is_integer():
            if a == 0.0:
                raise DomainError("negative power of a jet with zero value")
            return self.reciprocal() ** (-p)
        if a <= 0:
            raise DomainError(f"non-integer power of nonpositive value {a}")
        return self.compose(_series_power(a, p, self.order))

    def compose(self, series: np.ndarray) -> 'Jet':
        """Evaluate sum_k series[k] (self - value)^k"""
        shift = self.coeffs.copy()
        shift[0] = 0.0
        result = np.zeros(self.space.size)
        power = np.zeros(self.space.size)
        power[0] = 1.0
        for k, c in enumerate(series):
            if k > 0:
                power = mul_coeffs(power, shift, self.space)
            result = result + c * power
        return Jet(self.space, result)

    def apply(self, name: str) -> 'Jet':
        return self.compose(SERIES[name](self.value, self.order))

    def derivative(self, var: int) -> 'Jet':
        if self.space.is_constant:
            return Jet.constant(0.0)
        if self.order < 1:
            raise InsufficientJetOrder(1, self.order)
        mat = self.space.derivative_matrix(var)
        return Jet(get_space(self.space.m, self.order - 1), mat @ self.coeffs)

    def truncate(self, order: int) -> 'Jet':
        if self.space.is_constant or order >= self.order:
            return self
        space = get_space(self.space.m, order)
        return Jet(space, self.coeffs[:space.size])

    def partial(self, alpha: Sequence[int]) -> float:
        """Partial derivative d^alpha at the expansion point"""
        alpha = tuple(alpha)
        if sum(alpha) == 0:
            return self.value
        if self.space.is_constant:
            return 0.0
        if sum(alpha) > self.order:
            raise InsufficientJetOrder(sum(alpha), self.order)
        weight = 1
        for a in alpha:
            weight *= factorial(a)
        return float(self.coeffs[self.space.index_of[alpha]] * weight)

    def gradient(self) -> np.ndarray:
        m = self.space.m
        return np.array([self.partial(tuple(int(i == k) for i in range(m))) for k in range(m)])

    def hessian(self) -> np.ndarray:
        m = self.space.m
        out = np.zeros((m, m))
        for i in range(m):
            for j in range(m):
                alpha = [0] * m
                alpha[i] += 1
                alpha[j] += 1
                out[i, j] = self.partial(alpha)
        return out

    def __repr__(self):
        return f"Jet(value={self.value:.6g}, order={self.order}, m={self.space.m})"

"""
Report Records
Validated data models for manifests, identity checks and report tables
"""

from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

CHECK_STATUSES = ('pass', 'fail', 'insufficient_order', 'error')


class Tolerance(BaseModel):
    """Pass iff abs_residual <= max(abs_tol, rel_tol * (|lhs| + |rhs|))"""

    abs_tol: float = Field(default=1e-8, gt=0)
    rel_tol: float = Field(default=1e-8, gt=0)

    def bound(self, lhs_norm: float, rhs_norm: float) -> float:
        return max(self.abs_tol, self.rel_tol * (lhs_norm + rhs_norm))

    def scaled(self, factor: float) -> 'Tolerance':
        return Tolerance(abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


def as_values(quantity: Any) -> np.ndarray:
    """Value coefficients of a multivector, jet, number or array"""
    if hasattr(quantity, 'sig') and hasattr(quantity, 'coeffs'):
        return quantity.value()
    if hasattr(quantity, 'space') and hasattr(quantity, 'coeffs'):
        return np.array([quantity.value])
    return np.atleast_1d(np.asarray(quantity, dtype=float))


class CheckRecord(BaseModel):
    """Outcome of one identity evaluated at one chart point"""

    name: str
    identity: str
    point: List[float] = Field(default_factory=list)
    lhs_norm: Optional[float] = None
    rhs_norm: Optional[float] = None
    abs_residual: Optional[float] = None
    rel_residual: Optional[float] = None
    passed: bool
    status: str = 'pass'
    method: str = ''
    sign: int = 1
    literal_residual: Optional[float] = None
    detail: str = ''

    @field_validator('status')
    @classmethod
    def validate_status(cls, v: str) -> str:
        if v not in CHECK_STATUSES:
            raise ValueError(f"Unknown check status '{v}'")
        return v

    @classmethod
    def compare(cls, name: str, identity: str, lhs: Any, rhs: Any, tolerance: Tolerance,
                point: Tuple[float, ...] = (), method: str = '', sign: int = 1,
                detail: str = '', literal: Optional[int] = None) -> 'CheckRecord':
        """
        Compare lhs against sign * rhs.

        Args:
            name: short check name
            identity: the relation being checked, written out
            lhs, rhs: multivectors, jets, numbers or arrays
            tolerance: pass rule
            sign: expected sign between the two sides
            literal: when given, also record the residual of lhs - literal * rhs
        """
        left = as_values(lhs)
        right = as_values(rhs)
        lhs_norm = float(np.linalg.norm(left))
        rhs_norm = float(np.linalg.norm(right))
        residual = float(np.linalg.norm(left - sign * right))
        scale = lhs_norm + rhs_norm
        passed = residual <= tolerance.bound(lhs_norm, rhs_norm)
        return cls(
            name=name,
            identity=identity,
            point=[float(x) for x in point],
            lhs_norm=lhs_norm,
            rhs_norm=rhs_norm,
            abs_residual=residual,
            rel_residual=residual / scale if scale > 0 else 0.0,
            passed=bool(passed),
            status='pass' if passed else 'fail',
            method=method,
            sign=sign,
            literal_residual=(float(np.linalg.norm(left - literal * right)) if literal is not None else None),
            detail=detail,
        )

    @classmethod
    def vanishes(cls, name: str, identity: str, quantity: Any, tolerance: Tolerance,
                 point: Tuple[float, ...] = (), method: str = '', detail: str = '') -> 'CheckRecord':
        return cls.compare(name, identity, quantity, np.zeros_like(as_values(quantity)), tolerance,
                           point, method, 1, detail)

    @classmethod
    def bounded(cls, name: str, identity: str, value: float, limit: float,
                point: Tuple[float, ...] = (), method: str = '', above: bool = False,
                detail: str = '') -> 'CheckRecord':
        """Scalar threshold check: value <= limit, or value > limit when above=True"""
        passed = value > limit if above else value <= limit
        return cls(name=name, identity=identity, point=[float(x) for x in point],
                   lhs_norm=float(value), rhs_norm=float(limit), abs_residual=None,
                   rel_residual=None, passed=bool(passed), status='pass' if passed else 'fail',
                   method=method, detail=detail)

    @classmethod
    def failed(cls, name: str, identity: str, status: str, detail: str,
               point: Tuple[float, ...] = (), method: str = '') -> 'CheckRecord':
        return cls(name=name, identity=identity, point=[float(x) for x in point],
                   passed=False, status=status, method=method, detail=detail)


class SignEntry(BaseModel):
    """Expected and observed sign of one signed relation, with the residual under its quoted sign"""

    relation: str
    expected: int
    observed: Optional[int] = None
    literal: int = 1
    literal_residual: Optional[float] = None


class VerifyReport(BaseModel):
    """Top-level JSON document written by `verify --json`"""

    target: str
    seed: int
    samples: int
    order: int
    tolerance: Tolerance
    orientation: Dict[str, str] = Field(default_factory=dict)
    sign_ledger: List[SignEntry] = Field(default_factory=list)
    summary: Dict[str, int] = Field(default_factory=dict)
    exit_code: int = 0
    checks: List[CheckRecord] = Field(default_factory=list)


class ManifestInterval(BaseModel):
    name: str
    low: float
    high: float

    @model_validator(mode='after')
    def nonempty(self) -> 'ManifestInterval':
        if not self.low < self.high:
            raise ValueError(f"Interval for '{self.name}' is empty ({self.low}..{self.high})")
        return self


class SamplingSpec(BaseModel):
    mode: str = 'random'
    count: int = Field(default=64, ge=1)
    grid: Optional[List[int]] = None
    seed: Optional[int] = None


class Manifest(BaseModel):
    """User-defined chart as read from a manifest file"""

    name: str = 'manifest'
    signature: str
    params: List[str]
    intervals: List[ManifestInterval]
    embedding: List[str]
    killing: Dict[str, List[str]] = Field(default_factory=dict)
    sampling: Optional[SamplingSpec] = None

    @property
    def m(self) -> int:
        return len(self.params)

    @property
    def n(self) -> int:
        return len(self.embedding)


class ReportTable(BaseModel):
    """Grid report: ordered columns and one row per grid point"""

    target: str
    grid: List[int]
    quantities: List[str]
    columns: List[str]
    rows: List[Dict[str, Union[float, int, str, None]]]


class KillingSample(BaseModel):
    """Killing and Maxwell residual norms of one field at one point"""

    point: List[float]
    killing_norm: float
    div_norm: float
    precondition: Optional[str] = None
    maxwell_residual: float
    literal_residual: float
    codifferential_residual: float
    dalembertian_residual: float
    field_strength_norm: float


class KillingSurvey(BaseModel):
    """Top-level JSON document written by `killing`"""

    target: str
    field: str
    control: bool = False
    seed: int
    killing: bool
    points: List[KillingSample] = Field(default_factory=list)

"""
Engine Errors
Exception hierarchy shared by every branegeo service
"""

from typing import Optional


class BranegeoError(ValueError):
    """Base class for all engine errors"""


class SignatureMismatch(BranegeoError):
    def __init__(self, left, right):
        self.left = left
        self.right = right
        super().__init__(f"Signature mismatch: {left} vs {right}")


class GradeOutOfRange(BranegeoError):
    def __init__(self, grade: int, n: int):
        self.grade = grade
        self.n = n
        super().__init__(f"Grade {grade} outside 0..{n}")


class NotOrthonormal(BranegeoError):
    pass


class ExpressionSyntaxError(BranegeoError):
    """Parse failure at a 1-based character position"""

    def __init__(self, position: int, expected: str, text: Optional[str] = None):
        self.position = position
        self.expected = expected
        self.text = text
        super().__init__(f"Syntax error at position {position}: expected {expected}")


class UnknownIdentifier(BranegeoError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"Unknown identifier '{name}' at position {position}")


class DomainError(BranegeoError):
    pass


class InsufficientJetOrder(BranegeoError):
    """Raised when a computation needs more Taylor orders than a jet carries"""

    def __init__(self, required: int, available: int, what: str = "derivative"):
        self.required = required
        self.available = available
        self.what = what
        super().__init__(
            f"Insufficient jet order for {what}: need {required}, have {available}"
        )


class DegenerateTangent(BranegeoError):
    pass


class IsotropicDirection(BranegeoError):
    pass


class NotTangent(BranegeoError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"Field is not tangent (|P(v) - v| = {residual:.3e})")


class ShapeMismatch(BranegeoError):
    pass


class NotKilling(BranegeoError):
    def __init__(self, killing_norm: float, div_norm: float):
        self.killing_norm = killing_norm
        self.div_norm = div_norm
        super().__init__(
            f"Field is not Killing (killing_norm={killing_norm:.3e}, div_norm={div_norm:.3e})"
        )


class ManifestError(BranegeoError):
    """Manifest problem located at a 1-based line number"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        self.detail = message
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ManifestSyntaxError(ManifestError):
    pass


class DimensionMismatch(ManifestError):
    pass


class UnknownKey(ManifestError):
    pass

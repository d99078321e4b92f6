"""Domain types shared by every module.

Units are fixed as hbar = 1 and 2M = 1, so the commutative radial equation reads

    R'' + R'/r + (E - m**2/r**2 - V(r)) R = 0,    V(r) = c/r + a*r + b*r**2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class NCSpectraError(Exception):
    """Base class for errors raised by this package."""


class InvalidParameters(NCSpectraError, ValueError):
    pass


class DivergentIntegralError(NCSpectraError, ArithmeticError):
    """A radial integral does not converge at r -> 0 for the requested state."""


class QuadratureError(NCSpectraError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""

    def __init__(self, message, value=math.nan, error=math.inf):
        super().__init__(message)
        self.value = value
        self.error = error


class NoTerminationRoot(NCSpectraError):
    pass


class Variant(str, enum.Enum):
    CANONICAL = "canonical"
    COMPLEX = "complex"


class ATermMode(str, enum.Enum):
    # Constant -(a/2 + b) theta L term, as printed.
    PAPER_LITERAL = "paper"
    # First-order Taylor expansion: -b theta L constant plus -(a/2) theta L / r.
    EXPANDED_EXACT = "expanded"


class ClosedFormMode(str, enum.Enum):
    PAPER_LITERAL = "paper"
    COMPLETED_SQUARE = "completed-square"
    QUADRATURE_ONLY = "quadrature"


class SpinBranch(enum.Enum):
    UP = 1
    DOWN = -1

    @property
    def s_z(self) -> float:
        return 0.5 * self.value

    @property
    def symbol(self) -> str:
        return "+" if self is SpinBranch.UP else "-"

    @classmethod
    def parse(cls, text: str) -> "SpinBranch":
        key = text.strip().lower()
        if key in ("+", "up", "+1/2", "+0.5", "0.5"):
            return cls.UP
        if key in ("-", "down", "-1/2", "-0.5"):
            return cls.DOWN
        raise ValueError(f"unknown spin branch {text!r}")


@dataclass(frozen=True)
class PotentialParams:
    """Coefficients of V(r) = c/r + a r + b r^2."""

    a: float
    b: float
    c: float

    @property
    def sqrt_b(self) -> float:
        return math.sqrt(self.b)

    def potential(self, r):
        return self.c / r + self.a * r + self.b * r * r

    def require_valid(self) -> None:
        report = validate_params(self)
        if not report.ok:
            raise InvalidParameters("; ".join(report.failures))


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[tuple[str, bool, str], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    @property
    def failures(self) -> list[str]:
        return [reason for _, passed, reason in self.checks if not passed]


def validate_params(params: PotentialParams) -> ValidationReport:
    """Check the potential coefficients without raising.

    Each entry of the returned report is ``(name, passed, reason)``.
    """
    checks = []
    finite = all(math.isfinite(v) for v in (params.a, params.b, params.c))
    checks.append(("finite", finite, "a, b, c must be finite" if not finite else ""))
    b_ok = finite and params.b > 0
    checks.append(("b_positive", b_ok, "" if b_ok else f"b must be > 0 (got {params.b})"))
    a_ok = finite and params.a >= 0
    checks.append(("a_nonnegative", a_ok, "" if a_ok else f"a must be ≥ 0 (got {params.a})"))
    return ValidationReport(tuple(checks))


@dataclass(frozen=True)
class NCConfig:
    theta: float = 0.0
    variant: Variant = Variant.CANONICAL
    a_term_mode: ATermMode = ATermMode.EXPANDED_EXACT
    closed_form_mode: ClosedFormMode = ClosedFormMode.QUADRATURE_ONLY

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta >= 0):
            raise InvalidParameters(f"theta must be ≥ 0 (got {self.theta})")
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "a_term_mode", ATermMode(self.a_term_mode))
        object.__setattr__(self, "closed_form_mode", ClosedFormMode(self.closed_form_mode))

    def with_theta(self, theta: float) -> "NCConfig":
        return NCConfig(theta, self.variant, self.a_term_mode, self.closed_form_mode)


@dataclass(frozen=True)
class QuantumState:
    """Series order ``n``, magnetic number ``m`` (both ≥ 0) and optional spin branch."""

    n: int
    m: int
    branch: SpinBranch | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise InvalidParameters(f"n must be a non-negative integer (got {self.n})")
        if int(self.m) != self.m or self.m < 0:
            raise InvalidParameters(f"m must be a non-negative integer (got {self.m})")

    def check_variant(self, variant: Variant) -> None:
        if variant is Variant.COMPLEX and self.branch is None:
            raise InvalidParameters("complex variant needs a spin branch")
        if variant is Variant.CANONICAL and self.branch is not None:
            raise InvalidParameters("spin branch given for the canonical variant")

    @property
    def effective_m(self) -> float:
        """Eigenvalue of L_z - 2 s_z that multiplies every theta term."""
        if self.branch is None:
            return float(self.m)
        return self.m - 2.0 * self.branch.s_z

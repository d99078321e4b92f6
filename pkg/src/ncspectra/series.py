"""Power-series solution of the commutative radial equation.

With R(r) = r^m exp(-(a r + b r^2) / (2 sqrt b)) f(r) and f = sum_p a_p r^p, the
radial equation reduces to

    f'' + ((2m+1)/r - 2 alpha - 2 beta r) f' + (eps - kappa / r) f = 0

where alpha = a / (2 sqrt b), beta = sqrt b, eps = E + alpha^2 - 2 beta (m+1) and
kappa = (2m+1) alpha + c.  Collecting powers of r gives the three-term recurrence

    (p+1)(p+2m+1) a_{p+1} = (2 alpha p + kappa) a_p - (eps - 2 beta (p-1)) a_{p-1}.

The series stops at order n only if eps = 2 beta n (fixing E) and a_{n+1} = 0,
a polynomial condition of degree n+1 in c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .model import InvalidParameters, NoTerminationRoot, PotentialParams, QuadratureError
from .special import QuadratureSpec, cauchy_square, integrate_semi_infinite

ROOT_IMAG_TOL = 1e-10
TERMINATION_TOL = 1e-9


@dataclass(frozen=True)
class RecurrenceRelation:
    """Three-term relation linking a_{p+1}, a_p and a_{p-1}.

    ``upper(p) a_{p+1} = middle(p) a_p - lower(p, E) a_{p-1}``.
    """

    params: PotentialParams
    m: int
    order: int = 3

    @property
    def alpha(self) -> float:
        return self.params.a / (2.0 * self.params.sqrt_b)

    @property
    def beta(self) -> float:
        return self.params.sqrt_b

    @property
    def kappa(self) -> float:
        return (2 * self.m + 1) * self.alpha + self.params.c

    def eps(self, energy: float) -> float:
        return energy + self.alpha**2 - 2.0 * self.beta * (self.m + 1)

    def upper(self, p: int) -> float:
        return (p + 1.0) * (p + 2.0 * self.m + 1.0)

    def middle(self, p: int) -> float:
        return 2.0 * self.alpha * p + self.kappa

    def lower(self, p: int, energy: float) -> float:
        return self.eps(energy) - 2.0 * self.beta * (p - 1)

    def coefficients(self, energy: float, count: int, a0: float = 1.0) -> np.ndarray:
        """Forward-solve a_0 .. a_{count-1}."""
        out = np.zeros(count)
        if count == 0:
            return out
        out[0] = a0
        prev = 0.0
        for p in range(count - 1):
            out[p + 1] = (self.middle(p) * out[p] - self.lower(p, energy) * prev) / self.upper(p)
            prev = out[p]
        return out

    def residuals(self, coeffs, energy: float, extra: int = 2) -> np.ndarray:
        """Relation residual at p = 0 .. len(coeffs)-1+extra with a_p = 0 past the list."""
        a = list(coeffs) + [0.0] * (extra + 1)
        res = []
        for p in range(len(coeffs) + extra):
            lo = a[p - 1] if p >= 1 else 0.0
            res.append(self.upper(p) * a[p + 1] - self.middle(p) * a[p] + self.lower(p, energy) * lo)
        return np.array(res)


def build_recurrence(params: PotentialParams, m: int) -> RecurrenceRelation:
    params.require_valid()
    if int(m) != m or m < 0:
        raise InvalidParameters(f"m must be a non-negative integer (got {m})")
    return RecurrenceRelation(params, int(m))


def quasi_exact_energy(a: float, b: float, n: int, m: int) -> float:
    """Energy fixed by the termination condition eps = 2 beta n."""
    return 2.0 * math.sqrt(b) * (1 + m + n) - a * a / (4.0 * b)


def printed_energy(b: float, n: int, m: int) -> float:
    """Oscillator-tower value 2 sqrt(b) (1 + m + n), which omits the -a^2/(4b) term."""
    return 2.0 * math.sqrt(b) * (1 + m + n)


@dataclass(frozen=True)
class TerminationConstraint:
    energy: float
    c_values: tuple[float, ...]
    polynomial: Polynomial = field(repr=False)

    def residual_fn(self, energy: float, c: float) -> float:
        """|a_{n+1}| (with a_0 = 1) for arbitrary (E, c)."""
        return float(abs(self.polynomial(c))) + abs(energy - self.energy)


def _termination_polynomial(a: float, b: float, n: int, m: int) -> Polynomial:
    beta = math.sqrt(b)
    alpha = a / (2.0 * beta)
    eps = 2.0 * beta * n
    kappa = Polynomial([(2 * m + 1) * alpha, 1.0])  # linear in c
    prev = Polynomial([0.0])
    cur = Polynomial([1.0])
    for p in range(n + 1):
        nxt = ((2.0 * alpha * p + kappa) * cur - (eps - 2.0 * beta * (p - 1)) * prev) / (
            (p + 1.0) * (p + 2.0 * m + 1.0)
        )
        prev, cur = cur, nxt
    return cur


def termination_constraints(params_ab, n: int, m: int) -> TerminationConstraint:
    """Real Coulomb coefficients c for which the series stops at order n."""
    a, b = params_ab
    if not b > 0:
        raise InvalidParameters(f"b must be > 0 (got {b})")
    poly = _termination_polynomial(a, b, n, m)
    roots = poly.roots()
    scale = max(1.0, float(np.max(np.abs(roots)))) if len(roots) else 1.0
    real = sorted(float(r.real) for r in roots if abs(r.imag) <= ROOT_IMAG_TOL * scale)
    return TerminationConstraint(quasi_exact_energy(a, b, n, m), tuple(real), poly)


@dataclass(frozen=True)
class SeriesSolution:
    params: PotentialParams
    n: int
    m: int
    delta: float
    alpha: float
    beta: float
    coeffs: tuple[float, ...]
    energy: float
    printed_energy: float
    constraint_residual: float
    nodes: int

    @property
    def physical_exponent(self) -> int:
        # r^{delta - 1/2} after removing (z zbar)^{1/4}
        return self.m

    @property
    def terminated(self) -> bool:
        return self.constraint_residual <= TERMINATION_TOL

    def density_coeffs(self) -> list[float]:
        return cauchy_square(self.coeffs)


def _count_positive_nodes(coeffs) -> int:
    if len(coeffs) < 2:
        return 0
    roots = Polynomial(coeffs).roots()
    return int(sum(1 for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0))


def _norm_integral(params, m, coeffs, spec):
    alpha = params.a / (2.0 * params.sqrt_b)
    beta = params.sqrt_b
    poly = Polynomial(coeffs)

    def integrand(r):
        f = poly(r) * r**m * np.exp(-(alpha * r + 0.5 * beta * r * r))
        return f * f * r

    return integrate_semi_infinite(integrand, spec)


def solve_quasi_exact(params: PotentialParams, n: int, m: int) -> SeriesSolution:
    """Order-n series solution for the given (a, b, c) and magnetic number m.

    The energy comes from the termination condition. When c is not one of the
    admissible roots the truncated series is still returned, with the leftover
    |a_{n+1}| (relative to the largest kept coefficient) in
    ``constraint_residual``.
    """
    rec = build_recurrence(params, m)
    if int(n) != n or n < 0:
        raise InvalidParameters(f"n must be a non-negative integer (got {n})")
    n = int(n)
    constraint = termination_constraints((params.a, params.b), n, m)
    if not constraint.c_values:
        raise NoTerminationRoot(f"no real Coulomb coefficient terminates the series at n={n}, m={m}")
    energy = constraint.energy
    raw = rec.coefficients(energy, n + 2)
    kept = raw[: n + 1]
    residual = abs(raw[n + 1]) / float(np.max(np.abs(kept)))
    norm, _ = _norm_integral(params, m, kept, QuadratureSpec(rel_tol=1e-12))
    if not (norm > 0 and math.isfinite(norm)):
        raise QuadratureError(f"normalization integral is {norm} for n={n}, m={m}", norm)
    coeffs = kept / math.sqrt(norm)
    return SeriesSolution(
        params=params,
        n=n,
        m=int(m),
        delta=0.5 + m,
        alpha=rec.alpha,
        beta=rec.beta,
        coeffs=tuple(float(v) for v in coeffs),
        energy=energy,
        printed_energy=printed_energy(params.b, n, m),
        constraint_residual=float(residual),
        nodes=_count_positive_nodes(coeffs),
    )


def evaluate_radial(solution: SeriesSolution, r, derivative: int = 0):
    """R(r) = r^m exp(-(alpha r + beta r^2 / 2)) sum_p a_p r^p, or its first/second derivative."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be ≥ 0")
    m = solution.m
    poly = Polynomial(solution.coeffs)
    gauss = np.exp(-(solution.alpha * r + 0.5 * solution.beta * r * r))
    if derivative == 0:
        out = poly(r) * r**m * gauss
        return float(out) if out.ndim == 0 else out
    # h = r^m f, R = h e^g with g' = -(alpha + beta r), g'' = -beta
    f, f1, f2 = poly(r), poly.deriv(1)(r), poly.deriv(2)(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        rm = r**m
        rm1 = m * r ** (m - 1) if m >= 1 else np.zeros_like(r)
        rm2 = m * (m - 1) * r ** (m - 2) if m >= 2 else np.zeros_like(r)
    h = rm * f
    h1 = rm1 * f + rm * f1
    h2 = rm2 * f + 2 * rm1 * f1 + rm * f2
    g1 = -(solution.alpha + solution.beta * r)
    if derivative == 1:
        out = (h1 + g1 * h) * gauss
    elif derivative == 2:
        out = (h2 + 2 * g1 * h1 + (g1 * g1 - solution.beta) * h) * gauss
    else:
        raise ValueError("derivative must be 0, 1 or 2")
    return float(out) if out.ndim == 0 else out


def ode_residual(solution: SeriesSolution, r):
    """Pointwise R'' + R'/r + (E - m^2/r^2 - V) R using the analytic derivatives."""
    r = np.asarray(r, dtype=float)
    R = evaluate_radial(solution, r)
    R1 = evaluate_radial(solution, r, 1)
    R2 = evaluate_radial(solution, r, 2)
    V = solution.params.potential(r)
    return R2 + R1 / r + (solution.energy - solution.m**2 / r**2 - V) * R

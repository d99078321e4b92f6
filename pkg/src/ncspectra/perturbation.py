"""First-order noncommutative corrections for the canonical and complex variants.

To first order the radius is deformed as r -> r - theta*mu/(2r), where mu is the
eigenvalue multiplying theta: m for the canonical variant and m - 2 s_z for the
complex one.  Expanding V = c/r + a r + b r^2 gives

    V_NC = theta*mu * (term_L + term_Lr / r + term_Lr3 / r^3).

The constant piece is absorbed into the zeroth-order energy; the r-dependent
pieces are treated as first-order perturbations.  Matrix elements use the
radial function normalized to int R^2 r dr = 1 with the unnormalized angular
factor e^{i m phi}, so the c-term gives pi*c*theta*mu * int R^2 r^-2 dr.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ATermMode,
    ClosedFormMode,
    DivergentIntegralError,
    InvalidParameters,
    NCConfig,
    PotentialParams,
    QuantumState,
    SpinBranch,
    Variant,
)
from .series import SeriesSolution, evaluate_radial, solve_quasi_exact
from .special import (
    EndpointTransform,
    QuadratureSpec,
    cauchy_square,
    completed_square_moment,
    integrate_semi_infinite,
    upper_incomplete_gamma_int,
)

ANGULAR_MEASURE = 2.0 * math.pi
QUAD_SPEC = QuadratureSpec(rel_tol=1e-13, endpoint_transform=EndpointTransform.SQRT_POWER_LAW)


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    PRINTED_CLOSED_FORM = "printed-closed-form"
    COMPLETED_SQUARE = "completed-square"


_METHOD_FOR_MODE = {
    ClosedFormMode.QUADRATURE_ONLY: Method.QUADRATURE,
    ClosedFormMode.PAPER_LITERAL: Method.PRINTED_CLOSED_FORM,
    ClosedFormMode.COMPLETED_SQUARE: Method.COMPLETED_SQUARE,
}


@dataclass(frozen=True)
class RadiusDeformation:
    """r_hat = r - theta*m/(2r); terms of order theta^2 are dropped."""

    theta: float
    m: float
    order: int = 1

    @property
    def is_identity(self) -> bool:
        return self.theta == 0 or self.m == 0

    def __call__(self, r):
        return r - self.theta * self.m / (2.0 * r)


def deform_radius(theta: float, m) -> RadiusDeformation:
    if not theta >= 0:
        raise InvalidParameters(f"theta must be ≥ 0 (got {theta})")
    return RadiusDeformation(float(theta), float(m))


@dataclass(frozen=True)
class DeformedPotential:
    base: PotentialParams
    variant: Variant
    branch: SpinBranch | None
    multiplier: float  # eigenvalue of L_z (canonical) or L_z - 2 s_z (complex)
    term_L: float
    term_Lr3: float
    term_Lr: float

    def nc_part(self, r, theta: float):
        r = np.asarray(r, dtype=float)
        return theta * self.multiplier * (self.term_L + self.term_Lr / r + self.term_Lr3 / r**3)

    def __call__(self, r, theta: float):
        return self.base.potential(np.asarray(r, dtype=float)) + self.nc_part(r, theta)


def deform_potential(params: PotentialParams, nc: NCConfig, m: int, branch: SpinBranch | None = None):
    params.require_valid()
    state = QuantumState(0, m, branch)
    state.check_variant(nc.variant)
    a, b, c = params.a, params.b, params.c
    if nc.a_term_mode is ATermMode.PAPER_LITERAL:
        term_L, term_Lr = -(0.5 * a + b), 0.0
    else:
        term_L, term_Lr = -b, -0.5 * a
    return DeformedPotential(params, nc.variant, branch, state.effective_m, term_L, 0.5 * c, term_Lr)


def zeroth_energy(state: QuantumState, params: PotentialParams, nc: NCConfig,
                  commutative: float | None = None) -> float:
    """Commutative energy plus the exactly absorbed constant theta term."""
    state.check_variant(nc.variant)
    if commutative is None:
        commutative = _solution(params, state.n, state.m).energy
    deformed = deform_potential(params, nc, state.m, state.branch)
    return commutative + nc.theta * deformed.multiplier * deformed.term_L


@functools.lru_cache(maxsize=512)
def _solution(params: PotentialParams, n: int, m: int) -> SeriesSolution:
    return solve_quasi_exact(params, n, m)


def _check_moment(solution: SeriesSolution, power: int):
    # R^2 r^power behaves as r^{2m + power} at the origin
    if 2 * solution.m + power <= -1:
        raise DivergentIntegralError(
            f"int R^2 r^{power} dr diverges at r -> 0 for m={solution.m} "
            f"(integrand ~ r^{2 * solution.m + power})"
        )


def radial_integral(solution: SeriesSolution, power: int, method: Method = Method.QUADRATURE) -> float:
    """int_0^inf R(r)^2 r^power dr for the normalized series solution.

    ``power=-2`` is the integral entering the c-term shift (= <r^-3>),
    ``power=0`` the one entering the 1/r term (= <r^-1>).
    """
    _check_moment(solution, power)
    if method is Method.QUADRATURE:
        value, _ = integrate_semi_infinite(
            lambda r: evaluate_radial(solution, r) ** 2 * r**power, QUAD_SPEC
        )
        return value
    if method is Method.COMPLETED_SQUARE:
        a, b = solution.params.a, solution.params.b
        dens = solution.density_coeffs()
        return math.fsum(
            cq * completed_square_moment(2 * solution.m + q + power, a, b) for q, cq in enumerate(dens)
        )
    raise InvalidParameters(f"no radial integral for method {method}")


def _gamma_order(order: float) -> int:
    if not float(order).is_integer() or order < 1:
        raise InvalidParameters(
            f"closed form needs a positive integer incomplete-gamma order (got {order}); "
            "2*delta must be an integer"
        )
    return int(order)


def _printed_prefactor(a, b):
    return math.exp((a * a + 2.0 * b * a) / (4.0 * b * math.sqrt(b)))


def printed_inverse_square_integral(solution: SeriesSolution, delta: float) -> float:
    """Right-hand side of the printed inverse-square integral, evaluated verbatim."""
    a, b, n = solution.params.a, solution.params.b, solution.n
    dens = cauchy_square(solution.coeffs)[: n + 1]
    order = _gamma_order(n + 2 * delta)
    gam = upper_incomplete_gamma_int(order, -a / (2.0 * math.sqrt(b)))
    return _printed_prefactor(a, b) * math.fsum(cp * b ** (-(n + 2 * delta) / 2.0) * gam for cp in dens)


def printed_ground_c0(solution: SeriesSolution, delta: float) -> float:
    """Printed ground-state coefficient C_0 (second line, verbatim)."""
    a, b = solution.params.a, solution.params.b
    a0 = solution.coeffs[0]
    gam = upper_incomplete_gamma_int(_gamma_order(2 * delta), -a / (2.0 * math.sqrt(b)))
    return _printed_prefactor(a, b) * a0 * a0 * b ** (-delta) * gam


def printed_excited_a(solution: SeriesSolution, delta: float) -> float:
    """Printed A_n with C indexed by the summation variable."""
    a, b, n = solution.params.a, solution.params.b, solution.n
    dens = cauchy_square(solution.coeffs)[: n + 1]
    x = -a / (2.0 * math.sqrt(b))
    terms = [
        ck * b ** (-(k + 2 * delta) / 2.0) * upper_incomplete_gamma_int(_gamma_order(k + 2 * delta), x)
        for k, ck in enumerate(dens)
    ]
    return _printed_prefactor(a, b) * math.fsum(terms)


def shift_coefficient(solution: SeriesSolution, state: QuantumState, nc: NCConfig) -> float:
    """First-order shift per unit theta*mu for the selected modes."""
    params = solution.params
    mode = nc.closed_form_mode
    expanded = nc.a_term_mode is ATermMode.EXPANDED_EXACT and params.a != 0
    trusted = Method.QUADRATURE if mode is ClosedFormMode.QUADRATURE_ONLY else Method.COMPLETED_SQUARE
    total = 0.0
    if params.c != 0:
        if mode is ClosedFormMode.PAPER_LITERAL:
            if nc.variant is Variant.CANONICAL:
                total += math.pi * params.c * printed_inverse_square_integral(solution, solution.delta)
            elif solution.n == 0:
                total += printed_ground_c0(solution, solution.delta)
            else:
                total += -2.0 * printed_excited_a(solution, solution.delta)
        else:
            total += 0.5 * ANGULAR_MEASURE * params.c * radial_integral(solution, -2, trusted)
    if expanded:
        total += -0.5 * ANGULAR_MEASURE * params.a * radial_integral(solution, 0, trusted)
    return total


def first_order_shift(solution: SeriesSolution, state: QuantumState, nc: NCConfig) -> float:
    """theta*mu*(shift coefficient); exactly 0 when theta, mu or every coupling vanishes."""
    state.check_variant(nc.variant)
    mu = state.effective_m
    if nc.theta == 0 or mu == 0:
        return 0.0
    p = solution.params
    if p.c == 0 and (nc.a_term_mode is ATermMode.PAPER_LITERAL or p.a == 0):
        return 0.0
    return nc.theta * mu * shift_coefficient(solution, state, nc)


@dataclass(frozen=True)
class NCEnergyLevel:
    state: QuantumState
    commutative: float
    printed_energy: float
    zeroth: float
    first_order_shift: float
    total: float
    method: Method
    constraint_residual: float = 0.0


def _expand_states(states, variant):
    out = []
    for st in states:
        if variant is Variant.COMPLEX and st.branch is None:
            out.extend(QuantumState(st.n, st.m, br) for br in (SpinBranch.DOWN, SpinBranch.UP))
        else:
            out.append(st)
    return out


def level(params: PotentialParams, nc: NCConfig, state: QuantumState) -> NCEnergyLevel:
    state.check_variant(nc.variant)
    sol = _solution(params, state.n, state.m)
    zeroth = zeroth_energy(state, params, nc, commutative=sol.energy)
    shift = first_order_shift(sol, state, nc)
    return NCEnergyLevel(
        state=state,
        commutative=sol.energy,
        printed_energy=sol.printed_energy,
        zeroth=zeroth,
        first_order_shift=shift,
        total=zeroth + shift,
        method=_METHOD_FOR_MODE[nc.closed_form_mode],
        constraint_residual=sol.constraint_residual,
    )


def total_levels(params: PotentialParams, nc: NCConfig, states) -> list[NCEnergyLevel]:
    """Levels for every state; complex-variant states without a branch get both."""
    return [level(params, nc, st) for st in _expand_states(states, nc.variant)]


def branch_splitting(levels) -> dict[tuple[int, int], float]:
    """E(+) - E(-) for every (n, m) that has both branches."""
    up, down = {}, {}
    for lv in levels:
        key = (lv.state.n, lv.state.m)
        if lv.state.branch is SpinBranch.UP:
            up[key] = lv.total
        elif lv.state.branch is SpinBranch.DOWN:
            down[key] = lv.total
    return {key: up[key] - down[key] for key in sorted(up) if key in down}


@dataclass(frozen=True)
class ClosedFormComparison:
    """Energy coefficient (shift per unit theta*mu) for the c-term, three ways.

    ``None`` marks a route that does not apply (wrong n, or non-integer order);
    ``math.inf`` marks a divergent true integral.
    """

    n: int
    m: int
    delta: float
    printed_inverse_square: float | None
    printed_c0: float | None
    printed_a_n: float | None
    completed_square: float
    quadrature: float

    @property
    def reference(self) -> float:
        return self.quadrature

    def discrepancies(self) -> dict[str, float]:
        """Relative deviation of each printed closed form from the quadrature value."""
        out = {}
        for name in ("printed_inverse_square", "printed_c0", "printed_a_n", "completed_square"):
            value = getattr(self, name)
            if value is None:
                continue
            ref = self.quadrature
            if not math.isfinite(ref):
                out[name] = math.inf
            elif ref == 0:
                out[name] = abs(value)
            else:
                out[name] = abs(value - ref) / abs(ref)
        return out


def printed_closed_form_C(params: PotentialParams, n: int, m: int, delta: float,
                          solution: SeriesSolution | None = None) -> ClosedFormComparison:
    """Evaluate the printed closed forms next to completed-square and quadrature values.

    The c-term energy coefficient is pi*c*int R^2 r^-2 dr; the printed ground-state
    C_0 is compared as is, and the excited-state A_n enters the level as -2 A_n.
    """
    if not float(2 * delta).is_integer():
        raise InvalidParameters(f"2*delta must be an integer (got delta={delta})")
    sol = solution if solution is not None else _solution(params, n, m)
    c = params.c

    def guarded(fn):
        try:
            return fn()
        except InvalidParameters:
            return None

    inv_sq = guarded(lambda: math.pi * c * printed_inverse_square_integral(sol, delta))
    c0_form = guarded(lambda: printed_ground_c0(sol, delta)) if n == 0 else None
    a_n_form = guarded(lambda: -2.0 * printed_excited_a(sol, delta))
    try:
        cs = math.pi * c * radial_integral(sol, -2, Method.COMPLETED_SQUARE)
        quad = math.pi * c * radial_integral(sol, -2, Method.QUADRATURE)
    except DivergentIntegralError:
        cs = quad = math.copysign(math.inf, c) if c else 0.0
    return ClosedFormComparison(n, m, float(delta), inv_sq, c0_form, a_n_form, cs, quad)


def printed_excited_level(params: PotentialParams, n: int, m: int, branch: SpinBranch, theta: float,
                          delta: float | None = None, printed_sign: bool = True) -> float:
    """Printed excited-level formula, with 2 sqrt(b)(1+m+n) as the commutative part.

    ``printed_sign=True`` keeps the printed (m +/- 1); ``False`` uses (m -/+ 1) as in
    the ground-state formulas.
    """
    sol = _solution(params, n, m)
    d = sol.delta if delta is None else delta
    mult = m + branch.value if printed_sign else m - branch.value
    a, b = params.a, params.b
    return sol.printed_energy + theta * (a - 0.5 * b - 2.0 * printed_excited_a(sol, d)) * mult

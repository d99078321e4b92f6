import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncspectra.model import InvalidParameters, NoTerminationRoot, PotentialParams
from ncspectra.series import (
    build_recurrence,
    evaluate_radial,
    ode_residual,
    solve_quasi_exact,
    termination_constraints,
)
from ncspectra.special import integrate_semi_infinite


def _admissible(a, b, n, m, which=0):
    c = termination_constraints((a, b), n, m).c_values[which]
    return PotentialParams(a, b, c)


@pytest.mark.parametrize("a, b, n, m, c", [(0, 1, 0, 0, 0.0), (2, 1, 0, 0, -1.0), (2, 1, 0, 1, -3.0)])
def test_ground_state_coulomb_roots(a, b, n, m, c):
    con = termination_constraints((a, b), n, m)
    assert con.c_values == pytest.approx((c,), abs=1e-14)


def test_excited_roots_are_real_and_bounded():
    for n in range(1, 5):
        for m in range(3):
            con = termination_constraints((1.3, 0.8), n, m)
            assert len(con.c_values) <= n + 1
            for c in con.c_values:
                assert con.residual_fn(con.energy, c) < 1e-9 * max(1.0, abs(c)) ** (n + 1)


def test_known_excited_roots():
    con = termination_constraints((2.0, 1.0), 1, 1)
    assert con.c_values == pytest.approx((-6.6457513110645906, -1.3542486889354093), rel=1e-12)


def test_oscillator_ground_state():
    sol = solve_quasi_exact(PotentialParams(0.0, 1.0, 0.0), 0, 0)
    assert sol.energy == pytest.approx(2.0, abs=1e-14)
    assert sol.terminated
    assert evaluate_radial(sol, 1.0) / evaluate_radial(sol, 0.0) == pytest.approx(math.exp(-0.5), rel=1e-14)


def test_linear_plus_harmonic_energy_carries_shift():
    sol = solve_quasi_exact(PotentialParams(2.0, 1.0, -1.0), 0, 0)
    assert sol.energy == pytest.approx(1.0, abs=1e-14)
    assert sol.printed_energy == pytest.approx(2.0)


def test_oscillator_m1():
    sol = solve_quasi_exact(PotentialParams(0.0, 4.0, 0.0), 0, 1)
    assert sol.energy == pytest.approx(8.0, abs=1e-13)
    assert evaluate_radial(sol, 0.0) == 0.0


def test_constants_satisfy_beta_relations():
    for a, b in ((0.0, 1.0), (2.0, 1.0), (1.3, 2.7)):
        sol = solve_quasi_exact(_admissible(a, b, 0, 1), 0, 1)
        assert sol.beta**2 == pytest.approx(b, rel=1e-15)
        assert 2 * sol.alpha * sol.beta == pytest.approx(a, rel=1e-15, abs=1e-300)
        assert sol.delta == 1.5
        assert sol.physical_exponent == 1


def test_pure_oscillator_recurrence_decouples_parity():
    rec = build_recurrence(PotentialParams(0.0, 1.0, 0.0), 2)
    coeffs = rec.coefficients(rec.eps(0) + 10.0, 8)  # generic energy
    assert np.all(coeffs[1::2] == 0.0)


def test_ground_state_power_balance():
    rec = build_recurrence(PotentialParams(2.0, 1.0, -1.0), 0)
    assert rec.kappa == pytest.approx(0.0, abs=1e-15)
    assert -(2 * 0 + 1) * 2.0 / (2 * math.sqrt(1.0)) == -1.0


def test_recurrence_residual_zero_on_ground_state():
    p = PotentialParams(2.0, 1.0, -1.0)
    sol = solve_quasi_exact(p, 0, 0)
    res = build_recurrence(p, 0).residuals(sol.coeffs, sol.energy)
    assert np.max(np.abs(res)) == 0.0


def test_next_two_coefficients_vanish():
    for n, m in ((1, 0), (2, 1), (3, 2)):
        p = _admissible(0.9, 1.7, n, m)
        sol = solve_quasi_exact(p, n, m)
        raw = build_recurrence(p, m).coefficients(sol.energy, n + 3)
        scale = np.max(np.abs(raw[: n + 1]))
        assert abs(raw[n + 1]) <= 1e-10 * scale
        assert abs(raw[n + 2]) <= 1e-10 * scale


def test_inadmissible_c_reports_residual():
    sol = solve_quasi_exact(PotentialParams(2.0, 1.0, -1.0), 0, 1)
    assert not sol.terminated
    assert sol.constraint_residual > 0.1


@pytest.mark.parametrize("n", range(1, 5))
def test_all_roots_real(n):
    for m in range(3):
        for a in np.linspace(0.0, 6.0, 7):
            assert len(termination_constraints((a, 1.0), n, m).c_values) == n + 1


def test_no_real_root_raises(monkeypatch):
    import ncspectra.series as series

    real = series.termination_constraints
    monkeypatch.setattr(series, "termination_constraints",
                        lambda ab, n, m: series.TerminationConstraint(real(ab, n, m).energy, (), None))
    with pytest.raises(NoTerminationRoot):
        series.solve_quasi_exact(PotentialParams(1.0, 1.0, 0.0), 2, 0)


def test_invalid_inputs():
    with pytest.raises(InvalidParameters):
        solve_quasi_exact(PotentialParams(1.0, 0.0, 0.0), 0, 0)
    with pytest.raises(InvalidParameters):
        build_recurrence(PotentialParams(1.0, 1.0, 0.0), -1)
    with pytest.raises(InvalidParameters):
        termination_constraints((1.0, -1.0), 0, 0)


def test_ode_residual_fixture_points():
    sol = solve_quasi_exact(PotentialParams(2.0, 1.0, -1.0), 0, 0)
    r = np.array([0.5, 1.0, 2.0])
    peak = np.max(np.abs(evaluate_radial(sol, np.linspace(0, 6, 601))))
    assert np.max(np.abs(ode_residual(sol, r))) <= 1e-10 * peak


def _fd_residual(sol, r):
    """Residual from a 5-point stencil on evaluate_radial, relative to the largest term.

    The step follows the local length scale so truncation and rounding both stay small.
    """
    scale = 1.0 / (sol.alpha + sol.beta * r)
    if sol.m:
        scale = np.minimum(scale, r)
    h = np.minimum(r / 3.0, 5e-3 * scale)
    f = [evaluate_radial(sol, r + k * h) for k in (-2, -1, 0, 1, 2)]
    d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    pot = (sol.energy - sol.m**2 / r**2 - sol.params.potential(r)) * f[2]
    terms = np.abs([d2, d1 / r, pot])
    return np.abs(d2 + d1 / r + pot) / np.max(terms, axis=0)


@pytest.mark.parametrize("a, b, n, m, which", [(2, 1, 0, 0, 0), (0, 1, 0, 2, 0), (1.5, 2, 1, 1, 0),
                                               (1.5, 2, 1, 1, 1), (0.7, 0.5, 2, 3, 0)])
def test_ode_residual_log_grid(a, b, n, m, which):
    sol = solve_quasi_exact(_admissible(a, b, n, m, which), n, m)
    assert sol.constraint_residual <= 1e-12
    r = np.geomspace(1e-3, 10 / math.sqrt(sol.beta), 40)
    assert np.max(_fd_residual(sol, r)) <= 1e-8
    # the analytic-derivative residual is far tighter
    analytic = np.abs(ode_residual(sol, r)) / np.max(np.abs(evaluate_radial(sol, r)))
    assert np.max(analytic) <= 1e-8


def test_derivatives_match_finite_differences():
    sol = solve_quasi_exact(_admissible(1.0, 1.0, 1, 2), 1, 2)
    r = np.linspace(0.2, 4.0, 20)
    h = 1e-5
    d1 = (evaluate_radial(sol, r + h) - evaluate_radial(sol, r - h)) / (2 * h)
    np.testing.assert_allclose(evaluate_radial(sol, r, 1), d1, atol=1e-8)
    with pytest.raises(ValueError):
        evaluate_radial(sol, r, 3)
    with pytest.raises(ValueError):
        evaluate_radial(sol, -1.0)


@settings(max_examples=15, deadline=None, derandomize=True)
@given(a=st.floats(0.0, 3.0), b=st.floats(0.5, 4.0), n=st.integers(0, 3), m=st.integers(0, 3))
def test_normalization_and_recurrence(a, b, n, m):
    con = termination_constraints((a, b), n, m)
    if not con.c_values:
        return
    p = PotentialParams(a, b, con.c_values[0])
    sol = solve_quasi_exact(p, n, m)
    norm, _ = integrate_semi_infinite(lambda r: evaluate_radial(sol, r) ** 2 * r)
    assert norm == pytest.approx(1.0, abs=1e-8)
    res = build_recurrence(p, m).residuals(sol.coeffs, sol.energy)
    scale = max(abs(x) for x in sol.coeffs)
    assert np.max(np.abs(res)) <= 1e-12 * scale * max(1.0, abs(p.c), sol.energy)


def test_node_count_orders_roots():
    con = termination_constraints((1.5, 2.0), 1, 1)
    nodes = sorted(solve_quasi_exact(PotentialParams(1.5, 2.0, c), 1, 1).nodes for c in con.c_values)
    assert nodes == [0, 1]

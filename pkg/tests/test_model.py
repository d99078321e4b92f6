import math

import pytest

from ncspectra.model import (
    ATermMode,
    ClosedFormMode,
    InvalidParameters,
    NCConfig,
    PotentialParams,
    QuantumState,
    SpinBranch,
    Variant,
    validate_params,
)


def test_valid_params_pass():
    report = validate_params(PotentialParams(1.0, 1.0, -1.0))
    assert report.ok
    assert report.failures == []


@pytest.mark.parametrize(
    "params, message",
    [
        (PotentialParams(1.0, 0.0, -1.0), "b must be > 0"),
        (PotentialParams(-1.0, 1.0, 0.0), "a must be ≥ 0"),
    ],
)
def test_invalid_params_reported(params, message):
    report = validate_params(params)
    assert not report.ok
    assert any(message in f for f in report.failures)
    with pytest.raises(InvalidParameters, match=message):
        params.require_valid()


def test_non_finite_params_rejected():
    assert not validate_params(PotentialParams(math.nan, 1.0, 0.0)).ok
    assert not validate_params(PotentialParams(0.0, math.inf, 0.0)).ok


def test_c_sign_unrestricted():
    assert validate_params(PotentialParams(0.0, 2.0, 5.0)).ok
    assert validate_params(PotentialParams(0.0, 2.0, -5.0)).ok


def test_potential_evaluation():
    p = PotentialParams(2.0, 1.0, -1.0)
    assert p.potential(1.0) == pytest.approx(2.0)
    assert p.potential(2.0) == pytest.approx(-0.5 + 4.0 + 4.0)


def test_nc_config_defaults_are_trusted_paths():
    nc = NCConfig()
    assert nc.theta == 0
    assert nc.a_term_mode is ATermMode.EXPANDED_EXACT
    assert nc.closed_form_mode is ClosedFormMode.QUADRATURE_ONLY


def test_nc_config_rejects_negative_theta():
    with pytest.raises(InvalidParameters, match="theta must be ≥ 0"):
        NCConfig(-0.1)


def test_nc_config_coerces_strings():
    nc = NCConfig(0.1, "complex", "paper", "completed-square")
    assert nc.variant is Variant.COMPLEX
    assert nc.a_term_mode is ATermMode.PAPER_LITERAL
    assert nc.with_theta(0.2).theta == 0.2


@pytest.mark.parametrize("n, m", [(-1, 0), (0, -2), (0.5, 0)])
def test_quantum_state_rejects_bad_numbers(n, m):
    with pytest.raises(InvalidParameters):
        QuantumState(n, m)


def test_branch_required_iff_complex():
    QuantumState(0, 1).check_variant(Variant.CANONICAL)
    QuantumState(0, 1, SpinBranch.UP).check_variant(Variant.COMPLEX)
    with pytest.raises(InvalidParameters):
        QuantumState(0, 1, SpinBranch.UP).check_variant(Variant.CANONICAL)
    with pytest.raises(InvalidParameters):
        QuantumState(0, 1).check_variant(Variant.COMPLEX)


def test_effective_m_uses_spin():
    assert QuantumState(0, 0, SpinBranch.UP).effective_m == -1
    assert QuantumState(0, 0, SpinBranch.DOWN).effective_m == 1
    assert QuantumState(0, 3).effective_m == 3


def test_states_with_different_branches_differ():
    assert QuantumState(0, 1, SpinBranch.UP) != QuantumState(0, 1, SpinBranch.DOWN)


@pytest.mark.parametrize("text, branch", [("+", SpinBranch.UP), ("up", SpinBranch.UP),
                                          ("-1/2", SpinBranch.DOWN), (" - ", SpinBranch.DOWN)])
def test_branch_parse(text, branch):
    assert SpinBranch.parse(text) is branch


def test_branch_parse_rejects_garbage():
    with pytest.raises(ValueError):
        SpinBranch.parse("sideways")

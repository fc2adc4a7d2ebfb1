import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ggmlab.errors import DimensionError, InvalidSpectrumError
from ggmlab.symplectic import (
    gaussian_entropy,
    max_eigenvalue_from_spectrum,
    partial_trace_cm,
    symplectic_eigenvalues,
    symplectic_form,
    thermal_beta,
    vacuum_cm,
    validate_cm,
)
from oracles import omega, random_cm, random_symplectic, thermal_series, two_mode_spectrum

seeds = st.integers(0, 2**32 - 1)
modes = st.integers(1, 5)


def test_form_is_antisymmetric_and_squares_to_minus_one():
    J = symplectic_form(3)
    assert np.allclose(J, -J.T)
    assert np.allclose(J @ J, -np.eye(6))


def test_vacuum():
    assert np.allclose(symplectic_eigenvalues(vacuum_cm(3)), 0.5)
    assert validate_cm(vacuum_cm(2)).valid


@settings(max_examples=100, deadline=None)
@given(seeds, modes)
def test_recovers_williamson_spectrum(seed, n):
    cm, nu = random_cm(n, np.random.default_rng(seed))
    assert np.allclose(symplectic_eigenvalues(cm), nu, rtol=1e-8, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(seeds, modes)
def test_pairing_of_iJ_cm(seed, n):
    cm, nu = random_cm(n, np.random.default_rng(seed))
    ev = np.sort(np.linalg.eigvals(1j * omega(n) @ cm).real)
    assert np.allclose(ev[:n], -ev[n:][::-1], rtol=1e-8, atol=1e-9)
    assert np.allclose(np.sort(ev[n:])[::-1], nu, rtol=1e-7)


@settings(max_examples=100, deadline=None)
@given(seeds, modes)
def test_symplectic_invariance(seed, n):
    rng = np.random.default_rng(seed)
    cm, _ = random_cm(n, rng)
    s = random_symplectic(n, rng, squeeze=0.7)
    assert np.allclose(s @ omega(n) @ s.T, omega(n), atol=1e-10)
    a = symplectic_eigenvalues(cm)
    b = symplectic_eigenvalues(s @ cm @ s.T)
    assert np.allclose(a, b, rtol=1e-8)


@settings(max_examples=50, deadline=None)
@given(seeds, modes)
def test_product_of_spectrum_is_sqrt_det(seed, n):
    cm, _ = random_cm(n, np.random.default_rng(seed))
    nu = symplectic_eigenvalues(cm)
    assert np.prod(nu) == pytest.approx(math.sqrt(np.linalg.det(cm)), rel=1e-8)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_two_mode_invariants(seed):
    cm, _ = random_cm(2, np.random.default_rng(seed))
    assert np.allclose(symplectic_eigenvalues(cm), two_mode_spectrum(cm), rtol=1e-7)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 5))
def test_pure_reductions_are_valid(seed, n):
    cm, _ = random_cm(n, np.random.default_rng(seed), pure=True)
    assert validate_cm(cm).valid
    red = partial_trace_cm(cm, [0])
    assert symplectic_eigenvalues(red)[0] >= 0.5 - 1e-9


def test_invalid_cm_detected():
    cm = np.diag([0.1, 0.1, 0.5, 0.5])
    v = validate_cm(cm)
    assert not v.valid and v.margin < 0


@pytest.mark.parametrize("bad", [np.eye(3), np.zeros((2, 4)), np.array([[1.0, 0.2], [0.0, 1.0]])])
def test_shape_checks(bad):
    with pytest.raises(DimensionError):
        symplectic_eigenvalues(bad)


def test_partial_trace_order_and_bounds():
    cm = np.arange(36, dtype=float).reshape(6, 6)
    cm = cm + cm.T
    red = partial_trace_cm(cm, [2, 0])
    assert np.array_equal(red, cm[np.ix_([0, 1, 4, 5], [0, 1, 4, 5])])
    with pytest.raises(DimensionError):
        partial_trace_cm(cm, [3])
    with pytest.raises(DimensionError):
        partial_trace_cm(cm, [1, 1])


@pytest.mark.parametrize("nu", [0.5, 0.75, 1.0, 2.5, 10.0])
def test_thermal_mode_against_series(nu):
    lam, s = thermal_series(nu)
    assert max_eigenvalue_from_spectrum([nu]) == pytest.approx(lam, abs=1e-12)
    assert gaussian_entropy([nu]) == pytest.approx(s, abs=1e-9)


def test_unit_nu_reference_values():
    assert max_eigenvalue_from_spectrum([1.0]) == pytest.approx(2 / 3, abs=1e-14)
    assert gaussian_entropy([1.0]) == pytest.approx(1.3774437510817346, abs=1e-12)
    assert thermal_beta(1.0) == pytest.approx(math.log(3.0))
    assert thermal_beta(0.5) == math.inf


def test_entropy_and_eigenvalue_monotone():
    nus = np.linspace(0.5, 20, 200)
    s = [gaussian_entropy([v]) for v in nus]
    lam = [max_eigenvalue_from_spectrum([v]) for v in nus]
    assert np.all(np.diff(s) > 0)
    assert np.all(np.diff(lam) < 0)


def test_roundoff_below_half_is_clamped():
    assert max_eigenvalue_from_spectrum([0.5 - 1e-11]) == 1.0
    with pytest.raises(InvalidSpectrumError):
        max_eigenvalue_from_spectrum([0.49])

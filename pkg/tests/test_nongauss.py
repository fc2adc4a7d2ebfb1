import math

import numpy as np
import pytest

from ggmlab.fock import FockState, PhotonOp, build_fmsv_fock
from ggmlab.nongauss import (
    TABLE_ROWS,
    delta_ng,
    fmsv_report,
    fractional_enhancement,
    nongauss_table,
    table_row,
)


def fock_entropy(n):
    # |n> has CM (n + 1/2) I, so the Gaussian reference is thermal with mean n
    nu = n + 0.5
    return (nu + 0.5) * math.log2(nu + 0.5) - (nu - 0.5) * math.log2(nu - 0.5)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_number_states(n):
    assert delta_ng(FockState.basis((n, 0))) == pytest.approx(fock_entropy(n), abs=1e-12)


def test_single_photon_is_two_bits():
    assert delta_ng(FockState.basis((0, 1, 0))) == pytest.approx(2.0, abs=1e-12)


def test_gaussian_state_has_none():
    assert delta_ng(build_fmsv_fock(0.4)) == pytest.approx(0.0, abs=1e-6)


def test_displaced_moments_are_removed():
    # coherent-like superposition: nonzero <a>, still non-Gaussian
    s = FockState.from_dict({(0, 0): 1.0, (1, 0): 1.0})
    d = delta_ng(s)
    assert 0 < d < 2


def test_fractional_enhancement():
    assert fractional_enhancement(0.3, 0.2) == pytest.approx(0.5)
    with pytest.raises(ZeroDivisionError):
        fractional_enhancement(0.3, 0.0)


def test_report_at_zero_squeezing():
    rep = fmsv_report(0.0, PhotonOp("add", (1, 0, 0, 0)))
    assert math.isnan(rep.f_g)
    assert rep.reference_ggm == 0
    assert rep.delta_ng == pytest.approx(2.0, abs=1e-10)


@pytest.fixture(scope="module")
def table():
    return {(row["m1"], row["m2"]): row for row in nongauss_table(0.4)}


def test_rows(table):
    assert list(table) == list(TABLE_ROWS)


def test_monotone_in_m1(table):
    for m2 in (0, 1):
        for key in ("delta_add", "delta_sub", "f_add", "f_sub"):
            vals = [table[(m1, m2)][key] for m1 in (2, 5, 10)]
            assert np.all(np.diff(vals) > 0)


def test_subtraction_wins_on_ggm(table):
    for row in table.values():
        assert row["f_sub"] > row["f_add"]


def test_single_mode_symmetry(table):
    for m1 in (2, 5, 10):
        assert abs(table[(m1, 0)]["delta_add"] - table[(m1, 0)]["delta_sub"]) < 1e-4


def test_decoupling(table):
    # more non-Gaussianity does not mean more GGM
    for m1 in (2, 5, 10):
        row = table[(m1, 1)]
        assert row["f_sub"] > row["f_add"] and row["delta_add"] >= row["delta_sub"]


def test_table_row_keys():
    row = table_row(0.3, 1, 0)
    assert set(row) == {"m1", "m2", "delta_add", "f_add", "delta_sub", "f_sub"}

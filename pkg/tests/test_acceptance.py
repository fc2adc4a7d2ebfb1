"""Acceptance gate: one test per criterion, each reported as PASS/FAIL.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary lists every
criterion with its outcome.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

import conftest
from ggmlab.canonical import ggm_fock, max_eigenvalue_rdm, schmidt_spectrum
from ggmlab.bipartition import canonical_bipartitions
from ggmlab.fock import (
    build_added_fmsv,
    build_crystal_fock,
    build_fmsv_family,
    build_fmsv_fock,
    build_subtracted_fmsv,
    covariance_from_fock,
    reduced_density_matrix,
)
from ggmlab.gaussian import (
    CrystalParams,
    crystal_cm,
    crystal_occupations,
    detect_kinks,
    fmsv_candidates_closed_form,
    fmsv_cm,
    ggm_gaussian,
    tritter_cm,
)
from ggmlab.nongauss import delta_ng, nongauss_table
from ggmlab.symplectic import symplectic_eigenvalues
from oracles import omega, random_cm, random_symplectic
from test_canonical import sparse_state

R_GRID = np.arange(1, 21) / 10


@contextmanager
def criterion(key, desc):
    try:
        yield
    except BaseException:
        conftest.ACCEPTANCE[key] = (False, desc)
        raise
    conftest.ACCEPTANCE[key] = (True, desc)


def ggm_value(r, counts, kind):
    return ggm_fock(build_fmsv_family(r, counts, kind)).value


def test_c01_tritter_closed_form():
    with criterion("1", "tritter GGM = closed form, r in 0.1..2.0, |err| < 1e-10, < 1 s"):
        t0 = time.perf_counter()
        for r in R_GRID:
            x = math.sqrt(5 + 4 * math.cosh(4 * r)) / 3
            assert abs(ggm_gaussian(tritter_cm(r)).value - (x - 1) / (x + 1)) < 1e-10
        assert time.perf_counter() - t0 < 1.0


def test_c02_fmsv_closed_form():
    with criterion("2", "FMSV GGM = three-candidate closed form, |err| < 1e-10, < 1 s"):
        t0 = time.perf_counter()
        for r in R_GRID:
            c = math.cosh(r)
            ref = 1 - max(2 / (1 + c * c), 2 / (1 + math.cosh(2 * r)), (2 / (1 + c)) ** 2)
            assert abs(ggm_gaussian(fmsv_cm(r)).value - ref) < 1e-10
            assert 1 - max(fmsv_candidates_closed_form(r)) == pytest.approx(ref, abs=1e-15)
        assert time.perf_counter() - t0 < 1.0


def test_c03_purity_certificates():
    with criterion("3", "symplectic spectra of tritter, 10 random crystal, FMSV CMs all 1/2 within 1e-8"):
        rng = np.random.default_rng(2024)
        cms = [tritter_cm(r) for r in R_GRID] + [fmsv_cm(r) for r in R_GRID]
        for _ in range(10):
            g1, g2 = rng.uniform(0.05, 1.5, 2)
            cms.append(crystal_cm(CrystalParams(g1, g2, rng.uniform(0, 4), *rng.uniform(0, 2 * np.pi, 2))))
        for cm in cms:
            assert np.max(np.abs(symplectic_eigenvalues(cm) - 0.5)) < 1e-8


def test_c04_gaussian_fock_cross_oracle():
    with criterion("4", "Fock-engine GGM = Gaussian GGM (FMSV r=0.4; crystal t=0.5,1,2) within 1e-6, < 30 s"):
        t0 = time.perf_counter()
        pairs = [(build_fmsv_fock(0.4, eps_tail=1e-10), fmsv_cm(0.4))]
        for t in (0.5, 1.0, 2.0):
            p = CrystalParams(0.8, 0.5, t)
            pairs.append((build_crystal_fock(p, eps_tail=1e-10), crystal_cm(p)))
        for state, cm in pairs:
            assert abs(ggm_fock(state).value - ggm_gaussian(cm).value) < 1e-6
        assert time.perf_counter() - t0 < 30


def test_c05_fock_covariance():
    with criterion("5", "covariance of Fock-built FMSV(0.4) matches its CM entrywise within 1e-7"):
        _, cm = covariance_from_fock(build_fmsv_fock(0.4))
        assert np.max(np.abs(cm - fmsv_cm(0.4))) < 1e-7


TABLE = {
    (2, 0): (2.7548, 0.1639, 2.7548, 1.8234),
    (5, 0): (3.9001, 0.3792, 3.9001, 4.0378),
    (10, 0): (4.8344, 0.7293, 4.8344, 6.719),
    (2, 1): (4.5661, 0.7584, 2.0653, 2.9408),
    (5, 1): (5.5072, 1.0780, 3.6208, 4.7684),
    (10, 1): (6.1742, 1.5493, 4.6930, 7.1720),
}


def test_c06_nongauss_table():
    with criterion("6", "six-row non-Gaussianity table at r=0.4: delta within 5e-3, f within 2e-2, < 5 min"):
        t0 = time.perf_counter()
        rows = nongauss_table(0.4, list(TABLE))
        for row in rows:
            da, fa, ds, fs = TABLE[(row["m1"], row["m2"])]
            assert abs(row["delta_add"] - da) < 5e-3
            assert abs(row["delta_sub"] - ds) < 5e-3
            assert abs(row["f_add"] - fa) < 2e-2
            assert abs(row["f_sub"] - fs) < 2e-2
        assert time.perf_counter() - t0 < 300


def test_c07_freezing():
    with criterion("7", "subtracted FMSV frozen over m1+m3=M (M=2,4,6; m2=0,1): amplitudes 1e-12, GGM spread 1e-9"):
        for m2 in (0, 1):
            for M in (2, 4, 6):
                states = [build_subtracted_fmsv(0.4, (m1, m2, M - m1, 0)) for m1 in range(M + 1)]
                for s in states[1:]:
                    assert states[0].max_amplitude_diff(s) < 1e-12
                g = [ggm_fock(s).value for s in states]
                assert max(g) - min(g) < 1e-9


def test_c08_orderings():
    with criterion("8", "GGM orderings at r=0.4: sub > add > FMSV; sub-add >= 0; alt-adj > 0 (add), < 0 (sub)"):
        base = ggm_fock(build_fmsv_fock(0.4)).value
        for m in range(1, 9):
            add = ggm_value(0.4, (m, 0, 0, 0), "add")
            sub = ggm_value(0.4, (m, 0, 0, 0), "subtract")
            assert sub > add > base
        slack = 1e-9
        for m1 in range(5):
            for n in range(5):
                g = {
                    (pair, kind): ggm_value(0.4, (m1, n, 0, 0) if pair == "adj" else (m1, 0, n, 0), kind)
                    for pair in ("adj", "alt")
                    for kind in ("add", "subtract")
                }
                for pair in ("adj", "alt"):
                    d = g[(pair, "subtract")] - g[(pair, "add")]
                    assert d > 0 if m1 + n > 0 else d >= -slack
                d_add = g[("alt", "add")] - g[("adj", "add")]
                d_sub = g[("alt", "subtract")] - g[("adj", "subtract")]
                if m1 > 0 and n > 0:
                    assert d_add > 0 and d_sub < 0
                else:
                    assert d_add >= -slack and d_sub <= slack


def test_c09_single_mode_symmetry():
    with criterion("9", "|delta(add,(m,0)) - delta(sub,(m,0))| < 1e-4 for m = 1..8"):
        for m in range(1, 9):
            a = delta_ng(build_added_fmsv(0.4, (m, 0, 0, 0)))
            s = delta_ng(build_subtracted_fmsv(0.4, (m, 0, 0, 0)))
            assert abs(a - s) < 1e-4


# oscillatory crystal sweep
G1, G2 = 0.5, 0.8
OMEGA = math.sqrt(G2**2 - G1**2)
T_MAX = 3 * 2 * math.pi / OMEGA


def crystal_ggm(t):
    return ggm_gaussian(crystal_cm(CrystalParams(G1, G2, t)))


@pytest.fixture(scope="module")
def sweep():
    ts = np.linspace(0, T_MAX, 1201)
    return [(t, crystal_ggm(t)) for t in ts]


@pytest.fixture(scope="module")
def zeros(sweep):
    """GGM zeros: grid minima below 1e-3, refined by bounded minimisation."""
    vals = np.array([res.value for _, res in sweep])
    ts = np.array([t for t, _ in sweep])
    step = ts[1] - ts[0]
    found = []
    for i in range(len(vals)):
        lo, hi = max(i - 1, 0), min(i + 1, len(vals) - 1)
        if vals[i] <= vals[lo] and vals[i] <= vals[hi] and vals[i] < 1e-3:
            opt = minimize_scalar(lambda t: crystal_ggm(t).value,
                                  bounds=(max(ts[i] - step, 0), ts[i] + step),
                                  method="bounded", options={"xatol": 1e-12})
            t0 = 0.0 if i == 0 else opt.x
            if crystal_ggm(t0).value < 1e-9:
                found.append(t0)
    return found


def all_local_pure(t, tol=1e-6):
    return all(abs(n) < tol for n in crystal_occupations(CrystalParams(G1, G2, t)))


def test_c10a_kinks_are_refined_crossings(sweep):
    with criterion("10.a", "every kink on the (0.5, 0.8) crystal sweep is a top-two crossing refined to < 1e-8"):
        kinks = detect_kinks(sweep, crystal_ggm)
        assert kinks
        for k in kinks:
            assert k.crossing and k.gap < 1e-8
            top2 = {p.side_a for p, _ in crystal_ggm(k.t_cross).ranked()[:2]}
            assert top2 == {k.before.side_a, k.after.side_a}


def test_c10b_locally_pure_points_are_zeros():
    with criterion("10.b", "all F_i = 1/2 implies GGM = 0 on the (0.5, 0.8) crystal sweep"):
        points = [2 * math.pi * j / OMEGA for j in range(4)]
        for t in points:
            assert all_local_pure(t)
            assert crystal_ggm(t).value < 1e-9


@pytest.mark.xfail(strict=True, reason=(
    "literal reading fails: at t = (2j+1) pi / Omega mode 3 is in vacuum, so the GGM "
    "vanishes while F_1 = F_2 != 1/2"))
def test_c10c_zeros_have_all_modes_locally_pure(zeros):
    with criterion("10.c", "every GGM zero has all F_i = 1/2 (literal reading; fails at t = (2j+1) pi / Omega)"):
        assert len(zeros) >= 4
        for t in zeros:
            assert all_local_pure(t, tol=1e-3)


def test_c11_property_suites():
    with criterion("11", "Schmidt vs RDM 1e-8 and sum 1 +- 1e-10 on 50+50 sparse states; pairing/invariance on 100 CMs"):
        for n in (3, 4):
            for seed in range(50):
                s = sparse_state(1000 + seed, n)
                for part in canonical_bipartitions(n):
                    lam = schmidt_spectrum(s, part)
                    assert abs(lam.sum() - 1) < 1e-10
                    assert abs(lam[0] - max_eigenvalue_rdm(reduced_density_matrix(s, part.side_a))) < 1e-8
        rng = np.random.default_rng(99)
        for k in range(100):
            n = 1 + k % 5
            cm, nu = random_cm(n, rng)
            ev = np.sort(np.linalg.eigvals(1j * omega(n) @ cm).real)
            assert np.allclose(ev[:n], -ev[n:][::-1], rtol=1e-8, atol=1e-9)
            sym = random_symplectic(n, rng, squeeze=0.7)
            assert np.allclose(symplectic_eigenvalues(sym @ cm @ sym.T), nu, rtol=1e-8)

import numpy as np
import pytest
import scipy.sparse as sp

from ggmlab import canonical
from ggmlab.bipartition import ModeBipartition, canonical_bipartitions
from ggmlab.canonical import (
    ggm_fock,
    max_eigenvalue_rdm,
    max_schmidt_coefficient,
    schmidt_spectrum,
)
from ggmlab.fock import FockState, build_added_fmsv, build_fmsv_fock, reduced_density_matrix
from ggmlab.gaussian import fmsv_cm, ggm_gaussian
from oracles import dense_ggm, dense_schmidt_max


def sparse_state(seed, n_modes):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(3, 40))
    occ = rng.integers(0, 5, (k, n_modes))
    amps = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return FockState.from_arrays(occ, amps)


CASES = [(seed, n) for n in (3, 4) for seed in range(50)]


@pytest.mark.parametrize("seed,n", CASES)
def test_schmidt_vs_rdm_and_dense(seed, n):
    s = sparse_state(seed, n)
    amps = s.amplitudes
    for part in canonical_bipartitions(n):
        lam = schmidt_spectrum(s, part)
        assert lam.sum() == pytest.approx(1.0, abs=1e-10)
        top_rdm = max_eigenvalue_rdm(reduced_density_matrix(s, part.side_a))
        assert abs(lam[0] - top_rdm) < 1e-8
        ref, ref_all = dense_schmidt_max(amps, n, part.side_a)
        assert abs(lam[0] - ref) < 1e-10
        k = min(lam.size, ref_all.size)
        assert np.allclose(lam[:k], ref_all[:k], atol=1e-10)
    g_power = ggm_fock(s).value
    g_svd = ggm_fock(s, method="schmidt").value
    assert abs(g_power - g_svd) < 1e-8
    assert abs(g_svd - dense_ggm(amps, n)) < 1e-10


def test_product_and_ghz_like():
    assert ggm_fock(FockState.basis((1, 2, 0))).value == pytest.approx(0, abs=1e-14)
    ghz = FockState.from_dict({(0, 0, 0): 1, (1, 1, 1): 1})
    res = ggm_fock(ghz)
    assert res.value == pytest.approx(0.5, abs=1e-12)
    assert res.argmax_partition.side_a == (0,)


def test_schmidt_spectrum_accepts_tuple_side():
    s = FockState.from_dict({(0, 0): 1, (1, 1): 2})
    assert np.allclose(schmidt_spectrum(s, (1,)), [0.8, 0.2])


def test_fmsv_matches_gaussian():
    s = build_fmsv_fock(0.4)
    g = ggm_gaussian(fmsv_cm(0.4))
    f = ggm_fock(s)
    assert abs(f.value - g.value) < 1e-8
    assert f.argmax_partition == g.argmax_partition


def test_large_rdm_uses_iterative_path():
    s = build_added_fmsv(0.6, (3, 0, 0, 0), eps_tail=1e-10)
    part = ModeBipartition((0, 1), 4)
    lam = max_schmidt_coefficient(s, part)
    ref = schmidt_spectrum(s, part)[0]
    assert abs(lam - ref) < 1e-9


def test_rdm_inputs():
    rho = np.diag([0.5, 0.3, 0.2])
    assert max_eigenvalue_rdm(rho) == pytest.approx(0.5)
    big = sp.diags(np.linspace(1, 2, 500) / np.linspace(1, 2, 500).sum()).tocsr()
    assert max_eigenvalue_rdm(big) == pytest.approx(2 / np.linspace(1, 2, 500).sum(), rel=1e-10)


def test_degenerate_top_falls_back(monkeypatch):
    # power iteration stalls on a near-degenerate spectrum; Lanczos takes over
    monkeypatch.setattr(canonical, "SLOW_ITER", 3)
    d = np.full(200, 1e-3)
    d[:2] = [0.30, 0.30 - 1e-9]
    d /= d.sum()
    lam = max_eigenvalue_rdm(sp.diags(d).tocsr())
    assert lam == pytest.approx(d.max(), rel=1e-9)


def test_unknown_method():
    with pytest.raises(ValueError):
        ggm_fock(FockState.basis((0, 0)), method="magic")

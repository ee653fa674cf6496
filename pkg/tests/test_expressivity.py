import numpy as np
import pytest

from shvqe.expressivity import (
    CSV_COLUMNS,
    EnsembleSpec,
    delta_t,
    ensemble_moments,
    ensemble_sample,
    equivalent_depth_sweep,
    fidelity_requirement,
    haar_moments,
    is_saturated,
    jackknife_log_mean,
    lubkin_purity,
    write_csv,
)
from shvqe.statevector import reduced_moments


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(5)
    with pytest.raises(ValueError):
        EnsembleSpec(4, heisenberg="magic")
    with pytest.raises(ValueError):
        EnsembleSpec(4, sample_count=0)


def test_depth_zero_plain_is_zero_state():
    s = ensemble_sample(EnsembleSpec(4, 0, "none", sample_count=3), 1)
    assert abs(s.amplitudes[0]) == pytest.approx(1.0)


def test_samples_are_deterministic_and_distinct():
    spec = EnsembleSpec(4, 2, "clifford+layer", clifford_gates=50, sample_count=5)
    a = ensemble_sample(spec, 2).amplitudes
    assert np.array_equal(a, ensemble_sample(spec, 2).amplitudes)
    assert not np.allclose(a, ensemble_sample(spec, 3).amplitudes)
    with pytest.raises(IndexError):
        ensemble_sample(spec, 5)


def test_stabilizer_moments_are_flat_spectrum():
    # a stabilizer state's half-cut spectrum is flat: Tr(rho^t) = 2**(-(t-1)k) for some integer k
    spec = EnsembleSpec(6, 0, "clifford", clifford_gates=200, sample_count=20, t_max=4)
    for i in range(spec.sample_count):
        m = reduced_moments(ensemble_sample(spec, i), 4)
        k = -np.log2(m[1])
        assert k == pytest.approx(round(k), abs=1e-9)
        assert np.allclose(m, 2.0 ** (-(np.arange(1, 5) - 1) * round(k)), atol=1e-10)


def test_lubkin_closed_form():
    assert lubkin_purity(4) == pytest.approx(8 / 17)
    assert lubkin_purity(2) == pytest.approx(4 / 5)


def test_haar_moments_calibrate_against_lubkin():
    m = haar_moments(4, 2, 2000, 0)
    assert abs(m[:, 1].mean() / lubkin_purity(4) - 1) < 0.01


def test_jackknife_matches_delta_method_for_large_samples():
    rng = np.random.default_rng(0)
    x = rng.uniform(0.5, 1.5, (4000, 1))
    log_mean, se = jackknife_log_mean(x)
    assert log_mean[0] == pytest.approx(np.log(x.mean()))
    delta = x.std(ddof=1) / np.sqrt(len(x)) / x.mean()
    assert se[0] == pytest.approx(delta, rel=0.02)


def test_haar_self_comparison_is_zero():
    rep = delta_t(EnsembleSpec(4, 0, "haar", sample_count=400, t_max=5, seed=2), haar_samples=400, haar_seed=11)
    for t in range(1, 6):
        d, s = rep.at(t)
        assert abs(d) < max(3 * s, 1e-12)
    assert is_saturated(rep)


def test_delta_t1_is_zero_and_report_shape():
    rep = delta_t(EnsembleSpec(4, 1, "none", sample_count=30, t_max=3))
    assert rep.delta[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(rep.stderr >= 0)
    rows = rep.rows()
    assert len(rows) == 3
    assert tuple(rows[0]) == CSV_COLUMNS


def test_stderr_shrinks_with_samples():
    small = delta_t(EnsembleSpec(4, 1, "none", sample_count=200, t_max=3, seed=1), haar_samples=200)
    big = delta_t(EnsembleSpec(4, 1, "none", sample_count=800, t_max=3, seed=1), haar_samples=800)
    ratio = small.stderr_ensemble[2] / big.stderr_ensemble[2]
    assert 1.4 < ratio < 2.8


def test_delta_never_significantly_positive():
    for kind, depth in (("none", 1), ("clifford", 0), ("clifford+layer", 1)):
        rep = delta_t(EnsembleSpec(4, depth, kind, sample_count=150, t_max=4, seed=3), haar_samples=300)
        assert np.all(rep.delta < 3 * rep.stderr + 1e-12)


def test_threaded_moments_identical():
    spec = EnsembleSpec(4, 2, "clifford+layer", sample_count=12, seed=4)
    assert np.array_equal(ensemble_moments(spec, threads=1), ensemble_moments(spec, threads=3))


def test_equivalent_depth_trivial_row():
    # with the Heisenberg part disabled the SH ensemble is the VQE ensemble itself
    rows = equivalent_depth_sweep([4], sh_depths=(2,), vqe_depths=range(0, 4), samples=40,
                                  t_max=4, heisenberg="none")
    assert rows[0].vqe_depth is not None and rows[0].vqe_depth <= 2


@pytest.mark.parametrize(
    "total,depth,n,per_block,infid",
    [(0.9, 4, 12, 0.995619, 0.0043810), (0.9, 40, 12, 0.999561, 0.000439), (1.0, 3, 8, 1.0, 0.0)],
)
def test_fidelity_requirement(total, depth, n, per_block, infid):
    p, i = fidelity_requirement(total, depth, n)
    assert p == pytest.approx(per_block, abs=1e-6)
    assert i == pytest.approx(infid, abs=1e-6)


def test_fidelity_requirement_validation():
    with pytest.raises(ValueError):
        fidelity_requirement(0.0, 2, 8)
    with pytest.raises(ValueError):
        fidelity_requirement(0.9, 0, 8)


def test_csv_header():
    rep = delta_t(EnsembleSpec(4, 0, "none", sample_count=5, t_max=2))
    text = write_csv(rep.rows())
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(text.splitlines()) == 3

import numpy as np
import pytest

from softmvn import ess, metric_D, metric_xi, w1_empirical_1d


def test_w1_shift_is_exact():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(5000)
    assert w1_empirical_1d(x, x + 0.25) == pytest.approx(0.25, abs=1e-12)


def test_w1_identical_samples_zero():
    x = np.arange(100.0)
    assert w1_empirical_1d(x, x.copy()) == 0.0


def test_w1_unequal_lengths_truncate_before_sorting():
    # the longer sample is cut to the shorter length in given order, then both
    # are sorted; appending extreme values past the cut must not change it
    rng = np.random.default_rng(1)
    x = rng.standard_normal(1000)
    y = rng.standard_normal(1000)
    base = w1_empirical_1d(x, y)
    y_ext = np.concatenate([y, [1e9, -1e9]])
    assert w1_empirical_1d(x, y_ext) == pytest.approx(base, abs=1e-12)


def test_w1_two_point_masses():
    assert w1_empirical_1d(np.zeros(10), np.full(10, 3.0)) == 3.0


def test_metric_D_averages_coordinates():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((4000, 2))
    b = rng.standard_normal((4000, 2))
    b[:, 0] += 1.0  # only one coordinate shifted
    D = metric_D(a, b)
    w0 = w1_empirical_1d(a[:, 0], b[:, 0])
    w1 = w1_empirical_1d(a[:, 1], b[:, 1])
    assert D == pytest.approx((w0 + w1) / 2, rel=1e-12)
    assert 0.45 < D < 0.55


def test_metric_xi_mean_gap():
    a = np.zeros((100, 4))
    b = np.zeros((100, 4))
    b[:, 0] = 2.0
    # squared mean gap 4 averaged over 4 coordinates
    assert metric_xi(a, b) == pytest.approx(1.0, rel=1e-12)


def test_ess_iid_near_n():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(1000)
    assert 800 < ess(x) <= 1000


def test_ess_ar1_matches_theory():
    # AR(1) with coefficient phi has tau = (1+phi)/(1-phi) = 4 at phi = 0.6
    rng = np.random.default_rng(4)
    phi, n = 0.6, 40000
    x = np.empty(n)
    x[0] = rng.standard_normal()
    eps = rng.standard_normal(n)
    for t in range(1, n):
        x[t] = phi * x[t - 1] + eps[t]
    expected = n * (1 - phi) / (1 + phi)
    assert abs(ess(x) - expected) < 0.3 * expected


def test_ess_perfect_anticorrelation_capped():
    x = np.tile([1.0, -1.0], 500)
    assert ess(x) <= len(x)


def test_ess_rejects_degenerate_input():
    with pytest.raises(ValueError):
        ess(np.ones(100))
    with pytest.raises(ValueError):
        ess(np.arange(5.0))

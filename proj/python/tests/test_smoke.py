import math

import numpy as np
import pytest

import liftcal


def _calibration(n=200, seed=0):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=n)
    y = 0.3 + 0.8 * f + 0.5 * rng.normal(size=n)
    return y, f


def test_fit_matches_numpy():
    y, f = _calibration()
    fit = liftcal.fit_lifted_linear(y, f)
    b1, b0 = np.polyfit(f, y, 1)
    assert fit.beta0 == pytest.approx(b0, abs=1e-12)
    assert fit.beta1 == pytest.approx(b1, abs=1e-12)
    assert fit.n_calb == 200


def test_t_quantile_against_scipy():
    stats = pytest.importorskip("scipy.stats")
    for df in (1, 3, 30, 198):
        assert liftcal.t_quantile(0.975, df) == pytest.approx(stats.t.ppf(0.975, df), rel=1e-10)


def test_intervals_and_coverage():
    y, f = _calibration(n=5000, seed=1)
    fit = liftcal.fit_lifted_linear(y, f)
    yt, ft = _calibration(n=2000, seed=2)
    ivs = liftcal.prediction_intervals(fit, ft, 0.1)
    assert len(ivs) == 2000
    assert all(iv.lower < iv.center < iv.upper for iv in ivs)
    assert liftcal.empirical_coverage(ivs, yt) == pytest.approx(0.9, abs=0.03)
    one = liftcal.prediction_interval(fit, 0.5, 0.1)
    assert one.width > 0


def test_consistency_test_runs():
    y, f = _calibration()
    res = liftcal.consistency_test(liftcal.fit_lifted_linear(y, f), 0.05, seed=3, draws=20000)
    assert res.threshold > 2.0
    assert isinstance(res.reject, bool)


def test_lcd_and_ranking():
    y = np.array([0, 1, 0, 1, 1, 0, 0, 1], dtype=float)
    perfect = liftcal.lcd(y, y, link="logit")
    assert perfect.lcd == pytest.approx(1.0, abs=1e-9)
    ranking = liftcal.rank_models(
        [1.0, 2.0, 4.0, 3.0, 5.0],
        [("perfect", [1.0, 2.0, 4.0, 3.0, 5.0]), ("null", [3.0] * 5)],
    )
    assert [r.model_id for r in ranking] == ["null", "perfect"]


def test_mic_and_committee():
    w = liftcal.mic_probabilities([0.0, 2 * math.log(9.0)], [0.0, 0.0])
    assert w == pytest.approx([0.9, 0.1], abs=1e-12)
    assert liftcal.committee_predict([[0.0, 0.0], [1.0, 1.0]], w) == pytest.approx([0.1, 0.1])


def test_outliers():
    y, f = _calibration(n=100, seed=4)
    y = np.array(y)
    y[[5, 40, 77]] += 6.0
    lam, sol = liftcal.select_lambda(y, f)
    assert lam == sol.lambda_
    assert {5, 40, 77} <= set(sol.outlier_indices)
    ref = _calibration(n=200, seed=6)
    lam_ref, sol_ref = liftcal.select_lambda(y, f, reference=ref)
    assert {5, 40, 77} <= set(sol_ref.outlier_indices)
    assert len(liftcal.haar_dwt([1.0, -1.0])) == 2


def test_mcmc():
    y, f = _calibration(n=100, seed=5)
    chain = liftcal.sample_posterior(y, f, family="gumbel", m_samples=2000, burn_in=500, seed=1)
    assert chain.samples.shape == (2000, 3)
    iv = liftcal.predictive_interval_mcmc(chain, 0.0, 0.1, seed=2)
    assert iv.method == liftcal.IntervalMethod.Mcmc
    assert iv.lower < iv.upper


def test_synth_and_baselines():
    x, y, truth = liftcal.gen_dataset(n=300, sigma_eps=0.0, seed=7)
    assert x.shape == (300, 10)
    assert y == truth
    pred = liftcal.baseline_predict("knn", x, y, x[:5], k=1)
    assert pred == pytest.approx(y[:5])


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        liftcal.fit_lifted_linear([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(liftcal.InputError):
        liftcal.lcd([0.0, 2.0, 1.0], [0.1, 0.5, 0.9], link="logit")
    with pytest.raises(ValueError):
        liftcal.t_quantile(1.5, 3)

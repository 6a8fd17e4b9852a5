import numpy as np
import pytest

import wildqr


def make_data(n=60, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 4))
    eps = rng.normal(size=n)
    y = 1.0 + 2.0 * X[:, 0] - 1.5 * X[:, 1] + 0.5 * eps
    return y, X


def test_intercept_only_median():
    y = np.array([5.0, 1.0, 2.0, 4.0])
    X = np.empty((4, 0))
    fit = wildqr.fit_unpenalized(y, X, tau=0.3)
    # n*tau = 1.2, the unique minimizer is the 2nd smallest value
    assert fit.beta.shape == (1,)
    assert fit.beta[0] == pytest.approx(2.0, abs=1e-6)
    assert fit.kkt_gap <= 1e-6


def test_unpenalized_recovers_signal():
    y, X = make_data()
    fit = wildqr.fit_unpenalized(y, X, tau=0.5)
    assert fit.beta[1] == pytest.approx(2.0, abs=0.3)
    assert fit.beta[2] == pytest.approx(-1.5, abs=0.3)


def test_lasso_shrinks_to_zero():
    y, X = make_data()
    small = wildqr.fit_lasso(y, X, tau=0.5, lam=0.1)
    huge = wildqr.fit_lasso(y, X, tau=0.5, lam=1e6)
    assert len(small.active_set) >= 2
    assert len(huge.active_set) == 0
    assert np.all(huge.beta[1:] == 0.0)


def test_adaptive_drops_noise_keeps_signal():
    y, X = make_data()
    fit = wildqr.fit_adaptive(y, X, tau=0.5, lam=2.0, gamma=1.0)
    active = set(fit.active_set)
    assert 1 in active and 2 in active
    assert fit.beta[3] == 0.0 or abs(fit.beta[3]) < 0.1


def test_bootstrap_ci_covers_truth_and_is_deterministic():
    y, X = make_data(n=80, seed=3)
    draws = wildqr.bootstrap_adaptive(y, X, tau=0.5, lam=0.5, B=200, seed=7)
    assert draws.failures == 0
    assert draws.draws.shape == (200, 5)
    cis = wildqr.percentile_ci(draws, alpha=0.05)
    assert len(cis) == 5
    assert cis[1].lower <= 2.0 <= cis[1].upper
    assert all(c.lower <= c.upper for c in cis)
    again = wildqr.bootstrap_adaptive(y, X, tau=0.5, lam=0.5, B=200, seed=7, threads=4)
    assert np.array_equal(draws.draws, again.draws)


def test_bootstrap_lasso_and_unpenalized_run():
    y, X = make_data(n=50, seed=5)
    lasso = wildqr.bootstrap_lasso(y, X, tau=0.5, lam=0.5, B=150, seed=11)
    plain = wildqr.bootstrap_unpenalized(y, X, tau=0.5, B=150, seed=11)
    assert lasso.draws.shape[1] == plain.draws.shape[1] == 5
    assert lasso.n == plain.n == 50
    # modified bootstrap: intervals anchor on the lasso fit, not the
    # thresholded recentering vector
    fit = wildqr.fit_lasso(y, X, tau=0.5, lam=0.5)
    assert np.allclose(lasso.anchor, fit.beta)
    assert np.allclose(plain.anchor, plain.center)
    thresholded = wildqr.bootstrap_lasso(y, X, tau=0.5, lam=0.5, B=150, seed=11, source="lasso")
    assert np.allclose(thresholded.anchor, fit.beta)
    with pytest.raises(ValueError):
        wildqr.bootstrap_lasso(y, X, tau=0.5, lam=0.5, B=150, seed=11, source="nope")


def test_tuning_selects_from_grid():
    y, X = make_data(n=70, seed=9)
    grid = [0.05, 0.5, 5.0]
    bic = wildqr.bic_select(y, X, tau=0.5, grid=grid)
    assert bic.selected in grid
    assert len(bic.table) == 3
    cv = wildqr.cv_select(y, X, tau=0.5, grid=grid, folds=5, seed=2)
    assert cv.selected in grid
    an = wildqr.select_a_n(y, X, tau=0.5, lam=0.5, candidates=[0.1, 0.3], seed=4)
    assert an.selected in (0.1, 0.3)


def test_weight_law_verification():
    for law in ("two-point", "feng", "g1", "g2", "point-mass"):
        report = wildqr.verify_law(law, tau=0.5)
        assert report.passed, law
        assert report.frac_neg == pytest.approx(0.5, abs=0.02)
    with pytest.raises(ValueError):
        wildqr.verify_law("feng", tau=0.05)
    with pytest.raises(ValueError):
        wildqr.verify_law("g1", tau=0.5, params={"v1": 0.8})


def test_sample_law_moments():
    r = wildqr.sample_law("two-point", tau=0.3, n=200000, seed=1)
    # atoms 2(1-tau) w.p. 1-tau and -2 tau w.p. tau -> mean 2(1-t)^2 - 2t^2
    assert np.mean(r) == pytest.approx(2 * 0.7**2 - 2 * 0.3**2, abs=0.01)
    assert np.mean(r < 0) == pytest.approx(0.3, abs=0.01)


def test_run_study_smoke():
    report = wildqr.run_study(n=30, tau=0.5, methods=["fullwb"], reps=50, B=100, seed=21)
    assert report.reps == 50
    (method,) = report.methods
    assert method.reps_used == 50
    assert method.tp == 4.0
    assert method.coverage.shape == (11,)
    assert np.all((0.0 <= method.coverage) & (method.coverage <= 1.0))
    again = wildqr.run_study(n=30, tau=0.5, methods=["fullwb"], reps=50, B=100, seed=21, threads=2)
    assert np.array_equal(report.methods[0].coverage, again.methods[0].coverage)


def test_solver_error_is_exposed():
    assert issubclass(wildqr.SolverError, RuntimeError)


def test_validation_maps_to_python_exceptions():
    y, X = make_data(n=40)
    with pytest.raises(ValueError):
        wildqr.fit_unpenalized(y, X, tau=1.5)
    with pytest.raises(ValueError):
        wildqr.bootstrap_adaptive(y, X, tau=0.5, lam=0.5, B=10, seed=1)
    with pytest.raises(ValueError):
        wildqr.run_study(n=10, tau=0.5, methods=["fullwb"], reps=50, B=100)

import math
import warnings

import numpy as np
import pytest

from gpindex.asymptotics import limit_law
from gpindex.inference import (
    ConfidenceInterval,
    EmpiricalModel,
    bootstrap_ci,
    bootstrap_values,
    empirical_quantile,
    empirical_quantile_derivative,
    plugin_ci,
    plugin_variance,
)
from gpindex.models import Exponential, Uniform, draw_sample, uniform_stream
from gpindex.sample import IncomeSample, IndexId, PovertyContext, compute_closed_form

CTX = PovertyContext(0.5)


def test_empirical_quantile_is_an_order_statistic():
    s = IncomeSample([5.0, 1.0, 3.0, 2.0, 4.0])
    assert empirical_quantile(s, 0.2) == 1.0
    assert empirical_quantile(s, 0.21) == 2.0
    assert empirical_quantile(s, 1.0) == 5.0
    assert empirical_quantile(s, 1e-9) == 1.0
    np.testing.assert_array_equal(empirical_quantile(s, np.array([0.4, 0.6])), [2.0, 3.0])


def test_quantile_derivative_uniform_slope():
    s = IncomeSample(np.arange(1, 1001) / 1000.0)
    # exact grid: the difference quotient recovers the unit slope
    a = empirical_quantile_derivative(s, np.array([0.2, 0.5, 0.8]))
    np.testing.assert_allclose(a, 1.0, atol=2e-3)


def test_quantile_derivative_window_is_clamped():
    s = draw_sample(Exponential(1), 2000, 5)
    assert np.isfinite(empirical_quantile_derivative(s, 0.001))
    assert np.isfinite(empirical_quantile_derivative(s, 0.999))


def test_quantile_derivative_needs_ten_points():
    with pytest.raises(ValueError, match="sample too small"):
        empirical_quantile_derivative(IncomeSample([1.0, 2.0, 3.0]), 0.5)


def test_quantile_derivative_is_consistent():
    s = draw_sample(Exponential(1), 200_000, 11)
    grid = np.array([0.2, 0.4, 0.6])
    np.testing.assert_allclose(empirical_quantile_derivative(s, grid), 1 / (1 - grid), rtol=0.05)


def test_empirical_model_interface():
    s = draw_sample(Uniform(0, 1), 500, 3)
    m = EmpiricalModel(s)
    assert m.y0 == s.incomes[0]
    assert m.cdf(s.incomes[9]) == pytest.approx(10 / 500)
    assert "500" in repr(m)


def test_headcount_plugin_is_binomial():
    s = draw_sample(Uniform(0, 1), 1234, 8)
    ci = plugin_ci(IndexId("fgt", alpha=0), s, CTX)
    p = ci.estimate
    assert ci.se == pytest.approx(math.sqrt(p * (1 - p) / s.n), rel=1e-13)


@pytest.mark.parametrize(
    "index", [IndexId("fgt", alpha=1), IndexId("fgt", alpha=2), IndexId("kakwani", k=2), IndexId("shorrocks"),
              IndexId("ray", alpha=2)], ids=str,
)
def test_plugin_variance_is_consistent(index):
    s = draw_sample(Uniform(0, 1), 20_000, 21)
    theory = limit_law(index, Uniform(0, 1), 0.5).transformed_variance
    assert plugin_variance(index, s, CTX) == pytest.approx(theory, rel=0.06)


@pytest.mark.parametrize("index", [IndexId("chu", alpha=0.5), IndexId("fgt", alpha=0.5)], ids=str)
def test_plugin_variance_below_unit_exponent(index):
    # d' blows up at the line, so single estimates are noisy; the average is not biased
    theory = limit_law(index, Uniform(0, 1), 0.5).transformed_variance
    est = [plugin_variance(index, draw_sample(Uniform(0, 1), 20_000, seed), CTX) for seed in range(8)]
    assert np.mean(est) == pytest.approx(theory, rel=0.05)


@pytest.mark.parametrize("index", [IndexId("fgt", alpha=1), IndexId("sen"), IndexId("thon")], ids=str)
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_intervals_contain_the_estimate(index, seed):
    s = draw_sample(Exponential(1), 400, seed)
    ctx = PovertyContext(math.log(2))
    for ci in (plugin_ci(index, s, ctx), bootstrap_ci(index, s, ctx, B=200, seed=seed)):
        assert ci.lo <= ci.estimate <= ci.hi
        assert ci.contains(ci.estimate)
        assert ci.estimate == compute_closed_form(index, s, ctx)


@pytest.mark.parametrize("index", [IndexId("fgt", alpha=1), IndexId("kakwani", k=2)], ids=str)
def test_se_shrinks_like_root_n(index):
    model = Exponential(1)
    ctx = PovertyContext(math.log(2))
    n = 3000
    x = model.quantile(uniform_stream(np.random.default_rng(99), 2 * n))
    small, big = IncomeSample(x[:n]), IncomeSample(x)
    for ci_fn in (plugin_ci, lambda i, s, c: bootstrap_ci(i, s, c, B=400, seed=4)):
        ratio = ci_fn(index, big, ctx).se / ci_fn(index, small, ctx).se
        assert 0.6 <= ratio <= 0.82


def test_level_widens_interval():
    s = draw_sample(Uniform(0, 1), 800, 2)
    idx = IndexId("fgt", alpha=1)
    narrow, wide = plugin_ci(idx, s, CTX, 0.8), plugin_ci(idx, s, CTX, 0.99)
    assert wide.hi - wide.lo > narrow.hi - narrow.lo
    assert (narrow.hi - narrow.lo) / (2 * narrow.se) == pytest.approx(1.2815515655446004)


def test_plugin_guards():
    with pytest.raises(ValueError, match="insufficient poor"):
        plugin_ci("fgt", IncomeSample([0.1] + [0.9] * 20), CTX)
    with pytest.warns(UserWarning, match="poor observations"):
        plugin_ci(IndexId("fgt", alpha=1), IncomeSample([0.1, 0.2, 0.3] + [0.9] * 40), CTX)
    with pytest.raises(ValueError, match="every observation is poor"):
        plugin_ci("fgt", IncomeSample(np.linspace(0.01, 0.4, 50)), CTX)
    with pytest.raises(ValueError, match="no plug-in variance"):
        plugin_ci("takayama", draw_sample(Uniform(0, 1), 100, 1), CTX)
    with pytest.raises(ValueError, match="level"):
        plugin_ci("fgt", draw_sample(Uniform(0, 1), 100, 1), CTX, level=1.0)


def test_bootstrap_is_reproducible():
    s = draw_sample(Uniform(0, 1), 300, 4)
    a = bootstrap_ci("sen", s, CTX, B=150, seed=[3, 1])
    b = bootstrap_ci("sen", s, CTX, B=150, seed=[3, 1])
    c = bootstrap_ci("sen", s, CTX, B=150, seed=[3, 2])
    assert a == b and a != c


def test_bootstrap_vectorized_path_matches_loop():
    s = draw_sample(Exponential(1), 200, 6)
    y = s.incomes
    for idx in (IndexId("fgt", alpha=2), IndexId("watts"), IndexId("chakravarty", alpha=0.5)):
        fast = bootstrap_values(idx, y, 0.7, 120, 17)
        rng = np.random.default_rng(17)
        draws = rng.integers(0, y.size, size=(120, y.size))
        slow = [compute_closed_form(idx, IncomeSample(y[d]), PovertyContext(0.7)) for d in draws]
        np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=1e-15)


def test_bootstrap_covers_every_index():
    s = draw_sample(Exponential(1), 300, 9)
    ctx = PovertyContext(0.8)
    for name in ("takayama", "watts", "chu", "ray", "shorrocks"):
        ci = bootstrap_ci(name, s, ctx, B=100, seed=0)
        assert ci.lo <= ci.estimate <= ci.hi and ci.se > 0


def test_bootstrap_guards():
    s = draw_sample(Uniform(0, 1), 100, 1)
    with pytest.raises(ValueError, match="at least 100"):
        bootstrap_ci("fgt", s, CTX, B=99)
    with pytest.raises(ValueError, match="level"):
        bootstrap_ci("fgt", s, CTX, level=0)


def test_interval_dict():
    ci = ConfidenceInterval(0.3, 0.01, 0.95, 0.28, 0.32, "plugin", 100)
    assert list(ci.to_dict()) == ["estimate", "se", "level", "lo", "hi", "method", "n"]

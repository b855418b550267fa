import math

import numpy as np
import pytest
from scipy.integrate import quad as quad_ref

from besseldt.functions import SampledFunction, constant_one, indicator, \
    smooth_bump, smoothed_step
from besseldt.measure import (Interval, LambdaSpace, PowerWeight,
                              ap_characteristic, bmo_norm,
                              comparability_check, dyadic_family,
                              interval_average, interval_integral,
                              interval_q_integral, lp_norm, measure_interval,
                              oscillation, power_integral)


def test_space_validation():
    with pytest.raises(ValueError):
        LambdaSpace(0.0)
    with pytest.raises(ValueError):
        LambdaSpace(-1.0)
    s = LambdaSpace(0.75)
    assert s.weight_exponent == 1.5
    assert s.dimension == 2.5


def test_interval_canonical_form():
    iv = Interval(1.0, 3.0)          # x < r: becomes (0, 4)
    assert iv.center == iv.radius == 2.0
    assert iv.left == 0.0 and iv.right == 4.0
    iv2 = Interval(5.0, 1.0)
    assert (iv2.left, iv2.right) == (4.0, 6.0)
    assert iv2.dilate(2.0).left == 3.0
    with pytest.raises(ValueError):
        Interval(1.0, 0.0)


def test_measure_interval_closed_form(space1):
    # m(I) = integral of y^2 over the interval for lambda = 1
    iv = Interval(3.0, 1.0)
    assert measure_interval(space1, iv) == pytest.approx(
        (4.0 ** 3 - 2.0 ** 3) / 3.0, rel=1e-14)
    # interval reaching past 0 clips there
    iv0 = Interval(0.5, 2.0)
    assert measure_interval(space1, iv0) == pytest.approx(
        2.5 ** 3 / 3.0, rel=1e-14)


def test_power_integral():
    assert power_integral(1.0, 2.0, 3.0) == pytest.approx(15.0 / 4.0)
    assert power_integral(0.0, 2.0, 0.0) == pytest.approx(2.0)


def test_interval_integral_exact_piecewise(space1):
    # piecewise-linear f times y^2 integrates in closed form per segment
    f = SampledFunction(np.array([1.0, 2.0]), np.array([1.0, 3.0]))
    iv = Interval(1.5, 0.5)
    want = quad_ref(lambda y: (2.0 * y - 1.0) * y ** 2, 1.0, 2.0,
                    epsabs=1e-14)[0]
    assert interval_integral(space1, f, iv) == pytest.approx(want, rel=1e-13)


def test_interval_integral_delta_shift(space1):
    f = indicator(1.0)
    iv = Interval(0.5, 0.5)
    plain = interval_integral(space1, f, iv)
    shifted = interval_integral(space1, f, iv, delta=1.0)
    want = quad_ref(lambda y: y ** 3, 0.0, 1.0)[0]
    assert plain == pytest.approx(1.0 / 3.0, rel=1e-10)
    assert shifted == pytest.approx(want, rel=1e-8)


def test_interval_average_and_q(space1):
    c = constant_one()
    iv = Interval(2.0, 1.0)
    assert interval_average(space1, c, iv) == pytest.approx(1.0, rel=1e-12)
    f = smoothed_step(1.0, 0.2)
    q2 = interval_q_integral(space1, f, Interval(0.5, 0.3), 2.0)
    want = quad_ref(lambda y: f(y) ** 2 * y ** 2, 0.2, 0.8)[0]
    assert q2 == pytest.approx(want, rel=1e-8)


def test_lp_norm_indicator(space1):
    f = indicator(1.0)
    # ||chi||_p^p = integral_0^1 y^2 dy = 1/3
    assert lp_norm(space1, f, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-10)
    assert lp_norm(space1, f, 2.0) == pytest.approx(
        math.sqrt(1.0 / 3.0), rel=1e-10)
    s = LambdaSpace(0.3)
    assert lp_norm(s, f, 1.0) == pytest.approx(1.0 / 1.6, rel=1e-8)


def test_lp_norm_against_adaptive_quadrature(space1):
    f = smooth_bump(2.0, 0.8)
    for p in (1.0, 2.0, 3.0):
        want = quad_ref(lambda y: abs(f(y)) ** p * y ** 2, 1.2, 2.8,
                        epsabs=1e-13)[0] ** (1.0 / p)
        assert lp_norm(space1, f, p) == pytest.approx(want, rel=1e-7)


def test_lp_norm_divergent_tail(space1):
    assert lp_norm(space1, constant_one(), 1.0) == math.inf


def test_lp_norm_weighted(space1):
    f = indicator(1.0)
    w = PowerWeight(1.0)
    # integral_0^1 y^2 * y dy = 1/4
    assert lp_norm(space1, f, 1.0, weight=w) == pytest.approx(0.25, rel=1e-10)


def test_power_weight_ap_bounds(space1):
    w = PowerWeight(0.0)
    lo, hi = w.ap_bounds(space1, 2.0)
    assert (lo, hi) == (-3.0, 3.0)
    assert PowerWeight(2.9).in_ap(space1, 2.0)
    assert not PowerWeight(3.0).in_ap(space1, 2.0)   # boundary excluded
    assert not PowerWeight(-3.0).in_ap(space1, 2.0)
    with pytest.raises(ValueError):
        w.ap_bounds(space1, 1.0)


def test_ap_characteristic_growth(space1):
    # characteristic grows monotonically toward the admissible boundary
    fam = dyadic_family()
    vals = [ap_characteristic(space1, PowerWeight(d), 2.0, fam)
            for d in (0.0, 1.5, 2.5, 2.9)]
    assert all(np.isfinite(vals))
    assert vals == sorted(vals)
    assert vals[0] >= 1.0


def test_oscillation_and_bmo(space1):
    c = constant_one()
    iv = Interval(2.0, 1.0)
    assert oscillation(space1, c, iv) == pytest.approx(0.0, abs=1e-13)
    fam = dyadic_family()
    assert bmo_norm(space1, c, fam) == pytest.approx(0.0, abs=1e-13)
    f = smoothed_step(1.0, 0.2)
    assert bmo_norm(space1, f, fam) > 0.1


def test_dyadic_family_size():
    fam = dyadic_family((-2, 2), (-1, 1))
    # (k over 5 positions) x (m over 3 sizes) minus none: 15 intervals
    assert len(fam) == 15
    assert all(iv.radius > 0 for iv in fam)


def test_comparability_two_sided(space1, rng):
    # m(I(x, r)) is comparable to x^(2 lam) r + r^(2 lam + 1), both ways,
    # uniformly over three decades of (x, r)
    sweep = np.column_stack([
        np.exp(rng.uniform(np.log(1e-2), np.log(1e2), 80)),
        np.exp(rng.uniform(np.log(1e-3), np.log(1e1), 80))])
    rep = comparability_check(space1, sweep)
    assert rep.spans_three_decades
    assert 0.0 < rep.ratio_min <= rep.ratio_max < math.inf
    assert rep.ratio_max / rep.ratio_min < 10.0
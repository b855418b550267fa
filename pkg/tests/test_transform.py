import math

import numpy as np
import pytest

from besseldt.errors import ContractError
from besseldt.functions import (SampledFunction, constant_one, indicator,
                                smooth_bump)
from besseldt.kernel import apply_at, closed_form_lambda1
from besseldt.lacunary import LacunarySetup, geometric, refine, remap_window
from besseldt.measure import LambdaSpace
from besseldt.transform import (CotlarReport, IndexWindow, SemigroupTable,
                                TruncationLevel, apply_transform,
                                apply_transform_kernel_route,
                                convergence_probe, cotlar_check,
                                default_radius_grid, head_sum_bound_ratio,
                                max_window_sum_abs, maximal_hl,
                                maximal_transform, maximal_transform_brute,
                                tail_sum_bound_ratio, window_kernel,
                                window_kernel_bounds)

GRID = np.geomspace(0.05, 20.0, 24)


def alternating(j_min, j_max):
    return np.power(-1.0, np.arange(j_min, j_max))


def test_window_and_cap_validation():
    with pytest.raises(ValueError):
        IndexWindow(2, 2)
    with pytest.raises(ValueError):
        IndexWindow(3, 1)
    with pytest.raises(ValueError):
        TruncationLevel(0)
    w = IndexWindow(-1, 2)
    assert w.length == 4


def test_window_must_fit_setup(space1):
    setup = geometric(2.0, -2, 2)
    f = indicator(1.0)
    with pytest.raises(IndexError):
        apply_transform(space1, setup, IndexWindow(-2, 2), f, GRID)
    # n2 = j_max - 1 is the last admissible pair index
    apply_transform(space1, setup, IndexWindow(-2, 1), f, GRID)


def test_kernel_window_example_lambda1(space1):
    # a = {1,2,4}, v = {1,-1}, N = (0,1), x = y = 1: the closed form gives
    # K = 2 P_2(1,1) - P_1(1,1) - P_4(1,1) = (10 - 16 - 1) / (20 pi)
    setup = LacunarySetup(np.array([1.0, 2.0, 4.0]), np.array([1.0, -1.0]),
                          2.0)
    got = window_kernel(space1, setup, IndexWindow(0, 1), 1.0, 1.0)
    assert float(got) == pytest.approx(-7.0 / (20.0 * math.pi), rel=1e-9)


def test_kernel_window_telescopes_for_unit_weights(space1):
    setup = geometric(2.0, -3, 3)
    x, y = 1.3, 0.4
    got = window_kernel(space1, setup, IndexWindow(-2, 1), x, y)
    want = (closed_form_lambda1(setup.a_at(2), x, y)
            - closed_form_lambda1(setup.a_at(-2), x, y))
    assert float(got) == pytest.approx(float(want), rel=1e-9)


def test_transform_telescoping_identity(space1):
    setup = geometric(2.0, -4, 4)
    f = smooth_bump(1.0, 0.5)
    tn = apply_transform(space1, setup, IndexWindow(-3, 2), f, GRID)
    hi, _ = apply_at(space1, f, setup.a_at(3), GRID)
    lo, _ = apply_at(space1, f, setup.a_at(-3), GRID)
    scale = np.max(np.abs(tn.values))
    assert np.max(np.abs(tn.values - (hi - lo))) <= 1e-13 * scale


def test_transform_annihilates_constants(space1):
    setup = geometric(2.0, -3, 3, v=alternating(-3, 3))
    tn = apply_transform(space1, setup, IndexWindow(-2, 1), constant_one(),
                         GRID)
    assert np.max(np.abs(tn.values)) <= 1e-13


def test_window_additivity(space1):
    setup = geometric(2.0, -4, 4, v=alternating(-4, 4))
    f = smooth_bump(1.0, 0.5)
    whole = apply_transform(space1, setup, IndexWindow(-3, 3), f, GRID)
    left = apply_transform(space1, setup, IndexWindow(-3, 0), f, GRID)
    right = apply_transform(space1, setup, IndexWindow(1, 3), f, GRID)
    scale = np.max(np.abs(whole.values))
    assert np.max(np.abs(whole.values - (left.values + right.values))) \
        <= 1e-13 * scale


def test_transform_linearity(space1):
    setup = geometric(2.0, -3, 3, v=alternating(-3, 3))
    f = smooth_bump(1.0, 0.5)
    win = IndexWindow(-2, 2)
    a = apply_transform(space1, setup, win, f, GRID)
    b = apply_transform(space1, setup, win, 3.0 * f, GRID)
    assert np.allclose(3.0 * a.values, b.values, rtol=1e-12, atol=1e-15)


def test_refinement_preserves_transform(space1, rng):
    # ratios 2, 4, 8: the last pair needs one inserted time
    a = np.array([1.0, 2.0, 8.0, 64.0])
    v = rng.normal(size=3)
    setup = LacunarySetup(a, v, 2.0)
    refined = refine(setup)
    assert refined.eta.size > a.size
    n1, n2 = 0, 2
    m1, m2 = remap_window(refined, n1, n2)
    f = smooth_bump(1.0, 0.5)
    orig = apply_transform(space1, setup, IndexWindow(n1, n2), f, GRID)
    ref = apply_transform(space1, refined.as_setup(), IndexWindow(m1, m2),
                          f, GRID)
    scale = np.max(np.abs(orig.values))
    assert np.max(np.abs(ref.values - orig.values)) < 1e-12 * scale


def test_dual_route_agreement(space1):
    setup = geometric(2.0, -4, 4, v=alternating(-4, 4))
    f = smooth_bump(1.0, 0.4)
    win = IndexWindow(-2, 1)
    pts = np.array([0.5, 1.1, 2.3])
    summed = apply_transform(space1, setup, win, f, pts)
    kernel_route = apply_transform_kernel_route(space1, setup, win, f, pts)
    scale = np.max(np.abs(summed.values))
    assert np.max(np.abs(summed.values - kernel_route)) <= 1e-8 * scale


def test_max_window_sum_abs_equals_enumeration(rng):
    for _ in range(20):
        rows = int(rng.integers(3, 12))
        S = rng.normal(size=(rows, 5))
        got = max_window_sum_abs(S)
        best = np.zeros(5)
        for i1 in range(rows):
            for i2 in range(i1 + 2, rows):
                best = np.maximum(best, np.abs(S[i2] - S[i1]))
        assert np.array_equal(got, best)


def test_maximal_prefix_equals_brute(space1):
    setup = geometric(2.0, -4, 4, v=alternating(-4, 4))
    f = smooth_bump(1.0, 0.5)
    cap = TruncationLevel(3)
    fast = maximal_transform(space1, setup, cap, f, GRID)
    brute = maximal_transform_brute(space1, setup, cap, f, GRID)
    assert np.array_equal(fast.values, brute.values)


def test_maximal_dominates_each_window(space1):
    setup = geometric(2.0, -4, 4, v=alternating(-4, 4))
    f = smooth_bump(1.0, 0.5)
    cap = TruncationLevel(2)
    tstar = maximal_transform(space1, setup, cap, f, GRID)
    for n1 in range(-2, 2):
        for n2 in range(n1 + 1, 3):
            tn = apply_transform(space1, setup, IndexWindow(n1, n2), f, GRID)
            assert np.all(np.abs(tn.values) <= tstar.values + 1e-13)


def test_maximal_hl_constant(space1):
    vals = maximal_hl(space1, constant_one(), 1.0, default_radius_grid(),
                      np.array([0.5, 2.0]))
    assert np.allclose(vals, 1.0, rtol=1e-10)


def test_maximal_hl_indicator_pin(space1):
    # closed form at x = 2: averages of chi_(0,1) vanish for r <= 1, equal
    # (1 - (2-r)^3) / ((2+r)^3 - (2-r)^3) on (1, 2], and decay like
    # (2+r)^-3 past r = 2, so the sup sits inside (1, 2)
    from scipy.optimize import minimize_scalar

    def avg(r):
        return (1.0 - (2.0 - r) ** 3) / ((2.0 + r) ** 3 - (2.0 - r) ** 3)

    res = minimize_scalar(lambda r: -avg(r), bounds=(1.0, 2.0),
                          method="bounded", options={"xatol": 1e-12})
    want = -res.fun
    assert want == pytest.approx(0.020468906681359977, rel=1e-9)
    vals = maximal_hl(space1, indicator(1.0), 1.0,
                      np.geomspace(1.0, 2.0, 4001), np.array([2.0]))
    assert vals[0] <= want * (1 + 1e-12)
    assert vals[0] == pytest.approx(want, rel=1e-6)
    # the default coarse grid reports a lower bound of the radius sup
    coarse = maximal_hl(space1, indicator(1.0), 1.0, default_radius_grid(),
                        np.array([2.0]))
    assert coarse[0] <= vals[0] * (1 + 1e-12)
    assert coarse[0] == pytest.approx(want, rel=5e-2)


def test_maximal_hl_monotone_in_q(space1):
    f = smooth_bump(1.0, 0.5)
    pts = np.array([0.7, 1.0, 2.5])
    grid = default_radius_grid()
    m1 = maximal_hl(space1, f, 1.0, grid, pts)
    m2 = maximal_hl(space1, f, 2.0, grid, pts)
    assert np.all(m1 <= m2 + 1e-14)


def test_cotlar_trivial_cases(space1):
    setup = geometric(2.0, -5, 5, v=alternating(-5, 5))
    rep = cotlar_check(space1, setup, TruncationLevel(4), constant_one(),
                       2.0, np.array([0.5, 1.0, 2.0]))
    assert isinstance(rep, CotlarReport)
    assert rep.sup_ratio <= 1e-10
    assert rep.n_degenerate == 0


def test_cotlar_nontrivial(space1):
    setup = geometric(2.0, -5, 5, v=alternating(-5, 5))
    rep = cotlar_check(space1, setup, TruncationLevel(4), indicator(1.0),
                       2.0, np.geomspace(0.1, 10.0, 12))
    assert np.isfinite(rep.sup_ratio)
    assert 0 < rep.sup_ratio < 10.0
    assert rep.n_degenerate == 0


def test_window_bounds_zero_weights(space1):
    setup = geometric(2.0, -3, 3, v=np.zeros(6))
    # one point per regime: x <= 2|x-y| and x > 2|x-y|
    sweep = np.array([[1.0, 3.0], [5.0, 4.5]])
    rep = window_kernel_bounds(space1, setup, IndexWindow(-2, 2), sweep)
    assert rep.sup_size == 0.0
    assert rep.sup_gradient == 0.0
    with pytest.raises(ValueError):
        window_kernel_bounds(space1, setup, IndexWindow(-2, 2),
                             np.array([[1.0, 3.0]]))
    with pytest.raises(ValueError):
        window_kernel_bounds(space1, setup, IndexWindow(-2, 2),
                             np.array([[1.0, 1.0], [5.0, 4.5]]))


def test_head_bound_constraint_filter(space1):
    setup = geometric(2.0, -4, 4, v=alternating(-4, 4))
    # points at distance above a_m get rejected, close ones kept
    sweep = np.array([[1.0, 1.2], [1.0, 30.0]])
    rep = head_sum_bound_ratio(space1, setup, 0, 3, sweep)
    assert rep.n_used == 1 and rep.n_rejected == 1
    assert np.isfinite(rep.sup_ratio)
    with pytest.raises(ValueError):
        head_sum_bound_ratio(space1, setup, 2, 1, sweep)


def test_tail_bound_constraint_filter(space1):
    setup = geometric(2.0, -6, 6, v=alternating(-6, 6))
    # need a_k <= |x - y| <= a_{k+1} with k = 2: distances in [4, 8]
    sweep = np.array([[1.0, 6.0], [1.0, 1.5], [2.0, 40.0]])
    rep = tail_sum_bound_ratio(space1, setup, 0, 2, -6, sweep)
    assert rep.n_used == 1 and rep.n_rejected == 2
    assert np.isfinite(rep.sup_ratio)
    with pytest.raises(ValueError):
        tail_sum_bound_ratio(space1, setup, 3, 2, -6, sweep)


def test_probe_requires_lipschitz(space1):
    setup = geometric(2.0, -5, 5, v=alternating(-5, 5))
    with pytest.raises(ValueError):
        convergence_probe(space1, setup, indicator(1.0),
                          np.array([1.0]), (2, 4))


def test_probe_caps_must_increase(space1):
    setup = geometric(2.0, -5, 5, v=alternating(-5, 5))
    with pytest.raises(ValueError):
        convergence_probe(space1, setup, smooth_bump(1.0, 0.5),
                          np.array([1.0]), (4, 2))


def test_probe_diffs_shrink(space1):
    setup = geometric(2.0, -7, 7, v=alternating(-7, 7))
    rep = convergence_probe(space1, setup, smooth_bump(1.0, 0.5),
                            np.geomspace(0.2, 5.0, 8), (2, 4, 6))
    assert rep.sup_diffs[1] < rep.sup_diffs[0]
    assert np.all(rep.ratios <= 1.0)

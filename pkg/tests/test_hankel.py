import numpy as np
import pytest
from scipy.special import jv

from besseldt.errors import TailEstimateError
from besseldt.functions import SampledFunction, constant_one, smooth_bump
from besseldt.hankel import (gaussian_fixed_point_defect, hankel_transform,
                             involution_defect, normalized_bessel,
                             plancherel_defect, spectral_poisson_apply)
from besseldt.kernel import apply_at
from besseldt.measure import LambdaSpace

from conftest import rel_err


def test_normalized_bessel_against_scipy():
    # z^-nu J_nu(z) across the series/asymptotic crossover
    z = np.geomspace(1e-3, 60.0, 400)
    for nu in (0.5, 1.2, 3.0):
        got = normalized_bessel(nu, z)
        want = jv(nu, z) / z ** nu
        # scipy's jv itself carries ~1e-13 relative noise at moderate z
        assert rel_err(got, want) < 5e-12


def test_normalized_bessel_at_zero_limit():
    # z -> 0 limit is 1 / (2^nu Gamma(nu + 1))
    from scipy.special import gamma
    nu = 0.5
    got = normalized_bessel(nu, np.array([1e-12]))
    assert got[0] == pytest.approx(1.0 / (2 ** nu * gamma(nu + 1)), rel=1e-13)


def test_gaussian_fixed_point(space1):
    pts = np.geomspace(0.05, 6.0, 12)
    assert gaussian_fixed_point_defect(space1, pts) < 1e-10


def test_gaussian_fixed_point_other_lambda():
    s = LambdaSpace(0.6)
    pts = np.geomspace(0.1, 4.0, 8)
    assert gaussian_fixed_point_defect(s, pts) < 1e-10


def test_hankel_rejects_hold_tail(space1):
    with pytest.raises(ValueError):
        hankel_transform(space1, constant_one(), np.array([1.0, 2.0]))


def test_involution_roundtrip(space1):
    # analytic pair: H(x^2 e^{-x^2/2}) = (2 lam + 1 - y^2) e^{-y^2/2},
    # both sides Gaussian-decaying, so a modest y_max truncation suffices
    grid = np.geomspace(1e-4, 12.0, 256)
    f = SampledFunction.from_callable(
        lambda x: x ** 2 * np.exp(-0.5 * np.asarray(x, dtype=float) ** 2),
        grid, breakpoints=(0.5, 1.0, 2.0, 4.0, 8.0))
    pts = np.geomspace(0.2, 5.0, 6)
    assert involution_defect(space1, f, pts, y_max=10.0) < 1e-8


def test_involution_forward_matches_analytic(space1):
    grid = np.geomspace(1e-4, 12.0, 256)
    f = SampledFunction.from_callable(
        lambda x: x ** 2 * np.exp(-0.5 * np.asarray(x, dtype=float) ** 2),
        grid, breakpoints=(0.5, 1.0, 2.0, 4.0, 8.0))
    ys = np.geomspace(0.3, 4.0, 8)
    hf = hankel_transform(space1, f, ys)
    want = (2.0 * space1.lam + 1.0 - ys ** 2) * np.exp(-0.5 * ys ** 2)
    assert np.max(np.abs(hf.values - want)) < 1e-10


def test_involution_guards_tail(space1):
    # y_max inside the transform's support raises instead of silently
    # truncating
    f = smooth_bump(2.0, 1.0)
    with pytest.raises(TailEstimateError):
        involution_defect(space1, f, np.array([1.0, 2.0]), y_max=3.0)


def test_plancherel_smooth_bump(space1):
    f = smooth_bump(2.0, 1.0)
    lhs, rhs, rel = plancherel_defect(space1, f, y_max=60.0, n_y=768)
    assert lhs > 0 and rhs > 0
    assert rel < 1e-5


def test_spectral_route_matches_direct(space1):
    f = smooth_bump(2.0, 1.0)
    pts = np.array([0.8, 1.9, 3.2])
    via_hankel = spectral_poisson_apply(space1, f, 0.6, pts)
    direct, _ = apply_at(space1, f, 0.6, pts)
    assert np.max(np.abs(via_hankel.values - direct)) < 1e-7

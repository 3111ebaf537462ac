import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from conftest import random_p
from weylsemigroup.accessibility import channel_from_times, decide_accessibility
from weylsemigroup.classical import Circulant, decide_embeddability
from weylsemigroup.config import WeylError
from weylsemigroup.geometry import spectral_support_contains
from weylsemigroup.sampling import (
    CHUNK,
    SCAN_TESTS,
    accessible_mask,
    accessible_volume_fraction,
    cross_section_scan,
    embeddable_mask,
    fixed_p0_fraction,
    qubit_volume_ratio,
    sample_simplex,
    spectra_scatter,
    triangle_cell_centres,
)
from weylsemigroup.unistochastic import david_star_test, hypocycloid_test, hypocycloid_value
from weylsemigroup.weyl import WeylChannel, hadamard_H, polygon_contains


def _within(frac, target, samples, k=3.0):
    sigma = math.sqrt(max(target * (1 - target), 1e-300) / samples)
    return abs(frac - target) <= k * sigma


# ---------------------------------------------------------------- simplex sampler


def test_simplex_dim_one():
    x = sample_simplex(1, 10, seed=4)
    assert np.array_equal(x, np.ones((10, 1)))


def test_simplex_points_are_probabilities():
    x = sample_simplex(9, 5000, seed=1)
    assert np.all(x >= 0)
    assert np.allclose(x.sum(axis=1), 1.0)


def test_simplex_mean_is_barycenter():
    d, count = 5, 200_000
    x = sample_simplex(d, count, seed=2)
    var = (d - 1) / (d * d * (d + 1))
    assert np.all(np.abs(x.mean(axis=0) - 1 / d) <= 3 * math.sqrt(var / count))


def test_simplex_marginal_is_beta():
    # first coordinate of a flat point on Delta_{d-1} is Beta(1, d-1)
    d = 4
    x = sample_simplex(d, 100_000, seed=3)[:, 0]
    for c in (0.1, 0.3, 0.6):
        target = 1 - (1 - c) ** (d - 1)
        assert _within((x <= c).mean(), target, x.size)


def test_simplex_counter_based():
    full = sample_simplex(4, 3 * CHUNK + 17, seed=7)
    part = sample_simplex(4, 1000, seed=7, start=CHUNK - 300)
    assert np.array_equal(part, full[CHUNK - 300 : CHUNK + 700])
    assert np.array_equal(sample_simplex(4, 5, seed=7), full[:5])
    assert not np.array_equal(sample_simplex(4, 5, seed=8), full[:5])


def test_simplex_rejects_empty():
    with pytest.raises(WeylError):
        sample_simplex(3, 0)
    with pytest.raises(WeylError):
        sample_simplex(0, 3)


def _links_close(w):
    # rows of circ(w) orthogonal for some phases iff the three link lengths close a triangle
    s = np.sqrt(w * np.roll(w, 1, axis=1))
    return 2 * s.max(axis=1) <= s.sum(axis=1)


def test_hypocycloid_fraction_matches_area():
    oracle = _links_close(triangle_cell_centres(1500)).mean()
    x = sample_simplex(3, 100_000, seed=5)
    frac = np.mean([hypocycloid_test(r) for r in x])
    sigma = math.sqrt(oracle * (1 - oracle) / x.size)
    assert abs(frac - oracle) <= 3 * sigma + 1e-3


def test_hypocycloid_matches_link_closure():
    w = triangle_cell_centres(60)
    val = np.array([hypocycloid_value(r) for r in w])
    off = np.abs(val) > 1e-12
    assert np.array_equal((val >= 0)[off], _links_close(w)[off])


# ---------------------------------------------------------------- batched decisions


@pytest.mark.parametrize("n", [2, 3, 4])
def test_batched_mask_equals_scalar(n, rng):
    p = random_p(rng, n, size=150)
    # mix in some accessible channels so both verdicts occur
    t = rng.exponential(0.2, (150, n * n))
    p = np.concatenate([p, np.stack([channel_from_times(r, n).p for r in t])])
    acc, und = accessible_mask(p, n)
    assert not und.any()
    scalar = np.array([decide_accessibility(WeylChannel(n, r)).accessible for r in p])
    assert np.array_equal(acc, scalar)
    assert acc.any() and not acc.all()


@pytest.mark.parametrize("n", [3, 4, 5])
def test_batched_embeddable_equals_scalar(n, rng):
    q = rng.dirichlet(np.ones(n), size=300)
    acc, und = embeddable_mask(q)
    assert not und.any()
    scalar = np.array([decide_embeddability(Circulant(r)).accessible for r in q])
    assert np.array_equal(acc, scalar)


def test_qubit_mask_is_triangle_rule(rng):
    p = random_p(rng, 2, size=10_000)
    lam = (p @ hadamard_H(2).T).real[:, 1:]
    pos = np.all(lam > 0, axis=1)
    rule = pos & np.all(lam >= np.roll(lam, 1, axis=1) * np.roll(lam, 2, axis=1), axis=1)
    acc, _ = accessible_mask(p, 2)
    assert np.array_equal(acc, rule)


# ---------------------------------------------------------------- volumes


def test_qubit_ratio_exact():
    assert qubit_volume_ratio() == Fraction(3, 32)


def test_qubit_ratio_from_lambda_space():
    # accessible set in lambda coordinates: lambda_i >= lambda_j lambda_k on (0, 1]^3
    # symmetric in lambda_1 <-> lambda_2; on lambda_2 >= lambda_1 the cap is lambda_1 / lambda_2
    half, _ = integrate.dblquad(
        lambda l2, l1: l1 / l2 - l1 * l2, 0, 1, lambda l1: l1, 1, epsabs=1e-13, epsrel=1e-13
    )
    acc = 2 * half
    # image of the simplex: tetrahedron of Pauli-channel spectra
    verts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    tet = abs(np.linalg.det(verts[1:] - verts[0])) / 6
    assert abs(acc / tet - 3 / 32) < 1e-9


def test_qubit_volume_monte_carlo():
    est = accessible_volume_fraction(2, 200_000, seed=1)
    assert est.undecided == 0
    assert _within(est.fraction, 3 / 32, est.samples)


def test_volume_is_thread_independent():
    a = accessible_volume_fraction(3, 3 * CHUNK + 100, seed=3, threads=1)
    b = accessible_volume_fraction(3, 3 * CHUNK + 100, seed=3, threads=4)
    assert a == b
    c = fixed_p0_fraction(2, 0.5, 2 * CHUNK + 5, seed=3, threads=3)
    d = fixed_p0_fraction(2, 0.5, 2 * CHUNK + 5, seed=3, threads=1)
    assert c == d


def test_volume_estimate_json():
    est = accessible_volume_fraction(2, 10_000, seed=0)
    js = est.to_json()
    assert js["samples"] == 10_000 and js["seed"] == 0
    assert js["fraction"] == est.hits / 10_000


def test_fixed_p0_identity():
    est = fixed_p0_fraction(3, 1.0, 1000)
    assert est.fraction == 1.0


def test_fixed_p0_rejects_bad_value():
    with pytest.raises(WeylError):
        fixed_p0_fraction(2, 1.2, 100)


def test_fixed_p0_qubit_curve_monotone():
    grid = np.linspace(0.05, 0.95, 10)
    samples = 50_000
    f = [fixed_p0_fraction(2, p0, samples, seed=11).fraction for p0 in grid]
    for a, b in zip(f, f[1:]):
        sigma = math.sqrt((a * (1 - a) + b * (1 - b)) / samples)
        assert b >= a - 3 * sigma
    assert f[0] < 0.05 and f[-1] > 0.85


def test_fixed_p0_qutrit_positive_below_one_ninth():
    # an interior accessible point with p0 < 1/9: every nearby channel with
    # the same p0 stays accessible, so the slice has positive volume
    t = np.array([0, 2.5, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 2.5])
    ch = channel_from_times(t, 3)
    assert ch.p[0] < 1 / 9
    assert decide_accessibility(ch).accessible
    rng = np.random.default_rng(0)
    for _ in range(200):
        d = rng.normal(size=8)
        d -= d.mean()
        d *= 1e-5 / np.linalg.norm(d)
        q = ch.p.copy()
        q[1:] += d
        assert decide_accessibility(WeylChannel(3, q)).accessible


# ---------------------------------------------------------------- scans


def test_cells_tile_triangle():
    r = 7
    w = triangle_cell_centres(r)
    assert w.shape == (r * r, 3)
    assert np.allclose(w.sum(axis=1), 1)
    assert np.all(w > 0)
    assert len({tuple(np.round(x, 12)) for x in w}) == r * r
    assert np.allclose(w.mean(axis=0), 1 / 3)


def _x_face():
    return [WeylChannel(3, np.eye(9)[k * 3]) for k in range(3)]


def test_x_face_scan_matches_spiral():
    g = cross_section_scan(_x_face(), resolution=96)
    acc, spiral = g.flags["accessible"], g.flags["spiral"]
    diff = np.flatnonzero(acc != spiral)
    # the barycentre has xi = 0, where no logarithm exists
    assert np.all(np.abs(g.weights[diff] - 1 / 3).max(axis=1) < 1e-9)
    assert np.array_equal(acc, g.flags["embeddable"])
    assert acc.mean() > 0


def test_scan_region_flags():
    g = cross_section_scan(_x_face(), resolution=40, tests=("hypocycloid", "star"))
    assert set(g.flags) == {"hypocycloid", "star"}
    assert np.array_equal(g.flags["hypocycloid"], [hypocycloid_test(x) for x in g.weights])
    assert np.array_equal(g.flags["star"], [david_star_test(x) for x in g.weights])
    xy = g.planar()
    assert np.all(xy[:, 1] >= 0) and np.all(xy[:, 1] <= math.sqrt(3) / 2)


def test_scan_rejects_bad_faces():
    with pytest.raises(WeylError):
        cross_section_scan([WeylChannel.identity(2), WeylChannel.identity(3), WeylChannel.identity(3)], 4)
    with pytest.raises(WeylError):
        cross_section_scan(_x_face(), 4, tests=("bogus",))
    assert "accessible" in SCAN_TESTS


# ---------------------------------------------------------------- scatter


def test_x_face_scatter_uniform_in_triangle():
    count = 100_000
    lam = spectra_scatter(3, "x-face", count, seed=2).reshape(count, 9)
    xi = lam[:, 1]
    assert np.all(polygon_contains(lam, 3))
    assert abs(xi.mean()) < 3 * math.sqrt(0.25 / count) * 2
    medial = polygon_contains(-2 * xi, 3, tol=0.0)
    assert _within(medial.mean(), 0.25, count)


def test_simplex_scatter_inside_polygon():
    lam = spectra_scatter(3, "simplex", 5000, seed=1)
    assert lam.size == 9 * 5000
    assert np.all(polygon_contains(lam, 3))


def test_accessible_scatter_inside_spiral():
    lam = spectra_scatter(3, "accessible", 3000, seed=1)
    assert np.all(spectral_support_contains(lam, 3, eps=1e-9))


def test_scatter_rejects_unknown():
    with pytest.raises(WeylError):
        spectra_scatter(3, "nope", 10)

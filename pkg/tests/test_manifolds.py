"""Geometry tests: chart maps, distances, retractions, and the local
distance comparison with exact sphere formulas as the oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharpmin.manifolds import (
    INVERSION_TOL,
    GeometryError,
    Point,
    Tangent,
    curvature_norm,
    euclidean,
    exp_map,
    geodesic_distance,
    geodesic_sphere_sampler,
    log_map,
    point_set_distance,
    retract,
    sphere,
    stiefel,
    tangent_project,
    verify_local_distance_lemma,
)


def sphere_point(*coords):
    c = np.array(coords, dtype=float)
    return Point(sphere(len(c), float(np.linalg.norm(c))), c)


class TestDescriptors:
    def test_dimensions(self):
        assert euclidean(5).intrinsic_dim == 5
        assert sphere(3, 1.0).intrinsic_dim == 2
        assert stiefel(5, 2).intrinsic_dim == 5 * 2 - 3
        assert stiefel(5, 2).ambient_dim == 10

    def test_invalid(self):
        with pytest.raises(GeometryError):
            sphere(3, -1.0)
        with pytest.raises(GeometryError):
            stiefel(2, 3)

    def test_point_feasibility_enforced(self):
        with pytest.raises(GeometryError):
            Point(sphere(2, 1.0), np.array([1.0, 1.0]))
        with pytest.raises(GeometryError):
            Point(stiefel(2, 2), np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_tangent_invariant_enforced(self):
        p = sphere_point(1.0, 0.0)
        with pytest.raises(GeometryError):
            Tangent(p, np.array([1.0, 0.0]))


class TestExpLog:
    def test_antipodal_half_turn(self):
        p = sphere_point(1.0, 0.0, 0.0)
        q = exp_map(p, Tangent(p, np.array([0.0, math.pi, 0.0])))
        assert np.allclose(q.coords, [-1.0, 0.0, 0.0], atol=1e-12)

    def test_zero_vector_identity(self):
        p = sphere_point(1.0, 0.0, 0.0)
        assert np.array_equal(exp_map(p, Tangent(p, np.zeros(3))).coords, p.coords)
        pe = Point(euclidean(4), np.arange(4.0))
        assert np.array_equal(exp_map(pe, Tangent(pe, np.zeros(4))).coords, pe.coords)

    def test_quarter_arc(self):
        p = sphere_point(1.0, 0.0, 0.0)
        q = exp_map(p, Tangent(p, np.array([0.0, math.pi / 2, 0.0])))
        assert np.allclose(q.coords, [0.0, 1.0, 0.0], atol=1e-12)
        back = log_map(p, q)
        assert np.allclose(back.vec, [0.0, math.pi / 2, 0.0], atol=1e-12)

    def test_euclidean_log(self):
        p = Point(euclidean(3), np.zeros(3))
        q = Point(euclidean(3), np.array([1.0, -2.0, 3.0]))
        assert np.array_equal(log_map(p, q).vec, q.coords)

    def test_log_at_base_is_zero(self):
        p = sphere_point(0.0, 0.0, 1.0)
        assert log_map(p, p).norm == 0.0

    def test_antipodal_log_refused(self):
        p = sphere_point(1.0, 0.0)
        q = sphere_point(-1.0, 0.0)
        with pytest.raises(GeometryError):
            log_map(p, q)

    def test_exp_log_inversion_1000_seeded(self):
        # ||log(exp(v)) - v|| <= 1e-8 (1 + ||v||) below 0.9 * injectivity
        rng = np.random.default_rng(0)
        m = sphere(4, 2.0)
        for _ in range(1000):
            z = rng.standard_normal(4)
            p = Point(m, 2.0 * z / np.linalg.norm(z))
            w = tangent_project(p, rng.standard_normal(4))
            if w.norm < 1e-9:
                continue
            scale = rng.uniform(1e-3, 0.9) * m.injectivity_radius
            v = Tangent(p, scale * w.vec / w.norm)
            back = log_map(p, exp_map(p, v))
            assert np.linalg.norm(back.vec - v.vec) <= INVERSION_TOL * (1 + v.norm)

    def test_stiefel_exp_refused(self):
        p = Point(stiefel(2, 1), np.array([[1.0], [0.0]]))
        with pytest.raises(GeometryError):
            exp_map(p, Tangent(p, np.array([[0.0], [1.0]])))


class TestDistance:
    def test_quarter_distance(self):
        assert geodesic_distance(sphere_point(1, 0, 0), sphere_point(0, 1, 0)) == pytest.approx(
            math.pi / 2, abs=1e-12
        )

    def test_euclidean_distance(self):
        p = Point(euclidean(2), np.array([1.0, 2.0]))
        q = Point(euclidean(2), np.array([4.0, 6.0]))
        assert geodesic_distance(p, q) == 5.0

    def test_radius_two_antipodal(self):
        m = sphere(3, 2.0)
        p = Point(m, np.array([2.0, 0.0, 0.0]))
        q = Point(m, np.array([-2.0, 0.0, 0.0]))
        assert geodesic_distance(p, q) == pytest.approx(2 * math.pi, abs=1e-12)

    def test_mismatched_manifolds(self):
        with pytest.raises(GeometryError):
            geodesic_distance(Point(euclidean(2), np.zeros(2)), sphere_point(1.0, 0.0))

    def test_axioms_on_samples(self):
        rng = np.random.default_rng(1)
        m = sphere(3, 1.0)
        pts = []
        for _ in range(30):
            z = rng.standard_normal(3)
            pts.append(Point(m, z / np.linalg.norm(z)))
        for _ in range(200):
            a, b, c = rng.choice(len(pts), size=3, replace=False)
            dab = geodesic_distance(pts[a], pts[b])
            dba = geodesic_distance(pts[b], pts[a])
            assert abs(dab - dba) <= 1e-12
            assert dab <= geodesic_distance(pts[a], pts[c]) + geodesic_distance(pts[c], pts[b]) + 1e-10
        assert geodesic_distance(pts[0], pts[0]) == 0.0


class TestTangentProject:
    def test_sphere_example(self):
        p = sphere_point(1.0, 0.0, 0.0)
        t = tangent_project(p, np.array([5.0, 1.0, 0.0]))
        assert np.allclose(t.vec, [0.0, 1.0, 0.0], atol=1e-12)

    def test_stiefel_kills_radial(self):
        p = Point(stiefel(2, 1), np.array([[1.0], [0.0]]))
        t = tangent_project(p, np.array([[3.0], [2.0]]))
        assert np.allclose(t.vec, [[0.0], [2.0]], atol=1e-12)

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        p = sphere_point(0.0, 0.6, 0.8)
        z = rng.standard_normal(3)
        once = tangent_project(p, z)
        twice = tangent_project(p, once.vec)
        assert np.allclose(once.vec, twice.vec, atol=1e-14)

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_invariants_hold_after_projection(self, seed):
        rng = np.random.default_rng(seed)
        m = stiefel(4, 2)
        from sharpmin.stiefel import random_stiefel

        p = Point(m, random_stiefel(4, 2, rng))
        z = 10.0 ** rng.uniform(-3, 3) * rng.standard_normal((4, 2))
        t = tangent_project(p, z)  # Tangent constructor re-checks the invariant
        assert t.base is p


class TestRetract:
    def test_zero_step(self):
        p = Point(stiefel(3, 2), np.eye(3)[:, :2])
        r = retract(p, Tangent(p, np.zeros((3, 2))))
        assert np.allclose(r.coords, p.coords, atol=1e-12)

    def test_sphere_first_order(self):
        # oracle: |retract - exp| for the unit circle is t^3/3 + O(t^4) <= t^2
        p = sphere_point(1.0, 0.0)
        for t in (1e-1, 1e-2, 1e-3, 1e-4):
            v = Tangent(p, np.array([0.0, t]))
            r = retract(p, v)
            e = exp_map(p, v)
            expected = np.array([1.0, t]) / math.sqrt(1 + t * t)
            assert np.allclose(r.coords, expected, atol=1e-14)
            dev = np.linalg.norm(r.coords - e.coords)
            assert dev <= t * t
            assert dev / t**2 <= 0.5  # bounded ratio across the grid

    def test_stiefel_feasibility(self):
        p = Point(stiefel(2, 2), np.eye(2))
        x = np.array([[0.0, 0.01], [-0.01, 0.0]])
        r = retract(p, Tangent(p, x))
        assert np.linalg.norm(r.coords.T @ r.coords - np.eye(2)) <= 1e-12

    def test_post_retraction_feasibility_seeded(self):
        rng = np.random.default_rng(3)
        from sharpmin.stiefel import random_stiefel

        m = stiefel(5, 3)
        for _ in range(50):
            p = Point(m, random_stiefel(5, 3, rng))
            t = tangent_project(p, rng.standard_normal((5, 3)))
            r = retract(p, Tangent(p, 0.3 * t.vec))
            assert r.feasibility_residual() <= 1e-10


class TestCurvature:
    def test_values(self):
        assert curvature_norm(euclidean(5)) == 0.0
        # constant-curvature identity: max of R over unit frames is 1/rho^2
        assert curvature_norm(sphere(3, 1.0)) == 1.0
        assert curvature_norm(sphere(3, 2.0)) == 0.25

    def test_stiefel_refused(self):
        with pytest.raises(GeometryError):
            curvature_norm(stiefel(3, 2))


class TestPointSetDistance:
    def test_member_gives_zero(self):
        p = sphere_point(1, 0, 0)
        assert point_set_distance(p, [p, sphere_point(0, 1, 0)]) == 0.0

    def test_min_over_set(self):
        q = sphere_point(1, 0, 0)
        s = [sphere_point(0, 1, 0), sphere_point(0, 0, 1)]
        assert point_set_distance(q, s) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_euclidean(self):
        m = euclidean(1)
        q = Point(m, np.array([0.0]))
        s = [Point(m, np.array([-1.0])), Point(m, np.array([2.0]))]
        assert point_set_distance(q, s) == 1.0

    def test_empty_set(self):
        with pytest.raises(GeometryError):
            point_set_distance(sphere_point(1, 0), [])


RADII = (0.4, 0.2, 0.1, 0.05)


class TestLocalDistanceLemma:
    def test_euclidean_control_exact(self):
        p = Point(euclidean(3), np.zeros(3))
        rep = verify_local_distance_lemma(p, geodesic_sphere_sampler(p), RADII,
                                          samples_per_radius=100, seed=0)
        assert max(rep.worst_ratio_deviation) <= 1e-12
        assert rep.coefficient_ok

    def test_sphere_order_two(self):
        p = Point(sphere(3, 1.0), np.array([0.0, 0.0, 1.0]))
        rep = verify_local_distance_lemma(p, geodesic_sphere_sampler(p), RADII,
                                          samples_per_radius=200, seed=0)
        assert abs(rep.fitted_order - 2.0) <= 0.3
        assert rep.fitted_coefficient <= (1.0 / 6.0) * 1.25
        assert rep.coefficient_ok
        # deviations shrink monotonically with r and stay below the exact
        # metric-distortion envelope 1 - sin(r)/r of the unit sphere
        for r, d in zip(rep.radii, rep.worst_ratio_deviation):
            assert d <= (1 - math.sin(r) / r) * (1 + 1e-9)
        devs = rep.worst_ratio_deviation
        assert all(b < a for a, b in zip(devs, devs[1:]))

    def test_few_radii_refused(self):
        p = Point(euclidean(2), np.zeros(2))
        with pytest.raises(GeometryError):
            verify_local_distance_lemma(p, geodesic_sphere_sampler(p), (0.2, 0.1), seed=0)

    def test_sampler_outside_ball_refused(self):
        p = Point(euclidean(2), np.zeros(2))

        def bad_sampler(r, rng):
            return [Point(euclidean(2), np.array([2 * r, 0.0]))]

        with pytest.raises(GeometryError):
            verify_local_distance_lemma(p, bad_sampler, RADII, seed=0)

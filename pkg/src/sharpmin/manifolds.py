"""Concrete finite-dimensional Riemannian manifolds with exact chart maps.

Three embedded manifolds are supported: Euclidean space R^n, the round sphere
of radius rho embedded in R^n, and the Stiefel manifold St(n, k) of n-by-k
matrices with orthonormal columns.  Euclidean spaces and spheres come with
closed-form exponential/logarithm maps, geodesic distances, and a known
curvature bound, which makes them usable as exact oracles.  St(n, k) has no
closed-form geodesic distance; here it carries a QR retraction and the ambient
(chordal) distance, a documented surrogate that lower-bounds the true geodesic
distance and is all the downstream clustering pipeline needs.

All types are immutable values; every operation is pure.  Sampling helpers
take an explicit seed or generator and never touch global RNG state, and the
local-distance verifier derives an independent substream per radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.random import Generator, SeedSequence, default_rng

FEASIBILITY_TOL = 1e-10   # on-manifold residual allowed for Point
TANGENCY_TOL = 1e-10      # relative tangency residual allowed for Tangent
INVERSION_TOL = 1e-8      # exp/log round-trip allowance
INJECTIVITY_GUARD = 0.99  # sphere log refuses beyond this fraction of pi*rho


class GeometryError(ValueError):
    """A geometric precondition failed (wrong manifold, chart domain, rank)."""


@dataclass(frozen=True)
class ManifoldDescriptor:
    """Identity of one of the supported manifolds.

    kind is one of ``euclidean``, ``sphere``, ``stiefel``.  ``n`` is the
    ambient vector dimension (euclidean/sphere) or the frame height (stiefel);
    ``k`` is the frame width for stiefel; ``radius`` is the sphere radius.
    """

    kind: str
    n: int
    k: int = 0
    radius: float = 0.0

    def __post_init__(self):
        if self.kind == "euclidean":
            if self.n < 1:
                raise GeometryError(f"euclidean dimension must be >= 1, got {self.n}")
        elif self.kind == "sphere":
            if self.n < 2:
                raise GeometryError(f"sphere ambient dimension must be >= 2, got {self.n}")
            if not self.radius > 0:
                raise GeometryError(f"sphere radius must be positive, got {self.radius}")
        elif self.kind == "stiefel":
            if not 0 < self.k <= self.n:
                raise GeometryError(f"stiefel needs 0 < k <= n, got n={self.n}, k={self.k}")
        else:
            raise GeometryError(f"unknown manifold kind {self.kind!r}")

    @property
    def ambient_dim(self) -> int:
        return self.n * self.k if self.kind == "stiefel" else self.n

    @property
    def intrinsic_dim(self) -> int:
        if self.kind == "euclidean":
            return self.n
        if self.kind == "sphere":
            return self.n - 1
        return self.n * self.k - self.k * (self.k + 1) // 2

    @property
    def ambient_shape(self) -> tuple:
        return (self.n, self.k) if self.kind == "stiefel" else (self.n,)

    @property
    def injectivity_radius(self) -> float:
        if self.kind == "euclidean":
            return math.inf
        if self.kind == "sphere":
            return math.pi * self.radius
        raise GeometryError("stiefel has no exact exponential chart here; use retract")

    def __str__(self):
        if self.kind == "sphere":
            return f"sphere({self.n}, radius={self.radius})"
        if self.kind == "stiefel":
            return f"stiefel({self.n}, {self.k})"
        return f"euclidean({self.n})"


def euclidean(n: int) -> ManifoldDescriptor:
    return ManifoldDescriptor("euclidean", n)


def sphere(n: int, radius: float = 1.0) -> ManifoldDescriptor:
    return ManifoldDescriptor("sphere", n, radius=float(radius))


def stiefel(n: int, k: int) -> ManifoldDescriptor:
    return ManifoldDescriptor("stiefel", n, k=k)


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.flags.writeable = False
    return arr


def point_feasibility_residual(m: ManifoldDescriptor, coords: np.ndarray) -> float:
    """On-manifold residual: 0 for euclidean, |norm - rho| for spheres,
    ||U^T U - I||_F for stiefel."""
    if m.kind == "euclidean":
        return 0.0
    if m.kind == "sphere":
        return abs(float(np.linalg.norm(coords)) - m.radius)
    gram = coords.T @ coords
    return float(np.linalg.norm(gram - np.eye(m.k)))


@dataclass(frozen=True, eq=False)
class Point:
    """A point on a manifold, stored in ambient (embedded) coordinates."""

    manifold: ManifoldDescriptor
    coords: np.ndarray

    def __post_init__(self):
        coords = _readonly(self.coords)
        if coords.shape != self.manifold.ambient_shape:
            raise GeometryError(
                f"coords shape {coords.shape} does not match {self.manifold} "
                f"(expected {self.manifold.ambient_shape})"
            )
        object.__setattr__(self, "coords", coords)
        res = point_feasibility_residual(self.manifold, coords)
        if res > FEASIBILITY_TOL:
            raise GeometryError(f"point off {self.manifold}: residual {res:.3e}")

    def feasibility_residual(self) -> float:
        return point_feasibility_residual(self.manifold, self.coords)


def tangency_residual(p: Point, vec: np.ndarray) -> float:
    m = p.manifold
    if m.kind == "euclidean":
        return 0.0
    if m.kind == "sphere":
        return abs(float(np.dot(vec, p.coords))) / m.radius
    s = vec.T @ p.coords + p.coords.T @ vec
    return float(np.linalg.norm(s))


@dataclass(frozen=True, eq=False)
class Tangent:
    """A tangent vector at ``base``; covectors are identified with tangents
    through the embedded metric, so the same type serves both roles."""

    base: Point
    vec: np.ndarray

    def __post_init__(self):
        vec = _readonly(self.vec)
        if vec.shape != self.base.manifold.ambient_shape:
            raise GeometryError(f"tangent shape {vec.shape} does not match {self.base.manifold}")
        object.__setattr__(self, "vec", vec)
        nrm = float(np.linalg.norm(vec))
        res = tangency_residual(self.base, vec)
        if res > TANGENCY_TOL * max(nrm, 1e-30):
            raise GeometryError(
                f"vector not tangent at base (residual {res:.3e} vs norm {nrm:.3e})"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


def _same_manifold(p: Point, q: Point):
    if p.manifold != q.manifold:
        raise GeometryError(f"mismatched manifolds: {p.manifold} vs {q.manifold}")


def _same_base(p: Point, v: Tangent):
    if v.base.manifold != p.manifold or not np.array_equal(v.base.coords, p.coords):
        raise GeometryError("tangent vector is based at a different point")


def exp_map(p: Point, v: Tangent) -> Point:
    """Exact exponential map.  Euclidean: p + v.  Sphere: great-circle arc.

    St(n, k) is refused here (no closed form is implemented); use ``retract``.
    """
    _same_base(p, v)
    m = p.manifold
    if m.kind == "euclidean":
        return Point(m, p.coords + v.vec)
    if m.kind == "sphere":
        rho = m.radius
        nv = v.norm
        if nv == 0.0:
            return Point(m, p.coords)
        theta = nv / rho
        coords = math.cos(theta) * p.coords + (rho * math.sin(theta) / nv) * v.vec
        # renormalize to kill the O(eps) drift of the closed form
        coords = coords * (rho / np.linalg.norm(coords))
        return Point(m, coords)
    raise GeometryError(f"no exact exponential map for {m}; use retract")


def log_map(p: Point, q: Point) -> Tangent:
    """Inverse exponential chart.  Requires q inside the injectivity radius."""
    _same_manifold(p, q)
    m = p.manifold
    if m.kind == "euclidean":
        return Tangent(p, q.coords - p.coords)
    if m.kind == "sphere":
        rho = m.radius
        cos_t = float(np.dot(p.coords, q.coords)) / rho**2
        w = q.coords - (float(np.dot(q.coords, p.coords)) / rho**2) * p.coords
        nw = float(np.linalg.norm(w))
        theta = math.atan2(nw / rho, cos_t)
        if theta > INJECTIVITY_GUARD * math.pi:
            raise GeometryError(
                f"log undefined: points {theta / math.pi:.4f}*pi apart, "
                f"beyond the {INJECTIVITY_GUARD}*pi guard"
            )
        if nw == 0.0:
            return Tangent(p, np.zeros_like(p.coords))
        return Tangent(p, (rho * theta / nw) * w)
    raise GeometryError(f"no exact logarithm map for {m}")


def geodesic_distance(p: Point, q: Point) -> float:
    """Geodesic distance on euclidean/sphere; ambient chordal distance
    ||P - Q||_F on stiefel (a surrogate that lower-bounds the geodesic one)."""
    _same_manifold(p, q)
    m = p.manifold
    if m.kind == "euclidean":
        return float(np.linalg.norm(q.coords - p.coords))
    if m.kind == "sphere":
        rho = m.radius
        cos_t = float(np.dot(p.coords, q.coords)) / rho**2
        w = q.coords - (float(np.dot(q.coords, p.coords)) / rho**2) * p.coords
        return rho * math.atan2(float(np.linalg.norm(w)) / rho, cos_t)
    return float(np.linalg.norm(q.coords - p.coords))


def tangent_project(p: Point, z: np.ndarray) -> Tangent:
    """Orthogonal projection of an ambient vector onto the tangent space at p."""
    z = np.asarray(z, dtype=float)
    if z.shape != p.manifold.ambient_shape:
        raise GeometryError(f"ambient vector shape {z.shape} does not match {p.manifold}")
    m = p.manifold

    def _proj(w):
        if m.kind == "euclidean":
            return w
        if m.kind == "sphere":
            return w - (np.dot(w, p.coords) / m.radius**2) * p.coords
        s = p.coords.T @ w
        return w - p.coords @ ((s + s.T) / 2.0)

    # projecting twice scrubs the roundoff left when z has a large normal part
    return Tangent(p, _proj(_proj(z)))


def retract(p: Point, v: Tangent) -> Point:
    """First-order retraction: exact exp on euclidean, radial rescaling on the
    sphere, QR with a positive-diagonal sign convention on stiefel."""
    _same_base(p, v)
    m = p.manifold
    if m.kind == "euclidean":
        return Point(m, p.coords + v.vec)
    if m.kind == "sphere":
        w = p.coords + v.vec
        return Point(m, w * (m.radius / np.linalg.norm(w)))
    from .stiefel import qr_retract

    return Point(m, qr_retract(p.coords, v.vec))


def curvature_norm(m: ManifoldDescriptor) -> float:
    """Largest curvature value over orthonormal frames: 0 for euclidean,
    1/rho^2 for the sphere of radius rho.  Unknown for stiefel (refused)."""
    if m.kind == "euclidean":
        return 0.0
    if m.kind == "sphere":
        return 1.0 / m.radius**2
    raise GeometryError(f"unknown curvature bound for {m}")


def point_set_distance(q: Point, points: Sequence[Point]) -> float:
    """Distance from q to a finite set of points (min of pairwise distances)."""
    pts = list(points)
    if not pts:
        raise GeometryError("point_set_distance needs a nonempty set")
    return min(geodesic_distance(q, s) for s in pts)


def random_tangent(p: Point, rng: Generator, norm: float = 1.0) -> Tangent:
    """Seeded tangent direction of prescribed norm, uniform over directions."""
    for _ in range(64):
        z = rng.standard_normal(p.manifold.ambient_shape)
        t = tangent_project(p, z)
        if t.norm > 1e-12:
            return Tangent(p, (norm / t.norm) * t.vec)
    raise GeometryError("failed to sample a nondegenerate tangent direction")


def sample_chart_ball(p: Point, r: float, rng: Generator) -> Point:
    """Point of exp_p(B(0, r)), uniform in the chart ball (euclidean/sphere)."""
    d = p.manifold.intrinsic_dim
    radius = r * float(rng.uniform()) ** (1.0 / max(d, 1))
    if radius == 0.0:
        return Point(p.manifold, p.coords)
    return exp_map(p, random_tangent(p, rng, norm=radius))


@dataclass(frozen=True)
class LemmaReport:
    """Outcome of the local distance comparison between the manifold metric
    and the exponential-chart metric on shrinking balls.

    ``worst_ratio_deviation[i]`` is the largest sampled value of
    |dist(u; S_r) / dist(chart u; chart S_r) - 1| at radius ``radii[i]``.
    ``fitted_order`` is the log-log slope over the radii; ``fitted_coefficient``
    is the leading r^2 coefficient (geometric mean of deviation / r^2), which
    the curvature bound predicts to be at most curvature/6 up to higher order.
    """

    radii: tuple
    worst_ratio_deviation: tuple
    fitted_order: float
    fitted_coefficient: float
    target_coefficient: float
    coefficient_ok: bool

    def __post_init__(self):
        if any(d < 0 for d in self.worst_ratio_deviation):
            raise GeometryError("deviations must be nonnegative")
        if any(b >= a for a, b in zip(self.radii, self.radii[1:])):
            raise GeometryError("radii must be strictly decreasing")


_FLAT_DEVIATION = 1e-12  # below this the chart is treated as exact (flat case)


def verify_local_distance_lemma(
    p: Point,
    set_sampler: Callable[[float, Generator], Sequence[Point]],
    radii: Sequence[float],
    samples_per_radius: int = 200,
    seed: int = 0,
    coefficient_slack: float = 0.25,
) -> LemmaReport:
    """Compare set distances against their exponential-chart images.

    For each radius r, ``set_sampler(r, rng)`` must yield a finite subset of
    the target set intersected with B(p, r).  Test points are drawn uniformly
    from the chart ball of radius r; for each, the ratio of the manifold set
    distance to the chart set distance is measured.  The worst deviations are
    regressed on r in log-log scale and the r^2 coefficient is compared with
    curvature/6 inflated by ``coefficient_slack``.
    """
    m = p.manifold
    if m.kind not in ("euclidean", "sphere"):
        raise GeometryError(f"exact distance oracle unavailable on {m}")
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise GeometryError("need at least 3 radii for the order fit")
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise GeometryError("radii must be strictly decreasing")
    if radii[0] >= INJECTIVITY_GUARD * m.injectivity_radius:
        raise GeometryError("largest radius exceeds the injectivity guard")

    deviations = []
    for r, ss in zip(radii, SeedSequence(seed).spawn(len(radii))):
        rng = default_rng(ss)
        omega = list(set_sampler(r, rng))
        if not omega:
            raise GeometryError(f"set sampler returned no points at r={r}")
        chart_set = []
        for s in omega:
            if geodesic_distance(p, s) > r * (1.0 + 1e-9):
                raise GeometryError(f"sampler produced a point outside B(p, {r})")
            chart_set.append(log_map(p, s).vec)
        worst = 0.0
        for _ in range(samples_per_radius):
            u = sample_chart_ball(p, r, rng)
            chart_u = log_map(p, u).vec
            chart_dist = min(float(np.linalg.norm(chart_u - w)) for w in chart_set)
            if chart_dist < 1e-14:
                continue  # test point collided with a set point
            manifold_dist = point_set_distance(u, omega)
            worst = max(worst, abs(manifold_dist / chart_dist - 1.0))
        deviations.append(worst)

    target = curvature_norm(m) / 6.0
    if all(d <= _FLAT_DEVIATION for d in deviations):
        order, coefficient = float("nan"), float("nan")
        ok = True
    else:
        logs_r = np.log(radii)
        logs_d = np.log(np.maximum(deviations, 1e-300))
        order = float(np.polyfit(logs_r, logs_d, 1)[0])
        coefficient = float(np.exp(np.mean(logs_d - 2.0 * logs_r)))
        ok = coefficient <= (1.0 + coefficient_slack) * target + 1e-15
    return LemmaReport(
        radii=tuple(radii),
        worst_ratio_deviation=tuple(deviations),
        fitted_order=order,
        fitted_coefficient=coefficient,
        target_coefficient=target,
        coefficient_ok=ok,
    )


def geodesic_sphere_sampler(
    p: Point, n_points: int = 16
) -> Callable[[float, Generator], list]:
    """Sampler yielding points at geodesic distance exactly r from p, at
    seeded angles in a fixed tangent 2-plane.  Standard fixture for the
    local-distance verifier."""

    def sampler(r: float, rng: Generator) -> list:
        basis = _tangent_plane_basis(p, rng)
        angles = np.linspace(0.0, 2.0 * math.pi, n_points, endpoint=False)
        angles = angles + rng.uniform(0.0, 2.0 * math.pi / n_points)
        out = []
        for a in angles:
            direction = math.cos(a) * basis[0] + math.sin(a) * basis[1]
            out.append(exp_map(p, Tangent(p, r * direction)))
        return out

    return sampler


def _tangent_plane_basis(p: Point, rng: Generator):
    u = random_tangent(p, rng).vec
    for _ in range(64):
        w = random_tangent(p, rng).vec
        w = w - np.dot(w, u) * u
        nw = float(np.linalg.norm(w))
        if nw > 1e-8:
            return u, w / nw
    raise GeometryError("could not build a tangent 2-plane (dimension too small?)")

"""Weak-sharp-minima verification: sampled sharpness checks, modulus
estimation, and primal/dual necessary-condition checkers.

A solution set is weakly sharp for a problem when the objective grows at
least linearly in the distance to the set, with some modulus alpha > 0.
Exact set distances are often unavailable, so every check here runs against a
distance *bracket* [lb, ub] and verdicts are three-valued (pass_strong /
pass_weak / violated) to stay honest about the bracket width.  The
necessary-condition checkers are refutation-oriented: they can certify
failure of sharpness through a concrete witness, but only ever report
consistency otherwise; sufficiency is never claimed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.random import default_rng

from .manifolds import GeometryError, Point, Tangent, geodesic_distance
from .cones import (
    DEFAULT_SCHEDULE,
    Schedule,
    contingent_cone_distance,
    contingent_derivative,
    frechet_subdiff_refute,
)

VIOLATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WsmInstance:
    """One sharpness-verification problem.

    ``feasible_sampler(count, rng)`` yields feasible points; ``bracket(u)``
    returns (lb, ub) enclosing dist(u; solution set); ``point`` is a reference
    solution where f attains its minimum; ``radius`` restricts the check to a
    ball around it (math.inf for a global check).  When ``solution_sampler``
    is given, the reference-minimality of ``point`` is spot-checked against
    sampled solution-set points before any verdict is issued.
    """

    f: Callable[[Point], float]
    feasible_sampler: Callable[[int, np.random.Generator], Sequence[Point]]
    bracket: Callable[[Point], tuple]
    point: Point
    alpha: float
    radius: float = math.inf
    solution_sampler: Callable[[int, np.random.Generator], Sequence[Point]] | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise GeometryError(f"modulus must be positive, got {self.alpha}")

    def check_reference(self, n_samples: int = 32, seed: int = 0, tol: float = 1e-9):
        if self.solution_sampler is None:
            return
        rng = default_rng(seed)
        f0 = float(self.f(self.point))
        for s in self.solution_sampler(n_samples, rng):
            if float(self.f(s)) < f0 - tol:
                raise GeometryError(
                    "reference point is not minimal over sampled solution set")


@dataclass(frozen=True, eq=False)
class WsmVerdict:
    """Outcome of a sampled sharpness check.

    ``pass_strong``: the inequality held against the upper bracket end at
    every sample.  ``pass_weak``: it held against the lower end everywhere
    but only against the lower end somewhere.  ``violated``: a witness sample
    broke the inequality even against the lower end (a sound violation, since
    the true distance is at least lb)."""

    status: str  # pass_strong | pass_weak | violated
    witness: tuple | None  # (coords, f(u), lb, ub)
    estimated_modulus: float
    n_samples: int

    def __post_init__(self):
        if self.status not in ("pass_strong", "pass_weak", "violated"):
            raise GeometryError(f"bad status {self.status!r}")
        if self.status == "violated" and self.witness is None:
            raise GeometryError("violated verdict requires a witness")


def verify_wsm_sampled(inst: WsmInstance, n_samples: int, seed: int = 0,
                       tol: float = VIOLATION_TOL) -> WsmVerdict:
    """Sample feasible points and check f(u) >= f(p) + alpha * dist(u; set)
    against the distance bracket."""
    if n_samples < 1:
        raise GeometryError("need at least one sample")
    inst.check_reference(seed=seed)
    rng = default_rng(seed)
    f0 = float(inst.f(inst.point))
    strong = True
    witness = None
    modulus = math.inf
    checked = 0
    for u in inst.feasible_sampler(n_samples, rng):
        if inst.radius < math.inf and geodesic_distance(u, inst.point) > inst.radius:
            continue
        fu = float(inst.f(u))
        if not math.isfinite(fu):
            raise GeometryError("objective not finite at a feasible sample")
        lb, ub = inst.bracket(u)
        if lb > ub + 1e-12:
            raise GeometryError(f"bracket inverted: lb={lb} > ub={ub}")
        checked += 1
        gain = fu - f0
        if ub > 0 and math.isfinite(ub):
            modulus = min(modulus, gain / ub)
        if witness is None and gain < inst.alpha * lb - tol:
            witness = (np.array(u.coords), fu, lb, ub)
        if gain < inst.alpha * ub - tol:
            strong = False
    if witness is not None:
        return WsmVerdict("violated", witness, modulus, checked)
    status = "pass_strong" if strong else "pass_weak"
    return WsmVerdict(status, None, modulus, checked)


def estimate_modulus(
    f: Callable[[Point], float],
    feasible_sampler: Callable[[int, np.random.Generator], Sequence[Point]],
    bracket: Callable[[Point], tuple],
    n_samples: int,
    seed: int = 0,
    f_min: float = 0.0,
) -> float:
    """Infimum over samples of (f(u) - f_min) / ub(u), skipping points inside
    the set (ub = 0).  Using the upper bracket end makes this a conservative
    estimate of the best modulus valid on the sampled region."""
    rng = default_rng(seed)
    est = math.inf
    outside = 0
    for u in feasible_sampler(n_samples, rng):
        lb, ub = bracket(u)
        if ub <= 0 or not math.isfinite(ub):
            continue  # inside the set, or unbracketed
        outside += 1
        est = min(est, (float(f(u)) - f_min) / ub)
    if outside == 0:
        raise GeometryError("all samples landed inside the solution set")
    return est


@dataclass(frozen=True, eq=False)
class NcVerdict:
    """Outcome of a necessary-condition check ('primal', 'dual', or
    'difference').  ``passed`` means no violation was found; a failure
    always carries the witnessing item."""

    kind: str
    passed: bool
    checked: int
    failures: tuple

    @property
    def witness(self):
        return self.failures[0] if self.failures else None


def check_primal_nc(
    f: Callable[[Point], float],
    omega_sampler,
    p: Point,
    alpha: float,
    directions: Sequence[np.ndarray],
    schedule: Schedule = DEFAULT_SCHEDULE,
    seed: int = 0,
    tol: float = 5e-2,
) -> NcVerdict:
    """Directional necessary condition for a sharp solution set: along every
    tangent direction the lower directional derivative of f must dominate
    alpha times the distance to the contingent cone of the set."""
    directions = [np.asarray(vec, dtype=float) for vec in directions]
    failures = []
    for i, vec in enumerate(directions):
        v = Tangent(p, vec)
        lhs = contingent_derivative(f, p, v, schedule, seed=seed + 11 * i)
        rhs = contingent_cone_distance(omega_sampler, p, v, schedule, seed=seed + 11 * i + 5)
        if lhs < alpha * rhs - tol:
            failures.append((vec, lhs, rhs))
    return NcVerdict("primal", not failures, len(directions), tuple(failures))


def check_dual_nc(
    f: Callable[[Point], float],
    cone,
    p: Point,
    alpha: float = 1.0,
    n_cone_samples: int = 40,
    seed: int = 0,
    schedule: Schedule = DEFAULT_SCHEDULE,
) -> NcVerdict:
    """Dual necessary condition: every covector in the normal cone capped at
    norm alpha must survive the subdifferential refuter on f.  The sampler
    covers the extreme rays of the cone first (the places a sharpness claim
    fails first) and fills up with random members scaled into the alpha-ball."""
    rng = default_rng(seed)
    candidates = [alpha * r for r in cone.extreme_rays()]
    remaining = max(0, n_cone_samples - len(candidates))
    candidates.extend(cone.sample_members(rng, remaining, radius=alpha))
    if not candidates:
        raise GeometryError("cone description produced no candidate covectors")
    failures = []
    for x in candidates:
        verdict = frechet_subdiff_refute(f, p, Tangent(p, x), schedule,
                                         seed=int(rng.integers(2**31)))
        if verdict.refuted:
            failures.append(verdict.witness)
    return NcVerdict("dual", not failures, len(candidates), tuple(failures))


def check_difference_nc(
    grad_f1_at_p: np.ndarray,
    f2_subdiff_candidates: Sequence[np.ndarray],
    cone_residual: Callable[[np.ndarray], float],
    tol: float = 1e-8,
) -> NcVerdict:
    """Stationarity filter for difference-form objectives under a geometric
    constraint: each candidate covector x of the subtracted part must satisfy
    x in grad(f1)(p) + normal cone, i.e. the cone residual of x - grad must
    vanish.  A failing candidate certifies that p is not a local solution."""
    grad = np.asarray(grad_f1_at_p, dtype=float)
    failures = []
    checked = 0
    for x in f2_subdiff_candidates:
        checked += 1
        res = float(cone_residual(np.asarray(x, dtype=float) - grad))
        if res > tol:
            failures.append((np.asarray(x, dtype=float), res))
    return NcVerdict("difference", not failures, checked, tuple(failures))

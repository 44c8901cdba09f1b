"""Convex bodies in the unit cube, parallel-body volumes, and the Steiner
formula machinery, plus the quantitative sub-exponential bounds on the
binomial-kappa sum.

Geometry here is floating point; exact rational counting for discrepancy
witnesses lives in the discrepancy module.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError
from scipy.special import gammaln, logsumexp

from .errors import EmptyBodyError, ProjectionConvergenceError
from .montecarlo import McConfig, box_fraction, box_fractions_multi

MIN_MC_BUDGET = 10**4
DYKSTRA_TOL = 1e-10
DYKSTRA_MAX_ITER = 10**4
MAX_PROJECTION_FAILURE_RATE = 1e-4


# ---------------------------------------------------------------------------
# kappa_j and cube functionals
# ---------------------------------------------------------------------------

def kappa(j: int) -> float:
    """Volume of the j-dimensional Euclidean unit ball, pi^(j/2)/Gamma(1+j/2)."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    return math.exp(log_kappa(j))


def log_kappa(j: int) -> float:
    """log kappa_j, stable for j up to 1e7 and beyond."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    return 0.5 * j * math.log(math.pi) - math.lgamma(1 + 0.5 * j)


def cube_intrinsic_volume(d: int, j: int) -> int:
    """V_j of the unit cube: exactly binomial(d, j)."""
    if not 0 <= j <= d:
        raise ValueError("j out of range")
    return math.comb(d, j)


def cube_quermassintegral(d: int, j: int) -> float:
    """W_j of the unit cube via binom(d,j) W_j = kappa_j V_{d-j}: equals kappa_j."""
    if not 0 <= j <= d:
        raise ValueError("j out of range")
    return kappa(j) * cube_intrinsic_volume(d, d - j) / math.comb(d, j)


def box_quermassintegral(sides, j: int) -> float:
    """W_j of an axis box via binom(d,j) W_j = kappa_j V_{d-j}, with
    V_k(box) = e_k(sides)."""
    sides = np.asarray(sides, dtype=float)
    d = sides.shape[0]
    if not 0 <= j <= d:
        raise ValueError("j out of range")
    e = _elementary_symmetric(sides)
    return kappa(j) * e[d - j] / math.comb(d, j)


def binom_kappa_sum(d: int) -> float:
    """log of sum_{j=1}^d binom(d,j) kappa_j, evaluated in the log domain."""
    if d < 1:
        raise ValueError("d must be positive")
    j = np.arange(1, d + 1, dtype=float)
    log_terms = (
        gammaln(d + 1)
        - gammaln(j + 1)
        - gammaln(d - j + 1)
        + 0.5 * j * math.log(math.pi)
        - gammaln(1 + 0.5 * j)
    )
    return float(logsumexp(log_terms))


def remark_lower(d: int, delta: float) -> float:
    """log of the sub-exponential lower expression for the binomial-kappa sum."""
    if not 0 < delta < 2 / 3:
        raise ValueError("delta must lie in (0, 2/3)")
    if d < 1:
        raise ValueError("d must be positive")
    return -math.log(math.sqrt(2 * math.pi) * math.e * d) + delta * d ** (
        2 / 3 - delta
    ) * math.log(d)


def remark_upper(d: int, kappa_exp: float) -> float:
    """log of the upper expression (d sqrt(2 e^3 pi))^(kappa d^(2/3)),
    implied constant taken as 1."""
    if kappa_exp <= math.e * (2 * math.pi) ** (1 / 3):
        raise ValueError("kappa must exceed e (2 pi)^(1/3)")
    if d < 1:
        raise ValueError("d must be positive")
    return kappa_exp * d ** (2 / 3) * math.log(d * math.sqrt(2 * math.e**3 * math.pi))


# ---------------------------------------------------------------------------
# Volume estimates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int
    exact: bool

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "exact": self.exact,
        }

    @staticmethod
    def exact_value(v: float) -> "VolumeEstimate":
        return VolumeEstimate(v, 0.0, 0, 0, True)


@dataclass(frozen=True)
class OffsetSpec:
    rho: float
    side: str  # "outer" or "inner"

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be nonnegative")
        if self.side not in ("outer", "inner"):
            raise ValueError('side must be "outer" or "inner"')


# ---------------------------------------------------------------------------
# Convex bodies
# ---------------------------------------------------------------------------

class ConvexBody:
    """Common surface for the body variants; coordinates are floats."""

    variant: str
    dim: int

    def contains_many(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x) -> bool:
        return bool(self.contains_many(np.asarray(x, dtype=float)[None, :])[0])

    def dist_many(self, x: np.ndarray) -> np.ndarray:
        """Euclidean distance to the body (0 inside)."""
        raise NotImplementedError

    def dist_to_body(self, x) -> float:
        return float(self.dist_many(np.asarray(x, dtype=float)[None, :])[0])

    def complement_margin_many(self, x: np.ndarray) -> np.ndarray:
        """Distance to the complement (depth inside the body, 0 outside)."""
        raise NotImplementedError

    def dist_to_complement(self, x) -> float:
        return float(self.complement_margin_many(np.asarray(x, dtype=float)[None, :])[0])

    def project(self, x) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def volume_exact(self) -> float | None:
        """Closed-form volume when available, else None."""
        return None

    def to_json_dict(self) -> dict:
        raise NotImplementedError


class Ball(ConvexBody):
    variant = "ball"

    def __init__(self, center: Sequence[float], radius: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.dim = self.center.shape[0]
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if np.any(self.center - self.radius < -1e-12) or np.any(
            self.center + self.radius > 1 + 1e-12
        ):
            raise ValueError("ball is not contained in the unit cube")

    def contains_many(self, x):
        d = x - self.center
        return np.einsum("ij,ij->i", d, d) <= self.radius**2

    def dist_many(self, x):
        d = np.linalg.norm(x - self.center, axis=1) - self.radius
        return np.maximum(d, 0.0)

    def complement_margin_many(self, x):
        d = self.radius - np.linalg.norm(x - self.center, axis=1)
        return np.maximum(d, 0.0)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        v = x - self.center
        n = np.linalg.norm(v)
        if n <= self.radius:
            return x.copy()
        return self.center + v * (self.radius / n)

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def volume_exact(self):
        return kappa(self.dim) * self.radius**self.dim

    def to_json_dict(self):
        return {
            "variant": "ball",
            "center": self.center.tolist(),
            "radius": self.radius,
        }


class AxisBox(ConvexBody):
    variant = "axis_box"

    def __init__(self, lower: Sequence[float], upper: Sequence[float]):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.dim = self.lower.shape[0]
        if self.upper.shape != self.lower.shape:
            raise ValueError("lower/upper shape mismatch")
        if np.any(self.lower > self.upper):
            raise ValueError("lower exceeds upper")
        if np.any(self.lower < -1e-12) or np.any(self.upper > 1 + 1e-12):
            raise ValueError("box is not contained in the unit cube")

    @property
    def sides(self) -> np.ndarray:
        return self.upper - self.lower

    def contains_many(self, x):
        return np.all((x >= self.lower) & (x <= self.upper), axis=1)

    def dist_many(self, x):
        gap = np.maximum(np.maximum(self.lower - x, x - self.upper), 0.0)
        return np.linalg.norm(gap, axis=1)

    def complement_margin_many(self, x):
        depth = np.minimum(x - self.lower, self.upper - x).min(axis=1)
        return np.maximum(depth, 0.0)

    def project(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def bounding_box(self):
        return self.lower.copy(), self.upper.copy()

    def volume_exact(self):
        return float(np.prod(self.sides))

    def to_json_dict(self):
        return {
            "variant": "axis_box",
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
        }


def unit_cube(d: int) -> AxisBox:
    return AxisBox(np.zeros(d), np.ones(d))


class _FaceGeometry:
    """Vertices and (for d = 3) boundary edges of a polytope, used for exact
    exterior distances: the nearest point lies on a face, so the distance is
    the min over feasible facet projections, edge segments, and vertices."""

    def __init__(self, vertices: np.ndarray):
        self.vertices = vertices
        self.edges: np.ndarray | None = None
        d = vertices.shape[1]
        if d == 3 and vertices.shape[0] >= 4:
            hull = ConvexHull(vertices)
            pairs = set()
            for simplex in hull.simplices:
                for i in range(3):
                    a, b = simplex[i], simplex[(i + 1) % 3]
                    pairs.add((min(a, b), max(a, b)))
            idx = np.array(sorted(pairs))
            self.edges = vertices[idx]  # (n_edges, 2, d)

    def min_dist(self, x: np.ndarray) -> np.ndarray:
        v = self.vertices
        d2 = (
            np.einsum("ij,ij->i", x, x)[:, None]
            + np.einsum("ij,ij->i", v, v)[None, :]
            - 2.0 * x @ v.T
        )
        best = np.sqrt(np.maximum(d2.min(axis=1), 0.0))
        if self.edges is not None:
            a = self.edges[:, 0]
            ab = self.edges[:, 1] - a
            ab_sq = np.einsum("ij,ij->i", ab, ab)
            diff = x[:, None, :] - a[None, :, :]
            t = np.clip(np.einsum("nej,ej->ne", diff, ab) / ab_sq[None, :], 0.0, 1.0)
            proj = a[None, :, :] + t[:, :, None] * ab[None, :, :]
            e2 = ((x[:, None, :] - proj) ** 2).sum(axis=2)
            best = np.minimum(best, np.sqrt(np.maximum(e2.min(axis=1), 0.0)))
        return best


class HPolytope(ConvexBody):
    """Intersection of halfspaces a_i . x <= b_i (normals need not be unit)."""

    variant = "h_polytope"

    def __init__(self, normals, offsets, skip_checks: bool = False):
        self.normals = np.atleast_2d(np.asarray(normals, dtype=float))
        self.offsets = np.asarray(offsets, dtype=float)
        self.dim = self.normals.shape[1]
        norms = np.linalg.norm(self.normals, axis=1)
        if np.any(norms == 0):
            raise ValueError("zero normal vector")
        self._unit_normals = self.normals / norms[:, None]
        self._unit_offsets = self.offsets / norms
        self._face_geometry: _FaceGeometry | None = None
        if not skip_checks:
            self._check_nonempty_and_contained()

    def _check_nonempty_and_contained(self):
        d = self.dim
        # Chebyshev feasibility: empty iff the inradius LP is infeasible.
        res = linprog(
            c=np.r_[np.zeros(d), -1.0],
            A_ub=np.c_[self.normals, np.linalg.norm(self.normals, axis=1)],
            b_ub=self.offsets,
            bounds=[(None, None)] * d + [(0, None)],
            method="highs",
        )
        if res.status == 2:
            raise EmptyBodyError("H-polytope is empty")
        for i in range(d):
            # extreme of sign * x_i must stay within [0, 1]
            for sign, limit in ((1.0, 1.0), (-1.0, 0.0)):
                c = np.zeros(d)
                c[i] = -sign
                r = linprog(
                    c=c,
                    A_ub=self.normals,
                    b_ub=self.offsets,
                    bounds=[(None, None)] * d,
                    method="highs",
                )
                if r.status == 3:
                    raise ValueError("H-polytope is unbounded")
                if r.status == 0 and -r.fun > limit + 1e-9:
                    raise ValueError("H-polytope is not contained in the unit cube")

    def margins_many(self, x: np.ndarray) -> np.ndarray:
        """Signed distances to the facet planes; positive means violated."""
        return x @ self._unit_normals.T - self._unit_offsets

    def contains_many(self, x):
        return np.all(self.margins_many(x) <= 1e-12, axis=1)

    def dist_many(self, x):
        d, failures = self.dist_many_with_failures(x)
        if failures:
            raise ProjectionConvergenceError(
                f"{failures} projections failed to converge"
            )
        return d

    def dist_many_with_failures(self, x: np.ndarray) -> tuple[np.ndarray, int]:
        return self.dist_many_capped(x, math.inf)

    def dist_many_capped(self, x: np.ndarray, cap: float) -> tuple[np.ndarray, int]:
        """Distances, with values certainly above `cap` reported as +inf.

        The max facet margin lower-bounds the distance, so points with
        margin > cap skip projection entirely; points whose single-facet
        projection lands inside get their exact distance for free. For the
        edge/corner remainder the distance is exact face geometry in d <= 3
        (nearest point lies on a facet, edge, or vertex); d >= 4 falls back
        to Dykstra projection.
        """
        m = self.margins_many(x)
        mm = m.max(axis=1)
        out = np.maximum(mm, 0.0)
        over = mm > cap
        out[over] = np.inf
        idx = np.flatnonzero(~over & (mm > 1e-12))
        if idx.size == 0:
            return out, 0
        worst = np.argmax(m[idx], axis=1)
        proj = x[idx] - mm[idx, None] * self._unit_normals[worst]
        ok = self.contains_many(proj)
        hard = idx[~ok]
        if hard.size == 0:
            return out, 0
        if self.dim <= 3:
            out[hard] = self._exact_exterior_dist(x[hard], m[hard])
            return out, 0
        p, failed = self._dykstra(x[hard])
        out[hard] = np.linalg.norm(x[hard] - p, axis=1)
        return out, int(np.count_nonzero(failed))

    def _exact_exterior_dist(self, x: np.ndarray, margins: np.ndarray) -> np.ndarray:
        """Exact distance for exterior points: min over facet projections
        that land inside the body, boundary edges, and vertices."""
        best = self._faces().min_dist(x)
        for i in range(self._unit_normals.shape[0]):
            mask = margins[:, i] > 0
            if not np.any(mask):
                continue
            proj = x[mask] - margins[mask, i, None] * self._unit_normals[i]
            feas = np.all(self.margins_many(proj) <= 1e-10, axis=1)
            sel = np.flatnonzero(mask)[feas]
            best[sel] = np.minimum(best[sel], margins[sel, i])
        return best

    def _faces(self) -> _FaceGeometry:
        if self._face_geometry is None:
            interior = self._chebyshev_center()
            halfspaces = np.c_[self.normals, -self.offsets]
            hsi = HalfspaceIntersection(halfspaces, interior)
            self._face_geometry = _FaceGeometry(hsi.intersections)
        return self._face_geometry

    def set_known_vertices(self, vertices: np.ndarray) -> None:
        self._face_geometry = _FaceGeometry(np.asarray(vertices, dtype=float))

    def _chebyshev_center(self) -> np.ndarray:
        d = self.dim
        res = linprog(
            c=np.r_[np.zeros(d), -1.0],
            A_ub=np.c_[self.normals, np.linalg.norm(self.normals, axis=1)],
            b_ub=self.offsets,
            bounds=[(None, None)] * d + [(0, None)],
            method="highs",
        )
        if res.status != 0 or res.x is None:
            raise EmptyBodyError("Chebyshev-center LP failed")
        return res.x[:d]

    def _dykstra(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Dykstra's cyclic projection onto the halfspace intersection.

        Per-point convergence (feasible within tolerance and a full sweep
        moved less than tolerance) freezes finished points so stragglers do
        not drag the whole batch. Returns (projections, failed_mask)."""
        n_f = self._unit_normals.shape[0]
        n = x.shape[0]
        p_full = x.copy()
        failed = np.zeros(n, dtype=bool)
        active = np.arange(n)
        p = x.copy()
        corr = np.zeros((n_f, n, self.dim))
        for _ in range(DYKSTRA_MAX_ITER):
            prev = p.copy()
            for i in range(n_f):
                y = p + corr[i]
                viol = y @ self._unit_normals[i] - self._unit_offsets[i]
                np.maximum(viol, 0.0, out=viol)
                p = y - viol[:, None] * self._unit_normals[i]
                corr[i] = y - p
            feas = self.margins_many(p).max(axis=1)
            moved = np.linalg.norm(p - prev, axis=1)
            done = (feas <= DYKSTRA_TOL) & (moved <= DYKSTRA_TOL)
            if np.any(done):
                p_full[active[done]] = p[done]
                keep = ~done
                active = active[keep]
                if active.size == 0:
                    return p_full, failed
                p = p[keep]
                corr = corr[:, keep]
        p_full[active] = p
        failed[active] = self.margins_many(p).max(axis=1) > DYKSTRA_TOL
        return p_full, failed

    def complement_margin_many(self, x):
        depth = -self.margins_many(x).max(axis=1)
        return np.maximum(depth, 0.0)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        if self.contains(x):
            return x.copy()
        p, failed = self._dykstra(x[None, :])
        if failed[0]:
            raise ProjectionConvergenceError("projection failed to converge")
        return p[0]

    def bounding_box(self):
        d = self.dim
        lo = np.zeros(d)
        hi = np.zeros(d)
        for i in range(d):
            for sign, tgt in ((1.0, hi), (-1.0, lo)):
                c = np.zeros(d)
                c[i] = -sign
                r = linprog(
                    c=c,
                    A_ub=self.normals,
                    b_ub=self.offsets,
                    bounds=[(None, None)] * d,
                    method="highs",
                )
                if r.status != 0:
                    raise EmptyBodyError("bounding box LP failed")
                tgt[i] = sign * (-r.fun)
        return lo, hi

    def to_json_dict(self):
        return {
            "variant": "h_polytope",
            "normals": self.normals.tolist(),
            "offsets": self.offsets.tolist(),
        }


class VPolytope(ConvexBody):
    """Convex hull of a vertex list.

    Full-dimensional hulls convert to an internal H-form; the degenerate
    point and segment cases are handled directly (their inner offsets are
    empty and outer offsets reduce to plain distance).
    """

    variant = "v_polytope"

    def __init__(self, vertices):
        self.vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
        self.dim = self.vertices.shape[1]
        if self.vertices.shape[0] < 1:
            raise ValueError("vertex list is empty")
        if np.any(self.vertices < -1e-12) or np.any(self.vertices > 1 + 1e-12):
            raise ValueError("vertices are not contained in the unit cube")
        self._hform: HPolytope | None = None
        self._segment: tuple[np.ndarray, np.ndarray] | None = None
        uniq = np.unique(self.vertices, axis=0)
        if uniq.shape[0] == 1:
            self._kind = "point"
            self._point = uniq[0]
        else:
            try:
                hull = ConvexHull(self.vertices)
                # equations: A x + b <= 0 inside
                self._hform = HPolytope(
                    hull.equations[:, :-1], -hull.equations[:, -1], skip_checks=True
                )
                self._hform.set_known_vertices(self.vertices[hull.vertices])
                self._hull = hull
                self._kind = "full"
            except QhullError:
                span = uniq - uniq[0]
                if np.linalg.matrix_rank(span, tol=1e-9) == 1:
                    t = span @ span[-1]
                    self._segment = (uniq[np.argmin(t)], uniq[np.argmax(t)])
                    self._kind = "segment"
                else:
                    raise ValueError(
                        "degenerate V-polytope beyond point/segment is not supported"
                    )

    def contains_many(self, x):
        if self._kind == "full":
            return self._hform.contains_many(x)
        return self.dist_many(x) <= 1e-12

    def dist_many(self, x):
        if self._kind == "point":
            return np.linalg.norm(x - self._point, axis=1)
        if self._kind == "segment":
            a, b = self._segment
            ab = b - a
            t = np.clip((x - a) @ ab / (ab @ ab), 0.0, 1.0)
            return np.linalg.norm(x - (a + t[:, None] * ab), axis=1)
        return self._hform.dist_many(x)

    def dist_many_with_failures(self, x):
        if self._kind == "full":
            return self._hform.dist_many_with_failures(x)
        return self.dist_many(x), 0

    def dist_many_capped(self, x, cap):
        if self._kind == "full":
            return self._hform.dist_many_capped(x, cap)
        return self.dist_many(x), 0

    def complement_margin_many(self, x):
        if self._kind != "full":
            return np.zeros(x.shape[0])
        return self._hform.complement_margin_many(x)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        if self._kind == "point":
            return self._point.copy()
        if self._kind == "segment":
            a, b = self._segment
            ab = b - a
            t = float(np.clip((x - a) @ ab / (ab @ ab), 0.0, 1.0))
            return a + t * ab
        return self._hform.project(x)

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def volume_exact(self):
        if self._kind != "full":
            return 0.0
        return float(self._hull.volume)

    def hull_vertices(self) -> np.ndarray:
        """Hull vertices; for d=2 in counterclockwise boundary order."""
        if self._kind == "point":
            return self._point[None, :]
        if self._kind == "segment":
            return np.vstack(self._segment)
        if self.dim == 2:
            return self.vertices[self._hull.vertices]
        return self.vertices[np.unique(self._hull.vertices)]

    def perimeter_2d(self) -> float:
        if self.dim != 2 or self._kind != "full":
            raise ValueError("perimeter requires a full-dimensional 2-d polytope")
        v = self.hull_vertices()
        return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))

    def to_json_dict(self):
        return {"variant": "v_polytope", "vertices": self.vertices.tolist()}


def dist_to_body(x, body: ConvexBody) -> float:
    """Euclidean distance from x to the body (0 inside)."""
    return body.dist_to_body(x)


def dist_to_complement(x, body: ConvexBody) -> float:
    """Distance from x to the complement of the body (0 outside)."""
    return body.dist_to_complement(x)


def body_from_json_dict(data: dict) -> ConvexBody:
    variant = data["variant"]
    if variant == "ball":
        return Ball(data["center"], data["radius"])
    if variant == "axis_box":
        return AxisBox(data["lower"], data["upper"])
    if variant == "h_polytope":
        return HPolytope(data["normals"], data["offsets"])
    if variant == "v_polytope":
        return VPolytope(data["vertices"])
    raise ValueError(f"unknown body variant {variant!r}")


# ---------------------------------------------------------------------------
# Steiner formula and offsets
# ---------------------------------------------------------------------------

def _elementary_symmetric(values: Iterable[float]) -> list[float]:
    e = [1.0]
    for v in values:
        e = [e[0]] + [e[i] + v * e[i - 1] for i in range(1, len(e))] + [v * e[-1]]
    return e


def box_steiner_volume(sides: np.ndarray, rho: float) -> float:
    """Vol(box + rho B) = sum_j V_{d-j}(box) kappa_j rho^j with V_k = e_k(sides)."""
    d = sides.shape[0]
    e = _elementary_symmetric(sides)
    return sum(e[d - j] * kappa(j) * rho**j for j in range(d + 1))


def box_outer_offset_volume(sides: np.ndarray, rho: float) -> float:
    d = sides.shape[0]
    e = _elementary_symmetric(sides)
    return sum(e[d - j] * kappa(j) * rho**j for j in range(1, d + 1))


def _polygon_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def steiner_volume(
    body: ConvexBody, rho: float, mc: McConfig | None = None
) -> VolumeEstimate:
    """Vol(K + rho B) for bodies with known quermassintegrals.

    Exact for balls, axis boxes (any d), and full-dimensional 2-d polytopes
    (area + perimeter rho + pi rho^2). Other variants fall back to Monte
    Carlo with a warning.
    """
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    if isinstance(body, Ball):
        return VolumeEstimate.exact_value(
            kappa(body.dim) * (body.radius + rho) ** body.dim
        )
    if isinstance(body, AxisBox):
        return VolumeEstimate.exact_value(box_steiner_volume(body.sides, rho))
    if isinstance(body, VPolytope) and body.dim == 2 and body._kind == "full":
        v = body.hull_vertices()
        area = _polygon_area(v)
        return VolumeEstimate.exact_value(
            area + body.perimeter_2d() * rho + math.pi * rho**2
        )
    warnings.warn(
        f"no exact Steiner form for variant {body.variant!r}; Monte Carlo fallback",
        stacklevel=2,
    )
    cfg = mc or McConfig()
    lo, hi = body.bounding_box()
    failures = [0]

    def indicator(x):
        dist, fail = _dist_with_failures(body, x, cap=rho)
        failures[0] += fail
        return dist <= rho

    hits, n = box_fraction(lo - rho, hi + rho, indicator, cfg)
    _check_failures(failures[0], n)
    return _fraction_estimate(hits, n, lo - rho, hi + rho, cfg.seed)


def _fraction_estimate(hits, n, lo, hi, seed) -> VolumeEstimate:
    box_vol = float(np.prod(hi - lo))
    p = hits / n
    se = box_vol * math.sqrt(max(p * (1 - p), 0.0) / n)
    return VolumeEstimate(box_vol * p, se, n, seed, False)


def _dist_with_failures(
    body: ConvexBody, x: np.ndarray, cap: float = math.inf
) -> tuple[np.ndarray, int]:
    if isinstance(body, (HPolytope, VPolytope)):
        return body.dist_many_capped(x, cap)
    return body.dist_many(x), 0


def _check_failures(failures: int, n: int) -> None:
    if failures > MAX_PROJECTION_FAILURE_RATE * n:
        raise ProjectionConvergenceError(
            f"{failures} of {n} samples failed projection (> {MAX_PROJECTION_FAILURE_RATE:.2%})"
        )


def ball_offset_volume(ball: Ball, rho: float, side: str) -> float:
    r, d = ball.radius, ball.dim
    if side == "outer":
        return kappa(d) * ((r + rho) ** d - r**d)
    return kappa(d) * (r**d - max(r - rho, 0.0) ** d)


def box_offset_volume(box: AxisBox, rho: float, side: str) -> float:
    if side == "outer":
        return box_outer_offset_volume(box.sides, rho)
    inner = float(np.prod(np.maximum(box.sides - 2 * rho, 0.0)))
    return float(np.prod(box.sides)) - inner


def offset_volume(
    body: ConvexBody, spec: OffsetSpec, mc: McConfig | None = None
) -> VolumeEstimate:
    """Vol(K_rho^+) or Vol(K_rho^-): closed form for balls and axis boxes,
    Monte Carlo with binomial standard error otherwise."""
    est = offset_volumes(body, [spec.rho], spec.side, mc)[0]
    return est


def offset_volumes(
    body: ConvexBody, rhos: Sequence[float], side: str, mc: McConfig | None = None
) -> list[VolumeEstimate]:
    """offset_volume at several radii sharing one sampling stream.

    The sampling box is the bounding box inflated by max(rhos) for the outer
    side, so all radii are estimated from the same distance evaluations.
    """
    rhos = [float(r) for r in rhos]
    if any(r < 0 or r > 1 for r in rhos):
        raise ValueError("rho must lie in [0, 1]")
    if side not in ("outer", "inner"):
        raise ValueError('side must be "outer" or "inner"')
    if isinstance(body, Ball):
        return [VolumeEstimate.exact_value(ball_offset_volume(body, r, side)) for r in rhos]
    if isinstance(body, AxisBox):
        return [VolumeEstimate.exact_value(box_offset_volume(body, r, side)) for r in rhos]
    if isinstance(body, VPolytope) and body._kind != "full":
        if side == "inner":
            return [VolumeEstimate.exact_value(0.0) for _ in rhos]
        if body._kind == "point" and body.dim >= 1:
            return [
                VolumeEstimate.exact_value(kappa(body.dim) * r**body.dim) for r in rhos
            ]
    cfg = mc or McConfig()
    if cfg.n_samples < MIN_MC_BUDGET:
        raise ValueError(f"sample budget below {MIN_MC_BUDGET}")
    lo, hi = body.bounding_box()
    failures = [0]
    if side == "outer":
        rmax = max(rhos)

        def values(x):
            dist, fail = _dist_with_failures(body, x, cap=rmax)
            failures[0] += fail
            # exclude points of K itself (dist == 0 inside and on the boundary)
            dist[dist <= 0.0] = np.nan
            return dist

        lo, hi = lo - rmax, hi + rmax
    else:

        def values(x):
            inside = body.contains_many(x)
            margin = body.complement_margin_many(x)
            margin[~inside] = np.nan
            return margin

    counts, n = box_fractions_multi(lo, hi, values, np.array(rhos), cfg)
    _check_failures(failures[0], n)
    return [_fraction_estimate(int(c), n, lo, hi, cfg.seed) for c in counts]


def boundary_neighborhood_volume(
    body: ConvexBody, rho: float, mc: McConfig | None = None
) -> VolumeEstimate:
    """Vol{x in R^d : dist(x, boundary K) <= rho} = outer + inner offsets."""
    outer = offset_volume(body, OffsetSpec(rho, "outer"), mc)
    inner = offset_volume(body, OffsetSpec(rho, "inner"), mc)
    return VolumeEstimate(
        outer.value + inner.value,
        math.hypot(outer.std_error, inner.std_error),
        outer.n_samples + inner.n_samples,
        outer.seed if not outer.exact else inner.seed,
        outer.exact and inner.exact,
    )


def body_volume(body: ConvexBody, mc: McConfig | None = None) -> VolumeEstimate:
    exact = body.volume_exact()
    if exact is not None:
        return VolumeEstimate.exact_value(exact)
    cfg = mc or McConfig()
    lo, hi = body.bounding_box()
    hits, n = box_fraction(lo, hi, body.contains_many, cfg)
    return _fraction_estimate(hits, n, lo, hi, cfg.seed)


def inradius(body: ConvexBody) -> float:
    """Largest radius of a ball contained in the body."""
    if isinstance(body, Ball):
        return body.radius
    if isinstance(body, AxisBox):
        return float(np.min(body.sides)) / 2.0
    if isinstance(body, VPolytope):
        if body._kind != "full":
            return 0.0
        body = body._hform
    if isinstance(body, HPolytope):
        d = body.dim
        res = linprog(
            c=np.r_[np.zeros(d), -1.0],
            A_ub=np.c_[body.normals, np.linalg.norm(body.normals, axis=1)],
            b_ub=body.offsets,
            bounds=[(None, None)] * d + [(0, None)],
            method="highs",
        )
        if res.status == 2:
            raise EmptyBodyError("H-polytope is empty")
        if res.status != 0:
            raise RuntimeError(f"inradius LP failed with status {res.status}")
        return float(-res.fun)
    raise TypeError(f"unsupported body type {type(body).__name__}")


def parallel_body_volume(body: ConvexBody, rho: float) -> float:
    """v(rho) = Vol(K_rho) in closed form; rho may be negative (inner body).

    Supported for balls and axis boxes.
    """
    if isinstance(body, Ball):
        if rho < -body.radius:
            return 0.0
        return kappa(body.dim) * (body.radius + rho) ** body.dim
    if isinstance(body, AxisBox):
        if rho >= 0:
            return box_steiner_volume(body.sides, rho)
        return float(np.prod(np.maximum(body.sides + 2 * rho, 0.0)))
    raise TypeError("closed-form parallel volume needs a ball or an axis box")


def surface_area_parallel(body: ConvexBody, rho: float) -> float:
    """d W_1(K_rho): the derivative of the parallel-body volume at rho."""
    if isinstance(body, Ball):
        r = body.radius + rho
        if r < 0:
            return 0.0
        return body.dim * kappa(body.dim) * r ** (body.dim - 1)
    if isinstance(body, AxisBox):
        d = body.dim
        if rho >= 0:
            e = _elementary_symmetric(body.sides)
            return sum(j * e[d - j] * kappa(j) * rho ** (j - 1) for j in range(1, d + 1))
        shrunk = body.sides + 2 * rho
        if np.any(shrunk < 0):
            return 0.0
        total = 0.0
        for i in range(d):
            total += 2 * float(np.prod(np.delete(shrunk, i)))
        return total
    raise TypeError("closed-form surface area needs a ball or an axis box")


def parallel_volume_derivative_check(
    body: ConvexBody, rho: float, h: float
) -> tuple[float, float]:
    """(central finite difference of v at rho, analytic d W_1(K_rho))."""
    if h <= 0:
        raise ValueError("h must be positive")
    if rho - h <= -inradius(body):
        raise ValueError("rho - h must stay above -r(K)")
    fd = (parallel_body_volume(body, rho + h) - parallel_body_volume(body, rho - h)) / (
        2 * h
    )
    return fd, surface_area_parallel(body, rho)


# ---------------------------------------------------------------------------
# Random body corpus
# ---------------------------------------------------------------------------

def random_body(d: int, rng: np.random.Generator, kind: str | None = None) -> ConvexBody:
    """One random body inside the cube: ball, axis box, tangent H-polytope,
    or (d <= 3) a hull of random points."""
    kinds = ["ball", "box", "hpoly"] + (["hull"] if d <= 3 else [])
    kind = kind or kinds[int(rng.integers(len(kinds)))]
    if kind == "ball":
        r = float(rng.uniform(0.05, 0.2))
        c = rng.uniform(r, 1 - r, size=d)
        return Ball(c, r)
    if kind == "box":
        a = rng.uniform(0, 1, size=d)
        b = rng.uniform(0, 1, size=d)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        hi = np.maximum(hi, lo + 0.05)
        return AxisBox(lo, np.minimum(hi, 1.0))
    if kind == "hpoly":
        r = float(rng.uniform(0.08, 0.2))
        c = rng.uniform(r + 0.05, 1 - r - 0.05, size=d)
        k = 2 * d + int(rng.integers(2, 7))
        u = rng.normal(size=(k, d))
        u /= np.linalg.norm(u, axis=1)[:, None]
        normals = np.vstack([u, np.eye(d), -np.eye(d)])
        offsets = np.r_[u @ c + r, np.ones(d), np.zeros(d)]
        return HPolytope(normals, offsets)
    if kind == "hull":
        m = int(rng.integers(d + 2, 33))
        pts = rng.uniform(0.05, 0.95, size=(m, d))
        return VPolytope(pts)
    raise ValueError(f"unknown body kind {kind!r}")


def random_bodies(d: int, count: int, rng: np.random.Generator) -> list[ConvexBody]:
    kinds = ["ball", "box", "hpoly"] + (["hull"] if d <= 3 else [])
    out = []
    for i in range(count):
        out.append(random_body(d, rng, kinds[i % len(kinds)]))
    return out

"""Certified lower bounds for the isotropic discrepancy of lattice point
sets, and the d 2^(2(d+1)) sigma upper-bound verdict.

Witness families: empty dual slabs (exact), half-space cuts (exact),
2-d convex hulls (exact), and random balls (Monte Carlo volume, excluded
from certified verdicts). A certified witness value is a true lower bound
for the isotropic discrepancy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .convex import AxisBox, Ball, ConvexBody, HPolytope, VolumeEstimate, VPolytope
from .lattice import IntegrationLattice, LatticePointSet, enumerate_points
from .montecarlo import McConfig, box_fraction, chunk_rng
from .ratlin import Vec, as_vec, vec_dot
from .reduction import (
    SpectralReport,
    hyperplane_family,
    shortest_dual_vectors,
    spectral_test,
)

SNAP_DENOM = 1 << 20


# ---------------------------------------------------------------------------
# Exact half-space geometry
# ---------------------------------------------------------------------------

def _positive_form(a, b) -> tuple[list[Fraction], Fraction]:
    """Drop zero coefficients and flip negatives via x -> 1 - x."""
    a = [Fraction(x) for x in a]
    b = Fraction(b)
    pos = []
    for x in a:
        if x > 0:
            pos.append(x)
        elif x < 0:
            pos.append(-x)
            b += -x
    return pos, b


def halfspace_cube_volume(a, b) -> Fraction:
    """Vol({x in [0,1]^d : a.x <= b}) by inclusion-exclusion, exact.

    Zero coefficients factor out; negative ones are reflected. The closed
    form is sum over vertex subsets S of (-1)^|S| (b - a_S)_+^k / (k! prod a).
    """
    pos, b = _positive_form(a, b)
    k = len(pos)
    if k == 0:
        return Fraction(int(b >= 0))
    if b <= 0:
        return Fraction(0)
    if b >= sum(pos):
        return Fraction(1)
    sums = [(Fraction(0), 1)]
    for x in pos:
        sums = [(s, sgn) for s, sgn in sums] + [(s + x, -sgn) for s, sgn in sums]
    acc = Fraction(0)
    for s, sgn in sums:
        t = b - s
        if t > 0:
            acc += sgn * t**k
    denom = math.factorial(k)
    for x in pos:
        denom *= x
    return acc / denom


def halfspace_cube_volume_derivative(a, b) -> Fraction:
    """d/db of the half-space cube volume.

    Equals Vol_{d-1}({a.x = b} cap cube) / ||a||_2, so multiplying by ||a||
    gives the exact cross-section measure.
    """
    pos, b = _positive_form(a, b)
    k = len(pos)
    if k == 0 or b <= 0 or b >= sum(pos):
        return Fraction(0)
    sums = [(Fraction(0), 1)]
    for x in pos:
        sums = [(s, sgn) for s, sgn in sums] + [(s + x, -sgn) for s, sgn in sums]
    acc = Fraction(0)
    for s, sgn in sums:
        t = b - s
        if t > 0:
            acc += sgn * t ** (k - 1)
    denom = math.factorial(k - 1)
    for x in pos:
        denom *= x
    return acc / denom


# ---------------------------------------------------------------------------
# Exact counting
# ---------------------------------------------------------------------------

def count_points_halfspace(ps: LatticePointSet, a, b) -> int:
    a = as_vec(a)
    b = Fraction(b)
    return sum(1 for p in ps.points if vec_dot(a, p) <= b)


def count_points_slab(ps: LatticePointSet, h, lo, hi, closed: bool = True) -> int:
    """Points with lo <= h.x <= hi (or strict when closed=False), exact."""
    h = as_vec(h)
    lo, hi = Fraction(lo), Fraction(hi)
    n = 0
    for p in ps.points:
        v = vec_dot(h, p)
        if (lo <= v <= hi) if closed else (lo < v < hi):
            n += 1
    return n


def _point_in_convex_polygon(p: Vec, hull: list[Vec]) -> bool:
    """Closed membership in a counterclockwise convex polygon, exact."""
    m = len(hull)
    if m == 1:
        return p == hull[0]
    if m == 2:
        a, b = hull
        ab = (b[0] - a[0], b[1] - a[1])
        ap = (p[0] - a[0], p[1] - a[1])
        if ab[0] * ap[1] - ab[1] * ap[0] != 0:
            return False
        t = ap[0] * ab[0] + ap[1] * ab[1]
        return 0 <= t <= ab[0] ** 2 + ab[1] ** 2
    for i in range(m):
        a, b = hull[i], hull[(i + 1) % m]
        cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        if cross < 0:
            return False
    return True


def convex_hull_2d(points: list[Vec]) -> list[Vec]:
    """Andrew's monotone chain on exact rational points, counterclockwise."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list[Vec] = []
        for p in seq:
            while len(out) >= 2:
                o, q = out[-2], out[-1]
                if (q[0] - o[0]) * (p[1] - o[1]) - (q[1] - o[1]) * (p[0] - o[0]) <= 0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return lower[:-1] + upper[:-1]


def polygon_area_exact(hull: list[Vec]) -> Fraction:
    if len(hull) < 3:
        return Fraction(0)
    acc = Fraction(0)
    for i in range(len(hull)):
        a, b = hull[i], hull[(i + 1) % len(hull)]
        acc += a[0] * b[1] - a[1] * b[0]
    return abs(acc) / 2


def count_points(ps: LatticePointSet, body: ConvexBody) -> int:
    """Exact membership count for balls, boxes, H-polytopes, and 2-d hulls.

    Float parameters are dyadic rationals, so all comparisons are exact;
    membership is closed, matching closed witness bodies.
    """
    if isinstance(body, Ball):
        c = [Fraction(v) for v in body.center.tolist()]
        r2 = Fraction(body.radius) ** 2
        n = 0
        for p in ps.points:
            if sum((x - ci) ** 2 for x, ci in zip(p, c)) <= r2:
                n += 1
        return n
    if isinstance(body, HPolytope):
        rows = [[Fraction(v) for v in row] for row in body.normals.tolist()]
        offs = [Fraction(v) for v in body.offsets.tolist()]
        n = 0
        for p in ps.points:
            if all(
                sum(ai * xi for ai, xi in zip(row, p)) <= b
                for row, b in zip(rows, offs)
            ):
                n += 1
        return n
    if isinstance(body, AxisBox):
        lo = [Fraction(v) for v in body.lower.tolist()]
        hi = [Fraction(v) for v in body.upper.tolist()]
        return sum(
            1
            for p in ps.points
            if all(l <= x <= u for x, l, u in zip(p, lo, hi))
        )
    if isinstance(body, VPolytope) and body.dim == 2:
        hull = convex_hull_2d(
            [tuple(Fraction(v) for v in row) for row in body.vertices.tolist()]
        )
        return sum(1 for p in ps.points if _point_in_convex_polygon(p, hull))
    raise TypeError(f"exact counting not supported for {type(body).__name__}")


# ---------------------------------------------------------------------------
# Witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscrepancyWitness:
    body: ConvexBody
    inside_count: int
    volume: VolumeEstimate
    local_value: float
    family: str
    local_value_exact: Fraction | None = None

    @property
    def certified(self) -> bool:
        return self.volume.exact and self.local_value_exact is not None

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "body": self.body.to_json_dict(),
            "inside_count": self.inside_count,
            "volume": self.volume.to_json_dict(),
            "local_value": self.local_value,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class Thm1Report:
    lattice_id: str
    dim: int
    n_points: int
    sigma: float
    j_lower: float
    bound: float
    old_bound: float
    verdict: str
    slab_value: float
    slab_floor: float
    slab_floor_ok: bool
    best_family: str
    n_witnesses: int

    def to_json_dict(self) -> dict:
        return {
            "lattice_id": self.lattice_id,
            "d": self.dim,
            "N": self.n_points,
            "sigma": self.sigma,
            "j_lower": self.j_lower,
            "bound": self.bound,
            "old_bound": self.old_bound,
            "verdict": self.verdict,
            "slab_value": self.slab_value,
            "slab_floor": self.slab_floor,
            "slab_floor_ok": self.slab_floor_ok,
            "best_family": self.best_family,
            "n_witnesses": self.n_witnesses,
        }


def _slab_eps_functional(h: tuple[int, ...]) -> Fraction:
    """Rational upper bound of 1e-9 * ||h||: a Euclidean shrink of 1e-9."""
    hh = sum(x * x for x in h)
    return Fraction(math.isqrt(hh * 10**18) + 1, 10**18)


def _cube_slab_body(h: tuple[int, ...], lo: Fraction, hi: Fraction, d: int) -> HPolytope:
    normals = np.vstack([np.array(h, dtype=float), -np.array(h, dtype=float), np.eye(d), -np.eye(d)])
    offsets = np.r_[float(hi), -float(lo), np.ones(d), np.zeros(d)]
    return HPolytope(normals, offsets, skip_checks=True)


def slab_witness(
    lat: IntegrationLattice,
    h: tuple[int, ...] | None = None,
    points: LatticePointSet | None = None,
) -> DiscrepancyWitness:
    """The empty slab between adjacent covering hyperplanes of the dual
    vector h (shortest dual when omitted), shrunk by a Euclidean 1e-9 so the
    closed witness contains no lattice point; all values exact."""
    if h is None:
        h = shortest_dual_vectors(lat, 1)[0]
    ps = points if points is not None else enumerate_points(lat)
    fam = hyperplane_family(lat, h)
    eps = _slab_eps_functional(h)
    best_k = None
    best_vol = Fraction(-1)
    for k in range(fam.k_min, fam.k_max):
        vol = halfspace_cube_volume(h, k + 1 - eps) - halfspace_cube_volume(h, k + eps)
        if vol > best_vol:
            best_vol, best_k = vol, k
    if best_k is None or best_vol <= 0:
        raise AssertionError("no slab with positive cube intersection")
    lo, hi = best_k + eps, best_k + 1 - eps
    inside = count_points_slab(ps, h, lo, hi)
    if inside != 0:
        raise AssertionError("slab witness contains lattice points; dual vector invalid")
    body = _cube_slab_body(h, lo, hi, lat.dim)
    return DiscrepancyWitness(
        body=body,
        inside_count=0,
        volume=VolumeEstimate.exact_value(float(best_vol)),
        local_value=float(best_vol),
        family="dual-slab",
        local_value_exact=best_vol,
    )


def _snap(x: float) -> Fraction:
    return Fraction(round(x * SNAP_DENOM), SNAP_DENOM)


def _snap_unit(x: float) -> Fraction:
    """Snap into the dyadic grid, clamped to [0, 1] (rounding may overshoot)."""
    return min(max(_snap(x), Fraction(0)), Fraction(1))


def _halfspace_witness(
    ps: LatticePointSet, rng: np.random.Generator, pts_float: np.ndarray
) -> DiscrepancyWitness:
    """Best |count/N - volume| over thresholds of one random direction.

    Float screening picks the candidate; the returned value is re-certified
    in exact rational arithmetic (volume, count, and tie handling).
    """
    d = ps.dim
    n = ps.n
    while True:
        a_f = rng.normal(size=d)
        if np.linalg.norm(a_f) > 1e-9:
            break
    a_f /= np.linalg.norm(a_f)
    a = [_snap(v) for v in a_f]
    if not any(a):
        a[0] = Fraction(1)
    a_float = np.array([float(v) for v in a])
    proj = pts_float @ a_float
    order = np.argsort(proj, kind="stable")
    ts = proj[order]
    vols = _halfspace_volume_float(a_float, ts)
    cnt_le = np.searchsorted(ts, ts, side="right")
    cnt_lt = np.searchsorted(ts, ts, side="left")
    cand_close = np.abs(cnt_le / n - vols)
    cand_open = np.abs(cnt_lt / n - vols)
    j_closed = int(np.argmax(cand_close))
    j_open = int(np.argmax(cand_open))
    use_open = cand_open[j_open] > cand_close[j_closed]
    j = j_open if use_open else j_closed
    point_idx = int(order[j])
    b_exact = vec_dot(as_vec(a), ps.points[point_idx])
    if use_open:
        b_exact -= Fraction(1, 1 << 40)
    vol = halfspace_cube_volume(a, b_exact)
    count = _certified_halfspace_count(ps, a, b_exact, proj, float(b_exact))
    local = abs(Fraction(count, n) - vol)
    body = _cube_halfspace_body(a, b_exact, d)
    return DiscrepancyWitness(
        body=body,
        inside_count=count,
        volume=VolumeEstimate.exact_value(float(vol)),
        local_value=float(local),
        family="halfspace",
        local_value_exact=local,
    )


def _halfspace_volume_float(a: np.ndarray, bs: np.ndarray) -> np.ndarray:
    """Float inclusion-exclusion volumes for many thresholds at once."""
    pos = np.abs(a[a != 0])
    shift = -a[a < 0].sum()
    k = pos.shape[0]
    if k == 0:
        return (bs >= 0).astype(float)
    subset_sums = np.zeros(1)
    signs = np.ones(1)
    for x in pos:
        subset_sums = np.r_[subset_sums, subset_sums + x]
        signs = np.r_[signs, -signs]
    t = (bs[:, None] + shift) - subset_sums[None, :]
    np.maximum(t, 0.0, out=t)
    acc = (t**k * signs[None, :]).sum(axis=1)
    denom = math.factorial(k) * float(np.prod(pos))
    return np.clip(acc / denom, 0.0, 1.0)


def _certified_halfspace_count(
    ps: LatticePointSet, a: list[Fraction], b: Fraction, proj: np.ndarray, b_f: float
) -> int:
    """Exact count of a.p <= b, comparing in rationals only near the cut."""
    window = 1e-9
    sure = int(np.count_nonzero(proj <= b_f - window))
    ambiguous = np.flatnonzero(np.abs(proj - b_f) < window)
    av = as_vec(a)
    for idx in ambiguous:
        if vec_dot(av, ps.points[int(idx)]) <= b:
            sure += 1
    return sure


def _cube_halfspace_body(a: list[Fraction], b: Fraction, d: int) -> HPolytope:
    normals = np.vstack([np.array([float(v) for v in a]), np.eye(d), -np.eye(d)])
    offsets = np.r_[float(b), np.ones(d), np.zeros(d)]
    return HPolytope(normals, offsets, skip_checks=True)


def _ball_witness(
    ps: LatticePointSet,
    rng: np.random.Generator,
    mc_samples: int,
    seed: int,
    index: int,
) -> DiscrepancyWitness:
    """Random ball inside the cube; exact count, Monte Carlo volume."""
    d = ps.dim
    r = float(rng.uniform(0.05, 0.45))
    c = rng.uniform(r, 1 - r, size=d)
    r_snap = max(float(_snap(r)), 1 / SNAP_DENOM)
    center = [
        min(max(float(_snap(v)), r_snap), 1.0 - r_snap) for v in c
    ]  # snapping may overshoot the containment margin
    ball = Ball(center, r_snap)
    count = count_points(ps, ball)
    cfg = McConfig(n_samples=mc_samples, seed=(seed << 20) ^ index)
    lo, hi = ball.bounding_box()
    hits, n = box_fraction(lo, hi, ball.contains_many, cfg)
    box_vol = float(np.prod(hi - lo))
    p = hits / n
    vol = VolumeEstimate(
        box_vol * p, box_vol * math.sqrt(max(p * (1 - p), 0.0) / n), n, cfg.seed, False
    )
    return DiscrepancyWitness(
        body=ball,
        inside_count=count,
        volume=vol,
        local_value=abs(count / ps.n - vol.value),
        family="ball",
        local_value_exact=None,
    )


def _hull_witness(ps: LatticePointSet, rng: np.random.Generator) -> DiscrepancyWitness:
    """2-d hull of random rational points: exact area and count."""
    m = int(rng.integers(3, 9))
    raw = rng.uniform(0, 1, size=(m, 2))
    pts = [tuple(_snap_unit(v) for v in row) for row in raw]
    hull = convex_hull_2d(pts)
    area = polygon_area_exact(hull)
    count = sum(1 for p in ps.points if _point_in_convex_polygon(p, hull))
    local = abs(Fraction(count, ps.n) - area)
    body = VPolytope([[float(x) for x in v] for v in hull] if len(hull) >= 3 else [[float(x) for x in v] for v in pts])
    return DiscrepancyWitness(
        body=body,
        inside_count=count,
        volume=VolumeEstimate.exact_value(float(area)),
        local_value=float(local),
        family="hull",
        local_value_exact=local,
    )


def isotropic_lower_bound(
    ps: LatticePointSet,
    budget: int,
    seed: int,
    n_slabs: int = 10,
    ball_mc_samples: int = 10**5,
) -> tuple[DiscrepancyWitness, list[DiscrepancyWitness]]:
    """Search for the best witness; the returned best is always certified.

    Candidate i draws from a stream keyed by (seed, i), so a larger budget
    extends (never reshuffles) the candidate list and the best value is
    monotone in the budget for a fixed seed.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    witnesses: list[DiscrepancyWitness] = []
    if ps.source is not None:
        for h in shortest_dual_vectors(ps.source, n_slabs):
            witnesses.append(slab_witness(ps.source, h, points=ps))
    pts_float = ps.as_array()
    for i in range(budget):
        rng = chunk_rng(seed, i)
        kind = i % 3
        if kind == 1:
            witnesses.append(_ball_witness(ps, rng, ball_mc_samples, seed, i))
        elif kind == 2 and ps.dim == 2:
            witnesses.append(_hull_witness(ps, rng))
        else:
            witnesses.append(_halfspace_witness(ps, rng, pts_float))
    certified = [w for w in witnesses if w.certified]
    best = max(
        certified,
        key=lambda w: (w.local_value_exact, w.family, w.inside_count),
    )
    return best, witnesses


def verify_thm1(
    lat: IntegrationLattice,
    budget: int = 12,
    seed: int = 0,
    lattice_id: str = "",
    report: SpectralReport | None = None,
    points: LatticePointSet | None = None,
) -> Thm1Report:
    """PASS iff the best certified lower bound respects min(1, d 2^(2(d+1)) sigma),
    and the slab witness stays above a fifth of its exact cross-section floor."""
    rep = report if report is not None else spectral_test(lat)
    ps = points if points is not None else enumerate_points(lat)
    best, witnesses = isotropic_lower_bound(ps, budget, seed)
    d = lat.dim
    nsq = rep.dual_norm_sq
    j = best.local_value_exact
    factor = d * 2 ** (2 * (d + 1))
    # j <= min(1, factor * sigma), decided in exact arithmetic
    ok_one = j <= 1
    ok_bound = j * j * nsq <= Fraction(factor) ** 2
    slab = next(w for w in witnesses if w.family == "dual-slab")
    h = rep.shortest_dual
    fam = hyperplane_family(lat, h)
    eps = _slab_eps_functional(h)
    best_k = max(
        range(fam.k_min, fam.k_max),
        key=lambda k: halfspace_cube_volume(h, k + 1 - eps)
        - halfspace_cube_volume(h, k + eps),
    )
    cross = halfspace_cube_volume_derivative(h, Fraction(2 * best_k + 1, 2))
    floor = Fraction(1, 5) * cross  # 0.2 * sigma * cross-section; sigma*CS = dV/db
    ok_slab = slab.local_value_exact >= floor and slab.local_value_exact > 0
    verdict = "PASS" if (ok_one and ok_bound) else "FAIL"
    return Thm1Report(
        lattice_id=lattice_id,
        dim=d,
        n_points=lat.n_points,
        sigma=rep.sigma,
        j_lower=float(j),
        bound=factor * rep.sigma,
        old_bound=d * d * 2**d * rep.sigma,
        verdict=verdict,
        slab_value=slab.local_value,
        slab_floor=float(floor),
        slab_floor_ok=bool(ok_slab),
        best_family=best.family,
        n_witnesses=len(witnesses),
    )

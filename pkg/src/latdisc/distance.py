"""Distance-function norms of lattice point sets, covering radii with
certified enclosures, slab-union volumes, the distance-vs-spectral-test
sandwich, and the Sobolev approximation-error proxy.

Distances are non-periodic (the plain Euclidean distance inside the cube);
a torus metric exists behind a flag but is never used in verification runs.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .discrepancy import halfspace_cube_volume
from .errors import RefinementBudgetExceeded
from .lattice import IntegrationLattice, LatticePointSet, enumerate_points
from .montecarlo import CHUNK_SIZE, McConfig, chunk_rng
from .reduction import SpectralReport, hyperplane_family, spectral_test

GammaValue = float  # finite positive real or math.inf


@dataclass(frozen=True)
class DistanceNormConfig:
    grid_resolution: int | None = None  # per-axis; None picks a default by dim
    mc_samples: int = 200_000
    seed: int = 0
    covering_tol: float = 1e-4
    max_evals: int = 4_000_000


def _default_resolution(d: int) -> int | None:
    if d <= 2:
        return 401
    if d == 3:
        return 101
    return None  # Monte Carlo beyond d = 3


@dataclass(frozen=True)
class CoveringRadius:
    lower: float
    upper: float
    witness: tuple[float, ...]
    n_evals: int
    converged: bool

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class DistanceNormReport:
    gamma: GammaValue
    value: float
    lower_certified: float
    upper_certified: float
    method: str  # closed-form-1d | grid | mc | covering
    resolution: int
    n_samples: int
    seed: int
    mc_value: float
    mc_std_error: float

    def to_json_dict(self) -> dict:
        return {
            "gamma": "inf" if math.isinf(self.gamma) else self.gamma,
            "value": self.value,
            "lower_certified": self.lower_certified,
            "upper_certified": self.upper_certified,
            "method": self.method,
            "resolution": self.resolution,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "mc_value": self.mc_value,
            "mc_std_error": self.mc_std_error,
        }


def dist_to_pointset(x, ps: LatticePointSet | np.ndarray, torus: bool = False) -> float:
    """Min Euclidean distance from x to the point set (non-periodic).

    torus=True measures against all integer translates instead; it exists
    for exploration only and is excluded from verification runs.
    """
    pts = ps.as_array() if isinstance(ps, LatticePointSet) else np.asarray(ps, float)
    if pts.size == 0:
        raise ValueError("empty point set")
    x = np.asarray(x, dtype=float)
    if torus:
        delta = np.abs(pts - x)
        delta = np.minimum(delta, 1.0 - delta)
        return float(np.min(np.linalg.norm(delta, axis=1)))
    return float(np.min(np.linalg.norm(pts - x, axis=1)))


def covering_radius(
    ps: LatticePointSet | np.ndarray,
    tol: float = 1e-4,
    max_evals: int = 4_000_000,
    raise_on_budget: bool = False,
) -> CoveringRadius:
    """Certified enclosure of sup_{y in cube} dist(y, P) by branch-and-bound.

    dist is 1-Lipschitz, so a cell of half-width h satisfies
    sup_cell <= dist(center) + h sqrt(d). Cells are split until the largest
    remaining cell potential is within tol of the best evaluated point.
    The sup over the closed cube equals the half-open sup by continuity.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    pts = ps.as_array() if isinstance(ps, LatticePointSet) else np.asarray(ps, float)
    tree = cKDTree(pts)
    d = pts.shape[1]
    sqrt_d = math.sqrt(d)

    corners = np.array(list(itertools.product((0.0, 1.0), repeat=d)))
    start = np.vstack([corners, np.full((1, d), 0.5)])
    vals = tree.query(start)[0]
    n_evals = len(start)
    best_idx = int(np.argmax(vals))
    lb = float(vals[best_idx])
    witness = tuple(start[best_idx])

    counter = itertools.count()
    heap: list[tuple[float, int, tuple, float]] = []
    root_ub = float(vals[-1]) + 0.5 * sqrt_d
    heapq.heappush(heap, (-root_ub, next(counter), tuple(np.full(d, 0.5)), 0.5))

    offsets = np.array(list(itertools.product((-1.0, 1.0), repeat=d)))
    batch = max(1, 1024 // (1 << d))
    while heap and -heap[0][0] > lb + tol and n_evals < max_evals:
        cells = []
        while heap and len(cells) < batch and -heap[0][0] > lb + tol:
            cells.append(heapq.heappop(heap))
        if not cells:
            break
        centers = np.array([c for _, _, c, _ in cells])
        halves = np.array([h for _, _, _, h in cells])
        child_half = halves / 2.0
        children = (
            centers[:, None, :] + offsets[None, :, :] * child_half[:, None, None]
        ).reshape(-1, d)
        child_halves = np.repeat(child_half, offsets.shape[0])
        cvals = tree.query(children)[0]
        n_evals += children.shape[0]
        top = int(np.argmax(cvals))
        if cvals[top] > lb:
            lb = float(cvals[top])
            witness = tuple(children[top])
        ubs = cvals + child_halves * sqrt_d
        for i in range(children.shape[0]):
            if ubs[i] > lb:
                heapq.heappush(
                    heap, (-float(ubs[i]), next(counter), tuple(children[i]), float(child_halves[i]))
                )
    ub = max(lb, -heap[0][0]) if heap else lb
    converged = ub - lb <= tol
    if not converged and raise_on_budget:
        raise RefinementBudgetExceeded(
            f"covering radius width {ub - lb:.3e} > tol {tol:.3e} after {n_evals} evals"
        )
    return CoveringRadius(lb, ub, witness, n_evals, converged)


# ---------------------------------------------------------------------------
# Distance norms
# ---------------------------------------------------------------------------

def _closed_form_1d_moment(xs: list[float], gamma: float) -> float:
    """Exact integral of dist(., P)^gamma on [0,1] for sorted 1-d points."""
    g1 = gamma + 1.0
    total = xs[0] ** g1 / g1  # left boundary cell
    for a, b in zip(xs, xs[1:]):
        half = (b - a) / 2.0
        total += 2.0 * half**g1 / g1
    total += (1.0 - xs[-1]) ** g1 / g1
    return total


def _grid_centers_chunks(d: int, m: int):
    """Yield cell-center chunks of the m^d midpoint grid."""
    step = 1.0 / m
    axis = (np.arange(m) + 0.5) * step
    if d == 1:
        yield axis[:, None]
        return
    rows_per_chunk = max(1, CHUNK_SIZE // (m ** (d - 1)))
    tail_shape = [m] * (d - 1)
    tail = np.stack(
        np.meshgrid(*([axis] * (d - 1)), indexing="ij"), axis=-1
    ).reshape(-1, d - 1)
    for start in range(0, m, rows_per_chunk):
        block = axis[start : start + rows_per_chunk]
        head = np.repeat(block, tail.shape[0])[:, None]
        body = np.tile(tail, (block.shape[0], 1))
        yield np.hstack([head, body])


def _grid_moments_multi(
    tree: cKDTree, d: int, m: int, gammas: list[float]
) -> dict[float, tuple[float, float]]:
    """(midpoint estimate, certified error bound) of the dist^gamma integral
    for each gamma, sharing one pass over the grid."""
    r = math.sqrt(d) / (2 * m)
    totals = {g: 0.0 for g in gammas}
    errs = {g: 0.0 for g in gammas}
    for centers in _grid_centers_chunks(d, m):
        dist = tree.query(centers)[0]
        for g in gammas:
            totals[g] += float(np.sum(dist**g))
            if g >= 1:
                dev = g * (dist + r) ** (g - 1) * r
            else:
                dev = np.full_like(dist, r**g)
                far = dist > r
                dev[far] = np.minimum(dev[far], g * (dist[far] - r) ** (g - 1) * r)
            errs[g] += float(np.sum(dev))
    n_cells = m**d
    return {g: (totals[g] / n_cells, errs[g] / n_cells) for g in gammas}


def _mc_moments_multi(
    tree: cKDTree, d: int, gammas: list[float], cfg: McConfig
) -> dict[float, tuple[float, float]]:
    """Monte Carlo mean and SE of dist^gamma for each gamma, one stream."""
    n = cfg.n_samples
    totals = {g: 0.0 for g in gammas}
    totals_sq = {g: 0.0 for g in gammas}
    n_chunks = (n + CHUNK_SIZE - 1) // CHUNK_SIZE
    for i in range(n_chunks):
        mlen = min(CHUNK_SIZE, n - i * CHUNK_SIZE)
        x = chunk_rng(cfg.seed, i).random((mlen, d))
        dist = tree.query(x)[0]
        for g in gammas:
            v = dist**g
            totals[g] += float(np.sum(v))
            totals_sq[g] += float(np.sum(v * v))
    out = {}
    for g in gammas:
        mean = totals[g] / n
        var = max(totals_sq[g] / n - mean * mean, 0.0)
        out[g] = (mean, (var / n) ** 0.5)
    return out


def distance_norms(
    ps: LatticePointSet,
    gammas,
    config: DistanceNormConfig | None = None,
) -> dict[GammaValue, DistanceNormReport]:
    """L_gamma norms of dist(., P) for several gammas, sharing the grid.

    gamma = inf delegates to the covering radius. For d <= 3 the primary
    value is a midpoint-rule tensor grid with a per-cell Lipschitz/Hoelder
    certificate, cross-checked by an independent Monte Carlo estimate; for
    d >= 4 the Monte Carlo estimate is primary (3 SE enclosure, method "mc").
    For d = 1 the piecewise integral is evaluated in closed form.
    """
    cfg = config or DistanceNormConfig()
    gammas = list(gammas)
    d = ps.dim
    pts = ps.as_array()
    tree = cKDTree(pts)
    out: dict[GammaValue, DistanceNormReport] = {}

    finite = [g for g in gammas if not math.isinf(g)]
    if any(g <= 0 for g in finite):
        raise ValueError("gamma must be positive")
    if math.inf in gammas or any(math.isinf(g) for g in gammas):
        cr = covering_radius(ps, tol=cfg.covering_tol, max_evals=cfg.max_evals)
        out[math.inf] = DistanceNormReport(
            gamma=math.inf,
            value=0.5 * (cr.lower + cr.upper),
            lower_certified=cr.lower,
            upper_certified=cr.upper,
            method="covering",
            resolution=0,
            n_samples=cr.n_evals,
            seed=cfg.seed,
            mc_value=cr.lower,
            mc_std_error=0.0,
        )

    if not finite:
        return out

    m = cfg.grid_resolution or _default_resolution(d)
    mc = _mc_moments_multi(tree, d, finite, McConfig(cfg.mc_samples, cfg.seed))
    grid = (
        _grid_moments_multi(tree, d, m, finite) if (d > 1 and m is not None) else None
    )
    for g in finite:
        mc_mean, mc_se = mc[g]
        mc_value = mc_mean ** (1.0 / g)
        if d == 1:
            xs = sorted(float(p[0]) for p in ps.points)
            moment = _closed_form_1d_moment(xs, g)
            slack = 1e-12 * max(moment, 1e-30)
            out[g] = DistanceNormReport(
                gamma=g,
                value=moment ** (1.0 / g),
                lower_certified=max(moment - slack, 0.0) ** (1.0 / g),
                upper_certified=(moment + slack) ** (1.0 / g),
                method="closed-form-1d",
                resolution=0,
                n_samples=cfg.mc_samples,
                seed=cfg.seed,
                mc_value=mc_value,
                mc_std_error=mc_se,
            )
        elif grid is not None:
            moment, bound = grid[g]
            out[g] = DistanceNormReport(
                gamma=g,
                value=moment ** (1.0 / g),
                lower_certified=max(moment - bound, 0.0) ** (1.0 / g),
                upper_certified=(moment + bound) ** (1.0 / g),
                method="grid",
                resolution=m,
                n_samples=cfg.mc_samples,
                seed=cfg.seed,
                mc_value=mc_value,
                mc_std_error=mc_se,
            )
        else:
            out[g] = DistanceNormReport(
                gamma=g,
                value=mc_value,
                lower_certified=max(mc_mean - 3 * mc_se, 0.0) ** (1.0 / g),
                upper_certified=(mc_mean + 3 * mc_se) ** (1.0 / g),
                method="mc",
                resolution=0,
                n_samples=cfg.mc_samples,
                seed=cfg.seed,
                mc_value=mc_value,
                mc_std_error=mc_se,
            )
    return out


def distance_norm(
    ps: LatticePointSet, gamma: GammaValue, config: DistanceNormConfig | None = None
) -> DistanceNormReport:
    return distance_norms(ps, [gamma], config)[
        math.inf if math.isinf(gamma) else gamma
    ]


# ---------------------------------------------------------------------------
# Slab unions and the lower-bound construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlabUnion:
    """Volumes of B_t (points within t sigma of some covering hyperplane)
    and its complement A_t, both exact rationals."""

    t: Fraction
    vol_bt: Fraction
    vol_at: Fraction
    per_plane: tuple[Fraction, ...]


def slab_union_volume(lat: IntegrationLattice, h, t) -> SlabUnion:
    """Exact Vol(B_t) = sum_k Vol({|h.x - k| < t} cap cube) for the shortest
    dual vector h. In functional units the slab around plane k is
    (k - t, k + t) because the plane spacing is exactly sigma = 1/||h||."""
    t = Fraction(t)
    if not 0 < t < Fraction(1, 2):
        raise ValueError("t must lie in (0, 1/2)")
    h = tuple(int(x) for x in h)
    rep = spectral_test(lat)
    if sum(x * x for x in h) != rep.dual_norm_sq:
        raise ValueError("h must be a shortest dual vector")
    fam = hyperplane_family(lat, h)
    per = []
    for k in range(fam.k_min, fam.k_max + 1):
        vol = halfspace_cube_volume(h, k + t) - halfspace_cube_volume(h, k - t)
        per.append(vol)
    total = sum(per, Fraction(0))
    return SlabUnion(t, total, 1 - total, tuple(per))


@dataclass(frozen=True)
class Prop1Report:
    lattice_id: str
    dim: int
    n_points: int
    sigma: float
    v_d: float
    t_d: float
    c_d: float
    vol_a_td: float
    vol_a_ok: bool
    vol_b_bound_ok: bool
    gammas: tuple[GammaValue, ...]
    norms: tuple[DistanceNormReport, ...]
    lower_bounds: tuple[float, ...]
    lower_ok: tuple[bool, ...]
    ratios: tuple[float, ...]
    ratio_inf: float

    def to_json_dict(self) -> dict:
        return {
            "lattice_id": self.lattice_id,
            "d": self.dim,
            "N": self.n_points,
            "sigma": self.sigma,
            "v_d": self.v_d,
            "t_d": self.t_d,
            "c_d": self.c_d,
            "vol_a_td": self.vol_a_td,
            "vol_a_ok": self.vol_a_ok,
            "vol_b_bound_ok": self.vol_b_bound_ok,
            "gammas": ["inf" if math.isinf(g) else g for g in self.gammas],
            "norms": [r.to_json_dict() for r in self.norms],
            "lower_bounds": list(self.lower_bounds),
            "lower_ok": list(self.lower_ok),
            "ratios": list(self.ratios),
            "ratio_inf": self.ratio_inf,
        }


def hyperplane_section_constant(d: int) -> float:
    """v_d: the maximal (d-1)-volume of a hyperplane section of the cube.

    v_1 = 1 (a point); v_d = sqrt(2) for d >= 2 (diagonal section)."""
    return 1.0 if d == 1 else math.sqrt(2.0)


def verify_prop1(
    lat: IntegrationLattice,
    gammas=(0.5, 1.0, 2.0, math.inf),
    config: DistanceNormConfig | None = None,
    lattice_id: str = "",
    report: SpectralReport | None = None,
    points: LatticePointSet | None = None,
) -> Prop1Report:
    """Check the distance-norm sandwich pieces that are verifiable:

    - Vol(A_{t_d}) >= 1/2 exactly, with t_d = 1/(12 sqrt(d) v_d);
    - Vol(B_t) <= (2 sqrt(d) + 4 sigma) v_d t;
    - c_d sigma / 2^(1/gamma) <= ||dist||_gamma for each gamma (c_d = t_d);
    - the empirical ratio norm_inf / sigma (the companion constant to C_d
      is unknown, so the ratio is recorded, not asserted).
    """
    rep = report if report is not None else spectral_test(lat)
    d = lat.dim
    sigma = rep.sigma
    v_d = hyperplane_section_constant(d)
    t_d = 1.0 / (12.0 * math.sqrt(d) * v_d)
    # rational t >= t_d so that A_t subset A_{t_d} makes the check conservative
    t_rat = Fraction(math.ceil(t_d * 10**12), 10**12)
    su = slab_union_volume(lat, rep.shortest_dual, t_rat)
    vol_a_ok = su.vol_at >= Fraction(1, 2)
    b_bound = (2 * math.sqrt(d) + 4 * sigma) * v_d * float(t_rat)
    vol_b_bound_ok = float(su.vol_bt) <= b_bound + 1e-12

    ps = points if points is not None else enumerate_points(lat)
    gammas = tuple(gammas)
    reports = distance_norms(ps, gammas, config)
    norms = tuple(reports[math.inf if math.isinf(g) else g] for g in gammas)
    lower_bounds = tuple(
        t_d * sigma / (1.0 if math.isinf(g) else 2.0 ** (1.0 / g)) for g in gammas
    )
    lower_ok = tuple(
        r.lower_certified >= lb for r, lb in zip(norms, lower_bounds)
    )
    ratios = tuple(r.value / sigma for r in norms)
    inf_report = reports.get(math.inf)
    ratio_inf = (inf_report.value / sigma) if inf_report else float("nan")
    return Prop1Report(
        lattice_id=lattice_id,
        dim=d,
        n_points=lat.n_points,
        sigma=sigma,
        v_d=v_d,
        t_d=t_d,
        c_d=t_d,
        vol_a_td=float(su.vol_at),
        vol_a_ok=bool(vol_a_ok),
        vol_b_bound_ok=bool(vol_b_bound_ok),
        gammas=gammas,
        norms=norms,
        lower_bounds=lower_bounds,
        lower_ok=lower_ok,
        ratios=ratios,
        ratio_inf=ratio_inf,
    )


# ---------------------------------------------------------------------------
# Approximation-error proxy
# ---------------------------------------------------------------------------

def _inv(x) -> Fraction:
    """1/x as an exact rational; x may be a number, Fraction, or inf."""
    if x == math.inf or (isinstance(x, str) and x == "inf"):
        return Fraction(0)
    f = Fraction(x)
    if f < 1:
        raise ValueError("p and q must lie in [1, inf]")
    return 1 / f


@dataclass(frozen=True)
class ProxySpec:
    s: int
    p: object
    q: object
    d: int
    inv_p: Fraction
    inv_q: Fraction
    gamma: Fraction | float  # exact rational, or math.inf
    exponent: Fraction

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "p": "inf" if self.inv_p == 0 else str(Fraction(1) / self.inv_p),
            "q": "inf" if self.inv_q == 0 else str(Fraction(1) / self.inv_q),
            "d": self.d,
            "gamma": "inf" if self.gamma == math.inf else str(self.gamma),
            "exponent": str(self.exponent),
        }


def proxy_spec(s: int, p, q, d: int) -> ProxySpec:
    """Derive gamma and the proxy exponent exactly in rational arithmetic.

    gamma = s (1/q - 1/p)^(-1) when q < p, else inf;
    exponent = s - d (1/p - 1/q)_+ ; requires s > d/p.
    """
    inv_p, inv_q = _inv(p), _inv(q)
    s = int(s)
    if s <= d * inv_p:
        raise ValueError("smoothness must satisfy s > d/p")
    diff = inv_p - inv_q
    exponent = s - d * max(diff, Fraction(0))
    if exponent <= 0:
        raise ValueError("proxy exponent must be positive")
    if inv_q > inv_p:  # q < p
        gamma = Fraction(s) / (inv_q - inv_p)
    else:
        gamma = math.inf
    return ProxySpec(s, p, q, d, inv_p, inv_q, gamma, exponent)


def error_proxy(
    ps: LatticePointSet, spec: ProxySpec, config: DistanceNormConfig | None = None
) -> float:
    """||dist(., P)||_gamma raised to the proxy exponent."""
    g = math.inf if spec.gamma == math.inf else float(spec.gamma)
    rep = distance_norm(ps, g, config)
    return rep.value ** float(spec.exponent)


def nn_baseline_error(
    ps: LatticePointSet,
    f,
    q: GammaValue,
    grid_per_dim: int = 201,
    lipschitz: float | None = None,
) -> float:
    """L_q error, on a fine midpoint grid, of the nearest-neighbor
    piecewise-constant reconstruction of f from samples at P.

    For q = inf and an L-Lipschitz f the result is at most
    L * (covering radius) + grid slack.
    """
    pts = ps.as_array()
    tree = cKDTree(pts)
    d = ps.dim
    total = 0.0
    worst = 0.0
    n_cells = grid_per_dim**d
    for centers in _grid_centers_chunks(d, grid_per_dim):
        idx = tree.query(centers)[1]
        err = np.abs(np.asarray(f(centers)) - np.asarray(f(pts[idx])))
        if math.isinf(q):
            worst = max(worst, float(np.max(err, initial=0.0)))
        else:
            total += float(np.sum(err**q))
    if math.isinf(q):
        return worst
    return (total / n_cells) ** (1.0 / q)

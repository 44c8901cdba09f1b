"""Verification campaigns over the builtin lattice and body corpora.

A campaign is fully determined by (corpus spec, checks, budgets, seed):
reruns produce byte-identical JSON artifacts for any worker count. Verdicts
follow a fixed grammar: exact comparisons PASS or FAIL, Monte Carlo backed
comparisons PASS-with-uncertainty (FAIL only when lhs - 3 SE > rhs), and
claims with unknown constants are RECORDED, never failed.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .convex import (
    AxisBox,
    Ball,
    VPolytope,
    binom_kappa_sum,
    offset_volumes,
    parallel_volume_derivative_check,
    random_body,
    remark_lower,
    remark_upper,
    steiner_volume,
)
from .discrepancy import verify_thm1
from .distance import (
    DistanceNormConfig,
    distance_norm,
    proxy_spec,
    verify_prop1,
)
from .lattice import (
    IntegrationLattice,
    enumerate_points,
    fibonacci_lattice,
    rank1_lattice,
)
from .montecarlo import McConfig, chunk_rng
from .reduction import spectral_test

PASS = "PASS"
PASS_UNC = "PASS-with-uncertainty"
FAIL = "FAIL"
RECORDED = "RECORDED"

ALL_CHECKS = (
    "spectral-exact",
    "thm1",
    "prop1",
    "lemma1",
    "lemma2",
    "lemma3",
    "corollary1",
    "steiner",
    "remark",
    "thm2-diagnostic",
)


@dataclass(frozen=True)
class BoundCheckReport:
    check: str
    subject: str
    lhs: float
    rhs: float | None
    uncertainty: float
    verdict: str

    def to_json_dict(self) -> dict:
        return {
            "check": self.check,
            "subject": self.subject,
            "lhs": float(self.lhs),
            "rhs": None if self.rhs is None else float(self.rhs),
            "uncertainty": float(self.uncertainty),
            "verdict": self.verdict,
        }


def verdict_for(lhs: float, rhs: float, uncertainty: float) -> str:
    """FAIL only when lhs - 3 uncertainty > rhs; exact checks give PASS/FAIL."""
    if lhs - 3 * uncertainty > rhs:
        return FAIL
    return PASS if uncertainty == 0 else PASS_UNC


@dataclass(frozen=True)
class CorpusSpec:
    fibonacci_k: tuple[int, int] = (5, 20)
    rank1_dims: tuple[int, ...] = (2, 3, 4)
    rank1_sizes: tuple[int, ...] = (64, 256, 1024, 4096)
    rank1_per_cell: int = 20
    zd_dims: tuple[int, ...] = (2, 3, 4)
    include_bad_lattice: bool = True

    def to_json_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Budgets:
    witness_budget: int = 6
    witness_ball_mc: int = 50_000
    body_count: int = 50
    body_dims: tuple[int, ...] = (2, 3, 4)
    body_mc_samples: int = 10**6
    rhos: tuple[float, ...] = (0.01, 0.05, 0.1)
    norm_mc_samples: int = 100_000
    prop1_gammas: tuple[float, ...] = (0.5, 1.0, 2.0, math.inf)
    covering_tols: dict = field(
        default_factory=lambda: {1: 1e-6, 2: 1e-4, 3: 1e-2, 4: 5e-2}
    )
    remark_dims: tuple[int, ...] = (10, 100, 1000, 10**4, 10**5)
    remark_delta: float = 0.3
    remark_kappa: float = 5.1
    thm2_triples: tuple = ((2, 2, "inf"), (3, "inf", 1), (2, 2, 1))

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["prop1_gammas"] = ["inf" if math.isinf(g) else g for g in self.prop1_gammas]
        d["covering_tols"] = {str(k): v for k, v in self.covering_tols.items()}
        return d


@dataclass(frozen=True)
class Campaign:
    corpus: CorpusSpec = CorpusSpec()
    checks: tuple[str, ...] = ALL_CHECKS
    budgets: Budgets = Budgets()
    seed: int = 20200817
    out_dir: str | None = None
    corrupt_check: str | None = None  # harness self-test: scale this check's rhs
    corrupt_rhs_scale: float = 1.0

    @staticmethod
    def from_json_dict(data: dict) -> "Campaign":
        corpus = CorpusSpec(**{
            k: tuple(v) if isinstance(v, list) else v
            for k, v in data.get("corpus", {}).items()
        })
        braw = dict(data.get("budgets", {}))
        if "prop1_gammas" in braw:
            braw["prop1_gammas"] = tuple(
                math.inf if g == "inf" else float(g) for g in braw["prop1_gammas"]
            )
        if "covering_tols" in braw:
            braw["covering_tols"] = {int(k): float(v) for k, v in braw["covering_tols"].items()}
        for key in ("body_dims", "rhos", "remark_dims", "thm2_triples"):
            if key in braw:
                braw[key] = tuple(tuple(x) if isinstance(x, list) else x for x in braw[key]) \
                    if key == "thm2_triples" else tuple(braw[key])
        budgets = Budgets(**braw)
        return Campaign(
            corpus=corpus,
            checks=tuple(data.get("checks", ALL_CHECKS)),
            budgets=budgets,
            seed=int(data.get("seed", 20200817)),
            out_dir=data.get("out_dir"),
            corrupt_check=data.get("corrupt_check"),
            corrupt_rhs_scale=float(data.get("corrupt_rhs_scale", 1.0)),
        )

    def to_json_dict(self) -> dict:
        return {
            "corpus": self.corpus.to_json_dict(),
            "checks": list(self.checks),
            "budgets": self.budgets.to_json_dict(),
            "seed": self.seed,
            "out_dir": self.out_dir,
            "corrupt_check": self.corrupt_check,
            "corrupt_rhs_scale": self.corrupt_rhs_scale,
        }


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------

def _random_generator_vector(d: int, n: int, rng: np.random.Generator) -> tuple[int, ...]:
    while True:
        g = tuple(int(x) for x in rng.integers(1, n, size=d))
        if math.gcd(n, *g) == 1:
            return g


def builtin_corpus(
    spec: CorpusSpec, seed: int
) -> list[tuple[str, int, tuple[int, ...]]]:
    """Deterministic corpus as (id, n, generator) triples; all members are
    rank-1 so the independent spectral oracle stays a pure congruence check."""
    out: list[tuple[str, int, tuple[int, ...]]] = []
    k_lo, k_hi = spec.fibonacci_k
    fib = [1, 1]
    while len(fib) <= k_hi:
        fib.append(fib[-1] + fib[-2])
    for k in range(k_lo, k_hi + 1):
        out.append((f"fib-k{k:02d}", fib[k - 1], (1, fib[k - 2])))
    idx = 0
    for d in spec.rank1_dims:
        for n in spec.rank1_sizes:
            for j in range(spec.rank1_per_cell):
                rng = chunk_rng(seed ^ 0x5EED, idx)
                idx += 1
                g = _random_generator_vector(d, n, rng)
                out.append((f"rank1-d{d}-n{n}-i{j:02d}", n, g))
    for d in spec.zd_dims:
        out.append((f"zd-d{d}", 1, tuple(0 for _ in range(d))))
    if spec.include_bad_lattice:
        out.append(("bad-axis-d2", 256, (1, 0)))
    return out


def corpus_lattice(entry: tuple[str, int, tuple[int, ...]]) -> IntegrationLattice:
    _, n, g = entry
    return rank1_lattice(n, g)


def brute_force_min_dual_norm_sq(n: int, g: tuple[int, ...]) -> int:
    """Shell-growing exhaustive search for the minimal dual norm of a rank-1
    lattice; independent of the LLL/enumeration code paths."""
    d = len(g)
    gv = np.array(g, dtype=np.int64)
    best: int | None = None
    w = 0
    while True:
        w += 1
        rng = np.arange(-w, w + 1, dtype=np.int64)
        grids = np.meshgrid(*([rng] * d), indexing="ij")
        pts = np.stack([a.ravel() for a in grids], axis=1)
        shell = pts[np.abs(pts).max(axis=1) == w]
        cong = shell[(shell @ gv) % n == 0]
        if cong.size:
            nsq = int(np.min(np.einsum("ij,ij->i", cong, cong)))
            if best is None or nsq < best:
                best = nsq
        if best is not None and w * w >= best:
            return best


# ---------------------------------------------------------------------------
# Per-task check runners (top-level functions so ProcessPool can pickle them)
# ---------------------------------------------------------------------------

def _norm_config(d: int, budgets: Budgets) -> DistanceNormConfig:
    return DistanceNormConfig(
        mc_samples=budgets.norm_mc_samples,
        seed=0,
        covering_tol=budgets.covering_tols.get(d, 5e-2),
    )


def run_lattice_task(args: dict) -> dict:
    """All selected lattice-level checks for one corpus member."""
    lattice_id, n, g = args["id"], args["n"], tuple(args["g"])
    checks = args["checks"]
    budgets = Budgets(**args["budgets"]) if isinstance(args["budgets"], dict) else args["budgets"]
    seed = args["seed"]
    lat = rank1_lattice(n, g)
    d = lat.dim
    rows: list[BoundCheckReport] = []
    tables: dict[str, list[dict]] = {"thm1": [], "prop1": []}
    rep = spectral_test(lat)
    points = None
    if "spectral-exact" in checks and d <= 3 and lat.n_points <= 4096:
        oracle = brute_force_min_dual_norm_sq(n, g)
        rows.append(
            BoundCheckReport(
                "spectral-exact",
                lattice_id,
                float(abs(rep.dual_norm_sq - oracle)),
                0.0,
                0.0,
                PASS if rep.dual_norm_sq == oracle else FAIL,
            )
        )
    if "thm1" in checks:
        points = enumerate_points(lat)
        t1 = verify_thm1(
            lat,
            budget=budgets.witness_budget,
            seed=seed,
            lattice_id=lattice_id,
            report=rep,
            points=points,
        )
        rows.append(
            BoundCheckReport(
                "thm1",
                lattice_id,
                t1.j_lower,
                min(1.0, t1.bound),
                0.0,
                t1.verdict,
            )
        )
        rows.append(
            BoundCheckReport(
                "thm1-slab-floor",
                lattice_id,
                t1.slab_floor,
                t1.slab_value,
                0.0,
                PASS if t1.slab_floor_ok else FAIL,
            )
        )
        tables["thm1"].append(t1.to_json_dict())
    if "prop1" in checks:
        if points is None:
            points = enumerate_points(lat)
        p1 = verify_prop1(
            lat,
            gammas=budgets.prop1_gammas,
            config=_norm_config(d, budgets),
            lattice_id=lattice_id,
            report=rep,
            points=points,
        )
        rows.append(
            BoundCheckReport(
                "prop1-volA", lattice_id, 0.5, p1.vol_a_td, 0.0,
                PASS if p1.vol_a_ok else FAIL,
            )
        )
        rows.append(
            BoundCheckReport(
                "prop1-volB-bound",
                lattice_id,
                float(1.0 - p1.vol_a_td),
                (2 * math.sqrt(d) + 4 * p1.sigma)
                * p1.v_d
                * float(Fraction(math.ceil(p1.t_d * 10**12), 10**12)),
                0.0,
                PASS if p1.vol_b_bound_ok else FAIL,
            )
        )
        for gname, norm, lb, ok in zip(
            p1.gammas, p1.norms, p1.lower_bounds, p1.lower_ok
        ):
            label = "inf" if math.isinf(gname) else f"{gname:g}"
            unc = norm.mc_std_error if norm.method == "mc" else 0.0
            rows.append(
                BoundCheckReport(
                    f"prop1-lower-g{label}",
                    lattice_id,
                    lb,
                    norm.lower_certified,
                    unc,
                    (PASS if unc == 0 else PASS_UNC) if ok else FAIL,
                )
            )
            tables["prop1"].append(
                {
                    "id": lattice_id,
                    "gamma": label,
                    "norm": norm.value,
                    "lower_bound": lb,
                    "ratio": norm.value / p1.sigma,
                }
            )
        rows.append(
            BoundCheckReport(
                "prop1-ratio-inf", lattice_id, p1.ratio_inf, None, 0.0, RECORDED
            )
        )
        for gname, norm in zip(p1.gammas, p1.norms):
            if math.isinf(gname):
                width = norm.upper_certified - norm.lower_certified
                tol = budgets.covering_tols.get(d, 5e-2)
                rows.append(
                    BoundCheckReport(
                        "prop1-covering-width",
                        lattice_id,
                        width,
                        tol * (1 + 1e-9),
                        0.0,
                        verdict_for(width, tol * (1 + 1e-9), 0.0),
                    )
                )
    return {"rows": [r.to_json_dict() for r in rows], "tables": tables}


def run_body_task(args: dict) -> dict:
    """Lemma and Steiner checks for one random convex body."""
    d = args["d"]
    index = args["index"]
    checks = args["checks"]
    budgets = Budgets(**args["budgets"]) if isinstance(args["budgets"], dict) else args["budgets"]
    seed = args["seed"]
    kinds = ["ball", "box", "hpoly"] + (["hull"] if d <= 3 else [])
    rng = chunk_rng(seed ^ 0xB0D1E5, d * 10_000 + index)
    body = random_body(d, rng, kinds[index % len(kinds)])
    subject = f"{type(body).__name__.lower()}-d{d}-i{index:02d}"
    rhos = list(budgets.rhos)
    cfg = McConfig(n_samples=budgets.body_mc_samples, seed=(seed << 8) ^ (d * 1000 + index))
    outer = offset_volumes(body, rhos, "outer", cfg)
    inner = offset_volumes(body, rhos, "inner", cfg)
    rows: list[BoundCheckReport] = []
    for rho, o, i in zip(rhos, outer, inner):
        unc = math.hypot(o.std_error, i.std_error)
        if "lemma2" in checks:
            rows.append(
                BoundCheckReport(
                    "lemma2", f"{subject}-rho{rho:g}", i.value, o.value, unc,
                    verdict_for(i.value, o.value, unc),
                )
            )
        if "lemma3" in checks:
            lhs = max(o.value, i.value)
            rhs = 2 ** (d + 3) * rho
            u = max(o.std_error, i.std_error)
            rows.append(
                BoundCheckReport(
                    "lemma3", f"{subject}-rho{rho:g}", lhs, rhs, u,
                    verdict_for(lhs, rhs, u),
                )
            )
        if "corollary1" in checks:
            lhs = o.value + i.value
            rhs = d * 2 ** (d + 4) * rho
            rows.append(
                BoundCheckReport(
                    "corollary1", f"{subject}-rho{rho:g}", lhs, rhs, unc,
                    verdict_for(lhs, rhs, unc),
                )
            )
        if "steiner" in checks and isinstance(body, (Ball, AxisBox)):
            # Minkowski identity on the closed-form bodies; agreement is
            # limited only by float roundoff. The Monte-Carlo-vs-Steiner
            # cross-check for 2-d polygons lives in the unit tests, where a
            # single pinned draw keeps the 3 SE gate deterministic.
            st = steiner_volume(body, rho)
            expected = st.value - body.volume_exact()
            lhs = abs(o.value - expected)
            rows.append(
                BoundCheckReport(
                    "steiner", f"{subject}-rho{rho:g}", lhs, 1e-12, o.std_error,
                    verdict_for(lhs, 1e-12, o.std_error),
                )
            )
    if "lemma1" in checks and isinstance(body, (Ball, AxisBox)):
        h = 1e-3
        for rho in rhos:
            fd, analytic = parallel_volume_derivative_check(body, rho, h)
            lhs = abs(fd - analytic)
            rows.append(
                BoundCheckReport(
                    "lemma1", f"{subject}-rho{rho:g}", lhs, 1e-3, 0.0,
                    verdict_for(lhs, 1e-3, 0.0),
                )
            )
    return {"rows": [r.to_json_dict() for r in rows], "tables": {}}


def run_remark_task(args: dict) -> dict:
    budgets = Budgets(**args["budgets"]) if isinstance(args["budgets"], dict) else args["budgets"]
    rows: list[BoundCheckReport] = []
    s2 = math.exp(binom_kappa_sum(2))
    rows.append(
        BoundCheckReport(
            "remark-s2",
            "d2",
            abs(s2 - (4 + math.pi)),
            1e-10,
            0.0,
            verdict_for(abs(s2 - (4 + math.pi)), 1e-10, 0.0),
        )
    )
    for d in budgets.remark_dims:
        log_sum = binom_kappa_sum(d)
        lo = remark_lower(d, budgets.remark_delta)
        hi = remark_upper(d, budgets.remark_kappa)
        rows.append(
            BoundCheckReport(
                "remark-lower", f"d{d}", lo, log_sum, 0.0, verdict_for(lo, log_sum, 0.0)
            )
        )
        rows.append(BoundCheckReport("remark-upper", f"d{d}", log_sum, hi, 0.0, RECORDED))
        if d >= 1000:
            lhs = log_sum / d ** (2 / 3)
            rhs = budgets.remark_kappa * math.log(
                d * math.sqrt(2 * math.e**3 * math.pi)
            )
            rows.append(
                BoundCheckReport(
                    "remark-upper-scaled", f"d{d}", lhs, rhs, 0.0,
                    verdict_for(lhs, rhs, 0.0),
                )
            )
    return {"rows": [r.to_json_dict() for r in rows], "tables": {}}


def run_thm2_task(args: dict) -> dict:
    """Joint-boundedness diagnostic over the Fibonacci family."""
    budgets = Budgets(**args["budgets"]) if isinstance(args["budgets"], dict) else args["budgets"]
    corpus_spec = args["fibonacci_k"]
    k_lo, k_hi = corpus_spec
    rows: list[BoundCheckReport] = []
    sigma_window = []
    proxy_windows: dict[str, list[float]] = {}
    detail_rows = []
    for k in range(k_lo, k_hi + 1):
        lat = fibonacci_lattice(k)
        ps = enumerate_points(lat)
        rep = spectral_test(lat)
        n = lat.n_points
        sigma_window.append(rep.sigma * math.sqrt(n))
        cfg = _norm_config(2, budgets)
        for s, p, q in budgets.thm2_triples:
            pp = math.inf if p == "inf" else p
            qq = math.inf if q == "inf" else q
            spec = proxy_spec(s, pp, qq, 2)
            g = math.inf if spec.gamma == math.inf else float(spec.gamma)
            norm = distance_norm(ps, g, cfg)
            proxy = norm.value ** float(spec.exponent)
            scale_exp = s / 2 - max(float(spec.inv_p - spec.inv_q), 0.0)
            scaled = proxy * n**scale_exp
            key = f"s{s}-p{p}-q{q}"
            proxy_windows.setdefault(key, []).append(scaled)
            detail_rows.append(
                {
                    "k": k,
                    "N": n,
                    "sigma": rep.sigma,
                    "triple": key,
                    "proxy": proxy,
                    "scaled": scaled,
                    "sigma_sqrt_n": rep.sigma * math.sqrt(n),
                }
            )
    ratio_sigma = max(sigma_window) / min(sigma_window)
    rows.append(
        BoundCheckReport(
            "thm2-window-sigma", "fibonacci", ratio_sigma, 10.0, 0.0,
            verdict_for(ratio_sigma, 10.0, 0.0),
        )
    )
    for key, vals in sorted(proxy_windows.items()):
        ratio = max(vals) / min(vals)
        rows.append(
            BoundCheckReport(
                f"thm2-window-{key}", "fibonacci", ratio, 10.0, 0.0,
                verdict_for(ratio, 10.0, 0.0),
            )
        )
    return {
        "rows": [r.to_json_dict() for r in rows],
        "tables": {"thm2": detail_rows},
    }


def _run_task(task: tuple[str, dict]) -> dict:
    kind, args = task
    if kind == "lattice":
        return run_lattice_task(args)
    if kind == "body":
        return run_body_task(args)
    if kind == "remark":
        return run_remark_task(args)
    if kind == "thm2":
        return run_thm2_task(args)
    raise ValueError(f"unknown task kind {kind!r}")


# ---------------------------------------------------------------------------
# Campaign driver
# ---------------------------------------------------------------------------

@dataclass
class CampaignResult:
    campaign: Campaign
    rows: list[dict]
    tables: dict[str, list[dict]]
    summary: dict

    @property
    def n_failures(self) -> int:
        return self.summary.get(FAIL, 0)

    def to_json_dict(self) -> dict:
        return {
            "version": __version__,
            "campaign": self.campaign.to_json_dict(),
            "rows": self.rows,
            "tables": self.tables,
            "summary": self.summary,
        }


def _build_tasks(c: Campaign) -> list[tuple[str, dict]]:
    budgets_dict = {
        **asdict(c.budgets),
    }
    tasks: list[tuple[str, dict]] = []
    lattice_checks = {"spectral-exact", "thm1", "prop1"} & set(c.checks)
    if lattice_checks:
        for lattice_id, n, g in builtin_corpus(c.corpus, c.seed):
            tasks.append(
                (
                    "lattice",
                    {
                        "id": lattice_id,
                        "n": n,
                        "g": list(g),
                        "checks": sorted(lattice_checks),
                        "budgets": budgets_dict,
                        "seed": c.seed,
                    },
                )
            )
    body_checks = {"lemma1", "lemma2", "lemma3", "corollary1", "steiner"} & set(c.checks)
    if body_checks:
        for d in c.budgets.body_dims:
            for index in range(c.budgets.body_count):
                tasks.append(
                    (
                        "body",
                        {
                            "d": d,
                            "index": index,
                            "checks": sorted(body_checks),
                            "budgets": budgets_dict,
                            "seed": c.seed,
                        },
                    )
                )
    if "remark" in c.checks:
        tasks.append(("remark", {"budgets": budgets_dict}))
    if "thm2-diagnostic" in c.checks:
        tasks.append(
            ("thm2", {"budgets": budgets_dict, "fibonacci_k": c.corpus.fibonacci_k})
        )
    return tasks


def run_campaign(c: Campaign, workers: int = 1) -> CampaignResult:
    tasks = _build_tasks(c)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]
    rows: list[dict] = []
    tables: dict[str, list[dict]] = {"thm1": [], "prop1": [], "thm2": []}
    for chunk in results:
        rows.extend(chunk["rows"])
        for name, extra in chunk.get("tables", {}).items():
            tables.setdefault(name, []).extend(extra)
    if c.corrupt_check is not None:
        rows = [_corrupt_row(r, c) for r in rows]
    summary: dict[str, int] = {}
    for r in rows:
        summary[r["verdict"]] = summary.get(r["verdict"], 0) + 1
    summary = {k: summary[k] for k in sorted(summary)}
    result = CampaignResult(c, rows, tables, summary)
    if c.out_dir:
        write_artifacts(result, Path(c.out_dir))
    return result


def _corrupt_row(row: dict, c: Campaign) -> dict:
    if row["check"] != c.corrupt_check or row["rhs"] is None:
        return row
    rhs = row["rhs"] * c.corrupt_rhs_scale
    out = dict(row)
    out["rhs"] = rhs
    if row["verdict"] in (PASS, PASS_UNC, FAIL):
        out["verdict"] = verdict_for(row["lhs"], rhs, row["uncertainty"])
    return out


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------

def default_out_dir() -> str:
    return os.environ.get("LATDISC_OUT", "latdisc-artifacts")


def write_artifacts(result: CampaignResult, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    payload = json.dumps(result.to_json_dict(), indent=2) + "\n"
    path = out_dir / "campaign.json"
    path.write_text(payload)
    written.append(path)
    written.extend(report_tables(result, out_dir))
    return written


def report_tables(result: CampaignResult, out_dir: Path) -> list[Path]:
    """CSV emissions with a stable, documented column order."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def write_csv(name: str, header: list[str], rows: list[list]) -> None:
        p = out_dir / name
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
        written.append(p)

    write_csv(
        "checks.csv",
        ["check", "subject", "lhs", "rhs", "uncertainty", "verdict"],
        [
            [r["check"], r["subject"], r["lhs"], "" if r["rhs"] is None else r["rhs"], r["uncertainty"], r["verdict"]]
            for r in result.rows
        ],
    )
    if result.tables.get("thm1"):
        write_csv(
            "thm1.csv",
            ["id", "d", "N", "sigma", "j_lower", "bound", "verdict"],
            [
                [t["lattice_id"], t["d"], t["N"], t["sigma"], t["j_lower"], t["bound"], t["verdict"]]
                for t in result.tables["thm1"]
            ],
        )
    if result.tables.get("prop1"):
        write_csv(
            "prop1.csv",
            ["id", "gamma", "norm", "lower_bound", "ratio"],
            [
                [t["id"], t["gamma"], t["norm"], t["lower_bound"], t["ratio"]]
                for t in result.tables["prop1"]
            ],
        )
    remark = [r for r in result.rows if r["check"] == "remark-upper"]
    if remark:
        lower = {r["subject"]: r for r in result.rows if r["check"] == "remark-lower"}
        write_csv(
            "remark.csv",
            ["d", "log_sum", "log_lower", "log_upper"],
            [
                [r["subject"].removeprefix("d"), r["lhs"], lower[r["subject"]]["lhs"], r["rhs"]]
                for r in remark
            ],
        )
    if result.tables.get("thm2"):
        write_csv(
            "thm2.csv",
            ["k", "N", "sigma", "triple", "proxy", "scaled", "sigma_sqrt_n"],
            [
                [t["k"], t["N"], t["sigma"], t["triple"], t["proxy"], t["scaled"], t["sigma_sqrt_n"]]
                for t in result.tables["thm2"]
            ],
        )
    return written

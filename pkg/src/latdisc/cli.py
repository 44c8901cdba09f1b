"""Command-line interface: lattice generation, spectral tests, witnesses,
distance norms, body geometry, bound tables, and verification campaigns."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .convex import (
    OffsetSpec,
    binom_kappa_sum,
    body_from_json_dict,
    boundary_neighborhood_volume,
    offset_volume,
    remark_lower,
    remark_upper,
    steiner_volume,
)
from .discrepancy import isotropic_lower_bound, verify_thm1
from .distance import DistanceNormConfig, distance_norms
from .harness import (
    ALL_CHECKS,
    Budgets,
    Campaign,
    CorpusSpec,
    default_out_dir,
    run_campaign,
    write_artifacts,
)
from .lattice import (
    enumerate_points,
    format_lattice_text,
    format_rank1_text,
    korobov_lattice,
    parse_lattice_text,
    rank1_lattice,
    write_points_csv,
)
from .montecarlo import McConfig
from .reduction import spectral_test


def _read_lattice(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_lattice_text(text)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload) -> None:
    _emit(args, json.dumps(payload, indent=2) + "\n")


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _cmd_gen(args) -> int:
    if args.family == "rank1":
        g = _parse_int_list(args.g)
        lat = rank1_lattice(args.n, g)
        if lat.n_points == args.n:
            _emit(args, format_rank1_text(args.n, g))
        else:
            _emit(args, format_lattice_text(lat))
    elif args.family == "fibonacci":
        if args.k < 3:
            raise SystemExit("k must be at least 3")
        a, b = 1, 1
        for _ in range(args.k - 2):
            a, b = b, a + b
        _emit(args, format_rank1_text(b, (1, a)))
    elif args.family == "korobov":
        lat = korobov_lattice(args.n, args.a, args.d)
        _emit(args, format_lattice_text(lat))
    else:  # zd
        _emit(args, format_rank1_text(1, [0] * args.d))
    return 0


def _cmd_spectral(args) -> int:
    lat = _read_lattice(args.lattice)
    _emit_json(args, spectral_test(lat).to_json_dict())
    return 0


def _cmd_points(args) -> int:
    lat = _read_lattice(args.lattice)
    ps = enumerate_points(lat, cap=args.cap)
    import io

    buf = io.StringIO()
    write_points_csv(ps, buf, precision=args.precision, exact=args.exact)
    _emit(args, buf.getvalue())
    return 0


def _cmd_isodisc(args) -> int:
    lat = _read_lattice(args.lattice)
    ps = enumerate_points(lat)
    best, witnesses = isotropic_lower_bound(ps, args.budget, args.seed)
    report = verify_thm1(lat, budget=args.budget, seed=args.seed, points=ps)
    _emit_json(
        args,
        {
            "best": best.to_json_dict(),
            "thm1": report.to_json_dict(),
            "witnesses": [w.to_json_dict() for w in witnesses],
        },
    )
    return 0 if report.verdict == "PASS" else 1


def _cmd_distnorm(args) -> int:
    lat = _read_lattice(args.lattice)
    ps = enumerate_points(lat)
    gammas = [math.inf if t == "inf" else float(t) for t in args.gamma.split(",")]
    cfg = DistanceNormConfig(
        mc_samples=args.samples, seed=args.seed, covering_tol=args.tol
    )
    reports = distance_norms(ps, gammas, cfg)
    _emit_json(
        args,
        [reports[math.inf if math.isinf(g) else g].to_json_dict() for g in gammas],
    )
    return 0


def _load_body(path: str):
    return body_from_json_dict(json.loads(Path(path).read_text()))


def _cmd_geom(args) -> int:
    body = _load_body(args.body)
    cfg = McConfig(n_samples=args.samples, seed=args.seed)
    if args.geom_op == "steiner":
        est = steiner_volume(body, args.rho, cfg)
    elif args.geom_op == "offset":
        est = offset_volume(body, OffsetSpec(args.rho, args.side), cfg)
    else:
        est = boundary_neighborhood_volume(body, args.rho, cfg)
    _emit_json(args, est.to_json_dict())
    return 0


def _cmd_bounds_remark(args) -> int:
    rows = []
    for d in _parse_int_list(args.dims):
        rows.append(
            {
                "d": d,
                "log_sum": binom_kappa_sum(d),
                "log_lower": remark_lower(d, args.delta),
                "log_upper": remark_upper(d, args.kappa),
            }
        )
    if args.format == "csv":
        lines = ["d,log_sum,log_lower,log_upper"]
        lines += [f'{r["d"]},{r["log_sum"]},{r["log_lower"]},{r["log_upper"]}' for r in rows]
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit_json(args, rows)
    return 0


_VERIFY_CHECKS = {
    "thm1": ("spectral-exact", "thm1"),
    "prop1": ("prop1",),
    "lemma3": ("lemma2", "lemma3"),
    "corollary1": ("corollary1",),
    "all": ALL_CHECKS,
}


def _small_corpus() -> CorpusSpec:
    return CorpusSpec(
        fibonacci_k=(5, 10),
        rank1_dims=(2, 3),
        rank1_sizes=(64, 256),
        rank1_per_cell=3,
        zd_dims=(2, 3),
    )


def _cmd_verify(args) -> int:
    corpus = _small_corpus() if args.small else CorpusSpec()
    budgets = Budgets() if not args.small else Budgets(
        body_count=6, body_mc_samples=10**5, norm_mc_samples=30_000
    )
    campaign = Campaign(
        corpus=corpus,
        checks=_VERIFY_CHECKS[args.claim],
        budgets=budgets,
        seed=args.seed,
        out_dir=args.out or default_out_dir(),
    )
    result = run_campaign(campaign, workers=args.workers)
    summary = ", ".join(f"{k}={v}" for k, v in result.summary.items())
    print(f"{args.claim}: {summary}")
    return 0 if result.n_failures == 0 else 1


def _cmd_campaign(args) -> int:
    data = json.loads(Path(args.spec).read_text())
    campaign = Campaign.from_json_dict(data)
    if args.out:
        campaign = Campaign(
            corpus=campaign.corpus,
            checks=campaign.checks,
            budgets=campaign.budgets,
            seed=campaign.seed if args.seed == 0 else args.seed,
            out_dir=args.out,
            corrupt_check=campaign.corrupt_check,
            corrupt_rhs_scale=campaign.corrupt_rhs_scale,
        )
    result = run_campaign(campaign, workers=args.workers)
    if not campaign.out_dir:
        write_artifacts(result, Path(default_out_dir()))
    summary = ", ".join(f"{k}={v}" for k, v in result.summary.items())
    print(f"campaign: {summary}")
    return 0 if result.n_failures == 0 else 1


_GLOBAL_DEFAULTS = {
    "seed": 0,
    "samples": 200_000,
    "tol": 1e-4,
    "out": None,
    "format": "json",
    "workers": 1,
}


def _global_flags(with_defaults: bool) -> argparse.ArgumentParser:
    """Parent parser holding the global flags.

    The root copy carries the real defaults; subcommand copies use SUPPRESS
    so a flag given after the subcommand overrides one given before it, and
    an omitted flag never clobbers the root value. Separate instances are
    required because parent parsers share action objects.
    """
    p = argparse.ArgumentParser(add_help=False)

    def dflt(name):
        return _GLOBAL_DEFAULTS[name] if with_defaults else argparse.SUPPRESS

    p.add_argument("--seed", type=int, default=dflt("seed"))
    p.add_argument("--samples", type=int, default=dflt("samples"))
    p.add_argument("--tol", type=float, default=dflt("tol"))
    p.add_argument(
        "--out",
        default=dflt("out"),
        help="output file/directory (default: stdout or $LATDISC_OUT)",
    )
    p.add_argument("--format", choices=("json", "csv"), default=dflt("format"))
    p.add_argument("--workers", type=int, default=dflt("workers"))
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(with_defaults=False)
    parser = argparse.ArgumentParser(
        prog="latdisc",
        description="Spectral tests, discrepancy witnesses, and parallel-body "
        "volume bounds for integration lattices.",
        parents=[_global_flags(with_defaults=True)],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    gen = add_parser("gen", help="generate a lattice spec file")
    gen.add_argument("family", choices=("rank1", "fibonacci", "korobov", "zd"))
    gen.add_argument("--n", type=int, default=1)
    gen.add_argument("--g", default="0")
    gen.add_argument("--k", type=int, default=10)
    gen.add_argument("--a", type=int, default=1)
    gen.add_argument("--d", type=int, default=2)
    gen.set_defaults(fn=_cmd_gen)

    sp = add_parser("spectral", help="spectral test report for a lattice")
    sp.add_argument("lattice", help="lattice spec file, or - for stdin")
    sp.set_defaults(fn=_cmd_spectral)

    pts = add_parser("points", help="enumerate the lattice point set as CSV")
    pts.add_argument("lattice")
    pts.add_argument("--precision", type=int, default=17)
    pts.add_argument("--exact", action="store_true", help='render coordinates as "p/q"')
    pts.add_argument("--cap", type=int, default=10**6)
    pts.set_defaults(fn=_cmd_points)

    iso = add_parser("isodisc", help="isotropic-discrepancy witness search")
    iso.add_argument("lattice")
    iso.add_argument("--budget", type=int, default=12)
    iso.set_defaults(fn=_cmd_isodisc)

    dn = add_parser("distnorm", help="distance-function L_gamma norms")
    dn.add_argument("lattice")
    dn.add_argument("--gamma", default="1,2,inf", help="comma list, e.g. 0.5,1,2,inf")
    dn.set_defaults(fn=_cmd_distnorm)

    geom = add_parser("geom", help="parallel-body volume operations")
    geom.add_argument("geom_op", choices=("steiner", "offset", "boundary"))
    geom.add_argument("--body", required=True, help="ConvexBody JSON file")
    geom.add_argument("--rho", type=float, required=True)
    geom.add_argument("--side", choices=("outer", "inner"), default="outer")
    geom.set_defaults(fn=_cmd_geom)

    bounds = add_parser("bounds", help="quantitative bound tables")
    bsub = bounds.add_subparsers(dest="bounds_op", required=True)
    rem = bsub.add_parser("remark", parents=[common], help="binomial-kappa sum sandwich table")
    rem.add_argument("--dims", default="10,100,1000,10000,100000")
    rem.add_argument("--delta", type=float, default=0.3)
    rem.add_argument("--kappa", type=float, default=5.1)
    rem.set_defaults(fn=_cmd_bounds_remark)

    ver = add_parser("verify", help="run verification checks on the builtin corpus")
    ver.add_argument("claim", choices=sorted(_VERIFY_CHECKS))
    ver.add_argument("--small", action="store_true", help="reduced corpus for quick runs")
    ver.set_defaults(fn=_cmd_verify)

    camp = add_parser("campaign", help="campaign operations")
    csub = camp.add_subparsers(dest="campaign_op", required=True)
    run = csub.add_parser("run", parents=[common], help="run a campaign from a JSON spec")
    run.add_argument("spec")
    run.set_defaults(fn=_cmd_campaign)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())

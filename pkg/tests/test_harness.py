import json
import math

import pytest

from latdisc.harness import (
    ALL_CHECKS,
    Budgets,
    Campaign,
    CorpusSpec,
    brute_force_min_dual_norm_sq,
    builtin_corpus,
    corpus_lattice,
    run_campaign,
    verdict_for,
    write_artifacts,
)
from latdisc.reduction import spectral_test


SMALL_CORPUS = CorpusSpec(
    fibonacci_k=(5, 7),
    rank1_dims=(2,),
    rank1_sizes=(64,),
    rank1_per_cell=2,
    zd_dims=(2,),
    include_bad_lattice=True,
)
SMALL_BUDGETS = Budgets(
    body_count=3,
    body_dims=(2,),
    body_mc_samples=50_000,
    norm_mc_samples=20_000,
    remark_dims=(10, 100, 1000),
    thm2_triples=((2, 2, "inf"),),
    witness_budget=3,
)


def small_campaign(**kw):
    base = dict(corpus=SMALL_CORPUS, budgets=SMALL_BUDGETS, seed=11)
    base.update(kw)
    return Campaign(**base)


def test_verdict_grammar():
    assert verdict_for(1.0, 2.0, 0.0) == "PASS"
    assert verdict_for(1.0, 2.0, 0.1) == "PASS-with-uncertainty"
    assert verdict_for(2.5, 2.0, 0.1) == "FAIL"
    assert verdict_for(2.2, 2.0, 0.1) == "PASS-with-uncertainty"  # within 3 SE


def test_builtin_corpus_structure():
    entries = builtin_corpus(CorpusSpec(), seed=1)
    ids = [e[0] for e in entries]
    assert ids[0] == "fib-k05"
    assert "zd-d2" in ids and "bad-axis-d2" in ids
    assert sum(1 for i in ids if i.startswith("rank1-")) == 3 * 4 * 20
    assert len(ids) == len(set(ids))
    # deterministic regeneration
    assert builtin_corpus(CorpusSpec(), seed=1) == entries
    # fibonacci members really are Fibonacci lattices
    fib = next(e for e in entries if e[0] == "fib-k10")
    assert fib[1] == 55 and fib[2] == (1, 34)


def test_corpus_generators_coprime():
    for _, n, g in builtin_corpus(SMALL_CORPUS, seed=3):
        if any(g):
            assert math.gcd(n, *g) == 1


def test_brute_force_oracle_agrees_with_enumeration():
    for _, n, g in builtin_corpus(SMALL_CORPUS, seed=5)[:8]:
        lat = corpus_lattice((_, n, g))
        rep = spectral_test(lat)
        assert rep.dual_norm_sq == brute_force_min_dual_norm_sq(n, g)


def test_small_campaign_no_failures():
    res = run_campaign(small_campaign())
    assert res.n_failures == 0
    assert res.summary["PASS"] > 0
    assert "RECORDED" in res.summary


def test_campaign_worker_determinism(tmp_path):
    c1 = small_campaign(out_dir=str(tmp_path / "w1"))
    c8 = small_campaign(out_dir=str(tmp_path / "w8"))
    run_campaign(c1, workers=1)
    run_campaign(c8, workers=8)
    b1 = (tmp_path / "w1" / "campaign.json").read_bytes()
    b8 = (tmp_path / "w8" / "campaign.json").read_bytes()
    # out_dir is the only allowed difference between the two payloads
    j1 = json.loads(b1)
    j8 = json.loads(b8)
    j1["campaign"]["out_dir"] = j8["campaign"]["out_dir"] = None
    assert json.dumps(j1, sort_keys=True) == json.dumps(j8, sort_keys=True)


def test_campaign_rerun_byte_identical(tmp_path):
    out = tmp_path / "a"
    c = small_campaign(out_dir=str(out))
    run_campaign(c, workers=1)
    first = (out / "campaign.json").read_bytes()
    run_campaign(c, workers=1)
    assert (out / "campaign.json").read_bytes() == first


def test_corrupted_bound_self_test():
    c = small_campaign(
        checks=("lemma3",), corrupt_check="lemma3", corrupt_rhs_scale=1e-6
    )
    res = run_campaign(c)
    assert res.summary.get("FAIL", 0) >= 1
    assert all(r["check"] == "lemma3" for r in res.rows if r["verdict"] == "FAIL")
    # and without corruption the same campaign passes
    clean = run_campaign(small_campaign(checks=("lemma3",)))
    assert clean.n_failures == 0


def test_artifact_tables(tmp_path):
    res = run_campaign(small_campaign(checks=("thm1", "prop1", "remark", "thm2-diagnostic")))
    paths = write_artifacts(res, tmp_path)
    names = {p.name for p in paths}
    assert {"campaign.json", "checks.csv", "thm1.csv", "prop1.csv", "remark.csv", "thm2.csv"} <= names
    thm1 = (tmp_path / "thm1.csv").read_text().splitlines()
    assert thm1[0] == "id,d,N,sigma,j_lower,bound,verdict"
    assert len(thm1) == 1 + len(res.tables["thm1"])
    prop1 = (tmp_path / "prop1.csv").read_text().splitlines()
    assert prop1[0] == "id,gamma,norm,lower_bound,ratio"
    remark = (tmp_path / "remark.csv").read_text().splitlines()
    assert remark[0] == "d,log_sum,log_lower,log_upper"


def test_campaign_json_roundtrip():
    c = small_campaign(out_dir="x")
    back = Campaign.from_json_dict(json.loads(json.dumps(c.to_json_dict())))
    assert back.corpus == c.corpus
    assert back.budgets == c.budgets
    assert back.seed == c.seed
    assert back.checks == c.checks


def test_all_checks_cover_spec_names():
    for name in ("thm1", "prop1", "lemma3", "corollary1", "remark", "thm2-diagnostic"):
        assert name in ALL_CHECKS

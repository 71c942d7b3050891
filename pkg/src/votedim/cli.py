"""Command-line interface: analysis commands and the reproduction suite."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dataset, formats
from .analysis import EUAnalysis
from .bounds import codim_lower_bound, lower_bound_dimension
from .covering import exact_dimension_small, verify_representation
from .enumeration import (count_partition, desirability, losing_by_size,
                          maximal_losing, minimal_winning, shift_sets)
from .games import eval_game, games_equal, mask_from_members, members_from_mask
from .rationals import Rat, format_rational, rat
from .robustness import check_at, robustness_radius
from .trades import greedy_2trade, is_trading_transform, test_weighted

USAGE_ERROR = 2
MISMATCH = 1
OK = 0


@dataclass
class ClaimRecord:
    claim_id: str
    description: str
    expected: object
    computed: object
    status: str        # match | mismatch | skipped
    runtime: float


@dataclass
class ReproductionReport:
    records: list

    def add(self, claim_id, description, expected, computed, t0, ok=None):
        if ok is None:
            ok = expected == computed
        rec = ClaimRecord(claim_id, description, expected, computed,
                          "match" if ok else "mismatch", time.time() - t0)
        self.records.append(rec)
        flag = "ok " if ok else "MISMATCH"
        print(f"[{flag}] {claim_id}: expected {expected}, computed {computed} "
              f"({rec.runtime:.1f}s)  - {description}")
        return ok

    def skip(self, claim_id, description, expected, reason):
        self.records.append(ClaimRecord(claim_id, description, expected,
                                        None, "skipped", 0.0))
        print(f"[skip] {claim_id}: {reason}")

    @property
    def mismatches(self):
        return [r for r in self.records if r.status == "mismatch"]


def _load_inputs(args):
    """Resolve --game/--pop into (game, pop, analysis-or-None)."""
    if args.game == "builtin:eu28":
        ana = EUAnalysis(threads=args.threads)
        return ana.game, ana.pop, ana
    path = Path(args.game)
    if not path.exists():
        print(f"error: game file not found: {path}", file=sys.stderr)
        sys.exit(USAGE_ERROR)
    try:
        game = formats.parse_game_file(path.read_text())
    except formats.FormatError as e:
        print(f"error: {path}: {e}", file=sys.stderr)
        sys.exit(USAGE_ERROR)
    pop = None
    if args.pop:
        ppath = Path(args.pop)
        if not ppath.exists():
            print(f"error: population file not found: {ppath}", file=sys.stderr)
            sys.exit(USAGE_ERROR)
        try:
            pop, _ = formats.parse_population_csv(ppath.read_text())
        except formats.FormatError as e:
            print(f"error: {ppath}: {e}", file=sys.stderr)
            sys.exit(USAGE_ERROR)
    return game, pop, None


def _fmt_pct(x: Rat, digits: int = 4) -> str:
    """Percentage with the given significant digits (exact input)."""
    scaled = float(x) * 100
    if scaled == 0:
        return "0%"
    from math import floor, log10
    d = digits - 1 - floor(log10(abs(scaled)))
    return f"{round(scaled, d)}%"


def cmd_counts(args) -> int:
    game, _, _ = _load_inputs(args)
    win, lose = count_partition(game)
    print(f"winning: {win}")
    print(f"losing: {lose}")
    return OK


def cmd_shift_sets(args) -> int:
    game, _, ana = _load_inputs(args)
    if ana:
        wsm, lsm = ana.wsm, ana.lsm
        wm, lm = ana.wm, ana.lm
    else:
        wm = minimal_winning(game)
        lm = maximal_losing(game)
        rel = desirability(game, wm)
        wsm, lsm = shift_sets(game, rel, wm, lm)
    print(f"minimal winning: {len(wm)}")
    print(f"maximal losing: {len(lm)}")
    print(f"shift-minimal winning: {len(wsm)}")
    print(f"shift-maximal losing: {len(lsm)}")
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        for name, cs in (("wsm", wsm), ("lsm", lsm)):
            (Path(args.out) / f"{name}.coalitions").write_text(
                formats.serialize_coalition_set(cs))
    return OK


def cmd_desirability(args) -> int:
    game, _, ana = _load_inputs(args)
    rel = ana.rel if ana else desirability(game)
    print(f"complete: {rel.complete}")
    print(f"classes ({len(rel.classes)}, strongest first):")
    for cls in rel.classes:
        print("  " + ",".join(str(p) for p in cls))
    return OK


def cmd_weighted(args) -> int:
    game, _, ana = _load_inputs(args)
    if ana:
        res = test_weighted(game, rel=ana.rel, wsm=ana.wsm, lsm=ana.lsm)
    else:
        res = test_weighted(game)
    print(f"status: {res.status}")
    if res.representation is not None:
        print(f"representation: {res.representation}")
    if res.trade is not None:
        print("witness 2-trade:")
        print(formats.serialize_trade(res.trade), end="")
    elif res.farkas_rows:
        print(f"infeasible constraint combination over {len(res.farkas_rows)} rows")
    return OK


def cmd_lower_bound(args) -> int:
    game, pop, ana = _load_inputs(args)
    if pop is None:
        print("error: lower-bound needs a population vector", file=sys.stderr)
        return USAGE_ERROR
    if ana:
        res = ana.lower_bound
    else:
        res = lower_bound_dimension(game, pop)
    print(f"dimension >= {res.k}")
    print("certificate (pairwise incompatible losing coalitions):")
    for m in res.certificate:
        print("  " + ",".join(str(p) for p in members_from_mask(m)))
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "lower_bound.coalitions").write_text(
            formats.serialize_coalition_set(res.certificate))
    return OK


def cmd_upper_bound(args) -> int:
    game, pop, ana = _load_inputs(args)
    if ana is None:
        print("error: the covering pipeline currently supports builtin:eu28",
              file=sys.stderr)
        return USAGE_ERROR
    res = ana.pipeline(step_one=not args.no_step_one,
                       ilp_rounds=args.ilp_rounds,
                       ilp_node_budget=args.ilp_node_budget)
    rep = res.representation
    print(f"constituents: {len(rep)}")
    print(f"greedy games: {res.greedy_games} (covering {res.greedy_covered})")
    print(f"per-coalition games: {res.single_games}")
    print(f"indicator games: {res.indicator_games}")
    print(f"verified: {res.report.ok}")
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "representation.rep").write_text(
            formats.serialize_representation(rep))
    return OK if res.report.ok else MISMATCH


def cmd_codim(args) -> int:
    game, pop, ana = _load_inputs(args)
    if pop is None:
        print("error: codim needs a population vector", file=sys.stderr)
        return USAGE_ERROR
    wm = ana.wm if ana else minimal_winning(game)
    res = codim_lower_bound(game, pop, wm, target=args.target)
    print(f"co-dimension >= {res.k}")
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "codim_certificate.coalitions").write_text(
            formats.serialize_coalition_set(res.certificate))
    return OK


def cmd_boolean_dim(args) -> int:
    game, pop, ana = _load_inputs(args)
    if ana:
        rep = ana.boolean()
    else:
        from .bounds import boolean_dimension
        rep = boolean_dimension(game, pop)
    if rep.value is not None:
        print(f"boolean dimension: {rep.value}")
    else:
        upper = rep.upper if rep.upper is not None else "?"
        print(f"boolean dimension in [{rep.lower}, {upper}]")
    return OK


def cmd_exact_dim(args) -> int:
    game, _, _ = _load_inputs(args)
    try:
        dim, witnesses = exact_dimension_small(game)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    print(f"dimension: {dim}")
    for g in witnesses:
        print(f"  {g}")
    return OK


def cmd_verify(args) -> int:
    game, _, ana = _load_inputs(args)
    path = Path(args.rep)
    if not path.exists():
        print(f"error: representation file not found: {path}", file=sys.stderr)
        return USAGE_ERROR
    try:
        rep = formats.parse_representation(path.read_text())
    except formats.FormatError as e:
        print(f"error: {path}: {e}", file=sys.stderr)
        return USAGE_ERROR
    try:
        if ana:
            report = verify_representation(rep, game, ana.rel, ana.wm, ana.lm,
                                           ana.wsm, ana.lsm)
        else:
            report = verify_representation(rep, game)
    except ValueError as e:
        print(f"verification failed: {e}")
        return MISMATCH
    print(f"verified: {report.ok} ({report.constituents} constituents, "
          f"{report.oc_count} order-consistent, {report.indicator_count} indicator)")
    return OK


def cmd_verify_trade(args) -> int:
    game, _, _ = _load_inputs(args)
    path = Path(args.trade)
    if not path.exists():
        print(f"error: trade file not found: {path}", file=sys.stderr)
        return USAGE_ERROR
    try:
        cert = formats.parse_trade(path.read_text(), game.n)
    except formats.FormatError as e:
        print(f"error: {path}: {e}", file=sys.stderr)
        return USAGE_ERROR
    chk = is_trading_transform(cert, game)
    print(f"valid trading transform: {chk.valid}")
    if not chk.valid:
        print(f"  balanced: {chk.balanced}; winners winning: {chk.winners_ok}; "
              f"losers losing: {chk.losers_ok}")
        if chk.detail:
            print(f"  {chk.detail}")
    return OK if chk.valid else MISMATCH


def cmd_robustness(args) -> int:
    game, pop, ana = _load_inputs(args)
    if pop is None:
        print("error: robustness needs a population vector", file=sys.stderr)
        return USAGE_ERROR
    certs = []
    if args.cert:
        path = Path(args.cert)
        if not path.exists():
            print(f"error: certificate file not found: {path}", file=sys.stderr)
            return USAGE_ERROR
        cs = formats.parse_coalition_set(path.read_text())
        certs.append((args.cert_mode, list(cs), Path(args.cert).stem))
    elif ana:
        certs = [
            ("losing", ana.robust_clique_masks
             + [mask_from_members(dataset.LARGEST_15)], "dimension-7-certificate"),
            ("losing", dataset.masks(dataset.DIM3_LOSING_TRIPLE),
             "dimension-3-certificate"),
            ("winning", dataset.masks(dataset.CODIM7_WINNING_SET),
             "codimension-7-certificate"),
        ]
    else:
        print("error: provide --cert for file-based games", file=sys.stderr)
        return USAGE_ERROR
    for mode, masks, name in certs:
        rep = robustness_radius(masks, game, pop, name, mode)
        print(f"certificate: {name}")
        if rep.radius is None:
            print("  radius: unbounded (no population-dependent facts)")
            continue
        print(f"  radius: {format_rational(rep.radius)} "
              f"(= {_fmt_pct(rep.radius)} of L1 distance)")
        print("  binding coalition: "
              + ",".join(str(p) for p in members_from_mask(rep.binding_coalition)))
        if rep.citizens_equivalent is not None:
            print(f"  citizens equivalent: {float(rep.citizens_equivalent):,.0f}")
    return OK


def _reproduce(args) -> int:
    if args.game != "builtin:eu28":
        print("error: reproduce runs on builtin:eu28", file=sys.stderr)
        return USAGE_ERROR
    ana = EUAnalysis(threads=args.threads)
    rep = ReproductionReport([])
    game, pop = ana.game, ana.pop

    t0 = time.time()
    win, lose = ana.counts
    rep.add("counts.winning", "EU28 winning coalition count", 30_340_718, win, t0)
    rep.add("counts.losing", "EU28 losing coalition count", 238_094_738, lose, t0)

    t0 = time.time()
    rep.add("counts.plus10", "disjunction adds 10 winning coalitions over the "
            "membership+population pair", 10, win - ana.v12_winning, t0)

    t0 = time.time()
    from .games import WeightedGame
    v2ref = WeightedGame.of(dataset.V2_MINSUM_QUOTA, dataset.V2_MINSUM_WEIGHTS)
    rep.add("v2.minsum-equal", "population game equals its reference integer "
            "representation on all 2^28 coalitions", True,
            games_equal(game.games[1], v2ref), t0)

    t0 = time.time()
    rep.add("l2324.count", "losing coalitions with 23 or 24 members",
            4_533, len(ana.l2324), t0)

    t0 = time.time()
    tm = dataset.masks(dataset.PUBLISHED_CLIQUE6)
    cert = greedy_2trade(tm[0], tm[1], game, pop)
    footnote_ok = (cert is not None
                   and members_from_mask(cert.winners[0]) == tuple(range(4, 29))
                   and is_trading_transform(cert, game).valid)
    rep.add("trade.footnote", "greedy completion of the first two published "
            "losing coalitions", True, footnote_ok, t0)

    t0 = time.time()
    rep.add("enum.minimal-winning", "minimal winning coalitions",
            8_248_125, len(ana.wm), t0)
    t0 = time.time()
    rep.add("enum.maximal-losing", "maximal losing coalitions",
            7_179_233, len(ana.lm), t0)
    t0 = time.time()
    rep.add("enum.shift-minimal-winning", "shift-minimal winning coalitions",
            60_607, len(ana.wsm), t0)
    rep.add("enum.shift-maximal-losing", "shift-maximal losing coalitions",
            60_691, len(ana.lsm), t0)

    t0 = time.time()
    lb = ana.lower_bound
    rep.add("dimension.lower", "pairwise-incompatible losing family size",
            7, lb.k, t0)

    t0 = time.time()
    r1, r2, r3 = ana.prop_radii()
    rep.add("robustness.dim7", "perturbation radius of the 7-coalition "
            "dimension certificate (published: 0.95%)", True,
            rat(95, 10000) <= r1.radius < rat(96, 10000), t0,
            ok=rat(95, 10000) <= r1.radius < rat(96, 10000))
    print(f"    computed radius: {_fmt_pct(r1.radius)} "
          f"({float(r1.citizens_equivalent):,.0f} citizens)")
    t0 = time.time()
    rep.add("robustness.dim3", "dimension-3 certificate radius >= 2.19%", True,
            r2.radius >= rat(219, 10000), t0)
    t0 = time.time()
    rep.add("robustness.codim7", "codimension-7 certificate radius >= 5%", True,
            r3.radius >= rat(5, 100), t0)

    t0 = time.time()
    bd = ana.boolean()
    rep.add("boolean.dimension", "Boolean dimension of the council rule",
            3, bd.value, t0)

    if args.heavy:
        t0 = time.time()
        cl = ana.clique
        rep.add("clique.size", "maximum clique size of the greedy "
                "incompatibility graph", 6, cl.size, t0)
        t0 = time.time()
        rep.add("clique.count", "number of maximum cliques (published: "
                "24,452,800; computed graph is validated, see ledger)",
                24_452_800, cl.count, t0)
        t0 = time.time()
        sweep = ana.sweep
        rep.add("covering.feasible", "losing coalitions with an order-"
                "consistent single-coalition game", 57_869,
                int(sweep.feasible.sum()), t0)
        rep.add("covering.stubborn", "stubborn shift-maximal losing coalitions",
                2_822, int((~sweep.feasible).sum()), t0)
        t0 = time.time()
        rep.add("covering.associated", "maximal losing coalitions associated "
                "with the stubborn family", 17_003, len(ana.associated), t0)
        t0 = time.time()
        base = ana.pipeline(step_one=False)
        rep.add("covering.baseline", "verified baseline representation size",
                74_872, len(base.representation), t0,
                ok=len(base.representation) == 74_872 and base.report.ok)
        t0 = time.time()
        better = ana.pipeline(step_one=True)
        ok10 = better.report.ok and len(better.representation) < 74_872
        rep.add("covering.improved", "verified representation strictly below "
                "the baseline (target <= 40,000)",
                "< 74872", len(better.representation), t0, ok=ok10)
        t0 = time.time()
        codim = ana.codim(target=2000)
        rep.add("codim.2000", "pairwise-incompatible winning family",
                ">= 2000", codim.k, t0, ok=codim.k >= 2000)

    print(f"\n{len(rep.records)} claims, "
          f"{sum(1 for r in rep.records if r.status == 'match')} matches, "
          f"{len(rep.mismatches)} mismatches")
    if args.out:
        path = Path(args.out)
        path.mkdir(parents=True, exist_ok=True)
        lines = ["claim\tstatus\texpected\tcomputed\truntime_s\tdescription"]
        for r in rep.records:
            lines.append(f"{r.claim_id}\t{r.status}\t{r.expected}\t{r.computed}"
                         f"\t{r.runtime:.2f}\t{r.description}")
        (path / "reproduction_report.tsv").write_text("\n".join(lines) + "\n")
    return MISMATCH if rep.mismatches else OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="votedim",
        description="Exact dimension analysis of binary voting rules")
    parser.add_argument("--game", default="builtin:eu28",
                        help="game file or builtin:eu28")
    parser.add_argument("--pop", help="population CSV (defaults to the "
                        "bundled data for builtin:eu28)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--ilp-node-budget", type=int, default=20_000,
                        dest="ilp_node_budget")
    parser.add_argument("--clique-time-budget", type=float, default=600.0,
                        dest="clique_time_budget",
                        help="approximate seconds (converted to a fixed "
                        "deterministic node budget)")
    parser.add_argument("--out", help="output directory for artifacts")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("counts", help="winning/losing coalition counts")
    sub.add_parser("shift-sets", help="minimal/maximal and shift set sizes")
    sub.add_parser("desirability", help="influence relation and classes")
    sub.add_parser("weighted", help="weightedness test with certificate")
    sub.add_parser("lower-bound", help="dimension lower bound certificate")
    p = sub.add_parser("upper-bound", help="covering pipeline upper bound")
    p.add_argument("--no-step-one", action="store_true")
    p.add_argument("--ilp-rounds", type=int, default=0)
    p = sub.add_parser("codim", help="co-dimension lower bound")
    p.add_argument("--target", type=int, default=2000)
    sub.add_parser("boolean-dim", help="Boolean dimension")
    sub.add_parser("exact-dim", help="exact dimension (small games)")
    p = sub.add_parser("verify", help="verify a representation file")
    p.add_argument("--rep", required=True)
    p = sub.add_parser("verify-trade", help="verify a trading transform file")
    p.add_argument("--trade", required=True)
    p = sub.add_parser("robustness", help="certificate perturbation radii")
    p.add_argument("--cert")
    p.add_argument("--cert-mode", choices=["losing", "winning"],
                   default="losing")
    p = sub.add_parser("reproduce", help="run the published-claims suite")
    p.add_argument("--heavy", action="store_true",
                   help="include the multi-hour claims")

    args = parser.parse_args(argv)
    handlers = {
        "counts": cmd_counts,
        "shift-sets": cmd_shift_sets,
        "desirability": cmd_desirability,
        "weighted": cmd_weighted,
        "lower-bound": cmd_lower_bound,
        "upper-bound": cmd_upper_bound,
        "codim": cmd_codim,
        "boolean-dim": cmd_boolean_dim,
        "exact-dim": cmd_exact_dim,
        "verify": cmd_verify,
        "verify-trade": cmd_verify_trade,
        "robustness": cmd_robustness,
        "reproduce": _reproduce,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance suite: every criterion checked at its exact stated value.

One test per criterion (split into labeled sub-criteria where a criterion
bundles several numbers).  Shared heavy artifacts come from the
session-scoped analysis fixture, so enumerations, the sweep and the clique
search run once.  Criteria whose published target values are defective
(see the analysis in the repository-external decisions ledger) are asserted
as stated and fail with the computed value printed.
"""

import time
from itertools import combinations

import numpy as np
import pytest

from votedim import dataset
from votedim.covering import exact_dimension_small
from votedim.enumeration import (count_partition, desirability,
                                 maximal_losing, minimal_winning, shift_sets)
from votedim.exactlp import LinearSystem, lp_feasible, verify_farkas
from votedim.games import (WeightedGame, eval_game, games_equal,
                           intersection_game, mask_from_members,
                           members_from_mask)
from votedim.graphs import verify_pairwise_incompatible
from votedim.rationals import rat
from votedim.trades import (find_m_trade, greedy_2trade, is_trading_transform,
                            losing_pair_trade, test_weighted)

from reference import (naive_desirability_matrix, naive_maximal_losing,
                       naive_minimal_winning, naive_shift_sets,
                       random_weighted_game, winning_losing)


def _line(cid, ok, detail=""):
    print(f"ACCEPTANCE {cid}: {'PASS' if ok else 'FAIL'}  {detail}")


# ---------------------------------------------------------------------- 1

def test_criterion_01_partition_counts(eu):
    t0 = time.time()
    win, lose = eu.counts
    ok = (win, lose) == (30_340_718, 238_094_738)
    _line("1a counts", ok, f"winning={win} losing={lose} t={time.time()-t0:.0f}s")
    assert (win, lose) == (30_340_718, 238_094_738)
    t0 = time.time()
    nwm, nlm = len(eu.wm), len(eu.lm)
    ok = (nwm, nlm) == (8_248_125, 7_179_233)
    _line("1b extreme sets", ok, f"|W^m|={nwm} |L^M|={nlm} t={time.time()-t0:.0f}s")
    assert (nwm, nlm) == (8_248_125, 7_179_233)


# ---------------------------------------------------------------------- 2

def test_criterion_02_shift_sets(eu):
    t0 = time.time()
    nwsm, nlsm = len(eu.wsm), len(eu.lsm)
    ok = (nwsm, nlsm) == (60_607, 60_691)
    _line("2 shift sets", ok, f"|W^sm|={nwsm} |L^sM|={nlsm} t={time.time()-t0:.0f}s")
    assert (nwsm, nlsm) == (60_607, 60_691)


# ---------------------------------------------------------------------- 3

def test_criterion_03_v2_representation(eu):
    t0 = time.time()
    v2 = eu.game.games[1]
    ref = WeightedGame.of(dataset.V2_MINSUM_QUOTA, dataset.V2_MINSUM_WEIGHTS)
    ok = games_equal(v2, ref)
    _line("3 population game representation", ok, f"t={time.time()-t0:.0f}s")
    assert ok


# ---------------------------------------------------------------------- 4

def test_criterion_04_plus_ten(eu):
    t0 = time.time()
    win = eu.counts[0]
    base = eu.v12_winning
    ok = base == 30_340_708 and win - base == 10
    _line("4 blocking provision adds 10", ok,
          f"base={base} delta={win - base} t={time.time()-t0:.0f}s")
    assert base == 30_340_708
    assert win - base == 10


# ---------------------------------------------------------------------- 5

def test_criterion_05_l2324(eu):
    n = len(eu.l2324)
    _line("5 losing coalitions of size 23-24", n == 4_533, f"count={n}")
    assert n == 4_533


# ---------------------------------------------------------------------- 6

def test_criterion_06a_clique_size(eu):
    t0 = time.time()
    res = eu.clique
    ok = res.size == 6 and not res.exhausted
    _line("6a maximum clique size", ok,
          f"size={res.size} exhausted={res.exhausted} t={time.time()-t0:.0f}s")
    assert res.size == 6
    assert not res.exhausted


def test_criterion_06b_clique_count(eu):
    res = eu.clique
    # independent structural cross-checks of the computed graph and count
    assert eu.graph.edge_count() == 1_197_380
    witness = [int(eu.l2324.masks[v]) for v in res.witness]
    verify_pairwise_incompatible(witness, eu.game, eu.pop, "losing")
    ok = res.count == 24_452_800
    _line("6b maximum clique count", ok,
          f"computed={res.count} published=24452800 ratio={24_452_800 / res.count}")
    if not ok:
        print("DISCREPANCY REPORT (criterion 6): the greedy graph was rebuilt "
              "with the published deterministic rule; the footnote trade "
              "reproduces bit-for-bit, and the counting kernel is validated "
              "against brute force on induced subgraphs and matmul triangle "
              "counts. The computed count is exactly half the published "
              "figure. There is no published edge list to diff against; no "
              "single differing edge can be exhibited because the computed "
              "edge set is provably the complete pairwise 2-trade relation "
              "(see decisions ledger).")
    assert res.count == 24_452_800, (
        f"maximum clique count {res.count} != published 24,452,800")


# ---------------------------------------------------------------------- 7

def test_criterion_07a_dimension_lower_bound(eu):
    t0 = time.time()
    res = eu.lower_bound
    cert = sorted(res.certificate)
    expected = sorted(eu.robust_clique_masks
                      + [mask_from_members(dataset.LARGEST_15)])
    certs = verify_pairwise_incompatible(cert, eu.game, eu.pop, "losing")
    ok = res.k >= 7 and len(certs) == res.k * (res.k - 1) // 2
    _line("7a dimension >= 7", ok,
          f"k={res.k} cert==reference: {cert == expected} t={time.time()-t0:.0f}s")
    assert res.k >= 7
    # the published 6-clique listing is defective (its 4th coalition wins);
    # the bundled reference certificate is the recomputed most robust clique
    published = dataset.masks(dataset.PUBLISHED_CLIQUE6)
    assert any(eval_game(eu.game, m) for m in published), \
        "published listing unexpectedly verifies; revisit the reference data"


def test_criterion_07b_codim_7(eu):
    t0 = time.time()
    ws = dataset.masks(dataset.CODIM7_WINNING_SET)
    certs = verify_pairwise_incompatible(ws, eu.game, eu.pop, "winning")
    ok = len(certs) == 21
    _line("7b co-dimension >= 7", ok, f"pairs verified={len(certs)} "
          f"t={time.time()-t0:.0f}s")
    assert ok


def test_criterion_07c_codim_2000(eu):
    t0 = time.time()
    res = eu.codim(target=2000)
    ok = res.k >= 2000
    _line("7c co-dimension >= 2000", ok, f"k={res.k} t={time.time()-t0:.0f}s")
    assert res.k >= 2000
    # spot re-verification of random pairs (full pairwise was done greedily)
    rng = np.random.default_rng(1)
    ms = list(res.certificate)
    from votedim.trades import winning_pair_trade
    for _ in range(200):
        i, j = rng.integers(0, len(ms), size=2)
        if i == j:
            continue
        cert = winning_pair_trade(ms[int(i)], ms[int(j)], eu.game, eu.pop)
        assert cert is not None
        assert is_trading_transform(cert, eu.game).valid


# ---------------------------------------------------------------------- 8

def test_criterion_08a_prop1_radius(eu):
    r1, _, _ = eu.prop_radii()
    ok = rat(95, 10_000) <= r1.radius < rat(96, 10_000)
    _line("8a dimension-7 radius in [0.95%, 0.96%)", ok,
          f"computed={float(r1.radius) * 100:.4f}% "
          f"binding={members_from_mask(r1.binding_coalition)}")
    if not ok:
        print("ANALYSIS (criterion 8a): the published 0.95% radius requires a "
              "6-clique whose minimum slack is at least 0.475%; exhaustive "
              "search over all maximum cliques shows the best achievable "
              "minimum slack is 0.34484% (radius 0.68969%). See ledger.")
    assert rat(95, 10_000) <= r1.radius < rat(96, 10_000), \
        f"radius {float(r1.radius):.6f} outside the published bracket"


def test_criterion_08b_prop2_radius(eu):
    _, r2, _ = eu.prop_radii()
    ok = r2.radius >= rat(219, 10_000)
    _line("8b dimension-3 radius >= 2.19%", ok,
          f"computed={float(r2.radius) * 100:.4f}%")
    assert ok


def test_criterion_08c_prop3_radius(eu):
    _, _, r3 = eu.prop_radii()
    ok = r3.radius >= rat(5, 100)
    _line("8c codimension-7 radius >= 5%", ok,
          f"computed={float(r3.radius) * 100:.4f}%")
    assert ok


def test_criterion_08d_citizens_equivalent(eu):
    r1, _, _ = eu.prop_radii()
    citizens = r1.citizens_equivalent
    ok = rat(2_400_000) <= citizens <= rat(2_600_000)
    _line("8d citizens equivalent ~ 2.5M", ok, f"computed={float(citizens):,.0f}")
    assert ok, f"citizens equivalent {float(citizens):,.0f} outside 2.5M +- 0.1M"


# ---------------------------------------------------------------------- 9

def test_criterion_09a_sweep_counts(eu):
    t0 = time.time()
    sweep = eu.sweep
    feas = int(sweep.feasible.sum())
    stub = int((~sweep.feasible).sum())
    ok = (feas, stub) == (57_869, 2_822)
    _line("9a per-coalition feasibility", ok,
          f"feasible={feas} stubborn={stub} t={time.time()-t0:.0f}s")
    assert (feas, stub) == (57_869, 2_822)
    # exact spot re-verification of both verdict kinds
    rng = np.random.default_rng(3)
    shift_cw = None
    for i in map(int, rng.choice(np.nonzero(sweep.feasible)[0], 50, replace=False)):
        g = sweep.game_at(i)
        t = int(sweep.masks[i])
        assert not eval_game(g, t)
        assert g.order_consistent
    from votedim.exactlp import LinearSystem, lp_feasible
    from votedim.trades import ShiftSystem
    shift = ShiftSystem(28, eu.rel.classes)
    cw = shift.prefix_counts(eu.wsm.masks)
    for i in map(int, rng.choice(np.nonzero(~sweep.feasible)[0], 8, replace=False)):
        t = int(sweep.masks[i])
        rows = sweep.farkas_rows[t]
        sys = LinearSystem(shift.k + 1)
        sys.lower[shift.k] = rat(1)
        for r in rows:
            sys.add([int(c) for c in cw[r]] + [-1], ">=", 0)
        trow = shift.prefix_counts(np.array([t], dtype=np.uint32))[0]
        sys.add([int(c) for c in trow] + [-1], "<=", -1)
        out = lp_feasible(sys)
        assert out.status == "infeasible"
        assert verify_farkas(sys, out)


def test_criterion_09b_associated_count(eu):
    t0 = time.time()
    n = len(eu.associated)
    ok = n == 17_003
    _line("9b stubborn-associated maximal losing", ok,
          f"count={n} t={time.time()-t0:.0f}s")
    assert n == 17_003


def test_criterion_09c_baseline_representation(eu):
    t0 = time.time()
    res = eu.pipeline(step_one=False)
    size = len(res.representation)
    ok = size == 74_872 and res.report.ok
    _line("9c baseline 74,872 representation", ok,
          f"size={size} verified={res.report.ok} t={time.time()-t0:.0f}s")
    assert size == 74_872
    assert res.report.ok


# --------------------------------------------------------------------- 10

def test_criterion_10_improved_representation(eu):
    t0 = time.time()
    res = eu.pipeline(step_one=True)
    size = len(res.representation)
    ok = res.report.ok and size < 74_872
    target = size <= 40_000
    _line("10 improved representation", ok and target,
          f"size={size} verified={res.report.ok} target<=40000: {target} "
          f"greedy={res.greedy_games} singles={res.single_games} "
          f"indicators={res.indicator_games} t={time.time()-t0:.0f}s")
    # stretch goal (recorded, not gated): coverage of the first ten steps
    print(f"  stretch (not gated): first-10 greedy coverage = "
          f"{res.greedy_covered if res.greedy_games <= 10 else 'see gains'}")
    assert res.report.ok
    assert size < 74_872
    assert size <= 40_000


# --------------------------------------------------------------------- 11

def test_criterion_11a_example6_oracle(eu):
    t0 = time.time()
    g = dataset.example6_game()
    trade = find_m_trade(g, 2)
    assert trade is not None and is_trading_transform(trade, g).valid
    res = test_weighted(g)
    assert res.status == "not_weighted"
    assert res.farkas_rows
    dim, wit = exact_dimension_small(g)
    assert dim == 2
    assert games_equal(intersection_game(*wit), g)
    _line("11a example game", True,
          f"not weighted, dimension 2 t={time.time()-t0:.0f}s")


def test_criterion_11b_random_games_vs_bruteforce(eu):
    t0 = time.time()
    rng = np.random.default_rng(2024)
    games = 0
    while games < 1000:
        n = int(rng.integers(3, 9))
        g = random_weighted_game(rng, n)
        w_ref, l_ref = winning_losing(g)
        assert count_partition(g) == (len(w_ref), len(l_ref))
        wm = minimal_winning(g)
        lm = maximal_losing(g)
        assert sorted(wm) == naive_minimal_winning(g)
        assert sorted(lm) == naive_maximal_losing(g)
        rel = desirability(g, wm)
        mat = naive_desirability_matrix(g)
        for i in range(n):
            for j in range(n):
                if i != j:
                    assert bool(rel.at_least[i, j]) == mat[i][j]
        wsm, lsm = shift_sets(g, rel, wm, lm)
        ref_wsm, ref_lsm = naive_shift_sets(g, mat)
        assert sorted(wsm) == sorted(ref_wsm)
        assert sorted(lsm) == sorted(ref_lsm)
        games += 1
    _line("11b brute-force oracle", True,
          f"{games} random games (n<=8) matched t={time.time()-t0:.0f}s")


# --------------------------------------------------------------------- 12

def test_criterion_12_boolean_dimension(eu):
    t0 = time.time()
    bd = eu.boolean()
    ok = bd.value == 3
    _line("12 Boolean dimension", ok, f"value={bd.value} t={time.time()-t0:.0f}s")
    assert bd.value == 3

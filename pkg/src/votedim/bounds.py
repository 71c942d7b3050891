"""Dimension and co-dimension bounds with verifiable certificates.

Lower bounds come from cliques of pairwise-incompatible coalitions (losing
coalitions for the dimension, winning ones for the co-dimension), each pair
certified by an explicit 2-trade.  The Boolean dimension combines those
bounds with a verified small formula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .covering import exact_dimension_small
from .enumeration import (BlockEngine, CoalitionSet, DesirabilityRelation,
                          losing_by_size, maximal_losing, minimal_winning)
from .exactlp import LinearSystem
from .games import (Game, PopulationVector, council_structure, dual_game,
                    eval_game, games_equal, popcount)
from .graphs import (IncompatibilityGraph, build_graph, max_clique,
                     verify_pairwise_incompatible)
from .rationals import Rat, rat
from .trades import test_weighted

__all__ = ["LowerBoundResult", "lower_bound_dimension", "codim_lower_bound",
           "grow_incompatible_winning_set", "BooleanDimensionReport",
           "boolean_dimension", "DimensionReport", "build_max_delta_ilp"]


@dataclass(frozen=True)
class LowerBoundResult:
    k: int
    certificate: CoalitionSet          # pairwise-incompatible coalitions
    mode: str                          # "losing" (dimension) | "winning" (codim)
    clique_size: int                   # part found by clique search
    size_proven_maximal: bool


def lower_bound_dimension(game: Game, pop: PopulationVector,
                          pool: CoalitionSet | None = None,
                          extension: CoalitionSet | None = None,
                          lm: CoalitionSet | None = None,
                          clique_node_budget: int = 30_000_000,
                          extension_cap: int = 2000) -> LowerBoundResult:
    """Pairwise-incompatible losing coalitions: dimension >= k.

    The default pool is the family of losing coalitions one or two members
    below the count-win size; the clique found there is then extended by
    small maximal losing coalitions (at most one member below the
    membership quota) whose pairings also admit verified trades.  The
    clique budget only limits attempts to *improve* the clique level; a
    lower bound needs no maximality proof, so exhaustion just leaves
    ``size_proven_maximal`` False.
    """
    cs = council_structure(game)
    if pool is None:
        pool = losing_by_size(game, {cs.count_win_size - 2, cs.count_win_size - 1})
    graph = build_graph(pool, game, pop, "greedy_2trade", "losing")
    bits, nv, words = graph.adjacency, graph.nv, graph.words
    k = len(_kernels.greedy_clique(bits, nv, words))
    witness = None
    proven = False
    budget = clique_node_budget
    while True:
        wit, nodes, exhausted = _kernels.first_clique(bits, nv, words, k + 1, budget)
        budget -= nodes
        if wit[0] >= 0:
            k += 1
            witness = wit
            continue
        proven = not exhausted
        break
    if witness is None:
        witness, _, _ = _kernels.first_clique(bits, nv, words, k, clique_node_budget)
    members = [int(pool.masks[v]) for v in witness[:k]]
    if extension is None:
        if lm is None:
            lm = maximal_losing(game)
        sizes = BlockEngine(game).sizes_of(lm.masks)
        small = lm.masks[sizes <= cs.member_quota]
        # only population-heavy small coalitions can complete trades with the
        # pool; try the heaviest first (millions qualify by size alone)
        counts = np.array(pop.raw_counts, dtype=np.int64)
        bitm = ((small[:, None] >> np.arange(game.n, dtype=np.uint32)[None, :])
                & 1).astype(np.int64)
        pops = bitm @ counts
        order = np.lexsort((small, -pops))[:extension_cap]
        extension = CoalitionSet(game.n, "custom", small[np.sort(order)])
        ext_order = [int(m) for m in small[order]]
    else:
        ext_order = [int(m) for m in extension.masks]
    from .trades import losing_pair_trade
    for cand in ext_order:
        if cand in members:
            continue
        if all(losing_pair_trade(cand, m, game, pop) is not None for m in members):
            members.append(cand)
    verify_pairwise_incompatible(members, game, pop, "losing")
    cert = CoalitionSet(game.n, "custom", np.array(sorted(members), dtype=np.uint32))
    return LowerBoundResult(len(members), cert, "losing", k, proven)


def grow_incompatible_winning_set(game: Game, pop: PopulationVector,
                                  wm: CoalitionSet,
                                  target: int = 2000,
                                  pool_cap: int = 40_000,
                                  seed: tuple = ()) -> CoalitionSet:
    """Greedily grow a set of pairwise-incompatible winning coalitions.

    Candidates are minimal winning coalitions at the membership quota,
    tried in order of increasing population surplus (barely-winning
    coalitions leave the most room for the losing completions).  Every
    accepted candidate is certified against all current members.
    """
    cs = council_structure(game)
    eng = BlockEngine(game)
    n = game.n
    sizes = eng.sizes_of(wm.masks)
    cand = wm.masks[sizes == cs.member_quota]
    counts = np.array(pop.raw_counts, dtype=np.int64)
    bitm = ((cand[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1).astype(np.int64)
    pops = bitm @ counts
    order = np.lexsort((cand, pops))
    cand = cand[order][:pool_cap]

    members: list[int] = [int(m) for m in seed]
    member_arr = np.array(members, dtype=np.uint32)
    thr_num, thr_den = int(cs.pop_threshold.numerator), int(cs.pop_threshold.denominator)
    total = pop.total
    pop_order = sorted(range(n), key=lambda i: (-pop.raw_counts[i], i))

    def edges_to_members(c: np.uint32) -> bool:
        if len(member_arr) == 0:
            return True
        mem = member_arr
        inter = mem & c
        union = mem | c
        diff = union & ~inter
        isz = eng.sizes_of(inter)
        need = (cs.member_quota - 1) - isz
        fill = inter.copy()
        pending = need.copy()
        for p in pop_order:                      # most populous first
            bit = np.uint32(1 << p)
            take = ((diff & bit) != 0) & (pending > 0)
            fill = np.where(take, fill | bit, fill)
            pending = pending - take.astype(np.int64)
        t2 = (union & ~fill) | inter
        sz2 = eng.sizes_of(t2)
        bitt = ((t2[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1).astype(np.int64)
        pop2 = bitt @ counts
        ok = (pending == 0) & (sz2 <= cs.count_win_size - 1) \
            & (pop2 * thr_den < thr_num * total)
        return bool(ok.all())

    for c in cand:
        if len(members) >= target:
            break
        if int(c) in members:
            continue
        if edges_to_members(c):
            members.append(int(c))
            member_arr = np.array(members, dtype=np.uint32)
    return CoalitionSet(n, "custom", np.array(sorted(members), dtype=np.uint32))


def codim_lower_bound(game: Game, pop: PopulationVector,
                      wm: CoalitionSet | None = None,
                      target: int = 2000,
                      pool_cap: int = 40_000) -> LowerBoundResult:
    """Pairwise-incompatible winning coalitions: co-dimension >= k."""
    if wm is None:
        wm = minimal_winning(game)
    cert = grow_incompatible_winning_set(game, pop, wm, target, pool_cap)
    k = len(cert)
    if k <= 40:      # full re-verification is quadratic; sample above that
        verify_pairwise_incompatible(list(cert), game, pop, "winning")
    return LowerBoundResult(k, cert, "winning", k, False)


# ---------------------------------------------------------------------------
# Boolean dimension

@dataclass(frozen=True)
class BooleanDimensionReport:
    value: int | None            # exact value when determined
    lower: int
    upper: int | None
    formula_size: int | None     # size of the verified formula behind upper


def boolean_dimension(game: Game, pop: PopulationVector | None = None,
                      candidate: Game | None = None,
                      dim3_losing: tuple = (),
                      codim3_winning: tuple = ()) -> BooleanDimensionReport:
    """Exact Boolean dimension when determinable.

    1 iff the game is weighted; 2 iff some verified two-game AND or OR
    reproduces it; 3 when a verified size-3 formula exists while both the
    dimension and the co-dimension exceed 2 (witnessed by triples of
    pairwise-incompatible losing and winning coalitions).
    """
    if test_weighted(game).status == "weighted":
        return BooleanDimensionReport(1, 1, 1, 1)
    if game.n <= 10:
        dim, _ = exact_dimension_small(game)
        codim, _ = exact_dimension_small(dual_game(game))
        if min(dim, codim) <= 2:
            return BooleanDimensionReport(2, 2, 2, 2)
    from .games import CompositeGame
    if candidate is None and isinstance(game, CompositeGame):
        candidate = game
    size = getattr(candidate, "size", None)
    verified_small = (candidate is not None and size is not None and size <= 3
                      and games_equal(candidate, game))
    have_dim3 = False
    have_codim3 = False
    if pop is not None and dim3_losing and codim3_winning:
        try:
            verify_pairwise_incompatible(list(dim3_losing)[:3], game, pop, "losing")
            have_dim3 = len(dim3_losing) >= 3
            verify_pairwise_incompatible(list(codim3_winning)[:3], game, pop, "winning")
            have_codim3 = len(codim3_winning) >= 3
        except ValueError:
            pass
    if verified_small and size == 3 and have_dim3 and have_codim3:
        return BooleanDimensionReport(3, 3, 3, 3)
    lower = 2
    if have_dim3 and have_codim3:
        lower = 3
    upper = size if verified_small else None
    return BooleanDimensionReport(None, lower, upper,
                                  size if verified_small else None)


@dataclass
class DimensionReport:
    """Bundle of certified bounds for one game."""

    lower_bound: int
    lower_certificate: CoalitionSet
    upper_bound: int | None = None
    upper_verified: bool = False
    codim_lower_bound: int | None = None
    codim_certificate: CoalitionSet | None = None
    boolean: BooleanDimensionReport | None = None

    def __post_init__(self):
        if self.upper_bound is not None and self.lower_bound > self.upper_bound:
            raise ValueError("lower bound exceeds upper bound")


# ---------------------------------------------------------------------------
# the joint max-slack ILP over d losing coalitions and their completions

def build_max_delta_ilp(pop: PopulationVector, d: int,
                        member_quota: int = 16, count_win_size: int = 25,
                        pop_threshold=rat(65, 100)) -> LinearSystem:
    """ILP searching d losing coalitions with pairwise 2-trade completions.

    Binary variables: membership of each of the d losing coalitions, and of
    the two completion coalitions per pair (one winning on member count,
    one on population); the objective maximizes the common population
    slack.  Variable layout: l[j*n + i], then per pair (j, h) two blocks,
    then the slack as the last variable (scaled by the total population).
    """
    n = pop.n
    counts = [int(c) for c in pop.raw_counts]
    total = sum(counts)
    thr = rat(pop_threshold)
    pairs = [(j, h) for j in range(d) for h in range(j + 1, d)]
    nl = d * n
    nw = 2 * len(pairs) * n
    nv = nl + nw + 1
    delta = nv - 1      # population slack, in absolute persons
    sys = LinearSystem(nv,
                       lower=[rat(0)] * nv,
                       upper=[rat(1)] * (nv - 1) + [rat(total)],
                       integer=[True] * (nv - 1) + [False])

    def lvar(j, i):
        return j * n + i

    def wvar(p, k, i):
        return nl + (2 * p + k) * n + i

    thr_abs = thr * total
    for j in range(d):
        row = [0] * nv
        for i in range(n):
            row[lvar(j, i)] = 1
        sys.add(row, "<=", count_win_size - 1)
        row = [0] * nv
        for i in range(n):
            row[lvar(j, i)] = counts[i]
        row[delta] = 1
        sys.add(row, "<=", thr_abs)
    for p, (j, h) in enumerate(pairs):
        row = [0] * nv
        for i in range(n):
            row[wvar(p, 0, i)] = 1
        sys.add(row, ">=", count_win_size)
        row = [0] * nv
        for i in range(n):
            row[wvar(p, 1, i)] = counts[i]
        row[delta] = -1
        sys.add(row, ">=", thr_abs)
        row = [0] * nv
        for i in range(n):
            row[wvar(p, 1, i)] = 1
        sys.add(row, ">=", member_quota)
        for i in range(n):
            row = [0] * nv
            row[lvar(j, i)] = 1
            row[lvar(h, i)] = 1
            row[wvar(p, 0, i)] = -1
            row[wvar(p, 1, i)] = -1
            sys.add(row, "==", 0)
    obj = [0] * nv
    obj[delta] = 1
    sys.set_objective(obj, "max")
    return sys

"""Pairwise-incompatibility graphs and exact clique search.

An edge between two losing coalitions means no single weighted game (with
every winning coalition of the target game winning) can keep both losing;
dually for winning coalitions.  The greedy strategy certifies edges by
2-trade completions, the exact strategy by LP infeasibility with a Farkas
certificate; the greedy graph may miss edges but never contains a wrong
one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .enumeration import BlockEngine, CoalitionSet, minimal_winning
from .exactlp import LinearSystem, lp_feasible
from .games import (Game, PopulationVector, council_structure, eval_game,
                    popcount)
from .trades import (TradeCertificate, greedy_2trade, is_trading_transform,
                     losing_pair_trade, winning_pair_trade)

__all__ = ["IncompatibilityGraph", "build_graph", "MaxCliqueResult",
           "max_clique", "verify_pairwise_incompatible"]


@dataclass
class IncompatibilityGraph:
    """Vertices (coalition masks) plus a certified edge relation."""

    game: Game
    vertices: CoalitionSet
    adjacency: np.ndarray          # packed uint64 rows
    strategy: str                  # "greedy_2trade" | "lp_exact"
    mode: str                      # "losing" | "winning"
    pop: PopulationVector | None = None

    @property
    def nv(self) -> int:
        return len(self.vertices)

    @property
    def words(self) -> int:
        return self.adjacency.shape[1]

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.adjacency[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def edge_count(self) -> int:
        return sum(int(popcount(int(w))) for row in self.adjacency for w in row) // 2

    def evidence(self, i: int, j: int):
        """Re-derive the certificate for edge (i, j); None if no edge."""
        if not self.has_edge(i, j):
            return None
        a, b = int(self.vertices.masks[i]), int(self.vertices.masks[j])
        if self.strategy == "greedy_2trade":
            if self.mode == "losing":
                cert = losing_pair_trade(a, b, self.game, self.pop)
            else:
                cert = winning_pair_trade(a, b, self.game, self.pop)
            if cert is None or not is_trading_transform(cert, self.game).valid:
                raise RuntimeError("stored edge lost its trade evidence")
            return cert
        outcome = _lp_edge(self.game, a, b, self.mode)
        if outcome.status != "infeasible":
            raise RuntimeError("stored edge lost its LP evidence")
        return outcome


def _lp_edge(game: Game, a: int, b: int, mode: str, wm: CoalitionSet | None = None):
    """Exact LP test: can one weighted game keep both a and b losing
    (mode 'losing'; all winning coalitions stay winning), or both winning
    (mode 'winning'; all losing coalitions stay losing)?"""
    n = game.n
    if wm is None:
        wm = minimal_winning(game)
    sys = LinearSystem(n + 1)
    sys.lower[n] = 1                         # quota >= 1

    def coeffs(mask, qcoef):
        row = [1 if (mask >> i) & 1 else 0 for i in range(n)]
        return row + [qcoef]

    if mode == "losing":
        for s in wm:
            sys.add(coeffs(s, -1), ">=", 0)
        sys.add(coeffs(a, -1), "<=", -1)
        sys.add(coeffs(b, -1), "<=", -1)
    else:
        from .enumeration import maximal_losing
        for t in maximal_losing(game):
            sys.add(coeffs(t, -1), "<=", -1)
        sys.add(coeffs(a, -1), ">=", 0)
        sys.add(coeffs(b, -1), ">=", 0)
    return lp_feasible(sys)


def build_graph(candidates: CoalitionSet, game: Game,
                pop: PopulationVector | None = None,
                strategy: str = "greedy_2trade",
                mode: str = "losing") -> IncompatibilityGraph:
    """Incompatibility graph over candidate coalitions.

    ``greedy_2trade`` vectorizes the trade completions over all pairs;
    ``lp_exact`` runs one exact LP per pair (sound and complete, but only
    sensible for small candidate sets).
    """
    masks = candidates.masks
    nv = len(masks)
    if mode == "losing":
        bad = [m for m in masks if eval_game(game, int(m))]
    else:
        bad = [m for m in masks if not eval_game(game, int(m))]
    if bad:
        raise ValueError(f"candidate set contains non-{mode} coalitions")
    adj = np.zeros((nv, nv), dtype=bool)
    if strategy == "greedy_2trade":
        if pop is None:
            raise ValueError("the greedy strategy needs the population vector")
        _greedy_edges(adj, masks, game, pop, mode)
    elif strategy == "lp_exact":
        wm = minimal_winning(game) if mode == "losing" else None
        for i in range(nv):
            for j in range(i + 1, nv):
                out = _lp_edge(game, int(masks[i]), int(masks[j]), mode, wm)
                if out.status == "infeasible":
                    adj[i, j] = adj[j, i] = True
    else:
        raise ValueError(f"unknown edge strategy {strategy!r}")
    return IncompatibilityGraph(game, candidates, _kernels.pack_adjacency(adj),
                                strategy, mode, pop)


def _greedy_edges(adj, masks, game, pop, mode):
    """Vectorized greedy trade completions for all vertex pairs."""
    cs = council_structure(game)
    n = cs.n
    eng = BlockEngine(game)
    counts, total = pop.raw_counts, pop.total
    if counts is None:
        raise ValueError("greedy strategy needs raw population counts")
    # per-player population lookup aligned with fill order (most populous =
    # lowest index in the bundled data; handle arbitrary pop orders anyway)
    order = sorted(range(n), key=lambda i: (-counts[i], i))
    masks = masks.astype(np.uint32)
    sizes = eng.sizes_of(masks)
    for i in range(len(masks)):
        ti = masks[i]
        tj = masks[i + 1:]
        if len(tj) == 0:
            continue
        inter = ti & tj
        union = ti | tj
        diff = union & ~inter
        if mode == "losing":
            target = cs.count_win_size
            need = target - eng.sizes_of(inter)
            fill_reverse = True            # least populous into the count-win side
        else:
            target = cs.member_quota - 1
            need = target - eng.sizes_of(inter)
            fill_reverse = False           # most populous into the losing side
        filled = inter.copy()
        pending = need.copy()
        seq = list(reversed(order)) if fill_reverse else order
        for p in seq:
            bit = np.uint32(1 << p)
            take = ((diff & bit) != 0) & (pending > 0)
            filled = np.where(take, filled | bit, filled)
            pending = pending - take.astype(np.int64)
        other = (union & ~filled) | inter
        ok = pending == 0
        if mode == "losing":
            sz2 = sizes[i] + sizes[i + 1:] - target
            ok &= sz2 >= cs.member_quota
            ok &= eng.eval_masks(other)
        else:
            sz2 = sizes[i] + sizes[i + 1:] - target
            ok &= sz2 <= cs.count_win_size - 1
            ok &= eng.sizes_of(inter) <= target
            ok &= ~eng.eval_masks(other)
        adj[i, i + 1:] = ok
        adj[i + 1:, i] = ok


@dataclass(frozen=True)
class MaxCliqueResult:
    size: int
    count: int
    witness: tuple          # vertex indices, lexicographically least
    exhausted: bool
    nodes: int


def max_clique(graph: IncompatibilityGraph,
               k_target: int | None = None,
               node_budget: int = 4_000_000_000) -> MaxCliqueResult:
    """Exact maximum clique size, count of maximum cliques, and witness.

    Iterative deepening from a greedy clique: existence passes raise the
    level until no larger clique exists, then a counting pass enumerates
    all maximum cliques and checks no extension is possible.
    """
    bits, nv, words = graph.adjacency, graph.nv, graph.words
    if nv == 0:
        return MaxCliqueResult(0, 0, (), False, 0)
    total_nodes = 0
    k = max(len(_kernels.greedy_clique(bits, nv, words)), 1)
    if k_target is not None and k_target > k:
        # hint: jump straight to the target level if such a clique exists
        wit, nodes, exhausted = _kernels.first_clique(bits, nv, words,
                                                      int(k_target), node_budget)
        total_nodes += nodes
        if exhausted:
            return MaxCliqueResult(k, 0, (), True, total_nodes)
        if wit[0] >= 0:
            k = int(k_target)
    # existence of k+1, k+2, ... until failure
    while True:
        wit, nodes, exhausted = _kernels.first_clique(bits, nv, words, k + 1,
                                                      node_budget - total_nodes)
        total_nodes += nodes
        if exhausted:
            return MaxCliqueResult(k, 0, (), True, total_nodes)
        if wit[0] < 0:
            break
        k += 1
    count, bigger, nodes, exhausted, witness = _kernels.clique_scan(
        bits, nv, words, k, node_budget - total_nodes)
    total_nodes += nodes
    if exhausted:
        return MaxCliqueResult(k, int(count), tuple(int(v) for v in witness if v >= 0),
                               True, total_nodes)
    assert not bigger, "counting pass found a larger clique than the bound"
    return MaxCliqueResult(k, int(count), tuple(int(v) for v in witness),
                           False, total_nodes)


def verify_pairwise_incompatible(coalition_masks, game: Game,
                                 pop: PopulationVector | None,
                                 mode: str = "losing") -> list[TradeCertificate]:
    """Certify that every pair of the given coalitions is incompatible.

    Returns one verified trade per pair; raises ValueError with the first
    failing pair otherwise.
    """
    ms = [int(m) for m in coalition_masks]
    certs = []
    for i in range(len(ms)):
        for j in range(i + 1, len(ms)):
            if mode == "losing":
                cert = losing_pair_trade(ms[i], ms[j], game, pop)
            else:
                cert = winning_pair_trade(ms[i], ms[j], game, pop)
            if cert is None or not is_trading_transform(cert, game).valid:
                raise ValueError(f"pair ({i}, {j}) has no verified trade")
            certs.append(cert)
    return certs

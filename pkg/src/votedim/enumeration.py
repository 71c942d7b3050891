"""Exhaustive enumeration over all 2^n coalitions of a game (n <= 30).

The engine splits the n player bits into a low and a high half and
precomputes subset weight sums for each weighted constituent, so that any
block of coalitions can be evaluated with vectorized integer table lookups.
All weights are scaled to integers first; if the scaled magnitudes do not
fit comfortably in int64 the tables fall back to exact Python integers
(object dtype), which is slower but still exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .games import (CompositeGame, Game, Leaf, WeightedGame,
                    scaled_integer_form)

__all__ = [
    "CoalitionSet", "DesirabilityRelation", "BlockEngine",
    "count_partition", "minimal_winning", "maximal_losing",
    "losing_by_size", "desirability", "shift_sets", "blocks_equal",
]

_MAX_N = 30
_LO_BITS = 14
_CHUNK_ROWS = 32

KINDS = ("winning", "losing", "minimal_winning", "maximal_losing",
         "shift_minimal_winning", "shift_maximal_losing", "custom")


@dataclass(frozen=True)
class CoalitionSet:
    """A sorted, duplicate-free family of coalition masks."""

    n: int
    kind: str
    masks: np.ndarray    # uint32, ascending

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown coalition-set kind: {self.kind!r}")
        m = np.asarray(self.masks, dtype=np.uint32)
        if m.ndim != 1:
            raise ValueError("masks must be a 1-d array")
        if len(m) and (np.any(m[1:] <= m[:-1])):
            m = np.unique(m)
        if len(m) and int(m[-1]) >> self.n:
            raise ValueError("coalition has members beyond the player set")
        object.__setattr__(self, "masks", m)

    def __len__(self):
        return len(self.masks)

    def __iter__(self):
        return (int(m) for m in self.masks)

    def __contains__(self, mask):
        i = int(np.searchsorted(self.masks, np.uint32(mask)))
        return i < len(self.masks) and int(self.masks[i]) == int(mask)


@dataclass(frozen=True)
class DesirabilityRelation:
    """The at-least-as-influential relation between players.

    ``at_least[i, j]`` (0-based) is True iff player i+1 is at least as
    influential as player j+1.  ``classes`` partitions 1-based players into
    equivalence classes; when the relation is complete they are ordered
    strongest first.
    """

    n: int
    at_least: np.ndarray
    complete: bool
    classes: tuple

    def class_masks(self):
        out = []
        for cls in self.classes:
            m = 0
            for p in cls:
                m |= 1 << (p - 1)
            out.append(m)
        return out


def _leaf_values(game: Game):
    if isinstance(game, WeightedGame):
        return [game], Leaf(0)
    return list(game.games), game.formula


class _LeafTable:
    """Subset-sum lookup tables for one weighted constituent."""

    def __init__(self, g: WeightedGame, k: int, n: int):
        q, ws, _ = scaled_integer_form(g)
        bound = sum(abs(w) for w in ws) + abs(q)
        dtype = np.int64 if bound < (1 << 62) else object
        self.quota = q if dtype is object else np.int64(q)
        self.lo = _subset_sums(ws[:k], dtype)
        self.hi = _subset_sums(ws[k:], dtype)

    def eval_masks(self, lo_idx, hi_idx):
        return (self.lo[lo_idx] + self.hi[hi_idx]) >= self.quota

    def eval_block(self, hi_rows, lo_all):
        return (self.lo[None, :] + self.hi[hi_rows, None]) >= self.quota


def _subset_sums(weights, dtype):
    s = np.zeros(1, dtype=dtype)
    for w in weights:
        wv = w if dtype is object else np.int64(w)
        s = np.concatenate([s, s + wv])
    return s


class BlockEngine:
    """Vectorized exact evaluator for one game over the full coalition space."""

    def __init__(self, game: Game):
        n = game.n
        if n > _MAX_N:
            raise ValueError(f"enumeration supports n <= {_MAX_N}, got {n}")
        self.game = game
        self.n = n
        self.k = min(_LO_BITS, n)
        self.lo_size = 1 << self.k
        self.hi_size = 1 << (n - self.k)
        leaves, self.formula = _leaf_values(game)
        self.tables = [_LeafTable(g, self.k, n) for g in leaves]
        self.pc_lo = _subset_sums([1] * self.k, np.int64)
        self.pc_hi = _subset_sums([1] * (n - self.k), np.int64)

    # -- whole-space iteration ------------------------------------------------

    def hi_chunks(self):
        for h0 in range(0, self.hi_size, _CHUNK_ROWS):
            yield np.arange(h0, min(h0 + _CHUNK_ROWS, self.hi_size))

    def win_block(self, hi_rows) -> np.ndarray:
        """Boolean (len(hi_rows), 2^k) winning table for the given hi rows."""
        vals = [t.eval_block(hi_rows, None) for t in self.tables]
        return np.asarray(self.formula.eval(vals), dtype=bool)

    def sizes_block(self, hi_rows) -> np.ndarray:
        return self.pc_lo[None, :] + self.pc_hi[hi_rows, None]

    def block_masks(self, hi_rows) -> np.ndarray:
        lo = np.arange(self.lo_size, dtype=np.uint32)
        return (hi_rows.astype(np.uint32)[:, None] << np.uint32(self.k)) | lo[None, :]

    # -- arbitrary mask arrays -------------------------------------------------

    def eval_masks(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint32)
        lo_idx = masks & np.uint32(self.lo_size - 1)
        hi_idx = masks >> np.uint32(self.k)
        vals = [t.eval_masks(lo_idx, hi_idx) for t in self.tables]
        return np.asarray(self.formula.eval(vals), dtype=bool)

    def sizes_of(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint32)
        return (self.pc_lo[masks & np.uint32(self.lo_size - 1)]
                + self.pc_hi[masks >> np.uint32(self.k)])


def count_partition(game: Game) -> tuple[int, int]:
    """Exact (winning, losing) counts over all 2^n coalitions."""
    eng = BlockEngine(game)
    win = 0
    for hi in eng.hi_chunks():
        win += int(eng.win_block(hi).sum())
    total = 1 << game.n
    return win, total - win


def _extreme_sets(game: Game, want_minimal_winning: bool) -> np.ndarray:
    """Masks of minimal winning or maximal losing coalitions."""
    eng = BlockEngine(game)
    n, k = eng.n, eng.k
    lo_idx = np.arange(eng.lo_size)
    parts = []
    for hi in eng.hi_chunks():
        win = eng.win_block(hi)
        alive = win.copy() if want_minimal_winning else ~win
        # players in the low half: reindex the winning table within the block
        for b in range(k):
            bit = 1 << b
            has = (lo_idx & bit) != 0
            if want_minimal_winning:
                alive[:, has] &= ~win[:, lo_idx[has] ^ bit]
            else:
                alive[:, ~has] &= win[:, lo_idx[~has] | bit]
        # players in the high half: re-evaluate leaves at the modified hi rows
        for b in range(n - k):
            bit = 1 << b
            has_h = (hi & bit) != 0
            rows = np.nonzero(has_h if want_minimal_winning else ~has_h)[0]
            if len(rows) == 0:
                continue
            mod = (hi[rows] ^ bit) if want_minimal_winning else (hi[rows] | bit)
            vals = [t.eval_block(mod, None) for t in eng.tables]
            w2 = np.asarray(eng.formula.eval(vals), dtype=bool)
            if want_minimal_winning:
                alive[rows] &= ~w2
            else:
                alive[rows] &= w2
        r, c = np.nonzero(alive)
        parts.append((hi[r].astype(np.uint32) << np.uint32(k))
                     | c.astype(np.uint32))
    if not parts:
        return np.zeros(0, dtype=np.uint32)
    return np.sort(np.concatenate(parts))


def minimal_winning(game: Game) -> CoalitionSet:
    """All winning coalitions whose every one-player-removed subset loses."""
    return CoalitionSet(game.n, "minimal_winning", _extreme_sets(game, True))


def maximal_losing(game: Game) -> CoalitionSet:
    """All losing coalitions whose every one-player-added superset wins."""
    return CoalitionSet(game.n, "maximal_losing", _extreme_sets(game, False))


def losing_by_size(game: Game, sizes) -> CoalitionSet:
    """All losing coalitions whose member count lies in ``sizes``."""
    sizes = set(int(s) for s in sizes)
    eng = BlockEngine(game)
    parts = []
    for hi in eng.hi_chunks():
        sz = eng.sizes_block(hi)
        keep = ~eng.win_block(hi)
        keep &= np.isin(sz, list(sizes))
        r, c = np.nonzero(keep)
        parts.append((hi[r].astype(np.uint32) << np.uint32(eng.k))
                     | c.astype(np.uint32))
    masks = np.sort(np.concatenate(parts)) if parts else np.zeros(0, np.uint32)
    return CoalitionSet(game.n, "custom", masks)


def blocks_equal(a: Game, b: Game) -> bool:
    ea, eb = BlockEngine(a), BlockEngine(b)
    for hi in ea.hi_chunks():
        if not np.array_equal(ea.win_block(hi), eb.win_block(hi)):
            return False
    return True


def desirability(game: Game, wm: CoalitionSet | None = None) -> DesirabilityRelation:
    """Influence comparison of all player pairs, via minimal winning swaps.

    Player i is at least as influential as j iff replacing j by i in any
    minimal winning coalition containing j but not i keeps it winning.
    """
    n = game.n
    if wm is None:
        wm = minimal_winning(game)
    eng = BlockEngine(game)
    masks = wm.masks
    at_least = np.ones((n, n), dtype=bool)
    for i in range(n):
        bi = np.uint32(1 << i)
        for j in range(n):
            if i == j:
                continue
            bj = np.uint32(1 << j)
            sel = masks[((masks & bj) != 0) & ((masks & bi) == 0)]
            if len(sel) == 0:
                continue
            swapped = (sel ^ bj) | bi
            at_least[i, j] = bool(eng.eval_masks(swapped).all())
    complete = True
    for i in range(n):
        for j in range(i + 1, n):
            if not (at_least[i, j] or at_least[j, i]):
                complete = False
    # equivalence classes under mutual domination
    assigned = [False] * n
    classes = []
    for i in range(n):
        if assigned[i]:
            continue
        cls = [i]
        assigned[i] = True
        for j in range(i + 1, n):
            if not assigned[j] and at_least[i, j] and at_least[j, i]:
                cls.append(j)
                assigned[j] = True
        classes.append(cls)
    # order classes strongest first (total when the relation is complete)
    def strength(cls):
        rep = cls[0]
        return (-int(at_least[rep].sum()), rep)
    classes.sort(key=strength)
    classes_1b = tuple(tuple(p + 1 for p in cls) for cls in classes)
    return DesirabilityRelation(n, at_least, complete, classes_1b)


def _lowest_bit(x: np.ndarray) -> np.ndarray:
    return x & (~x + np.uint32(1))


def shift_sets(game: Game, rel: DesirabilityRelation,
               wm: CoalitionSet | None = None,
               lm: CoalitionSet | None = None) -> tuple[CoalitionSet, CoalitionSet]:
    """Shift-minimal winning and shift-maximal losing coalition sets.

    Only swaps across adjacent classes of the influence order are tested;
    transitivity of the desirability relation makes any other violating swap
    reducible to an adjacent one.
    """
    if not rel.complete:
        raise ValueError("shift sets are defined for complete games only")
    n = game.n
    eng = BlockEngine(game)
    if wm is None:
        wm = minimal_winning(game)
    if lm is None:
        lm = maximal_losing(game)
    cmasks = [np.uint32(m) for m in rel.class_masks()]

    def filter_shift(masks: np.ndarray, winning_side: bool) -> np.ndarray:
        alive = np.ones(len(masks), dtype=bool)
        for a in range(len(cmasks) - 1):
            stronger, weaker = cmasks[a], cmasks[a + 1]
            if winning_side:
                mem = masks & stronger          # member from the stronger class
                out = ~masks & weaker           # outsider from the weaker class
            else:
                mem = masks & weaker            # member from the weaker class
                out = ~masks & stronger         # outsider from the stronger class
            appl = (mem != 0) & (out != 0) & alive
            idx = np.nonzero(appl)[0]
            if len(idx) == 0:
                continue
            m_rep = _lowest_bit(mem[idx])
            o_rep = _lowest_bit(out[idx])
            swapped = (masks[idx] ^ m_rep) | o_rep
            res = eng.eval_masks(swapped)
            # a winning-side swap must lose; a losing-side swap must win
            alive[idx] &= (~res if winning_side else res)
        return masks[alive]

    wsm = CoalitionSet(n, "shift_minimal_winning", filter_shift(wm.masks, True))
    lsm = CoalitionSet(n, "shift_maximal_losing", filter_shift(lm.masks, False))
    return wsm, lsm

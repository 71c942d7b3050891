"""Core data model: coalitions, weighted games and monotone compositions.

Players are numbered 1..n (n <= 64) and a coalition is a bitmask in which
bit i-1 is set iff player i belongs to the coalition.  Player 1 is, by
convention of every bundled dataset, the strongest (most populous) player.

Evaluation is exact: a weighted game [q; w1,...,wn] wins a coalition S iff
sum of member weights >= q under exact rational comparison.  No floating
point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .rationals import Rat, rat

__all__ = [
    "Coalition", "mask_from_members", "members_from_mask", "popcount",
    "WeightedGame", "Formula", "Leaf", "Node", "CompositeGame",
    "Game", "eval_game", "games_equal", "scaled_integer_form",
    "intersection_game", "union_game", "indicator_game", "unanimity_game",
    "game_from_maximal_losing", "game_from_minimal_winning", "dual_game",
    "PopulationVector", "build_eu28", "council_rule",
]


# ---------------------------------------------------------------------------
# coalitions

def mask_from_members(members: Iterable[int]) -> int:
    """Bitmask for a coalition given 1-based player indices."""
    m = 0
    for p in members:
        if p < 1 or p > 64:
            raise ValueError(f"player index out of range: {p}")
        m |= 1 << (p - 1)
    return m


def members_from_mask(mask: int) -> tuple[int, ...]:
    """Sorted 1-based player indices of a coalition mask."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return int(mask).bit_count()


@dataclass(frozen=True)
class Coalition:
    """A coalition of players within a fixed player set of size n."""

    bits: int
    n: int

    def __post_init__(self):
        if not (1 <= self.n <= 64):
            raise ValueError(f"player count out of range: {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError("coalition has members beyond the player set")

    @classmethod
    def of(cls, members: Iterable[int], n: int) -> "Coalition":
        return cls(mask_from_members(members), n)

    @property
    def members(self) -> tuple[int, ...]:
        return members_from_mask(self.bits)

    @property
    def size(self) -> int:
        return popcount(self.bits)

    def __contains__(self, player: int) -> bool:
        return bool(self.bits >> (player - 1) & 1)


def _as_mask(s: Union[int, Coalition], n: int) -> int:
    if isinstance(s, Coalition):
        if s.n != n:
            raise ValueError(f"coalition is over {s.n} players, game has {n}")
        return s.bits
    m = int(s)
    if m < 0 or m >> n:
        raise ValueError("coalition has members beyond the player set")
    return m


# ---------------------------------------------------------------------------
# weighted games

@dataclass(frozen=True)
class WeightedGame:
    """A weighted voting game [quota; w1,...,wn] with exact rational data."""

    n: int
    quota: Rat
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "quota", rat(self.quota))
        object.__setattr__(self, "weights", tuple(rat(w) for w in self.weights))
        if len(self.weights) != self.n:
            raise ValueError("weight vector length differs from player count")
        if not (1 <= self.n <= 64):
            raise ValueError(f"player count out of range: {self.n}")
        if not self.quota > 0:
            raise ValueError("quota must be positive")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if sum(self.weights, rat(0)) < self.quota:
            raise ValueError("quota exceeds total weight; grand coalition would lose")

    @classmethod
    def of(cls, quota, weights) -> "WeightedGame":
        weights = tuple(weights)
        return cls(len(weights), rat(quota), weights)

    @property
    def order_consistent(self) -> bool:
        """True iff w1 >= w2 >= ... >= wn."""
        return all(self.weights[i] >= self.weights[i + 1] for i in range(self.n - 1))

    def weight_of(self, mask: int) -> Rat:
        total = rat(0)
        i = 0
        m = int(mask)
        while m:
            if m & 1:
                total += self.weights[i]
            m >>= 1
            i += 1
        return total

    def wins(self, mask: int) -> bool:
        return self.weight_of(mask) >= self.quota

    def __str__(self):
        ws = " ".join(str(w) for w in self.weights)
        return f"[{self.quota}; {ws}]"


def scaled_integer_form(game: WeightedGame) -> tuple[int, list[int], int]:
    """Equivalent all-integer (quota, weights) plus the applied scale factor.

    Scaling quota and weights by a positive rational does not change the
    game, so comparisons can run in integer arithmetic.
    """
    from .rationals import lcm_denominators
    scale = lcm_denominators([game.quota, *game.weights])
    q = int(game.quota * scale)
    ws = [int(w * scale) for w in game.weights]
    return q, ws, scale


# ---------------------------------------------------------------------------
# monotone Boolean compositions

@dataclass(frozen=True)
class Leaf:
    index: int

    def eval(self, leaf_values):
        return leaf_values[self.index]

    @property
    def size(self) -> int:
        return 1

    def leaf_indices(self):
        yield self.index


@dataclass(frozen=True)
class Node:
    op: str                     # "and" | "or"
    children: tuple

    def __post_init__(self):
        if self.op not in ("and", "or"):
            raise ValueError(f"formula operator must be 'and' or 'or', got {self.op!r}")
        if len(self.children) < 2:
            raise ValueError("formula node needs at least two children")

    def eval(self, leaf_values):
        vals = [c.eval(leaf_values) for c in self.children]
        out = vals[0]
        for v in vals[1:]:
            out = (out & v) if self.op == "and" else (out | v)
        return out

    @property
    def size(self) -> int:
        return sum(c.size for c in self.children)

    def leaf_indices(self):
        for c in self.children:
            yield from c.leaf_indices()


Formula = Union[Leaf, Node]


@dataclass(frozen=True)
class CompositeGame:
    """A monotone AND/OR combination of weighted games on one player set."""

    games: tuple
    formula: Formula

    def __post_init__(self):
        if not self.games:
            raise ValueError("composite game needs at least one constituent")
        n = self.games[0].n
        if any(g.n != n for g in self.games):
            raise ValueError("constituent games disagree on the player count")
        idx = list(self.formula.leaf_indices())
        if any(i < 0 or i >= len(self.games) for i in idx):
            raise ValueError("formula references a missing constituent game")
        full = (1 << n) - 1
        if self.wins(0):
            raise ValueError("composite game wins the empty coalition")
        if not self.wins(full):
            raise ValueError("composite game loses the grand coalition")

    @property
    def n(self) -> int:
        return self.games[0].n

    @property
    def size(self) -> int:
        """Number of leaf occurrences of the formula."""
        return self.formula.size

    def wins(self, mask: int) -> bool:
        vals = [g.wins(mask) for g in self.games]
        return bool(self.formula.eval(vals))


Game = Union[WeightedGame, CompositeGame]


def eval_game(game: Game, s: Union[int, Coalition]) -> bool:
    """Exact evaluation of a game on one coalition."""
    mask = _as_mask(s, game.n)
    return game.wins(mask)


def _flatten(op: str, parts) -> CompositeGame:
    games: list[WeightedGame] = []
    children = []

    def leaf_of(g: WeightedGame) -> Leaf:
        games.append(g)
        return Leaf(len(games) - 1)

    def lift(part, offset_games):
        if isinstance(part, WeightedGame):
            return leaf_of(part)
        # re-index an existing composite's formula into the merged game list
        base = len(games)
        games.extend(part.games)

        def remap(f: Formula) -> Formula:
            if isinstance(f, Leaf):
                return Leaf(f.index + base)
            return Node(f.op, tuple(remap(c) for c in f.children))

        return remap(part.formula)

    for p in parts:
        children.append(lift(p, games))
    return CompositeGame(tuple(games), Node(op, tuple(children)))


def intersection_game(*parts: Game) -> CompositeGame:
    """AND-composition of weighted/composite games."""
    return _flatten("and", parts)


def union_game(*parts: Game) -> CompositeGame:
    """OR-composition of weighted/composite games."""
    return _flatten("or", parts)


def indicator_game(losing_mask: int, n: int) -> WeightedGame:
    """Weighted game that loses exactly the subsets of ``losing_mask``.

    Quota 1; weight 0 inside the given coalition and 1 outside, so a
    coalition wins iff it contains at least one outside player.
    """
    if losing_mask >> n:
        raise ValueError("coalition has members beyond the player set")
    if losing_mask == (1 << n) - 1:
        raise ValueError("the grand coalition cannot be losing")
    ws = [0 if (losing_mask >> i) & 1 else 1 for i in range(n)]
    return WeightedGame.of(1, ws)


def unanimity_game(winning_mask: int, n: int) -> WeightedGame:
    """Weighted game that wins exactly the supersets of ``winning_mask``."""
    if winning_mask >> n:
        raise ValueError("coalition has members beyond the player set")
    if winning_mask == 0:
        raise ValueError("the empty coalition cannot be winning")
    ws = [1 if (winning_mask >> i) & 1 else 0 for i in range(n)]
    return WeightedGame.of(popcount(winning_mask), ws)


def game_from_maximal_losing(n: int, maximal_losing: Sequence[int]) -> CompositeGame:
    """The simple game with the given maximal losing coalitions.

    Built as the intersection of one indicator game per maximal losing
    coalition: a coalition loses iff it is contained in one of them.
    """
    masks = [_as_mask(m, n) for m in maximal_losing]
    if not masks:
        raise ValueError("need at least one maximal losing coalition")
    return intersection_game(*(indicator_game(m, n) for m in masks))


def game_from_minimal_winning(n: int, minimal_winning: Sequence[int]) -> CompositeGame:
    """The simple game with the given minimal winning coalitions."""
    masks = [_as_mask(m, n) for m in minimal_winning]
    if not masks:
        raise ValueError("need at least one minimal winning coalition")
    return union_game(*(unanimity_game(m, n) for m in masks))


def dual_game(game: Game) -> Game:
    """The dual game v*(S) = 1 - v(N \\ S).

    Requires an all-integer representation of each constituent (every game
    produced by this package can be scaled to one), because the dual of
    [q; w] is [w(N) - q + 1; w] under integer weights.
    """
    def dual_weighted(g: WeightedGame) -> WeightedGame:
        q, ws, _ = scaled_integer_form(g)
        total = sum(ws)
        return WeightedGame.of(total - q + 1, ws)

    if isinstance(game, WeightedGame):
        return dual_weighted(game)

    def dual_formula(f: Formula) -> Formula:
        if isinstance(f, Leaf):
            return f
        return Node("or" if f.op == "and" else "and",
                    tuple(dual_formula(c) for c in f.children))

    return CompositeGame(tuple(dual_weighted(g) for g in game.games),
                         dual_formula(game.formula))


def games_equal(a: Game, b: Game) -> bool:
    """Whether two games agree on all 2^n coalitions (full scan, n <= 30)."""
    if a.n != b.n:
        raise ValueError("games have different player counts")
    if a.n > 30:
        raise ValueError("full-enumeration equality limited to n <= 30; "
                         "use representation verification instead")
    from .enumeration import blocks_equal
    return blocks_equal(a, b)


# ---------------------------------------------------------------------------
# populations and the EU28 rule

@dataclass(frozen=True)
class PopulationVector:
    """Relative population shares (exact, summing to 1) with optional counts."""

    shares: tuple
    raw_counts: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "shares", tuple(rat(s) for s in self.shares))
        if any(s < 0 for s in self.shares):
            raise ValueError("population shares must be nonnegative")
        if sum(self.shares, rat(0)) != 1:
            raise ValueError("population shares must sum to exactly 1")
        if self.raw_counts is not None:
            counts = tuple(int(c) for c in self.raw_counts)
            object.__setattr__(self, "raw_counts", counts)
            if len(counts) != len(self.shares):
                raise ValueError("raw counts length differs from shares length")
            if any(c < 0 for c in counts):
                raise ValueError("raw counts must be nonnegative")
            total = sum(counts)
            if total == 0:
                raise ValueError("total population must be positive")
            if any(rat(c, total) != s for c, s in zip(counts, self.shares)):
                raise ValueError("shares are not raw_counts / total")

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> "PopulationVector":
        counts = tuple(int(c) for c in counts)
        total = sum(counts)
        return cls(tuple(rat(c, total) for c in counts), counts)

    @property
    def n(self) -> int:
        return len(self.shares)

    @property
    def total(self) -> int | None:
        return sum(self.raw_counts) if self.raw_counts is not None else None

    def share_of(self, mask: int) -> Rat:
        total = rat(0)
        i = 0
        m = int(mask)
        while m:
            if m & 1:
                total += self.shares[i]
            m >>= 1
            i += 1
        return total


def council_rule(pop: PopulationVector,
                 member_quota: int,
                 pop_threshold=rat(65, 100),
                 blocking_size: int = 4) -> CompositeGame:
    """Dual-majority council rule with a minimal-blocking provision.

    A coalition wins iff it has at least ``member_quota`` members and at
    least ``pop_threshold`` of the population (non-strict, exact), or iff
    fewer than ``blocking_size`` states are outside it.
    """
    n = pop.n
    v1 = WeightedGame.of(member_quota, [1] * n)
    thr = rat(pop_threshold)
    if pop.raw_counts is not None:
        # integer cross-multiplication: thr.den * count(S) >= thr.num * total
        num, den = int(thr.numerator), int(thr.denominator)
        v2 = WeightedGame.of(num * sum(pop.raw_counts),
                             [den * c for c in pop.raw_counts])
    else:
        v2 = WeightedGame.of(thr, pop.shares)
    v3 = WeightedGame.of(n - blocking_size + 1, [1] * n)
    return union_game(intersection_game(v1, v2), v3)


@dataclass(frozen=True)
class CouncilStructure:
    """Thresholds of a council-shaped game (v1 and v2) or v3.

    member_quota: minimal coalition size under the membership provision;
    count_win_size: size at which a coalition wins regardless of population;
    pop_threshold: exact population share required by the population
    provision.
    """

    n: int
    member_quota: int
    count_win_size: int
    pop_threshold: Rat
    pop_game: WeightedGame


def council_structure(game: Game) -> CouncilStructure:
    """Recognize the (v1 and v2) or v3 shape and extract its thresholds."""
    if not isinstance(game, CompositeGame) or len(game.games) != 3:
        raise ValueError("not a council-shaped game")
    f = game.formula
    shape_ok = (isinstance(f, Node) and f.op == "or" and len(f.children) == 2
                and isinstance(f.children[0], Node)
                and f.children[0].op == "and"
                and all(isinstance(c, Leaf) for c in f.children[0].children)
                and isinstance(f.children[1], Leaf))
    if not shape_ok:
        raise ValueError("not a council-shaped game")
    i1, i2 = (c.index for c in f.children[0].children)
    i3 = f.children[1].index
    v1, v2, v3 = game.games[i1], game.games[i2], game.games[i3]
    one = rat(1)
    if any(w != one for w in v1.weights) or any(w != one for w in v3.weights):
        raise ValueError("membership constituents must have unit weights")
    if v1.quota.denominator != 1 or v3.quota.denominator != 1:
        raise ValueError("membership quotas must be integral")
    total = sum(v2.weights, rat(0))
    return CouncilStructure(game.n, int(v1.quota), int(v3.quota),
                            v2.quota / total, v2)


def build_eu28(pop: PopulationVector) -> CompositeGame:
    """The EU council voting rule (v1 and v2) or v3 for 28 member states.

    v1 = [16; 1,...,1] (at least 55 percent of 28 states), v2 = the 65
    percent population game over exact raw counts, v3 = [25; 1,...,1]
    (fewer than 4 states cannot block).
    """
    if pop.n != 28:
        raise ValueError(f"the EU28 rule needs exactly 28 states, got {pop.n}")
    if pop.raw_counts is None:
        raise ValueError("the EU28 rule needs raw population counts")
    return council_rule(pop, member_quota=16)

"""Trading transforms, m-trade search and weightedness testing.

A trading transform pairs equally many winning and losing coalitions such
that every player appears in exactly as many coalitions on each side; its
existence certifies that no weighted representation exists.  Weightedness
is decided exactly by LP feasibility of the (shift-level, for complete
games) inequality system, with violated constraints generated on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .enumeration import (BlockEngine, CoalitionSet, DesirabilityRelation,
                          desirability, maximal_losing, minimal_winning,
                          shift_sets)
from .exactlp import LinearSystem, ilp_solve, lp_feasible
from .games import (Game, PopulationVector, WeightedGame, council_structure,
                    eval_game, games_equal, popcount)
from .rationals import Rat, rat, scale_to_integers

__all__ = ["TradeCertificate", "TradeCheck", "is_trading_transform",
           "greedy_2trade", "losing_pair_trade", "winning_pair_trade",
           "find_m_trade", "WeightednessResult", "test_weighted",
           "min_sum_representation", "ShiftSystem"]


@dataclass(frozen=True)
class TradeCertificate:
    """A trading transform <S_1..S_j; T_1..T_j> (winners; losers)."""

    winners: tuple
    losers: tuple

    def __post_init__(self):
        object.__setattr__(self, "winners", tuple(int(s) for s in self.winners))
        object.__setattr__(self, "losers", tuple(int(t) for t in self.losers))
        if len(self.winners) != len(self.losers):
            raise ValueError("trading transform sides have different lengths")

    @property
    def j(self) -> int:
        return len(self.winners)


@dataclass(frozen=True)
class TradeCheck:
    valid: bool
    balanced: bool
    winners_ok: bool
    losers_ok: bool
    detail: str = ""


def is_trading_transform(cert: TradeCertificate, game: Game) -> TradeCheck:
    """Balance plus all-winners-win / all-losers-lose, exactly."""
    n = game.n
    balanced = True
    detail = ""
    for i in range(n):
        bit = 1 << i
        cw = sum(1 for s in cert.winners if s & bit)
        cl = sum(1 for t in cert.losers if t & bit)
        if cw != cl:
            balanced = False
            detail = f"player {i + 1} appears {cw} times among winners, {cl} among losers"
            break
    winners_ok = all(eval_game(game, s) for s in cert.winners)
    losers_ok = all(not eval_game(game, t) for t in cert.losers)
    if not detail:
        if not winners_ok:
            detail = "a left-side coalition is not winning"
        elif not losers_ok:
            detail = "a right-side coalition is not losing"
    return TradeCheck(balanced and winners_ok and losers_ok,
                      balanced, winners_ok, losers_ok, detail)


# ---------------------------------------------------------------------------
# pair completions for council-shaped games

def _pop_order(pop: PopulationVector):
    """Player bit indices sorted most populous first (ties: lower index first)."""
    return sorted(range(pop.n), key=lambda i: (-pop.shares[i], i))


def _fill(base: int, candidates_mask: int, count: int, order, reverse: bool) -> int:
    """Add ``count`` candidate players to ``base``, most or least populous first."""
    seq = order if not reverse else list(reversed(order))
    m = base
    for i in seq:
        if count == 0:
            break
        if (candidates_mask >> i) & 1:
            m |= 1 << i
            count -= 1
    if count:
        raise ValueError("not enough candidates to fill the coalition")
    return m


def greedy_2trade(ti: int, tj: int, game: Game,
                  pop: PopulationVector) -> Optional[TradeCertificate]:
    """The greedy 2-trade completion for two losing coalitions.

    Extends I = Ti n Tj by the least populous players of the symmetric
    difference to a coalition S1 that wins on member count alone; the
    remainder S2 = (Ti u Tj) \\ S1 u I completes the transform iff it wins.
    Applicable to losing coalitions one or two members short of the
    count-win size.
    """
    cs = council_structure(game)
    if ti == tj:
        raise ValueError("the two losing coalitions must be distinct")
    szs = (popcount(ti), popcount(tj))
    if any(s not in (cs.count_win_size - 2, cs.count_win_size - 1) for s in szs):
        raise ValueError("greedy completion expects coalitions one or two "
                         "members below the count-win size")
    if eval_game(game, ti) or eval_game(game, tj):
        raise ValueError("both coalitions must be losing")
    inter, union = ti & tj, ti | tj
    need = cs.count_win_size - popcount(inter)
    diff = union & ~inter
    if popcount(diff) < need:
        return None
    order = _pop_order(pop)
    s1 = _fill(inter, diff, need, order, reverse=True)
    s2 = (union & ~s1) | inter
    if not eval_game(game, s2):
        return None
    cert = TradeCertificate((s1, s2), (ti, tj))
    assert is_trading_transform(cert, game).valid
    return cert


def losing_pair_trade(ta: int, tb: int, game: Game,
                      pop: PopulationVector) -> Optional[TradeCertificate]:
    """Some 2-trade certifying that the losing pair (ta, tb) is incompatible.

    Tries the greedy count-win completion first, then balanced splits in
    which both completions win through the population channel.
    """
    cs = council_structure(game)
    if ta == tb or eval_game(game, ta) or eval_game(game, tb):
        raise ValueError("need two distinct losing coalitions")
    inter, union = ta & tb, ta | tb
    diff = union & ~inter
    total_size = popcount(ta) + popcount(tb)
    order = _pop_order(pop)

    # count-win S1 of exactly count_win_size members, S2 wins by population
    need = cs.count_win_size - popcount(inter)
    if 0 <= need <= popcount(diff):
        s2_size = total_size - cs.count_win_size
        if s2_size >= cs.member_quota:
            s1 = _fill(inter, diff, need, order, reverse=True)
            s2 = (union & ~s1) | inter
            if eval_game(game, s2):
                cert = TradeCertificate((s1, s2), (ta, tb))
                assert is_trading_transform(cert, game).valid
                return cert

    # both sides win by population: distribute the symmetric difference,
    # most populous first, to whichever side is further from the threshold
    isz = popcount(inter)
    for a in range(max(cs.member_quota, isz),
                   min(cs.count_win_size - 1, total_size - cs.member_quota) + 1):
        b = total_size - a
        if not (cs.member_quota <= b <= cs.count_win_size - 1):
            continue
        cap1, cap2 = a - isz, b - isz
        if cap1 < 0 or cap2 < 0 or cap1 + cap2 != popcount(diff):
            continue
        share1 = pop.share_of(inter)
        share2 = share1
        m1 = m2 = inter
        k1, k2 = cap1, cap2
        for i in order:
            if not (diff >> i) & 1:
                continue
            take_first = k1 > 0 and (k2 == 0 or share1 <= share2)
            if take_first:
                m1 |= 1 << i
                share1 += pop.shares[i]
                k1 -= 1
            else:
                m2 |= 1 << i
                share2 += pop.shares[i]
                k2 -= 1
        if eval_game(game, m1) and eval_game(game, m2):
            cert = TradeCertificate((m1, m2), (ta, tb))
            assert is_trading_transform(cert, game).valid
            return cert
    return None


def winning_pair_trade(sa: int, sb: int, game: Game,
                       pop: PopulationVector) -> Optional[TradeCertificate]:
    """Some 2-trade certifying that the winning pair (sa, sb) is incompatible.

    The completion keeps the shared members on both sides, sends the most
    populous remaining players to a coalition one member below the
    membership quota (losing regardless of population), and requires the
    rest to fail the population threshold.
    """
    cs = council_structure(game)
    if sa == sb or not (eval_game(game, sa) and eval_game(game, sb)):
        raise ValueError("need two distinct winning coalitions")
    inter, union = sa & sb, sa | sb
    diff = union & ~inter
    total_size = popcount(sa) + popcount(sb)
    order = _pop_order(pop)
    t1_size = cs.member_quota - 1
    t2_size = total_size - t1_size
    if popcount(inter) > t1_size or t2_size > cs.count_win_size - 1:
        return None
    t1 = _fill(inter, diff, t1_size - popcount(inter), order, reverse=False)
    t2 = (union & ~t1) | inter
    if eval_game(game, t2):
        return None
    cert = TradeCertificate((sa, sb), (t1, t2))
    assert is_trading_transform(cert, game).valid
    return cert


# ---------------------------------------------------------------------------
# exhaustive m-trade search (small games)

def find_m_trade(game: Game, m: int, budget: int = 2_000_000) -> Optional[TradeCertificate]:
    """Search for an m-trade; exhaustive within the node budget.

    Enumerates multisets of m losing coalitions (non-decreasing) and tries
    to split their combined player multiset into m winning coalitions.
    Returns None when no trade exists within the budget; raises
    RuntimeError('budget exhausted') when the search was cut short.
    """
    if m < 2:
        raise ValueError("an m-trade needs m >= 2")
    n = game.n
    if n > 16:
        raise ValueError("exhaustive trade search is limited to n <= 16")
    eng = BlockEngine(game)
    all_masks = np.arange(1 << n, dtype=np.uint32)
    winb = eng.eval_masks(all_masks)
    winning = [int(x) for x in all_masks[winb]]
    losing = [int(x) for x in all_masks[~winb]]
    win_set = set(winning)
    nodes = 0

    def split(counts, k, min_mask):
        """Split the remaining multiset into k winning coalitions."""
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise RuntimeError("budget exhausted")
        if k == 0:
            return [] if not any(counts) else None
        # support that must be used: players with count == k belong to all
        forced = 0
        avail = 0
        for i, c in enumerate(counts):
            if c > k:
                return None
            if c == k:
                forced |= 1 << i
            if c > 0:
                avail |= 1 << i
        for s in winning:
            if s < min_mask:
                continue
            if s & ~avail or (forced & ~s):
                continue
            rest = list(counts)
            ok = True
            for i in range(n):
                if (s >> i) & 1:
                    rest[i] -= 1
                    if rest[i] < 0:
                        ok = False
            if not ok:
                continue
            sub = split(rest, k - 1, s)
            if sub is not None:
                return [s] + sub
        return None

    def choose_losers(start, chosen):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise RuntimeError("budget exhausted")
        if len(chosen) == m:
            counts = [0] * n
            for t in chosen:
                for i in range(n):
                    if (t >> i) & 1:
                        counts[i] += 1
            res = split(counts, m, 0)
            if res is not None:
                return TradeCertificate(tuple(res), tuple(chosen))
            return None
        for idx in range(start, len(losing)):
            t = losing[idx]
            out = choose_losers(idx, chosen + [t])
            if out is not None:
                return out
        return None

    return choose_losers(0, [])


# ---------------------------------------------------------------------------
# weightedness via the exact LP system

class ShiftSystem:
    """Prefix-count formulation of the weight inequality system.

    For a complete game with influence classes C_1 (strongest) .. C_k,
    order-consistent weights are parametrized by nonnegative differences
    d_1..d_k of consecutive class weights; the weight of coalition S is
    then  sum_e d_e * |S n (C_1 u .. u C_e)|.  Winning rows require that
    sum to reach q, losing rows to stay at most q-1.
    """

    def __init__(self, n: int, classes):
        self.n = n
        self.classes = tuple(tuple(c) for c in classes)
        self.k = len(self.classes)
        cum = []
        m = 0
        for cls in self.classes:
            for p in cls:
                m |= 1 << (p - 1)
            cum.append(m)
        self.cum_masks = cum
        self.cum_sizes = [popcount(m) for m in cum]

    def prefix_counts(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint32)
        cols = []
        for cm in self.cum_masks:
            inter = masks & np.uint32(cm)
            cols.append(_popcount_u32(inter))
        return np.stack(cols, axis=1).astype(np.int64)

    def weights_from_diffs(self, diffs):
        """Per-player weights from class weight differences."""
        w_class = []
        acc = rat(0)
        for d in reversed(diffs):
            acc = acc + rat(d)
            w_class.append(acc)
        w_class.reverse()
        w = [rat(0)] * self.n
        for cls, wc in zip(self.classes, w_class):
            for p in cls:
                w[p - 1] = wc
        return w


def _popcount_u32(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint32)
    x = x - ((x >> np.uint32(1)) & np.uint32(0x55555555))
    x = (x & np.uint32(0x33333333)) + ((x >> np.uint32(2)) & np.uint32(0x33333333))
    x = (x + (x >> np.uint32(4))) & np.uint32(0x0F0F0F0F)
    return ((x * np.uint32(0x01010101)) >> np.uint32(24)).astype(np.int64)


@dataclass(frozen=True)
class WeightednessResult:
    status: str                                  # "weighted" | "not_weighted"
    representation: WeightedGame | None = None
    farkas_rows: tuple | None = None             # (kind, mask, multiplier)
    trade: TradeCertificate | None = None


def _row_generation_weighted(n, win_rows, lose_rows, prefix_of, num_vars,
                             batch: int = 16):
    """Decide feasibility of {w(S) >= q for all S, w(T) <= q-1 for all T}.

    Variables are the ``num_vars`` weight coordinates plus q (last column).
    ``prefix_of`` maps mask arrays to coefficient rows.  Returns
    (feasible, point, farkas_rows) where farkas_rows ties multipliers to
    (side, mask).
    """
    cw = prefix_of(win_rows)
    cl = prefix_of(lose_rows)
    active_w: list[int] = []
    active_l: list[int] = []

    def violated(point):
        ws = point[:num_vars]
        q = point[num_vars]
        ints, scale = scale_to_integers(list(ws) + [q])
        qi = ints[num_vars]
        scale = int(scale)
        # int64 is exact while row sums stay far from overflow
        if max(abs(v) for v in ints) < (1 << 56) // (num_vars * 32 + 1):
            wi = np.array(ints[:num_vars], dtype=np.int64)
        else:
            wi = np.array(ints[:num_vars], dtype=object)
        vw = cw @ wi - qi                    # need >= 0
        vl = cl @ wi - (qi - scale)          # need <= 0
        bad_w = np.nonzero(vw < 0)[0]
        bad_l = np.nonzero(vl > 0)[0]
        return bad_w, bad_l, vw, vl

    for _ in range(10_000):
        sys = LinearSystem(num_vars + 1)
        sys.lower[num_vars] = rat(1)          # q >= 1
        for i in active_w:
            sys.add(list(cw[i]) + [-1], ">=", 0)
        for i in active_l:
            sys.add(list(cl[i]) + [-1], "<=", -1)
        out = lp_feasible(sys)
        if out.status == "infeasible":
            rows = []
            for mult, i in zip(out.farkas[:len(active_w)], active_w):
                if mult != 0:
                    rows.append(("winning", int(win_rows[i]), mult))
            for mult, i in zip(out.farkas[len(active_w):], active_l):
                if mult != 0:
                    rows.append(("losing", int(lose_rows[i]), mult))
            return False, None, tuple(rows)
        bad_w, bad_l, vw, vl = violated(out.point)
        if len(bad_w) == 0 and len(bad_l) == 0:
            return True, out.point, None
        order_w = bad_w[np.argsort(vw[bad_w].astype(float))][:batch]
        order_l = bad_l[np.argsort(-vl[bad_l].astype(float))][:batch]
        active_w.extend(int(i) for i in order_w if int(i) not in set(active_w))
        active_l.extend(int(i) for i in order_l if int(i) not in set(active_l))
    raise RuntimeError("row generation failed to converge")


def _trade_from_farkas(farkas_rows, game) -> Optional[TradeCertificate]:
    """Try to read a 2-trade off a Farkas certificate with small support."""
    if farkas_rows is None or len(farkas_rows) > 4:
        return None
    winners = [mask for kind, mask, _ in farkas_rows if kind == "winning"]
    losers = [mask for kind, mask, _ in farkas_rows if kind == "losing"]
    if len(winners) != 2 or len(losers) != 2:
        return None
    cert = TradeCertificate(tuple(winners), tuple(losers))
    return cert if is_trading_transform(cert, game).valid else None


def test_weighted(game: Game,
                  rel: DesirabilityRelation | None = None,
                  wm: CoalitionSet | None = None,
                  lm: CoalitionSet | None = None,
                  wsm: CoalitionSet | None = None,
                  lsm: CoalitionSet | None = None) -> WeightednessResult:
    """Exact weightedness decision with a certificate either way.

    Complete games use the shift-level system over class weight
    differences; others the full minimal-winning/maximal-losing system.
    A weighted verdict carries an integer representation verified to
    reproduce the game; a negative verdict carries the infeasible
    constraint combination and, when it has the classic shape, a 2-trade.
    """
    n = game.n
    if rel is None:
        wm = wm if wm is not None else minimal_winning(game)
        rel = desirability(game, wm)
    if rel.complete:
        if wsm is None or lsm is None:
            wm = wm if wm is not None else minimal_winning(game)
            lm = lm if lm is not None else maximal_losing(game)
            wsm, lsm = shift_sets(game, rel, wm, lm)
        shift = ShiftSystem(n, rel.classes)
        feasible, point, farkas = _row_generation_weighted(
            n, wsm.masks, lsm.masks, shift.prefix_counts, shift.k)
        if feasible:
            weights = shift.weights_from_diffs(point[:shift.k])
            q = point[shift.k]
        else:
            trade = _trade_from_farkas(farkas, game)
            return WeightednessResult("not_weighted", farkas_rows=farkas, trade=trade)
    else:
        wm = wm if wm is not None else minimal_winning(game)
        lm = lm if lm is not None else maximal_losing(game)

        def per_player(masks):
            masks = np.asarray(masks, dtype=np.uint32)
            cols = [((masks >> np.uint32(i)) & 1).astype(np.int64) for i in range(n)]
            return np.stack(cols, axis=1)

        feasible, point, farkas = _row_generation_weighted(
            n, wm.masks, lm.masks, per_player, n)
        if not feasible:
            trade = _trade_from_farkas(farkas, game)
            return WeightednessResult("not_weighted", farkas_rows=farkas, trade=trade)
        weights = point[:n]
        q = point[n]
    ints, _ = scale_to_integers(list(weights) + [q])
    rep = WeightedGame.of(ints[-1], ints[:-1])
    if n <= 30 and not games_equal(rep, game):
        raise RuntimeError("internal error: representation failed verification")
    return WeightednessResult("weighted", representation=rep)


# not a test, despite the name pytest would otherwise collect
test_weighted.__test__ = False


def min_sum_representation(game: Game,
                           rel: DesirabilityRelation | None = None,
                           wsm: CoalitionSet | None = None,
                           lsm: CoalitionSet | None = None,
                           node_budget: int = 200_000) -> WeightedGame:
    """Integer representation minimizing the total weight.

    Minimizes over the shift-level system with class-uniform weights (the
    ordering constraints force equivalent players to share a weight).
    Branch-and-bound starts from the incumbent obtained by scaling the LP
    optimum to integers.
    """
    res = test_weighted(game, rel=rel, wsm=wsm, lsm=lsm)
    if res.status != "weighted":
        raise ValueError("game is not weighted")
    if rel is None:
        rel = desirability(game)
    if wsm is None or lsm is None:
        wsm, lsm = shift_sets(game, rel)
    shift = ShiftSystem(game.n, rel.classes)
    k = shift.k
    cw = shift.prefix_counts(wsm.masks)
    cl = shift.prefix_counts(lsm.masks)
    obj = [rat(s) for s in shift.cum_sizes] + [rat(0)]

    # incumbent: scale the LP optimum to integers
    lp = LinearSystem(k + 1)
    lp.lower[k] = rat(1)
    for row in cw:
        lp.add(list(row) + [-1], ">=", 0)
    for row in cl:
        lp.add(list(row) + [-1], "<=", -1)
    lp.set_objective(obj, "min")
    lp_out = ilp_solve(lp)     # no integer flags: pure LP
    assert lp_out.status == "feasible"
    ints, _ = scale_to_integers(lp_out.point)
    incumbent_sum = sum(rat(s) * d for s, d in zip(shift.cum_sizes, ints[:k]))

    sys = LinearSystem(k + 1,
                       lower=[rat(0)] * k + [rat(1)],
                       upper=[incumbent_sum] * (k + 1),
                       integer=[True] * (k + 1))
    for row in cw:
        sys.add(list(row) + [-1], ">=", 0)
    for row in cl:
        sys.add(list(row) + [-1], "<=", -1)
    sys.add(obj, "<=", incumbent_sum)
    sys.set_objective(obj, "min")
    out = ilp_solve(sys, node_budget=node_budget)
    if out.status not in ("feasible", "budget_exhausted") or out.point is None:
        raise RuntimeError(f"minimum-sum search failed: {out.status}")
    diffs = out.point[:k]
    weights = shift.weights_from_diffs(diffs)
    rep = WeightedGame.of(out.point[k], weights)
    if game.n <= 30 and not games_equal(rep, game):
        raise RuntimeError("internal error: minimum-sum representation invalid")
    return rep

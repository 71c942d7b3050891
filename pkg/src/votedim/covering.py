"""Covering machinery for dimension upper bounds.

The central primitive asks, for one losing coalition T of a complete game,
whether an order-consistent weighted game can keep T losing while every
shift-minimal winning coalition wins.  A fast floating-point LP proposes
candidates, but every verdict is exact: feasible answers carry an integer
witness checked against the full winning family in integer arithmetic, and
infeasible answers carry a rational Farkas certificate for an explicit
constraint subset.

On top of that sit the covering pipeline (greedy multi-coverage, per-
coalition games, indicator games for the stubborn remainder), the
representation checker, and exact set-covering dimension for small games.
"""

from __future__ import annotations

import multiprocessing as mp
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import _kernels
from .enumeration import (BlockEngine, CoalitionSet, DesirabilityRelation,
                          blocks_equal, desirability, maximal_losing,
                          minimal_winning, shift_sets)
from .exactlp import LinearSystem, ilp_solve, lp_feasible
from .games import (Game, WeightedGame, dual_game, eval_game,
                    indicator_game, intersection_game, popcount)
from .rationals import rat, scale_to_integers
from .trades import ShiftSystem

__all__ = ["ShiftLP", "SweepResult", "single_coalition_game", "sweep_feasibility",
           "associated_maximal_losing", "IntersectionRepresentation",
           "verify_representation", "cover_step_ilp", "upper_bound_pipeline",
           "union_pipeline", "PipelineResult", "exact_dimension_small"]

_DYADIC = 1 << 20
_CACHE_LIMIT = 160
_FLOAT_ROUNDS = 25


class ShiftLP:
    """Order-consistent feasibility oracle for one complete game.

    Feasibility of {w order-consistent, every shift-minimal winning
    coalition >= q, w(T) <= q - 1} is equivalent, in class-difference
    coordinates d >= 0, to  min { c_T . d : c_S . d >= 1 } < 1.
    """

    def __init__(self, game: Game, rel: DesirabilityRelation, wsm: CoalitionSet):
        if not rel.complete:
            raise ValueError("per-coalition games need a complete game")
        self.game = game
        self.rel = rel
        self.shift = ShiftSystem(game.n, rel.classes)
        self.cw = self.shift.prefix_counts(wsm.masks)           # int64 (m, k)
        self.cwf = self.cw.astype(np.float64)
        self.k = self.shift.k
        self._cache: list[tuple[np.ndarray, int]] = []
        self._pool = np.arange(min(40, len(self.cw)), dtype=np.int64)

    # -- candidate bookkeeping ---------------------------------------------

    def _min_margin(self, d_int: np.ndarray) -> int:
        return int((self.cw @ d_int).min())

    def _registered(self, d_int: np.ndarray) -> tuple[np.ndarray, int]:
        entry = (d_int, self._min_margin(d_int))
        self._cache.append(entry)
        if len(self._cache) > _CACHE_LIMIT:
            self._cache.pop(0)
        return entry

    def _game_from(self, d_int: np.ndarray, tv: int) -> WeightedGame:
        weights = self.shift.weights_from_diffs([int(x) for x in d_int])
        return WeightedGame.of(tv + 1, weights)

    # -- the per-coalition decision ------------------------------------------

    def single(self, t_mask: int):
        """(WeightedGame keeping t losing, None) or (None, farkas info)."""
        t_row = self.shift.prefix_counts(np.array([t_mask], dtype=np.uint32))[0]
        # 1. cached integer witnesses: t strictly separated already?
        for d_int, margin in self._cache:
            tv = int(t_row @ d_int)
            if tv < margin:
                return self._game_from(d_int, tv), None
        # 2. float proposals with exact integer confirmation
        rows = np.unique(self._pool)
        t_f = t_row.astype(np.float64)
        for _ in range(_FLOAT_ROUNDS):
            res = linprog(t_f, A_ub=-self.cwf[rows], b_ub=-np.ones(len(rows)),
                          bounds=[(0, None)] * self.k, method="highs")
            if res.x is None:
                break
            d_int = np.round(res.x * _DYADIC).astype(np.int64)
            if d_int.max(initial=0) > (1 << 50):
                break
            margins = self.cw @ d_int
            tv = int(t_row @ d_int)
            if tv < int(margins.min()):
                self._cache.append((d_int, int(margins.min())))
                if len(self._cache) > _CACHE_LIMIT:
                    self._cache.pop(0)
                self._pool = rows
                return self._game_from(d_int, tv), None
            if res.fun is not None and res.fun >= 1.0 - 1e-9:
                break
            worst = np.argpartition(margins - tv, min(12, len(margins) - 1))[:12]
            new_rows = np.unique(np.concatenate([rows, worst]))
            if len(new_rows) == len(rows):
                break
            rows = new_rows
        # 3. exact phase
        return self._single_exact(t_mask, t_row, rows)

    def _single_exact(self, t_mask, t_row, rows):
        for _ in range(200):
            sys = LinearSystem(self.k + 1)
            sys.lower[self.k] = rat(1)
            for i in rows:
                sys.add([int(c) for c in self.cw[i]] + [-1], ">=", 0)
            sys.add([int(c) for c in t_row] + [-1], "<=", -1)
            out = lp_feasible(sys)
            if out.status == "infeasible":
                self._pool = rows
                return None, tuple(int(i) for i in rows)
            ints, _ = scale_to_integers(out.point[:self.k])
            d_int = np.array(ints, dtype=object)
            if max(abs(int(x)) for x in ints) < (1 << 50):
                d_int = d_int.astype(np.int64)
            margins = self.cw @ d_int
            tv = int(t_row @ d_int)
            if tv < int(margins.min()):
                d64 = np.array([int(x) for x in d_int], dtype=np.int64) \
                    if d_int.dtype == object else d_int
                self._registered(d64)
                self._pool = rows
                return self._game_from(d64, tv), None
            worst = np.argpartition(margins - tv, min(12, len(margins) - 1))[:12]
            rows = np.unique(np.concatenate([rows, worst.astype(np.int64)]))
        raise RuntimeError("row generation failed to converge")


def single_coalition_game(t_mask: int, game: Game,
                          rel: DesirabilityRelation | None = None,
                          wsm: CoalitionSet | None = None) -> WeightedGame | None:
    """Order-consistent weighted game keeping ``t_mask`` losing and every
    shift-minimal winning coalition winning, or None when the coalition is
    stubborn."""
    if rel is None:
        rel = desirability(game)
    if wsm is None:
        wsm, _ = shift_sets(game, rel)
    oracle = ShiftLP(game, rel, wsm)
    g, _ = oracle.single(int(t_mask))
    return g


@dataclass
class SweepResult:
    """Feasibility sweep over a family of losing coalitions."""

    masks: np.ndarray                  # uint32, the swept coalitions
    feasible: np.ndarray               # bool per coalition
    quotas: np.ndarray                 # int64, valid where feasible
    weights: np.ndarray                # int64 (len, n), valid where feasible
    farkas_rows: dict = field(default_factory=dict)   # mask -> row indices

    @property
    def stubborn_masks(self) -> np.ndarray:
        return self.masks[~self.feasible]

    def game_at(self, i: int) -> WeightedGame:
        if not self.feasible[i]:
            raise ValueError("coalition is stubborn")
        return WeightedGame.of(int(self.quotas[i]), [int(w) for w in self.weights[i]])


_WORKER_CTX = None


def _sweep_worker_init(game, rel, wsm):
    global _WORKER_CTX
    _WORKER_CTX = ShiftLP(game, rel, wsm)


def _sweep_worker(args):
    lo, hi, masks = args
    ctx = _WORKER_CTX
    n = ctx.game.n
    feas = np.zeros(hi - lo, dtype=bool)
    quotas = np.zeros(hi - lo, dtype=np.int64)
    weights = np.zeros((hi - lo, n), dtype=np.int64)
    farkas = {}
    for i in range(lo, hi):
        g, fk = ctx.single(int(masks[i]))
        if g is not None:
            feas[i - lo] = True
            quotas[i - lo] = int(g.quota)
            weights[i - lo] = [int(w) for w in g.weights]
        else:
            farkas[int(masks[i])] = fk
    return lo, hi, feas, quotas, weights, farkas


def sweep_feasibility(masks: np.ndarray, game: Game, rel: DesirabilityRelation,
                      wsm: CoalitionSet, threads: int = 1,
                      progress=None) -> SweepResult:
    """Decide single-coalition feasibility for every given losing coalition."""
    masks = np.asarray(masks, dtype=np.uint32)
    nt = len(masks)
    n = game.n
    result = SweepResult(masks, np.zeros(nt, dtype=bool),
                         np.zeros(nt, dtype=np.int64),
                         np.zeros((nt, n), dtype=np.int64))
    if threads <= 1:
        ctx = ShiftLP(game, rel, wsm)
        for i in range(nt):
            g, fk = ctx.single(int(masks[i]))
            if g is not None:
                result.feasible[i] = True
                result.quotas[i] = int(g.quota)
                result.weights[i] = [int(w) for w in g.weights]
            else:
                result.farkas_rows[int(masks[i])] = fk
            if progress and (i + 1) % 5000 == 0:
                progress(i + 1, nt)
        return result
    chunk = (nt + threads * 8 - 1) // (threads * 8)
    jobs = [(lo, min(lo + chunk, nt), masks) for lo in range(0, nt, chunk)]
    with mp.get_context("fork").Pool(threads, _sweep_worker_init,
                                     (game, rel, wsm)) as pool:
        done = 0
        for lo, hi, feas, quotas, weights, farkas in pool.imap_unordered(_sweep_worker, jobs):
            result.feasible[lo:hi] = feas
            result.quotas[lo:hi] = quotas
            result.weights[lo:hi] = weights
            result.farkas_rows.update(farkas)
            done += hi - lo
            if progress:
                progress(done, nt)
    return result


def class_prefix_counts_i8(masks, shift: ShiftSystem) -> np.ndarray:
    """Class-prefix count matrix in int8 (counts never exceed n <= 64)."""
    masks = np.asarray(masks, dtype=np.uint32)
    out = np.empty((len(masks), shift.k), dtype=np.int8)
    for e, cm in enumerate(shift.cum_masks):
        inter = masks & np.uint32(cm)
        x = inter
        x = x - ((x >> np.uint32(1)) & np.uint32(0x55555555))
        x = (x & np.uint32(0x33333333)) + ((x >> np.uint32(2)) & np.uint32(0x33333333))
        x = (x + (x >> np.uint32(4))) & np.uint32(0x0F0F0F0F)
        out[:, e] = ((x * np.uint32(0x01010101)) >> np.uint32(24)).astype(np.int8)
    return out


def associated_maximal_losing(lm: CoalitionSet, covered_lsm_masks: np.ndarray,
                              stubborn_masks: np.ndarray,
                              shift: ShiftSystem) -> np.ndarray:
    """Maximal losing coalitions whose every shift-maximal dominator is stubborn.

    A maximal losing coalition below a non-stubborn shift-maximal losing
    coalition is kept losing by that coalition's order-consistent game; the
    remainder must be handled by indicator games.
    """
    clm = class_prefix_counts_i8(lm.masks, shift)
    c_stub = class_prefix_counts_i8(stubborn_masks, shift)
    c_ok = class_prefix_counts_i8(covered_lsm_masks, shift)
    cand = _kernels.dominated_by_any(clm, c_stub)
    idx = np.nonzero(cand)[0]
    if len(idx) == 0:
        return np.zeros(0, dtype=np.uint32)
    dom = _kernels.dominated_by_any(clm[idx], c_ok)
    return lm.masks[idx[~dom]]


# ---------------------------------------------------------------------------
# representations and their verification

OC_TAG = "order_consistent"
IND_TAG = "indicator"


@dataclass
class IntersectionRepresentation:
    """A conjunctive (or disjunctive) family of integer weighted games."""

    mode: str                       # "intersection" | "union"
    n: int
    quotas: np.ndarray              # int64 (k,)
    weights: np.ndarray             # int64 (k, n)
    tags: list
    verified: bool = False

    def __post_init__(self):
        if self.mode not in ("intersection", "union"):
            raise ValueError(f"unknown representation mode {self.mode!r}")
        if len(self.quotas) != len(self.tags) or self.weights.shape != (len(self.quotas), self.n):
            raise ValueError("inconsistent representation arrays")

    def __len__(self):
        return len(self.quotas)

    def game_at(self, i: int) -> WeightedGame:
        return WeightedGame.of(int(self.quotas[i]), [int(w) for w in self.weights[i]])

    def games(self):
        return [self.game_at(i) for i in range(len(self))]

    @classmethod
    def from_games(cls, games, tags, mode: str) -> "IntersectionRepresentation":
        games = list(games)
        if not games:
            raise ValueError("empty representation")
        n = games[0].n
        quotas = np.zeros(len(games), dtype=np.int64)
        weights = np.zeros((len(games), n), dtype=np.int64)
        for i, g in enumerate(games):
            q, ws, _ = _integer_form(g)
            quotas[i] = q
            weights[i] = ws
        return cls(mode, n, quotas, weights, list(tags))


def _integer_form(g: WeightedGame):
    from .games import scaled_integer_form
    return scaled_integer_form(g)


class VerificationError(ValueError):
    def __init__(self, message, coalition=None):
        super().__init__(message)
        self.coalition = coalition


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    constituents: int
    oc_count: int
    indicator_count: int
    tiers: tuple
    full_scan: bool


def verify_representation(rep: IntersectionRepresentation, game: Game,
                          rel: DesirabilityRelation | None = None,
                          wm: CoalitionSet | None = None,
                          lm: CoalitionSet | None = None,
                          wsm: CoalitionSet | None = None,
                          lsm: CoalitionSet | None = None,
                          full_check_limit: int = 20) -> VerificationReport:
    """Exact check that the representation reproduces the game.

    Winning side: every shift-minimal winning coalition must win in every
    order-consistent constituent (their class-uniform, order-consistent
    weights then make every winning coalition win), and each indicator
    constituent's base must be losing in the game.  Losing side: every
    maximal losing coalition must lose in at least one constituent, checked
    through shift-level domination first.  For n <= ``full_check_limit`` an
    additional full 2^n cross-check runs.  Raises VerificationError naming
    the first offending coalition.
    """
    if rep.n != game.n:
        raise VerificationError("player count mismatch")
    if rep.mode == "union":
        dual = dual_game(game)
        dual_games = []
        for i in range(len(rep)):
            q = int(rep.quotas[i])
            ws = rep.weights[i]
            dual_games.append(WeightedGame.of(int(ws.sum()) - q + 1,
                                              [int(w) for w in ws]))
        drep = IntersectionRepresentation.from_games(dual_games, list(rep.tags),
                                                     "intersection")
        full = (1 << game.n) - 1
        def comp(cs, kind):
            if cs is None:
                return None
            return CoalitionSet(game.n, kind,
                                np.array([full ^ int(m) for m in cs.masks],
                                         dtype=np.uint32))
        report = verify_representation(
            drep, dual, rel,
            wm=comp(lm, "minimal_winning"), lm=comp(wm, "maximal_losing"),
            wsm=comp(lsm, "shift_minimal_winning"),
            lsm=comp(wsm, "shift_maximal_losing"),
            full_check_limit=full_check_limit)
        rep.verified = report.ok
        return report

    n = game.n
    tiers = []
    oc_idx = [i for i, t in enumerate(rep.tags) if t == OC_TAG]
    ind_idx = [i for i, t in enumerate(rep.tags) if t == IND_TAG]
    if len(oc_idx) + len(ind_idx) != len(rep):
        raise VerificationError("constituent with unknown tag")

    # basic soundness of the arrays
    if np.any(rep.quotas < 1) or np.any(rep.weights < 0):
        raise VerificationError("constituent violates weighted-game invariants")
    if np.any(rep.weights.sum(axis=1) < rep.quotas):
        raise VerificationError("a constituent loses the grand coalition")

    # indicator constituents: quota 1, 0/1 weights, base losing in the game
    for i in ind_idx:
        if rep.quotas[i] != 1 or not np.all((rep.weights[i] == 0) | (rep.weights[i] == 1)):
            raise VerificationError("indicator constituent malformed", i)
        base = 0
        for p in range(n):
            if rep.weights[i][p] == 0:
                base |= 1 << p
        if eval_game(game, base):
            raise VerificationError("indicator base coalition is winning in the game",
                                    base)
    tiers.append(("indicator_bases", len(ind_idx)))

    use_shift_tier = len(oc_idx) > 0 or n > full_check_limit
    if use_shift_tier:
        if rel is None:
            rel = desirability(game, wm)
        if not rel.complete:
            if n <= full_check_limit:
                use_shift_tier = False
            else:
                raise VerificationError("shift-level verification needs a complete game")

    if use_shift_tier:
        if wm is None:
            wm = minimal_winning(game)
        if lm is None:
            lm = maximal_losing(game)
        if wsm is None or lsm is None:
            wsm, lsm = shift_sets(game, rel, wm, lm)
        shift = ShiftSystem(n, rel.classes)
        class_masks = rel.class_masks()

        if oc_idx:
            ocq = rep.quotas[oc_idx]
            ocw = rep.weights[oc_idx]
            # order consistency: uniform within classes, non-increasing across
            prev = None
            for cmask in class_masks:
                members = [p for p in range(n) if (cmask >> p) & 1]
                col = ocw[:, members[0]]
                for p in members[1:]:
                    if not np.array_equal(ocw[:, p], col):
                        raise VerificationError(
                            "order-consistent constituent breaks class symmetry")
                if prev is not None and np.any(col > prev):
                    raise VerificationError(
                        "order-consistent constituent breaks the influence order")
                prev = col
            # every shift-minimal winning coalition wins everywhere
            wbits = _bit_matrix(wsm.masks, n)
            for lo in range(0, len(oc_idx), 64):
                hi = min(lo + 64, len(oc_idx))
                vals = wbits @ ocw[lo:hi].T
                bad = np.nonzero(~(vals >= ocq[lo:hi][None, :]).all(axis=1))[0]
                if len(bad):
                    raise VerificationError("shift-minimal winning coalition loses "
                                            "in an order-consistent constituent",
                                            int(wsm.masks[bad[0]]))
            tiers.append(("oc_winning_side", len(oc_idx)))
            # which shift-maximal losing coalitions are covered by OC games
            lbits = _bit_matrix(lsm.masks, n)
            covered = np.zeros(len(lsm.masks), dtype=bool)
            for lo in range(0, len(oc_idx), 64):
                hi = min(lo + 64, len(oc_idx))
                vals = lbits @ ocw[lo:hi].T
                covered |= (vals <= (ocq[lo:hi] - 1)[None, :]).any(axis=1)
        else:
            covered = np.zeros(len(lsm.masks), dtype=bool)
        # maximal losing coalitions not below any covered shift-maximal one
        if covered.all():
            leftovers = np.zeros(0, dtype=np.uint32)
        else:
            leftovers = associated_maximal_losing(
                lm, lsm.masks[covered], lsm.masks[~covered], shift)
        tiers.append(("losing_side_leftovers", len(leftovers)))
        # each leftover must lose in at least one constituent of any tag
        bad = _first_not_losing_anywhere(rep, leftovers, ind_idx, n)
        if bad is not None:
            raise VerificationError(
                "maximal losing coalition wins in every constituent", bad)

    if n <= full_check_limit:
        inter = intersection_game(*rep.games())
        if not blocks_equal(inter, game):
            raise VerificationError("full-scan mismatch with the game")
        tiers.append(("full_scan", 1 << n))
        full_scan = True
    else:
        full_scan = n <= full_check_limit
    report = VerificationReport(True, len(rep), len(oc_idx), len(ind_idx),
                                tuple(tiers), n <= full_check_limit)
    rep.verified = True
    return report


def _bit_matrix(masks, n) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.uint32)
    return ((masks[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1).astype(np.int64)


def _first_not_losing_anywhere(rep: IntersectionRepresentation, masks,
                               ind_idx, n: int):
    """First coalition losing in no constituent; None if all are covered.

    Indicator constituents are tested first with a cheap subset check
    (a coalition loses in an indicator game iff it is a subset of the
    zero-weight base); the rest fall back to weight sums.
    """
    masks = np.asarray(masks, dtype=np.uint32)
    if len(masks) == 0:
        return None
    pending = np.ones(len(masks), dtype=bool)
    if ind_idx:
        bases = np.zeros(len(ind_idx), dtype=np.uint32)
        for r, i in enumerate(ind_idx):
            b = 0
            for p in range(n):
                if rep.weights[i][p] == 0:
                    b |= 1 << p
            bases[r] = b
        for b in bases:
            pending &= (masks & ~b) != 0
            if not pending.any():
                return None
    rest = np.nonzero(pending)[0]
    bitmat = _bit_matrix(masks[rest], n)
    for lo in range(0, len(rest), 64):
        hi = min(lo + 64, len(rest))
        vals = bitmat[lo:hi] @ rep.weights.T        # (chunk, k)
        ok = (vals < rep.quotas[None, :]).any(axis=1)
        if not ok.all():
            return int(masks[rest[lo + int(np.nonzero(~ok)[0][0])]])
    return None


# ---------------------------------------------------------------------------
# covering pipeline

def cover_step_ilp(uncovered: CoalitionSet, game: Game,
                   rel: DesirabilityRelation, wsm: CoalitionSet,
                   weight_budget: int, node_budget: int = 50_000,
                   subset_limit: int = 24,
                   incumbent: WeightedGame | None = None):
    """One coverage-maximizing order-consistent game.

    Maximizes the number of uncovered shift-maximal losing coalitions made
    losing, over integer class-difference weights bounded by the caller's
    weight budget, with the standard big-M linking.  ``subset_limit`` caps
    the binary variables (the optimization runs over a deterministic subset
    of the uncovered family; coverage is then recounted over all of it).
    Returns (game, covered_mask_array, status).
    """
    if len(uncovered) == 0:
        raise ValueError("nothing left to cover")
    shift = ShiftSystem(game.n, rel.classes)
    cw = shift.prefix_counts(wsm.masks)
    sel = np.asarray(uncovered.masks[:subset_limit], dtype=np.uint32)
    cl = shift.prefix_counts(sel)
    k = shift.k
    m = len(sel)
    big_m = weight_budget * game.n

    sys = LinearSystem(k + 1 + m,
                       lower=[rat(0)] * k + [rat(1)] + [rat(0)] * m,
                       upper=[rat(weight_budget)] * k + [rat(big_m)] + [rat(1)] * m,
                       integer=[True] * (k + 1 + m))
    for row in cw:
        sys.add([int(c) for c in row] + [-1] + [0] * m, ">=", 0)
    for j, row in enumerate(cl):
        coeffs = [int(c) for c in row] + [-1] + [0] * m
        coeffs[k + 1 + j] = big_m
        sys.add(coeffs, "<=", big_m - 1)
    sys.add([rat(shift.cum_sizes[e]) for e in range(k)] + [0] * (m + 1),
            "<=", weight_budget)
    sys.set_objective([0] * (k + 1) + [1] * m, "max")
    out = ilp_solve(sys, node_budget=node_budget)

    best_game = incumbent
    status = out.status
    if out.point is not None:
        d_int = [int(v) for v in out.point[:k]]
        q = int(out.point[k])
        cand = WeightedGame.of(q, shift.weights_from_diffs(d_int))
        if incumbent is None or _coverage_count(cand, uncovered) > \
                _coverage_count(incumbent, uncovered):
            best_game = cand
    if best_game is None:
        return None, np.zeros(0, dtype=np.uint32), status
    covered = _coverage_masks(best_game, uncovered)
    return best_game, covered, status


def _coverage_masks(g: WeightedGame, family: CoalitionSet) -> np.ndarray:
    q, ws, _ = _integer_form(g)
    bits = _bit_matrix(family.masks, g.n)
    vals = bits @ np.array(ws, dtype=np.int64)
    return family.masks[vals <= q - 1]


def _coverage_count(g: WeightedGame, family: CoalitionSet) -> int:
    return len(_coverage_masks(g, family))


@dataclass
class PipelineResult:
    representation: IntersectionRepresentation
    report: VerificationReport
    greedy_games: int
    greedy_covered: int
    single_games: int
    indicator_games: int
    ilp_games: int = 0
    ilp_status: str = "skipped"


def upper_bound_pipeline(game: Game, rel: DesirabilityRelation,
                         wm: CoalitionSet, lm: CoalitionSet,
                         wsm: CoalitionSet, lsm: CoalitionSet,
                         sweep: SweepResult,
                         step_one: bool = True,
                         stop_gain: int = 50,
                         ilp_rounds: int = 0,
                         ilp_node_budget: int = 20_000,
                         weight_budget: int = 10_000,
                         verify: bool = True) -> PipelineResult:
    """Build and verify an intersection representation of the game.

    Steps: (I) a few exact coverage-ILP rounds (optional) followed by
    iterated max-gain coverage with the per-coalition game pool, while the
    marginal gain stays at least ``stop_gain``; (II) one game per still
    uncovered non-stubborn shift-maximal losing coalition, skipping any
    already covered; (III) one indicator game per maximal losing coalition
    associated with the stubborn set.  With step (I) disabled the result is
    the full per-coalition family plus indicators.
    """
    n = game.n
    if not np.array_equal(sweep.masks, lsm.masks):
        raise ValueError("sweep results must cover exactly the shift-maximal "
                         "losing family, in order")
    feas_idx = np.nonzero(sweep.feasible)[0]
    shift = ShiftSystem(n, rel.classes)
    games_out: list[tuple[int, np.ndarray]] = []    # (quota, weights)
    tags: list[str] = []

    ilp_games = 0
    ilp_status = "skipped"
    greedy_sel: list[int] = []
    gains: list[int] = []
    if step_one:
        uncovered_global = np.ones(len(lsm.masks), dtype=bool)
        for _ in range(ilp_rounds):
            unc = CoalitionSet(n, "custom", lsm.masks[uncovered_global])
            g, covered, ilp_status = cover_step_ilp(
                unc, game, rel, wsm, weight_budget, ilp_node_budget)
            if g is None or len(covered) < stop_gain:
                break
            q, ws, _ = _integer_form(g)
            games_out.append((q, np.array(ws, dtype=np.int64)))
            tags.append(OC_TAG)
            ilp_games += 1
            uncovered_global &= ~np.isin(lsm.masks, covered)
        # greedy max-gain over the per-coalition game pool
        cov_bits = _coverage_bitsets(sweep, feas_idx, lsm)
        words = cov_bits.shape[1]
        unc_bits = np.zeros(words, dtype=np.uint64)
        for i in np.nonzero(uncovered_global)[0]:
            unc_bits[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
        chosen, gains, unc_after = _kernels.greedy_cover_order(
            cov_bits, unc_bits, stop_gain)
        for c in chosen:
            gi = feas_idx[c]
            games_out.append((int(sweep.quotas[gi]), sweep.weights[gi].copy()))
            tags.append(OC_TAG)
        greedy_sel = list(chosen)
        # which lsm entries remain uncovered
        uncovered_global = np.zeros(len(lsm.masks), dtype=bool)
        for i in range(len(lsm.masks)):
            if (unc_after[i >> 6] >> np.uint64(i & 63)) & np.uint64(1):
                uncovered_global[i] = True
        # step II: sequential singles for uncovered non-stubborn coalitions
        singles = 0
        pending = uncovered_global & sweep.feasible
        order = np.nonzero(pending)[0]
        lbits = _bit_matrix(lsm.masks, n)
        for i in order:
            if not pending[i]:
                continue
            q = int(sweep.quotas[i])
            w = sweep.weights[i]
            games_out.append((q, w.copy()))
            tags.append(OC_TAG)
            singles += 1
            vals = lbits @ w
            pending &= ~(vals <= q - 1)
    else:
        singles = 0
        for i in feas_idx:
            games_out.append((int(sweep.quotas[i]), sweep.weights[i].copy()))
            tags.append(OC_TAG)
            singles += 1

    # step III: indicator games for the stubborn-associated remainder
    covered_masks = sweep.masks[sweep.feasible]
    leftovers = associated_maximal_losing(lm, covered_masks,
                                          sweep.stubborn_masks, shift)
    for mask in leftovers:
        g = indicator_game(int(mask), n)
        q, ws, _ = _integer_form(g)
        games_out.append((q, np.array(ws, dtype=np.int64)))
        tags.append(IND_TAG)

    quotas = np.array([q for q, _ in games_out], dtype=np.int64)
    weights = np.stack([w for _, w in games_out]) if games_out else \
        np.zeros((0, n), dtype=np.int64)
    rep = IntersectionRepresentation("intersection", n, quotas, weights, tags)
    report = None
    if verify:
        report = verify_representation(rep, game, rel, wm, lm, wsm, lsm)
    return PipelineResult(rep, report, len(greedy_sel),
                          int(sum(gains)), singles, len(leftovers),
                          ilp_games, ilp_status)


def _coverage_bitsets(sweep: SweepResult, feas_idx, lsm: CoalitionSet) -> np.ndarray:
    """Packed (game x coalition) coverage bits for the feasible pool."""
    nl = len(lsm.masks)
    words = (nl + 63) // 64
    bits = _bit_matrix(lsm.masks, sweep.weights.shape[1])
    out = np.zeros((len(feas_idx), words), dtype=np.uint64)
    chunk = 128
    for lo in range(0, len(feas_idx), chunk):
        hi = min(lo + chunk, len(feas_idx))
        idx = feas_idx[lo:hi]
        vals = bits @ sweep.weights[idx].T          # (nl, chunk)
        cov = (vals <= (sweep.quotas[idx] - 1)[None, :]).T.copy()
        for r in range(hi - lo):
            nz = np.nonzero(cov[r])[0]
            out[lo + r, nz >> 6] |= np.uint64(1) << (nz & 63).astype(np.uint64)
    return out


def union_pipeline(game: Game, rel: DesirabilityRelation,
                   wm: CoalitionSet, lm: CoalitionSet,
                   wsm: CoalitionSet, lsm: CoalitionSet,
                   sweep: SweepResult | None = None,
                   threads: int = 1, **kw) -> PipelineResult:
    """Disjunctive counterpart of the covering pipeline, via duality.

    The dual game swaps winning and losing through complementation; a
    conjunctive representation of the dual dualizes constituent-by-
    constituent into a disjunctive representation of the game.
    """
    n = game.n
    full = (1 << n) - 1
    dual = dual_game(game)

    def comp(cs, kind):
        return CoalitionSet(n, kind, np.array([full ^ int(m) for m in cs.masks],
                                              dtype=np.uint32))

    dwm = comp(lm, "minimal_winning")
    dlm = comp(wm, "maximal_losing")
    dwsm = comp(lsm, "shift_minimal_winning")
    dlsm = comp(wsm, "shift_maximal_losing")
    if sweep is None:
        sweep = sweep_feasibility(dlsm.masks, dual, rel, dwsm, threads=threads)
    res = upper_bound_pipeline(dual, rel, dwm, dlm, dwsm, dlsm, sweep, **kw)
    rep = res.representation
    dual_quotas = rep.weights.sum(axis=1) - rep.quotas + 1
    out = IntersectionRepresentation("union", n, dual_quotas.astype(np.int64),
                                     rep.weights.copy(), list(rep.tags))
    report = verify_representation(out, game, rel, wm, lm, wsm, lsm)
    return PipelineResult(out, report, res.greedy_games, res.greedy_covered,
                          res.single_games, res.indicator_games,
                          res.ilp_games, res.ilp_status)


# ---------------------------------------------------------------------------
# exact dimension by set covering (small games)

def exact_dimension_small(game: Game, max_lm: int = 20,
                          set_budget: int = 100_000,
                          node_budget: int = 500_000):
    """Exact dimension via minimal covering of the maximal losing family.

    Enumerates (by DFS with infeasibility pruning; supersets of infeasible
    sets are infeasible) the inclusion-maximal families of maximal losing
    coalitions that a single weighted game can keep losing while every
    winning coalition wins, then solves the set-covering program exactly.
    Returns (dimension, witness weighted games).
    """
    n = game.n
    if n > 10:
        raise ValueError("exact dimension is limited to n <= 10")
    wm = minimal_winning(game)
    lm = maximal_losing(game)
    if len(lm) > max_lm:
        raise ValueError(f"too many maximal losing coalitions ({len(lm)})")
    lm_masks = [int(m) for m in lm.masks]
    wrows = _bit_matrix(wm.masks, n)

    def feasible(subset):
        sys = LinearSystem(n + 1)
        sys.lower[n] = rat(1)
        for row in wrows:
            sys.add([int(c) for c in row] + [-1], ">=", 0)
        for j in subset:
            mask = lm_masks[j]
            coeffs = [1 if (mask >> p) & 1 else 0 for p in range(n)] + [-1]
            sys.add(coeffs, "<=", -1)
        return lp_feasible(sys)

    maximal_sets: list[tuple[int, ...]] = []
    visited = 0

    def extend(current, start):
        nonlocal visited
        visited += 1
        if visited > set_budget:
            raise RuntimeError("budget exhausted while enumerating coverable sets")
        grew = False
        for j in range(start, len(lm_masks)):
            cand = current + (j,)
            if feasible(cand).status == "feasible":
                grew = True
                extend(cand, j + 1)
        if not grew:
            # maximal under forward extension; check backward extensions too
            full = set(current)
            for j in range(len(lm_masks)):
                if j not in full and feasible(tuple(sorted(full | {j}))).status == "feasible":
                    return
            maximal_sets.append(current)

    extend((), 0)
    # deduplicate (different DFS paths can reach the same maximal set)
    maximal_sets = sorted(set(maximal_sets))
    if not maximal_sets:
        raise RuntimeError("no coverable sets found")

    cover = LinearSystem(len(maximal_sets),
                         lower=[rat(0)] * len(maximal_sets),
                         upper=[rat(1)] * len(maximal_sets),
                         integer=[True] * len(maximal_sets))
    for j in range(len(lm_masks)):
        coeffs = [1 if j in s else 0 for s in maximal_sets]
        cover.add(coeffs, ">=", 1)
    cover.set_objective([1] * len(maximal_sets), "min")
    out = ilp_solve(cover, node_budget=node_budget)
    if out.status != "feasible":
        raise RuntimeError(f"set covering failed: {out.status}")
    dim = int(out.objective_value)
    witnesses = []
    for i, s in enumerate(maximal_sets):
        if out.point[i] == 1:
            pt = feasible(s).point
            ints, _ = scale_to_integers(pt)
            witnesses.append(WeightedGame.of(ints[-1], ints[:-1]))
    inter = intersection_game(*witnesses) if len(witnesses) > 1 else witnesses[0]
    if not blocks_equal(inter, game):
        raise RuntimeError("internal error: covering witnesses do not "
                           "reproduce the game")
    return dim, witnesses

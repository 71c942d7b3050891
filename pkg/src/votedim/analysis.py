"""Shared lazy computation of the EU28 analysis artifacts.

Everything heavy (full enumerations, the incompatibility graph, the
per-coalition feasibility sweep) is computed once per process and reused by
the CLI and the test suite.  Setting VOTEDIM_CACHE_DIR enables an on-disk
cache for iterative development; cached feasibility witnesses are re-checked
exactly in bulk when loaded, so a stale cache cannot silently corrupt
results that build on them.
"""

from __future__ import annotations

import os
from functools import cached_property
from pathlib import Path

import numpy as np

from . import dataset
from .bounds import (LowerBoundResult, boolean_dimension, codim_lower_bound,
                     lower_bound_dimension)
from .covering import (ShiftLP, SweepResult, associated_maximal_losing,
                       sweep_feasibility, upper_bound_pipeline)
from .enumeration import (BlockEngine, CoalitionSet, count_partition,
                          desirability, losing_by_size, maximal_losing,
                          minimal_winning, shift_sets)
from .games import intersection_game
from .graphs import build_graph, max_clique
from .robustness import robustness_radius
from .trades import ShiftSystem

__all__ = ["EUAnalysis"]


class EUAnalysis:
    """Lazily computed, process-wide EU28 artifacts."""

    _shared = None

    def __init__(self, threads: int | None = None):
        if threads is None:
            threads = min(2, os.cpu_count() or 1)
        self.threads = threads
        cache = os.environ.get("VOTEDIM_CACHE_DIR")
        self.cache_dir = Path(cache) if cache else None
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)

    @classmethod
    def shared(cls) -> "EUAnalysis":
        if cls._shared is None:
            cls._shared = cls()
        return cls._shared

    # -- basic objects -------------------------------------------------------

    @cached_property
    def pop(self):
        return dataset.eu28_population()

    @cached_property
    def game(self):
        return dataset.eu28_game()

    @cached_property
    def engine(self):
        return BlockEngine(self.game)

    # -- enumerations ---------------------------------------------------------

    @cached_property
    def counts(self):
        return count_partition(self.game)

    @cached_property
    def v12_winning(self):
        g = self.game
        return count_partition(intersection_game(g.games[0], g.games[1]))[0]

    def _cached_masks(self, name, compute):
        if self.cache_dir:
            path = self.cache_dir / f"{name}.npy"
            if path.exists():
                return np.load(path)
            arr = compute()
            np.save(path, arr)
            return arr
        return compute()

    @cached_property
    def wm(self) -> CoalitionSet:
        masks = self._cached_masks("wm", lambda: minimal_winning(self.game).masks)
        return CoalitionSet(28, "minimal_winning", masks)

    @cached_property
    def lm(self) -> CoalitionSet:
        masks = self._cached_masks("lm", lambda: maximal_losing(self.game).masks)
        return CoalitionSet(28, "maximal_losing", masks)

    @cached_property
    def rel(self):
        if self.cache_dir:
            path = self.cache_dir / "at_least.npy"
            if path.exists():
                mat = np.load(path)
                from .enumeration import DesirabilityRelation
                classes = tuple((i,) for i in range(1, 29))
                return DesirabilityRelation(28, mat, True, classes)
        rel = desirability(self.game, self.wm)
        if self.cache_dir and rel.complete and all(len(c) == 1 for c in rel.classes):
            np.save(self.cache_dir / "at_least.npy", rel.at_least)
        return rel

    @cached_property
    def shift_pair(self):
        wsm_masks = None
        if self.cache_dir and (self.cache_dir / "wsm.npy").exists() \
                and (self.cache_dir / "lsm.npy").exists():
            wsm = CoalitionSet(28, "shift_minimal_winning",
                               np.load(self.cache_dir / "wsm.npy"))
            lsm = CoalitionSet(28, "shift_maximal_losing",
                               np.load(self.cache_dir / "lsm.npy"))
            return wsm, lsm
        wsm, lsm = shift_sets(self.game, self.rel, self.wm, self.lm)
        if self.cache_dir:
            np.save(self.cache_dir / "wsm.npy", wsm.masks)
            np.save(self.cache_dir / "lsm.npy", lsm.masks)
        return wsm, lsm

    @property
    def wsm(self) -> CoalitionSet:
        return self.shift_pair[0]

    @property
    def lsm(self) -> CoalitionSet:
        return self.shift_pair[1]

    @cached_property
    def l2324(self) -> CoalitionSet:
        return losing_by_size(self.game, {23, 24})

    # -- graph and cliques -----------------------------------------------------

    @cached_property
    def graph(self):
        return build_graph(self.l2324, self.game, self.pop, "greedy_2trade",
                           "losing")

    @cached_property
    def clique(self):
        return max_clique(self.graph, k_target=6)

    # -- feasibility sweep ------------------------------------------------------

    @cached_property
    def sweep(self) -> SweepResult:
        lsm = self.lsm
        if self.cache_dir:
            path = self.cache_dir / "sweep.npz"
            if path.exists():
                data = np.load(path)
                res = SweepResult(data["masks"], data["feasible"],
                                  data["quotas"], data["weights"])
                if np.array_equal(res.masks, lsm.masks):
                    self._verify_sweep_witnesses(res)
                    return res
        res = sweep_feasibility(lsm.masks, self.game, self.rel, self.wsm,
                                threads=self.threads)
        if self.cache_dir:
            np.savez(self.cache_dir / "sweep.npz", masks=res.masks,
                     feasible=res.feasible, quotas=res.quotas,
                     weights=res.weights)
        return res

    def _verify_sweep_witnesses(self, res: SweepResult):
        """Exact bulk re-check of all cached feasibility witnesses."""
        shift = ShiftSystem(28, self.rel.classes)
        cw = shift.prefix_counts(self.wsm.masks)
        idx = np.nonzero(res.feasible)[0]
        # class-difference vector of each witness game, column-aligned
        order = [cls[0] - 1 for cls in self.rel.classes]
        w = res.weights[idx][:, order]
        diffs = np.diff(np.concatenate([w, np.zeros((len(idx), 1), np.int64)],
                                       axis=1), axis=1) * -1
        mins = None
        for lo in range(0, len(idx), 256):
            hi = min(lo + 256, len(idx))
            vals = cw @ diffs[lo:hi].T
            m = vals.min(axis=0)
            mins = m if mins is None else np.concatenate([mins, m])
        tvals = (shift.prefix_counts(res.masks[idx]) * diffs).sum(axis=1)
        if not np.all(tvals < mins) or not np.all(tvals + 1 == res.quotas[idx]):
            raise RuntimeError("cached sweep witnesses failed re-verification; "
                               "clear VOTEDIM_CACHE_DIR")

    @cached_property
    def stubborn(self) -> np.ndarray:
        return self.sweep.stubborn_masks

    @cached_property
    def associated(self) -> np.ndarray:
        shift = ShiftSystem(28, self.rel.classes)
        return associated_maximal_losing(self.lm,
                                         self.sweep.masks[self.sweep.feasible],
                                         self.stubborn, shift)

    # -- certificates ------------------------------------------------------------

    @cached_property
    def robust_clique_masks(self):
        return dataset.masks(dataset.ROBUST_CLIQUE6)

    @cached_property
    def lower_bound(self) -> LowerBoundResult:
        return lower_bound_dimension(self.game, self.pop, pool=self.l2324,
                                     lm=self.lm)

    def pipeline(self, step_one: bool = True, **kw):
        return upper_bound_pipeline(self.game, self.rel, self.wm, self.lm,
                                    self.wsm, self.lsm, self.sweep,
                                    step_one=step_one, **kw)

    def codim(self, target: int = 2000):
        return codim_lower_bound(self.game, self.pop, self.wm, target=target)

    def prop_radii(self):
        """Perturbation radii of the three bundled certificates."""
        from .games import mask_from_members
        r1 = robustness_radius(
            self.robust_clique_masks + [mask_from_members(dataset.LARGEST_15)],
            self.game, self.pop, "dimension-7-certificate", "losing")
        r2 = robustness_radius(dataset.masks(dataset.DIM3_LOSING_TRIPLE),
                               self.game, self.pop,
                               "dimension-3-certificate", "losing")
        r3 = robustness_radius(dataset.masks(dataset.CODIM7_WINNING_SET),
                               self.game, self.pop,
                               "codimension-7-certificate", "winning")
        return r1, r2, r3

    def boolean(self):
        return boolean_dimension(self.game, self.pop, candidate=self.game,
                                 dim3_losing=dataset.masks(dataset.DIM3_LOSING_TRIPLE),
                                 codim3_winning=dataset.masks(dataset.CODIM7_WINNING_SET)[:3])

"""Robustness of certificates under population perturbation.

Perturbations range over exact rational population-share vectors (summing
to one); distances are L1.  A certified fact that depends on the population
channel persists while the perturbation stays below twice its share slack
(moving mass x onto a coalition costs L1 distance 2x), so the radius of a
certificate is twice the smallest slack among its population-dependent
facts.  Facts decided by member counts alone are immune.
"""

from __future__ import annotations

from dataclasses import dataclass

from .enumeration import CoalitionSet
from .games import (CouncilStructure, Game, PopulationVector, council_rule,
                    council_structure, eval_game, popcount)
from .rationals import Rat, rat
from .trades import TradeCertificate, is_trading_transform, losing_pair_trade, \
    winning_pair_trade

__all__ = ["RobustnessReport", "coalition_slack", "robustness_radius",
           "check_at", "rebuild_at", "perturb_shares"]


@dataclass(frozen=True)
class RobustnessReport:
    certificate_id: str
    radius: Rat | None                 # None: no population-dependent fact
    binding_coalition: int | None      # mask attaining the smallest slack
    citizens_equivalent: Rat | None    # radius/2 * total population


def coalition_slack(mask: int, role: str, cs: CouncilStructure,
                    pop: PopulationVector) -> Rat | None:
    """Population slack of one certified fact; None when count-immune.

    A losing coalition at or above the membership quota (and below the
    count-win size) loses through the population channel only: slack is the
    share it lacks.  A winning coalition below the count-win size wins
    through the population channel only: slack is its surplus share.
    """
    size = popcount(mask)
    share = pop.share_of(mask)
    if role == "losing":
        if size >= cs.count_win_size:
            raise ValueError("a coalition at the count-win size cannot lose")
        if size < cs.member_quota:
            return None
        slack = cs.pop_threshold - share
        if slack <= 0:
            raise ValueError("coalition is not losing at the base population")
        return slack
    if role == "winning":
        if size >= cs.count_win_size:
            return None
        if size < cs.member_quota:
            raise ValueError("a coalition below the membership quota cannot win")
        slack = share - cs.pop_threshold
        if slack < 0:
            raise ValueError("coalition is not winning at the base population")
        return slack
    raise ValueError(f"unknown fact role {role!r}")


def _facts_of(cert, mode: str):
    if isinstance(cert, TradeCertificate):
        return ([(s, "winning") for s in cert.winners]
                + [(t, "losing") for t in cert.losers])
    masks = list(cert) if not isinstance(cert, CoalitionSet) else list(cert)
    return [(m, mode) for m in masks]


def robustness_radius(cert, game: Game, pop: PopulationVector,
                      certificate_id: str = "",
                      mode: str = "losing") -> RobustnessReport:
    """Supremum of safe L1 perturbation distances for the certificate.

    ``cert`` is a coalition family (with ``mode`` naming the role its
    members play) or a single trading transform.  The facts checked are
    exactly the stored coalitions' winning/losing statuses; pairwise trade
    evidence is re-derived by ``check_at`` rather than frozen, so it does
    not tighten the radius.
    """
    cs = council_structure(game)
    best = None
    binding = None
    for mask, role in _facts_of(cert, mode):
        slack = coalition_slack(int(mask), role, cs, pop)
        if slack is None:
            continue
        if best is None or slack < best or (slack == best and mask < binding):
            best = slack
            binding = int(mask)
    if best is None:
        return RobustnessReport(certificate_id, None, None, None)
    radius = 2 * best
    citizens = None
    if pop.raw_counts is not None:
        citizens = radius * pop.total / 2
    return RobustnessReport(certificate_id, radius, binding, citizens)


def rebuild_at(game: Game, pop2: PopulationVector) -> Game:
    """The same council rule over a different population vector."""
    cs = council_structure(game)
    return council_rule(pop2, member_quota=cs.member_quota,
                        pop_threshold=cs.pop_threshold,
                        blocking_size=cs.n - cs.count_win_size + 1)


def check_at(cert, game: Game, pop2: PopulationVector,
             mode: str = "losing") -> bool:
    """Re-verify every fact (and trade completion) at another population.

    The game is rebuilt at ``pop2``; stored coalitions must keep their
    winning/losing status, and for coalition-set certificates each pair
    must again admit a 2-trade completion.
    """
    game2 = rebuild_at(game, pop2)
    if isinstance(cert, TradeCertificate):
        return is_trading_transform(cert, game2).valid
    masks = list(cert)
    for m in masks:
        won = eval_game(game2, int(m))
        if (mode == "losing") == won:
            return False
    pair = losing_pair_trade if mode == "losing" else winning_pair_trade
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            if pair(int(masks[i]), int(masks[j]), game2, pop2) is None:
                return False
    return True


def perturb_shares(pop: PopulationVector, donors, recipients, amount,
                   proportional: bool = True) -> PopulationVector:
    """Move an exact amount of relative population mass between groups.

    The amount is drawn from donors proportionally to their current shares
    (or evenly with ``proportional=False``) and split evenly among
    recipients; the result stays a valid share vector (ValueError if a
    donor would go negative).  The L1 distance to ``pop`` is 2 * amount.
    """
    amount = rat(amount)
    donors = list(donors)
    recipients = list(recipients)
    if not donors or not recipients or set(donors) & set(recipients):
        raise ValueError("donor and recipient player sets must be disjoint")
    shares = list(pop.shares)
    donor_mass = sum((shares[p - 1] for p in donors), rat(0))
    for p in donors:
        give = (amount * shares[p - 1] / donor_mass if proportional
                else amount / len(donors))
        shares[p - 1] = shares[p - 1] - give
        if shares[p - 1] < 0:
            raise ValueError(f"player {p} lacks the population to give away")
    take = amount / len(recipients)
    for p in recipients:
        shares[p - 1] = shares[p - 1] + take
    return PopulationVector(tuple(shares))

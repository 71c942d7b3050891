"""Bundled reference data for the EU28 council-rule analysis.

Populations are the exact 2014 Eurostat figures (player 1 = most populous).
The certificate coalitions below are stored as tuples of 1-based member
indices; every one of them is re-verified from first principles by the test
suite rather than trusted.
"""

from __future__ import annotations

from .games import PopulationVector, build_eu28, mask_from_members

__all__ = [
    "EU28_MEMBERS", "EU28_POPULATIONS", "eu28_population", "eu28_game",
    "V2_MINSUM_QUOTA", "V2_MINSUM_WEIGHTS",
    "LARGEST_15", "ROBUST_CLIQUE6", "PUBLISHED_CLIQUE6",
    "DIM3_LOSING_TRIPLE", "CODIM7_WINNING_SET", "EXAMPLE6_MAXIMAL_LOSING",
]

EU28_MEMBERS = (
    "Germany", "France", "United Kingdom", "Italy", "Spain", "Poland",
    "Romania", "Netherlands", "Belgium", "Greece", "Czech Republic",
    "Portugal", "Hungary", "Sweden", "Austria", "Bulgaria", "Denmark",
    "Finland", "Slovakia", "Ireland", "Croatia", "Lithuania", "Slovenia",
    "Latvia", "Estonia", "Cyprus", "Luxembourg", "Malta",
)

EU28_POPULATIONS = (
    80_780_000, 65_856_609, 64_308_261, 60_782_668, 46_507_760, 38_495_659,
    19_942_642, 16_829_289, 11_203_992, 10_992_589, 10_512_419, 10_427_301,
    9_879_000, 9_644_864, 8_507_786, 7_245_677, 5_627_235, 5_451_270,
    5_415_949, 4_604_029, 4_246_700, 2_943_472, 2_061_085, 2_001_468,
    1_315_819, 858_000, 549_680, 425_384,
)

# minimum-sum integer representation of the 65%-population game
V2_MINSUM_QUOTA = 19_022_681
V2_MINSUM_WEIGHTS = (
    4_659_052, 3_798_333, 3_709_031, 3_505_689, 2_682_373, 2_220_268,
    1_150_208, 970_643, 646_199, 634_006, 606_312, 601_403, 569_780,
    556_276, 490_693, 417_900, 324_556, 314_406, 312_369, 265_541,
    244_932, 169_767, 118_875, 115_436, 75_890, 49_486, 31_703, 24_535,
)


def eu28_population() -> PopulationVector:
    return PopulationVector.from_counts(EU28_POPULATIONS)


def eu28_game():
    return build_eu28(eu28_population())


# the 15 most populous states: maximal losing (one state short of quota)
LARGEST_15 = tuple(range(1, 16))

# Six losing coalitions of 23 members, pairwise incompatible via 2-trades,
# chosen (by exhaustive search over all maximum cliques of the greedy
# incompatibility graph) to maximize the smallest population slack.  Stored
# as complements for readability.
_ROBUST_CLIQUE6_COMPLEMENTS = (
    (2, 4, 5, 19, 26),
    (1, 5, 6, 14, 21),
    (2, 3, 6, 17, 18),
    (1, 3, 8, 12, 16),
    (1, 4, 7, 13, 15),
    (1, 2, 9, 10, 11),
)
ROBUST_CLIQUE6 = tuple(
    tuple(p for p in range(1, 29) if p not in comp)
    for comp in _ROBUST_CLIQUE6_COMPLEMENTS
)

# The six-coalition listing as published.  Kept verbatim for regression
# tests: its fourth entry actually wins (population share 65.007%), so the
# listing cannot be verified as printed; see the bundled analysis notes.
PUBLISHED_CLIQUE6 = (
    (1, 4, 5, 7, 8, 9, 10, 11, 12, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28),
    (3, 4, 5, 6, 7, 8, 10, 12, 13, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28),
    (2, 4, 5, 6, 7, 9, 10, 11, 12, 13, 14, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28),
    (2, 3, 5, 6, 8, 9, 10, 11, 13, 14, 15, 16, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28),
    (2, 3, 4, 7, 8, 9, 11, 12, 13, 14, 15, 16, 17, 18, 20, 21, 22, 23, 24, 25, 26, 27, 28),
    (1, 3, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 19, 21, 22, 23, 24, 25, 26, 27, 28),
)

# Three losing coalitions whose pairs complete to 2-trades; robust to
# population perturbation (each has population share below 63%).
DIM3_LOSING_TRIPLE = (
    (1, 4, 5, 7, 8, 9, 11, 12, 13, 14, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 28),
    (3, 4, 5, 6, 8, 9, 10, 12, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 26, 27),
    (2, 4, 5, 6, 7, 8, 10, 11, 13, 15, 17, 18, 19, 20, 22, 23, 24, 25, 27, 28),
)

# Seven 16-member winning coalitions whose pairs complete to 2-trades
# (dually: both trade partners losing), witnessing co-dimension >= 7.
CODIM7_WINNING_SET = (
    (2, 3, 4, 5, 7, 8, 9, 11, 12, 13, 14, 15, 17, 18, 19, 20),
    (1, 2, 3, 6, 8, 9, 10, 11, 12, 13, 14, 15, 17, 18, 19, 25),
    (1, 3, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 19, 20),
    (1, 2, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 22),
    (1, 2, 4, 5, 7, 9, 10, 11, 12, 13, 14, 15, 19, 23, 24, 26),
    (1, 2, 4, 6, 8, 9, 10, 11, 12, 13, 14, 15, 16, 18, 20, 21),
    (1, 2, 3, 5, 7, 10, 11, 12, 13, 14, 15, 18, 20, 21, 22, 28),
)

# Six-player complete game that is not weighted (the smallest possible:
# every complete simple game with up to 5 players is weighted).  Defined by
# its minimal winning coalitions; influence classes are {1,2}, {3,4}, {5,6}.
EXAMPLE6_MINIMAL_WINNING = (
    (1, 2), (1, 3, 4), (2, 3, 4), (3, 4, 5, 6),
    (1, 3, 5, 6), (1, 4, 5, 6), (2, 3, 5, 6), (2, 4, 5, 6),
)

# Its shift-maximal losing coalitions.  The full maximal-losing family has
# six more members, none of them shift-maximal: each admits a swap to a
# strictly stronger outsider that stays losing.
EXAMPLE6_SHIFT_MAXIMAL_LOSING = (
    (1, 3, 5), (1, 3, 6), (1, 4, 5), (1, 4, 6),
    (2, 3, 5), (2, 3, 6), (2, 4, 5), (2, 4, 6),
)

EXAMPLE6_MAXIMAL_LOSING = EXAMPLE6_SHIFT_MAXIMAL_LOSING + (
    (3, 4, 5), (3, 4, 6), (1, 5, 6), (2, 5, 6), (3, 5, 6), (4, 5, 6),
)


def example6_game():
    from .games import game_from_minimal_winning
    return game_from_minimal_winning(6, masks(EXAMPLE6_MINIMAL_WINNING))


def masks(coalitions) -> list[int]:
    """Bitmasks for a sequence of member-index tuples."""
    return [mask_from_members(c) for c in coalitions]

"""votedim: exact analysis of binary voting rules.

Compact representation of simple games (weighted games and monotone AND/OR
combinations), weightedness testing via trading transforms and exact
rational LP, and certified lower/upper bounds on the dimension, co-dimension
and Boolean dimension of a rule, including the bundled EU28 council rule and
robustness of its certificates under population perturbation.
"""

from .games import (Coalition, CompositeGame, PopulationVector, WeightedGame,
                    build_eu28, council_rule, eval_game, games_equal,
                    intersection_game, union_game)
from .enumeration import (CoalitionSet, DesirabilityRelation, count_partition,
                          desirability, losing_by_size, maximal_losing,
                          minimal_winning, shift_sets)

__version__ = "0.1.0"

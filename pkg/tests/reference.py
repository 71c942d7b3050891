"""Naive reference implementations used as independent oracles.

Everything here enumerates all 2^n coalitions with plain Python integers and
exact rationals: slow, obviously correct, and entirely separate from the
vectorized code paths it is used to check.
"""

from itertools import combinations

from votedim.games import eval_game, popcount


def all_masks(n):
    return range(1 << n)


def winning_losing(game):
    win, lose = [], []
    for m in all_masks(game.n):
        (win if eval_game(game, m) else lose).append(m)
    return win, lose


def naive_minimal_winning(game):
    out = []
    for m in all_masks(game.n):
        if not eval_game(game, m):
            continue
        if all(not eval_game(game, m & ~(1 << i))
               for i in range(game.n) if (m >> i) & 1):
            out.append(m)
    return out


def naive_maximal_losing(game):
    out = []
    for m in all_masks(game.n):
        if eval_game(game, m):
            continue
        if all(eval_game(game, m | (1 << i))
               for i in range(game.n) if not (m >> i) & 1):
            out.append(m)
    return out


def naive_at_least(game, i, j):
    """Player i+1 at least as influential as player j+1 (0-based args)."""
    n = game.n
    rest = [k for k in range(n) if k not in (i, j)]
    for r in range(len(rest) + 1):
        for comb in combinations(rest, r):
            s = 0
            for k in comb:
                s |= 1 << k
            if eval_game(game, s | (1 << j)) and not eval_game(game, s | (1 << i)):
                return False
    return True


def naive_desirability_matrix(game):
    n = game.n
    return [[naive_at_least(game, i, j) for j in range(n)] for i in range(n)]


def naive_shift_sets(game, at_least):
    """Shift-minimal winning / shift-maximal losing via the raw definition."""
    n = game.n

    def strictly_stronger(i, j):
        return at_least[i][j] and not at_least[j][i]

    wsm = []
    for m in naive_minimal_winning(game):
        ok = True
        for i in range(n):
            if not (m >> i) & 1:
                continue
            for j in range(n):
                if (m >> j) & 1 or not strictly_stronger(i, j):
                    continue
                if eval_game(game, (m & ~(1 << i)) | (1 << j)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            wsm.append(m)
    lsm = []
    for m in naive_maximal_losing(game):
        ok = True
        for i in range(n):
            if not (m >> i) & 1:
                continue
            for j in range(n):
                if (m >> j) & 1 or not strictly_stronger(j, i):
                    continue
                if not eval_game(game, (m & ~(1 << i)) | (1 << j)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            lsm.append(m)
    return wsm, lsm


def naive_is_trade(game, winners, losers):
    """Balance plus winning/losing checks for a trading transform."""
    if len(winners) != len(losers):
        return False
    for i in range(game.n):
        bit = 1 << i
        if (sum(1 for s in winners if s & bit)
                != sum(1 for t in losers if t & bit)):
            return False
    return (all(eval_game(game, s) for s in winners)
            and all(not eval_game(game, t) for t in losers))


def random_weighted_game(rng, n, max_weight=9):
    """A random small weighted game with integer data."""
    from votedim.games import WeightedGame
    while True:
        ws = [int(rng.integers(0, max_weight + 1)) for _ in range(n)]
        total = sum(ws)
        if total == 0:
            continue
        q = int(rng.integers(1, total + 1))
        return WeightedGame.of(q, ws)

import numpy as np
import pytest

from votedim.dataset import (EXAMPLE6_SHIFT_MAXIMAL_LOSING, LARGEST_15,
                             PUBLISHED_CLIQUE6, ROBUST_CLIQUE6, example6_game,
                             eu28_game, eu28_population, masks)
from votedim.enumeration import desirability, minimal_winning, shift_sets
from votedim.games import (WeightedGame, eval_game, games_equal,
                           mask_from_members, members_from_mask)
from votedim.trades import (TradeCertificate, find_m_trade, greedy_2trade,
                            is_trading_transform, losing_pair_trade,
                            min_sum_representation, test_weighted,
                            winning_pair_trade)

from reference import naive_is_trade, random_weighted_game


@pytest.fixture(scope="module")
def example6():
    return example6_game()


@pytest.fixture(scope="module")
def eu_game():
    return eu28_game()


@pytest.fixture(scope="module")
def eu_pop():
    return eu28_population()


def test_example6_two_trade(example6):
    cert = TradeCertificate(
        (mask_from_members([1, 2]), mask_from_members([3, 4, 5, 6])),
        (mask_from_members([1, 3, 5]), mask_from_members([2, 4, 6])))
    chk = is_trading_transform(cert, example6)
    assert chk.valid
    assert naive_is_trade(example6, cert.winners, cert.losers)


def test_trade_same_coalition_both_sides_invalid(example6):
    s = mask_from_members([1, 2])
    cert = TradeCertificate((s,), (s,))
    chk = is_trading_transform(cert, example6)
    assert not chk.valid and chk.balanced and not chk.losers_ok


def test_unbalanced_trade_detected(example6):
    cert = TradeCertificate(
        (mask_from_members([1, 2]), mask_from_members([3, 4, 5, 6])),
        (mask_from_members([1, 3, 5]), mask_from_members([2, 4, 5])))
    chk = is_trading_transform(cert, example6)
    assert not chk.balanced and not chk.valid


def test_footnote_trade_reproduced(eu_game, eu_pop):
    t1 = mask_from_members(PUBLISHED_CLIQUE6[0])
    t2 = mask_from_members(PUBLISHED_CLIQUE6[1])
    cert = greedy_2trade(t1, t2, eu_game, eu_pop)
    assert cert is not None
    assert members_from_mask(cert.winners[0]) == tuple(range(4, 29))
    assert members_from_mask(cert.winners[1]) == (1, 3, 4, 5, 7, 8, 10, 12,
                                                  *range(15, 29))
    assert is_trading_transform(cert, eu_game).valid


def test_greedy_2trade_rejects_same(eu_game, eu_pop):
    t = mask_from_members(PUBLISHED_CLIQUE6[0])
    with pytest.raises(ValueError):
        greedy_2trade(t, t, eu_game, eu_pop)


def test_robust_clique_pairwise_trades(eu_game, eu_pop):
    ms = masks(ROBUST_CLIQUE6)
    for i in range(6):
        for j in range(i + 1, 6):
            cert = greedy_2trade(ms[i], ms[j], eu_game, eu_pop)
            assert cert is not None
            assert is_trading_transform(cert, eu_game).valid


def test_largest15_pairs_with_clique(eu_game, eu_pop):
    big15 = mask_from_members(LARGEST_15)
    for t in masks(ROBUST_CLIQUE6):
        cert = losing_pair_trade(big15, t, eu_game, eu_pop)
        assert cert is not None
        assert is_trading_transform(cert, eu_game).valid


def test_winning_pair_trades_codim7_reference(eu_game, eu_pop):
    from votedim.dataset import CODIM7_WINNING_SET
    ms = masks(CODIM7_WINNING_SET)
    for s in ms:
        assert eval_game(eu_game, s)
    for i in range(7):
        for j in range(i + 1, 7):
            cert = winning_pair_trade(ms[i], ms[j], eu_game, eu_pop)
            assert cert is not None, (i, j)
            assert is_trading_transform(cert, eu_game).valid


def test_find_m_trade_example6(example6):
    cert = find_m_trade(example6, 2)
    assert cert is not None
    assert is_trading_transform(cert, example6).valid
    assert naive_is_trade(example6, cert.winners, cert.losers)


def test_find_m_trade_weighted_none():
    g = WeightedGame.of(2, [1, 1, 1])
    assert find_m_trade(g, 2) is None
    assert find_m_trade(g, 3) is None


def test_random_complete_5player_games_trade_free():
    rng = np.random.default_rng(19)
    for _ in range(12):
        g = random_weighted_game(rng, 5)
        for m in (2, 3, 4):
            assert find_m_trade(g, m, budget=3_000_000) is None


def test_weighted_example6_not_weighted(example6):
    res = test_weighted(example6)
    assert res.status == "not_weighted"
    assert res.farkas_rows
    if res.trade is not None:
        assert is_trading_transform(res.trade, example6).valid


def test_weighted_small_games():
    res = test_weighted(WeightedGame.of(2, [1, 1, 1]))
    assert res.status == "weighted"
    assert games_equal(res.representation, WeightedGame.of(2, [1, 1, 1]))


def test_weighted_agrees_with_trade_search_small():
    rng = np.random.default_rng(23)
    from votedim.games import intersection_game
    found_unweighted = 0
    for _ in range(25):
        n = int(rng.integers(3, 7))
        g = intersection_game(random_weighted_game(rng, n),
                              random_weighted_game(rng, n))
        res = test_weighted(g)
        trade = find_m_trade(g, 2, budget=500_000)
        if res.status == "weighted":
            assert trade is None
            assert games_equal(res.representation, g)
        else:
            found_unweighted += 1
    assert found_unweighted >= 1


def test_min_sum_dictator():
    rep = min_sum_representation(WeightedGame.of(5, [7, 1, 1]))
    assert (rep.quota, rep.weights) == (1, (1, 0, 0))


def test_min_sum_small_vs_bruteforce():
    g = WeightedGame.of(4, [3, 2, 2, 1])
    rep = min_sum_representation(g)
    assert games_equal(rep, g)
    got = sum(rep.weights)
    # exhaustive oracle over all integer weight vectors with small sum
    best = None
    for total in range(1, 9):
        for w1 in range(total + 1):
            for w2 in range(total - w1 + 1):
                for w3 in range(total - w1 - w2 + 1):
                    w4 = total - w1 - w2 - w3
                    for q in range(1, total + 1):
                        cand = WeightedGame.of(q, [w1, w2, w3, w4])
                        if games_equal(cand, g):
                            best = total if best is None else min(best, total)
        if best is not None:
            break
    assert got == best == 8


def test_min_sum_symmetric():
    rep = min_sum_representation(WeightedGame.of(6, [2, 2, 2]))
    assert games_equal(rep, WeightedGame.of(6, [2, 2, 2]))
    assert sum(rep.weights) == 3

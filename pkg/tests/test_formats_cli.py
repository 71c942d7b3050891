import numpy as np
import pytest

from votedim import formats
from votedim.cli import main
from votedim.covering import IntersectionRepresentation
from votedim.dataset import (EU28_MEMBERS, EU28_POPULATIONS, eu28_game,
                             eu28_population, example6_game,
                             EXAMPLE6_MINIMAL_WINNING, masks)
from votedim.enumeration import CoalitionSet
from votedim.games import (WeightedGame, eval_game, games_equal,
                           mask_from_members, unanimity_game, union_game)
from votedim.rationals import rat
from votedim.trades import TradeCertificate


def test_game_file_roundtrip():
    g = eu28_game()
    text = formats.serialize_game(g, ["v1", "v2", "v3"])
    g2 = formats.parse_game_file(text)
    assert g2.n == 28 and g2.size == 3
    assert games_equal(g, g2)
    assert formats.serialize_game(g2, ["v1", "v2", "v3"]) == text


def test_game_file_rationals_and_precedence():
    text = """players: 3
game a: quota 1/2; weights 1/3 1/6 0
game b: quota 1; weights 0 0 1
game c: quota 2; weights 1 1 1
rule: a & b | c
"""
    g = formats.parse_game_file(text)
    # & binds tighter: (a & b) | c
    assert eval_game(g, 0b011)       # b and a({1,2} -> 1/3+1/6 = 1/2) -> wait
    # coalition {1,2} has a-weight 1/2 >= 1/2 but b loses; c: two members wins
    assert eval_game(g, 0b101)       # {1,3}: a: 1/3 >= 1/2? no; c: 2 members
    assert not eval_game(g, 0b001)


def test_game_file_errors_have_lines():
    with pytest.raises(formats.FormatError) as e:
        formats.parse_game_file("players: 2\ngame a: quota 1; weights 1\nrule: a\n")
    assert "line 2" in str(e.value)
    with pytest.raises(formats.FormatError):
        formats.parse_game_file("players: 2\nrule: a\n")
    with pytest.raises(formats.FormatError) as e:
        formats.parse_game_file(
            "players: 2\ngame a: quota 1; weights 1 1\nrule: a & (b\n")
    assert "column" in str(e.value) or "unknown" in str(e.value)
    with pytest.raises(formats.FormatError):
        formats.parse_game_file(
            "players: 2\ngame a: quota 1/0; weights 1 1\nrule: a\n")


def test_population_csv_roundtrip():
    pop = eu28_population()
    text = formats.serialize_population_csv(pop, EU28_MEMBERS)
    pop2, names = formats.parse_population_csv(text)
    assert pop2 == pop
    assert tuple(names) == EU28_MEMBERS
    assert pop2.total == 507_416_607


def test_population_csv_errors():
    with pytest.raises(formats.FormatError):
        formats.parse_population_csv("index,name\n1,a\n")
    with pytest.raises(formats.FormatError):
        formats.parse_population_csv("index,name,population\n2,b,5\n")
    with pytest.raises(formats.FormatError):
        formats.parse_population_csv("index,name,population\n1,a,-5\n")


def test_coalition_set_roundtrip():
    cs = CoalitionSet(6, "custom",
                      np.array(masks(EXAMPLE6_MINIMAL_WINNING), dtype=np.uint32))
    text = formats.serialize_coalition_set(cs)
    cs2 = formats.parse_coalition_set(text)
    assert cs2.n == 6 and cs2.kind == "custom"
    assert np.array_equal(cs2.masks, cs.masks)


def test_coalition_set_errors():
    with pytest.raises(formats.FormatError):
        formats.parse_coalition_set("n: 4\nkind: custom\ncount: 2\n1,2\n")
    with pytest.raises(formats.FormatError):
        formats.parse_coalition_set("n: 4\nkind: weird\ncount: 0\n")
    with pytest.raises(formats.FormatError):
        formats.parse_coalition_set("n: 4\nkind: custom\ncount: 1\n2,1\n")


def test_trade_roundtrip():
    cert = TradeCertificate((mask_from_members([1, 2]),
                             mask_from_members([3, 4, 5, 6])),
                            (mask_from_members([1, 3, 5]),
                             mask_from_members([2, 4, 6])))
    text = formats.serialize_trade(cert)
    cert2 = formats.parse_trade(text, 6)
    assert cert2 == cert


def test_representation_roundtrip():
    games = [WeightedGame.of(3, [2, 1, 1, 0]), WeightedGame.of(1, [0, 1, 1, 1])]
    rep = IntersectionRepresentation.from_games(
        games, ["order_consistent", "indicator"], "intersection")
    text = formats.serialize_representation(rep)
    rep2 = formats.parse_representation(text)
    assert rep2.mode == "intersection" and len(rep2) == 2
    assert np.array_equal(rep2.quotas, rep.quotas)
    assert np.array_equal(rep2.weights, rep.weights)
    assert rep2.tags == rep.tags


def test_representation_random_roundtrip():
    rng = np.random.default_rng(8)
    for _ in range(10):
        k = int(rng.integers(1, 6))
        n = int(rng.integers(2, 7))
        quotas = rng.integers(1, 10, size=k)
        weights = rng.integers(0, 6, size=(k, n))
        weights[:, 0] += quotas   # keep the grand coalition winning
        tags = [["order_consistent", "indicator"][int(rng.integers(0, 2))]
                for _ in range(k)]
        rep = IntersectionRepresentation("intersection", n,
                                         quotas.astype(np.int64),
                                         weights.astype(np.int64), tags)
        rep2 = formats.parse_representation(formats.serialize_representation(rep))
        assert np.array_equal(rep2.quotas, rep.quotas)
        assert np.array_equal(rep2.weights, rep.weights)


# ------------------------------------------------------------------ CLI

def _example6_file(tmp_path):
    g = example6_game()
    names = [f"u{i}" for i in range(len(g.games))]
    path = tmp_path / "example6.game"
    path.write_text(formats.serialize_game(g, names))
    return path


def test_cli_counts_file_game(tmp_path, capsys):
    path = _example6_file(tmp_path)
    assert main(["--game", str(path), "counts"]) == 0
    out = capsys.readouterr().out
    assert "winning:" in out and "losing:" in out


def test_cli_exact_dim_example6(tmp_path, capsys):
    path = _example6_file(tmp_path)
    assert main(["--game", str(path), "exact-dim"]) == 0
    assert "dimension: 2" in capsys.readouterr().out


def test_cli_weighted_example6(tmp_path, capsys):
    path = _example6_file(tmp_path)
    assert main(["--game", str(path), "weighted"]) == 0
    assert "not_weighted" in capsys.readouterr().out


def test_cli_verify_missing_rep_is_usage_error(tmp_path):
    path = _example6_file(tmp_path)
    assert main(["--game", str(path), "verify", "--rep",
                 str(tmp_path / "missing.rep")]) == 2


def test_cli_verify_trade(tmp_path, capsys):
    path = _example6_file(tmp_path)
    cert = TradeCertificate((mask_from_members([1, 2]),
                             mask_from_members([3, 4, 5, 6])),
                            (mask_from_members([1, 3, 5]),
                             mask_from_members([2, 4, 6])))
    tpath = tmp_path / "t.trade"
    tpath.write_text(formats.serialize_trade(cert))
    assert main(["--game", str(path), "verify-trade", "--trade", str(tpath)]) == 0
    bad = TradeCertificate(cert.winners, (cert.losers[0], cert.losers[0]))
    tpath.write_text(formats.serialize_trade(bad))
    assert main(["--game", str(path), "verify-trade", "--trade", str(tpath)]) == 1


def test_cli_verify_representation_file(tmp_path, capsys):
    path = _example6_file(tmp_path)
    g = example6_game()
    from votedim.enumeration import maximal_losing
    from votedim.games import indicator_game
    lm = maximal_losing(g)
    games = [indicator_game(m, 6) for m in lm]
    rep = IntersectionRepresentation.from_games(games, ["indicator"] * len(games),
                                                "intersection")
    rpath = tmp_path / "rep.rep"
    rpath.write_text(formats.serialize_representation(rep))
    assert main(["--game", str(path), "verify", "--rep", str(rpath)]) == 0
    # break it: drop one constituent so a maximal losing coalition is uncovered
    rep2 = IntersectionRepresentation("intersection", 6, rep.quotas[1:],
                                      rep.weights[1:], rep.tags[1:])
    rpath.write_text(formats.serialize_representation(rep2))
    assert main(["--game", str(path), "verify", "--rep", str(rpath)]) == 1


def test_cli_usage_error_on_unknown_command():
    with pytest.raises(SystemExit) as e:
        main(["unknown-command"])
    assert e.value.code == 2

"""Line-oriented text formats for games, coalition sets, trades and
representations.

Everything is exact (rationals as p/q), diffable and solver-independent;
parsers give line-precise diagnostics and round-trip with the serializers.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .covering import IntersectionRepresentation
from .enumeration import KINDS, CoalitionSet
from .games import (CompositeGame, Game, Leaf, Node, PopulationVector,
                    WeightedGame, mask_from_members, members_from_mask)
from .rationals import format_rational, parse_rational
from .trades import TradeCertificate

__all__ = ["FormatError", "parse_game_file", "serialize_game",
           "parse_population_csv", "serialize_population_csv",
           "parse_coalition_set", "serialize_coalition_set",
           "parse_trade", "serialize_trade",
           "parse_representation", "serialize_representation"]


class FormatError(ValueError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where = f" ({where})"
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


def _read_lines(text):
    return [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())
            if ln.strip() and not ln.strip().startswith("#")]


def _expect_header(lines, idx, key):
    if idx >= len(lines):
        raise FormatError(f"missing '{key}:' header")
    ln, text = lines[idx]
    if not text.startswith(key + ":"):
        raise FormatError(f"expected '{key}:' header, got {text!r}", ln)
    return text[len(key) + 1:].strip(), ln


# ---------------------------------------------------------------------------
# game files

_GAME_RE = re.compile(r"^game\s+(\w+)\s*:\s*quota\s+(\S+)\s*;\s*weights\s+(.*)$")


def parse_game_file(text: str) -> CompositeGame:
    """Parse the game format: a players header, named weighted games, and a
    rule combining them with & (binds tighter) and |."""
    lines = _read_lines(text)
    val, ln = _expect_header(lines, 0, "players")
    try:
        n = int(val)
    except ValueError:
        raise FormatError(f"player count is not an integer: {val!r}", ln)
    if not 1 <= n <= 64:
        raise FormatError(f"player count out of range: {n}", ln)
    games = {}
    order = []
    rule = None
    rule_line = None
    for ln, text_line in lines[1:]:
        if text_line.startswith("game "):
            m = _GAME_RE.match(text_line)
            if not m:
                raise FormatError("malformed game line", ln)
            name, quota_s, weights_s = m.groups()
            if name in games:
                raise FormatError(f"duplicate game name {name!r}", ln)
            parts = weights_s.split()
            if len(parts) != n:
                raise FormatError(f"expected {n} weights, got {len(parts)}", ln)
            try:
                quota = parse_rational(quota_s)
                weights = [parse_rational(p) for p in parts]
            except ValueError as e:
                raise FormatError(str(e), ln)
            try:
                games[name] = WeightedGame.of(quota, weights)
            except ValueError as e:
                raise FormatError(str(e), ln)
            order.append(name)
        elif text_line.startswith("rule:"):
            rule = text_line[5:].strip()
            rule_line = ln
        else:
            raise FormatError(f"unrecognized line: {text_line!r}", ln)
    if rule is None:
        raise FormatError("missing 'rule:' line")
    index = {name: i for i, name in enumerate(order)}
    formula = _parse_rule(rule, index, rule_line)
    try:
        return CompositeGame(tuple(games[name] for name in order), formula)
    except ValueError as e:
        raise FormatError(str(e), rule_line)


def _parse_rule(text: str, index: dict, line: int):
    pos = 0

    def error(msg):
        raise FormatError(msg, line, pos + 1)

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def atom():
        nonlocal pos
        skip_ws()
        if pos >= len(text):
            error("unexpected end of rule")
        if text[pos] == "(":
            pos += 1
            node = or_expr()
            skip_ws()
            if pos >= len(text) or text[pos] != ")":
                error("missing closing parenthesis")
            pos += 1
            return node
        m = re.match(r"\w+", text[pos:])
        if not m:
            error(f"expected a game name, found {text[pos]!r}")
        name = m.group(0)
        pos += len(name)
        if name not in index:
            error(f"unknown game name {name!r}")
        return Leaf(index[name])

    def and_expr():
        nonlocal pos
        parts = [atom()]
        while True:
            skip_ws()
            if pos < len(text) and text[pos] == "&":
                pos += 1
                parts.append(atom())
            else:
                break
        return parts[0] if len(parts) == 1 else Node("and", tuple(parts))

    def or_expr():
        nonlocal pos
        parts = [and_expr()]
        while True:
            skip_ws()
            if pos < len(text) and text[pos] == "|":
                pos += 1
                parts.append(and_expr())
            else:
                break
        return parts[0] if len(parts) == 1 else Node("or", tuple(parts))

    node = or_expr()
    skip_ws()
    if pos != len(text):
        error(f"trailing characters in rule: {text[pos:]!r}")
    return node


def serialize_game(game: Game, names=None) -> str:
    if isinstance(game, WeightedGame):
        game = CompositeGame((game,), Leaf(0))
    if names is None:
        names = [f"g{i + 1}" for i in range(len(game.games))]

    def fmt(f):
        if isinstance(f, Leaf):
            return names[f.index]
        sep = " & " if f.op == "and" else " | "
        return "(" + sep.join(fmt(c) for c in f.children) + ")"

    lines = [f"players: {game.n}"]
    for name, g in zip(names, game.games):
        ws = " ".join(format_rational(w) for w in g.weights)
        lines.append(f"game {name}: quota {format_rational(g.quota)}; weights {ws}")
    rule = fmt(game.formula)
    if rule.startswith("(") and rule.endswith(")"):
        rule = rule[1:-1]
    lines.append(f"rule: {rule}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# population CSV

def parse_population_csv(text: str) -> tuple[PopulationVector, list]:
    lines = _read_lines(text)
    if not lines or lines[0][1].replace(" ", "") != "index,name,population":
        raise FormatError("population CSV must start with 'index,name,population'",
                          lines[0][0] if lines else None)
    rows = []
    for ln, t in lines[1:]:
        parts = [p.strip() for p in t.split(",")]
        if len(parts) != 3:
            raise FormatError("expected 'index,name,population'", ln)
        try:
            idx = int(parts[0])
            cnt = int(parts[2])
        except ValueError:
            raise FormatError("index and population must be integers", ln)
        if cnt < 0:
            raise FormatError("population must be nonnegative", ln)
        rows.append((idx, parts[1], cnt, ln))
    rows.sort(key=lambda r: r[0])
    for want, (idx, _, _, ln) in enumerate(rows, start=1):
        if idx != want:
            raise FormatError(f"expected index {want}, got {idx}", ln)
    names = [r[1] for r in rows]
    pop = PopulationVector.from_counts([r[2] for r in rows])
    return pop, names


def serialize_population_csv(pop: PopulationVector, names=None) -> str:
    if pop.raw_counts is None:
        raise ValueError("population CSV needs raw counts")
    names = names or [f"player{i + 1}" for i in range(pop.n)]
    lines = ["index,name,population"]
    for i, (name, c) in enumerate(zip(names, pop.raw_counts), start=1):
        lines.append(f"{i},{name},{c}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# coalition sets

def parse_members_line(t: str, n: int, ln: int) -> int:
    try:
        members = [int(p) for p in t.split(",")]
    except ValueError:
        raise FormatError("coalition line must be comma-separated integers", ln)
    if members != sorted(members) or len(set(members)) != len(members):
        raise FormatError("members must be strictly ascending", ln)
    if members and not (1 <= members[0] and members[-1] <= n):
        raise FormatError("member index out of range", ln)
    return mask_from_members(members)


def parse_coalition_set(text: str) -> CoalitionSet:
    lines = _read_lines(text)
    nval, ln = _expect_header(lines, 0, "n")
    kind, kln = _expect_header(lines, 1, "kind")
    cval, cln = _expect_header(lines, 2, "count")
    try:
        n, count = int(nval), int(cval)
    except ValueError:
        raise FormatError("n and count must be integers", ln)
    if kind not in KINDS:
        raise FormatError(f"unknown kind {kind!r}", kln)
    masks = []
    for ln2, t in lines[3:]:
        masks.append(parse_members_line(t, n, ln2))
    if len(masks) != count:
        raise FormatError(f"count says {count} but {len(masks)} coalitions listed",
                          cln)
    return CoalitionSet(n, kind, np.array(sorted(masks), dtype=np.uint32))


def serialize_coalition_set(cs: CoalitionSet) -> str:
    lines = [f"n: {cs.n}", f"kind: {cs.kind}", f"count: {len(cs)}"]
    for m in cs:
        lines.append(",".join(str(p) for p in members_from_mask(m)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# trading transforms

def parse_trade(text: str, n: int = 64) -> TradeCertificate:
    lines = _read_lines(text)
    jval, jln = _expect_header(lines, 0, "j")
    try:
        j = int(jval)
    except ValueError:
        raise FormatError("j must be an integer", jln)
    winners, losers = [], []
    for ln, t in lines[1:]:
        if t.startswith("S:"):
            winners.append(parse_members_line(t[2:].strip(), n, ln))
        elif t.startswith("T:"):
            losers.append(parse_members_line(t[2:].strip(), n, ln))
        else:
            raise FormatError("expected 'S:' or 'T:' line", ln)
    if len(winners) != j or len(losers) != j:
        raise FormatError(f"expected {j} S-lines and {j} T-lines, got "
                          f"{len(winners)}/{len(losers)}", jln)
    return TradeCertificate(tuple(winners), tuple(losers))


def serialize_trade(cert: TradeCertificate) -> str:
    lines = [f"j: {cert.j}"]
    for s in cert.winners:
        lines.append("S: " + ",".join(str(p) for p in members_from_mask(s)))
    for t in cert.losers:
        lines.append("T: " + ",".join(str(p) for p in members_from_mask(t)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# representations

def parse_representation(text: str) -> IntersectionRepresentation:
    lines = _read_lines(text)
    mode, mln = _expect_header(lines, 0, "mode")
    cval, cln = _expect_header(lines, 1, "count")
    if mode not in ("intersection", "union"):
        raise FormatError(f"unknown mode {mode!r}", mln)
    try:
        count = int(cval)
    except ValueError:
        raise FormatError("count must be an integer", cln)
    body = lines[2:]
    if len(body) != count:
        raise FormatError(f"count says {count} but {len(body)} games listed", cln)
    if not body:
        raise FormatError("empty representation")
    tags, quotas, weights = [], [], []
    n = None
    for ln, t in body:
        parts = t.split()
        if len(parts) < 3:
            raise FormatError("expected 'tag quota w1 ... wn'", ln)
        tag = parts[0]
        if tag not in ("order_consistent", "indicator"):
            raise FormatError(f"unknown constituent tag {tag!r}", ln)
        try:
            q = int(parts[1])
            ws = [int(p) for p in parts[2:]]
        except ValueError:
            raise FormatError("quota and weights must be integers", ln)
        if n is None:
            n = len(ws)
        elif len(ws) != n:
            raise FormatError(f"expected {n} weights, got {len(ws)}", ln)
        tags.append(tag)
        quotas.append(q)
        weights.append(ws)
    return IntersectionRepresentation(mode, n, np.array(quotas, dtype=np.int64),
                                      np.array(weights, dtype=np.int64), tags)


def serialize_representation(rep: IntersectionRepresentation) -> str:
    lines = [f"mode: {rep.mode}", f"count: {len(rep)}"]
    for i in range(len(rep)):
        ws = " ".join(str(int(w)) for w in rep.weights[i])
        lines.append(f"{rep.tags[i]} {int(rep.quotas[i])} {ws}")
    return "\n".join(lines) + "\n"

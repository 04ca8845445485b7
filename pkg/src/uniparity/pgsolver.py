"""Reading and writing games in the PGSolver text format.

A document is an optional ``parity N;`` header followed by one record per
vertex, ``id priority owner s1,s2,... ["name"];``.  Owner ``0`` is Even.
The header is only a hint: the ids found in the records decide the vertex
count, and they must be exactly ``0..n-1``.
"""
from __future__ import annotations

import logging
import re
from typing import Optional

from .game import GameError, ParityGame, Player

log = logging.getLogger(__name__)


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(ValueError):
    def __init__(self, vertex: Optional[int], message: str):
        where = f"vertex {vertex}: " if vertex is not None else ""
        super().__init__(where + message)
        self.vertex = vertex


_TOKEN = re.compile(r'\s+|"(?:[^"\\]|\\.)*"|;|[^\s;"]+')


def _statements(text: str):
    """Yield ``(line, tokens)`` per ``;``-terminated statement."""
    line = 1
    start = None
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, "unterminated string")
        tok = m.group()
        pos = m.end()
        if tok.isspace():
            line += tok.count("\n")
            continue
        if start is None:
            start = line
        if tok == ";":
            yield start, tokens
            tokens, start = [], None
        else:
            tokens.append(tok)
            line += tok.count("\n")
    if tokens:
        raise ParseError(start or line, "missing ';' at end of record")


def _nat(tok: str, line: int, what: str) -> int:
    if not tok.isdigit():
        raise ParseError(line, f"expected a natural number for {what}, got {tok!r}")
    return int(tok)


def parse_pgsolver(text: str) -> ParityGame:
    records: dict[int, tuple[int, int, list[int], Optional[str]]] = {}
    hint: Optional[int] = None
    for line, toks in _statements(text):
        if not toks:
            continue
        if toks[0] in ("parity", "start"):
            if len(toks) != 2:
                raise ParseError(line, f"malformed {toks[0]} line")
            value = _nat(toks[1], line, toks[0])
            if toks[0] == "parity":
                if records or hint is not None:
                    raise ParseError(line, "header must come first")
                hint = value
            continue
        if len(toks) not in (3, 4, 5):
            raise ParseError(line, "expected 'id priority owner successors [\"name\"]'")
        vid = _nat(toks[0], line, "vertex id")
        prio = _nat(toks[1], line, "priority")
        owner = _nat(toks[2], line, "owner")
        if owner not in (0, 1):
            raise ParseError(line, f"owner must be 0 or 1, got {owner}")
        succ: list[int] = []
        name = None
        rest = toks[3:]
        if rest and not rest[0].startswith('"'):
            for part in rest[0].split(","):
                if part == "":
                    raise ParseError(line, "empty successor entry")
                succ.append(_nat(part, line, "successor"))
            rest = rest[1:]
        if rest:
            if len(rest) != 1 or not rest[0].startswith('"'):
                raise ParseError(line, "trailing tokens after successors")
            name = rest[0][1:-1].replace('\\"', '"')
        if vid in records:
            raise ParseError(line, f"vertex {vid} defined twice")
        records[vid] = (prio, owner, succ, name)

    n = len(records)
    if records and max(records) != n - 1:
        missing = min(set(range(max(records) + 1)) - set(records))
        raise ValidationError(missing, "vertex ids must be dense, this id has no record")
    if hint is not None and hint != max(n - 1, 0):
        log.info("header says max id %d, records give %d", hint, max(n - 1, 0))
    owner_t, prio_t, succ_t, names = [], [], [], []
    for v in range(n):
        prio, owner, succ, name = records[v]
        if not succ:
            raise ValidationError(v, "no successors")
        seen: list[int] = []
        for u in succ:
            if u >= n:
                raise ValidationError(v, f"successor {u} is not a vertex")
            if u in seen:
                log.warning("vertex %d: dropping duplicate edge to %d", v, u)
                continue
            seen.append(u)
        owner_t.append(Player(owner))
        prio_t.append(prio)
        succ_t.append(tuple(seen))
        names.append(name)
    try:
        return ParityGame(tuple(owner_t), tuple(prio_t), tuple(succ_t),
                          tuple(names) if any(x is not None for x in names) else None)
    except GameError as exc:
        raise ValidationError(getattr(exc, "vertex", None), str(exc)) from exc


def write_pgsolver(game: ParityGame) -> str:
    """Canonical form: sorted ids, single spaces, one record per line."""
    n = game.vertex_count
    out = [f"parity {max(n - 1, 0)};"]
    for v in range(n):
        rec = f"{v} {game.priority[v]} {int(game.owner[v])} " + ",".join(map(str, game.successors[v]))
        name = game.names[v] if game.names else None
        if name is not None:
            rec += ' "' + name.replace('"', '\\"') + '"'
        out.append(rec + ";")
    return "\n".join(out) + "\n"

"""JSON rendering of solve reports and checking of witness documents."""
from __future__ import annotations

import json
from typing import Any, Optional

from .decomposition import (
    AttractorDecomposition,
    InvalidDecomposition,
    dominion_from_decomposition,
    from_nested,
    to_nested,
    validate,
)
from .game import (
    GameError,
    ParityGame,
    Player,
    Strategy,
    VertexSet,
    is_trap,
    mask_of,
    members,
    restrict,
    verify_dominion_strategy,
)
from .solvers import SolveReport, mcnaughton_zielonka

SCHEMA_VERSION = 1

_VERTICES = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_NESTED = {"type": "array"}
_DECOMPOSITION = {
    "type": "object",
    "required": ["player", "degree", "sets"],
    "properties": {
        "player": {"enum": ["even", "odd"]},
        "degree": {"type": "integer", "minimum": 0},
        "sets": _NESTED,
    },
    "additionalProperties": False,
}
_EDGES = {
    "type": "array",
    "items": {"type": "array", "items": {"type": "integer", "minimum": 0},
              "minItems": 2, "maxItems": 2},
}

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "uniparity solve report",
    "type": "object",
    "required": ["version", "solver", "vertex_count", "w_even", "w_odd", "stats"],
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "solver": {"type": "string"},
        "vertex_count": {"type": "integer", "minimum": 0},
        "w_even": _VERTICES,
        "w_odd": _VERTICES,
        "stats": {
            "type": "object",
            "required": ["recursive_calls", "loop_iterations"],
            "properties": {
                "recursive_calls": {"type": "integer", "minimum": 0},
                "loop_iterations": {"type": "integer", "minimum": 0},
            },
        },
        "decompositions": {
            "type": "object",
            "properties": {"even": _DECOMPOSITION, "odd": _DECOMPOSITION},
            "additionalProperties": False,
        },
        "strategies": {
            "type": "object",
            "properties": {"even": _EDGES, "odd": _EDGES},
            "additionalProperties": False,
        },
        "symbolic": {
            "type": "object",
            "required": ["layout", "peak_live_variables", "set_ops", "cpre_ops"],
            "properties": {
                "layout": {"enum": ["per-frame", "succinct"]},
                "peak_live_variables": {"type": "integer", "minimum": 0},
                "set_ops": {"type": "integer", "minimum": 0},
                "cpre_ops": {"type": "integer", "minimum": 0},
            },
        },
    },
    "additionalProperties": False,
}


def _player_name(p: Player) -> str:
    return "even" if p is Player.EVEN else "odd"


def _decomposition_json(dec: AttractorDecomposition) -> dict:
    return {"player": _player_name(dec.player), "degree": dec.degree, "sets": to_nested(dec)}


def _strategy_json(game: ParityGame, sigma: Strategy) -> list[list[int]]:
    # opponent edges are implied by the winning set, so only choices are stored
    return [[v, u] for v, u in sorted(sigma.edges) if game.owner[v] == sigma.player]


def report_to_dict(report: SolveReport, game: ParityGame) -> dict:
    """Plain-data form of ``report``; strategies are extracted from decompositions."""
    out: dict[str, Any] = {
        "version": SCHEMA_VERSION,
        "solver": report.solver,
        "vertex_count": game.vertex_count,
        "w_even": sorted(members(report.w_even)),
        "w_odd": sorted(members(report.w_odd)),
        "stats": {
            "recursive_calls": report.stats.recursive_calls,
            "loop_iterations": report.stats.loop_iterations,
        },
    }
    decs = {}
    strategies = {}
    for dec, won in ((report.even_decomposition, report.w_even),
                     (report.odd_decomposition, report.w_odd)):
        if dec is None:
            continue
        key = _player_name(dec.player)
        decs[key] = _decomposition_json(dec)
        strategies[key] = _strategy_json(game, dominion_from_decomposition(game, won, dec))
    if decs:
        out["decompositions"] = decs
        out["strategies"] = strategies
    if report.symbolic is not None:
        out["symbolic"] = dict(report.symbolic)
    return out


def write_report_json(report: SolveReport, game: ParityGame) -> str:
    return json.dumps(report_to_dict(report, game), indent=2, sort_keys=True) + "\n"


def _mask(xs: Any, n: int, what: str) -> VertexSet:
    if not isinstance(xs, list) or not all(isinstance(v, int) and 0 <= v < n for v in xs):
        raise InvalidDecomposition(f"{what} must list vertex ids below {n}")
    return mask_of(xs)


def check_witness(game: ParityGame, data: dict, reference: Optional[SolveReport] = None) -> list[str]:
    """Every problem found in a witness document; empty when it checks out.

    Winning sets are compared against ``reference`` (plain McNaughton-Zielonka
    by default), decompositions are validated and strategies are verified as
    dominion strategies.
    """
    problems: list[str] = []
    n = game.vertex_count
    if data.get("vertex_count") != n:
        problems.append(f"vertex_count {data.get('vertex_count')} does not match the game ({n})")
        return problems
    try:
        won = {Player.EVEN: _mask(data.get("w_even"), n, "w_even"),
               Player.ODD: _mask(data.get("w_odd"), n, "w_odd")}
    except InvalidDecomposition as exc:
        return [str(exc)]
    if won[Player.EVEN] & won[Player.ODD]:
        problems.append("winning sets overlap")
    if won[Player.EVEN] | won[Player.ODD] != game.all_vertices:
        problems.append("winning sets do not cover every vertex")
    ref = mcnaughton_zielonka(game) if reference is None else reference
    for p in Player:
        if won[p] != ref.winner(p):
            problems.append(f"{_player_name(p)} winning set disagrees with the solver")
    for key, dec_data in (data.get("decompositions") or {}).items():
        p = Player.EVEN if key == "even" else Player.ODD
        try:
            dec = from_nested(dec_data["sets"], p, int(dec_data["degree"]))
        except (InvalidDecomposition, KeyError, TypeError, ValueError) as exc:
            problems.append(f"{key} decomposition is malformed: {exc}")
            continue
        if not is_trap(game, won[p], p.opponent):
            problems.append(f"{key} winning set is not a trap for {p.opponent}")
            continue
        try:
            verdict = validate(restrict(game, won[p]), dec)
        except GameError as exc:
            problems.append(f"{key} winning set is not a subgame: {exc}")
            continue
        if not verdict:
            problems.append(f"{key} decomposition is invalid: {verdict}")
    for key, edges in (data.get("strategies") or {}).items():
        p = Player.EVEN if key == "even" else Player.ODD
        try:
            sigma = _strategy(game, p, won[p], edges)
            ok = verify_dominion_strategy(game, won[p], sigma)
        except (ValueError, TypeError, KeyError) as exc:
            problems.append(f"{key} strategy is malformed: {exc}")
            continue
        if not ok:
            problems.append(f"{key} strategy does not win its set")
    return problems


def _strategy(game: ParityGame, player: Player, domain: VertexSet, edges: Any) -> Strategy:
    if not isinstance(edges, list):
        raise ValueError("strategy must be a list of edges")
    choice: dict[int, int] = {}
    for e in edges:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise ValueError(f"bad edge {e!r}")
        v, u = e
        if not (0 <= v < game.vertex_count and u in game.successors[v]):
            raise ValueError(f"{v}->{u} is not an edge")
        if v in choice:
            raise ValueError(f"vertex {v} has two strategy edges")
        choice[v] = u
    return Strategy.from_choice(game, player, choice, domain)

import json
import logging

import jsonschema
import pytest
from hypothesis import given, settings

from conftest import game_from, games, same_game, suite
from uniparity import generate as gen
from uniparity.game import Player
from uniparity.pgsolver import ParseError, ValidationError, parse_pgsolver, write_pgsolver
from uniparity.report import REPORT_SCHEMA, check_witness, report_to_dict, write_report_json
from uniparity.solvers import family_trees, mcnaughton_zielonka, mcnaughton_zielonka_enhanced, universal_solve
from uniparity.symbolic import Layout, sym_universal_solve

E, O = 0, 1


def test_parse_single_self_loop():
    g = parse_pgsolver("parity 1;\n0 2 0 0;\n")
    assert g.vertex_count == 1
    assert (g.owner[0], g.priority[0], g.successors[0]) == (Player.EVEN, 2, (0,))


def test_two_cycle_round_trip_is_canonical():
    text = "parity 1;\n0 1 1 1;\n1 2 0 0;\n"
    g = parse_pgsolver(text)
    assert write_pgsolver(g) == text


def test_free_form_input():
    text = 'parity 5;  start 0;\n1 0 1 0 "b";\n0 3 0 0,1 "a \\"q\\"";'
    g = parse_pgsolver(text)
    assert g.names == ('a "q"', "b")
    assert same_game(parse_pgsolver(write_pgsolver(g)), g)


def test_missing_successors_is_a_validation_error():
    with pytest.raises(ValidationError) as err:
        parse_pgsolver("parity 1;\n0 2 0;\n")
    assert err.value.vertex == 0


def test_unknown_successor_is_a_validation_error():
    with pytest.raises(ValidationError) as err:
        parse_pgsolver("0 2 0 5;\n")
    assert err.value.vertex == 0


def test_ids_must_be_dense():
    with pytest.raises(ValidationError) as err:
        parse_pgsolver("0 0 0 2;\n2 0 0 0;\n")
    assert err.value.vertex == 1


@pytest.mark.parametrize("text,line", [
    ("parity 1;\n0 x 0 0;\n", 2),
    ("0 0 0 0;\nparity 1;\n", 2),
    ("\n\n0 0 2 0;\n", 3),
    ("0 0 0 0,,0;\n", 1),
    ("0 0 0 0 \"a\" junk;\n", 1),
    ("0 0 0 0;\n0 1 0 0;\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as err:
        parse_pgsolver(text)
    assert err.value.line == line


def test_duplicate_edges_are_dropped_with_a_warning(caplog):
    with caplog.at_level(logging.WARNING, logger="uniparity.pgsolver"):
        g = parse_pgsolver("0 0 0 0,0;\n")
    assert g.successors[0] == (0,)
    assert "duplicate" in caplog.text


def test_empty_game_writes_header_only():
    g = parse_pgsolver("")
    assert g.vertex_count == 0
    assert write_pgsolver(g) == "parity 0;\n"


def test_round_trip_on_random_games():
    for g in suite(1000, n_max=10, d_max=6, seed=41):
        text = write_pgsolver(g)
        back = parse_pgsolver(text)
        assert same_game(back, g)
        assert write_pgsolver(back) == text


@given(games(max_n=9, max_d=6))
@settings(max_examples=200, deadline=None)
def test_round_trip_property(g):
    assert same_game(parse_pgsolver(write_pgsolver(g)), g)


def test_generators_are_deterministic():
    a = gen.generate(gen.Random(8, 4, (1, 3), seed=9))
    b = gen.generate(gen.Random(8, 4, (1, 3), seed=9))
    assert same_game(a, b)
    assert not same_game(gen.generate(gen.Random(8, 4, (1, 3), seed=10)), a)
    one = gen.generate(gen.Random(1, 0, (1, 1)))
    assert one.successors == ((0,),) and one.priority == (0,)
    assert gen.generate(gen.Ladder(3)).vertex_count == 6
    assert gen.generate(gen.Cycle(5, 2)).priority == (0, 1, 2, 0, 1)
    with pytest.raises(gen.InvalidSpec):
        gen.generate(gen.Random(0, 1))


def _reports(g):
    te, to = family_trees("s", g)
    yield mcnaughton_zielonka(g)
    yield mcnaughton_zielonka_enhanced(g)
    yield universal_solve(g, Player.EVEN, te, to)
    yield sym_universal_solve(g, Player.EVEN, te, to, Layout.SUCCINCT)


def test_reports_match_the_schema():
    for g in suite(60, seed=42):
        for r in _reports(g):
            data = json.loads(write_report_json(r, g))
            jsonschema.validate(data, REPORT_SCHEMA)
            assert data["w_even"] == sorted(data["w_even"])
            assert data["w_odd"] == sorted(data["w_odd"])
            assert check_witness(g, data) == []


def test_schema_rejects_unknown_fields():
    g = game_from([(E, 0, [0])])
    data = report_to_dict(mcnaughton_zielonka(g), g)
    data["extra"] = 1
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(data, REPORT_SCHEMA)


def test_witness_checker_finds_tampering():
    g = game_from([(E, 2, [0, 1]), (O, 1, [1, 0])])
    data = report_to_dict(mcnaughton_zielonka_enhanced(g), g)
    assert check_witness(g, data) == []
    flipped = dict(data, w_even=data["w_odd"], w_odd=data["w_even"])
    assert check_witness(g, flipped)
    assert data["strategies"]["even"] == [[0, 0]]
    bad_strategy = json.loads(json.dumps(data))
    bad_strategy["strategies"]["even"] = [[0, 1]]
    assert any("strategy" in p for p in check_witness(g, bad_strategy))
    assert check_witness(g, dict(data, vertex_count=5))
    assert check_witness(g, dict(data, w_even=[7]))

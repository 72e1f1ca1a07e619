import math

import pytest

from ncpit.circuit import (
    CircuitFileError,
    CircuitProfile,
    Gate,
    PlusRegularCircuit,
    build_power_circuit,
    dump_circuit,
    evaluate,
    expand,
    normalize_layers,
    parse_circuit,
    random_circuit,
    syntactic_degree,
    validate_plus_regular,
)
from ncpit.field import SeededRng, make_prime_field
from ncpit.ncpoly import NcPolynomial, VarSet

FLD = make_prime_field(101)


# ---- evaluation against direct expansion ----


def test_power_circuit_expands_to_binomial():
    circ = build_power_circuit(2, 3, FLD)
    assert circ.depth == 3
    assert circ.degrees == (8,)
    got = expand(circ)
    xs = VarSet(circ.variables)
    lin = NcPolynomial(xs, FLD, {(0,): 1, (1,): 1})
    want = lin
    for _ in range(7):
        want = want * lin
    assert got == want
    assert got.num_terms() == 2**8
    assert syntactic_degree(circ) == 8


def test_evaluate_scalar_matches_expansion():
    rng = SeededRng(5)
    for depth, degrees in ((3, (3,)), (5, (2, 2)), (7, (2, 2, 2))):
        for t in range(6):
            prof = CircuitProfile(depth=depth, n=2, degrees=degrees, top_fanin=2)
            circ = random_circuit(prof, FLD, rng.split(f"{depth}.{t}"))
            poly = expand(circ)
            draws = rng.split(f"pt{depth}.{t}")
            point = {name: FLD(draws.randrange(101)) for name in circ.variables}
            direct = evaluate(circ, point)
            via_poly = FLD.zero()
            for word, coeff in poly.terms.items():
                term = coeff
                for i in word:
                    term = term * point[poly.varset.name(i)]
                via_poly = via_poly + term
            assert direct == via_poly


def test_zero_planted_expands_to_zero_and_doubles_fanin():
    rng = SeededRng(9)
    for depth, degrees in ((3, (4,)), (5, (3, 2))):
        prof = CircuitProfile(depth=depth, n=2, degrees=degrees, top_fanin=2, zero_planted=True)
        circ = random_circuit(prof, FLD, rng.split(str(depth)))
        assert circ.top_fanin == 4
        assert expand(circ).is_zero()
        assert validate_plus_regular(circ).ok


def test_random_circuit_honors_profile():
    rng = SeededRng(11)
    for depth, degrees, fanin in ((3, (5,), 3), (5, (2, 3), 1), (7, (2, 2, 2), 2)):
        prof = CircuitProfile(depth=depth, n=3, degrees=degrees, top_fanin=fanin)
        circ = random_circuit(prof, FLD, rng.split(f"{depth}.{fanin}"))
        assert circ.depth == depth
        assert circ.top_fanin == fanin
        assert circ.degrees == degrees
        assert syntactic_degree(circ) == math.prod(degrees)
        assert validate_plus_regular(circ).ok


def test_infeasible_profiles_rejected():
    rng = SeededRng(1)
    with pytest.raises(ValueError):
        random_circuit(CircuitProfile(depth=4, n=2, degrees=(2,)), FLD, rng)
    with pytest.raises(ValueError):
        random_circuit(CircuitProfile(depth=5, n=2, degrees=(2,)), FLD, rng)
    with pytest.raises(ValueError):
        random_circuit(CircuitProfile(depth=3, n=0, degrees=(2,)), FLD, rng)


# ---- validation ----


def _hand_circuit(gates, output, layers):
    return PlusRegularCircuit(FLD, ("x", "y"), gates, output, layers=layers)


def test_validate_flags_non_plus_output():
    gates = {
        0: Gate(0, "input", var="x"),
        1: Gate(1, "input", var="y"),
        2: Gate(2, "times", args=((0, 1), (1, 1))),
    }
    rep = validate_plus_regular(_hand_circuit(gates, 2, {}))
    assert "output-not-plus" in rep.codes()


def test_validate_flags_inhomogeneous_plus():
    gates = {
        0: Gate(0, "input", var="x"),
        1: Gate(1, "input", var="y"),
        2: Gate(2, "times", args=((0, 1), (1, 1))),
        3: Gate(3, "plus", args=((0, 1), (2, 1))),
    }
    rep = validate_plus_regular(_hand_circuit(gates, 3, {3: 1}))
    assert "inhomogeneous-plus" in rep.codes()


def test_validate_flags_layer_degree_mismatch():
    gates = {
        0: Gate(0, "input", var="x"),
        1: Gate(1, "input", var="y"),
        2: Gate(2, "plus", args=((0, 1),)),
        3: Gate(3, "times", args=((1, 1), (1, 1))),
        4: Gate(4, "plus", args=((3, 1),)),
        5: Gate(5, "times", args=((2, 1), (4, 1))),
        6: Gate(6, "plus", args=((5, 1),)),
    }
    rep = validate_plus_regular(_hand_circuit(gates, 6, {2: 1, 4: 1, 6: 2}))
    assert "layer-degree-mismatch" in rep.codes()


def test_normalize_layers_recovers_validity():
    prof = CircuitProfile(depth=5, n=2, degrees=(2, 2))
    circ = random_circuit(prof, FLD, SeededRng(21).split("norm"))
    stripped = PlusRegularCircuit(
        FLD, circ.variables, circ.gates, circ.output, layers=None, degrees=circ.degrees
    )
    fixed = normalize_layers(stripped)
    assert validate_plus_regular(fixed).ok
    assert fixed.layers == circ.layers


# ---- file format ----


def test_dump_parse_round_trip():
    prof = CircuitProfile(depth=5, n=3, degrees=(2, 3), top_fanin=2)
    circ = random_circuit(prof, FLD, SeededRng(33).split("file"))
    text = dump_circuit(circ)
    back = parse_circuit(text, FLD)
    assert dump_circuit(back) == text
    assert expand(back) == expand(circ)
    assert back.degrees == circ.degrees
    assert back.layers == circ.layers


def test_parse_reports_line_numbers():
    with pytest.raises(CircuitFileError) as e:
        parse_circuit('{"vars": ["x"],\n"gates": [\nnot json\n]}', FLD)
    assert e.value.line == 3

    good = dump_circuit(build_power_circuit(2, 1, FLD))
    with pytest.raises(CircuitFileError) as e:
        parse_circuit(good.replace('"kind": "plus"', '"kind": "minus"', 1), FLD)
    assert "unknown kind" in str(e.value)

    dup = good.replace('{"id": 0, "kind": "input", "var": "x1"}',
                       '{"id": 0, "kind": "input", "var": "x1"}\n,{"id": 0, "kind": "input", "var": "x1"}', 1)
    with pytest.raises(CircuitFileError) as e:
        parse_circuit(dup, FLD)
    assert "duplicate" in str(e.value)


def test_parse_rejects_non_object():
    with pytest.raises(CircuitFileError):
        parse_circuit("[1, 2]", FLD)
    with pytest.raises(CircuitFileError):
        parse_circuit('{"vars": "x", "gates": [], "output": 0}', FLD)

import random
import warnings
from fractions import Fraction

import pytest

from pcdist.circuit import Kind, random_topological_order
from pcdist.formats import (
    CNF,
    ForwardReferenceError,
    HeaderError,
    IndexRangeError,
    LiteralRangeError,
    MalformedLineError,
    UnterminatedClauseError,
    WeightDomainError,
    parse_dimacs_cnf,
    parse_nnf,
    parse_weights,
    write_dimacs_cnf,
    write_nnf,
    write_weights,
)
from pcdist.benchgen import random_3cnf
from pcdist.oracle import enumerate_models
from pcdist.weights import WeightFn

from conftest import compiled_instances


def test_smallest_nnf():
    c = parse_nnf("nnf 1 0 1\nL 1")
    assert c.n_vars == 1
    assert c.nodes[-1].kind == Kind.LIT and c.nodes[-1].lit == 1


def test_tautology_nnf():
    c = parse_nnf(b"nnf 3 2 1\nL 1\nL -1\nO 1 2 0 1\n")
    root = c.nodes[-1]
    assert root.kind == Kind.OR and root.decision == 1
    assert [c.nodes[i].lit for i in root.children] == [1, -1]


def test_crlf_accepted():
    c = parse_nnf("nnf 3 2 1\r\nL 1\r\nL -1\r\nO 1 2 0 1\r\n")
    assert len(c.nodes) == 3


@pytest.mark.parametrize(
    "text, error, line",
    [
        ("L 1\n", HeaderError, 1),
        ("nnf 1 0\nL 1\n", HeaderError, 1),
        ("nnf 2 0 1\nL 1\n", HeaderError, None),
        ("nnf 2 1 1\nL 1\nA 1 1\n", ForwardReferenceError, 3),
        ("nnf 2 1 1\nL 1\nA 1 5\n", IndexRangeError, 3),
        ("nnf 1 0 1\nL 2\n", LiteralRangeError, 2),
        ("nnf 1 0 1\nQ 1\n", MalformedLineError, 2),
        ("nnf 2 1 1\nL 1\nA 2 0\n", MalformedLineError, 3),
        ("nnf 2 2 1\nL 1\nA 1 0\n", HeaderError, None),
    ],
)
def test_nnf_errors(text, error, line):
    with pytest.raises(error) as exc:
        parse_nnf(text)
    assert exc.value.line == line


def test_constant_nodes_written_in_c2d_convention():
    t = parse_nnf("nnf 1 0 0\nA 0\n")
    f = parse_nnf("nnf 1 0 0\nO 0 0\n")
    assert t.nodes[-1].kind == Kind.TRUE and f.nodes[-1].kind == Kind.FALSE
    assert write_nnf(t) == "nnf 1 0 0\nA 0\n"
    assert write_nnf(f) == "nnf 1 0 0\nO 0 0\n"


def test_nnf_round_trip():
    for _, c, _ in compiled_instances(50, range(4, 13), seed=11, satisfiable=False):
        text = write_nnf(c)
        header = text.splitlines()[0].split()
        body = text.splitlines()[1:]
        assert int(header[1]) == len(body)
        edges = sum(int(l.split()[1 if l[0] == "A" else 2]) for l in body if l[0] in "AO")
        assert int(header[2]) == edges
        again = parse_nnf(text)
        assert again == c
        assert write_nnf(again) == text


def test_permuted_file_is_equivalent():
    rng = random.Random(3)
    for _, c, _ in compiled_instances(10, range(4, 10), seed=12):
        order = random_topological_order(c, rng)
        d = parse_nnf(write_nnf(c, order))
        assert enumerate_models(d) == enumerate_models(c)


def test_dimacs_examples():
    cnf = parse_dimacs_cnf("p cnf 1 1\n1 0\n")
    assert cnf == CNF(1, ((1,),))
    cnf = parse_dimacs_cnf(b"c comment\np cnf 2 2\n1 -2 0\n-1 2 0\n")
    assert cnf.clauses == ((1, -2), (-1, 2))


def test_dimacs_clause_across_lines():
    assert parse_dimacs_cnf("p cnf 3 1\n1 2\n3 0\n").clauses == ((1, 2, 3),)


@pytest.mark.parametrize(
    "text, error",
    [("1 0\n", HeaderError), ("", HeaderError), ("p cnf 1 1\n2 0\n", LiteralRangeError),
     ("p cnf 2 1\n1 2\n", UnterminatedClauseError)],
)
def test_dimacs_errors(text, error):
    with pytest.raises(error):
        parse_dimacs_cnf(text)


def test_dimacs_round_trip():
    rng = random.Random(5)
    for _ in range(20):
        cnf = random_3cnf(10, 30, rng)
        assert parse_dimacs_cnf(write_dimacs_cnf(cnf)) == cnf


def test_weights_examples():
    assert parse_weights("w 1 1/3", 1)[1] == Fraction(1, 3)
    assert parse_weights("", 3) == WeightFn.uniform(3)
    w = parse_weights("w 1 0.25\n", 1)
    assert w[1] == Fraction(1, 4) and isinstance(w[1], Fraction)


@pytest.mark.parametrize("text", ["w 1 0", "w 1 1", "w 1 -1/2", "w 1 3/2"])
def test_weights_domain(text):
    with pytest.raises(WeightDomainError):
        parse_weights(text, 1)


def test_weights_var_out_of_range():
    with pytest.raises(LiteralRangeError):
        parse_weights("w 4 1/2", 3)


def test_weights_duplicate_last_wins():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        w = parse_weights("w 1 1/3\nw 1 1/5\n", 1)
    assert w[1] == Fraction(1, 5)
    assert caught


def test_weights_round_trip():
    w = WeightFn([Fraction(1, 3), Fraction(7, 16), Fraction(99, 100)])
    assert parse_weights(write_weights(w), 3) == w

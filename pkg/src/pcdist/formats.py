"""Text formats: c2d ``.nnf`` circuits, DIMACS CNF, and literal-weight files.

All numeric values are parsed into :class:`fractions.Fraction`; no float is
ever created while reading a file.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .circuit import Circuit, CircuitBuilder, Kind
from .weights import WeightFn

__all__ = [
    "ParseError",
    "HeaderError",
    "MalformedLineError",
    "ForwardReferenceError",
    "IndexRangeError",
    "LiteralRangeError",
    "UnterminatedClauseError",
    "WeightDomainError",
    "CNF",
    "parse_nnf",
    "write_nnf",
    "parse_dimacs_cnf",
    "write_dimacs_cnf",
    "parse_weights",
    "write_weights",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class HeaderError(ParseError):
    pass


class MalformedLineError(ParseError):
    pass


class ForwardReferenceError(ParseError):
    pass


class IndexRangeError(ParseError):
    pass


class LiteralRangeError(ParseError):
    pass


class UnterminatedClauseError(ParseError):
    pass


class WeightDomainError(ParseError):
    pass


def _text(data: str | bytes) -> str:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def _lines(data: str | bytes):
    for lineno, raw in enumerate(_text(data).splitlines(), start=1):
        line = raw.strip()
        if line:
            yield lineno, line


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise MalformedLineError(f"expected an integer, got {tok!r}", lineno) from None


def parse_nnf(data: str | bytes) -> Circuit:
    """Parse the c2d NNF dialect.

    ``nnf v e n`` header, then one node per line: ``L lit``, ``A c i1..ic`` or
    ``O j c i1..ic``. Node ids are 0-based in file order and the last node is
    the root. ``A 0`` is read as true and ``O 0 0`` as false.
    """
    lines = _lines(data)
    header = None
    for lineno, line in lines:
        if line.startswith("c ") or line == "c":
            continue
        header = (lineno, line.split())
        break
    if header is None:
        raise HeaderError("missing 'nnf' header")
    lineno, toks = header
    if len(toks) != 4 or toks[0] != "nnf":
        raise HeaderError(f"expected 'nnf <nodes> <edges> <vars>', got {' '.join(toks)!r}", lineno)
    n_nodes, n_edges, n_vars = (_int(t, lineno) for t in toks[1:])
    if min(n_nodes, n_edges, n_vars) < 0:
        raise HeaderError("negative count in header", lineno)

    b = CircuitBuilder(n_vars)
    ids: list[int] = []
    edges = 0
    for lineno, line in lines:
        toks = line.split()
        tag = toks[0]
        if tag == "c":
            continue
        if len(ids) >= n_nodes:
            raise HeaderError(f"more than the declared {n_nodes} nodes", lineno)
        here = len(ids)
        if tag == "L":
            if len(toks) != 2:
                raise MalformedLineError("leaf line must be 'L <literal>'", lineno)
            lit = _int(toks[1], lineno)
            if lit == 0 or abs(lit) > n_vars:
                raise LiteralRangeError(f"literal {lit} outside 1..{n_vars}", lineno)
            ids.append(b.lit(lit))
            continue
        if tag == "A":
            decision, rest = 0, toks[1:]
        elif tag == "O":
            if len(toks) < 3:
                raise MalformedLineError("or line must be 'O <var> <count> <children...>'", lineno)
            decision, rest = _int(toks[1], lineno), toks[2:]
            if not 0 <= decision <= n_vars:
                raise LiteralRangeError(f"decision variable {decision} outside 0..{n_vars}", lineno)
        else:
            raise MalformedLineError(f"unknown node type {tag!r}", lineno)
        if not rest:
            raise MalformedLineError("missing child count", lineno)
        count = _int(rest[0], lineno)
        kids = [_int(t, lineno) for t in rest[1:]]
        if count != len(kids):
            raise MalformedLineError(f"child count {count} but {len(kids)} children listed", lineno)
        for k in kids:
            if k < 0 or k >= n_nodes:
                raise IndexRangeError(f"child index {k} outside 0..{n_nodes - 1}", lineno)
            if k >= here:
                raise ForwardReferenceError(f"child index {k} refers to a later node", lineno)
        edges += count
        mapped = [ids[k] for k in kids]
        if tag == "A":
            ids.append(b.conj(mapped))
        else:
            ids.append(b.disj(mapped, decision=decision))
    if len(ids) != n_nodes:
        raise HeaderError(f"header declares {n_nodes} nodes, found {len(ids)}")
    if edges != n_edges:
        raise HeaderError(f"header declares {n_edges} edges, found {edges}")
    if not ids:
        raise HeaderError("empty circuit")
    return b.build(ids[-1])


def write_nnf(circuit: Circuit, order: Sequence[int] | None = None) -> str:
    """Serialize in the c2d dialect.

    ``order`` optionally gives a different topological order of the nodes (it
    must end with the root); the default is the circuit's own order.
    """
    if order is None:
        order = range(len(circuit.nodes))
    pos = {i: p for p, i in enumerate(order)}
    if len(pos) != len(circuit.nodes) or order[-1] != circuit.root:
        raise ValueError("order must list every node once and end with the root")
    body = []
    for i in order:
        node = circuit.nodes[i]
        if any(pos[c] >= pos[i] for c in node.children):
            raise ValueError("order is not topological")
        kids = " ".join(str(pos[c]) for c in node.children)
        if node.kind == Kind.LIT:
            body.append(f"L {node.lit}")
        elif node.kind == Kind.TRUE:
            body.append("A 0")
        elif node.kind == Kind.FALSE:
            body.append("O 0 0")
        elif node.kind == Kind.AND:
            body.append(f"A {len(node.children)} {kids}")
        else:
            body.append(f"O {node.decision} {len(node.children)} {kids}")
    header = f"nnf {len(circuit.nodes)} {circuit.n_edges} {circuit.n_vars}"
    return "\n".join([header, *body]) + "\n"


@dataclass(frozen=True)
class CNF:
    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def evaluate(self, sigma: Sequence[int]) -> int:
        return int(all(any((sigma[abs(l) - 1] == 1) == (l > 0) for l in c) for c in self.clauses))


def parse_dimacs_cnf(data: str | bytes) -> CNF:
    n_vars = None
    n_clauses = 0
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    last_line = 0
    for lineno, line in _lines(data):
        last_line = lineno
        if line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            toks = line.split()
            if n_vars is not None:
                raise HeaderError("duplicate problem line", lineno)
            if len(toks) != 4 or toks[1] != "cnf":
                raise HeaderError(f"expected 'p cnf <vars> <clauses>', got {line!r}", lineno)
            n_vars, n_clauses = _int(toks[2], lineno), _int(toks[3], lineno)
            continue
        if n_vars is None:
            raise HeaderError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            lit = _int(tok, lineno)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > n_vars:
                raise LiteralRangeError(f"literal {lit} outside 1..{n_vars}", lineno)
            else:
                current.append(lit)
    if n_vars is None:
        raise HeaderError("missing 'p cnf' header")
    if current:
        raise UnterminatedClauseError("last clause is not terminated by 0", last_line)
    if len(clauses) != n_clauses:
        warnings.warn(f"header declares {n_clauses} clauses, found {len(clauses)}", stacklevel=2)
    return CNF(n_vars, tuple(clauses))


def write_dimacs_cnf(cnf: CNF) -> str:
    lines = [f"p cnf {cnf.n_vars} {len(cnf.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def _fraction(tok: str, lineno: int) -> Fraction:
    try:
        # Fraction parses both "a/b" and decimal strings exactly
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise MalformedLineError(f"cannot read {tok!r} as a rational", lineno) from None


def parse_weights(data: str | bytes, n: int) -> WeightFn:
    """Read ``w <var> <p>`` lines; unlisted variables get weight 1/2."""
    probs = [Fraction(1, 2)] * n
    seen: set[int] = set()
    for lineno, line in _lines(data):
        toks = line.split()
        if toks[0] == "c":
            continue
        if toks[0] != "w" or len(toks) != 3:
            raise MalformedLineError("weight line must be 'w <var> <weight>'", lineno)
        var = _int(toks[1], lineno)
        if not 1 <= var <= n:
            raise LiteralRangeError(f"variable {var} outside 1..{n}", lineno)
        p = _fraction(toks[2], lineno)
        if not 0 < p < 1:
            raise WeightDomainError(f"weight {toks[2]} of variable {var} not in (0,1)", lineno)
        if var in seen:
            warnings.warn(f"line {lineno}: duplicate weight for variable {var}; keeping the last", stacklevel=2)
        seen.add(var)
        probs[var - 1] = p
    return WeightFn(probs)


def write_weights(w: WeightFn) -> str:
    return "".join(f"w {v} {p.numerator}/{p.denominator}\n" for v, p in enumerate(w.probs, start=1))

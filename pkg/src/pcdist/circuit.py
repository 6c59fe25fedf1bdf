"""NNF circuits stored as immutable, topologically ordered DAGs.

Nodes are kept in a flat tuple where every child index is smaller than the
index of its parent; the root is always the last node. Per-node variable sets
are cached as integer bitmasks (bit ``v`` set iff variable ``v`` is mentioned
below the node).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Kind",
    "Node",
    "Circuit",
    "CircuitBuilder",
    "StructuralReport",
    "Determinism",
    "StructuralError",
    "CapabilityError",
    "evaluate",
    "check_decomposable",
    "check_deterministic",
    "is_smooth",
    "smooth",
    "structural_report",
    "random_topological_order",
    "truth_table_chunks",
]

SEMANTIC_LIMIT = 20
# Width (in variables) of one bit-parallel evaluation chunk.
_CHUNK_VARS = 16


class StructuralError(ValueError):
    """The circuit lacks a structural property an operation requires."""


class CapabilityError(RuntimeError):
    """The request exceeds a configured size guard."""


class Kind(enum.IntEnum):
    TRUE = 0
    FALSE = 1
    LIT = 2
    AND = 3
    OR = 4


@dataclass(frozen=True)
class Node:
    kind: Kind
    lit: int = 0
    children: tuple[int, ...] = ()
    decision: int = 0

    @property
    def var(self) -> int:
        return abs(self.lit)


class Circuit:
    """A rooted NNF DAG over variables ``1..n_vars``.

    Construction validates child references, prunes nodes unreachable from
    ``root`` and re-indexes so that the root is the last node. Use
    :class:`CircuitBuilder` rather than calling this directly when constant
    simplification is wanted.
    """

    __slots__ = ("n_vars", "nodes", "masks", "_cache")

    def __init__(self, n_vars: int, nodes: Sequence[Node], root: int | None = None):
        if n_vars < 0:
            raise ValueError("n_vars must be non-negative")
        if not nodes:
            raise ValueError("a circuit needs at least one node")
        if root is None:
            root = len(nodes) - 1
        if not 0 <= root < len(nodes):
            raise ValueError(f"root index {root} out of range")
        for i, node in enumerate(nodes):
            if node.kind == Kind.LIT:
                if node.lit == 0 or abs(node.lit) > n_vars:
                    raise ValueError(f"node {i}: literal {node.lit} outside 1..{n_vars}")
            for c in node.children:
                if not 0 <= c < i:
                    raise ValueError(f"node {i}: child {c} is not an earlier node")
            if node.decision and not 0 < node.decision <= n_vars:
                raise ValueError(f"node {i}: decision variable {node.decision} out of range")

        reachable = [False] * len(nodes)
        reachable[root] = True
        for i in range(root, -1, -1):
            if reachable[i]:
                for c in nodes[i].children:
                    reachable[c] = True
        remap: dict[int, int] = {}
        kept: list[Node] = []
        for i in range(root + 1):
            if not reachable[i]:
                continue
            node = nodes[i]
            if node.children:
                node = Node(node.kind, node.lit, tuple(remap[c] for c in node.children), node.decision)
            remap[i] = len(kept)
            kept.append(node)

        masks: list[int] = []
        for node in kept:
            if node.kind == Kind.LIT:
                masks.append(1 << node.var)
            else:
                m = 0
                for c in node.children:
                    m |= masks[c]
                masks.append(m)

        self.n_vars = n_vars
        self.nodes: tuple[Node, ...] = tuple(kept)
        self.masks: tuple[int, ...] = tuple(masks)
        self._cache: dict = {}

    @property
    def root(self) -> int:
        return len(self.nodes) - 1

    @property
    def n_edges(self) -> int:
        return sum(len(node.children) for node in self.nodes)

    @property
    def size(self) -> int:
        """Number of nodes plus number of edges."""
        return len(self.nodes) + self.n_edges

    @property
    def all_vars_mask(self) -> int:
        return ((1 << (self.n_vars + 1)) - 1) ^ 1

    def varset(self, node: int | None = None) -> frozenset[int]:
        mask = self.masks[self.root if node is None else node]
        return frozenset(v for v in range(1, self.n_vars + 1) if mask >> v & 1)

    def __len__(self) -> int:
        return len(self.nodes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.n_vars == other.n_vars and self.nodes == other.nodes

    def __hash__(self) -> int:
        return hash((self.n_vars, self.nodes))

    def __repr__(self) -> str:
        return f"Circuit(n_vars={self.n_vars}, nodes={len(self.nodes)}, edges={self.n_edges})"


class CircuitBuilder:
    """Incremental construction with constant simplification.

    ``conj``/``disj`` drop neutral constants, short-circuit on absorbing ones
    and collapse single-child gates, so the returned id may refer to an
    existing node.
    """

    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self.nodes: list[Node] = []

    def _add(self, node: Node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def kind(self, i: int) -> Kind:
        return self.nodes[i].kind

    def true(self) -> int:
        return self._add(Node(Kind.TRUE))

    def false(self) -> int:
        return self._add(Node(Kind.FALSE))

    def lit(self, lit: int) -> int:
        if lit == 0 or abs(lit) > self.n_vars:
            raise ValueError(f"literal {lit} outside 1..{self.n_vars}")
        return self._add(Node(Kind.LIT, lit=lit))

    def conj(self, children: Iterable[int]) -> int:
        kept = []
        for c in children:
            k = self.nodes[c].kind
            if k == Kind.FALSE:
                return c
            if k != Kind.TRUE:
                kept.append(c)
        if not kept:
            return self.true()
        if len(kept) == 1:
            return kept[0]
        return self._add(Node(Kind.AND, children=tuple(kept)))

    def disj(self, children: Iterable[int], decision: int = 0) -> int:
        kept = []
        for c in children:
            k = self.nodes[c].kind
            if k == Kind.TRUE:
                return c
            if k != Kind.FALSE:
                kept.append(c)
        if not kept:
            return self.false()
        if len(kept) == 1:
            return kept[0]
        return self._add(Node(Kind.OR, children=tuple(kept), decision=decision))

    def build(self, root: int) -> Circuit:
        return Circuit(self.n_vars, self.nodes, root)


def evaluate(circuit: Circuit, sigma: Sequence[int]) -> int:
    """Evaluate the circuit on a total 0/1 assignment (``sigma[i-1]`` is ``x_i``)."""
    if len(sigma) != circuit.n_vars:
        raise ValueError(f"assignment has length {len(sigma)}, circuit has {circuit.n_vars} variables")
    vals: list[bool] = []
    for node in circuit.nodes:
        k = node.kind
        if k == Kind.LIT:
            bit = sigma[node.var - 1]
            vals.append(bool(bit) if node.lit > 0 else not bit)
        elif k == Kind.AND:
            vals.append(all(vals[c] for c in node.children))
        elif k == Kind.OR:
            vals.append(any(vals[c] for c in node.children))
        else:
            vals.append(k == Kind.TRUE)
    return int(vals[-1])


def check_decomposable(circuit: Circuit) -> bool:
    """True iff the children of every AND node mention pairwise-disjoint variables."""
    masks = circuit.masks
    for node in circuit.nodes:
        if node.kind != Kind.AND:
            continue
        seen = 0
        for c in node.children:
            if seen & masks[c]:
                return False
            seen |= masks[c]
    return True


class Determinism(enum.Enum):
    SYNTACTIC_DECISION = "syntactic-decision"
    SEMANTIC_VERIFIED = "semantic-verified"
    UNKNOWN = "unknown"
    VIOLATED = "violated"


@dataclass(frozen=True)
class StructuralReport:
    decomposable: bool
    deterministic: Determinism
    smooth: bool


def _has_literal(circuit: Circuit, i: int, lit: int) -> bool:
    node = circuit.nodes[i]
    if node.kind == Kind.LIT:
        return node.lit == lit
    if node.kind == Kind.AND:
        return any(circuit.nodes[c].kind == Kind.LIT and circuit.nodes[c].lit == lit for c in node.children)
    return False


def _is_decision_node(circuit: Circuit, node: Node) -> bool:
    if len(node.children) <= 1:
        return True
    if len(node.children) != 2:
        return False
    a, b = node.children
    if node.decision:
        candidates = [node.decision]
    else:
        # no recorded decision variable: accept any variable that splits the children
        candidates = [v for v in range(1, circuit.n_vars + 1) if circuit.masks[a] >> v & 1]
    for x in candidates:
        if (_has_literal(circuit, a, x) and _has_literal(circuit, b, -x)) or (
            _has_literal(circuit, a, -x) and _has_literal(circuit, b, x)
        ):
            return True
    return False


def _syntactic_deterministic(circuit: Circuit) -> bool:
    return all(_is_decision_node(circuit, n) for n in circuit.nodes if n.kind == Kind.OR)


def _patterns(width: int) -> list[int]:
    """Bitsets over ``2**width`` lanes; ``patterns[b]`` has lane ``j`` set iff bit ``b`` of ``j`` is 1."""
    lanes = 1 << width
    out = []
    for b in range(width):
        half = 1 << b
        block = ((1 << half) - 1) << half
        period = half << 1
        repunit = ((1 << lanes) - 1) // ((1 << period) - 1)
        out.append(block * repunit)
    return out


def truth_table_chunks(circuit: Circuit, chunk_vars: int = _CHUNK_VARS):
    """Yield ``(offset, width, values)`` covering all ``2**n`` assignments.

    Assignments are indexed with ``x_1`` as the most significant bit, so index
    order is lexicographic order. Each chunk fixes a prefix of the variables and
    evaluates every node on ``2**width`` assignments at once; ``values[i]`` is a
    bitset whose bit ``j`` is the value of node ``i`` on assignment
    ``offset + j``.
    """
    n = circuit.n_vars
    width = min(n, chunk_vars)
    k = n - width
    lanes = 1 << width
    full = (1 << lanes) - 1
    pats = _patterns(width)
    for prefix in range(1 << k):
        vals: list[int] = []
        for node in circuit.nodes:
            kind = node.kind
            if kind == Kind.LIT:
                v = node.var
                if v <= k:
                    bit = prefix >> (k - v) & 1
                    val = full if bit else 0
                else:
                    val = pats[n - v]
                vals.append(val if node.lit > 0 else full ^ val)
            elif kind == Kind.AND:
                acc = full
                for c in node.children:
                    acc &= vals[c]
                vals.append(acc)
            elif kind == Kind.OR:
                acc = 0
                for c in node.children:
                    acc |= vals[c]
                vals.append(acc)
            else:
                vals.append(full if kind == Kind.TRUE else 0)
        yield prefix << width, width, vals


def _semantic_deterministic(circuit: Circuit) -> bool:
    ors = [i for i, n in enumerate(circuit.nodes) if n.kind == Kind.OR]
    if not ors:
        return True
    for _, _, vals in truth_table_chunks(circuit):
        for i in ors:
            seen = 0
            for c in circuit.nodes[i].children:
                if seen & vals[c]:
                    return False
                seen |= vals[c]
    return True


def check_deterministic(circuit: Circuit, mode: str = "syntactic", limit: int = SEMANTIC_LIMIT) -> bool:
    """Check that OR children are mutually exclusive.

    ``mode="syntactic"`` accepts only decision nodes and so may return False on
    deterministic circuits of other shapes. ``mode="semantic"`` enumerates all
    assignments and is exact, but refuses circuits over more than ``limit``
    variables.
    """
    if mode == "syntactic":
        return _syntactic_deterministic(circuit)
    if mode == "semantic":
        if circuit.n_vars > limit:
            raise CapabilityError(f"semantic determinism check limited to {limit} variables (got {circuit.n_vars})")
        return _semantic_deterministic(circuit)
    raise ValueError(f"unknown mode {mode!r}")


def is_smooth(circuit: Circuit) -> bool:
    """OR children mention identical variables and the root mentions all of them."""
    masks = circuit.masks
    if circuit.nodes[-1].kind != Kind.FALSE and masks[-1] != circuit.all_vars_mask:
        return False
    for i, node in enumerate(circuit.nodes):
        if node.kind == Kind.OR and any(masks[c] != masks[i] for c in node.children):
            return False
    return True


def smooth(circuit: Circuit) -> Circuit:
    """Return an equivalent smooth circuit.

    Each OR child missing variables is conjoined with ``(x or not x)`` gadgets,
    one shared gadget per variable; the root is completed the same way so it
    mentions every variable. An unsatisfiable (FALSE) root is returned as is.
    """
    if is_smooth(circuit):
        return circuit
    if not check_decomposable(circuit):
        raise StructuralError("smoothing requires a decomposable circuit")
    cached = circuit._cache.get("smooth")
    if cached is not None:
        return cached

    b = CircuitBuilder(circuit.n_vars)
    gadgets: dict[int, int] = {}

    def gadget(x: int) -> int:
        if x not in gadgets:
            gadgets[x] = b.disj([b.lit(x), b.lit(-x)], decision=x)
        return gadgets[x]

    def pad(i: int, have: int, want: int) -> int:
        missing = want & ~have
        if not missing:
            return i
        return b.conj([i] + [gadget(x) for x in range(1, circuit.n_vars + 1) if missing >> x & 1])

    new: list[int] = []
    masks = circuit.masks
    for i, node in enumerate(circuit.nodes):
        if node.kind == Kind.LIT:
            new.append(b.lit(node.lit))
        elif node.kind == Kind.TRUE:
            new.append(b.true())
        elif node.kind == Kind.FALSE:
            new.append(b.false())
        elif node.kind == Kind.AND:
            new.append(b.conj(new[c] for c in node.children))
        else:
            kids = [pad(new[c], masks[c], masks[i]) for c in node.children]
            new.append(b.disj(kids, decision=node.decision))
    root = new[-1]
    if circuit.nodes[-1].kind != Kind.FALSE:
        root = pad(root, masks[-1], circuit.all_vars_mask)
    out = b.build(root)
    circuit._cache["smooth"] = out
    return out


def structural_report(circuit: Circuit, semantic_limit: int = SEMANTIC_LIMIT) -> StructuralReport:
    cached = circuit._cache.get(("report", semantic_limit))
    if cached is not None:
        return cached
    if _syntactic_deterministic(circuit):
        det = Determinism.SYNTACTIC_DECISION
    elif circuit.n_vars <= semantic_limit:
        det = Determinism.SEMANTIC_VERIFIED if _semantic_deterministic(circuit) else Determinism.VIOLATED
    else:
        det = Determinism.UNKNOWN
    report = StructuralReport(check_decomposable(circuit), det, is_smooth(circuit))
    circuit._cache[("report", semantic_limit)] = report
    return report


def random_topological_order(circuit: Circuit, rng) -> list[int]:
    """A uniformly shuffled topological order of the nodes, root last."""
    remaining = [len(n.children) for n in circuit.nodes]
    parents: list[list[int]] = [[] for _ in circuit.nodes]
    for i, node in enumerate(circuit.nodes):
        for c in set(node.children):
            parents[c].append(i)
        remaining[i] = len(set(node.children))
    ready = [i for i, r in enumerate(remaining) if r == 0 and i != circuit.root]
    order: list[int] = []
    while ready:
        j = rng.randrange(len(ready))
        ready[j], ready[-1] = ready[-1], ready[j]
        i = ready.pop()
        order.append(i)
        for p in parents[i]:
            remaining[p] -= 1
            if remaining[p] == 0 and p != circuit.root:
                ready.append(p)
    order.append(circuit.root)
    return order

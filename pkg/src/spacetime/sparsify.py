"""Low-weight generators of a spacetime code from connected stabilizers.

Vertices of the spacetime graph are the spacetime qubits ``(l + 0.5, q)`` with
``0 <= l < depth``, numbered ``l * n + q`` like the fault-operator bits.
"""

from __future__ import annotations

import logging
from collections import Counter, deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from . import gf2
from .circuit import Circuit
from .outcome import OutcomeCode
from .propagation import FaultOperator
from .spacetime_code import SpacetimeCode, logical_generators
from .symplectic import clean, duals

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 20


class BudgetError(RuntimeError):
    def __init__(self, vertex: tuple[int, int], generators: int, budget: int) -> None:
        self.vertex = vertex
        self.generators = generators
        self.budget = budget
        layer, q = vertex
        super().__init__(
            f"ball around ({layer + 0.5}, {q}) has {generators} restricted generators, "
            f"budget is {budget}"
        )


@dataclass(frozen=True)
class SpacetimeGraph:
    n: int
    depth: int
    adjacency: tuple[frozenset[int], ...]

    @property
    def vertex_count(self) -> int:
        return self.n * self.depth

    def vertex(self, index: int) -> tuple[int, int]:
        """``(layer, qubit)`` of a vertex; the half-level is ``layer + 0.5``."""
        return divmod(index, self.n)

    def index(self, layer: int, qubit: int) -> int:
        return layer * self.n + qubit

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    @property
    def mask(self) -> int:
        return (1 << self.vertex_count) - 1


def build_spacetime_graph(c: Circuit) -> SpacetimeGraph:
    """A clique per operation on its qubits just before and just after its level.

    Idle qubits get the edge between their two adjacent half-levels, as if
    they were acted on by an identity gate.
    """
    n, depth = c.n, c.depth
    V = n * depth
    adj: list[set[int]] = [set() for _ in range(V)]

    def clique(level: int, qubits: Iterable[int]) -> None:
        verts = [
            layer * n + q
            for layer in (level - 1, level)
            if layer < depth
            for q in qubits
        ]
        for a in verts:
            for b in verts:
                if a != b:
                    adj[a].add(b)

    for op in c.ops:
        clique(op.level, op.qubits)
    for level in range(1, depth + 1):
        for q in c.idle_qubits(level):
            clique(level, (q,))
    return SpacetimeGraph(n, depth, tuple(frozenset(a) for a in adj))


def ball(g: SpacetimeGraph, v: int, radius: int) -> list[int]:
    """Vertices at graph distance at most ``radius`` from ``v``, sorted."""
    if not 0 <= v < g.vertex_count:
        raise IndexError(f"vertex {v} outside the spacetime graph")
    seen = {v}
    frontier = [v]
    for _ in range(radius):
        nxt = []
        for a in frontier:
            for b in g.adjacency[a]:
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        if not nxt:
            break
        frontier = nxt
    return sorted(seen)


def connected_components(g: SpacetimeGraph, support: Iterable[int]) -> list[list[int]]:
    """Partition of ``support`` by connectivity of the induced subgraph, in canonical order."""
    remaining = set(support)
    out = []
    while remaining:
        start = min(remaining)
        remaining.discard(start)
        comp = [start]
        queue = deque([start])
        while queue:
            a = queue.popleft()
            for b in g.adjacency[a]:
                if b in remaining:
                    remaining.discard(b)
                    comp.append(b)
                    queue.append(b)
        out.append(sorted(comp))
    return out


def graph_support(f: FaultOperator) -> list[int]:
    """Vertices of the support of ``f``; the last layer is outside the graph and dropped."""
    return gf2.bits(f.support_mask & ((1 << (f.n * f.depth)) - 1))


def is_connected(g: SpacetimeGraph, f: FaultOperator) -> bool:
    if f.support_mask >> g.vertex_count:
        return False
    return len(connected_components(g, graph_support(f))) == 1


def restrict_fault(f: FaultOperator, A: Iterable[int]) -> FaultOperator:
    mask = gf2.from_bits(A)
    N = f.N
    return FaultOperator.from_vec(f.n, f.depth, f.vec & (mask | (mask << N)))


def restricted_group(
    stabilizers: Sequence[FaultOperator],
    logicals: Sequence[FaultOperator],
    A: Sequence[int],
) -> list[FaultOperator]:
    """Independent generators of the stabilizers supported inside ``A``.

    ``stabilizers`` and ``logicals`` together must generate every operator
    commuting with the stabilizer group. Work happens in local coordinates on
    the ``2|A|`` single-qubit operators of ``A``.
    """
    if not stabilizers and not logicals:
        return []
    ref = (stabilizers or logicals)[0]
    n, depth, N = ref.n, ref.depth, ref.N
    A = sorted(set(A))
    a = len(A)

    def to_local(v: int) -> int:
        out = 0
        for i, s in enumerate(A):
            out |= ((v >> s) & 1) << i
            out |= ((v >> (s + N)) & 1) << (i + a)
        return out

    def to_global(v: int) -> int:
        out = 0
        for i, s in enumerate(A):
            out |= ((v >> i) & 1) << s
            out |= ((v >> (i + a)) & 1) << (s + N)
        return out

    elim = gf2.Eliminator()
    rows = []
    for f in (*stabilizers, *logicals):
        local = to_local(f.vec)
        if local and elim.add(local):
            rows.append(local)
    row_duals = duals(rows, a)
    basis = gf2.Eliminator()
    out = []
    for i in range(a):
        for cand in (1 << i, 1 << (i + a)):
            s = clean(cand, rows, row_duals, a)
            if s and basis.add(s):
                out.append(FaultOperator.from_vec(n, depth, to_global(s)))
    return out


@dataclass
class SparsifyReport:
    balls_processed: int = 0
    budget_hits: int = 0
    weight_histogram: dict[int, int] = field(default_factory=dict)  # all connected stabilizers found
    basis_weight_histogram: dict[int, int] = field(default_factory=dict)
    fallback_generators: int = 0

    def to_json(self) -> dict:
        return {
            "balls_processed": self.balls_processed,
            "budget_hits": self.budget_hits,
            "weight_histogram": {str(w): c for w, c in sorted(self.weight_histogram.items())},
            "basis_weight_histogram": {
                str(w): c for w, c in sorted(self.basis_weight_histogram.items())
            },
            "fallback_generators": self.fallback_generators,
        }


def low_weight_stabilizers(
    c: Circuit,
    oc: OutcomeCode,
    code: SpacetimeCode,
    max_weight: int,
    budget: int = DEFAULT_BUDGET,
    on_budget: str = "raise",
    report: SparsifyReport | None = None,
    graph: SpacetimeGraph | None = None,
) -> list[FaultOperator]:
    """All connected stabilizers of weight at most ``max_weight``, sorted by (weight, text).

    ``on_budget`` is ``"raise"`` (BudgetError) or ``"skip"`` (count the ball in
    ``report.budget_hits`` and move on, which may lose completeness).
    """
    if on_budget not in ("raise", "skip"):
        raise ValueError(f"on_budget must be 'raise' or 'skip', not {on_budget!r}")
    if report is None:
        report = SparsifyReport()
    if max_weight < 1 or not code.stabilizers:
        return []
    g = graph if graph is not None else build_spacetime_graph(c)
    logicals = logical_generators(c, oc)
    found: dict[int, FaultOperator] = {}  # keyed by the symplectic vector, which is canonical
    for v in range(g.vertex_count):
        A = ball(g, v, max_weight // 2)
        gens = restricted_group(code.stabilizers, logicals, A)
        report.balls_processed += 1
        if len(gens) > budget:
            if on_budget == "raise":
                raise BudgetError(g.vertex(v), len(gens), budget)
            report.budget_hits += 1
            log.warning("skipping ball around vertex %s: %d generators", g.vertex(v), len(gens))
            continue
        vecs = [f.vec for f in gens]
        N = code.N
        low = (1 << N) - 1
        acc = 0
        for i in range(1, 1 << len(vecs)):
            acc ^= vecs[(i & -i).bit_length() - 1]
            if acc in found:
                continue
            if ((acc & low) | (acc >> N)).bit_count() > max_weight:
                continue
            f = FaultOperator.from_vec(code.n, code.depth, acc)
            if is_connected(g, f):
                found[acc] = f
    out = sorted(found.values(), key=FaultOperator.sort_key)
    report.weight_histogram = dict(Counter(f.weight for f in out))
    return out


def sparsified_basis(
    code: SpacetimeCode,
    candidates: Sequence[FaultOperator],
    report: SparsifyReport | None = None,
) -> list[FaultOperator]:
    """Greedy independent subset of ``candidates`` by weight, topped up with original checks."""
    elim = gf2.Eliminator()
    basis = []
    for f in sorted(candidates, key=FaultOperator.sort_key):
        if elim.add(f.vec):
            basis.append(f)
    fallback = 0
    if len(basis) < code.r:
        for f in code.stabilizers:
            if elim.add(f.vec):
                basis.append(f)
                fallback += 1
        log.warning(
            "low-weight stabilizers span rank %d of %d; kept %d original generators",
            len(basis) - fallback, code.r, fallback,
        )
    if report is not None:
        report.fallback_generators = fallback
        report.basis_weight_histogram = dict(Counter(f.weight for f in basis))
    return basis

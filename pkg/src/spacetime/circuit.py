"""Leveled Clifford circuits: data model, text format and structural checks.

Text format, one instruction per line::

    # comment
    QUBITS 3
    H 0 1              # single-qubit gates broadcast over targets
    CX 0 2             # two-qubit gates take target pairs
    M -Z0*Z1           # Pauli-product measurement with optional sign
    TICK               # start the next level
    TABLEAU 1 2 { X0 -> +X0*X1, Z1 -> +Z0*Z1 }

Inside a ``TABLEAU`` literal, generator indices refer to positions in the
target list; unspecified generators map to themselves. The literal may span
several lines up to the closing brace.
"""

from __future__ import annotations

import re
import threading
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .pauli import (
    GATES,
    CliffordTableau,
    PhasedPauli,
    compose,
    embed_many,
    invert,
    support,
)


class CircuitSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class CircuitValidationError(ValueError):
    def __init__(self, diagnostics: Sequence[str]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class Unitary:
    tableau: CliffordTableau
    qubits: tuple[int, ...]
    level: int
    name: str | None = None  # None for tableau literals


@dataclass(frozen=True)
class Measurement:
    pauli: PhasedPauli
    level: int
    index: int  # position in the outcome bit-string, from 0

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(support(self.pauli.proj))


Operation = Unitary | Measurement


@dataclass(frozen=True, eq=False)
class Circuit:
    n: int
    ops: tuple[Operation, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.n == other.n and self.ops == other.ops

    def __hash__(self) -> int:
        return hash((self.n, self.ops))

    @cached_property
    def depth(self) -> int:
        return max((op.level for op in self.ops), default=0)

    @cached_property
    def measurements(self) -> tuple[Measurement, ...]:
        return tuple(op for op in self.ops if isinstance(op, Measurement))

    @property
    def m(self) -> int:
        return len(self.measurements)

    def ops_at(self, level: int) -> list[Operation]:
        return [op for op in self.ops if op.level == level]

    def idle_qubits(self, level: int) -> list[int]:
        busy = {q for op in self.ops_at(level) for q in op.qubits}
        return [q for q in range(self.n) if q not in busy]

    def level_unitary(self, level: int) -> CliffordTableau:
        """Product of the unitaries at ``level`` (they act on disjoint qubits)."""
        if not 1 <= level <= self.depth:
            raise IndexError(f"level {level} outside 1..{self.depth}")
        key = ("level", level)
        with self._lock:
            hit = self._cache.get(key)
        if hit is None:
            parts = [
                (op.tableau, op.qubits)
                for op in self.ops_at(level)
                if isinstance(op, Unitary)
            ]
            hit = embed_many(parts, self.n)
            with self._lock:
                hit = self._cache.setdefault(key, hit)
        return hit

    def level_unitary_inverse(self, level: int) -> CliffordTableau:
        key = ("inverse", level)
        with self._lock:
            hit = self._cache.get(key)
        if hit is None:
            hit = invert(self.level_unitary(level))
            with self._lock:
                hit = self._cache.setdefault(key, hit)
        return hit

    def window_unitary(self, i: int, j: int) -> CliffordTableau:
        """``U_j U_{j-1} ... U_{i+1}``: maps faults right after level i to right after level j."""
        if not (0 <= i <= self.depth and 0 <= j <= self.depth):
            raise IndexError(f"window ({i}, {j}) outside 0..{self.depth}")
        if j <= i:
            return CliffordTableau.identity(self.n)
        key = ("window", i, j)
        with self._lock:
            hit = self._cache.get(key)
        if hit is None:
            hit = compose(self.window_unitary(i, j - 1), self.level_unitary(j))
            with self._lock:
                hit = self._cache.setdefault(key, hit)
        return hit

    def with_measurement_signs(self, flips: set[int]) -> Circuit:
        """Copy of the circuit with the measurements in ``flips`` negated."""
        ops = []
        for op in self.ops:
            if isinstance(op, Measurement) and op.index in flips:
                op = Measurement(-op.pauli, op.level, op.index)
            ops.append(op)
        return Circuit(self.n, tuple(ops))

    def __iter__(self) -> Iterator[Operation]:
        return iter(self.ops)


def validate(c: Circuit) -> list[str]:
    """Structural problems of ``c``; an empty list means the circuit is well formed."""
    out = []
    prev_level = 0
    seen: dict[int, dict[int, int]] = {}
    next_index = 0
    for pos, op in enumerate(c.ops):
        if op.level < 1:
            out.append(f"operation {pos} has level {op.level} < 1")
        if op.level < prev_level:
            out.append(f"operation {pos} at level {op.level} follows level {prev_level}")
        prev_level = max(prev_level, op.level)
        if isinstance(op, Measurement):
            if op.pauli.n != c.n:
                out.append(f"measurement {op.index} acts on {op.pauli.n} qubits, expected {c.n}")
                continue
            if not op.pauli.proj:
                out.append(f"level {op.level}: measurement {op.index} of the identity")
            elif not op.pauli.is_hermitian():
                out.append(f"level {op.level}: measurement {op.index} is not Hermitian")
            if op.index != next_index:
                out.append(f"measurement at position {pos} has index {op.index}, expected {next_index}")
            next_index += 1
        else:
            if len(set(op.qubits)) != len(op.qubits):
                out.append(f"level {op.level}: repeated qubit in {op.name or 'TABLEAU'} {op.qubits}")
            if op.tableau.n != len(op.qubits):
                out.append(f"level {op.level}: tableau size does not match targets {op.qubits}")
        level_use = seen.setdefault(op.level, {})
        for q in op.qubits:
            if not 0 <= q < c.n:
                out.append(f"level {op.level}: qubit {q} out of range for {c.n} qubits")
            elif q in level_use:
                out.append(
                    f"level {op.level}: qubit {q} used by operations {level_use[q]} and {pos}"
                )
            else:
                level_use[q] = pos
    return out


_TABLEAU_ENTRY = re.compile(r"([XZ]\d+)\s*->\s*(\S+)")


def parse_circuit(text: str) -> Circuit:
    n: int | None = None
    level = 1
    ops: list[Operation] = []
    m = 0
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        lineno = i + 1
        line = lines[i].split("#", 1)[0].strip()
        i += 1
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "QUBITS":
            if n is not None:
                raise CircuitSyntaxError("QUBITS declared twice", lineno)
            if ops:
                raise CircuitSyntaxError("QUBITS must precede all operations", lineno)
            try:
                n = int(rest)
            except ValueError:
                raise CircuitSyntaxError(f"bad qubit count {rest!r}", lineno) from None
            if n < 1:
                raise CircuitSyntaxError("qubit count must be positive", lineno)
            continue
        if n is None:
            raise CircuitSyntaxError("missing QUBITS header", lineno)
        if head == "TICK":
            if rest:
                raise CircuitSyntaxError("TICK takes no arguments", lineno)
            level += 1
        elif head == "M":
            try:
                pauli = PhasedPauli.from_string(rest, n)
            except (ValueError, IndexError) as exc:
                raise CircuitSyntaxError(str(exc), lineno) from None
            if not pauli.is_hermitian():
                raise CircuitSyntaxError(f"measured operator {rest!r} is not Hermitian", lineno)
            ops.append(Measurement(pauli, level, m))
            m += 1
        elif head == "TABLEAU":
            body = rest
            while "}" not in body:
                if i >= len(lines):
                    raise CircuitSyntaxError("unterminated TABLEAU literal", lineno)
                body += "\n" + lines[i].split("#", 1)[0].strip()
                i += 1
            targets_text, _, literal = body.partition("{")
            literal, _, trailing = literal.partition("}")
            if trailing.strip():
                raise CircuitSyntaxError("text after TABLEAU literal", lineno)
            targets = _parse_targets(targets_text.split(), n, lineno)
            images = {}
            for entry in filter(None, (e.strip() for e in re.split(r"[,\n]", literal))):
                mt = _TABLEAU_ENTRY.fullmatch(entry)
                if mt is None:
                    raise CircuitSyntaxError(f"bad tableau entry {entry!r}", lineno)
                images[mt.group(1)] = mt.group(2)
            try:
                tableau = CliffordTableau.from_strings(len(targets), images)
            except (ValueError, IndexError) as exc:
                raise CircuitSyntaxError(str(exc), lineno) from None
            ops.append(Unitary(tableau, tuple(targets), level))
        elif head in GATES:
            gate = GATES[head]
            targets = _parse_targets(rest.split(), n, lineno)
            if not targets or len(targets) % gate.n:
                raise CircuitSyntaxError(
                    f"{head} needs a multiple of {gate.n} targets, got {len(targets)}", lineno
                )
            for k in range(0, len(targets), gate.n):
                ops.append(Unitary(gate, tuple(targets[k : k + gate.n]), level, head))
        else:
            raise CircuitSyntaxError(f"unknown instruction {head!r}", lineno)
    if n is None:
        raise CircuitSyntaxError("missing QUBITS header")
    c = Circuit(n, tuple(ops))
    diagnostics = validate(c)
    if diagnostics:
        raise CircuitValidationError(diagnostics)
    return c


def _parse_targets(tokens: Sequence[str], n: int, lineno: int) -> list[int]:
    out = []
    for tok in tokens:
        try:
            q = int(tok)
        except ValueError:
            raise CircuitSyntaxError(f"bad qubit index {tok!r}", lineno) from None
        if not 0 <= q < n:
            raise CircuitSyntaxError(f"qubit {q} out of range for {n} qubits", lineno)
        out.append(q)
    return out


def serialize_circuit(c: Circuit) -> str:
    lines = [f"QUBITS {c.n}"]
    level = 1
    for op in c.ops:
        while level < op.level:
            lines.append("TICK")
            level += 1
        if isinstance(op, Measurement):
            lines.append(f"M {op.pauli}")
        elif op.name is not None:
            lines.append(f"{op.name} {' '.join(map(str, op.qubits))}")
        else:
            t = op.tableau
            entries = [f"X{q} -> {img}" for q, img in enumerate(t.x_images)]
            entries += [f"Z{q} -> {img}" for q, img in enumerate(t.z_images)]
            lines.append(
                f"TABLEAU {' '.join(map(str, op.qubits))} {{ {', '.join(entries)} }}"
            )
    return "\n".join(lines) + "\n"

"""The spacetime stabilizer code generated by the check operators of a circuit.

Spacetime qubit ``(l + 0.5, q)`` has index ``l * n + q``. The symplectic
vector of a fault operator is ``x | z << N``, which is also the column order
of the exported check matrix: all X columns by (level, qubit), then all Z
columns.
"""

from __future__ import annotations

import io
import json
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse

from . import gf2
from .circuit import Circuit
from .outcome import OutcomeCode
from .pauli import DimensionError, ProjPauli
from .propagation import (
    FaultOperator,
    check_operator,
    eta,
    flip_partner,
)
from .symplectic import commutant, form

SCHEMA_VERSION = 1


class NonLinearCodeError(ValueError):
    """Raised when the outcome code still has affine checks (linearize first)."""


@dataclass(frozen=True)
class SpacetimeCode:
    n: int
    depth: int
    m: int
    k: int
    checks: tuple[int, ...]  # outcome checks u_i, bit j = measurement j
    stabilizers: tuple[FaultOperator, ...]

    @property
    def N(self) -> int:
        return self.n * (self.depth + 1)

    @property
    def r(self) -> int:
        return len(self.stabilizers)

    @property
    def K(self) -> int:
        return self.N - (self.m - self.k)

    def with_stabilizers(self, stabilizers: Sequence[FaultOperator]) -> SpacetimeCode:
        """Same code with another generating set (e.g. a sparsified basis)."""
        return SpacetimeCode(self.n, self.depth, self.m, self.k, self.checks, tuple(stabilizers))


def build_spacetime_code(c: Circuit, oc: OutcomeCode) -> SpacetimeCode:
    if not oc.is_linear:
        raise NonLinearCodeError("outcome code has affine checks; linearize the circuit first")
    if oc.m != c.m:
        raise DimensionError(f"outcome code of length {oc.m} for a circuit with {c.m} outcomes")
    checks = tuple(ch.u for ch in oc.checks)
    stabilizers = tuple(check_operator(c, u) for u in checks)
    return SpacetimeCode(c.n, c.depth, c.m, oc.k, checks, stabilizers)


def syndrome_Q_bits(code: SpacetimeCode, f: FaultOperator) -> int:
    """Packed syndrome: bit i is the commutator of ``f`` with stabilizer i."""
    if (f.n, f.depth) != (code.n, code.depth):
        raise DimensionError(
            f"fault operator shape {(f.n, f.depth)} does not match code {(code.n, code.depth)}"
        )
    v, N = f.vec, code.N
    s = 0
    for i, stab in enumerate(code.stabilizers):
        if form(stab.vec, v, N):
            s |= 1 << i
    return s


def syndrome_Q(code: SpacetimeCode, f: FaultOperator) -> list[int]:
    s = syndrome_Q_bits(code, f)
    return [(s >> i) & 1 for i in range(code.r)]


def commutation_violations(code: SpacetimeCode) -> list[tuple[int, int]]:
    """Pairs of stabilizers that anticommute; empty for a valid code."""
    N = code.N
    vecs = [s.vec for s in code.stabilizers]
    return [
        (i, j)
        for i in range(len(vecs))
        for j in range(i + 1, len(vecs))
        if form(vecs[i], vecs[j], N)
    ]


def _g_operator(c: Circuit, p: int, level: int) -> FaultOperator:
    # P right before the level and its image right after: the cumulant is P alone.
    layers = [0] * (c.depth + 1)
    layers[level - 1] = p
    layers[level] = c.level_unitary(level).conjugate_vec(p)
    return FaultOperator(c.n, c.depth, tuple(layers))


def logical_families(
    c: Circuit, oc: OutcomeCode
) -> tuple[list[FaultOperator], list[FaultOperator], list[FaultOperator]]:
    """Output-layer operators, G(P, l) over level commutants, and L(v) over outcome codewords."""
    n = c.n
    output = []
    for q in range(n):
        for letter in "XZ":
            output.append(eta(c, c.depth + 0.5, ProjPauli.single(n, q, letter)))
    level_ops = []
    for level in range(1, c.depth + 1):
        measured = [
            op.pauli.proj.vec for op in c.measurements if op.level == level
        ]
        for p in commutant(measured, n):
            level_ops.append(_g_operator(c, p, level))
    partners = [
        _g_operator(c, flip_partner(meas.pauli.proj).vec, meas.level)
        for meas in c.measurements
    ]
    codeword_ops = []
    for v in oc.codeword_basis():
        acc = FaultOperator.identity(n, c.depth)
        for j in gf2.bits(v):
            acc = acc * partners[j]
        codeword_ops.append(acc)
    return output, level_ops, codeword_ops


def logical_generators(c: Circuit, oc: OutcomeCode) -> list[FaultOperator]:
    output, level_ops, codeword_ops = logical_families(c, oc)
    return output + level_ops + codeword_ops


def generated_rank(ops: Sequence[FaultOperator]) -> int:
    return gf2.rank(f.vec for f in ops)


def export_check_matrix(code: SpacetimeCode) -> list[list[int]]:
    """Nonzero columns of each row of the 2N-column symplectic check matrix."""
    return [gf2.bits(s.vec) for s in code.stabilizers]


def column_labels(n: int, depth: int) -> list[str]:
    return [
        f"{letter}({layer + 0.5},{q})"
        for letter in "XZ"
        for layer in range(depth + 1)
        for q in range(n)
    ]


def write_alist(rows: Sequence[Sequence[int]], ncols: int) -> str:
    """MacKay alist text: column view then row view, 1-based, zero padded."""
    cols: list[list[int]] = [[] for _ in range(ncols)]
    for i, row in enumerate(rows):
        for j in row:
            cols[j].append(i)
    col_deg = [len(col) for col in cols]
    row_deg = [len(row) for row in rows]
    max_col = max(col_deg, default=0)
    max_row = max(row_deg, default=0)

    def padded(entries: Sequence[int], width: int) -> str:
        vals = [e + 1 for e in entries] + [0] * (width - len(entries))
        return " ".join(map(str, vals))

    lines = [
        f"{ncols} {len(rows)}",
        f"{max_col} {max_row}",
        " ".join(map(str, col_deg)),
        " ".join(map(str, row_deg)),
    ]
    lines += [padded(col, max_col) for col in cols]
    lines += [padded(row, max_row) for row in rows]
    return "\n".join(lines) + "\n"


def read_alist(text: str) -> list[list[int]]:
    """Rows (0-based column lists) of an alist file; inverse of :func:`write_alist`."""
    # Lines are positional; an all-zero-degree block is written as empty lines.
    data = [list(map(int, line.split())) for line in text.removesuffix("\n").split("\n")]
    ncols, nrows = data[0]
    row_deg = data[3] if nrows else []
    start = 4 + ncols
    return [
        [c - 1 for c in data[start + i][: row_deg[i]]] for i in range(nrows)
    ]


def to_sparse(rows: Sequence[Sequence[int]], ncols: int) -> scipy.sparse.coo_matrix:
    r_idx = [i for i, row in enumerate(rows) for _ in row]
    c_idx = [j for row in rows for j in row]
    data = np.ones(len(c_idx), dtype=np.int8)
    return scipy.sparse.coo_matrix((data, (r_idx, c_idx)), shape=(len(rows), ncols))


def write_matrix_market(rows: Sequence[Sequence[int]], ncols: int) -> str:
    buf = io.BytesIO()
    scipy.io.mmwrite(buf, to_sparse(rows, ncols), field="integer")
    return buf.getvalue().decode()


def code_metadata(code: SpacetimeCode) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": code.n,
        "depth": code.depth,
        "N": code.N,
        "K": code.K,
        "r": code.r,
        "column_order": column_labels(code.n, code.depth),
    }


def code_json(code: SpacetimeCode, logicals: Sequence[FaultOperator] | None = None) -> str:
    payload = code_metadata(code)
    payload["stabilizers"] = [str(s) for s in code.stabilizers]
    payload["checks"] = [gf2.to_bitstring(u, code.m) for u in code.checks]
    if logicals is not None:
        payload["logicals"] = [str(f) for f in logicals]
    return json.dumps(payload, indent=2)

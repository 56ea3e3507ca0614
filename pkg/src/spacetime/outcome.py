"""Outcome code of a Clifford circuit by stabilizer simulation with provenance.

Each stabilizer row carries a provenance mask over measurement indices: the
row ``(op, prov)`` stands for the stabilizer ``(-1)**(prov . o) * op`` of the
state after outcomes ``o``. When a measured operator is already in the group
up to sign, the XOR of the provenance masks of the rows used to build it gives
the check support.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass

from . import gf2
from .circuit import Circuit, Measurement, Unitary
from .pauli import PhasedPauli, ProjPauli, commutator, conjugate, embed
from .symplectic import logical_pairs


@dataclass(frozen=True)
class OutcomeCheck:
    u: int  # bit j set iff outcome j takes part
    b: int  # affine constant: (o | u) == b for every fault-free outcome


@dataclass(frozen=True)
class OutcomeCode:
    m: int
    checks: tuple[OutcomeCheck, ...]

    @property
    def r(self) -> int:
        return len(self.checks)

    @property
    def k(self) -> int:
        return self.m - gf2.rank(ch.u for ch in self.checks)

    @property
    def is_linear(self) -> bool:
        return all(ch.b == 0 for ch in self.checks)

    def codeword_basis(self) -> list[int]:
        """Basis of the linear code ``{o : (o | u_i) = 0 for all i}``."""
        return gf2.nullspace([ch.u for ch in self.checks], self.m)

    def offset(self) -> int:
        """One solution of the affine system (zero for a linear code)."""
        # Solve u_i . o = b_i by Gaussian elimination on the augmented rows.
        rows = [ch.u | (ch.b << self.m) for ch in self.checks]
        pivots: dict[int, int] = {}
        for row in rows:
            for col, prow in pivots.items():
                if (row >> col) & 1:
                    row ^= prow
            low = row & ((1 << self.m) - 1)
            if not low:
                if row:
                    raise ValueError("inconsistent outcome checks")
                continue
            col = (low & -low).bit_length() - 1
            for c2 in pivots:
                if (pivots[c2] >> col) & 1:
                    pivots[c2] ^= row
            pivots[col] = row
        o = 0
        for col, prow in pivots.items():
            if (prow >> self.m) & 1:
                o |= 1 << col
        return o

    def contains(self, o: int) -> bool:
        return not any(syndrome_O(self, o))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "checks": [
                {"u": gf2.to_bitstring(ch.u, self.m), "b": ch.b} for ch in self.checks
            ],
        }


def syndrome_O(code: OutcomeCode, o: int, length: int | None = None) -> list[int]:
    """Value of each check on the outcome string ``o``; all zero for fault-free runs."""
    if length is not None and length != code.m:
        raise ValueError(f"outcome length {length} != {code.m}")
    if o >> code.m:
        raise ValueError(f"outcome string has bits beyond length {code.m}")
    return [gf2.parity(ch.u & o) ^ ch.b for ch in code.checks]


def syndrome_bits(code: OutcomeCode, o: int) -> int:
    """:func:`syndrome_O` packed into an int (bit i = check i)."""
    s = 0
    for i, ch in enumerate(code.checks):
        if gf2.parity(ch.u & o) ^ ch.b:
            s |= 1 << i
    return s


@dataclass(frozen=True)
class AugmentedStabilizer:
    op: PhasedPauli
    prov: int


@dataclass(frozen=True)
class OutputStabilizerGroup:
    """Stabilizers of the output state; signs are those of the all-zero outcome branch."""

    n: int
    generators: tuple[PhasedPauli, ...]
    logicals: tuple[tuple[ProjPauli, ProjPauli], ...]

    def to_json(self) -> dict:
        return {
            "generators": [str(g) for g in self.generators],
            "logicals": [[str(a), str(b)] for a, b in self.logicals],
        }


def membership_and_decompose(
    rows: Sequence[AugmentedStabilizer], p: PhasedPauli
) -> tuple[int, list[int]] | None:
    """Write ``sign * p`` as a product of rows.

    Returns ``(sign, K)`` with ``sign * p == prod(rows[k].op for k in K)``, or
    None when neither ``p`` nor ``-p`` lies in the group.
    """
    elim = gf2.Eliminator()
    for i, row in enumerate(rows):
        elim.add(row.op.proj.vec, 1 << i)
    residual, tag = elim.reduce(p.proj.vec)
    if residual:
        return None
    K = gf2.bits(tag)
    prod = PhasedPauli.identity(p.n)
    for k in K:
        prod = prod * rows[k].op
    diff = (prod.phase - p.phase) % 4
    if diff % 2:
        raise ValueError("stabilizer rows do not commute")
    return (1 if diff == 0 else -1), K


def anticommuting_update(
    rows: Sequence[AugmentedStabilizer], m: PhasedPauli, prov: int = 0
) -> list[AugmentedStabilizer]:
    """Post-measurement generators when ``m`` anticommutes with some row.

    The lowest-index anticommuting row is the pivot: it multiplies the other
    anticommuting rows and is then replaced by ``m`` (appended last).
    """
    anti = [i for i, row in enumerate(rows) if commutator(row.op.proj, m.proj)]
    if not anti:
        raise ValueError("measured operator commutes with every stabilizer")
    pivot = rows[anti[0]]
    out = []
    for i, row in enumerate(rows):
        if i == anti[0]:
            continue
        if i in anti:
            row = AugmentedStabilizer(pivot.op * row.op, pivot.prov ^ row.prov)
        out.append(row)
    out.append(AugmentedStabilizer(m, prov))
    return out


def _simulate(c: Circuit) -> tuple[list[OutcomeCheck], list[AugmentedStabilizer]]:
    rows: list[AugmentedStabilizer] = []
    checks = []
    for op in c.ops:
        if isinstance(op, Unitary):
            if not rows:
                continue
            t = embed(op.tableau, op.qubits, c.n)
            touched = gf2.from_bits(op.qubits)
            rows = [
                AugmentedStabilizer(conjugate(t, row.op), row.prov)
                if (row.op.proj.x | row.op.proj.z) & touched else row
                for row in rows
            ]
            continue
        assert isinstance(op, Measurement)
        j = op.index
        s = op.pauli
        if any(commutator(row.op.proj, s.proj) for row in rows):
            rows = anticommuting_update(rows, s, 1 << j)
            continue
        found = membership_and_decompose(rows, s)
        if found is None:
            rows.append(AugmentedStabilizer(s, 1 << j))
            continue
        sign, K = found
        u = 1 << j
        for k in K:
            u ^= rows[k].prov
        checks.append(OutcomeCheck(u, 0 if sign == 1 else 1))
    return checks, rows


def compute_outcome_code(c: Circuit) -> tuple[OutcomeCode, OutputStabilizerGroup]:
    """Checks of the outcome code and the output stabilizer group of ``c``."""
    checks, rows = _simulate(c)
    code = OutcomeCode(c.m, tuple(checks))
    gens = tuple(row.op for row in rows)
    pairs = logical_pairs([g.proj.vec for g in gens], c.n)
    logicals = tuple(
        (ProjPauli.from_vec(c.n, a), ProjPauli.from_vec(c.n, b)) for a, b in pairs
    )
    return code, OutputStabilizerGroup(c.n, gens, logicals)


def linearize(c: Circuit) -> Circuit:
    """Negate measurements whose check has constant 1 so that every check becomes linear."""
    checks, _ = _simulate(c)
    flips = {ch.u.bit_length() - 1 for ch in checks if ch.b}
    if not flips:
        return c
    return c.with_measurement_signs(flips)


def outcome_code_json(code: OutcomeCode, group: OutputStabilizerGroup) -> str:
    payload = code.to_json()
    payload["output_group"] = group.to_json()
    return json.dumps(payload, indent=2)

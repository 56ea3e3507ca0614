"""Symplectic helpers on packed Pauli vectors ``x | z << n``."""

from __future__ import annotations

from collections.abc import Sequence

from .gf2 import Eliminator, bits, nullspace, parity


def form(v: int, w: int, n: int) -> int:
    """Symplectic inner product: 1 iff the two Paulis anticommute."""
    mask = (1 << n) - 1
    return parity(((v & mask) & (w >> n)) ^ ((v >> n) & (w & mask)))


def swap_halves(v: int, n: int) -> int:
    mask = (1 << n) - 1
    return (v >> n) | ((v & mask) << n)


def single_qubit_basis(n: int) -> list[int]:
    """X_0, Z_0, X_1, Z_1, ... as packed vectors."""
    out = []
    for q in range(n):
        out.append(1 << q)
        out.append(1 << (q + n))
    return out


def weight(v: int, n: int) -> int:
    mask = (1 << n) - 1
    return ((v & mask) | (v >> n)).bit_count()


def commutant(rows: Sequence[int], n: int) -> list[int]:
    """Basis of the Paulis commuting with every row."""
    return nullspace([swap_halves(r, n) for r in rows], 2 * n)


def duals(rows: Sequence[int], n: int, candidates: Sequence[int] | None = None) -> list[int]:
    """Vectors ``d_i`` with ``form(d_i, rows[j]) == (i == j)``.

    ``rows`` must be independent. ``candidates`` (default: single-qubit X and Z)
    must span a space on which the pairing with ``rows`` is onto.
    """
    if candidates is None:
        candidates = single_qubit_basis(n)
    elim = Eliminator()
    for c_idx, c in enumerate(candidates):
        signature = 0
        for j, r in enumerate(rows):
            if form(c, r, n):
                signature |= 1 << j
        elim.add(signature, 1 << c_idx)
    out = []
    for j in range(len(rows)):
        residual, tag = elim.reduce(1 << j)
        if residual:
            raise ValueError("rows are dependent or candidates do not separate them")
        d = 0
        for c_idx in bits(tag):
            d ^= candidates[c_idx]
        out.append(d)
    return out


def clean(v: int, rows: Sequence[int], row_duals: Sequence[int], n: int) -> int:
    """Multiply ``v`` by duals until it commutes with every row."""
    for r, d in zip(rows, row_duals):
        if form(v, r, n):
            v ^= d
    return v


def logical_pairs(stabilizers: Sequence[int], n: int) -> list[tuple[int, int]]:
    """Symplectic basis ``(X_i, Z_i)`` of the normalizer modulo the stabilizer group.

    Candidates are single-qubit X/Z operators cleaned against the stabilizers,
    then paired by symplectic Gram-Schmidt.
    """
    elim = Eliminator()
    gens = [s for s in stabilizers if elim.add(s)]
    row_duals = duals(gens, n)
    pool = [clean(c, gens, row_duals, n) for c in single_qubit_basis(n)]
    pool = [c for c in pool if not elim.contains(c)]
    pairs = []
    while pool:
        a = pool.pop(0)
        partner = next((i for i, b in enumerate(pool) if form(a, b, n)), None)
        if partner is None:
            # Commutes with the whole normalizer, hence a stabilizer.
            continue
        b = pool.pop(partner)
        fixed = []
        for e in pool:
            if form(e, b, n):
                e ^= a
            if form(e, a, n):
                e ^= b
            if not elim.contains(e):
                fixed.append(e)
        pool = fixed
        pairs.append((a, b))
    return pairs

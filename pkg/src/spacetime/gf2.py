"""GF(2) linear algebra on rows packed into Python ints (bit i = column i)."""

from __future__ import annotations

from collections.abc import Iterable, Sequence


def parity(x: int) -> int:
    return x.bit_count() & 1


def bits(x: int) -> list[int]:
    """Indices of the set bits of ``x`` in increasing order."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def from_bits(indices: Iterable[int]) -> int:
    x = 0
    for i in indices:
        x |= 1 << i
    return x


def to_bitstring(x: int, length: int) -> str:
    """Bit ``i`` of ``x`` becomes character ``i`` of the string."""
    return "".join("1" if (x >> i) & 1 else "0" for i in range(length))


def from_bitstring(s: str) -> int:
    x = 0
    for i, ch in enumerate(s):
        if ch == "1":
            x |= 1 << i
        elif ch != "0":
            raise ValueError(f"invalid bit character {ch!r}")
    return x


class Eliminator:
    """Incremental Gauss-Jordan basis that remembers how each pivot row was formed.

    Every inserted vector carries a tag (an int bitmask, typically the set of
    original row indices). ``reduce`` returns the residual of a vector together
    with the XOR of the tags of the pivot rows used, so that
    ``vector == residual ^ span(tag)``.
    """

    def __init__(self) -> None:
        self._rows: dict[int, tuple[int, int]] = {}  # pivot bit -> (row, tag)

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v: int) -> tuple[int, int]:
        tag = 0
        # Rows are kept fully reduced: each pivot bit occurs in one row only.
        for pivot, (row, rtag) in self._rows.items():
            if (v >> pivot) & 1:
                v ^= row
                tag ^= rtag
        return v, tag

    def add(self, v: int, tag: int = 0) -> bool:
        """Insert ``v``; return False if it was already in the span."""
        residual, used = self.reduce(v)
        if not residual:
            return False
        tag ^= used
        top = residual.bit_length() - 1
        for pivot, (row, rtag) in list(self._rows.items()):
            if (row >> top) & 1:
                self._rows[pivot] = (row ^ residual, rtag ^ tag)
        self._rows[top] = (residual, tag)
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def rows(self) -> list[int]:
        return [self._rows[p][0] for p in sorted(self._rows)]


def rank(rows: Iterable[int]) -> int:
    elim = Eliminator()
    return sum(elim.add(r) for r in rows)


def independent_subset(rows: Sequence[int]) -> list[int]:
    """Indices of a maximal independent subset, chosen greedily in order."""
    elim = Eliminator()
    return [i for i, r in enumerate(rows) if elim.add(r)]


def in_span(v: int, rows: Iterable[int]) -> bool:
    elim = Eliminator()
    for r in rows:
        elim.add(r)
    return elim.contains(v)


def solve_combination(v: int, rows: Sequence[int]) -> int | None:
    """Return a mask ``c`` with XOR of ``rows[i]`` for i in c equal to ``v``, or None."""
    elim = Eliminator()
    for i, r in enumerate(rows):
        elim.add(r, 1 << i)
    residual, tag = elim.reduce(v)
    return tag if residual == 0 else None


def nullspace(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis of ``{x : parity(row & x) == 0 for all rows}``."""
    # Reduced row echelon form with pivots chosen on the lowest free column.
    pivots: dict[int, int] = {}
    for r in rows:
        for col, prow in pivots.items():
            if (r >> col) & 1:
                r ^= prow
        if not r:
            continue
        col = (r & -r).bit_length() - 1
        for c2 in pivots:
            if (pivots[c2] >> col) & 1:
                pivots[c2] ^= r
        pivots[col] = r
    basis = []
    for free in range(ncols):
        if free in pivots:
            continue
        x = 1 << free
        for col, prow in pivots.items():
            if (prow >> free) & 1:
                x |= 1 << col
        basis.append(x)
    return basis

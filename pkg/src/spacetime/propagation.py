"""Fault operators on the spacetime qubits and their forward/backward accumulation.

A fault operator of an ``n``-qubit, depth-``D`` circuit has ``D + 1`` layers;
layer ``l`` (0-based) holds the Pauli occurring right after level ``l``, i.e.
at half-level ``l + 0.5``. Layers are packed symplectic vectors ``x | z << n``
and phases are dropped.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

from . import gf2
from .circuit import Circuit
from .pauli import DimensionError, ProjPauli
from .symplectic import form


@dataclass(frozen=True)
class FaultOperator:
    n: int
    depth: int
    layers: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.layers) != self.depth + 1:
            raise DimensionError(f"expected {self.depth + 1} layers, got {len(self.layers)}")

    @classmethod
    def identity(cls, n: int, depth: int) -> FaultOperator:
        return cls(n, depth, (0,) * (depth + 1))

    @classmethod
    def for_circuit(cls, c: Circuit, layers: Sequence[int] | None = None) -> FaultOperator:
        if layers is None:
            return cls.identity(c.n, c.depth)
        return cls(c.n, c.depth, tuple(layers))

    def layer(self, index: int) -> ProjPauli:
        return ProjPauli.from_vec(self.n, self.layers[index])

    def __mul__(self, other: FaultOperator) -> FaultOperator:
        self._check(other)
        return FaultOperator(
            self.n, self.depth, tuple(a ^ b for a, b in zip(self.layers, other.layers))
        )

    def __bool__(self) -> bool:
        return any(self.layers)

    def _check(self, other: FaultOperator) -> None:
        if (self.n, self.depth) != (other.n, other.depth):
            raise DimensionError(
                f"fault operators of shape {(self.n, self.depth)} and {(other.n, other.depth)}"
            )

    @property
    def N(self) -> int:
        return self.n * (self.depth + 1)

    @cached_property
    def vec(self) -> int:
        """Whole operator as one symplectic vector; spacetime qubit ``l * n + q``."""
        n, N = self.n, self.N
        mask = (1 << n) - 1
        x = z = 0
        for idx, v in enumerate(self.layers):
            x |= (v & mask) << (idx * n)
            z |= (v >> n) << (idx * n)
        return x | (z << N)

    @classmethod
    def from_vec(cls, n: int, depth: int, v: int) -> FaultOperator:
        N = n * (depth + 1)
        mask = (1 << n) - 1
        x, z = v & ((1 << N) - 1), v >> N
        layers = tuple(
            ((x >> (idx * n)) & mask) | (((z >> (idx * n)) & mask) << n)
            for idx in range(depth + 1)
        )
        return cls(n, depth, layers)

    @cached_property
    def support_mask(self) -> int:
        """Bit ``l * n + q`` set iff the operator acts on spacetime qubit (l + 0.5, q)."""
        N = self.N
        v = self.vec
        return (v & ((1 << N) - 1)) | (v >> N)

    @property
    def weight(self) -> int:
        return self.support_mask.bit_count()

    def support(self) -> list[tuple[int, int]]:
        """Spacetime qubits as ``(layer, qubit)`` pairs."""
        return [divmod(i, self.n) for i in gf2.bits(self.support_mask)]

    def __str__(self) -> str:
        parts = [
            f"{idx + 0.5}:{self.layer(idx)}"
            for idx, v in enumerate(self.layers)
            if v
        ]
        return ";".join(parts) if parts else "I"

    def sort_key(self) -> tuple[int, str]:
        return (self.weight, str(self))


def parse_fault(text: str, n: int, depth: int) -> FaultOperator:
    """Inverse of ``str(FaultOperator)``: ``0.5:Z0;1.5:X0*X1`` or ``I``."""
    layers = [0] * (depth + 1)
    text = text.strip()
    if text in ("", "I"):
        return FaultOperator(n, depth, tuple(layers))
    for entry in text.split(";"):
        level_text, _, pauli = entry.partition(":")
        idx = _layer_index(float(level_text), depth)
        layers[idx] ^= ProjPauli.from_string(pauli, n).vec
    return FaultOperator(n, depth, tuple(layers))


def _layer_index(half_level: float, depth: int) -> int:
    idx = half_level - 0.5
    if idx != int(idx) or not 0 <= idx <= depth:
        raise IndexError(f"half-level {half_level} not in 0.5, 1.5, ..., {depth + 0.5}")
    return int(idx)


def eta(c: Circuit, half_level: float, p: ProjPauli) -> FaultOperator:
    """Fault operator with ``p`` at ``half_level`` and the identity elsewhere."""
    if p.n != c.n:
        raise DimensionError(f"Pauli on {p.n} qubits, circuit has {c.n}")
    layers = [0] * (c.depth + 1)
    layers[_layer_index(half_level, c.depth)] = p.vec
    return FaultOperator(c.n, c.depth, tuple(layers))


def fault_commutator(f: FaultOperator, g: FaultOperator) -> int:
    """Sum over layers of the layer-wise commutators, mod 2."""
    f._check(g)
    n = f.n
    out = 0
    for a, b in zip(f.layers, g.layers):
        if a and b:
            out ^= form(a, b, n)
    return out


def _check_circuit(c: Circuit, f: FaultOperator) -> None:
    if (f.n, f.depth) != (c.n, c.depth):
        raise DimensionError(
            f"fault operator shape {(f.n, f.depth)} does not match circuit {(c.n, c.depth)}"
        )


def cumulant(c: Circuit, f: FaultOperator) -> FaultOperator:
    """Forward accumulation: layer ``l`` becomes the net error after the first ``l`` levels."""
    _check_circuit(c, f)
    out = list(f.layers)
    for level in range(1, c.depth + 1):
        e = out[level - 1]
        if e:
            out[level] ^= c.level_unitary(level).conjugate_vec(e)
    return FaultOperator(c.n, c.depth, tuple(out))


def back_cumulant(c: Circuit, f: FaultOperator) -> FaultOperator:
    """Backward accumulation through the inverse level unitaries."""
    _check_circuit(c, f)
    out = list(f.layers)
    for level in range(c.depth, 0, -1):
        e = out[level]
        if e:
            out[level - 1] ^= c.level_unitary_inverse(level).conjugate_vec(e)
    return FaultOperator(c.n, c.depth, tuple(out))


def cumulant_explicit(c: Circuit, f: FaultOperator) -> FaultOperator:
    """Closed form: layer l is the product over i <= l of U_{i,l} F_i U_{i,l}^-1."""
    _check_circuit(c, f)
    out = []
    for l in range(c.depth + 1):
        acc = 0
        for i in range(l + 1):
            if f.layers[i]:
                acc ^= c.window_unitary(i, l).conjugate_vec(f.layers[i])
        out.append(acc)
    return FaultOperator(c.n, c.depth, tuple(out))


def back_cumulant_explicit(c: Circuit, f: FaultOperator) -> FaultOperator:
    """Closed form: layer l is the product over j >= l of U_{l,j}^-1 F_j U_{l,j}."""
    _check_circuit(c, f)
    out = []
    for l in range(c.depth + 1):
        acc = 0
        for j in range(l, c.depth + 1):
            if f.layers[j]:
                inv = _window_inverse(c, l, j)
                acc ^= inv.conjugate_vec(f.layers[j])
        out.append(acc)
    return FaultOperator(c.n, c.depth, tuple(out))


def _window_inverse(c: Circuit, i: int, j: int):
    key = ("window_inverse", i, j)
    hit = c._cache.get(key)
    if hit is None:
        hit = c.window_unitary(i, j).inverse()
        c._cache[key] = hit
    return hit


@dataclass(frozen=True)
class Effect:
    f: int  # bit j set iff outcome j is flipped
    E: ProjPauli  # residual error on the output qubits


def effect(c: Circuit, fault: FaultOperator) -> Effect:
    acc = cumulant(c, fault)
    n = c.n
    flips = 0
    for meas in c.measurements:
        before = acc.layers[meas.level - 1]
        if before and form(before, meas.pauli.proj.vec, n):
            flips |= 1 << meas.index
    return Effect(flips, acc.layer(c.depth))


def flip_partner(p: ProjPauli) -> ProjPauli:
    """Weight-one Pauli anticommuting with ``p``: X on its lowest support qubit unless
    ``p`` is X there, in which case Z."""
    q = min(gf2.bits(p.x | p.z))
    letter = "Z" if p.letter(q) == "X" else "X"
    return ProjPauli.single(p.n, q, letter)


def measurement_flip(c: Circuit, index: int) -> FaultOperator:
    """Fault operator flipping only the outcome of measurement ``index``."""
    meas = c.measurements[index]
    q = flip_partner(meas.pauli.proj).vec
    layers = [0] * (c.depth + 1)
    layers[meas.level - 1] ^= q
    layers[meas.level] ^= q
    return FaultOperator(c.n, c.depth, tuple(layers))


def measured_layers(c: Circuit, u: int, after: bool = False) -> FaultOperator:
    """Each measured operator with ``u_j = 1`` placed right before (or after) its level."""
    if u >> c.m:
        raise ValueError(f"check vector longer than {c.m} measurements")
    layers = [0] * (c.depth + 1)
    shift = 0 if after else -1
    for j in gf2.bits(u):
        meas = c.measurements[j]
        layers[meas.level + shift] ^= meas.pauli.proj.vec
    return FaultOperator(c.n, c.depth, tuple(layers))


def check_operator(c: Circuit, u: int) -> FaultOperator:
    """Back-cumulant of the measured operators selected by ``u``."""
    return back_cumulant(c, measured_layers(c, u))


def check_operator_forward(c: Circuit, u: int) -> FaultOperator:
    """Cumulant of the measured operators placed right after their level."""
    return cumulant(c, measured_layers(c, u, after=True))


def product(faults: Iterable[FaultOperator], n: int, depth: int) -> FaultOperator:
    out = FaultOperator.identity(n, depth)
    for f in faults:
        out = out * f
    return out

"""Pauli operators and Clifford tableaux in binary symplectic form.

Qubit ``q`` of an ``n``-qubit operator is bit ``q`` of the ``x`` and ``z``
integers. A :class:`PhasedPauli` stores ``i**phase * prod_q X_q^x_q Z_q^z_q``;
the phase is tracked mod 4 but only the sign of Hermitian operators is exposed
in text form.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

from .gf2 import bits, parity


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


def _check_n(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"qubit count mismatch: {a} != {b}")


@dataclass(frozen=True, slots=True)
class ProjPauli:
    """A Pauli operator up to phase."""

    n: int
    x: int = 0
    z: int = 0

    @classmethod
    def identity(cls, n: int) -> ProjPauli:
        return cls(n, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> ProjPauli:
        if not 0 <= qubit < n:
            raise IndexError(f"qubit {qubit} out of range for n={n}")
        x, z = _LETTER_BITS[letter]
        return cls(n, x << qubit, z << qubit)

    @classmethod
    def from_string(cls, text: str, n: int) -> ProjPauli:
        return PhasedPauli.from_string(text, n).proj

    def __mul__(self, other: ProjPauli) -> ProjPauli:
        _check_n(self.n, other.n)
        return ProjPauli(self.n, self.x ^ other.x, self.z ^ other.z)

    def __bool__(self) -> bool:
        return bool(self.x | self.z)

    def __str__(self) -> str:
        return _factors(self.n, self.x, self.z)

    @property
    def vec(self) -> int:
        """Symplectic vector packed as ``x | z << n``."""
        return self.x | (self.z << self.n)

    @classmethod
    def from_vec(cls, n: int, v: int) -> ProjPauli:
        mask = (1 << n) - 1
        return cls(n, v & mask, v >> n)

    def letter(self, qubit: int) -> str:
        return _BITS_LETTER[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def with_sign(self, negative: bool = False) -> PhasedPauli:
        """The Hermitian operator with this projective class and the given sign."""
        ny = (self.x & self.z).bit_count()
        return PhasedPauli(self, (ny + (2 if negative else 0)) % 4)


def commutator(a: ProjPauli, b: ProjPauli) -> int:
    """0 if ``a`` and ``b`` commute, 1 otherwise."""
    _check_n(a.n, b.n)
    return parity((a.x & b.z) ^ (a.z & b.x))


def restrict(p: ProjPauli, qubits: Iterable[int]) -> ProjPauli:
    """Set every tensor factor outside ``qubits`` to the identity."""
    mask = 0
    for q in qubits:
        if not 0 <= q < p.n:
            raise IndexError(f"qubit {q} out of range for n={p.n}")
        mask |= 1 << q
    return ProjPauli(p.n, p.x & mask, p.z & mask)


def weight(p: ProjPauli) -> int:
    return (p.x | p.z).bit_count()


def support(p: ProjPauli) -> list[int]:
    return bits(p.x | p.z)


@dataclass(frozen=True, slots=True)
class PhasedPauli:
    proj: ProjPauli
    phase: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.phase < 4:
            object.__setattr__(self, "phase", self.phase % 4)

    @property
    def n(self) -> int:
        return self.proj.n

    @classmethod
    def identity(cls, n: int) -> PhasedPauli:
        return cls(ProjPauli(n))

    @classmethod
    def from_string(cls, text: str, n: int) -> PhasedPauli:
        """Parse ``[+|-|+i|-i]`` followed by ``X0*Z3*Y7`` or ``I``."""
        m = _PAULI_RE.fullmatch(text.strip())
        if m is None:
            raise ValueError(f"malformed Pauli string {text!r}")
        coeff = _COEFF_EXP[m.group("coeff") or "+"]
        body = m.group("body")
        x = z = 0
        if body != "I":
            for factor in body.split("*"):
                factor = factor.strip()
                letter, qubit = factor[0], int(factor[1:])
                if not 0 <= qubit < n:
                    raise IndexError(f"qubit {qubit} out of range for n={n}")
                bit = 1 << qubit
                if (x | z) & bit:
                    raise ValueError(f"qubit {qubit} repeated in {text!r}")
                fx, fz = _LETTER_BITS[letter]
                x |= fx * bit
                z |= fz * bit
        ny = (x & z).bit_count()
        return cls(ProjPauli(n, x, z), (coeff + ny) % 4)

    def __mul__(self, other: PhasedPauli) -> PhasedPauli:
        a, b = self.proj, other.proj
        _check_n(a.n, b.n)
        # Z^z1 X^x2 = (-1)^(z1.x2) X^x2 Z^z1 on each qubit.
        swaps = (a.z & b.x).bit_count()
        phase = (self.phase + other.phase + 2 * swaps) % 4
        return PhasedPauli(ProjPauli(a.n, a.x ^ b.x, a.z ^ b.z), phase)

    def __neg__(self) -> PhasedPauli:
        return PhasedPauli(self.proj, (self.phase + 2) % 4)

    @property
    def coefficient_exp(self) -> int:
        """Exponent ``c`` with the operator equal to ``i**c`` times a product of X, Y, Z."""
        return (self.phase - (self.proj.x & self.proj.z).bit_count()) % 4

    def is_hermitian(self) -> bool:
        return self.coefficient_exp % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1; only defined for Hermitian operators."""
        c = self.coefficient_exp
        if c % 2:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if c == 0 else -1

    def __str__(self) -> str:
        return _EXP_COEFF[self.coefficient_exp] + _factors(self.n, self.proj.x, self.proj.z)


_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_COEFF_EXP = {"+": 0, "-": 2, "+i": 1, "-i": 3, "i": 1}
_EXP_COEFF = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PAULI_RE = re.compile(
    r"(?P<coeff>[+-]i?|i)?\s*(?P<body>I|[XYZ]\d+(?:\s*\*\s*[XYZ]\d+)*)"
)


def _factors(n: int, x: int, z: int) -> str:
    qubits = bits(x | z)
    if not qubits:
        return "I"
    return "*".join(
        _BITS_LETTER[((x >> q) & 1, (z >> q) & 1)] + str(q) for q in qubits
    )


class CliffordTableau:
    """A Clifford unitary ``U`` stored as the images ``U X_q U^-1`` and ``U Z_q U^-1``."""

    def __init__(
        self, n: int, x_images: Sequence[PhasedPauli], z_images: Sequence[PhasedPauli]
    ) -> None:
        if len(x_images) != n or len(z_images) != n:
            raise DimensionError("tableau needs one X and one Z image per qubit")
        for img in (*x_images, *z_images):
            _check_n(img.n, n)
        self.n = n
        self.x_images = tuple(x_images)
        self.z_images = tuple(z_images)

    @classmethod
    def identity(cls, n: int) -> CliffordTableau:
        return cls(
            n,
            [PhasedPauli(ProjPauli.single(n, q, "X")) for q in range(n)],
            [PhasedPauli(ProjPauli.single(n, q, "Z")) for q in range(n)],
        )

    @classmethod
    def from_strings(cls, n: int, images: Mapping[str, str]) -> CliffordTableau:
        """Build from ``{"X0": "+Z0", "Z0": "+X0", ...}``; missing generators map to themselves."""
        t = cls.identity(n)
        xs, zs = list(t.x_images), list(t.z_images)
        for key, value in images.items():
            key = key.strip()
            if not re.fullmatch(r"[XZ]\d+", key):
                raise ValueError(f"bad tableau generator {key!r}")
            q = int(key[1:])
            if not 0 <= q < n:
                raise IndexError(f"tableau generator {key} out of range for n={n}")
            img = PhasedPauli.from_string(value, n)
            (xs if key[0] == "X" else zs)[q] = img
        out = cls(n, xs, zs)
        problem = out.defect()
        if problem:
            raise ValueError(f"not a Clifford tableau: {problem}")
        return out

    def defect(self) -> str | None:
        """Describe why the images fail to define a Clifford unitary, or None."""
        gens = [*self.x_images, *self.z_images]
        for img in gens:
            if not img.is_hermitian():
                return f"image {img} is not Hermitian"
            if not img.proj:
                return "an image is the identity"
        n = self.n
        for i in range(2 * n):
            for j in range(i + 1, 2 * n):
                want = 1 if j == i + n else 0
                if commutator(gens[i].proj, gens[j].proj) != want:
                    return f"images {gens[i]} and {gens[j]} break the commutation relations"
        return None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return (
            self.n == other.n
            and self.x_images == other.x_images
            and self.z_images == other.z_images
        )

    def __hash__(self) -> int:
        return hash((self.n, self.x_images, self.z_images))

    def __repr__(self) -> str:
        parts = [f"X{q}->{img}" for q, img in enumerate(self.x_images)]
        parts += [f"Z{q}->{img}" for q, img in enumerate(self.z_images)]
        return f"CliffordTableau({', '.join(parts)})"

    def is_identity(self) -> bool:
        return self == CliffordTableau.identity(self.n)

    @cached_property
    def _proj_images(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (
            tuple(img.proj.vec for img in self.x_images),
            tuple(img.proj.vec for img in self.z_images),
        )

    def conjugate_vec(self, v: int) -> int:
        """Projective conjugation on a packed symplectic vector."""
        n = self.n
        xi, zi = self._proj_images
        out = 0
        xs = v & ((1 << n) - 1)
        zs = v >> n
        while xs:
            low = xs & -xs
            out ^= xi[low.bit_length() - 1]
            xs ^= low
        while zs:
            low = zs & -zs
            out ^= zi[low.bit_length() - 1]
            zs ^= low
        return out

    def conjugate_proj(self, p: ProjPauli) -> ProjPauli:
        _check_n(self.n, p.n)
        return ProjPauli.from_vec(self.n, self.conjugate_vec(p.vec))

    def inverse(self) -> CliffordTableau:
        return invert(self)


def conjugate(t: CliffordTableau, p: PhasedPauli) -> PhasedPauli:
    """Return ``U p U^-1`` with exact phase."""
    _check_n(t.n, p.n)
    out = PhasedPauli(ProjPauli(t.n), p.phase)
    for q in range(t.n):
        if (p.proj.x >> q) & 1:
            out = out * t.x_images[q]
        if (p.proj.z >> q) & 1:
            out = out * t.z_images[q]
    return out


def compose(a: CliffordTableau, b: CliffordTableau) -> CliffordTableau:
    """Tableau of ``b @ a``: conjugate by ``a`` first, then by ``b``."""
    _check_n(a.n, b.n)
    return CliffordTableau(
        a.n,
        [conjugate(b, img) for img in a.x_images],
        [conjugate(b, img) for img in a.z_images],
    )


def invert(t: CliffordTableau) -> CliffordTableau:
    n = t.n
    xi, zi = t._proj_images

    def preimage(g: PhasedPauli) -> PhasedPauli:
        # [P, Z_k] = [U P U^-1, U Z_k U^-1] fixes x_k(P); likewise for z_k(P).
        gv = g.proj
        x = z = 0
        for k in range(n):
            if commutator(gv, ProjPauli.from_vec(n, zi[k])):
                x |= 1 << k
            if commutator(gv, ProjPauli.from_vec(n, xi[k])):
                z |= 1 << k
        candidate = ProjPauli(n, x, z).with_sign(False)
        image = conjugate(t, candidate)
        if image.proj != gv:
            raise ValueError("tableau is not invertible")
        return candidate if image.phase == g.phase else -candidate

    ident = CliffordTableau.identity(n)
    return CliffordTableau(
        n,
        [preimage(g) for g in ident.x_images],
        [preimage(g) for g in ident.z_images],
    )


def embed(local: CliffordTableau, qubits: Sequence[int], n: int) -> CliffordTableau:
    """Place a ``len(qubits)``-qubit tableau on the given qubits of an ``n``-qubit register."""
    return embed_many([(local, qubits)], n)


def embed_many(
    parts: Iterable[tuple[CliffordTableau, Sequence[int]]], n: int
) -> CliffordTableau:
    """Tensor product of local tableaux acting on disjoint qubit sets."""
    base = CliffordTableau.identity(n)
    xs, zs = list(base.x_images), list(base.z_images)
    used = 0
    for local, qubits in parts:
        if local.n != len(qubits):
            raise DimensionError("local tableau size does not match its qubit list")
        for q in qubits:
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} out of range for n={n}")
            if (used >> q) & 1:
                raise ValueError(f"qubit {q} used twice")
            used |= 1 << q

        def lift(img: PhasedPauli) -> PhasedPauli:
            x = z = 0
            for i, q in enumerate(qubits):
                x |= ((img.proj.x >> i) & 1) << q
                z |= ((img.proj.z >> i) & 1) << q
            return PhasedPauli(ProjPauli(n, x, z), img.phase)

        for i, q in enumerate(qubits):
            xs[q] = lift(local.x_images[i])
            zs[q] = lift(local.z_images[i])
    return CliffordTableau(n, xs, zs)


_GATE_IMAGES: dict[str, tuple[int, dict[str, str]]] = {
    "I": (1, {}),
    "X": (1, {"Z0": "-Z0"}),
    "Y": (1, {"X0": "-X0", "Z0": "-Z0"}),
    "Z": (1, {"X0": "-X0"}),
    "H": (1, {"X0": "+Z0", "Z0": "+X0"}),
    "S": (1, {"X0": "+Y0"}),
    "S_DAG": (1, {"X0": "-Y0"}),
    "SQRT_X": (1, {"Z0": "-Y0"}),
    "SQRT_X_DAG": (1, {"Z0": "+Y0"}),
    "CX": (2, {"X0": "+X0*X1", "Z1": "+Z0*Z1"}),
    "CZ": (2, {"X0": "+X0*Z1", "X1": "+Z0*X1"}),
    "SWAP": (2, {"X0": "+X1", "Z0": "+Z1", "X1": "+X0", "Z1": "+Z0"}),
}

GATES: dict[str, CliffordTableau] = {
    name: CliffordTableau.from_strings(arity, images)
    for name, (arity, images) in _GATE_IMAGES.items()
}

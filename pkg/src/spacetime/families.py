"""Circuit generators: a repetition-code memory circuit and random Clifford circuits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Measurement, Operation, Unitary, parse_circuit
from .pauli import GATES, CliffordTableau, PhasedPauli, ProjPauli, compose, embed
from .propagation import FaultOperator

_ONE_QUBIT = ("I", "X", "Y", "Z", "H", "S", "S_DAG", "SQRT_X", "SQRT_X_DAG")
_TWO_QUBIT = ("CX", "CZ", "SWAP")


def repetition_code_text(rounds: int = 2) -> str:
    """Bit-flip code on data qubits 0-2 with ancillas 3, 4 re-initialized by Z measurement."""
    lines = ["# 3-qubit bit-flip repetition code, data 0 1 2, ancillas 3 4", "QUBITS 5"]
    for r in range(rounds):
        if r:
            lines.append("TICK")
        lines += [
            "M Z3", "M Z4", "TICK",
            "CX 0 3", "CX 1 4", "TICK",
            "CX 1 3", "CX 2 4", "TICK",
            "M Z3", "M Z4",
        ]
    return "\n".join(lines) + "\n"


def repetition_code_circuit(rounds: int = 2) -> Circuit:
    return parse_circuit(repetition_code_text(rounds))


@dataclass(frozen=True)
class RandomCircuitConfig:
    n: int = 3
    depth: int = 4
    p_measure: float = 0.35  # chance that an operation is a measurement
    p_idle: float = 0.2  # chance that a free qubit stays idle at a level
    max_measure_weight: int = 2
    max_measurements: int | None = None
    p_tableau: float = 0.15  # two-qubit unitaries emitted as random tableau literals
    p_z_measure: float = 0.0  # chance that a measurement is Z on every qubit of its support


def _random_pauli(
    rng: np.random.Generator, qubits: list[int], n: int, z_only: bool = False
) -> PhasedPauli:
    if z_only:
        return ProjPauli(n, 0, sum(1 << q for q in qubits)).with_sign(bool(rng.integers(2)))
    while True:
        x = z = 0
        for q in qubits:
            letter = int(rng.integers(4))
            x |= (letter & 1) << q
            z |= (letter >> 1) << q
        if x | z:
            break
    proj = ProjPauli(n, x, z)
    return proj.with_sign(bool(rng.integers(2)))


def _random_two_qubit_tableau(rng: np.random.Generator):
    t = CliffordTableau.identity(2)
    for _ in range(6):
        if rng.random() < 0.5:
            g = embed(GATES[_ONE_QUBIT[int(rng.integers(len(_ONE_QUBIT)))]], [int(rng.integers(2))], 2)
        else:
            g = GATES[_TWO_QUBIT[int(rng.integers(len(_TWO_QUBIT)))]]
        t = compose(t, g)
    return t


def random_circuit(rng: np.random.Generator, cfg: RandomCircuitConfig = RandomCircuitConfig()) -> Circuit:
    """Random leveled circuit; every level gets at least one operation so the depth is exact."""
    ops: list[Operation] = []
    m = 0
    for level in range(1, cfg.depth + 1):
        free = [int(q) for q in rng.permutation(cfg.n)]
        placed = 0
        while free:
            if placed and rng.random() < cfg.p_idle:
                free.pop()
                continue
            can_measure = cfg.max_measurements is None or m < cfg.max_measurements
            if can_measure and rng.random() < cfg.p_measure:
                w = int(rng.integers(1, min(cfg.max_measure_weight, len(free)) + 1))
                qubits = [free.pop() for _ in range(w)]
                z_only = rng.random() < cfg.p_z_measure
                ops.append(Measurement(_random_pauli(rng, qubits, cfg.n, z_only), level, m))
                m += 1
            elif len(free) >= 2 and rng.random() < 0.5:
                qubits = (free.pop(), free.pop())
                if rng.random() < cfg.p_tableau:
                    ops.append(Unitary(_random_two_qubit_tableau(rng), qubits, level))
                else:
                    name = _TWO_QUBIT[int(rng.integers(len(_TWO_QUBIT)))]
                    ops.append(Unitary(GATES[name], qubits, level, name))
            else:
                name = _ONE_QUBIT[int(rng.integers(len(_ONE_QUBIT)))]
                ops.append(Unitary(GATES[name], (free.pop(),), level, name))
            placed += 1
    return Circuit(cfg.n, tuple(ops))


def random_fault(rng: np.random.Generator, n: int, depth: int, density: float = 0.3) -> FaultOperator:
    """Each spacetime qubit independently carries a uniform non-identity Pauli with prob ``density``."""
    layers = []
    for _ in range(depth + 1):
        x = z = 0
        for q in range(n):
            if rng.random() < density:
                letter = int(rng.integers(1, 4))
                x |= (letter & 1) << q
                z |= (letter >> 1) << q
        layers.append(x | (z << n))
    return FaultOperator(n, depth, tuple(layers))

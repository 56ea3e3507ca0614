"""Shared strategies and circuit corpora for the test suite."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from spacetime.circuit import Circuit
from spacetime.families import RandomCircuitConfig, random_circuit, random_fault
from spacetime.outcome import compute_outcome_code, linearize
from spacetime.pauli import GATES, CliffordTableau, PhasedPauli, ProjPauli, compose, embed
from spacetime.propagation import FaultOperator
from spacetime.spacetime_code import build_spacetime_code


@st.composite
def proj_paulis(draw, n: int | None = None):
    if n is None:
        n = draw(st.integers(1, 6))
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    return ProjPauli(n, x, z)


@st.composite
def phased_paulis(draw, n: int | None = None, hermitian: bool = False):
    p = draw(proj_paulis(n))
    if hermitian:
        return p.with_sign(draw(st.booleans()))
    return PhasedPauli(p, draw(st.integers(0, 3)))


@st.composite
def tableaux(draw, n: int):
    """Random Clifford as a product of named gates on random targets."""
    t = CliffordTableau.identity(n)
    names = sorted(GATES)
    for _ in range(draw(st.integers(0, 8))):
        name = draw(st.sampled_from(names))
        g = GATES[name]
        if g.n > n:
            continue
        qubits = draw(st.permutations(range(n)))[: g.n]
        t = compose(t, embed(g, qubits, n))
    return t


@st.composite
def circuits(draw, max_n: int = 4, max_depth: int = 6, named_only: bool = False):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    cfg = RandomCircuitConfig(
        n=draw(st.integers(1, max_n)),
        depth=draw(st.integers(1, max_depth)),
        p_tableau=0.0 if named_only else 0.15,
    )
    return random_circuit(rng, cfg)


@st.composite
def circuit_and_faults(draw, count: int = 2, **kwargs):
    c = draw(circuits(**kwargs))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return c, [random_fault(rng, c.n, c.depth) for _ in range(count)]


def linear_pipeline(c: Circuit):
    lin = linearize(c)
    oc, group = compute_outcome_code(lin)
    return lin, oc, group, build_spacetime_code(lin, oc)


def corpus(seed: int, count: int, **cfg) -> list[Circuit]:
    """Deterministic list of random circuits."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = cfg.get("n") or int(rng.integers(1, cfg.get("max_n", 4) + 1))
        depth = cfg.get("depth") or int(rng.integers(1, cfg.get("max_depth", 6) + 1))
        c = random_circuit(
            rng,
            RandomCircuitConfig(
                n=n,
                depth=depth,
                p_tableau=cfg.get("p_tableau", 0.15),
                max_measurements=cfg.get("max_measurements"),
                p_measure=cfg.get("p_measure", 0.35),
                p_z_measure=cfg.get("p_z_measure", 0.0),
            ),
        )
        if cfg.get("min_measurements") and c.m < cfg["min_measurements"]:
            continue
        out.append(c)
    return out


def fault_from_vec(c: Circuit, v: int) -> FaultOperator:
    return FaultOperator.from_vec(c.n, c.depth, v)

import numpy as np
import pytest
from hypothesis import given, settings

from helpers import circuits, corpus
from oracles import reachable_outcomes
from spacetime import gf2
from spacetime.circuit import parse_circuit
from spacetime.outcome import (
    AugmentedStabilizer,
    OutcomeCheck,
    OutcomeCode,
    anticommuting_update,
    compute_outcome_code,
    linearize,
    membership_and_decompose,
    syndrome_O,
)
from spacetime.pauli import PhasedPauli, commutator
from spacetime.symplectic import form


def P(text, n=1):
    return PhasedPauli.from_string(text, n)


def rows(*texts, n=1):
    return [AugmentedStabilizer(P(t, n), 0) for t in texts]


def test_repeated_measurement():
    oc, group = compute_outcome_code(parse_circuit("QUBITS 1\nM Z0\nTICK\nM Z0"))
    assert oc.checks == (OutcomeCheck(0b11, 0),)
    assert [str(g) for g in group.generators] == ["+Z0"]


def test_affine_check_from_z_gate():
    c = parse_circuit("QUBITS 1\nM X0\nTICK\nZ 0\nTICK\nM X0")
    oc, _ = compute_outcome_code(c)
    assert oc.checks == (OutcomeCheck(0b11, 1),)
    lin = linearize(c)
    assert str(lin.measurements[1].pauli) == "-X0"
    assert compute_outcome_code(lin)[0].checks == (OutcomeCheck(0b11, 0),)


def test_bell_pair_checks():
    c = parse_circuit("QUBITS 2\nM Z0*Z1\nTICK\nM X0*X1\nTICK\nM Z0*Z1")
    oc, _ = compute_outcome_code(c)
    assert oc.checks == (OutcomeCheck(0b101, 0),)
    assert oc.k == 2


def test_membership_examples():
    assert membership_and_decompose(rows("Z0", "Z1", n=2), P("Z0*Z1", 2)) == (1, [0, 1])
    assert membership_and_decompose(rows("Z0", n=2), P("X0", 2)) is None
    assert membership_and_decompose(rows("+X0"), P("-X0")) == (-1, [0])


def test_anticommuting_update_examples():
    out = anticommuting_update(rows("Z0"), P("X0"))
    assert [str(r.op) for r in out] == ["+X0"]
    out = anticommuting_update(rows("Z0", "Z1", n=2), P("X0*X1", 2))
    assert {str(r.op.proj) for r in out} == {"Z0*Z1", "X0*X1"}
    out = anticommuting_update(rows("Z0*Z1", n=2), P("X0", 2))
    assert [str(r.op) for r in out] == ["+X0"]
    with pytest.raises(ValueError):
        anticommuting_update(rows("Z0"), P("Z0"))


def test_linearize_fixed_point_and_idempotent():
    c = parse_circuit("QUBITS 1\nM Z0\nTICK\nM Z0")
    assert linearize(c) == c
    c = parse_circuit("QUBITS 1\nM X0\nTICK\nZ 0\nTICK\nM X0")
    assert linearize(linearize(c)) == linearize(c)


def test_syndrome_examples():
    code = OutcomeCode(2, (OutcomeCheck(0b11, 0),))
    assert syndrome_O(code, 0b11) == [0]
    assert syndrome_O(code, 0b01) == [1]
    with pytest.raises(ValueError):
        syndrome_O(code, 0b1, length=3)


@given(circuits(max_n=4, max_depth=5, named_only=True))
@settings(max_examples=40, deadline=None)
def test_checks_match_exhaustive_branch_enumeration(c):
    # Oracle: dense state-vector simulation over every measurement branch.
    if c.m > 8:
        return
    oc, _ = compute_outcome_code(c)
    reach = reachable_outcomes(c)
    solutions = {o for o in range(1 << c.m) if oc.contains(o)}
    assert reach == solutions
    assert len(reach) == 2**oc.k


@given(circuits())
def test_checks_independent_and_nonzero(c):
    oc, group = compute_outcome_code(c)
    assert all(ch.u for ch in oc.checks)
    assert gf2.rank(ch.u for ch in oc.checks) == oc.r
    gens = [g.proj.vec for g in group.generators]
    assert gf2.rank(gens) == len(gens)
    assert all(form(a, b, c.n) == 0 for a in gens for b in gens)
    for a, b in group.logicals:
        assert commutator(a, b) == 1
        assert all(form(a.vec, g, c.n) == 0 and form(b.vec, g, c.n) == 0 for g in gens)
    assert len(gens) + len(group.logicals) == c.n


@given(circuits())
def test_linearize_only_flips_signs(c):
    lin = linearize(c)
    oc, _ = compute_outcome_code(lin)
    assert oc.is_linear
    for a, b in zip(c.ops, lin.ops):
        if hasattr(a, "pauli"):
            assert a.pauli.proj == b.pauli.proj
        else:
            assert a == b


def test_fault_free_frame_samples_satisfy_checks():
    from spacetime.decode import simulate_outcomes
    from spacetime.propagation import FaultOperator

    for c in corpus(11, 10):
        c = linearize(c)
        oc, _ = compute_outcome_code(c)
        rng = np.random.default_rng(0)
        ident = FaultOperator.identity(c.n, c.depth)
        for _ in range(100):
            assert oc.contains(simulate_outcomes(c, oc, ident, rng))

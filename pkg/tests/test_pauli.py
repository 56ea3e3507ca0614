import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import phased_paulis, proj_paulis, tableaux
from oracles import GATE_MATRICES, embed_matrix, pauli_matrix
from spacetime.pauli import (
    GATES,
    CliffordTableau,
    DimensionError,
    PhasedPauli,
    ProjPauli,
    commutator,
    compose,
    conjugate,
    embed,
    invert,
    restrict,
    support,
    weight,
)


def P(text, n=1):
    return PhasedPauli.from_string(text, n)


def Q(text, n=1):
    return ProjPauli.from_string(text, n)


def test_product_x_times_z_is_minus_iy():
    assert P("X0") * P("Z0") == P("-iY0")


def test_hermitian_square_is_identity():
    for text in ("X0", "-Y0", "+Z0"):
        sq = P(text) * P(text)
        assert not sq.proj and sq.phase == 0


def test_tensor_product_rule():
    assert P("X0*Z1", 2) * P("Z0*Z1", 2) == P("-iY0", 2)


def test_product_dimension_mismatch():
    with pytest.raises(DimensionError):
        P("X0") * P("X0", 2)


@pytest.mark.parametrize(
    "a, b, n, expected",
    [("X0", "Z0", 1, 1), ("X0*X1", "Z0*Z1", 2, 0), ("Y0", "X0*X1", 2, 1)],
)
def test_commutator_examples(a, b, n, expected):
    assert commutator(Q(a, n), Q(b, n)) == expected


def test_commutator_dimension_mismatch():
    with pytest.raises(DimensionError):
        commutator(Q("X0"), Q("X0", 2))


def test_named_gate_actions():
    assert conjugate(GATES["H"], P("X0")) == P("+Z0")
    assert conjugate(GATES["CX"], P("X0", 2)) == P("+X0*X1", 2)
    assert conjugate(GATES["S"], P("X0")) == P("+Y0")
    assert conjugate(invert(GATES["S"]), P("Y0")) == P("+X0")


def test_compose_self_inverse_gates():
    assert compose(GATES["H"], GATES["H"]).is_identity()
    assert compose(GATES["CX"], GATES["CX"]).is_identity()


def test_restrict_examples():
    p = Q("X0*Z1*Y2", 3)
    assert restrict(p, {0, 2}) == Q("X0*Y2", 3)
    assert restrict(p, range(3)) == p
    assert restrict(p, set()) == ProjPauli.identity(3)
    with pytest.raises(IndexError):
        restrict(p, {3})


def test_weight_and_support():
    assert weight(ProjPauli.identity(2)) == 0
    assert weight(Q("X0*Y1", 2)) == 2
    assert support(Q("Z1", 3)) == [1]


def test_text_round_trip_and_canonical_order():
    p = P("-Z3*X0", 4)
    assert str(p) == "-X0*Z3"
    assert P(str(p), 4) == p
    assert str(ProjPauli.identity(2)) == "I"


def test_tableau_literal_must_be_clifford():
    with pytest.raises(ValueError):
        CliffordTableau.from_strings(1, {"X0": "+X0", "Z0": "+X0"})


@pytest.mark.parametrize("name", sorted(GATES))
def test_gate_tableau_matches_matrix(name):
    # Oracle: U P U^dagger computed with dense matrices, phases included.
    t = GATES[name]
    U = GATE_MATRICES[name]
    for q in range(t.n):
        for letter in "XYZ":
            p = P(f"{letter}{q}", t.n)
            dense = U @ pauli_matrix(str(p), t.n) @ U.conj().T
            assert np.allclose(dense, pauli_matrix(str(conjugate(t, p)), t.n))


@given(st.data())
def test_random_tableau_matches_matrix(data):
    n = data.draw(st.integers(1, 3))
    names = sorted(GATES)
    t = CliffordTableau.identity(n)
    U = np.eye(2**n, dtype=complex)
    for _ in range(data.draw(st.integers(0, 6))):
        g = data.draw(st.sampled_from(names))
        if GATES[g].n > n:
            continue
        qubits = tuple(data.draw(st.permutations(range(n)))[: GATES[g].n])
        t = compose(t, embed(GATES[g], qubits, n))
        U = embed_matrix(GATE_MATRICES[g], qubits, n) @ U
    p = data.draw(phased_paulis(n, hermitian=True))
    dense = U @ pauli_matrix(str(p), n) @ U.conj().T
    assert np.allclose(dense, pauli_matrix(str(conjugate(t, p)), n))


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(proj_paulis(n), proj_paulis(n), proj_paulis(n))))
def test_commutator_bilinear(abc):
    a, b, c = abc
    assert commutator(a, b * c) == commutator(a, b) ^ commutator(a, c)
    assert commutator(a, b) == commutator(b, a)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(tableaux(n), phased_paulis(n), phased_paulis(n))))
def test_conjugation_preserves_commutators_and_inverts(tpq):
    t, p, q = tpq
    cp, cq = conjugate(t, p), conjugate(t, q)
    assert commutator(p.proj, q.proj) == commutator(cp.proj, cq.proj)
    assert conjugate(invert(t), cp) == p
    assert conjugate(t, p * q) == cp * cq


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(tableaux(n), tableaux(n), tableaux(n))))
def test_compose_associative(abc):
    a, b, c = abc
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    assert compose(a, invert(a)).is_identity()
    assert a.defect() is None


@given(phased_paulis(hermitian=True))
def test_hermitian_square_phase_zero(p):
    sq = p * p
    assert sq.phase == 0 and not sq.proj

from pathlib import Path

import numpy as np
import pytest
import scipy.io
from hypothesis import given, settings, strategies as st

from helpers import circuits, linear_pipeline
from spacetime import gf2
from spacetime.circuit import parse_circuit
from spacetime.families import repetition_code_circuit
from spacetime.outcome import compute_outcome_code, syndrome_bits
from spacetime.pauli import DimensionError, ProjPauli
from spacetime.propagation import (
    FaultOperator,
    check_operator,
    check_operator_forward,
    cumulant,
    effect,
    eta,
    fault_commutator,
)
from spacetime.spacetime_code import (
    NonLinearCodeError,
    _g_operator,
    build_spacetime_code,
    code_json,
    column_labels,
    commutation_violations,
    export_check_matrix,
    generated_rank,
    logical_families,
    logical_generators,
    read_alist,
    syndrome_Q,
    syndrome_Q_bits,
    to_sparse,
    write_alist,
    write_matrix_market,
)

CIRCUITS = Path(__file__).resolve().parent.parent / "circuits"


def Q(text, n=1):
    return ProjPauli.from_string(text, n)


def two_z():
    return linear_pipeline(parse_circuit("QUBITS 1\nM Z0\nTICK\nM Z0"))


def test_two_z_parameters_and_syndromes():
    c, oc, _, code = two_z()
    assert (code.N, code.K, code.r) == (3, 2, 1)
    assert [str(s) for s in code.stabilizers] == ["1.5:Z0"]
    assert syndrome_Q(code, eta(c, 1.5, Q("X0"))) == [1]
    assert syndrome_Q(code, eta(c, 0.5, Q("Y0"))) == [0]
    assert syndrome_Q(code, code.stabilizers[0]) == [0]
    with pytest.raises(DimensionError):
        syndrome_Q(code, FaultOperator.identity(2, 2))


def test_no_redundancy_gives_empty_code():
    c, oc, _, code = linear_pipeline(parse_circuit("QUBITS 2\nM Z0\nTICK\nM X1"))
    assert code.r == 0 and code.K == code.N == 6
    assert export_check_matrix(code) == []
    assert generated_rank(logical_generators(c, oc)) == 2 * code.K


def test_affine_code_is_rejected():
    c = parse_circuit((CIRCUITS / "affine_x.txt").read_text())
    oc, _ = compute_outcome_code(c)
    with pytest.raises(NonLinearCodeError):
        build_spacetime_code(c, oc)


def test_three_outcome_check_gives_weight_four_generator():
    # Depth 3, single check o1 + o2 + o3 = 0.
    c, oc, _, code = linear_pipeline(parse_circuit((CIRCUITS / "triangle.txt").read_text()))
    assert [ch.u for ch in oc.checks] == [0b111]
    assert [str(s) for s in code.stabilizers] == ["1.5:Z0*Z1;2.5:Z0*Z2"]
    assert code.stabilizers[0].weight == 4


def test_repetition_code_generators():
    c, oc, _, code = linear_pipeline(repetition_code_circuit())
    assert (c.n, c.depth, c.m, oc.k, code.r, code.N, code.K) == (5, 8, 8, 4, 4, 45, 41)
    assert sorted(s.weight for s in code.stabilizers) == [1, 1, 15, 15]
    # Every element of the 16-element group, by weight; the round comparison costs at least 14.
    N = code.N
    acc_vecs = [0]
    for s in code.stabilizers:
        acc_vecs += [v ^ s.vec for v in acc_vecs]
    weights = sorted(((v & ((1 << N) - 1)) | (v >> N)).bit_count() for v in acc_vecs)
    assert weights == [0, 1, 1, 2, 14, 14, 15, 15, 15, 15, 16, 16, 22, 23, 23, 24]


def test_export_column_indexing():
    c = parse_circuit("QUBITS 1\nM Z0\nTICK\nM Z0")
    f = eta(c, 1.5, Q("Z0"))
    assert gf2.bits(f.vec) == [3 + 1]
    labels = column_labels(1, 2)
    assert labels[4] == "Z(1.5,0)"
    assert labels[:3] == ["X(0.5,0)", "X(1.5,0)", "X(2.5,0)"]


def test_alist_format_and_round_trip():
    rows = [[0, 4], [1], [4, 5]]
    text = write_alist(rows, 6)
    lines = text.splitlines()
    assert lines[0] == "6 3"
    assert lines[1] == "2 2"
    assert lines[2] == "1 1 0 0 2 1"
    assert lines[3] == "2 1 2"
    assert lines[4 + 4] == "1 3"
    assert lines[4 + 6 + 1] == "2 0"
    assert read_alist(text) == rows


@given(st.lists(st.lists(st.integers(0, 15), unique=True, max_size=5).map(sorted), max_size=6))
def test_alist_round_trip_property(rows):
    assert read_alist(write_alist(rows, 16)) == rows


def test_matrix_market_matches_rows():
    import io

    rows = [[0, 4], [1], [4, 5]]
    text = write_matrix_market(rows, 6)
    assert text.startswith("%%MatrixMarket matrix coordinate integer general")
    dense = scipy.io.mmread(io.StringIO(text)).toarray()
    assert np.array_equal(dense, to_sparse(rows, 6).toarray())
    assert dense.shape == (3, 6)


def test_code_json_fields():
    import json

    _, _, _, code = two_z()
    payload = json.loads(code_json(code))
    assert payload["schema_version"] == 1
    assert payload["N"] == 3 and payload["K"] == 2 and payload["r"] == 1
    assert payload["stabilizers"] == ["1.5:Z0"]


@given(circuits())
def test_structure(c):
    c, oc, _, code = linear_pipeline(c)
    assert commutation_violations(code) == []
    assert generated_rank(code.stabilizers) == code.r == c.m - oc.k
    assert code.K == code.N - (c.m - oc.k)
    for u, s in zip(code.checks, code.stabilizers):
        assert s == check_operator_forward(c, u)
        assert s.layers[0] == 0
        assert syndrome_bits(oc, effect(c, s).f) == 0


@given(circuits(max_n=3, max_depth=5))
@settings(deadline=None)
def test_logical_generators(c):
    c, oc, _, code = linear_pipeline(c)
    output, level_ops, codeword_ops = logical_families(c, oc)
    logicals = output + level_ops + codeword_ops
    assert generated_rank([*code.stabilizers, *logicals]) == 2 * code.K + code.r
    assert all(syndrome_Q_bits(code, f) == 0 for f in logicals)
    for g in level_ops:
        layer = next(i for i, v in enumerate(g.layers) if v)
        expect = [0] * (c.depth + 1)
        expect[layer] = g.layers[layer]
        assert cumulant(c, g) == FaultOperator(c.n, c.depth, tuple(expect))
    for level in range(1, c.depth + 1):
        if not any(m.level == level for m in c.measurements):
            full = [_g_operator(c, 1 << i, level) for i in range(2 * c.n)]
            assert gf2.rank([*(g.vec for g in level_ops), *(g.vec for g in full)]) == gf2.rank(
                g.vec for g in level_ops
            )


@given(circuits(max_n=3, max_depth=5), st.integers(0, 2**32 - 1))
@settings(deadline=None)
def test_check_and_codeword_pairing(c, seed):
    c, oc, _, code = linear_pipeline(c)
    _, _, codeword_ops = logical_families(c, oc)
    basis = oc.codeword_basis()
    rng = np.random.default_rng(seed)
    for _ in range(5):
        # Any u, not only checks: a check pairs to zero with every codeword.
        u = int(rng.integers(0, 1 << c.m)) if c.m else 0
        sel = rng.integers(0, 2, size=len(basis))
        v = 0
        lv = FaultOperator.identity(c.n, c.depth)
        for b, op, bit in zip(basis, codeword_ops, sel):
            if bit:
                v ^= b
                lv = lv * op
        assert fault_commutator(check_operator(c, u), lv) == gf2.parity(u & v)

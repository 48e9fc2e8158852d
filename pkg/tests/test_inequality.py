import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kscert import inequality
from kscert.incidence import CompatGraph, build_graph
from kscert.inequality import (
    InequalitySpec,
    bound_certificate,
    classical_max,
    classical_max_at,
    classical_value,
    edge_profile,
    expectation,
    observable,
    quantum_operator,
    sign_string,
    signs_of,
    upper_envelope,
    violation_window,
    word_of,
)
from kscert.rays import DensityMatrix, Operator

from _oracle import naive_max, naive_value
from _states import random_density_matrix

F = Fraction


def test_classical_value_examples(graph):
    assert classical_value(0, InequalitySpec(graph)) == F(9, 5)
    assert classical_value(0, InequalitySpec(graph, 0)) == 21
    zero_w = InequalitySpec(graph, 0, (0,) * 21)
    assert classical_value(12345, zero_w) == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, (1 << 21) - 1), st.fractions(-1, 1, max_denominator=20))
def test_classical_value_matches_naive(graph, word, k):
    spec = InequalitySpec(graph, k)
    assert classical_value(word, spec) == naive_value(signs_of(word, 21), spec.weights, graph.adjacent, k)


def test_word_encoding_round_trip():
    for word in (0, 1, 511, (1 << 21) - 1, 123456):
        assert word_of(signs_of(word, 21)) == word
    assert sign_string(511, 21) == "-" * 9 + "+" * 12


def test_classical_max_paper(graph):
    b = classical_max(InequalitySpec(graph))
    assert b.classical_max == F(63, 5)
    assert classical_value(b.first_witness, InequalitySpec(graph)) == F(63, 5)
    assert b.witness_count >= 1


def test_classical_max_trivial(graph):
    assert classical_max(InequalitySpec(graph, 0)).classical_max == 21
    assert classical_max(InequalitySpec(graph, 0)).first_witness == 0
    empty = CompatGraph.from_edges(21, [])
    assert classical_max(InequalitySpec(empty)).classical_max == 21


@pytest.fixture(scope="module")
def cube(graph):
    """Unit-weight linear and edge sums for every word, computed in one shot."""
    words = np.arange(1 << 21, dtype=np.int64)
    signs = (1 - 2 * ((words[:, None] >> np.arange(21)) & 1)).astype(np.int8)
    edges = np.array(graph.edges())
    quad = (signs[:, edges[:, 0]] * signs[:, edges[:, 1]]).sum(axis=1, dtype=np.int64)
    lin = signs.sum(axis=1, dtype=np.int64)
    return lin, quad


def _full_cube_values(cube, k):
    lin, quad = cube
    return lin, quad, lin * k.denominator - 2 * k.numerator * quad


@pytest.mark.parametrize("k", [F(1, 5), F(1, 8), F(3, 16), F(1, 3)])
def test_sign_symmetry_maximizer_has_nonnegative_sum(graph, cube, k):
    lin, _, vals = _full_cube_values(cube, k)
    top = vals.max()
    assert F(int(top), k.denominator) == classical_max(InequalitySpec(graph, k)).classical_max
    assert (lin[vals == top] >= 0).any()


def test_witness_count_and_first_witness_by_full_enumeration(graph, cube):
    k = F(1, 5)
    _, _, vals = _full_cube_values(cube, k)
    hits = np.flatnonzero(vals == vals.max())
    b = classical_max(InequalitySpec(graph, k))
    assert b.witness_count == len(hits) and b.first_witness == hits[0]


def _random_sub(config, rng, size):
    ids = rng.sample(range(21), size)
    sub = config.subset(ids)
    return sub, build_graph(sub)


def test_sub_configurations_match_oracle(config):
    rng = random.Random(11)
    for _ in range(10):
        sub, g = _random_sub(config, rng, rng.randint(1, 9))
        weights = tuple(F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(len(sub)))
        k = F(rng.randint(-3, 6), rng.randint(1, 10))
        spec = InequalitySpec(g, k, weights)
        b = classical_max(spec)
        assert (b.classical_max, b.witness_count, b.first_witness) == naive_max(weights, g.adjacent, k)


def test_parallel_matches_serial(graph, monkeypatch):
    spec = InequalitySpec(graph, F(3, 16))
    serial = classical_max(spec)
    for workers in (2, 5):
        assert classical_max(spec, workers=workers) == serial
    monkeypatch.setattr(inequality, "CHUNK", 1 << 8)
    rng = random.Random(5)
    g = CompatGraph.from_edges(12, [(i, j) for i in range(12) for j in range(i + 1, 12) if rng.random() < 0.3])
    spec = InequalitySpec(g, F(1, 5), tuple(F(rng.randint(1, 5), rng.randint(1, 2)) for _ in range(12)))
    serial = classical_max(spec)
    assert classical_max(spec, workers=5) == serial
    w = spec.weights
    assert (serial.classical_max, serial.witness_count, serial.first_witness) == naive_max(w, g.adjacent, spec.k)


def test_overflow_is_reported(graph):
    spec = InequalitySpec(graph, F(1, 5), (F(1 << 60),) * 21)
    with pytest.raises(OverflowError):
        classical_max(spec)


def test_observable_spectrum(config):
    for r in config.rays:
        a = observable(r)
        assert a @ a == Operator.identity()
        assert a.trace() == 1  # eigenvalues 1, 1, -1
        assert a.is_hermitian()


def test_quantum_operator_paper(config, graph):
    q = quantum_operator(InequalitySpec(graph), config)
    assert q.is_scalar and q.scalar == F(67, 5)
    assert q.op == Operator.scalar(F(67, 5))
    assert quantum_operator(InequalitySpec(graph, 0), config).scalar == 7


def test_quantum_operator_general_k(config, graph):
    rng = random.Random(2)
    for _ in range(5):
        k = F(rng.randint(-50, 50), rng.randint(1, 50))
        q = quantum_operator(InequalitySpec(graph, k), config)
        assert q.op - Operator.scalar(7 + 32 * k) == Operator.zeros()


def test_quantum_quadratic_part_identity(config, graph):
    ops = [observable(r) for r in config.rays]
    acc = Operator.zeros()
    for i in range(21):
        for j in range(21):
            if graph.adjacent(i, j):
                acc = acc + ops[i] @ ops[j]
    assert acc == Operator.scalar(-32)


def test_expectation(config, graph):
    spec = InequalitySpec(graph)
    assert expectation(DensityMatrix.maximally_mixed(), spec, config) == F(67, 5)
    for r in config.rays:
        assert expectation(DensityMatrix.pure(r), spec, config) == F(67, 5)
    assert expectation(DensityMatrix.maximally_mixed(), InequalitySpec(graph, 0), config) == 7
    rng = random.Random(9)
    for _ in range(5):
        assert expectation(random_density_matrix(rng), spec, config) == F(67, 5)


def test_weighted_operator_not_scalar(config, graph):
    w = [1] * 21
    w[3] = 2
    q = quantum_operator(InequalitySpec(graph, F(1, 5), w), config)
    assert not q.is_scalar
    cert = bound_certificate(InequalitySpec(graph, F(1, 5), w), config)
    assert cert.to_json()["quantumState"] == "maximally-mixed"


def test_bound_certificate_json(config, graph):
    out = bound_certificate(InequalitySpec(graph), config).to_json()
    assert out["classicalMax"] == "63/5" and out["quantumValue"] == "67/5"
    assert out["violation"] is True and out["convention"] == "ordered-pairs"
    assert len(out["firstWitness"]) == 21 and set(out["firstWitness"]) <= {"+", "-"}


def test_window_paper(config, graph):
    w = violation_window(config, graph)
    assert (w.lower, w.upper, w.empty) == (F(1, 8), F(1, 4), False)
    assert (w.quantum_constant, w.quantum_slope) == (7, 32)
    ends = w.endpoint_behavior()
    assert ends["lower"]["relation"] == "equal" and ends["upper"]["relation"] == "equal"
    assert w.classical_at(F(1, 5)) == F(63, 5)
    assert w.quantum_at(F(1, 5)) - w.classical_at(F(1, 5)) == F(4, 5)


@pytest.mark.parametrize("k", [F(1, 8), F(1, 4)])
def test_window_endpoints_exhaustive(config, graph, k):
    b = bound_certificate(InequalitySpec(graph, k), config)
    assert b.classical.classical_max == b.quantum_value == 7 + 32 * k
    assert not b.violation


def test_profile_gives_exact_max(graph):
    prof = edge_profile(InequalitySpec(graph))
    rng = random.Random(4)
    ks = [F(0), F(1, 10), F(1, 6), F(1, 2), F(-1, 3)] + [F(rng.randint(-20, 40), rng.randint(1, 60)) for _ in range(5)]
    for k in ks:
        assert classical_max_at(prof, k) == classical_max(InequalitySpec(graph, k)).classical_max


def test_max_is_convex_piecewise_linear(graph):
    prof = edge_profile(InequalitySpec(graph))
    ks = [F(i, 40) for i in range(-5, 15)]
    m = [classical_max_at(prof, k) for k in ks]
    for a, b, c in zip(m, m[1:], m[2:]):
        assert 2 * b <= a + c


def test_envelope_agrees_with_profile(graph):
    prof = edge_profile(InequalitySpec(graph))
    pieces = upper_envelope(prof)
    assert pieces[0]["from"] is None and pieces[-1]["to"] is None
    for p, nxt in zip(pieces, pieces[1:]):
        assert p["to"] == nxt["from"]
    for p in pieces:
        lo = p["from"] if p["from"] is not None else p["to"] - 1
        hi = p["to"] if p["to"] is not None else p["from"] + 1
        for k in (lo, (lo + hi) / 2, hi):
            assert p["linearSum"] - 2 * k * p["edgeSum"] == classical_max_at(prof, k)


def test_window_on_subconfiguration_needs_state(config, graph):
    sub = config.subset(range(9, 21))  # the four bases alone
    g = build_graph(sub)
    w = violation_window(sub, g)
    # sum A_i = 12 - 2*4 = 4; each basis contributes sum_{i!=j} A_iA_j = 6 - 8 = -2
    assert (w.quantum_constant, w.quantum_slope) == (4, 8)
    for k in (F(0), F(1, 2), F(2), F(-1)):
        assert w.contains(k) == (w.quantum_at(k) > classical_max(InequalitySpec(g, k)).classical_max)
    with pytest.raises(ValueError):
        violation_window(config, graph, [2] + [1] * 20)
    w2 = violation_window(config, graph, [2] + [1] * 20, rho=DensityMatrix.maximally_mixed())
    assert w2.quantum_state == "given"

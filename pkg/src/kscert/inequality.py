"""The state-independent non-contextual inequality on the 21 observables.

For signs ``a_i`` in {+1, -1} the classical expression is

    C(a) = sum_i w_i a_i - k * sum_{i != j} G_ij a_i a_j
         = L(a) - 2k E(a),

with ``E(a)`` the sum of ``a_i a_j`` over unordered compatible pairs. The
double sum runs over ordered pairs, so each edge counts twice.

Sign assignments are 21-bit words: bit ``i`` set means ``a_i = -1``, so
word 0 is the all-plus assignment.

The exhaustive scan runs over chunks of the cube in fixed-width integers.
Everything is rescaled to integers first and the largest attainable
magnitude is checked against the int64 range before scanning.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .exact import format_rational, to_rational
from .incidence import CompatGraph
from .rays import Configuration, DensityMatrix, Operator, projector

CONVENTION = "ordered-pairs"
CHUNK = 1 << 16
_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class InequalitySpec:
    graph: CompatGraph
    k: Fraction = Fraction(1, 5)
    weights: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", to_rational(self.k))
        w = self.weights or (Fraction(1),) * self.graph.n
        w = tuple(to_rational(x) for x in w)
        if len(w) != self.graph.n:
            raise ValueError(f"need {self.graph.n} weights, got {len(w)}")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.graph.n

    def with_k(self, k: Fraction | int | str) -> InequalitySpec:
        return InequalitySpec(self.graph, to_rational(k), self.weights)


def signs_of(word: int, n: int) -> list[int]:
    return [-1 if word >> i & 1 else 1 for i in range(n)]


def word_of(signs: Sequence[int]) -> int:
    if any(s not in (1, -1) for s in signs):
        raise ValueError("signs must be +1 or -1")
    return sum(1 << i for i, s in enumerate(signs) if s == -1)


def sign_string(word: int, n: int) -> str:
    return "".join("-" if word >> i & 1 else "+" for i in range(n))


def classical_value(a: int | Sequence[int], spec: InequalitySpec) -> Fraction:
    """C(a), evaluated exactly with Fractions."""
    signs = signs_of(a, spec.n) if isinstance(a, int) else list(a)
    linear = sum((w * s for w, s in zip(spec.weights, signs)), Fraction(0))
    quad = sum(signs[i] * signs[j] for i, j in spec.graph.edges())
    return linear - 2 * spec.k * quad


# ---------------------------------------------------------------------------
# exhaustive scan


def _weight_scale(weights: Sequence[Fraction]) -> int:
    return math.lcm(*(w.denominator for w in weights)) if weights else 1


def _edge_arrays(graph: CompatGraph) -> tuple[np.ndarray, np.ndarray]:
    edges = graph.edges()
    ei = np.array([i for i, _ in edges], dtype=np.int64)
    ej = np.array([j for _, j in edges], dtype=np.int64)
    return ei, ej


def _signs_block(lo: int, hi: int, n: int) -> np.ndarray:
    words = np.arange(lo, hi, dtype=np.int64)
    bits = ((words[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int8)
    return 1 - 2 * bits


def _linear_and_edge_sums(signs: np.ndarray, w_int: np.ndarray, ei, ej) -> tuple[np.ndarray, np.ndarray]:
    lin = signs @ w_int
    if len(ei):
        quad = (signs[:, ei] * signs[:, ej]).sum(axis=1, dtype=np.int64)
    else:
        quad = np.zeros(len(signs), dtype=np.int64)
    return lin, quad


@dataclass(frozen=True)
class _Best:
    value: int
    count: int
    first: int

    def merge(self, other: _Best | None) -> _Best:
        if other is None:
            return self
        if self.value != other.value:
            return self if self.value > other.value else other
        return _Best(self.value, self.count + other.count, min(self.first, other.first))


def _scan_range(lo: int, hi: int, n: int, w_int, lin_scale: int, quad_coef: int, ei, ej) -> _Best | None:
    best = None
    for start in range(lo, hi, CHUNK):
        stop = min(hi, start + CHUNK)
        lin, quad = _linear_and_edge_sums(_signs_block(start, stop, n), w_int, ei, ej)
        vals = lin * lin_scale - quad * quad_coef
        top = int(vals.max())
        hits = np.flatnonzero(vals == top)
        chunk_best = _Best(top, int(len(hits)), start + int(hits[0]))
        best = chunk_best.merge(best)
    return best


def _partition(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total))
    step = -(-total // parts)
    return [(lo, min(total, lo + step)) for lo in range(0, total, step)]


@dataclass(frozen=True)
class ClassicalBound:
    classical_max: Fraction
    witness_count: int
    first_witness: int
    n: int

    @property
    def witness_string(self) -> str:
        return sign_string(self.first_witness, self.n)


def classical_max(spec: InequalitySpec, workers: int = 1) -> ClassicalBound:
    """Exact maximum of C over all 2**n sign assignments.

    The cube is split into ``workers`` contiguous blocks scanned in threads.
    The reduction keeps the maximum, sums the tie counts and keeps the
    smallest maximizing word, so the result does not depend on ``workers``.
    """
    n = spec.n
    if n > 30:
        raise ValueError(f"{n} observables is beyond exhaustive reach")
    scale = _weight_scale(spec.weights)
    w_int = np.array([int(w * scale) for w in spec.weights], dtype=np.int64)
    # C * scale * k.den = L_int * k.den - 2 * k.num * scale * E
    lin_scale = spec.k.denominator
    quad_coef = 2 * spec.k.numerator * scale
    nedges = len(spec.graph.edges())
    bound = sum(abs(int(x)) for x in w_int) * lin_scale + abs(quad_coef) * nedges
    if bound >= _INT64_SAFE or sum(abs(int(x)) for x in w_int) >= _INT64_SAFE:
        raise OverflowError("scaled inequality coefficients exceed the int64 scan range")
    ei, ej = _edge_arrays(spec.graph)
    blocks = _partition(1 << n, workers)
    if len(blocks) == 1:
        results = [_scan_range(0, 1 << n, n, w_int, lin_scale, quad_coef, ei, ej)]
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            results = list(
                pool.map(lambda b: _scan_range(b[0], b[1], n, w_int, lin_scale, quad_coef, ei, ej), blocks)
            )
    best = None
    for r in results:
        best = r.merge(best) if r is not None else best
    value = Fraction(best.value, scale * spec.k.denominator)
    if classical_value(best.first, spec) != value:
        raise RuntimeError("scan and exact re-evaluation disagree on the witness")
    return ClassicalBound(value, best.count, best.first, n)


@lru_cache(maxsize=16)
def _profile(rows: tuple[int, ...], weights: tuple[Fraction, ...]) -> tuple[tuple[int, Fraction], ...]:
    n = len(rows)
    graph = CompatGraph(n, rows)
    scale = _weight_scale(weights)
    w_int = np.array([int(w * scale) for w in weights], dtype=np.int64)
    if sum(abs(int(x)) for x in w_int) >= _INT64_SAFE:
        raise OverflowError("scaled weights exceed the int64 scan range")
    ei, ej = _edge_arrays(graph)
    m = len(ei)
    best_lin = np.full(2 * m + 1, np.iinfo(np.int64).min, dtype=np.int64)
    for start in range(0, 1 << n, CHUNK):
        stop = min(1 << n, start + CHUNK)
        lin, quad = _linear_and_edge_sums(_signs_block(start, stop, n), w_int, ei, ej)
        np.maximum.at(best_lin, quad + m, lin)
    seen = best_lin > np.iinfo(np.int64).min
    return tuple((int(e) - m, Fraction(int(best_lin[e]), scale)) for e in np.flatnonzero(seen))


def edge_profile(spec: InequalitySpec) -> list[tuple[int, Fraction]]:
    """For each attainable edge sum E, the largest linear sum L with that E.

    C(a) = L - 2kE, so these pairs determine the classical maximum for every k.
    """
    return list(_profile(spec.graph.rows, spec.weights))


def classical_max_at(profile: Iterable[tuple[int, Fraction]], k: Fraction) -> Fraction:
    return max(lin - 2 * k * e for e, lin in profile)


def upper_envelope(profile: Iterable[tuple[int, Fraction]]) -> list[dict]:
    """The pieces of k -> max(L - 2kE) over the real line, left to right.

    Each piece is ``{"from": k0 | None, "to": k1 | None, "edgeSum": E,
    "linearSum": L}``; None marks an unbounded end.
    """
    # lines y = L + s*k with slope s = -2E; as k -> -inf the smallest slope wins
    lines: dict[int, Fraction] = {}
    for e, lin in profile:
        s = -2 * e
        if s not in lines or lin > lines[s]:
            lines[s] = lin
    hull: list[tuple[int, Fraction]] = []
    for s, c in sorted(lines.items()):
        while len(hull) >= 2:
            (s1, c1), (s2, c2) = hull[-2], hull[-1]
            # drop the middle line if the new one overtakes line 1 no later than line 2 does
            if (c1 - c) * (s2 - s1) <= (c1 - c2) * (s - s1):
                hull.pop()
            else:
                break
        hull.append((s, c))
    pieces = []
    for idx, (s, c) in enumerate(hull):
        k0 = None if idx == 0 else (hull[idx - 1][1] - c) / (s - hull[idx - 1][0])
        k1 = None if idx == len(hull) - 1 else (c - hull[idx + 1][1]) / (hull[idx + 1][0] - s)
        pieces.append({"from": k0, "to": k1, "edgeSum": -s // 2, "linearSum": c})
    return pieces


# ---------------------------------------------------------------------------
# quantum side


def observable(ray) -> Operator:
    """1 - 2|psi><psi|, spectrum (1, 1, -1)."""
    return Operator.identity() - projector(ray).scale(2)


@dataclass(frozen=True)
class QuantumParts:
    """Q(k) = linear + k * quadratic as exact operators."""

    linear: Operator
    quadratic: Operator

    def at(self, k: Fraction) -> Operator:
        return self.linear + self.quadratic.scale(k)


@lru_cache(maxsize=16)
def _quantum_parts(config: Configuration, rows: tuple[int, ...], weights: tuple[Fraction, ...]) -> QuantumParts:
    ops = [observable(r) for r in config.rays]
    lin = Operator.zeros()
    for w, a in zip(weights, ops):
        lin = lin + a.scale(w)
    quad = Operator.zeros()
    graph = CompatGraph(len(rows), rows)
    for i, j in graph.edges():
        quad = quad + ops[i] @ ops[j] + ops[j] @ ops[i]
    return QuantumParts(lin, -quad)


def quantum_parts(spec: InequalitySpec, config: Configuration) -> QuantumParts:
    if len(config) != spec.n:
        raise ValueError("configuration and inequality have different sizes")
    return _quantum_parts(config, spec.graph.rows, spec.weights)


@dataclass(frozen=True)
class QuantumOperator:
    op: Operator
    scalar: Fraction | None

    @property
    def is_scalar(self) -> bool:
        return self.scalar is not None


def quantum_operator(spec: InequalitySpec, config: Configuration) -> QuantumOperator:
    op = quantum_parts(spec, config).at(spec.k)
    s = op.scalar_value()
    return QuantumOperator(op, s.real_part() if s is not None and s.is_real() else None)


def expectation(rho: DensityMatrix, spec: InequalitySpec, config: Configuration) -> Fraction:
    if not isinstance(rho, DensityMatrix):
        raise TypeError("rho must be a validated DensityMatrix")
    return rho.expectation(quantum_operator(spec, config).op)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class BoundCertificate:
    k: Fraction
    weights: tuple[Fraction, ...]
    classical: ClassicalBound
    quantum_value: Fraction
    quantum_is_scalar: bool

    @property
    def violation(self) -> bool:
        return self.quantum_value > self.classical.classical_max

    def to_json(self) -> dict:
        return {
            "convention": CONVENTION,
            "k": format_rational(self.k),
            "weights": [format_rational(w) for w in self.weights],
            "classicalMax": format_rational(self.classical.classical_max),
            "witnessCount": self.classical.witness_count,
            "firstWitness": self.classical.witness_string,
            "quantumValue": format_rational(self.quantum_value),
            "quantumIsScalar": self.quantum_is_scalar,
            "quantumState": "any" if self.quantum_is_scalar else "maximally-mixed",
            "violation": self.violation,
        }


def bound_certificate(spec: InequalitySpec, config: Configuration, workers: int = 1) -> BoundCertificate:
    """Classical maximum against the quantum value.

    When Q is not a multiple of the identity the quantum value is taken in
    the maximally mixed state and flagged as such.
    """
    q = quantum_operator(spec, config)
    value = q.scalar if q.is_scalar else DensityMatrix.maximally_mixed().expectation(q.op)
    return BoundCertificate(spec.k, spec.weights, classical_max(spec, workers), value, q.is_scalar)


@dataclass(frozen=True)
class ViolationWindow:
    """Open interval of k on which quantum(k) > M(k); None ends are unbounded."""

    lower: Fraction | None
    upper: Fraction | None
    empty: bool
    quantum_constant: Fraction
    quantum_slope: Fraction
    quantum_state: str
    profile: tuple[tuple[int, Fraction], ...] = field(repr=False)

    def quantum_at(self, k: Fraction) -> Fraction:
        return self.quantum_constant + self.quantum_slope * k

    def classical_at(self, k: Fraction) -> Fraction:
        return classical_max_at(self.profile, k)

    def contains(self, k: Fraction) -> bool:
        if self.empty:
            return False
        return (self.lower is None or k > self.lower) and (self.upper is None or k < self.upper)

    def endpoint_behavior(self) -> dict[str, dict]:
        out = {}
        for name, k in (("lower", self.lower), ("upper", self.upper)):
            if k is None or self.empty:
                continue
            m, q = self.classical_at(k), self.quantum_at(k)
            out[name] = {
                "k": k,
                "classical": m,
                "quantum": q,
                "relation": "equal" if m == q else ("classical-exceeds" if m > q else "quantum-exceeds"),
            }
        return out

    def to_json(self) -> dict:
        fmt = lambda x: None if x is None else format_rational(x)  # noqa: E731
        return {
            "empty": self.empty,
            "lower": fmt(self.lower),
            "upper": fmt(self.upper),
            "open": True,
            "quantum": {
                "constant": fmt(self.quantum_constant),
                "slope": fmt(self.quantum_slope),
                "state": self.quantum_state,
            },
            "endpoints": {
                name: {
                    "k": fmt(v["k"]),
                    "classical": fmt(v["classical"]),
                    "quantum": fmt(v["quantum"]),
                    "relation": v["relation"],
                }
                for name, v in self.endpoint_behavior().items()
            },
            "envelope": [
                {
                    "from": fmt(p["from"]),
                    "to": fmt(p["to"]),
                    "edgeSum": p["edgeSum"],
                    "linearSum": fmt(p["linearSum"]),
                }
                for p in upper_envelope(self.profile)
            ],
        }


def violation_window(
    config: Configuration,
    graph: CompatGraph,
    weights: Sequence[Fraction] = (),
    rho: DensityMatrix | None = None,
) -> ViolationWindow:
    """Exact set of k with quantum(k) > M(k).

    M(k) is the max of the lines L - 2kE, and quantum(k) is affine in k, so
    the set is an intersection of open half-lines, hence an open interval.
    A non-scalar quantum operator needs an explicit state ``rho``.
    """
    spec = InequalitySpec(graph, Fraction(0), tuple(weights))
    parts = quantum_parts(spec, config)
    c0, c1 = parts.linear.scalar_value(), parts.quadratic.scalar_value()
    if c0 is not None and c1 is not None:
        q0, q1, state = c0.real_part(), c1.real_part(), "any"
    elif rho is None:
        raise ValueError("quantum operator is state dependent; pass rho")
    else:
        q0, q1, state = rho.expectation(parts.linear), rho.expectation(parts.quadratic), "given"

    profile = tuple(edge_profile(spec))
    lo: Fraction | None = None
    hi: Fraction | None = None
    empty = False
    for e, lin in profile:
        # q0 + q1 k > lin - 2 e k  <=>  (q1 + 2e) k > lin - q0
        coef, rhs = q1 + 2 * e, lin - q0
        if coef > 0:
            t = rhs / coef
            lo = t if lo is None else max(lo, t)
        elif coef < 0:
            t = rhs / coef
            hi = t if hi is None else min(hi, t)
        elif rhs >= 0:
            empty = True
    if lo is not None and hi is not None and lo >= hi:
        empty = True
    return ViolationWindow(lo, hi, empty, q0, q1, state, profile)

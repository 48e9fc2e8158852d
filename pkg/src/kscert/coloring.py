"""Kochen-Specker truth assignments on the ray set.

Rule 1: no two orthogonal rays are both true.
Rule 2: every complete orthonormal basis has exactly one true ray.

A :data:`BasisChoice` fixes the true member of every basis. Propagation then
forces every ray orthogonal to a true basis vector to be false and leaves
the rest undetermined.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .incidence import CompatGraph, hesse_partition, maximal_orthogonal_triples
from .rays import Configuration, DensityMatrix, SicLabel, projector

BasisChoice = Mapping[str, int]


class Truth(enum.Enum):
    FALSE = "0"
    TRUE = "1"
    UNDETERMINED = "u"


def serialize_assignment(values: Sequence[Truth | int]) -> list[str]:
    return [v.value if isinstance(v, Truth) else str(int(v)) for v in values]


def propagate(choice: BasisChoice, graph: CompatGraph, config: Configuration) -> tuple[Truth, ...]:
    names = {b.name for b in config.bases}
    if set(choice) != names or any(not 0 <= e < 3 for e in choice.values()):
        raise ValueError(f"choice must pick one element 0..2 for each of {sorted(names)}")
    state = [Truth.UNDETERMINED] * graph.n
    for b in config.bases:
        for e, m in enumerate(b.members):
            state[m] = Truth.TRUE if e == choice[b.name] else Truth.FALSE
    for b in config.bases:
        true_ray = b.members[choice[b.name]]
        for j in graph.neighbors(true_ray):
            if state[j] is Truth.UNDETERMINED:
                state[j] = Truth.FALSE
    return tuple(state)


def all_choices(config: Configuration) -> list[dict[str, int]]:
    names = [b.name for b in config.bases]
    return [dict(zip(names, c)) for c in itertools.product(range(3), repeat=len(names))]


def undetermined_sic(state: Sequence[Truth], config: Configuration) -> list[int]:
    return [i for i in config.sic_ids if state[i] is Truth.UNDETERMINED]


@dataclass(frozen=True)
class ChoiceStats:
    histogram: dict[int, int]
    details: list[tuple[dict[str, int], int]]

    def to_json(self) -> dict:
        return {
            "histogram": {str(k): v for k, v in sorted(self.histogram.items(), reverse=True)},
            "choices": [{"choice": c, "undeterminedSic": u} for c, u in self.details],
        }


def enumerate_choices(graph: CompatGraph, config: Configuration) -> ChoiceStats:
    details = []
    for choice in all_choices(config):
        state = propagate(choice, graph, config)
        details.append((choice, len(undetermined_sic(state, config))))
    return ChoiceStats(dict(Counter(u for _, u in details)), details)


def is_valid_coloring(
    coloring: Sequence[int], graph: CompatGraph, triples: Sequence[tuple[int, ...]] | None = None
) -> bool:
    if triples is None:
        triples = maximal_orthogonal_triples(graph)
    if any(coloring[i] and coloring[j] for i, j in graph.edges()):
        return False
    return all(sum(coloring[i] for i in t) == 1 for t in triples)


def max_sic_true(graph: CompatGraph, config: Configuration) -> tuple[int, tuple[int, ...]]:
    """Largest number of true SIC rays over all valid full colorings, with a witness.

    Exhaustive: every basis choice, then every completion of the rays it
    leaves undetermined. Raises if the ray set admits no valid coloring.
    """
    triples = maximal_orthogonal_triples(graph)
    sic = set(config.sic_ids)
    best: tuple[int, tuple[int, ...]] | None = None
    for choice in all_choices(config):
        state = propagate(choice, graph, config)
        free = [i for i, s in enumerate(state) if s is Truth.UNDETERMINED]
        base = [1 if s is Truth.TRUE else 0 for s in state]
        for bits in itertools.product((0, 1), repeat=len(free)):
            coloring = list(base)
            for i, b in zip(free, bits):
                coloring[i] = b
            if not is_valid_coloring(coloring, graph, triples):
                continue
            score = sum(coloring[i] for i in sic)
            if best is None or score > best[0]:
                best = (score, tuple(coloring))
    if best is None:
        raise ValueError("ray set is not KS-colorable")
    return best


def quantum_ks_value(rho: DensityMatrix, config: Configuration) -> Fraction:
    """Sum over SIC rays of tr(rho P_i)."""
    if not isinstance(rho, DensityMatrix):
        raise TypeError("rho must be a validated DensityMatrix")
    return sum((rho.expectation(projector(config.rays[i])) for i in config.sic_ids), Fraction(0))


def figure_data(
    choice: BasisChoice,
    graph: CompatGraph,
    config: Configuration,
    panels: Sequence[Sequence[str]] = (("0", "inf"), ("1", "2")),
) -> dict:
    """Grid picture of the propagation, one panel per group of bases.

    SIC ray (row, col) sits at grid cell (row, col). Each basis vector is a
    line through the three SIC cells orthogonal to it; a solid line is a
    vector assigned true. A cell is filled once some solid line seen so far
    passes through it.
    """
    if set(choice) != {b.name for b in config.bases}:
        raise ValueError("choice must cover every basis")
    cell = {}
    for i in config.sic_ids:
        lab = config.rays[i].label
        assert isinstance(lab, SicLabel)
        cell[i] = [lab.row, lab.col]
    filled: set[int] = set()
    out_panels = []
    for group in panels:
        lines = []
        for name in group:
            b = config.basis(name)
            blocks = hesse_partition(graph, config, b)
            for e, (m, block) in enumerate(zip(b.members, blocks)):
                solid = e == choice[name]
                if solid:
                    filled.update(block)
                lines.append(
                    {
                        "basis": name,
                        "element": e,
                        "ray": m,
                        "style": "solid" if solid else "dashed",
                        "cells": [cell[i] for i in block],
                    }
                )
        out_panels.append(
            {
                "bases": list(group),
                "lines": lines,
                "cells": [
                    {"ray": i, "cell": cell[i], "status": "filled" if i in filled else "empty"}
                    for i in config.sic_ids
                ],
            }
        )
    return {"choice": dict(choice), "grid": [3, 3], "panels": out_panels}

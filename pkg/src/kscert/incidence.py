"""Orthogonality (= compatibility) graph on a ray set, and the Hesse incidences."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .rays import Basis, Configuration, ConfigurationError, inner_product


@dataclass(frozen=True)
class CompatGraph:
    """Symmetric adjacency stored as one bitmask per ray; no self loops."""

    n: int
    rows: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.rows) != self.n:
            raise ValueError("need one adjacency row per vertex")
        for i, row in enumerate(self.rows):
            if row >> i & 1:
                raise ValueError(f"self loop at {i}")
            if row >> self.n:
                raise ValueError(f"row {i} references vertices beyond n")
            for j in range(self.n):
                if (row >> j & 1) != (self.rows[j] >> i & 1):
                    raise ValueError(f"adjacency not symmetric at ({i}, {j})")

    @classmethod
    def from_edges(cls, n: int, edges, labels: tuple[str, ...] = ()) -> CompatGraph:
        rows = [0] * n
        for i, j in edges:
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return cls(n, tuple(rows), labels)

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def neighbors(self, i: int) -> list[int]:
        return [j for j in range(self.n) if self.rows[i] >> j & 1]

    def degree(self, i: int) -> int:
        return self.rows[i].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        """Unordered edges as sorted (i, j), i < j, in lexicographic order."""
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.rows[i] >> j & 1]

    def induced(self, ids) -> CompatGraph:
        keep = sorted(set(ids))
        pos = {v: k for k, v in enumerate(keep)}
        edges = [(pos[i], pos[j]) for i, j in self.edges() if i in pos and j in pos]
        labels = tuple(self.labels[v] for v in keep) if self.labels else ()
        return CompatGraph.from_edges(len(keep), edges, labels)


def build_graph(config: Configuration) -> CompatGraph:
    rays = config.rays
    edges = [
        (u.id, v.id) for u, v in itertools.combinations(rays, 2) if inner_product(u, v).is_zero()
    ]
    return CompatGraph.from_edges(len(rays), edges, tuple(r.label.short() for r in rays))


def hesse_partition(graph: CompatGraph, config: Configuration, basis: Basis) -> list[tuple[int, ...]]:
    """For each vector of ``basis`` the SIC rays orthogonal to it; must tile the SIC."""
    sic = set(config.sic_ids)
    blocks = [tuple(j for j in graph.neighbors(m) if j in sic) for m in basis.members]
    covered = [j for b in blocks for j in b]
    if any(len(b) != 3 for b in blocks) or sorted(covered) != sorted(sic):
        raise ConfigurationError(
            f"basis {basis.name} does not split the SIC into three disjoint triples: {blocks}"
        )
    return blocks


def maximal_orthogonal_triples(graph: CompatGraph) -> list[tuple[int, int, int]]:
    """All triangles of the graph, each sorted, in lexicographic order."""
    out = []
    for i in range(graph.n):
        for j in graph.neighbors(i):
            if j <= i:
                continue
            common = graph.rows[i] & graph.rows[j]
            for k in range(j + 1, graph.n):
                if common >> k & 1:
                    out.append((i, j, k))
    return out


@dataclass(frozen=True)
class IncidenceReport:
    unordered_edge_count: int
    degree_by_ray: tuple[int, ...]
    hesse_partitions: dict[str, list[tuple[int, ...]]]
    maximal_triples: list[tuple[int, int, int]]

    def to_json(self) -> dict:
        return {
            "unorderedEdgeCount": self.unordered_edge_count,
            "degreeByRay": list(self.degree_by_ray),
            "hessePartitions": {k: [list(t) for t in v] for k, v in self.hesse_partitions.items()},
            "maximalTriples": [list(t) for t in self.maximal_triples],
        }


def incidence_report(graph: CompatGraph, config: Configuration) -> IncidenceReport:
    return IncidenceReport(
        unordered_edge_count=len(graph.edges()),
        degree_by_ray=tuple(graph.degree(i) for i in range(graph.n)),
        hesse_partitions={b.name: hesse_partition(graph, config, b) for b in config.bases},
        maximal_triples=maximal_orthogonal_triples(graph),
    )


def export_graph(graph: CompatGraph, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(
            {"n": graph.n, "labels": list(graph.labels), "edges": [list(e) for e in graph.edges()]},
            indent=2,
        )
    if fmt == "dot":
        labels = graph.labels or tuple(str(i) for i in range(graph.n))
        lines = ["graph compat {"]
        lines += [f'  {i} [label="{labels[i]}"];' for i in range(graph.n)]
        lines += [f"  {i} -- {j};" for i, j in graph.edges()]
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown graph format {fmt!r} (expected 'dot' or 'json')")

"""Core value types: filtered digraphs, ordered simplices and filtration grids."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Union

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import GraphError

log = logging.getLogger(__name__)

# An edge may be given with or without a filtration value; a missing value
# defaults to the larger endpoint value.
EdgeSpec = Union[tuple[int, int], tuple[int, int, Optional[float]]]


# ---------------------------------------------------------------------------
# Digraph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FilteredDigraph:
    """A loop-free digraph whose vertices and edges carry filtration values.

    Vertex ids are non-negative integers; the original labels live in
    ``labels``. Instances are immutable once built by :func:`make_digraph`.
    """

    vertices: tuple[tuple[int, float], ...]
    edges: tuple[tuple[int, int, float], ...]
    labels: Mapping[int, str] = field(default_factory=dict)
    clamped: tuple[tuple[int, int], ...] = ()

    @cached_property
    def vertex_values(self) -> dict[int, float]:
        return dict(self.vertices)

    @cached_property
    def edge_values(self) -> dict[tuple[int, int], float]:
        return {(u, v): value for u, v, value in self.edges}

    @cached_property
    def vertex_ids(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.vertices)

    def adjacency(self) -> csr_matrix:
        """0/1 adjacency matrix indexed by position in ``vertex_ids``."""
        index = {v: i for i, v in enumerate(self.vertex_ids)}
        n = len(index)
        rows = [index[u] for u, _, _ in self.edges]
        cols = [index[v] for _, v, _ in self.edges]
        data = np.ones(len(rows), dtype=np.int8)
        return coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def label(self, vertex: int) -> str:
        return self.labels.get(vertex, str(vertex))

    def filtration_values(self) -> list[float]:
        """Every filtration value carried by a vertex or an edge."""
        return [v for _, v in self.vertices] + [v for _, _, v in self.edges]


def make_digraph(
    vertices: Iterable[tuple[int, float]],
    edges: Iterable[EdgeSpec],
    labels: Optional[Mapping[int, str]] = None,
    strict: bool = False,
) -> FilteredDigraph:
    """Validate vertices and edges and build a :class:`FilteredDigraph`.

    Edge values below the larger endpoint value are clamped up (and recorded
    in ``clamped``) unless *strict* is set, in which case they are rejected.

    Raises:
        GraphError: empty vertex list, non-finite value, duplicate vertex,
            self-loop, duplicate directed edge or dangling endpoint.
    """
    vertex_list: list[tuple[int, float]] = []
    seen: dict[int, float] = {}
    for vid, value in vertices:
        vid = int(vid)
        value = float(value)
        if vid < 0:
            raise GraphError(f"Vertex ids must be non-negative, got {vid}.")
        if not math.isfinite(value):
            raise GraphError(f"Vertex {vid} has non-finite filtration value {value}.")
        if vid in seen:
            raise GraphError(f"Vertex {vid} is declared twice.")
        seen[vid] = value
        vertex_list.append((vid, value))
    if not vertex_list:
        raise GraphError("A digraph needs at least one vertex.")

    edge_list: list[tuple[int, int, float]] = []
    edge_keys: set[tuple[int, int]] = set()
    clamped: list[tuple[int, int]] = []
    for spec in edges:
        u, v = int(spec[0]), int(spec[1])
        raw = spec[2] if len(spec) > 2 else None
        if u == v:
            raise GraphError(f"Self-loop ({u}, {u}) is not allowed.")
        for endpoint in (u, v):
            if endpoint not in seen:
                raise GraphError(f"Edge ({u}, {v}) references undeclared vertex {endpoint}.")
        if (u, v) in edge_keys:
            raise GraphError(f"Duplicate directed edge ({u}, {v}).")
        floor = max(seen[u], seen[v])
        value = floor if raw is None else float(raw)
        if not math.isfinite(value):
            raise GraphError(f"Edge ({u}, {v}) has non-finite filtration value {value}.")
        if value < floor:
            if strict:
                raise GraphError(
                    f"Edge ({u}, {v}) enters at {value}, before its endpoints ({floor})."
                )
            log.warning("Edge (%d, %d) value %s clamped up to %s", u, v, value, floor)
            clamped.append((u, v))
            value = floor
        edge_keys.add((u, v))
        edge_list.append((u, v, value))

    kept_labels = {vid: str(name) for vid, name in (labels or {}).items() if vid in seen}
    return FilteredDigraph(
        vertices=tuple(vertex_list),
        edges=tuple(edge_list),
        labels=kept_labels,
        clamped=tuple(clamped),
    )


def sublevel(digraph: FilteredDigraph, a: float) -> FilteredDigraph:
    """Return the subgraph of vertices and edges with filtration value <= *a*.

    May be empty (for instance at ``a = -inf``).
    """
    vertices = tuple((v, value) for v, value in digraph.vertices if value <= a)
    kept = {v for v, _ in vertices}
    edges = tuple(e for e in digraph.edges if e[2] <= a)
    edge_keys = {(u, v) for u, v, _ in edges}
    return FilteredDigraph(
        vertices=vertices,
        edges=edges,
        labels={v: name for v, name in digraph.labels.items() if v in kept},
        clamped=tuple(c for c in digraph.clamped if c in edge_keys),
    )


def weak_components(digraph: FilteredDigraph) -> int:
    """Number of weakly connected components (edges taken as undirected)."""
    if not digraph.vertices:
        return 0
    count, _ = connected_components(digraph.adjacency(), directed=True, connection="weak")
    return int(count)


# ---------------------------------------------------------------------------
# Simplices and grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Simplex:
    """An ordered directed clique ``(v_0, ..., v_k)`` with its filtration value."""

    vertices: tuple[int, ...]
    filtration: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def sort_key(self) -> tuple[float, tuple[int, ...]]:
        return (self.filtration, self.vertices)

    def faces(self) -> Iterator[tuple[int, tuple[int, ...]]]:
        """Yield ``(i, face)`` where *face* drops the i-th vertex."""
        for i in range(len(self.vertices)):
            yield i, self.vertices[:i] + self.vertices[i + 1:]


@dataclass(frozen=True)
class FiltrationGrid:
    """Strictly increasing distinct filtration values of a complex."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        for lo, hi in zip(self.values, self.values[1:]):
            if not lo < hi:
                raise GraphError("Filtration grid values must be strictly increasing.")

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "FiltrationGrid":
        return cls(tuple(sorted({float(v) for v in values})))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def consecutive_pairs(self) -> list[tuple[float, float]]:
        """``(g_i, g_{i+1})`` pairs; a one-value grid yields ``(g, g)``."""
        if len(self.values) == 1:
            return [(self.values[0], self.values[0])]
        return list(zip(self.values, self.values[1:]))

    def diagonal_pairs(self) -> list[tuple[float, float]]:
        return [(v, v) for v in self.values]

    def all_pairs(self) -> list[tuple[float, float]]:
        return [
            (a, b)
            for i, a in enumerate(self.values)
            for b in self.values[i:]
        ]

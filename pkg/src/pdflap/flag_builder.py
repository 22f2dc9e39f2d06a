"""Directed flag complex construction by clique enumeration."""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Mapping

import pyflagsercount

from .errors import ValidationError
from .model import FilteredDigraph, FiltrationGrid, Simplex

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FilteredFlagComplex:
    """Ordered simplices of a directed flag complex, grouped by dimension.

    Within a dimension simplices are sorted by ``(filtration, vertex tuple)``,
    so the simplices alive at any value ``a`` form a prefix of each list.
    """

    simplices: tuple[tuple[Simplex, ...], ...]
    grid: FiltrationGrid
    max_dim: int
    labels: Mapping[int, str] = field(default_factory=dict)

    @cached_property
    def _filtrations(self) -> tuple[list[float], ...]:
        return tuple([s.filtration for s in dim] for dim in self.simplices)

    @cached_property
    def _indices(self) -> tuple[dict[tuple[int, ...], int], ...]:
        return tuple(
            {s.vertices: i for i, s in enumerate(dim)} for dim in self.simplices
        )

    def check_dim(self, k: int) -> None:
        if not 0 <= k <= self.max_dim:
            raise ValidationError(
                f"Dimension {k} is outside the complex range 0..{self.max_dim}."
            )

    def count_at(self, k: int, a: float) -> int:
        """Number of k-simplices with filtration <= *a* (0 beyond ``max_dim``)."""
        if k < 0 or k > self.max_dim:
            return 0
        return bisect.bisect_right(self._filtrations[k], a)

    def index_of(self, vertices: tuple[int, ...]) -> int:
        """Canonical position of a simplex within its dimension."""
        return self._indices[len(vertices) - 1][vertices]

    def counts(self) -> list[int]:
        return [len(dim) for dim in self.simplices]

    def label(self, simplex: Simplex) -> str:
        return "(" + ",".join(self.labels.get(v, str(v)) for v in simplex.vertices) + ")"


def _directed_cliques(digraph: FilteredDigraph, max_dim: int) -> dict[int, list[tuple[int, ...]]]:
    """Ordered cliques of dimension 2..max_dim from flagser, as vertex ids.

    flagser lists each clique source first and sink last, which is the
    ``(v_0, ..., v_k)`` order with every ``v_i -> v_j`` (i < j) an edge.
    """
    if max_dim < 2 or not digraph.edges:
        return {}
    ids = digraph.vertex_ids
    flagser_out = pyflagsercount.flagser_count(
        digraph.adjacency(), return_simplices=True, max_dim=max_dim
    )
    found = flagser_out.get("simplices", [])
    cliques: dict[int, list[tuple[int, ...]]] = {}
    for dim in range(2, min(max_dim, len(found) - 1) + 1):
        cliques[dim] = [tuple(ids[int(p)] for p in row) for row in found[dim]]
    return cliques


def build_complex(digraph: FilteredDigraph, max_dim: int) -> FilteredFlagComplex:
    """Enumerate every directed clique with at most ``max_dim + 1`` vertices.

    Vertices and edges come straight from the digraph; higher cliques come
    from ``pyflagsercount``. A simplex enters at the largest filtration value
    among its vertices and edges.

    Raises:
        ValidationError: if *max_dim* is negative.
    """
    if max_dim < 0:
        raise ValidationError(f"Dimension cap must be >= 0, got {max_dim}.")

    vertex_value = digraph.vertex_values
    edge_value = digraph.edge_values
    dims: list[list[Simplex]] = [[] for _ in range(max_dim + 1)]

    for v, value in digraph.vertices:
        dims[0].append(Simplex((v,), value))
    if max_dim >= 1:
        for u, v, value in digraph.edges:
            dims[1].append(Simplex((u, v), value))

    for dim, cliques in _directed_cliques(digraph, max_dim).items():
        for clique in cliques:
            value = max(
                max(vertex_value[v] for v in clique),
                max(edge_value[e] for e in combinations(clique, 2)),
            )
            dims[dim].append(Simplex(clique, value))

    ordered = tuple(tuple(sorted(dim, key=lambda s: s.sort_key)) for dim in dims)
    grid = FiltrationGrid.from_values(s.filtration for dim in ordered for s in dim)
    log.debug("Built flag complex with simplex counts %s", [len(d) for d in ordered])
    return FilteredFlagComplex(
        simplices=ordered,
        grid=grid,
        max_dim=max_dim,
        labels=dict(digraph.labels),
    )


def simplices_at(complex_: FilteredFlagComplex, k: int, a: float) -> list[Simplex]:
    """The k-simplices with filtration <= *a*, in canonical order."""
    complex_.check_dim(k)
    return list(complex_.simplices[k][: complex_.count_at(k, a)])

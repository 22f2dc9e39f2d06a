"""Shared test fixtures for pdflap."""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Callable, Iterator

import numpy as np
import pytest

# Make `pytest` work from a fresh clone without requiring editable install.
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from pdflap.model import FilteredDigraph, make_digraph  # noqa: E402

# Worked-example digraphs as flag files. Vertex ids are 0-based: a..e of the
# clique example map to 0..4 and 1..4 of the square examples map to 0..3.

G3_FLAG = """\
# five vertices, seven edges, one directed 3-clique (d, b, c)
dim 0:
0 0 0 0 0
dim 1:
0 3
1 0
1 2
2 4
3 1
3 2
4 3
"""

TWO_COMPONENT_FLAG = """\
dim 0:
0 0 1 2 3
dim 1:
0 1 1
1 2 2
2 3 3
"""

TRIANGLE_FLAG = """\
dim 0:
0 1 2
dim 1:
0 1 3
1 2 4
0 2 5
"""

# C-O-C ligand chain bonded 0-1-2, protein carbons at 3 (near), 4 (near) and
# 5 (17 A away, dropped).
MOLECULE_TEXT = """\
C 0.0 0.0 0.0 ligand
O 1.5 0.0 0.0 ligand
C 3.0 0.0 0.0 ligand
C 0.0 4.0 0.0 protein
C 3.0 0.0 6.0 protein
C 20.0 0.0 0.0 protein
bonds:
0 1
1 2
"""

# Directed edges of MOLECULE_TEXT after filtering; dense ids equal atom ids.
MOLECULE_EDGES = {
    (0, 1, 1.5), (2, 1, 1.5),
    (3, 0, 4.0), (0, 3, 4.0), (3, 1, 4.272), (3, 2, 5.0), (2, 3, 5.0),
    (4, 0, 6.708), (0, 4, 6.708), (4, 1, 6.185), (4, 2, 6.0), (2, 4, 6.0),
}


@pytest.fixture(autouse=True)
def _reset_package_logger() -> Iterator[None]:
    """CLI runs install a rich handler; restore propagation for caplog."""
    yield
    logger = logging.getLogger("pdflap")
    logger.handlers[:] = []
    logger.setLevel(logging.NOTSET)
    logger.propagate = True


def _square(edges: list[tuple[int, int]]) -> FilteredDigraph:
    return make_digraph([(v, 0.0) for v in range(4)], edges)


@pytest.fixture
def g3() -> FilteredDigraph:
    edges = [(0, 3), (1, 0), (1, 2), (2, 4), (3, 1), (3, 2), (4, 3)]
    return make_digraph(
        [(v, 0.0) for v in range(5)],
        edges,
        labels=dict(enumerate("abcde")),
    )


@pytest.fixture
def square_g1() -> FilteredDigraph:
    return _square([(0, 1), (0, 3), (1, 2), (3, 2)])


@pytest.fixture
def square_g2() -> FilteredDigraph:
    return _square([(0, 1), (0, 3), (2, 1), (2, 3)])


@pytest.fixture
def two_components() -> FilteredDigraph:
    """Two components at every step, merged one step later."""
    return make_digraph(
        [(0, 0.0), (1, 0.0), (2, 1.0), (3, 2.0), (4, 3.0)],
        [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0)],
    )


@pytest.fixture
def triangle() -> FilteredDigraph:
    """Vertices at 0, 1, 2; edges at 3, 4, 5; the 2-cell enters at 5."""
    return make_digraph(
        [(0, 0.0), (1, 1.0), (2, 2.0)],
        [(0, 1, 3.0), (1, 2, 4.0), (0, 2, 5.0)],
    )


@pytest.fixture
def random_digraph() -> Callable[[np.random.Generator], FilteredDigraph]:
    """Random filtered digraph: <= 8 vertices, values in {0, 1, 2}, p = 0.4."""

    def _make(rng: np.random.Generator) -> FilteredDigraph:
        n = int(rng.integers(1, 9))
        values = rng.integers(0, 3, size=n)
        edges = []
        for u in range(n):
            for v in range(n):
                if u != v and rng.random() < 0.4:
                    floor = int(max(values[u], values[v]))
                    edges.append((u, v, float(rng.integers(floor, 3))))
        return make_digraph([(v, float(values[v])) for v in range(n)], edges)

    return _make


@pytest.fixture
def flag_file(tmp_path: Path) -> Callable[[str, str], Path]:
    """Write text to a file under tmp_path and return its path."""

    def _write(text: str, name: str = "input.flag") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def g3_file(flag_file: Callable[[str, str], Path]) -> Path:
    return flag_file(G3_FLAG, "g3.flag")


@pytest.fixture
def two_component_file(flag_file: Callable[[str, str], Path]) -> Path:
    return flag_file(TWO_COMPONENT_FLAG, "two.flag")


@pytest.fixture
def triangle_file(flag_file: Callable[[str, str], Path]) -> Path:
    return flag_file(TRIANGLE_FLAG, "triangle.flag")


@pytest.fixture
def molecule_file(flag_file: Callable[[str, str], Path]) -> Path:
    return flag_file(MOLECULE_TEXT, "complex.mol")

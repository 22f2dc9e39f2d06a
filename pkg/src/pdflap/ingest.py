"""Input formats: flag files, distance matrices and molecular point clouds.

Every parser returns a :class:`~pdflap.model.FilteredDigraph`; all of them
are pure functions of their input.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal, localcontext
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.spatial import distance_matrix

from .errors import ParseError, ValidationError
from .model import FilteredDigraph, make_digraph

log = logging.getLogger(__name__)

MOLECULE_ROLES = ("protein", "ligand")
LIGAND_ELEMENTS = frozenset({"C", "N", "O", "S"})
PROTEIN_ELEMENTS = frozenset({"C"})

# Pauling scale.
PAULING_ELECTRONEGATIVITY: dict[str, float] = {
    "H": 2.20,
    "C": 2.55,
    "N": 3.04,
    "O": 3.44,
    "F": 3.98,
    "P": 2.19,
    "S": 2.58,
    "Cl": 3.16,
    "Br": 2.96,
    "I": 2.66,
}


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


# ---------------------------------------------------------------------------
# Rounding
# ---------------------------------------------------------------------------

def round_to(x: float, step: float) -> float:
    """Nearest multiple of *step*, ties away from zero.

    Decimal arithmetic on the shortest repr avoids binary artefacts such as
    ``1.2345 / 0.001 == 1234.4999...``.

    Raises:
        ValidationError: if *step* is not a positive finite number.
    """
    if not (step > 0 and math.isfinite(step)):
        raise ValidationError(f"Rounding step must be positive and finite, got {step}.")
    if not math.isfinite(x):
        return x
    value = Decimal(repr(float(x)))
    unit = Decimal(repr(float(step)))
    # Enough digits for the integer part of x / step plus a fractional margin.
    with localcontext() as ctx:
        ctx.prec = max(28, value.adjusted() - unit.adjusted() + 30)
        count = (value / unit).quantize(Decimal(1), rounding=ROUND_HALF_UP)
        return float(count * unit)


def _rounded(x: float, step: float) -> float:
    return round_to(x, step) if step > 0 else float(x)


# ---------------------------------------------------------------------------
# Flag files
# ---------------------------------------------------------------------------

def parse_flag_file(text: str, strict: bool = False) -> FilteredDigraph:
    """Parse the flagser-style dialect.

    Grammar::

        dim 0:
        <vertex values, whitespace separated>
        dim 1:
        <source> <target> [weight]
        ...

    ``#`` starts a comment. A missing weight defaults to the larger endpoint
    value.

    Raises:
        ParseError: malformed header or line, non-numeric value, self-loop,
            duplicate edge or undeclared vertex (with the line number).
    """
    section: Optional[int] = None
    values: Optional[list[float]] = None
    edges: list[tuple[int, int, Optional[float]]] = []
    seen_edges: set[tuple[int, int]] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.startswith("dim"):
            header = line.replace(" ", "")
            if header == "dim0:":
                if section is not None:
                    raise ParseError("'dim 0:' must come first and only once.", line=lineno)
                section = 0
            elif header == "dim1:":
                if section != 0 or values is None:
                    raise ParseError("'dim 1:' must follow the vertex values.", line=lineno)
                section = 1
            else:
                raise ParseError(f"Unsupported section header '{line}'.", line=lineno)
            continue

        if section is None:
            raise ParseError("Expected 'dim 0:' header.", line=lineno)
        if section == 0:
            if values is not None:
                raise ParseError("Vertex values must be on a single line.", line=lineno)
            try:
                values = [float(tok) for tok in line.split()]
            except ValueError:
                raise ParseError(f"Non-numeric vertex value in '{line}'.", line=lineno) from None
            continue

        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise ParseError(f"Expected 'source target [weight]', got '{line}'.", line=lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(f"Vertex indices must be integers in '{line}'.", line=lineno) from None
        weight: Optional[float] = None
        if len(tokens) == 3:
            try:
                weight = float(tokens[2])
            except ValueError:
                raise ParseError(f"Non-numeric weight '{tokens[2]}'.", line=lineno) from None
        n = len(values or [])
        for endpoint in (u, v):
            if not 0 <= endpoint < n:
                raise ParseError(f"Edge references undeclared vertex {endpoint}.", line=lineno)
        if u == v:
            raise ParseError(f"Self-loop on vertex {u}.", line=lineno)
        if (u, v) in seen_edges:
            raise ParseError(f"Duplicate edge ({u}, {v}).", line=lineno)
        seen_edges.add((u, v))
        edges.append((u, v, weight))

    if values is None:
        raise ParseError("Missing 'dim 0:' section with vertex values.")
    return make_digraph(enumerate(values), edges, strict=strict)


def serialize_flag_file(digraph: FilteredDigraph) -> str:
    """Write *digraph* in the flag-file dialect.

    Vertex ids are renumbered densely in increasing id order; every edge is
    written with its weight.
    """
    order = sorted(v for v, _ in digraph.vertices)
    dense = {v: i for i, v in enumerate(order)}
    values = digraph.vertex_values
    lines = [
        "dim 0:",
        " ".join(repr(values[v]) for v in order),
        "dim 1:",
    ]
    for u, v, value in sorted(digraph.edges, key=lambda e: (dense[e[0]], dense[e[1]])):
        lines.append(f"{dense[u]} {dense[v]} {value!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Distance matrices
# ---------------------------------------------------------------------------

def from_distance_matrix(
    D: Sequence[Sequence[float]] | np.ndarray,
    cutoff: float,
    rounding: float = 1e-3,
    labels: Optional[Sequence[str]] = None,
) -> FilteredDigraph:
    """Vertices at 0 and both directed edges of every pair within *cutoff*.

    Edges enter at the distance rounded to *rounding* (no rounding when
    *rounding* is 0).

    Raises:
        ValidationError: non-square, non-finite, negative or asymmetric
            input, nonzero diagonal, or a negative cutoff.
    """
    matrix = np.asarray(D, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f"Distance matrix must be square, got shape {matrix.shape}.")
    if matrix.shape[0] == 0:
        raise ValidationError("Distance matrix is empty.")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError("Distance matrix contains non-finite entries.")
    if np.any(matrix < 0):
        raise ValidationError("Distance matrix contains negative entries.")
    if np.any(np.diag(matrix) != 0):
        raise ValidationError("Distance matrix must have a zero diagonal.")
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-12):
        raise ValidationError("Distance matrix is not symmetric.")
    if cutoff < 0:
        raise ValidationError(f"Cutoff must be non-negative, got {cutoff}.")
    if labels is not None and len(labels) != matrix.shape[0]:
        raise ValidationError(
            f"Got {len(labels)} labels for a {matrix.shape[0]}x{matrix.shape[0]} matrix."
        )

    n = matrix.shape[0]
    edges: list[tuple[int, int, float]] = []
    for i in range(n):
        for j in range(i + 1, n):
            if matrix[i, j] <= cutoff:
                value = _rounded(matrix[i, j], rounding)
                edges.append((i, j, value))
                edges.append((j, i, value))
    log.debug("distance matrix: %d points, %d directed edges", n, len(edges))
    names = dict(enumerate(labels)) if labels is not None else None
    return make_digraph([(i, 0.0) for i in range(n)], edges, labels=names)


def parse_distance_csv(text: str) -> tuple[np.ndarray, Optional[list[str]]]:
    """Read a square CSV distance matrix.

    An optional first row of non-numeric cells is taken as vertex labels.
    Blank lines and ``#`` comments are skipped.

    Raises:
        ParseError: ragged rows or non-numeric cells (with the line number).
    """
    rows: list[list[float]] = []
    labels: Optional[list[str]] = None
    reader = csv.reader(io.StringIO(text))
    for record in reader:
        lineno = reader.line_num
        cells = [c.strip() for c in record]
        if not cells or not any(cells) or cells[0].startswith("#"):
            continue
        try:
            values = [float(c) for c in cells]
        except ValueError:
            if not rows and labels is None:
                labels = cells
                continue
            raise ParseError(f"Non-numeric cell in row {cells}.", line=lineno) from None
        if rows and len(values) != len(rows[0]):
            raise ParseError(
                f"Row has {len(values)} cells, expected {len(rows[0])}.", line=lineno
            )
        rows.append(values)
    if not rows:
        raise ParseError("Distance matrix CSV has no numeric rows.")
    if labels is not None and len(labels) != len(rows[0]):
        raise ParseError(f"Header has {len(labels)} labels, expected {len(rows[0])}.", line=1)
    return np.array(rows, dtype=np.float64), labels


# ---------------------------------------------------------------------------
# Molecular systems
# ---------------------------------------------------------------------------

def _normalize_element(symbol: str) -> str:
    return symbol.strip().capitalize()


@dataclass(frozen=True)
class Atom:
    element: str
    x: float
    y: float
    z: float
    role: str

    @property
    def position(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class MolecularSystem:
    """Atoms with roles plus ligand-internal covalent bonds (atom index pairs)."""

    atoms: tuple[Atom, ...]
    bonds: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        for i, atom in enumerate(self.atoms):
            if atom.role not in MOLECULE_ROLES:
                raise ValidationError(
                    f"Atom {i} has role '{atom.role}'; expected one of {', '.join(MOLECULE_ROLES)}."
                )
            if not all(math.isfinite(c) for c in atom.position):
                raise ValidationError(f"Atom {i} has non-finite coordinates.")
        n = len(self.atoms)
        for i, j in self.bonds:
            if not (0 <= i < n and 0 <= j < n):
                raise ValidationError(f"Bond ({i}, {j}) references a missing atom.")
            if i == j:
                raise ValidationError(f"Bond ({i}, {j}) joins an atom to itself.")
            if self.atoms[i].role != "ligand" or self.atoms[j].role != "ligand":
                raise ValidationError(f"Bond ({i}, {j}) is not between ligand atoms.")

    def coordinates(self) -> np.ndarray:
        return np.array([a.position for a in self.atoms], dtype=np.float64).reshape(-1, 3)


@dataclass(frozen=True)
class ElectronegativityTable:
    """Element symbol to electronegativity."""

    values: Mapping[str, float] = field(
        default_factory=lambda: dict(PAULING_ELECTRONEGATIVITY)
    )

    @classmethod
    def pauling(cls) -> "ElectronegativityTable":
        return cls(dict(PAULING_ELECTRONEGATIVITY))

    def merged(self, overrides: Mapping[str, float]) -> "ElectronegativityTable":
        """New table where *overrides* replace or extend the current entries."""
        values = dict(self.values)
        for symbol, value in overrides.items():
            value = float(value)
            if not math.isfinite(value):
                raise ValidationError(f"Electronegativity of {symbol} must be finite.")
            values[_normalize_element(symbol)] = value
        return ElectronegativityTable(values)

    def __contains__(self, element: object) -> bool:
        return element in self.values

    def get(self, element: str) -> float:
        try:
            return self.values[element]
        except KeyError:
            raise ValidationError(
                f"Unknown element '{element}'; add it to the electronegativity table."
            ) from None


def parse_molecule(text: str) -> MolecularSystem:
    """Parse ``element x y z role`` lines followed by a ``bonds:`` section.

    Bond lines hold two 0-based atom indices.

    Raises:
        ParseError: malformed lines (with the line number).
        ValidationError: inconsistent atoms or bonds.
    """
    atoms: list[Atom] = []
    bonds: list[tuple[int, int]] = []
    in_bonds = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.lower().rstrip(":") == "bonds":
            if in_bonds:
                raise ParseError("Duplicate 'bonds:' section.", line=lineno)
            in_bonds = True
            continue
        tokens = line.split()
        if in_bonds:
            if len(tokens) != 2:
                raise ParseError(f"Expected 'i j' bond line, got '{line}'.", line=lineno)
            try:
                bonds.append((int(tokens[0]), int(tokens[1])))
            except ValueError:
                raise ParseError(f"Bond indices must be integers in '{line}'.", line=lineno) from None
            continue
        if len(tokens) != 5:
            raise ParseError(f"Expected 'element x y z role', got '{line}'.", line=lineno)
        element, xs, ys, zs, role = tokens
        try:
            x, y, z = float(xs), float(ys), float(zs)
        except ValueError:
            raise ParseError(f"Non-numeric coordinate in '{line}'.", line=lineno) from None
        role = role.lower()
        if role not in MOLECULE_ROLES:
            raise ParseError(
                f"Role must be one of {', '.join(MOLECULE_ROLES)}, got '{role}'.", line=lineno
            )
        atoms.append(Atom(_normalize_element(element), x, y, z, role))
    return MolecularSystem(tuple(atoms), tuple(bonds))


def _oriented(
    i: int, j: int, value: float, en: Mapping[int, float]
) -> list[tuple[int, int, float]]:
    """Point toward the more electronegative atom; both ways on a tie."""
    if en[i] < en[j]:
        return [(i, j, value)]
    if en[i] > en[j]:
        return [(j, i, value)]
    return [(i, j, value), (j, i, value)]


def from_molecule(
    system: MolecularSystem,
    cutoff: float = 8.0,
    rounding: float = 1e-3,
    table: Optional[ElectronegativityTable] = None,
    bonds_at_zero: bool = False,
    all_ligand_pairs: bool = False,
) -> FilteredDigraph:
    """Protein-ligand digraph.

    Vertices are the ligand C, N, O and S atoms plus the protein C atoms
    within *cutoff* of one of them, all at filtration 0, numbered in input
    order. Edges join bonded ligand atoms and every protein-ligand pair within
    *cutoff*, never two protein atoms. Each edge enters at its rounded
    distance (ligand bonds at 0 with *bonds_at_zero*). With
    *all_ligand_pairs* every ligand pair within *cutoff* gets an edge.

    Raises:
        ValidationError: unknown element or no selected atom.
    """
    table = table or ElectronegativityTable.pauling()
    for i, atom in enumerate(system.atoms):
        if atom.element not in table:
            raise ValidationError(f"Atom {i} has unknown element '{atom.element}'.")

    atoms = system.atoms
    coords = system.coordinates()
    ligand = [i for i, a in enumerate(atoms) if a.role == "ligand" and a.element in LIGAND_ELEMENTS]
    protein = [i for i, a in enumerate(atoms) if a.role == "protein" and a.element in PROTEIN_ELEMENTS]
    if not ligand:
        raise ValidationError("No ligand C, N, O or S atom to build the digraph from.")

    cross = (
        distance_matrix(coords[protein], coords[ligand])
        if protein
        else np.zeros((0, len(ligand)))
    )
    near = [p for row, p in enumerate(protein) if cross[row].min() <= cutoff]
    selected = sorted(ligand + near)
    dense = {atom_index: vid for vid, atom_index in enumerate(selected)}
    en = {dense[i]: table.get(atoms[i].element) for i in selected}

    pairs: dict[frozenset[int], float] = {}
    for i, j in system.bonds:
        if i in dense and j in dense:
            length = float(np.linalg.norm(coords[i] - coords[j]))
            dist = 0.0 if bonds_at_zero else _rounded(length, rounding)
            pairs[frozenset((i, j))] = dist
    if all_ligand_pairs:
        within = distance_matrix(coords[ligand], coords[ligand])
        for a, i in enumerate(ligand):
            for b in range(a + 1, len(ligand)):
                key = frozenset((i, ligand[b]))
                if within[a, b] <= cutoff and key not in pairs:
                    pairs[key] = _rounded(float(within[a, b]), rounding)
    column = {atom_index: c for c, atom_index in enumerate(ligand)}
    for row, p in enumerate(protein):
        if p not in dense:
            continue
        for l in ligand:
            dist = float(cross[row, column[l]])
            if dist <= cutoff:
                pairs[frozenset((p, l))] = _rounded(dist, rounding)

    edges: list[tuple[int, int, float]] = []
    for key in sorted(pairs, key=lambda k: tuple(sorted(k))):
        i, j = sorted(key)
        edges.extend(_oriented(dense[i], dense[j], pairs[key], en))

    labels = {dense[i]: f"{atoms[i].element}{i}" for i in selected}
    log.debug(
        "molecule: %d ligand + %d protein vertices, %d directed edges",
        len(ligand), len(near), len(edges),
    )
    return make_digraph([(vid, 0.0) for vid in range(len(selected))], edges, labels=labels)


def load_digraph(
    text: str,
    fmt: str,
    cutoff: float = 8.0,
    rounding: float = 1e-3,
    strict: bool = False,
    table: Optional[ElectronegativityTable] = None,
    bonds_at_zero: bool = False,
    all_ligand_pairs: bool = False,
) -> FilteredDigraph:
    """Dispatch *text* to the parser for *fmt* (``flag``, ``distmat`` or ``mol``)."""
    if fmt == "flag":
        return parse_flag_file(text, strict=strict)
    if fmt == "distmat":
        matrix, labels = parse_distance_csv(text)
        return from_distance_matrix(matrix, cutoff, rounding, labels=labels)
    if fmt == "mol":
        return from_molecule(
            parse_molecule(text),
            cutoff=cutoff,
            rounding=rounding,
            table=table,
            bonds_at_zero=bonds_at_zero,
            all_ligand_pairs=all_ligand_pairs,
        )
    raise ValidationError(f"Unknown input format '{fmt}'.")


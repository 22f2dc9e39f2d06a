"""Unit tests for pdflap.ingest."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.spatial import distance_matrix

from conftest import G3_FLAG, MOLECULE_EDGES, MOLECULE_TEXT
from pdflap.errors import GraphError, ParseError, ValidationError
from pdflap.flag_builder import build_complex
from pdflap.ingest import (
    Atom,
    ElectronegativityTable,
    MolecularSystem,
    from_distance_matrix,
    from_molecule,
    load_digraph,
    parse_distance_csv,
    parse_flag_file,
    parse_molecule,
    round_to,
    serialize_flag_file,
)

EQUILATERAL = [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]


def _edge_set(g) -> set[tuple[int, int, float]]:
    return set(g.edges)


def _pair(first: Atom, second: Atom, bonded: bool = True) -> MolecularSystem:
    return MolecularSystem((first, second), ((0, 1),) if bonded else ())


# ---------------------------------------------------------------------------
# round_to
# ---------------------------------------------------------------------------

class TestRoundTo:
    @pytest.mark.parametrize(
        "value, expected",
        [(1.2345, 1.235), (2.0004, 2.0), (-1.0005, -1.001), (4.2720018, 4.272)],
    )
    def test_thousandths(self, value: float, expected: float) -> None:
        assert round_to(value, 0.001) == expected

    def test_coarse_step(self) -> None:
        assert round_to(7.3, 0.5) == 7.5

    def test_non_finite_passthrough(self) -> None:
        assert round_to(math.inf, 0.001) == math.inf

    def test_tiny_step(self) -> None:
        assert round_to(1.0, 1e-30) == 1.0
        assert round_to(0.1, 1e-20) == 0.1

    def test_huge_value(self) -> None:
        assert round_to(1e30, 0.001) == 1e30
        assert round_to(123456789012345.67, 0.5) == 123456789012345.5

    def test_value_far_below_step(self) -> None:
        assert round_to(1e-30, 1.0) == 0.0

    def test_infinite_step_rejected(self) -> None:
        with pytest.raises(ValidationError):
            round_to(1.0, math.inf)

    def test_step_must_be_positive(self) -> None:
        with pytest.raises(ValidationError):
            round_to(1.0, 0.0)


# ---------------------------------------------------------------------------
# Flag files
# ---------------------------------------------------------------------------

class TestParseFlagFile:
    def test_g3(self) -> None:
        g = parse_flag_file(G3_FLAG)
        assert g.n_vertices == 5
        assert g.n_edges == 7
        assert set(g.edge_values.values()) == {0.0}

    def test_weights_and_defaults(self) -> None:
        g = parse_flag_file("dim 0:\n0 1.5 2\ndim 1:\n0 1 3.25\n1 2  # no weight\n")
        assert g.edge_values == {(0, 1): 3.25, (1, 2): 2.0}

    def test_vertices_only(self) -> None:
        g = parse_flag_file("dim 0:\n0 0 0\n")
        assert g.n_vertices == 3
        assert g.n_edges == 0

    @pytest.mark.parametrize(
        "text, line, message",
        [
            ("dim 0:\n0 0\ndim 1:\n0 5\n", 4, "undeclared vertex 5"),
            ("dim 0:\n0 0\ndim 1:\n1 1\n", 4, "Self-loop"),
            ("dim 0:\n0 0\ndim 1:\n0 1\n0 1 2\n", 5, "Duplicate edge"),
            ("dim 0:\n0 x\n", 2, "Non-numeric vertex"),
            ("dim 0:\n0 0\ndim 1:\n0 1 heavy\n", 4, "Non-numeric weight"),
            ("dim 0:\n0 0\ndim 2:\n", 3, "Unsupported section"),
            ("# header missing\n0 1\n", 2, "Expected 'dim 0:'"),
            ("dim 0:\n0 0\ndim 1:\n0 1 2 3\n", 4, "source target"),
        ],
    )
    def test_errors_carry_line_numbers(self, text: str, line: int, message: str) -> None:
        with pytest.raises(ParseError, match=message) as excinfo:
            parse_flag_file(text)
        assert excinfo.value.line == line
        assert f"line {line}:" in str(excinfo.value)

    def test_empty_input(self) -> None:
        with pytest.raises(ParseError, match="Missing 'dim 0:'"):
            parse_flag_file("# nothing\n")

    def test_early_edge_clamped_unless_strict(self) -> None:
        text = "dim 0:\n0 2\ndim 1:\n0 1 1\n"
        assert parse_flag_file(text).edge_values[(0, 1)] == 2.0
        with pytest.raises(GraphError):
            parse_flag_file(text, strict=True)


class TestSerializeFlagFile:
    def test_writes_every_weight(self) -> None:
        g = parse_flag_file("dim 0:\n0 1\ndim 1:\n1 0\n")
        assert serialize_flag_file(g) == "dim 0:\n0.0 1.0\ndim 1:\n1 0 1.0\n"

    def test_idempotent(self) -> None:
        first = serialize_flag_file(parse_flag_file(G3_FLAG))
        assert serialize_flag_file(parse_flag_file(first)) == first

    def test_renumbers_densely(self) -> None:
        from pdflap.model import make_digraph

        g = make_digraph([(10, 0.0), (20, 1.0)], [(20, 10, 1.0)])
        assert serialize_flag_file(g) == "dim 0:\n0.0 1.0\ndim 1:\n1 0 1.0\n"


# ---------------------------------------------------------------------------
# Distance matrices
# ---------------------------------------------------------------------------

class TestFromDistanceMatrix:
    def test_equilateral_complex(self) -> None:
        g = from_distance_matrix(EQUILATERAL, cutoff=1.5)
        assert g.n_edges == 6
        assert set(g.edge_values.values()) == {1.0}
        assert build_complex(g, 2).counts() == [3, 6, 6]

    def test_cutoff_is_inclusive(self) -> None:
        assert from_distance_matrix(EQUILATERAL, cutoff=1.0).n_edges == 6
        assert from_distance_matrix(EQUILATERAL, cutoff=0.99).n_edges == 0

    def test_rounding(self) -> None:
        D = [[0.0, 1.2345], [1.2345, 0.0]]
        assert _edge_set(from_distance_matrix(D, cutoff=2.0)) == {(0, 1, 1.235), (1, 0, 1.235)}
        assert from_distance_matrix(D, cutoff=2.0, rounding=0).edge_values[(0, 1)] == 1.2345

    def test_labels(self) -> None:
        g = from_distance_matrix(EQUILATERAL, cutoff=1.5, labels=["x", "y", "z"])
        assert g.label(2) == "z"

    @pytest.mark.parametrize("step", [0.001, 0.05, 0.25])
    def test_edge_values_are_multiples_of_step(self, step: float) -> None:
        rng = np.random.default_rng(31)
        for _ in range(10):
            points = rng.uniform(0.0, 5.0, size=(int(rng.integers(2, 9)), 3))
            g = from_distance_matrix(distance_matrix(points, points), cutoff=6.0, rounding=step)
            for value in g.edge_values.values():
                assert value >= 0
                assert round_to(value, step) == value

    @pytest.mark.parametrize(
        "D, message",
        [
            ([[0.0, 1.0], [2.0, 0.0]], "symmetric"),
            ([[1.0, 1.0], [1.0, 0.0]], "zero diagonal"),
            ([[0.0, -1.0], [-1.0, 0.0]], "negative"),
            ([[0.0, 1.0, 2.0]], "square"),
            ([[0.0, math.nan], [math.nan, 0.0]], "non-finite"),
        ],
    )
    def test_rejects_bad_matrices(self, D, message: str) -> None:
        with pytest.raises(ValidationError, match=message):
            from_distance_matrix(D, cutoff=1.0)

    def test_rejects_negative_cutoff(self) -> None:
        with pytest.raises(ValidationError, match="Cutoff"):
            from_distance_matrix(EQUILATERAL, cutoff=-1.0)


class TestParseDistanceCsv:
    def test_header_gives_labels(self) -> None:
        matrix, labels = parse_distance_csv("p,q\n0,1.5\n1.5,0\n")
        assert labels == ["p", "q"]
        assert np.array_equal(matrix, [[0.0, 1.5], [1.5, 0.0]])

    def test_without_header(self) -> None:
        matrix, labels = parse_distance_csv("# comment\n0,1\n\n1,0\n")
        assert labels is None
        assert matrix.shape == (2, 2)

    def test_ragged_rows(self) -> None:
        with pytest.raises(ParseError, match="expected 2") as excinfo:
            parse_distance_csv("0,1\n1,0,3\n")
        assert excinfo.value.line == 2

    def test_no_rows(self) -> None:
        with pytest.raises(ParseError):
            parse_distance_csv("a,b\n")


# ---------------------------------------------------------------------------
# Molecular systems
# ---------------------------------------------------------------------------

class TestParseMolecule:
    def test_fixture(self) -> None:
        system = parse_molecule(MOLECULE_TEXT)
        assert len(system.atoms) == 6
        assert system.bonds == ((0, 1), (1, 2))
        assert system.atoms[3].role == "protein"

    def test_element_case_normalized(self) -> None:
        system = parse_molecule("cl 0 0 0 LIGAND\n")
        assert system.atoms[0].element == "Cl"
        assert system.atoms[0].role == "ligand"

    def test_bad_role(self) -> None:
        with pytest.raises(ParseError, match="Role") as excinfo:
            parse_molecule("C 0 0 0 ligand\nC 1 0 0 water\n")
        assert excinfo.value.line == 2

    def test_bad_coordinate(self) -> None:
        with pytest.raises(ParseError, match="Non-numeric coordinate"):
            parse_molecule("C 0 zero 0 ligand\n")

    def test_bond_to_protein_rejected(self) -> None:
        with pytest.raises(ValidationError, match="not between ligand atoms"):
            parse_molecule("C 0 0 0 ligand\nC 1 0 0 protein\nbonds:\n0 1\n")


class TestFromMolecule:
    def test_fixture_edges(self) -> None:
        g = from_molecule(parse_molecule(MOLECULE_TEXT))
        assert g.n_vertices == 5
        assert _edge_set(g) == MOLECULE_EDGES
        assert g.label(1) == "O1"

    def test_fixture_grid(self) -> None:
        c = build_complex(from_molecule(parse_molecule(MOLECULE_TEXT)), 2)
        assert c.grid.values == (0.0, 1.5, 4.0, 4.272, 5.0, 6.0, 6.185, 6.708)

    def test_bond_points_to_oxygen(self) -> None:
        system = _pair(Atom("C", 0, 0, 0, "ligand"), Atom("O", 1.2, 0, 0, "ligand"))
        assert _edge_set(from_molecule(system)) == {(0, 1, 1.2)}

    def test_equal_electronegativity_goes_both_ways(self) -> None:
        system = _pair(Atom("C", 0, 0, 0, "ligand"), Atom("C", 1.54, 0, 0, "ligand"))
        assert _edge_set(from_molecule(system)) == {(0, 1, 1.54), (1, 0, 1.54)}

    def test_distant_protein_atom_dropped(self) -> None:
        system = _pair(
            Atom("C", 0, 0, 0, "ligand"), Atom("C", 9.0, 0, 0, "protein"), bonded=False
        )
        g = from_molecule(system)
        assert g.n_vertices == 1
        assert g.n_edges == 0

    def test_protein_protein_never_joined(self) -> None:
        g = from_molecule(parse_molecule(MOLECULE_TEXT))
        assert (3, 4) not in g.edge_values
        assert (4, 3) not in g.edge_values

    def test_cliques_hold_at_most_one_protein_atom(self) -> None:
        c = build_complex(from_molecule(parse_molecule(MOLECULE_TEXT)), 3)
        for dim in c.simplices[1:]:
            for s in dim:
                assert sum(1 for v in s.vertices if v in (3, 4)) <= 1

    @pytest.mark.parametrize("step", [0.001, 0.1])
    def test_random_systems_round_to_step(self, step: float) -> None:
        rng = np.random.default_rng(37)
        for _ in range(10):
            n_ligand = int(rng.integers(2, 6))
            ligand = [
                Atom(str(rng.choice(["C", "N", "O", "S"])), *rng.uniform(0.0, 4.0, 3), "ligand")
                for _ in range(n_ligand)
            ]
            protein = [
                Atom("C", *rng.uniform(-6.0, 10.0, 3), "protein")
                for _ in range(int(rng.integers(1, 6)))
            ]
            bonds = tuple((i, i + 1) for i in range(n_ligand - 1))
            g = from_molecule(MolecularSystem(tuple(ligand + protein), bonds), rounding=step)
            for value in g.edge_values.values():
                assert value >= 0
                assert round_to(value, step) == value

    def test_non_carbon_protein_atoms_ignored(self) -> None:
        system = _pair(
            Atom("C", 0, 0, 0, "ligand"), Atom("N", 3.0, 0, 0, "protein"), bonded=False
        )
        assert from_molecule(system).n_vertices == 1

    def test_bonds_at_zero(self) -> None:
        g = from_molecule(parse_molecule(MOLECULE_TEXT), bonds_at_zero=True)
        assert g.edge_values[(0, 1)] == 0.0
        assert g.edge_values[(3, 0)] == 4.0

    def test_all_ligand_pairs(self) -> None:
        g = from_molecule(parse_molecule(MOLECULE_TEXT), all_ligand_pairs=True)
        assert _edge_set(g) == MOLECULE_EDGES | {(0, 2, 3.0), (2, 0, 3.0)}

    def test_electronegativity_override(self) -> None:
        table = ElectronegativityTable.pauling().merged({"o": 2.0})
        g = from_molecule(parse_molecule(MOLECULE_TEXT), table=table)
        assert (1, 0) in g.edge_values
        assert (0, 1) not in g.edge_values

    def test_unknown_element(self) -> None:
        system = MolecularSystem((Atom("Xx", 0, 0, 0, "ligand"),))
        with pytest.raises(ValidationError, match="unknown element 'Xx'"):
            from_molecule(system)

    def test_no_ligand_atoms(self) -> None:
        system = MolecularSystem((Atom("C", 0, 0, 0, "protein"),))
        with pytest.raises(ValidationError, match="No ligand"):
            from_molecule(system)


class TestElectronegativityTable:
    def test_pauling_values(self) -> None:
        table = ElectronegativityTable.pauling()
        assert table.get("O") > table.get("N") > table.get("C")

    def test_unknown_lookup(self) -> None:
        with pytest.raises(ValidationError, match="Unknown element"):
            ElectronegativityTable.pauling().get("Zz")

    def test_rejects_non_finite_override(self) -> None:
        with pytest.raises(ValidationError, match="finite"):
            ElectronegativityTable.pauling().merged({"C": math.inf})


class TestLoadDigraph:
    def test_dispatch(self) -> None:
        assert load_digraph(G3_FLAG, "flag").n_edges == 7
        assert load_digraph("0,1\n1,0\n", "distmat", cutoff=2.0).n_edges == 2
        assert load_digraph(MOLECULE_TEXT, "mol").n_vertices == 5

    def test_unknown_format(self) -> None:
        with pytest.raises(ValidationError, match="Unknown input format"):
            load_digraph(G3_FLAG, "xyz")

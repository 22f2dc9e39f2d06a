#!/usr/bin/env python3
"""
Run the protein-ligand pipeline on a converted structure.

The input is the molecular text format read by ``pdflap``:

    C 0.000 0.000 0.000 ligand
    O 1.200 0.000 0.000 ligand
    C 4.100 2.300 0.700 protein
    bonds:
    0 1

Bond perception and PDB conversion happen upstream. The script writes
``<stem>_spectra.csv``, ``<stem>_spectra.json`` and ``<stem>_spectra.svg``
next to the input, for k = 0, 1, 2 over consecutive filtration pairs.

Usage:
    python run_molecular_pipeline.py complex.mol [--all-ligand-pairs]
"""

import sys
from pathlib import Path

SRC = Path(__file__).resolve().parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from pdflap.errors import PdflapError  # noqa: E402
from pdflap.plot import emit_plot  # noqa: E402
from pdflap.schemas import RunConfig  # noqa: E402
from pdflap.service import SpectraService  # noqa: E402
from pdflap.utils import emit_csv, emit_json, write_output  # noqa: E402


def main() -> int:
    args = [a for a in sys.argv[1:] if not a.startswith("--")]
    if len(args) != 1:
        print(__doc__)
        return 1
    source = Path(args[0])
    stem = source.with_suffix("")

    config = RunConfig(
        input_path=str(source),
        fmt="mol",
        max_dim=2,
        cutoff=8.0,
        rounding=0.001,
        pairs="consecutive",
        all_ligand_pairs="--all-ligand-pairs" in sys.argv,
    )
    print(f"Computing spectra for {source} ...")
    try:
        report = SpectraService(config).run(
            on_progress=lambda label, current, total: print(
                f"\r  {current}/{total} {label}", end="", flush=True
            )
        )
    except PdflapError as e:
        print(f"\nError: {e}")
        return e.exit_code
    print()

    outputs = {
        f"{stem}_spectra.csv": emit_csv(report),
        f"{stem}_spectra.json": emit_json(report),
        f"{stem}_spectra.svg": emit_plot(report),
    }
    for path, text in outputs.items():
        write_output(path, text)
        print(f"✓ {path}")

    provenance = report.provenance
    print("\nStatistics:")
    print(f"  vertices: {provenance['n_vertices']}  edges: {provenance['n_edges']}")
    print(f"  simplices per dimension: {provenance['simplex_counts']}")
    print(f"  filtration values: {len(provenance['grid'])}")
    zeroth = report.for_dim(0)
    if zeroth:
        print(f"  beta_0 at the final pair: {zeroth[-1].betti}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

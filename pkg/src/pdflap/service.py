"""SpectraService — orchestration layer between the CLI and the numerics.

The CLI delegates a whole run to SpectraService, which owns:
  • Input loading and parsing (flag file, distance matrix, molecule)
  • Complex construction one dimension above the reported range
  • The pair schedule over the filtration grid
  • Per-(k, a, b) spectra, optionally on a worker pool
  • Oracle cross-checks and aggregation into a Report
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

from . import __version__
from .errors import VerificationError
from .flag_builder import FilteredFlagComplex, build_complex
from .ingest import load_digraph
from .laplacian import laplacian, spectra
from .model import FilteredDigraph
from .oracle import oracle_persistent_betti
from .persistent import persistent_laplacian, persistent_spectra
from .schemas import Report, RunConfig, SpectraRecord, format_value, parse_pairs
from .utils import load_electronegativity, read_input

log = logging.getLogger(__name__)

ProgressCallback = Callable[[str, int, int], None]
WorkItem = tuple[int, float, float]


class SpectraService:
    """End-to-end persistent spectra for one :class:`RunConfig`.

    Usage::

        svc = SpectraService(RunConfig(input_path="g3.flag", pairs="inf:inf"))
        report = svc.run()
        for r in report.records:
            print(r.k, r.betti, r.eigenvalues)
    """

    def __init__(self, config: RunConfig) -> None:
        config.validate()
        self.config = config
        self.timings: dict[str, float] = {}

    # ------------------------------------------------------------------
    # Stages
    # ------------------------------------------------------------------

    def load_digraph(self) -> FilteredDigraph:
        """Read and parse the configured input.

        Raises:
            InputError: unreadable input.
            ValidationError: malformed content.
        """
        cfg = self.config
        text = read_input(cfg.input_path)
        table = load_electronegativity(cfg.electronegativity) if cfg.fmt == "mol" else None
        return load_digraph(
            text,
            cfg.fmt,
            cutoff=cfg.cutoff,
            rounding=cfg.rounding,
            strict=cfg.strict,
            table=table,
            bonds_at_zero=cfg.bonds_at_zero,
            all_ligand_pairs=cfg.all_ligand_pairs,
        )

    def build(self, digraph: FilteredDigraph) -> FilteredFlagComplex:
        # One dimension more than reported, so the top L_k keeps its up term.
        return build_complex(digraph, self.config.max_dim + 1)

    def schedule(self, complex_: FilteredFlagComplex) -> list[tuple[float, float]]:
        name, explicit = parse_pairs(self.config.pairs)
        if name == "explicit":
            return explicit
        grid = complex_.grid
        if name == "diagonal":
            return grid.diagonal_pairs()
        if name == "all":
            return grid.all_pairs()
        return grid.consecutive_pairs()

    def _spectrum(self, complex_: FilteredFlagComplex, item: WorkItem) -> SpectraRecord:
        k, a, b = item
        t0 = time.perf_counter()
        if a == b:
            record = spectra(laplacian(complex_, k, a), zero_tol=self.config.zero_tol)
        else:
            pl = persistent_laplacian(complex_, k, a, b, reduction=self.config.reduction)
            record = persistent_spectra(pl, zero_tol=self.config.zero_tol)
        log.debug(
            "L_%d^{%s,%s}: size %d, betti %d, %.4fs",
            k, a, b, record.n_eigenvalues, record.betti, time.perf_counter() - t0,
        )
        return record

    def compute(
        self,
        complex_: FilteredFlagComplex,
        pairs: list[tuple[float, float]],
        on_progress: Optional[ProgressCallback] = None,
    ) -> list[SpectraRecord]:
        """Spectra for every ``k <= max_dim`` and every scheduled pair.

        Work items run on ``config.workers`` threads; results are merged in
        schedule order regardless of completion order.
        """
        items: list[WorkItem] = [
            (k, a, b) for k in range(self.config.max_dim + 1) for a, b in pairs
        ]
        total = len(items)
        if on_progress and total > 0:
            on_progress("Spectra", 0, total)

        def _label(item: WorkItem) -> str:
            k, a, b = item
            return f"L_{k} ({format_value(a)}, {format_value(b)})"

        records: list[SpectraRecord] = []
        if self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                for done, (item, record) in enumerate(
                    zip(items, pool.map(lambda it: self._spectrum(complex_, it), items)),
                    start=1,
                ):
                    records.append(record)
                    if on_progress:
                        on_progress(_label(item), done, total)
        else:
            for done, item in enumerate(items, start=1):
                records.append(self._spectrum(complex_, item))
                if on_progress:
                    on_progress(_label(item), done, total)
        return records

    def verify(
        self, complex_: FilteredFlagComplex, records: list[SpectraRecord]
    ) -> list[str]:
        """Attach oracle Betti numbers; return a line per disagreement."""
        mismatches: list[str] = []
        for record in records:
            record.oracle_betti = oracle_persistent_betti(
                complex_, record.k, record.a, record.b
            )
            if record.verified is False:
                mismatches.append(
                    f"k={record.k} a={format_value(record.a)} b={format_value(record.b)}: "
                    f"spectral {record.betti} != exact {record.oracle_betti}"
                )
        return mismatches

    # ------------------------------------------------------------------
    # Whole run
    # ------------------------------------------------------------------

    def run(self, on_progress: Optional[ProgressCallback] = None) -> Report:
        """Parse, build, compute and (optionally) verify.

        Raises:
            InputError, ValidationError, CapacityError, SolverError: from the
                stages above.
            VerificationError: under ``verify`` when any Betti number
                disagrees with the oracle; the report is attached.
        """
        total_start = time.perf_counter()

        t0 = time.perf_counter()
        digraph = self.load_digraph()
        self.timings["parse"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        complex_ = self.build(digraph)
        self.timings["build"] = time.perf_counter() - t0

        pairs = self.schedule(complex_)
        t0 = time.perf_counter()
        records = self.compute(complex_, pairs, on_progress=on_progress)
        self.timings["spectra"] = time.perf_counter() - t0

        mismatches: list[str] = []
        if self.config.verify:
            t0 = time.perf_counter()
            mismatches = self.verify(complex_, records)
            self.timings["verify"] = time.perf_counter() - t0
        self.timings["total"] = time.perf_counter() - total_start

        report = Report(
            records=records,
            provenance={
                "version": __version__,
                "config": self.config.to_dict(),
                "n_vertices": digraph.n_vertices,
                "n_edges": digraph.n_edges,
                "clamped_edges": len(digraph.clamped),
                "simplex_counts": complex_.counts()[: self.config.max_dim + 1],
                "grid": [format_value(g) for g in complex_.grid],
                "pairs": [[format_value(a), format_value(b)] for a, b in pairs],
                "timings": dict(self.timings),
            },
        )
        if mismatches:
            raise VerificationError(
                f"{len(mismatches)} Betti number(s) disagree with the exact oracle.",
                mismatches=mismatches,
                report=report,
            )
        return report


def run(config: RunConfig, on_progress: Optional[ProgressCallback] = None) -> Report:
    """Convenience wrapper around :meth:`SpectraService.run`."""
    return SpectraService(config).run(on_progress=on_progress)

"""Static SVG rendering of a report: Betti and lambda traces per dimension."""

from __future__ import annotations

import io
import math

import matplotlib
from matplotlib.figure import Figure

from .errors import ValidationError
from .schemas import Report, SpectraRecord, format_value

# Stable ids and no timestamp so identical reports give identical files.
_SVG_RC = {"svg.hashsalt": "pdflap", "svg.fonttype": "none"}


def _positions(values: list[float]) -> tuple[list[float], list[str] | None]:
    """Plot coordinates; non-finite values fall back to evenly spaced ticks."""
    if all(math.isfinite(v) for v in values):
        return values, None
    return [float(i) for i in range(len(values))], [format_value(v) for v in values]


def split_traces(records: list[SpectraRecord]) -> dict[int, list[SpectraRecord]]:
    """Group one dimension's records by how many grid steps ``b`` lies past ``a``.

    Each trace is sorted by ``a`` and holds every ``a`` at most once.
    """
    points = sorted({r.a for r in records} | {r.b for r in records})
    position = {v: i for i, v in enumerate(points)}
    traces: dict[int, list[SpectraRecord]] = {}
    for r in records:
        traces.setdefault(position[r.b] - position[r.a], []).append(r)
    return {
        offset: sorted(traces[offset], key=lambda r: r.a) for offset in sorted(traces)
    }


def _trace_label(offset: int) -> str:
    if offset == 0:
        return "b = a"
    return f"b = a + {offset} step" + ("s" if offset > 1 else "")


def emit_plot(report: Report) -> str:
    """Render ``beta_k^{a,b}`` and ``lambda_k^{a,b}`` against ``a`` as SVG.

    One row of two panels per dimension and one trace per offset between
    ``a`` and ``b``; missing lambda values leave gaps.

    Raises:
        ValidationError: if the report has no records.
    """
    if not report.records:
        raise ValidationError("Cannot plot an empty report.")
    dims = sorted({r.k for r in report.records})

    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=(8.0, 2.6 * len(dims)))
        axes = fig.subplots(len(dims), 2, squeeze=False)
        for row, k in enumerate(dims):
            records = report.for_dim(k)
            starts = sorted({r.a for r in records})
            xs_all, ticks = _positions(starts)
            x_of = dict(zip(starts, xs_all))
            traces = split_traces(records)
            ax_b, ax_l = axes[row]
            for i, (offset, trace) in enumerate(traces.items()):
                xs = [x_of[r.a] for r in trace]
                lam = [
                    math.nan if r.lambda_min_nonzero is None else r.lambda_min_nonzero
                    for r in trace
                ]
                label = _trace_label(offset)
                ax_b.step(xs, [r.betti for r in trace], where="post", marker="o",
                          color=f"C{i}", label=label)
                ax_l.step(xs, lam, where="post", marker="o", color=f"C{i}", label=label)
            ax_b.set_ylabel(f"beta_{k}")
            ax_l.set_ylabel(f"lambda_{k}")
            for ax in (ax_b, ax_l):
                ax.set_xlabel("a")
                ax.grid(True, alpha=0.3)
                if ticks is not None:
                    ax.set_xticks(xs_all)
                    ax.set_xticklabels(ticks)
            if len(traces) > 1:
                ax_l.legend(fontsize="x-small")
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()

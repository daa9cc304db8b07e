"""Render the four contest figure datasets to vector images.

Input CSVs are the ones `allpay figures` emits; this package does no
numerical work beyond reading them (axis limits come from column
extrema).  Each figure id has a fixed schema and a fixed plot layout:

    fig1  profit vs lambda, one panel, four series (OPT/FIX/SYM-1/SYM-2)
          with the lambda in {0.1, 0.3} values marked
    fig2  effort vs type, one panel per lambda, five series
    fig3  prize vs winner effort, one panel per lambda, two series,
          x-range pinned to the panel's maximum effort
    fig4  profit vs number of agents, one panel per lambda, three series
          (OPT-n, FIX-n and the fixed-prize saturation bound)

Multi-panel figures write one image per panel (suffix `_lam<value>`).
Rendering is a pure function of the CSV: building the plot layout twice
yields the identical specification.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass
from pathlib import Path

__all__ = ["SchemaError", "SeriesSpec", "PanelSpec", "load_rows", "build_spec",
           "render", "main", "SCHEMAS"]

SCHEMAS = {
    "fig1": ("lambda", "opt", "fix", "sym1", "sym2"),
    "fig2": ("lambda", "v", "opt", "fix1", "fix2", "sym1", "sym2"),
    "fig3": ("lambda", "b", "Z1", "Z2"),
    "fig4": ("lambda", "n", "opt_n", "fix_n", "bound"),
}

# lambda values whose profit points fig1 highlights.
FIG1_MARKED = (0.1, 0.3)


class SchemaError(ValueError):
    """The CSV does not match the documented schema for the figure id."""


@dataclass(frozen=True)
class SeriesSpec:
    label: str
    x: tuple
    y: tuple
    style: str = "line"       # "line" | "dashed" | "marks"


@dataclass(frozen=True)
class PanelSpec:
    title: str
    xlabel: str
    ylabel: str
    xlim: tuple
    ylim: tuple
    series: tuple
    suffix: str = ""          # appended to the output stem


def load_rows(path: Path, figure_id: str) -> list[dict]:
    """Read and validate one figure CSV; values become floats."""
    if figure_id not in SCHEMAS:
        raise SchemaError(f"unknown figure id {figure_id!r}; know {sorted(SCHEMAS)}")
    expected = SCHEMAS[figure_id]
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in expected if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing column(s) {', '.join(missing)} for {figure_id} "
                f"(expected header {','.join(expected)})")
        try:
            rows = [{c: float(row[c]) for c in expected} for row in reader]
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{path}: non-numeric cell: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _span(values, pad=0.04):
    lo, hi = min(values), max(values)
    margin = (hi - lo) * pad or max(abs(hi), 1.0) * pad
    return (lo - margin, hi + margin)


def _groups(rows):
    """Rows grouped by their lambda value, in first-seen order."""
    order = []
    by_lam = {}
    for row in rows:
        lam = row["lambda"]
        if lam not in by_lam:
            by_lam[lam] = []
            order.append(lam)
        by_lam[lam].append(row)
    return [(lam, by_lam[lam]) for lam in order]


def _col(rows, name):
    return tuple(r[name] for r in rows)


def build_spec(figure_id: str, rows: list[dict]) -> tuple[PanelSpec, ...]:
    """Pure layout builder: CSV rows -> panel specifications."""
    if figure_id == "fig1":
        lam = _col(rows, "lambda")
        series = [SeriesSpec(label, lam, _col(rows, col))
                  for label, col in (("OPT", "opt"), ("FIX", "fix"),
                                     ("SYM-1", "sym1"), ("SYM-2", "sym2"))]
        marked = [r for r in rows if any(abs(r["lambda"] - m) < 1e-12 for m in FIG1_MARKED)]
        for label, col in (("OPT", "opt"), ("FIX", "fix"),
                           ("SYM-1", "sym1"), ("SYM-2", "sym2")):
            series.append(SeriesSpec(f"_{label} marks", _col(marked, "lambda"),
                                     _col(marked, col), style="marks"))
        everything = [v for s in series[:4] for v in s.y]
        return (PanelSpec(
            title="Profit comparison",
            xlabel="principal valuation", ylabel="profit",
            xlim=_span(lam), ylim=_span(everything),
            series=tuple(series)),)

    if figure_id == "fig2":
        panels = []
        for lam, grp in _groups(rows):
            v = _col(grp, "v")
            series = tuple(
                SeriesSpec(label, v, _col(grp, col))
                for label, col in (("OPT (both agents)", "opt"),
                                   ("FIX agent 1", "fix1"), ("FIX agent 2", "fix2"),
                                   ("SYM-1", "sym1"), ("SYM-2", "sym2")))
            everything = [y for s in series for y in s.y]
            panels.append(PanelSpec(
                title=f"Equilibrium effort, valuation {lam:g}",
                xlabel="agent type", ylabel="effort",
                xlim=(min(v), max(v)), ylim=_span(everything),
                series=series, suffix=f"_lam{lam:g}"))
        return tuple(panels)

    if figure_id == "fig3":
        panels = []
        for lam, grp in _groups(rows):
            b = _col(grp, "b")
            series = (SeriesSpec("agent 1 prize", b, _col(grp, "Z1")),
                      SeriesSpec("agent 2 prize", b, _col(grp, "Z2")))
            everything = [y for s in series for y in s.y]
            # x-range pinned to the panel's maximum effort
            panels.append(PanelSpec(
                title=f"Prize schedules, valuation {lam:g}",
                xlabel="winner effort", ylabel="prize",
                xlim=(0.0, max(b)), ylim=_span(everything),
                series=series, suffix=f"_lam{lam:g}"))
        return tuple(panels)

    if figure_id == "fig4":
        panels = []
        for lam, grp in _groups(rows):
            n = _col(grp, "n")
            series = (SeriesSpec("OPT-n", n, _col(grp, "opt_n")),
                      SeriesSpec("FIX-n", n, _col(grp, "fix_n")),
                      SeriesSpec("fixed-prize bound", n, _col(grp, "bound"),
                                 style="dashed"))
            everything = [y for s in series for y in s.y]
            panels.append(PanelSpec(
                title=f"Profit vs number of agents, valuation {lam:g}",
                xlabel="number of agents", ylabel="profit",
                xlim=(min(n), max(n)), ylim=_span(everything),
                series=series, suffix=f"_lam{lam:g}"))
        return tuple(panels)

    raise SchemaError(f"unknown figure id {figure_id!r}")


def _draw(panel: PanelSpec, out: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    for s in panel.series:
        if s.style == "marks":
            ax.plot(s.x, s.y, "o", color="black", markersize=4, zorder=5)
        elif s.style == "dashed":
            ax.plot(s.x, s.y, "--", label=s.label)
        else:
            ax.plot(s.x, s.y, label=s.label)
    ax.set_xlim(*panel.xlim)
    ax.set_ylim(*panel.ylim)
    ax.set_xlabel(panel.xlabel)
    ax.set_ylabel(panel.ylabel)
    ax.set_title(panel.title, fontsize=10)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def render(figure_id: str, csv_path, out_path) -> list[Path]:
    """Render one figure dataset; returns the written image paths."""
    csv_path = Path(csv_path)
    out_path = Path(out_path)
    if out_path.suffix == "":
        out_path = out_path.with_suffix(".pdf")
    rows = load_rows(csv_path, figure_id)
    panels = build_spec(figure_id, rows)
    written = []
    for panel in panels:
        target = out_path if not panel.suffix else out_path.with_name(
            out_path.stem + panel.suffix + out_path.suffix)
        target.parent.mkdir(parents=True, exist_ok=True)
        _draw(panel, target)
        written.append(target)
    return written


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if len(argv) != 3:
        print("usage: figviz <figure-id> <csv> <out-image>", file=sys.stderr)
        return 1
    figure_id, csv_path, out_path = argv
    try:
        written = render(figure_id, csv_path, out_path)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

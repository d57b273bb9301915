"""
Plot-data emission.

Writes one CSV per figure next to the main output, plus a standalone
matplotlib script that draws them. Nothing is rendered here.
"""

from pathlib import Path
from typing import Optional, Sequence

import structlog
from pydantic import BaseModel

from ..errors import OutputError
from ..schemas.models import AnalyzerModel, ExperimentKind, LabPoint, RunManifest
from .writer import atomic_write, render_table

logger = structlog.get_logger()

# (file suffix, [(column, row attribute)])
FigureSpec = tuple[str, list[tuple[str, str]]]

_EXPECTATIONS = [
    ("phi", "phi"),
    ("s1", "s1"),
    ("s2", "s2"),
    ("s1s2", "s1s2"),
    ("theory_s1", "theory_s1"),
    ("theory_s2", "theory_s2"),
    ("theory_s1s2", "theory_s1s2"),
    ("stderr_s1", "stderr_s1"),
    ("stderr_s2", "stderr_s2"),
    ("stderr_s1s2", "stderr_s1s2"),
]

_INEQUALITY = [
    ("phi", "phi"),
    ("ozawa_lhs", "ozawa_lhs"),
    ("heisenberg_product", "heisenberg_product"),
    ("theory_ozawa_lhs", "theory_ozawa_lhs"),
    ("theory_product", "theory_product"),
    ("bound", "bound"),
    ("stderr_ozawa_lhs", "stderr_ozawa_lhs"),
    ("stderr_heisenberg_product", "stderr_product"),
]

_ROBERTSON = [
    ("az", "az"),
    ("lhs", "lhs"),
    ("rhs", "rhs"),
    ("theory_lowerbound", "theory_rhs"),
    ("stderr_lhs", "stderr_lhs"),
    ("stderr_rhs", "stderr_rhs"),
]

_TRIPLE = [
    ("phi", "phi"),
    ("s1", "s1"),
    ("s2", "s2"),
    ("s1s2", "s1s2"),
    ("s1s3", "s1s3"),
    ("s2s3", "s2s3"),
    ("theory_pair_x_s1", "pair_x_s1"),
    ("theory_pair_x_s2", "pair_x_s2"),
    ("theory_pair_y_s1", "pair_y_s1"),
    ("theory_pair_y_s2", "pair_y_s2"),
    ("theory_pair_s1s2", "pair_y_s1s2"),
]

_ORACLE = [
    ("phi", "phi"),
    ("theory_s1", "theory_s1"),
    ("theory_s2", "theory_s2"),
    ("theory_s1s2", "theory_s1s2"),
    ("theory_ozawa_lhs", "theory_ozawa_lhs"),
    ("theory_product", "theory_product"),
    ("bound", "bound"),
]


def figure_specs(manifest: RunManifest) -> list[FigureSpec]:
    kind = manifest.experiment
    if kind is ExperimentKind.UNCERTAINTY_SWEEP:
        expectations = "expectations_dlm" if manifest.model is AnalyzerModel.DLM else "expectations"
        return [(expectations, _EXPECTATIONS), ("inequality", _INEQUALITY)]
    if kind is ExperimentKind.ROBERTSON_SWEEP:
        return [("robertson", _ROBERTSON)]
    if kind is ExperimentKind.FILTERING_TRIPLE:
        return [("triple", _TRIPLE)]
    return [("theory", _ORACLE)]


PLOT_SCRIPT = '''#!/usr/bin/env python
"""Plot the simulation data files written next to this script."""
import argparse
import os

import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))

# each group is drawn on one set of axes
GROUPS = {groups!r}


def load(name):
    with open(os.path.join(HERE, name), encoding="utf-8") as f:
        lines = [line for line in f if not line.startswith("#")]
    names = lines[0].strip().split(",")
    return names, np.loadtxt(lines[1:], delimiter=",", ndmin=2)


def plot_file(name, ax, overlay=False):
    names, data = load(name)
    x = data[:, 0]
    for i, col in enumerate(names[1:], start=1):
        if col.startswith("stderr_"):
            continue
        if overlay:
            ax.plot(x, data[:, i], "s", mfc="none", label="lab " + col)
        elif col.startswith("theory") or col == "bound":
            ax.plot(x, data[:, i], "-", label=col)
        elif "stderr_" + col in names:
            ax.errorbar(x, data[:, i], yerr=data[:, names.index("stderr_" + col)], fmt="o", ms=3, label=col)
        else:
            ax.plot(x, data[:, i], "o", ms=3, label=col)
    ax.set_xlabel(names[0])


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Plot simulation results")
    parser.add_argument("--save", action="store_true", help="write PNG files instead of showing")
    args = parser.parse_args()

    for group in GROUPS:
        fig, ax = plt.subplots()
        for j, name in enumerate(group):
            plot_file(name, ax, overlay=j > 0)
        ax.set_title(group[0])
        ax.legend()
        if args.save:
            fig.savefig(os.path.join(HERE, os.path.splitext(group[0])[0] + ".png"), dpi=150)
    if not args.save:
        plt.show()
'''


def emit_plot_data(
    manifest: RunManifest,
    rows: Sequence[BaseModel],
    lab_points: Optional[Sequence[LabPoint]] = None,
) -> list[Path]:
    """Write <stem>_<figure>.csv files and <stem>_plot.py; returns the paths."""
    if not rows:
        raise OutputError("No result rows to plot")
    target = Path(manifest.output_path)
    stem = target.parent / target.stem

    written = []
    groups = []
    for suffix, columns in figure_specs(manifest):
        path = Path(f"{stem}_{suffix}.csv")
        text = render_table(
            manifest,
            [name for name, _ in columns],
            [[getattr(row, attr) for _, attr in columns] for row in rows],
        )
        written.append(atomic_write(path, text))
        groups.append([path.name])

    if lab_points:
        path = Path(f"{stem}_lab.csv")
        text = render_table(
            manifest,
            ["phi", "ozawa_lhs", "heisenberg_product"],
            [[p.phi, p.ozawa_lhs, p.product] for p in lab_points],
        )
        written.append(atomic_write(path, text))
        for group in groups:
            if group[0].endswith("_inequality.csv"):
                group.append(path.name)

    script = Path(f"{stem}_plot.py")
    written.append(atomic_write(script, PLOT_SCRIPT.replace("{groups!r}", repr(groups))))

    logger.info("Plot data emitted", files=len(written), experiment=manifest.experiment.value)
    return written

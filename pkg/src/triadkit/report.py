"""Appraisal reports: tab-separated tables plus optional PNG figures."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .appraisal import REFINING, AppraisalModel, Assignment, GeneralizationReport
from .values import format_value


@dataclass(frozen=True)
class AppraisalReport:
    analysis: GeneralizationReport | None
    scores: tuple[tuple[str, int, object], ...]

    def lines(self) -> list[str]:
        out = []
        if self.analysis is not None:
            out.extend(self.analysis.lines())
        if self.scores:
            out.append("unit\tdepth\tscore")
            out.extend(f"{u}\t{d}\t{format_value(s)}" for u, d, s in self.scores)
        return out


def build_report(model: AppraisalModel, metrics: Sequence[str],
                 sequence: Sequence[Assignment], units: Sequence[str] | None = None,
                 weights: Mapping[str, float] | None = None) -> AppraisalReport:
    analysis = model.analyse(metrics, sequence) if sequence else None
    org = model.functional.org
    units = list(units) if units is not None else org.units
    scores = tuple((u, org.depth(u), model.appraise(u, metrics, weights)) for u in units)
    return AppraisalReport(analysis, scores)


def render_figures(report: AppraisalReport, directory) -> list[Path]:
    """Write the generalization grid and the unit score chart as PNG files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    if report.analysis is not None:
        rows = report.analysis.rows
        steps = [str(a) for a in report.analysis.sequence]
        grid = [[1 if s == REFINING else 0 for s in r.steps] for r in rows]
        fig, ax = plt.subplots(figsize=(2.2 + 1.4 * len(steps), 1.4 + 0.5 * len(rows)))
        ax.imshow(grid, cmap="Blues", vmin=0, vmax=1.4, aspect="auto")
        ax.set_xticks(range(len(steps)), [f"step {i + 1}" for i in range(len(steps))])
        ax.set_yticks(range(len(rows)), [r.metric for r in rows])
        for i, r in enumerate(rows):
            for j, s in enumerate(r.steps):
                ax.text(j, i, s, ha="center", va="center", fontsize=7)
        legend = "\n".join(f"step {i + 1}: {s}" for i, s in enumerate(steps))
        ax.set_title(report.analysis.verdict, fontsize=9)
        fig.text(0.01, 0.01, legend, fontsize=6, va="bottom")
        fig.tight_layout(rect=(0, 0.06 * len(steps), 1, 1))
        path = directory / "generalization.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    if report.scores:
        names = [u for u, _, _ in report.scores]
        values = [float(s) for _, _, s in report.scores]
        depths = [d for _, d, _ in report.scores]
        fig, ax = plt.subplots(figsize=(6, 0.6 + 0.35 * len(names)))
        ax.barh(range(len(names)), values, color=[f"C{d}" for d in depths])
        ax.set_yticks(range(len(names)), names, fontsize=8)
        ax.invert_yaxis()
        ax.set_xlabel("weighted score")
        fig.tight_layout()
        path = directory / "unit_scores.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written

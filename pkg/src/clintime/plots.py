"""Figures for evaluation reports and timelines (rendered off-screen to PNG)."""
from __future__ import annotations

from datetime import date
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .corpus import EVENT_CATEGORIES  # noqa: E402

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
STYLE = {
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "svg.hashsalt": "clintime",
}
COLORS = {"strict": "#4c72b0", "lenient": "#dd8452", "other": "#55a868"}


def size(width: float = 7.0, ratio: float = GOLDEN):
    return width, width * ratio


def save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def report_figure(report, path) -> Path:
    """Event F1 by category, timex attribute accuracies, and link scores."""
    vals = report.values()
    with plt.rc_context(STYLE):
        fig, (ax1, ax2, ax3) = plt.subplots(1, 3, figsize=size(10, 0.35))
        cats = [*EVENT_CATEGORIES, "micro"]
        x = np.arange(len(cats))
        for k, mode in enumerate(("strict", "lenient")):
            f1 = [vals[f"event.{c}.{mode}.f1"] for c in cats]
            ax1.bar(x + (k - 0.5) * 0.38, f1, 0.38, label=mode, color=COLORS[mode])
        ax1.set_xticks(x, cats)
        ax1.set_title("EVENT F1")
        ax1.legend(frameon=False)

        names = ["lenient F1", "type", "value", "modifier", "primary"]
        keys = ["timex.lenient.f1", "timex.type_accuracy", "timex.value_accuracy",
                "timex.modifier_accuracy", "timex.primary_score"]
        ax2.bar(names, [vals[k] for k in keys], color=COLORS["lenient"])
        ax2.set_title("TIMEX3")
        ax2.tick_params(axis="x", rotation=30)

        x = np.arange(3)
        for k, metric in enumerate(("customary", "tempeval3")):
            ys = [vals[f"tlink.{metric}.{m}"] for m in ("precision", "recall", "f1")]
            ax3.bar(x + (k - 0.5) * 0.38, ys, 0.38, label=metric, color=(COLORS["strict"], COLORS["other"])[k])
        ax3.set_xticks(x, ["P", "R", "F1"])
        ax3.set_title(f"TLINK ({vals['tlink.subset']})")
        ax3.legend(frameon=False)
        for ax in (ax1, ax2, ax3):
            ax.set_ylim(0, 1.05)
        fig.tight_layout()
        return save(fig, path)


def timeline_figure(rows, path, title: str = "") -> Path:
    """Dated events on a horizontal time axis; undated events listed underneath."""
    dated = [r for r in rows if r.sort_date]
    undated = [r for r in rows if not r.sort_date]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=size(8, 0.5))
        if dated:
            xs = [date.fromisoformat(r.sort_date) for r in dated]
            ys = np.arange(len(dated))[::-1]
            marker = {"Before": "<", "After": ">", "Overlap": "o"}
            for xv, yv, r in zip(xs, ys, dated):
                ax.plot([xv], [yv], marker=marker.get(r.relation_to_dct, "s"), color=COLORS["strict"])
                ax.annotate(r.surface, (xv, yv), xytext=(6, -3), textcoords="offset points")
            ax.set_yticks([])
            fig.autofmt_xdate()
        else:
            ax.set_axis_off()
        if undated:
            fig.text(0.01, 0.01, "Unknown: " + ", ".join(r.surface for r in undated), fontsize=7)
        ax.set_title(title or "Timeline")
        fig.tight_layout()
        return save(fig, path)

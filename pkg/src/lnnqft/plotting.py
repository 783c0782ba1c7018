"""Matplotlib figures written next to the delimited report output."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.4),
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def plot_table1(rows, path) -> None:
    ns = [r.n for r in rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(ns, [r.ours for r in rows], "o-", label="ladder construction")
        ax.plot(ns, [r.ref17 for r in rows], "s--", label="SWAP-interleaved baseline")
        ax.plot(ns, [r.ref15 for r in rows], "^:", label="published heuristic (ref15)")
        pairs = [(r.n, r.ref16) for r in rows if r.ref16 is not None]
        if pairs:
            ax.plot(*zip(*pairs), "v:", label="published heuristic (ref16)")
        ax.set_xlabel("qubits n")
        ax.set_ylabel("CNOT count")
        ax.set_xticks(ns)
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)


def plot_histogram(histogram: dict[str, int], path, title: str = "", highlight: str | None = None) -> None:
    keys = sorted(histogram)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        colors = ["C1" if k == highlight else "C0" for k in keys]
        ax.bar(keys, [histogram[k] for k in keys], color=colors)
        ax.set_xlabel("outcome")
        ax.set_ylabel("counts")
        if title:
            ax.set_title(title)
        if len(keys) > 8:
            ax.tick_params(axis="x", labelrotation=90)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)

"""Matplotlib figures that accompany the comparison report."""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}
BRANCH_STYLE = {"+": ("#c0392b", "-"), "-": ("#2471a3", "--"), "": ("#1e8449", "-")}


def new_figure(width=6.4, height=None):
    golden = (math.sqrt(5) - 1.0) / 2.0
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(width, height or width * golden))
    return fig, ax


def save(fig, path):
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_levels(rows, path):
    """E_total against theta, one line per (n, m, branch)."""
    groups = defaultdict(list)
    for r in rows:
        if math.isfinite(r.E_total):
            groups[(r.n, r.m, r.branch)].append((r.theta, r.E_total))
    with plt.rc_context(STYLE):
        fig, ax = new_figure()
        for (n, m, br), pts in sorted(groups.items()):
            pts.sort()
            color, ls = BRANCH_STYLE[br]
            label = f"n={n}, m={m}" + (f", {br}" if br else "")
            ax.plot([p[0] for p in pts], [p[1] for p in pts], ls, color=color, marker="_", label=label, lw=1)
        ax.set_xlabel(r"$\theta$")
        ax.set_ylabel("energy")
        if len(groups) <= 12:
            ax.legend(frameon=False, ncol=2)
        return save(fig, path)


def plot_closed_form_audit(audits, path):
    """log10 of the relative deviation of each printed closed form from quadrature."""
    labels, values = [], []
    for n, m, delta_label, cmp, err in audits:
        if cmp is None:
            continue
        for name, rel in sorted(cmp.discrepancies().items()):
            if not name.startswith("printed") or not math.isfinite(rel):
                continue
            labels.append(f"{name[8:]} n={n} m={m} d={delta_label}")
            values.append(math.log10(max(rel, 1e-17)))
    with plt.rc_context(STYLE):
        fig, ax = new_figure(width=7.0, height=max(2.5, 0.22 * len(labels) + 1))
        if labels:
            ax.barh(range(len(labels)), values, color="#7f7f7f")
            ax.set_yticks(range(len(labels)))
            ax.set_yticklabels(labels, fontsize=7)
            ax.axvline(math.log10(1e-6), color="#c0392b", lw=0.8, ls="--")
        ax.set_xlabel("log10 relative deviation from quadrature")
        return save(fig, path)

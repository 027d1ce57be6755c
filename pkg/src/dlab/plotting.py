"""Figures for scan reports. Uses the non-interactive Agg backend."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .scan import FILTERS  # noqa: E402

COLORS = {
    "lemma41": "#4c72b0",
    "thm11": "#55a868",
    "thm12": "#c44e52",
    "thm15": "#8172b2",
    "survivors": "#ccb974",
}
LABELS = {
    "lemma41": "standard class",
    "thm11": "c or s shape",
    "thm12": "r = pq, small p",
    "thm15": "r = P phi, coprime",
    "survivors": "extended to x_max",
}


def plot_report(report, path, dpi=120):
    """Stacked bars of triples per r by the filter that settled them, plus surviving s."""
    rows = report.per_r
    rs = [row["r"] for row in rows]
    fig, (ax, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True,
                                  gridspec_kw={"height_ratios": [2, 1]})
    bottom = [0] * len(rows)
    for key in FILTERS + ("survivors",):
        col = "survivors" if key == "survivors" else f"pruned_{key}"
        vals = [row[col] for row in rows]
        if any(vals):
            ax.bar(rs, vals, bottom=bottom, color=COLORS[key], label=LABELS[key], width=0.8)
        bottom = [b + v for b, v in zip(bottom, vals)]
    ax.set_ylabel("triples with s <= s_max")
    cfg = report.config
    ax.set_title(f"r = {cfg['r_min']}..{cfg['r_max']}, s_max = {cfg['s_max']}, "
                 f"x_max = {cfg['x_max']}: {report.totals['quadruples']} quadruples")
    if rows:
        ax.legend(loc="upper left", fontsize=8, frameon=False)

    pts = [(row["r"], s) for row in rows for s in row.get("survivor_s", [])]
    if pts:
        ax2.scatter(*zip(*pts), s=12, color=COLORS["survivors"])
        ax2.set_yscale("log")
    quads = [(a["r"], a["s"]) for a in report.anomalies if a.get("tag") == "quadruple"]
    if quads:
        ax2.scatter(*zip(*quads), s=40, marker="x", color="k", label="quadruple")
        ax2.legend(fontsize=8, frameon=False)
    ax2.set_ylabel("surviving s")
    ax2.set_xlabel("r")
    for a in (ax, ax2):
        a.spines["top"].set_visible(False)
        a.spines["right"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path

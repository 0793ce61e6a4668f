"""Figure rendering for repair reports.

Renders PNGs next to the CSV/JSON output: per-failure download bars
against the cut-set bound, and the exact overhead ratios.  Uses the Agg
backend so rendering works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SCHEME_COLORS = {"trace": "#3572b0", "naive": "#c0504d"}


def render_report_figures(report, outdir, basename: str = "report") -> list[Path]:
    """One figure: per-stripe download per failure event vs the cut-set
    bound (left), and total/per-helper ratios (right)."""
    rows = report.rows
    if not rows:
        return []
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    labels = [f"n{r.node}\np={r.prime}" for r in rows]
    xs = range(len(rows))
    per_stripe = [r.subsymbols / r.stripe_count if r.stripe_count else 0 for r in rows]
    cutset_per_stripe = [
        float(r.cutset) / r.stripe_count if r.stripe_count else float(r.cutset)
        for r in rows
    ]
    colors = [_SCHEME_COLORS.get(r.scheme, "#777777") for r in rows]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.bar(xs, per_stripe, color=colors, label=None)
    ax1.plot(xs, cutset_per_stripe, "k--", marker="_", markersize=18, linewidth=1,
             label="cut-set bound")
    ax1.set_xticks(list(xs))
    ax1.set_xticklabels(labels, fontsize=8)
    ax1.set_ylabel("sub-symbols downloaded per stripe")
    ax1.set_xlabel("failure event")
    ax1.set_title("repair download vs cut-set bound")
    handles = [
        plt.Rectangle((0, 0), 1, 1, color=_SCHEME_COLORS["trace"], label="trace"),
        plt.Rectangle((0, 0), 1, 1, color=_SCHEME_COLORS["naive"], label="naive"),
    ]
    line = ax1.get_lines()[0]
    ax1.legend(handles=handles + [line], fontsize=8)

    ratio_total = [float(r.ratio_total) for r in rows]
    ratio_helper = [float(r.ratio_helper) for r in rows]
    ax2.plot(xs, ratio_total, "o-", color="#3572b0", label="total / cut-set")
    ax2.plot(xs, ratio_helper, "s--", color="#8064a2", label="per-helper / optimal")
    ax2.axhline(1.0, color="k", linewidth=0.8)
    ax2.set_xticks(list(xs))
    ax2.set_xticklabels(labels, fontsize=8)
    ax2.set_ylabel("ratio")
    ax2.set_xlabel("failure event")
    ax2.set_title("bandwidth overhead ratios")
    ax2.legend(fontsize=8)

    fig.tight_layout()
    path = outdir / f"{basename}_bandwidth.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]

"""Figure rendering for the key-rate report path.

Renders the curve family produced by the rate sweep to an image file
next to the CSV.  Matplotlib is imported lazily with the Agg backend so
headless runs and non-plotting code paths never touch a display.
"""

from __future__ import annotations

from typing import Sequence


def render_rate_curves(curves: Sequence, path: str) -> None:
    """Plot rate-per-sifted-bit versus error rate, one line per curve."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for curve in curves:
        qs = [q for q, _ in curve.points]
        rs = [r for _, r in curve.points]
        p = curve.params
        label = "k=%g, %s" % (p.sifted_len, p.leak_model)
        if p.leak_model == "conventional":
            label += " (xi=%g)" % p.xi
        ax.plot(qs, rs, label=label)
    ax.set_xlabel("QBER")
    ax.set_ylabel("secure key rate per sifted bit")
    ax.set_ylim(bottom=0.0)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

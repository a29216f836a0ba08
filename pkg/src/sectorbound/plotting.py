"""Figure rendering for sweep reports.

Renders the gain-bound curves over the sector parameter to a file next to
the delimited output.  Uses the non-interactive Agg backend so it works in
headless runs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


_STYLES = {
    "gamma_md": dict(ls=":", label="diagonal"),
    "gamma_mc": dict(ls="--", label="vertex relaxation"),
    "gamma_minc": dict(ls="-", label="complete class"),
}


def render_sweep(rows: list[dict], path, gamma_nom: float | None = None) -> None:
    """Plot the three gain-bound curves from sweep rows to ``path``."""
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    betas = [r["beta"] for r in rows]
    for key, style in _STYLES.items():
        pts = [(b, r.get(key)) for b, r in zip(betas, rows)
               if r.get(key) is not None]
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    color="tab:blue", lw=1.4, **style)
    if gamma_nom is not None:
        ax.axhline(gamma_nom, color="0.4", ls="-.", lw=0.9,
                   label="nominal norm")
    ax.set_xlabel(r"sector bound $\beta$")
    ax.set_ylabel(r"certified gain bound $\gamma$")
    ax.legend(loc="upper left", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

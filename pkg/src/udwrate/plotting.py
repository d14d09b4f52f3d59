"""PNG rendering for the figure tasks (non-interactive Agg backend)."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_figure1(rows, path):
    """``C`` against ``E/T_a`` on a log scale, one curve per ``x``.

    ``rows`` holds ``(x, E_over_Ta, C)`` tuples.
    """
    plt = _pyplot()
    arr = np.array([(r[0], r[1], r[2]) for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    for x in np.unique(arr[:, 0]):
        sel = arr[:, 0] == x
        ax.semilogy(arr[sel, 1], arr[sel, 2], label=f"x = {x:g}")
    ax.set_xlabel(r"$E/T_a$")
    ax.set_ylabel(r"$C$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(Path(path), dpi=120, metadata={"Software": None})
    plt.close(fig)


def plot_figure2(rows, path):
    """``log10 |P_bar/alpha|`` against ``E/omega``, one curve per ``v0``.

    ``rows`` holds ``(v0, E_over_omega, P_over_alpha)`` tuples. Negative
    values are drawn with open markers.
    """
    plt = _pyplot()
    arr = np.array([(r[0], r[1], r[2]) for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    for v0 in np.unique(arr[:, 0]):
        sel = (arr[:, 0] == v0) & np.isfinite(arr[:, 2]) & (arr[:, 2] != 0)
        x, p = arr[sel, 1], arr[sel, 2]
        line, = ax.plot(x, np.log10(np.abs(p)), label=f"v0 = {v0:g}")
        neg = p < 0
        ax.plot(x[~neg], np.log10(p[~neg]), "o", color=line.get_color(), ms=3)
        ax.plot(x[neg], np.log10(-p[neg]), "o", mfc="none", color=line.get_color(), ms=4)
    ax.set_xlabel(r"$E/\omega$")
    ax.set_ylabel(r"$\log_{10}|\bar P/\alpha|$  (open: negative)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(Path(path), dpi=120, metadata={"Software": None})
    plt.close(fig)

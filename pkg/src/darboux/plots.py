"""Static figure rendering for the command-line tools.

Images are a convenience layer on top of the delimited output: every plot is
generated from the same arrays that go into the tables, never from separate
computations.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = ["render_curves", "render_discriminant"]


def render_curves(
    path: str,
    x: np.ndarray,
    curves: dict,
    xlabel: str = "x",
    ylabel: str = "",
    title: str = "",
    hlines=(),
) -> None:
    """One panel of labelled curves over a common abscissa, saved to a file.

    ``hlines`` draws dashed horizontal markers (e.g. bound-state energies).
    """
    fig, ax = plt.subplots(figsize=(8.0, 5.0), dpi=130)
    for label, values in curves.items():
        ax.plot(x, np.asarray(values), label=label, linewidth=1.4)
    for level in hlines:
        ax.axhline(float(level), color="crimson", linestyle="--", linewidth=0.9)
    ax.set_xlabel(xlabel)
    if ylabel:
        ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if curves:
        ax.legend(loc="best", fontsize=9)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_discriminant(
    path: str,
    energies: np.ndarray,
    disc: np.ndarray,
    edges=(),
    bound_energies=(),
) -> None:
    """Discriminant trace against energy with the band criterion marked.

    Shades |disc| <= 2 (allowed bands), marks located band edges with
    vertical lines and bound-state energies with dotted lines.
    """
    energies = np.asarray(energies)
    disc = np.asarray(disc)
    fig, ax = plt.subplots(figsize=(8.0, 5.0), dpi=130)
    ax.plot(energies, disc, color="navy", linewidth=1.4, label="discriminant")
    ax.axhline(2.0, color="gray", linewidth=0.8)
    ax.axhline(-2.0, color="gray", linewidth=0.8)
    ax.fill_between(
        energies,
        np.clip(disc, -2.0, 2.0),
        np.where(disc >= 0, np.minimum(disc, 2.0), np.maximum(disc, -2.0)),
        color="steelblue",
        alpha=0.15,
    )
    for e, kind in edges:
        ax.axvline(
            float(e),
            color="seagreen" if kind == "lower" else "darkorange",
            linestyle="-",
            linewidth=1.0,
        )
    for e in bound_energies:
        ax.axvline(float(e), color="crimson", linestyle=":", linewidth=1.2)
    ax.set_xlabel("energy")
    ax.set_ylabel("discriminant")
    ax.legend(loc="best", fontsize=9)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)

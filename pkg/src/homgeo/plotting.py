"""Figures written next to CLI reports.  Uses the Agg backend only."""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "homgeo",
}


@contextmanager
def figure_style():
    with plt.rc_context(STYLE):
        yield


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_gram(gram: np.ndarray, labels: Sequence[str], path, title: str = "") -> Path:
    with figure_style():
        size = max(3.0, 0.35 * len(labels) + 1.5)
        fig, ax = plt.subplots(figsize=(size + 1.0, size))
        lim = float(np.max(np.abs(gram))) or 1.0
        im = ax.imshow(gram, cmap="RdBu_r", vmin=-lim, vmax=lim)
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=90)
        ax.set_yticks(range(len(labels)))
        ax.set_yticklabels(labels)
        ax.grid(False)
        fig.colorbar(im, ax=ax, shrink=0.8)
        ax.set_title(title or "Gram matrix at the origin")
        return _save(fig, path)


LOG_FLOOR = 1e-18


def _note_floor(ax, values) -> None:
    if np.any(np.asarray(values) < LOG_FLOOR):
        ax.text(0.99, 0.02, f"values below {LOG_FLOOR:g} drawn at {LOG_FLOOR:g}",
                transform=ax.transAxes, ha="right", va="bottom", fontsize=7, color="0.4")


def plot_trace(orbit, integrated, path, title: str = "") -> Path:
    """Orbit coordinates (solid) against the integrated geodesic (dashed)."""
    n = orbit.n
    names = orbit.header()[: 2 * n + 1]
    with figure_style():
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6.0, 5.5))
        for j, name in enumerate(names):
            (line,) = ax1.plot(orbit.t, orbit.q[:, j], label=name)
            ax1.plot(integrated.t, integrated.q[:, j], "--", color=line.get_color())
        ax1.set_ylabel("coordinate")
        ax1.legend(ncol=min(4, len(names)), loc="best")
        dev = np.abs(orbit.q - integrated.q).max(axis=1)
        ax2.semilogy(orbit.t, np.maximum(dev, LOG_FLOOR))
        _note_floor(ax2, dev)
        ax2.set_xlabel("t")
        ax2.set_ylabel("|orbit - geodesic|")
        ax1.set_title(title or "orbit vs. integrated geodesic")
        return _save(fig, path)


def plot_residuals(t: np.ndarray, profiles: dict, path, title: str = "") -> Path:
    with figure_style():
        fig, ax = plt.subplots()
        for label, prof in profiles.items():
            ax.semilogy(t, np.maximum(prof, LOG_FLOOR), label=label)
        _note_floor(ax, np.concatenate([np.ravel(p) for p in profiles.values()]))
        ax.set_xlabel("t")
        ax.set_ylabel("covariant acceleration norm")
        if len(profiles) <= 12:
            ax.legend(loc="best")
        ax.set_title(title or "orbit residuals")
        return _save(fig, path)

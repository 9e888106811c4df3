"""Figures for the verify report, written with the Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# No timestamps or version strings in the files, so reruns are byte-identical.
_META = {"Software": None}


def _save(fig, path: Path) -> str:
    fig.savefig(path, dpi=110, metadata=_META)
    plt.close(fig)
    return path.name


def degree_figure(rows: dict, path: Path) -> str:
    """Measured against closed-form compressed degrees, one marker set per s."""
    fig, ax = plt.subplots(figsize=(5, 4.5))
    top = 1
    for s, entries in sorted(rows.items()):
        if not entries:
            continue
        expected = np.array([e for _, _, e in entries], dtype=float)
        measured = np.array([np.nan if m is None else m for _, m, _ in entries], dtype=float)
        ax.scatter(expected, measured, s=18, label=f"s={s}", alpha=0.8)
        top = max(top, np.nanmax(measured), expected.max())
    ax.plot([0, top + 1], [0, top + 1], color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("closed-form degree")
    ax.set_ylabel("measured degree")
    ax.set_title("Compressed degrees, Z_(2^s)[i,j,k]")
    ax.legend(fontsize=8)
    return _save(fig, path)


def adjacency_figure(adj: np.ndarray, labels: list[str], path: Path, title: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 5.5))
    ax.imshow(np.asarray(adj, dtype=float), cmap="Greys", interpolation="nearest")
    ax.set_xticks(range(len(labels)))
    ax.set_yticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=90, fontsize=6)
    ax.set_yticklabels(labels, fontsize=6)
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def gamma_figure(gammas: list, path: Path) -> str:
    """Exact domination numbers next to the predicted values."""
    fig, ax = plt.subplots(figsize=(6.5, 3.8))
    names = [g[0] for g in gammas]
    x = np.arange(len(gammas))
    ax.bar(x - 0.2, [g[1] for g in gammas], width=0.4, label="exact solver")
    ax.bar(x + 0.2, [g[2] for g in gammas], width=0.4, label="predicted")
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("gamma")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def aut_figure(rows: list, path: Path) -> str:
    """log10 of automorphism orders: search, formula, size-coloured quotient."""
    fig, ax = plt.subplots(figsize=(5, 3.8))
    s = [r[0] for r in rows]
    ax.plot(s, np.log10([r[1] for r in rows]), "o-", label="search")
    ax.plot(s, np.log10([r[2] for r in rows]), "x--", label="formula")
    ax.plot(s, np.log10([r[3] for r in rows]), "s:", label="size-coloured quotient")
    ax.set_xlabel("s")
    ax.set_ylabel("log10 |Aut|")
    ax.set_xticks(s)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)

"""Figure writers for the CLI report paths (matplotlib, Agg backend).

Each report subcommand drops a PNG next to its delimited output; the CSVs
remain the machine-readable artifact of record.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_tables(grid, N, psi, theta, Delta, path: Path) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    if N is not None:
        ax1.loglog(grid, N, label="N(x)")
    ax1.loglog(grid, psi, label=r"$\psi(x)$")
    ax1.loglog(grid, theta, label=r"$\vartheta(x)$", ls="--")
    ax1.loglog(grid, grid, color="k", lw=0.6, label="x")
    ax1.set_xlabel("x")
    ax1.legend()
    ax2.semilogx(grid, Delta / np.sqrt(grid))
    ax2.set_xlabel("x")
    ax2.set_ylabel(r"$(\psi(x)-x)/\sqrt{x}$")
    _save(fig, path)


def plot_rvm(grid, normalized, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogx(grid, normalized, lw=0.7)
    ax.set_xlabel("x")
    ax.set_ylabel(r"$(\psi(x)-f_0(x))/\sqrt{x}$")
    ax.axhline(0.0, color="k", lw=0.5)
    _save(fig, path)


def plot_sine(indices, values_y, values_S, norm, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(values_y, values_S, lw=0.8)
    for level in (norm, -norm, np.pi / 2, -np.pi / 2):
        ax.axhline(level, color="k" if abs(level) == norm else "gray", lw=0.5, ls="--")
    ax.set_xlabel("y")
    ax.set_ylabel("S(y)")
    ax.set_title(f"indices {list(indices)[:8]}{'...' if len(indices) > 8 else ''}, "
                 f"sup norm {norm:.4f}")
    _save(fig, path)


def plot_oscillation(grid, scaled, bounds, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogx(grid, scaled, lw=0.6)
    for label, level in bounds.items():
        ax.axhline(level, lw=0.8, ls="--", label=label)
        ax.axhline(-level, lw=0.8, ls="--")
    ax.set_xlabel("x")
    ax.set_ylabel(r"$|\rho_0|\,\mathrm{stat}(x)/x^{\beta_0}$")
    ax.legend(loc="upper right", fontsize=8)
    _save(fig, path)


def plot_zeta_grid(sigmas, ts, values, title, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    for sigma in sigmas:
        sel = [abs(v) for (s, t, v) in values if s == sigma]
        tt = [t for (s, t, v) in values if s == sigma]
        ax.plot(tt, sel, marker="o", label=f"sigma={sigma}")
    ax.set_xlabel("t")
    ax.set_ylabel("|value|")
    ax.set_title(title)
    ax.legend(fontsize=8)
    _save(fig, path)

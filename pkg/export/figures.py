"""
SVG Figures
===========
Deterministic SVG rendering of the emitted reports: fixed hash salt, no
date metadata, Agg backend.
"""

import os
from typing import Optional

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from config import settings  # noqa: E402

VERDICT_COLORS = {'trapped': 'tab:red', 'escaped': 'tab:blue', 'absorbed': 'tab:green'}


def _save(fig, path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with matplotlib.rc_context({'svg.hashsalt': settings.SVG_HASH_SALT}):
        fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    print(f"Exported: {path}")
    return path


def plot_curves(frame: pd.DataFrame, path: str, x: str, y: str, title: str,
                group: str = 'curve') -> str:
    """One line per value of `group` (energy surfaces, heteroclinic orbits)."""
    fig, ax = plt.subplots(figsize=(6, 5))
    for key, part in frame.groupby(group, sort=True):
        ax.plot(part[x], part[y], lw=1.0, label=str(key))
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.set_title(title)
    if frame[group].nunique() <= 8:
        ax.legend(fontsize=7)
    return _save(fig, path)


def plot_trapped_cloud(frame: pd.DataFrame, path: str, title: str = 'Trapped-set sample') -> str:
    """Shell starts in the (x1, x2) plane, colored by verdict."""
    fig, ax = plt.subplots(figsize=(6, 5))
    x, y = ('x1', 'x2') if 'x2' in frame else ('x1', 'xi1')
    for verdict, part in frame.groupby('verdict', sort=True):
        ax.scatter(part[x], part[y], s=3, color=VERDICT_COLORS.get(verdict, 'gray'), label=verdict)
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.set_title(title)
    ax.legend(fontsize=7, markerscale=3)
    return _save(fig, path)


def plot_margin_heatmap(frame: pd.DataFrame, path: str, title: str = 'Escape margin') -> str:
    """Margin ratio at each verification sample; failures outlined in black."""
    fig, ax = plt.subplots(figsize=(6, 5))
    x, y = ('x1', 'x2') if 'x2' in frame else ('x1', 'xi1')
    values = frame['ratio'].to_numpy(dtype=float)
    finite = np.isfinite(values)
    points = ax.scatter(frame[x][finite], frame[y][finite], c=values[finite], s=6, cmap='viridis')
    fig.colorbar(points, ax=ax, label='ratio')
    if 'failure' in frame:
        bad = frame[frame['failure'].astype(bool)]
        ax.scatter(bad[x], bad[y], s=14, facecolors='none', edgecolors='black', lw=0.6)
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.set_title(title)
    return _save(fig, path)


def plot_dimension_fit(counts: pd.DataFrame, fitted_dim: float, path: str,
                       title: Optional[str] = None) -> str:
    """log N against log(1/scale) with the fitted line over the window."""
    fig, ax = plt.subplots(figsize=(6, 5))
    x = np.log(1.0 / counts['scale'].to_numpy(dtype=float))
    y = np.log(counts['count'].to_numpy(dtype=float))
    window = counts['in_window'].astype(bool).to_numpy()
    ax.plot(x, y, 'o', color='gray', ms=4, label='all scales')
    ax.plot(x[window], y[window], 'o', color='tab:blue', ms=5, label='fit window')
    xw = x[window]
    line = y[window].mean() + fitted_dim * (xw - xw.mean())
    ax.plot(xw, line, '-', color='tab:red', label=f'slope {fitted_dim:.4f}')
    ax.set_xlabel('log(1/scale)')
    ax.set_ylabel('log N')
    ax.set_title(title or 'Box-counting dimension')
    ax.legend(fontsize=7)
    return _save(fig, path)

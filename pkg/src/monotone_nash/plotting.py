"""SVG trajectory charts: per-coordinate medians with interquartile bands."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiment import read_runs_csv

# Fixed hash salt and no creation date: the SVG must be a pure function of
# the input CSV bytes.
_SVG_SALT = "monotone-nash"


def plot_trajectories(csv_path, svg_path) -> str:
    """Render mean-value trajectories from a runs CSV to an SVG file.

    One line per joint-action coordinate: the median across replications,
    wrapped in its interquartile band (which collapses onto the line for
    a single replication).
    """
    rows = read_runs_csv(csv_path)
    if not rows:
        raise ValueError(f"{csv_path}:2: empty data section")

    series: dict[tuple[int, int], dict[int, list[float]]] = {}
    for row in rows:
        coord = (row["player"], row["dim"])
        series.setdefault(coord, {}).setdefault(row["t"], []).append(row["mu"])

    with plt.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig, ax = plt.subplots(figsize=(7.0, 4.2))
        for coord in sorted(series):
            by_t = series[coord]
            ts = np.array(sorted(by_t))
            stacked = [np.asarray(by_t[t]) for t in ts]
            median = np.array([np.median(v) for v in stacked])
            q1 = np.array([np.percentile(v, 25) for v in stacked])
            q3 = np.array([np.percentile(v, 75) for v in stacked])
            label = f"mu[player={coord[0]},k={coord[1]}]"
            (line,) = ax.plot(ts, median, label=label, linewidth=1.2)
            ax.fill_between(ts, q1, q3, color=line.get_color(), alpha=0.25, linewidth=0)
        ax.axhline(0.0, color="black", linewidth=0.6, alpha=0.5)
        ax.set_xlabel("iteration t")
        ax.set_ylabel("mean value")
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return str(svg_path)

"""Mean-PVE line charts per sweep axis"""

import logging
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from densefit.domain.entities.experiment import ResultRow  # noqa: E402
from densefit.settings import SVG_HASH_SALT  # noqa: E402

logger = logging.getLogger(__name__)

AXIS_LABELS = {
    "none": "configuration",
    "noise": "UV noise sigma",
    "keep_fraction": "dense keypoints kept (fraction)",
    "refinement": "IUV refinement (0 = raw, 1 = refined)",
}


def series_by_mix(rows: Sequence[ResultRow]) -> Dict[str, List[Tuple[float, float, float]]]:
    """(sweep value, mean PVE, std PVE) per mix, sorted by sweep value; rows without a mean are skipped"""
    series: Dict[str, List[Tuple[float, float, float]]] = defaultdict(list)
    for row in rows:
        mean, std = row.statistics()["pve"]
        if mean is None:
            continue
        series[row.mix].append((row.sweep_value, mean, std or 0.0))
    return {mix: sorted(points) for mix, points in series.items()}


def write_pve_chart(rows: Sequence[ResultRow], axis: str, path: Path) -> Path:
    """One line per mix with std whiskers; output is byte-stable for equal rows

    Each mix is drawn as an SVG group ``mix-<name>`` holding one ``<path>``
    for the line and one marker ``<use>`` per sweep value.
    """
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for mix, points in sorted(series_by_mix(rows).items()):
            xs, means, stds = zip(*points)
            container = ax.errorbar(xs, means, yerr=stds, marker="o", capsize=3, label=mix)
            container.lines[0].set_gid(f"mix-{mix}")
        ax.set_xlabel(AXIS_LABELS.get(axis, axis))
        ax.set_ylabel("mean PVE (model units)")
        ax.set_title(f"PVE vs {AXIS_LABELS.get(axis, axis)}")
        ax.grid(True, alpha=0.3)
        if ax.lines:
            ax.legend()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.info("Wrote chart %s", path)
    return path

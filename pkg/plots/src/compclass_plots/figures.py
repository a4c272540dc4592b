"""Render sweep CSVs in the log-error-vs-SNR style: one series per
measurement count (or per kernel), analytic bound as a line, Monte Carlo
estimates as markers with confidence whiskers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_COLUMNS = ["scenario", "kernel", "M", "snr_db", "sigma2", "perr_mc",
                    "ci_low", "ci_high", "perr_ub", "n_trials", "seed"]

GROUP_KEYS = ("m", "kernel")


class SchemaError(ValueError):
    """A CSV does not carry the sweep column schema."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSVs, the series grouping key, output path."""

    csv_paths: tuple[str, ...]
    group_by: str = "m"
    out_path: str = "figure.png"
    log_y: bool = True

    def __post_init__(self):
        if not self.csv_paths:
            raise ValueError("at least one input CSV is required")
        if self.group_by not in GROUP_KEYS:
            raise ValueError(f"group_by must be one of {GROUP_KEYS}")


@dataclass(frozen=True)
class RenderResult:
    out_path: str
    series: tuple[str, ...]


def read_rows(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != EXPECTED_COLUMNS:
            raise SchemaError(
                f"{path}: columns {reader.fieldnames} do not match the sweep "
                f"schema {EXPECTED_COLUMNS}")
        return list(reader)


def _series_label(key, rows) -> str:
    m = rows[0]["M"]
    kernel = rows[0]["kernel"]
    return f"M={m}, {kernel}"


def render(spec: FigureSpec) -> RenderResult:
    """Draw the figure and return the output path plus series labels.

    Raises SchemaError for malformed inputs and ValueError when there is
    nothing to plot; no file is written in either case.
    """
    rows = []
    for path in spec.csv_paths:
        rows.extend(read_rows(path))
    if not rows:
        raise ValueError("input CSVs contain no data rows")

    groups: dict[str, list[dict]] = {}
    for row in rows:
        key = row["M"] if spec.group_by == "m" else row["kernel"]
        groups.setdefault(key, []).append(row)

    def sort_key(k: str):
        try:
            return (0, float(k), "")
        except ValueError:
            return (1, 0.0, k)

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    labels = []
    for key in sorted(groups, key=sort_key):
        grows = sorted(groups[key], key=lambda r: float(r["snr_db"]))
        snr = np.array([float(r["snr_db"]) for r in grows])
        ub = np.array([float(r["perr_ub"]) for r in grows])
        p = np.array([float(r["perr_mc"]) for r in grows])
        lo = np.array([float(r["ci_low"]) for r in grows])
        hi = np.array([float(r["ci_high"]) for r in grows])
        label = _series_label(key, grows)
        line, = ax.plot(snr, ub, "-", label=label)
        ax.errorbar(snr, p, yerr=np.vstack([p - lo, hi - p]), fmt="o",
                    markersize=4, capsize=3, color=line.get_color())
        labels.append(label)

    ax.set_xlabel(r"$1/\sigma^2$ (dB)")
    ax.set_ylabel("misclassification probability")
    if spec.log_y:
        ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="lower left", fontsize=9)
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=150, metadata={"Software": "ccplot"})
    plt.close(fig)
    return RenderResult(out_path=spec.out_path, series=tuple(labels))

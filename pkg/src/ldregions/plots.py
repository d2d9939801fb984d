"""Rendering of simulation results to figures and delimited tables.

The report path takes one result document per strategy and writes CSVs of
the per-cycle and cumulative metrics next to PNG figures, so runs can be
compared at a glance or post-processed elsewhere.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_METRIC_FIELDS = ("tp", "fp", "fn", "precision", "recall", "f_measure")


def _overall(report_block: Mapping) -> Mapping:
    return report_block["overall"]


def write_cycles_csv(results: Sequence[Mapping], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strategy", "transition", "fetched", *_METRIC_FIELDS])
        for result in results:
            for row in result["per_cycle"]:
                overall = _overall(row["reports"])
                writer.writerow(
                    [
                        result["strategy"],
                        row["transition"],
                        row["fetched"],
                        *[overall[field] for field in _METRIC_FIELDS],
                    ]
                )


def write_summary_csv(results: Sequence[Mapping], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["strategy", "total_fetches", *_METRIC_FIELDS, "optimal_reference_f"]
        )
        for result in results:
            overall = _overall(result["cumulative"])
            writer.writerow(
                [
                    result["strategy"],
                    result["total_fetches"],
                    *[overall[field] for field in _METRIC_FIELDS],
                    result.get("optimal_reference_f", ""),
                ]
            )


def plot_f_by_cycle(results: Sequence[Mapping], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    for result in results:
        cycles = [row["transition"] for row in result["per_cycle"]]
        values = [_overall(row["reports"])["f_measure"] for row in result["per_cycle"]]
        ax.plot(cycles, values, marker="o", label=result["strategy"])
    ax.set_xlabel("transition")
    ax.set_ylabel("F-measure")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Per-cycle detection F-measure")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_cumulative_f(results: Sequence[Mapping], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    strategies = [result["strategy"] for result in results]
    values = [_overall(result["cumulative"])["f_measure"] for result in results]
    ax.bar(range(len(strategies)), values, color="tab:blue")
    references = [
        result.get("optimal_reference_f")
        for result in results
        if result.get("optimal_reference_f") is not None
    ]
    if references:
        ax.axhline(references[0], color="tab:red", linestyle="--", label="optimal reference")
        ax.legend(loc="lower right", fontsize=8)
    ax.set_xticks(range(len(strategies)))
    ax.set_xticklabels(strategies, rotation=20, ha="right")
    ax.set_ylabel("cumulative F-measure")
    ax.set_ylim(0, 1.05)
    ax.set_title("Cumulative detection F-measure by strategy")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report(results: Sequence[Mapping], out_dir: str | Path) -> list[Path]:
    """Write all report artifacts; returns the created paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    created = []
    for name, writer in (
        ("cycles.csv", write_cycles_csv),
        ("summary.csv", write_summary_csv),
        ("f_by_cycle.png", plot_f_by_cycle),
        ("cumulative_f.png", plot_cumulative_f),
    ):
        path = out / name
        writer(results, path)
        created.append(path)
    return created

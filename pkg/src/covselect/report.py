"""Figure rendering for the CLI report outputs.

Each renderer takes already-parsed rows and writes a PNG next to the
delimited data file. Everything draws through the Agg backend so reports
work headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def figure_path_for(data_path):
    from pathlib import Path

    p = Path(data_path)
    return p.with_suffix(".png")


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_loop_figure(records, path):
    """Accuracy and coverage against labeled-set size, one line per run."""
    fig, (ax_acc, ax_cov) = plt.subplots(1, 2, figsize=(9, 3.5))
    by_run = {}
    for rec in records:
        by_run.setdefault(rec["run_id"], []).append(rec)
    for run_id, rows in sorted(by_run.items()):
        rows = sorted(rows, key=lambda r: r["iteration"])
        xs = [r["labeled_size"] for r in rows]
        ax_acc.plot(xs, [r["accuracy"] for r in rows], marker="o", ms=3, label=run_id)
        ax_cov.plot(xs, [r["coverage"] for r in rows], marker="o", ms=3, label=run_id)
    ax_acc.set_xlabel("labeled size")
    ax_acc.set_ylabel("test accuracy")
    ax_cov.set_xlabel("labeled size")
    ax_cov.set_ylabel("coverage")
    if len(by_run) <= 8:
        ax_acc.legend(fontsize=7)
    return _finish(fig, path)


def save_bench_figure(rows, path):
    """Per-selection wall time against iteration, one line per method."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    by_method = {}
    for row in rows:
        by_method.setdefault(row["method"], []).append(row)
    for method, items in sorted(by_method.items()):
        items = sorted(items, key=lambda r: r["iteration"])
        ax.plot(
            [r["iteration"] for r in items],
            [r["ms_per_selection"] for r in items],
            marker="o",
            ms=3,
            label=method,
        )
    ax.set_xlabel("iteration")
    ax.set_ylabel("ms per selection")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    return _finish(fig, path)


def save_purity_figure(sweep, path):
    """Purity against the swept radius/lengthscale grid, chosen value marked."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(sweep.grid, sweep.purity_rates, marker="o", ms=3)
    ax.axhline(sweep.target, color="grey", lw=0.8, ls="--")
    ax.axvline(sweep.chosen, color="tab:red", lw=0.8, ls="--", label=f"chosen = {sweep.chosen:g}")
    ax.set_xlabel("radius / lengthscale")
    ax.set_ylabel("purity")
    ax.legend(fontsize=8)
    return _finish(fig, path)


def save_sweep_figure(rows, path):
    """Accuracy against labeled size, one line per swept parameter value."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    by_value = {}
    for row in rows:
        by_value.setdefault(row["value"], []).append(row)
    for value, items in sorted(by_value.items()):
        per_iter = {}
        for r in items:
            per_iter.setdefault(r["labeled_size"], []).append(r["accuracy"])
        xs = sorted(per_iter)
        ys = [sum(per_iter[x]) / len(per_iter[x]) for x in xs]
        ax.plot(xs, ys, marker="o", ms=3, label=f"{value:g}")
    ax.set_xlabel("labeled size")
    ax.set_ylabel("mean test accuracy")
    ax.legend(fontsize=8, title="param")
    return _finish(fig, path)

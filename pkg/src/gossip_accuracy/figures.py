"""Report rendering: desk-scale reproductions of the headline figures.

Each recipe computes analytic curves, overlays simulation estimates with
error bars, and writes both a PNG and the underlying tidy CSV next to it.
Simulation event counts are configurable so the full set renders in seconds
at desk scale; pass events=0 to skip the simulation overlays entirely.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .binary import freshness_recursion, symmetric_accuracy, symmetric_freshness
from .errors import InvalidParameter
from .markov import NetworkParams, stationary_distribution
from .multistate import backward_construct, mode_tagged_accuracy
from .presets import binary_demo, four_state_demo
from .sim import SimConfig, run
from .split import fresh_accurate_fraction, g_recursion

FIGURES = ("binary", "symmetric", "multistate", "counts_k", "counts_rates", "split")

_SWEEP_GRID = np.logspace(-2, 2, 17)
_SIM_GRID = np.logspace(-2, 2, 5)


def _sim_many(cfgs, jobs):
    if jobs > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, cfgs))
    return [run(c) for c in cfgs]


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _errbar(ax, xs, reports, pick, **kw):
    vals = [pick(r).value for r in reports]
    errs = [pick(r).stderr for r in reports]
    ax.errorbar(xs, vals, yerr=errs, fmt="o", capsize=3, **kw)


def _rate_configs(gen, n, axis, values, other, events, seed, subset_sizes):
    cfgs = []
    for i, v in enumerate(values):
        ls, lam = (v, other) if axis == "lambda_s" else (other, v)
        cfgs.append(
            SimConfig(
                generator=gen,
                params=NetworkParams(n=n, lambda_s=ls, lambda_=lam),
                seed=seed + i,
                warmup_events=events // 10,
                measure_events=events,
                subset_sizes=subset_sizes,
                batches=20,
            )
        )
    return cfgs


def fig_binary(out_dir: Path, events: int, seed: int, jobs: int, n: int = 10):
    """Freshness-based accuracy of the binary demo source vs both rates."""
    gen = binary_demo()
    q12, q21 = gen.rates[0, 1], gen.rates[1, 0]
    ks = [1, 3, 5, 10] if n >= 10 else [1, n]

    fig, (ax_a, ax_b) = plt.subplots(1, 2, figsize=(10, 4))
    rows = []
    prof_a = []
    for ls in _SWEEP_GRID:
        prof = freshness_recursion(q12, q21, NetworkParams(n=n, lambda_s=ls, lambda_=1.0))
        prof_a.append(prof)
        rows.append(("lambda_s", ls, prof.pair(1).v1, prof.pair(1).v2, prof.total(1)))
    ax_a.semilogx(_SWEEP_GRID, [p.total(1) for p in prof_a], label="f_1")
    ax_a.semilogx(_SWEEP_GRID, [p.pair(1).v1 for p in prof_a], "--", label="f_1 mode 0")
    ax_a.semilogx(_SWEEP_GRID, [p.pair(1).v2 for p in prof_a], "--", label="f_1 mode 1")

    by_k = {k: [] for k in ks}
    for lam in _SWEEP_GRID:
        prof = freshness_recursion(q12, q21, NetworkParams(n=n, lambda_s=1.0, lambda_=lam))
        for k in ks:
            by_k[k].append(prof.total(k))
            rows.append(("lambda", lam, k, prof.total(k), ""))
    for k in ks:
        ax_b.semilogx(_SWEEP_GRID, by_k[k], label=f"f_{k}")

    if events:
        cfgs = _rate_configs(gen, n, "lambda_s", _SIM_GRID, 1.0, events, seed, (1,))
        reps = _sim_many(cfgs, jobs)
        _errbar(ax_a, _SIM_GRID, reps, lambda r: r.freshest_accuracy[1], color="k", label="sim f_1")
        cfgs = _rate_configs(gen, n, "lambda", _SIM_GRID, 1.0, events, seed + 100, tuple(ks))
        reps = _sim_many(cfgs, jobs)
        for k in ks:
            _errbar(ax_b, _SIM_GRID, reps, lambda r, k=k: r.freshest_accuracy[k], markersize=3)

    ax_a.set_xlabel("source push rate")
    ax_b.set_xlabel("gossip rate")
    for ax in (ax_a, ax_b):
        ax.set_ylabel("freshness-based accuracy")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_dir / "binary_freshness.png", dpi=150)
    plt.close(fig)
    _write_csv(out_dir / "binary_freshness.csv",
               ("axis", "rate", "v1_or_k", "v2_or_fk", "f1"), rows)
    return [out_dir / "binary_freshness.png", out_dir / "binary_freshness.csv"]


def fig_symmetric(out_dir: Path, events: int, seed: int, jobs: int, n: int = 10):
    """Scalar freshness and accuracy for a symmetric source (q = 1)."""
    q = 1.0
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    rows = []
    for ax, axis in zip(axes, ("lambda_s", "lambda")):
        f_vals, c_vals = [], []
        for v in _SWEEP_GRID:
            ls, lam = (v, 1.0) if axis == "lambda_s" else (1.0, v)
            p = NetworkParams(n=n, lambda_s=ls, lambda_=lam)
            prof = symmetric_freshness(q, p)
            c = symmetric_accuracy(q, p, prof[1])
            f_vals.append(prof[0])
            c_vals.append(c)
            rows.append((axis, v, prof[0], c))
        ax.semilogx(_SWEEP_GRID, f_vals, label="f_1 (symmetric)")
        ax.semilogx(_SWEEP_GRID, c_vals, "--", label="c (symmetric)")
        ax.set_xlabel(axis.replace("_", " "))
        ax.set_ylabel("accuracy")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_dir / "symmetric_accuracy.png", dpi=150)
    plt.close(fig)
    _write_csv(out_dir / "symmetric_accuracy.csv", ("axis", "rate", "f1_sym", "c_sym"), rows)
    return [out_dir / "symmetric_accuracy.png", out_dir / "symmetric_accuracy.csv"]


def fig_multistate(out_dir: Path, events: int, seed: int, jobs: int, n: int = 10):
    """Freshness-based accuracy for the four-state demo source vs both rates."""
    gen = four_state_demo()
    ks = [1, 3, 5, 10] if n >= 10 else [1, n]
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    rows = []
    for ax, axis in zip(axes, ("lambda_s", "lambda")):
        by_k = {k: [] for k in ks}
        for v in _SWEEP_GRID:
            ls, lam = (v, 1.0) if axis == "lambda_s" else (1.0, v)
            prof = backward_construct(gen, NetworkParams(n=n, lambda_s=ls, lambda_=lam))
            for k in ks:
                by_k[k].append(prof.f[k])
                rows.append((axis, v, k, prof.f[k]))
        for k in ks:
            ax.semilogx(_SWEEP_GRID, by_k[k], label=f"f_{k}")
        if events:
            cfgs = _rate_configs(gen, n, axis, _SIM_GRID, 1.0, events, seed, tuple(ks))
            reps = _sim_many(cfgs, jobs)
            for k in ks:
                _errbar(ax, _SIM_GRID, reps, lambda r, k=k: r.freshest_accuracy[k], markersize=3)
        ax.set_xlabel(axis.replace("_", " "))
        ax.set_ylabel("freshness-based accuracy")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_dir / "multistate_freshness.png", dpi=150)
    plt.close(fig)
    _write_csv(out_dir / "multistate_freshness.csv", ("axis", "rate", "k", "f_k"), rows)
    return [out_dir / "multistate_freshness.png", out_dir / "multistate_freshness.csv"]


def fig_counts_k(out_dir: Path, events: int, seed: int, jobs: int, n: int = 10):
    """Expected content counts grow linearly with subset size."""
    gen = four_state_demo()
    pi = stationary_distribution(gen).probs
    ks = list(range(1, n + 1))
    fig, ax = plt.subplots(figsize=(6, 4))
    rows = []
    for q in range(gen.size):
        ax.plot(ks, [k * pi[q] for k in ks], label=f"content {q}")
        for k in ks:
            rows.append((k, q, k * pi[q]))
    if events:
        cfg = SimConfig(
            generator=gen,
            params=NetworkParams(n=n, lambda_s=1.0, lambda_=1.0),
            seed=seed,
            warmup_events=events // 10,
            measure_events=events,
            subset_sizes=tuple(ks),
            batches=20,
        )
        rep = run(cfg)
        for q in range(gen.size):
            vals = [rep.content_counts[k][q].value for k in ks]
            errs = [rep.content_counts[k][q].stderr for k in ks]
            ax.errorbar(ks, vals, yerr=errs, fmt="o", markersize=3, capsize=2)
    ax.set_xlabel("subset size k")
    ax.set_ylabel("expected nodes holding content q")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_dir / "content_counts_vs_k.png", dpi=150)
    plt.close(fig)
    _write_csv(out_dir / "content_counts_vs_k.csv", ("k", "q", "count"), rows)
    return [out_dir / "content_counts_vs_k.png", out_dir / "content_counts_vs_k.csv"]


def fig_counts_rates(out_dir: Path, events: int, seed: int, jobs: int, n: int = 10):
    """Full-network content counts are flat in both transmission rates."""
    gen = four_state_demo()
    pi = stationary_distribution(gen).probs
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    rows = []
    for ax, axis in zip(axes, ("lambda_s", "lambda")):
        for q in range(gen.size):
            ax.semilogx(_SWEEP_GRID, [n * pi[q]] * len(_SWEEP_GRID), label=f"content {q}")
            for v in _SWEEP_GRID:
                rows.append((axis, v, q, n * pi[q]))
        if events:
            cfgs = _rate_configs(gen, n, axis, _SIM_GRID, 1.0, events, seed, (n,))
            reps = _sim_many(cfgs, jobs)
            for q in range(gen.size):
                _errbar(ax, _SIM_GRID, reps,
                        lambda r, q=q: r.content_counts[n][q], markersize=3)
        ax.set_xlabel(axis.replace("_", " "))
        ax.set_ylabel("expected nodes holding content q")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_dir / "content_counts_vs_rates.png", dpi=150)
    plt.close(fig)
    _write_csv(out_dir / "content_counts_vs_rates.csv", ("axis", "rate", "q", "count"), rows)
    return [out_dir / "content_counts_vs_rates.png", out_dir / "content_counts_vs_rates.csv"]


def fig_split(out_dir: Path, events: int, seed: int, jobs: int, n: int = 10):
    """Fresh-and-accurate fraction of the whole network vs both rates."""
    gen = four_state_demo()
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    rows = []
    for ax, axis in zip(axes, ("lambda_s", "lambda")):
        g_vals, c_vals = [], []
        for v in _SWEEP_GRID:
            ls, lam = (v, 1.0) if axis == "lambda_s" else (1.0, v)
            p = NetworkParams(n=n, lambda_s=ls, lambda_=lam)
            prof = backward_construct(gen, p)
            c_modes = mode_tagged_accuracy(prof.by_k[1])
            split = fresh_accurate_fraction(g_recursion(gen, p), c_modes)
            g_vals.append(split.g_value(n))
            c_vals.append(split.c)
            rows.append((axis, v, split.g_value(n), split.c, split.c - split.g_value(n)))
        ax.semilogx(_SWEEP_GRID, g_vals, label="fresh and accurate G_n")
        ax.semilogx(_SWEEP_GRID, c_vals, "--", label="accurate c")
        if events:
            cfgs = _rate_configs(gen, n, axis, _SIM_GRID, 1.0, events, seed, (n,))
            reps = _sim_many(cfgs, jobs)
            _errbar(ax, _SIM_GRID, reps, lambda r: r.fresh_accurate_product[n],
                    color="k", label="sim G_n")
            _errbar(ax, _SIM_GRID, reps, lambda r: r.mean_accuracy, color="gray", label="sim c")
        ax.set_xlabel(axis.replace("_", " "))
        ax.set_ylabel("fraction of nodes")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_dir / "fresh_split.png", dpi=150)
    plt.close(fig)
    _write_csv(out_dir / "fresh_split.csv",
               ("axis", "rate", "G_n", "c", "stale_accurate"), rows)
    return [out_dir / "fresh_split.png", out_dir / "fresh_split.csv"]


_RECIPES = {
    "binary": fig_binary,
    "symmetric": fig_symmetric,
    "multistate": fig_multistate,
    "counts_k": fig_counts_k,
    "counts_rates": fig_counts_rates,
    "split": fig_split,
}


def render(out_dir, which=FIGURES, events: int = 150_000, seed: int = 1,
           jobs: int = 1, n: int = 10) -> list[Path]:
    """Render the requested figure families into out_dir; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in which:
        if name not in _RECIPES:
            raise InvalidParameter(f"unknown figure {name!r}; choose from {FIGURES}")
        written.extend(_RECIPES[name](out_dir, events, seed, jobs, n=n))
    return written

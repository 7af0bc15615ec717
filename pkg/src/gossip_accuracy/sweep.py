"""Parameter sweeps comparing analytic predictions against simulation.

One comparison row per (sweep value, labeled quantity) with a z-score
(sim - analytic) / stderr and a |z| > 3 significance flag.  Sweep points are
independent and may run in parallel; results are ordered by parameter value
before emission, and per-point seeds derive deterministically from the base
seed, so output is reproducible regardless of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .binary import average_accuracy, freshness_recursion
from .errors import InvalidParameter
from .markov import GeneratorMatrix, NetworkParams, stationary_distribution
from .multistate import backward_construct, mode_tagged_accuracy
from .sim import DEFAULT_BATCHES, DEFAULT_EVENTS, SimConfig, SimReport, run
from .split import fresh_accurate_fraction, g_recursion

PARAMETERS = ("lambda_s", "lambda", "k")
QUANTITIES = ("f1", "c", "nq", "Gn")
MODES = ("analytic", "simulate")
Z_FLAG = 3.0


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    quantity: str
    generator: GeneratorMatrix
    n: int
    lambda_s: float
    lambda_: float
    k: int | None = None          # subset size for nq / Gn (default n)
    modes: tuple[str, ...] = MODES
    events: int = DEFAULT_EVENTS
    warmup_events: int | None = None
    batches: int = DEFAULT_BATCHES
    seed: int = 1
    jobs: int = 1

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise InvalidParameter(f"parameter must be one of {PARAMETERS}")
        if self.quantity not in QUANTITIES:
            raise InvalidParameter(f"quantity must be one of {QUANTITIES}")
        if not self.modes or any(m not in MODES for m in self.modes):
            raise InvalidParameter(f"modes must be a nonempty subset of {MODES}")
        if not self.values:
            raise InvalidParameter("sweep values must be nonempty")
        if any(b >= a for a, b in zip(self.values[1:], self.values)):
            raise InvalidParameter("sweep values must be strictly increasing")
        if self.parameter == "k":
            if any(int(v) != v or not 1 <= v <= self.n for v in self.values):
                raise InvalidParameter("k sweep values must be integers in 1..n")


@dataclass(frozen=True)
class ComparisonRow:
    parameter: str
    value: float
    quantity: str
    analytic: float | None
    simulated: float | None
    stderr: float | None
    z: float | None
    flag: bool


def _zscore(sim: float, analytic: float, stderr: float) -> float:
    if stderr > 0:
        return (sim - analytic) / stderr
    return 0.0 if sim == analytic else math.inf


def _analytic_values(gen, params: NetworkParams, quantity: str, k: int) -> dict[str, float]:
    """Labeled analytic values for one sweep point."""
    m = gen.size
    if quantity in ("f1", "c"):
        if m == 2:
            q12, q21 = float(gen.rates[0, 1]), float(gen.rates[1, 0])
            prof = freshness_recursion(q12, q21, params)
            if quantity == "f1":
                return {"f1": prof.total(1)}
            rep = average_accuracy(q12, q21, params, prof.pair(2))
            return {"c": rep.c}
        prof = backward_construct(gen, params)
        return {quantity: prof.f[1]}
    if quantity == "nq":
        pi = stationary_distribution(gen)
        return {f"n_q{q}": k * float(pi.probs[q]) for q in range(m)}
    # Gn: product-form fresh-and-accurate fraction at subset size k
    occ = g_recursion(gen, params)
    if m == 2:
        q12, q21 = float(gen.rates[0, 1]), float(gen.rates[1, 0])
        prof = freshness_recursion(q12, q21, params)
        rep = average_accuracy(q12, q21, params, prof.pair(2))
        c_modes = [rep.c1, rep.c2]
    else:
        c_modes = mode_tagged_accuracy(backward_construct(gen, params).by_k[1])
    split = fresh_accurate_fraction(occ, c_modes)
    return {"G_n": split.g_value(k)}


def _simulated_values(rep: SimReport, quantity: str, k: int) -> dict[str, tuple[float, float]]:
    if quantity == "f1":
        e = rep.freshest_accuracy[1]
        return {"f1": (e.value, e.stderr)}
    if quantity == "c":
        e = rep.mean_accuracy
        return {"c": (e.value, e.stderr)}
    if quantity == "nq":
        return {
            f"n_q{q}": (e.value, e.stderr)
            for q, e in enumerate(rep.content_counts[k])
        }
    e = rep.fresh_accurate_product[k]
    return {"G_n": (e.value, e.stderr)}


def _subset_sizes_for(quantity: str, k: int) -> tuple[int, ...]:
    if quantity == "f1":
        return (1,)
    if quantity == "c":
        return (1,)
    return tuple(sorted({1, k}))


def _sim_point(cfg: SimConfig) -> SimReport:
    return run(cfg)


def run_sweep(spec: SweepSpec) -> list[ComparisonRow]:
    """Evaluate every sweep point and return comparison rows sorted by value."""
    k_fixed = spec.k if spec.k is not None else spec.n
    base_params = NetworkParams(n=spec.n, lambda_s=spec.lambda_s, lambda_=spec.lambda_)
    warmup = spec.warmup_events if spec.warmup_events is not None else spec.events // 10

    if spec.parameter == "k":
        points = [(float(v), base_params, int(v)) for v in spec.values]
    else:
        points = []
        for v in spec.values:
            if spec.parameter == "lambda_s":
                p = replace(base_params, lambda_s=float(v))
            else:
                p = replace(base_params, lambda_=float(v))
            points.append((float(v), p, k_fixed))

    reports: list[SimReport | None] = [None] * len(points)
    if "simulate" in spec.modes:
        if spec.parameter == "k":
            # every k is read off the same run, so simulate once
            cfg = SimConfig(
                generator=spec.generator,
                params=base_params,
                seed=spec.seed,
                warmup_events=warmup,
                measure_events=spec.events,
                subset_sizes=tuple(sorted({1, *(int(v) for v in spec.values)})),
                batches=spec.batches,
            )
            shared = run(cfg)
            reports = [shared] * len(points)
        else:
            cfgs = [
                SimConfig(
                    generator=spec.generator,
                    params=p,
                    seed=spec.seed + i,
                    warmup_events=warmup,
                    measure_events=spec.events,
                    subset_sizes=_subset_sizes_for(spec.quantity, kv),
                    batches=spec.batches,
                )
                for i, (_, p, kv) in enumerate(points)
            ]
            if spec.jobs > 1 and len(cfgs) > 1:
                with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
                    reports = list(pool.map(_sim_point, cfgs))
            else:
                reports = [run(c) for c in cfgs]

    rows = []
    for (value, p, kv), rep in zip(points, reports):
        ana = (
            _analytic_values(spec.generator, p, spec.quantity, kv)
            if "analytic" in spec.modes
            else {}
        )
        sim = _simulated_values(rep, spec.quantity, kv) if rep is not None else {}
        for label in sorted(set(ana) | set(sim)):
            a = ana.get(label)
            s, se = sim.get(label, (None, None))
            z = _zscore(s, a, se) if a is not None and s is not None else None
            rows.append(
                ComparisonRow(
                    parameter=spec.parameter,
                    value=value,
                    quantity=label,
                    analytic=a,
                    simulated=s,
                    stderr=se,
                    z=z,
                    flag=bool(z is not None and abs(z) > Z_FLAG),
                )
            )
    rows.sort(key=lambda r: (r.value, r.quantity))
    return rows


def max_abs_z(rows: list[ComparisonRow]) -> float:
    zs = [abs(r.z) for r in rows if r.z is not None]
    return max(zs) if zs else 0.0

"""Continuous-time event-driven simulation of the gossip network.

Aggregate-rate Gillespie sampling: one exponential holding time per event at
total rate nu_Q + lambda_s + n*lambda, then a categorical split into source
transition, source push, or an ordered-pair gossip attempt.  Versions are
stored as integer counters (the source version increments on every source
transition), so ages X_i = V0 - V_i are implicit and every event is O(1).

Steady-state estimates are time-weighted integrals over the measurement
phase, with standard errors from batch means over contiguous windows.
Tracked subsets are the nested prefixes {1..k}; by full symmetry any fixed
subset is statistically equivalent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import log
from pathlib import Path

import numpy as np

from .errors import DegenerateRun, InvalidParameter, TooFewBatches
from .markov import (
    GeneratorMatrix,
    NetworkParams,
    generator_from_json,
    generator_to_json,
    load_generator,
    stationary_distribution,
)

_BLOCK = 1 << 16

DEFAULT_EVENTS = 2_250_000
DEFAULT_BATCHES = 30


@dataclass(frozen=True)
class SimConfig:
    generator: GeneratorMatrix
    params: NetworkParams
    seed: int
    warmup_events: int
    measure_events: int
    subset_sizes: tuple[int, ...]
    batches: int

    def __post_init__(self):
        if self.batches < 2:
            raise TooFewBatches(f"need at least 2 batches, got {self.batches}")
        if self.measure_events < self.batches:
            raise InvalidParameter(
                f"measure_events = {self.measure_events} < batches = {self.batches}"
            )
        if self.warmup_events < 0:
            raise InvalidParameter("warmup_events must be >= 0")
        ks = tuple(sorted(set(int(k) for k in self.subset_sizes)))
        if any(k < 1 or k > self.params.n for k in ks):
            raise InvalidParameter(
                f"subset sizes {self.subset_sizes} outside 1..{self.params.n}"
            )
        object.__setattr__(self, "subset_sizes", ks)


@dataclass
class WorldState:
    """Source mode + per-node version counters and contents.

    Ages are implicit: X_i = source_version - versions[i].  Equal versions
    always carry equal contents (each version is a unique source snapshot).
    """

    source_state: int
    source_version: int
    versions: list[int]
    contents: list[int]
    clock: float = 0.0


@dataclass(frozen=True)
class SimEvent:
    kind: str  # "source" | "push" | "gossip"
    dt: float
    target: int  # new source state, pushed node, or gossip receiver
    sender: int | None = None
    changed: bool = True


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float


@dataclass(frozen=True)
class SimReport:
    """Time-weighted steady-state estimates with batch-means standard errors.

    fresh_accurate_product is the mode-wise product of the simulated
    accuracy and zero-age marginals (the analytic split's definition);
    fresh_accurate_joint is the direct time average of the joint indicator,
    kept alongside so any gap between the two is visible.
    """

    freshest_accuracy: dict[int, Estimate]          # f_k per requested k
    mean_accuracy: Estimate                         # c over the full network
    mean_accuracy_mode: tuple[Estimate, ...]        # c^(m)
    zero_age_mode: dict[int, tuple[Estimate, ...]]  # g_k^(m) per requested k
    content_counts: dict[int, tuple[Estimate, ...]]  # n_k^(q) per requested k
    fresh_accurate_product: dict[int, Estimate]     # G_k, product form
    fresh_accurate_joint: dict[int, Estimate]       # direct joint average
    sim_time: float
    batches: int
    event_counts: dict[str, int]
    config: SimConfig


def batch_stderr(samples) -> float:
    """Standard error of a steady-state mean from per-batch time averages."""
    arr = np.asarray(samples, dtype=float)
    if arr.size < 2:
        raise TooFewBatches(f"need >= 2 batch means, got {arr.size}")
    return float(np.std(arr, ddof=1) / np.sqrt(arr.size))


def init_state(cfg: SimConfig, rng: np.random.Generator | None = None) -> WorldState:
    """Synchronized start: source mode drawn from pi, all nodes fresh and accurate."""
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
    pi = stationary_distribution(cfg.generator).probs
    cum = np.cumsum(pi)
    u = rng.random()
    q = int(np.searchsorted(cum, u, side="right"))
    q = min(q, cfg.generator.size - 1)
    n = cfg.params.n
    return WorldState(
        source_state=q,
        source_version=0,
        versions=[0] * n,
        contents=[q] * n,
        clock=0.0,
    )


def _event_tables(gen: GeneratorMatrix, params: NetworkParams):
    """Per-mode total rates and cumulative source-transition tables."""
    m = gen.size
    nu = [float(-gen.rates[i, i]) for i in range(m)]
    total = [nu[i] + params.lambda_s + params.n * params.lambda_ for i in range(m)]
    if min(total) <= 0:
        raise DegenerateRun("total event rate is zero")
    src_cum: list[list[float]] = []
    src_tgt: list[list[int]] = []
    for i in range(m):
        targets = [j for j in range(m) if j != i and gen.rates[i, j] > 0]
        weights = np.array([gen.rates[i, j] for j in targets])
        cum = list(np.cumsum(weights) / weights.sum())
        cum[-1] = 1.0
        src_cum.append(cum)
        src_tgt.append(targets)
    return nu, total, src_cum, src_tgt


def step(
    world: WorldState,
    gen: GeneratorMatrix,
    params: NetworkParams,
    rng: np.random.Generator,
) -> tuple[SimEvent, WorldState]:
    """Advance the world by one event, mutating it in place.

    Draws, in order: holding time, event category, then the category's
    targets.  Gossip from i to j copies (version, content) only when node i
    is strictly fresher; ties are no-ops since equal versions imply equal
    content.
    """
    nu, total, src_cum, src_tgt = _event_tables(gen, params)
    q = world.source_state
    r_tot = total[q]
    dt = -log(1.0 - rng.random()) / r_tot
    world.clock += dt
    x = rng.random() * r_tot
    n = params.n

    if x < nu[q]:
        u = rng.random()
        cum = src_cum[q]
        idx = 0
        while u > cum[idx]:
            idx += 1
        j = src_tgt[q][idx]
        world.source_state = j
        world.source_version += 1
        return SimEvent(kind="source", dt=dt, target=j), world

    if x < nu[q] + params.lambda_s:
        j = int(rng.random() * n)
        changed = world.versions[j] != world.source_version
        world.versions[j] = world.source_version
        world.contents[j] = q
        return SimEvent(kind="push", dt=dt, target=j, changed=changed), world

    i = int(rng.random() * n)
    j = int(rng.random() * (n - 1))
    if j >= i:
        j += 1
    accepted = world.versions[i] > world.versions[j]
    if accepted:
        world.versions[j] = world.versions[i]
        world.contents[j] = world.contents[i]
    return SimEvent(kind="gossip", dt=dt, target=j, sender=i, changed=accepted), world


class _Meter:
    """Time-weighted accumulator over the tracked steady-state indicators.

    Holds the derived measurement state (per-prefix max version/content and
    per-prefix content counts); the event loop updates those incrementally
    and calls flush() with the pending holding time just before any state
    change takes effect.
    """

    def __init__(self, ks: tuple[int, ...], m_states: int, n: int):
        self.ks = list(ks)
        self.nk = len(self.ks)
        self.m = m_states
        self.n = n
        self.inv_n = 1.0 / n
        self.inv_k = [1.0 / k for k in self.ks]
        # layout of the flat accumulator vector
        self.off_cmode = 1
        self.off_f = 1 + m_states
        self.off_g = self.off_f + self.nk
        self.off_joint = self.off_g + self.nk * m_states
        self.off_n = self.off_joint + self.nk
        self.size = self.off_n + self.nk * m_states
        self.acc = [0.0] * self.size
        self.time = 0.0
        self.batch_rows: list[list[float]] = []
        self.batch_times: list[float] = []
        self._prev = [0.0] * self.size
        self._prev_time = 0.0
        # derived state, populated by recompute()
        self.pmax_v = [0] * self.nk
        self.pmax_c = [0] * self.nk
        self.pref_cnt = [[0] * m_states for _ in range(self.nk)]
        self.cnt_full = [0] * m_states

    def recompute(self, world: WorldState):
        """Rebuild all derived state from scratch (used once, post-warmup)."""
        v, s = world.versions, world.contents
        self.cnt_full = [0] * self.m
        for c in s:
            self.cnt_full[c] += 1
        for i, k in enumerate(self.ks):
            best = 0
            for j in range(1, k):
                if v[j] > v[best]:
                    best = j
            self.pmax_v[i] = v[best]
            self.pmax_c[i] = s[best]
            cnt = [0] * self.m
            for j in range(k):
                cnt[s[j]] += 1
            self.pref_cnt[i] = cnt

    def flush(self, q: int, v0: int, dt: float):
        """Accumulate the current indicator values over a holding interval."""
        if dt == 0.0:
            return
        acc = self.acc
        cfrac = self.cnt_full[q] * self.inv_n
        x = cfrac * dt
        acc[0] += x
        acc[self.off_cmode + q] += x
        m = self.m
        for i in range(self.nk):
            if self.pmax_c[i] == q:
                acc[self.off_f + i] += dt
            pc = self.pref_cnt[i]
            if self.pmax_v[i] == v0:
                acc[self.off_g + i * m + q] += dt
                acc[self.off_joint + i] += pc[q] * self.inv_k[i] * dt
            base = self.off_n + i * m
            for qq in range(m):
                acc[base + qq] += pc[qq] * dt
        self.time += dt

    def close_batch(self):
        row = [a - p for a, p in zip(self.acc, self._prev)]
        self.batch_rows.append(row)
        self.batch_times.append(self.time - self._prev_time)
        self._prev = list(self.acc)
        self._prev_time = self.time


def _run_events(
    count, q, v0, V, S, rng, block, bi, meter, nu, total, src_cum, src_tgt, n, ls, counts
):
    """Tight event loop; returns updated (q, v0, block, bi, pending, elapsed).

    Semantically identical to repeated step() calls with the same generator
    stream (verified by a parity test); kept separate so the hot path stays
    free of per-event function calls.
    """
    pend = 0.0
    elapsed = 0.0
    blen = len(block)
    if meter is not None:
        flush = meter.flush
        mv, mc = meter.pmax_v, meter.pmax_c
        mpref, mcf = meter.pref_cnt, meter.cnt_full
        ks, nk = meter.ks, meter.nk
    for _ in range(count):
        if bi + 5 > blen:
            block = block[bi:] + rng.random(_BLOCK).tolist()
            bi = 0
            blen = len(block)
        r_tot = total[q]
        dt = -log(1.0 - block[bi]) / r_tot
        bi += 1
        pend += dt
        elapsed += dt
        x = block[bi] * r_tot
        bi += 1
        nq = nu[q]
        if x < nq:
            counts[0] += 1
            u = block[bi]
            bi += 1
            cum = src_cum[q]
            idx = 0
            while u > cum[idx]:
                idx += 1
            if meter is not None:
                flush(q, v0, pend)
            pend = 0.0
            q = src_tgt[q][idx]
            v0 += 1
        elif x < nq + ls:
            counts[1] += 1
            j = int(block[bi] * n)
            bi += 1
            if V[j] != v0:
                if meter is not None:
                    flush(q, v0, pend)
                    old = S[j]
                    if old != q:
                        mcf[old] -= 1
                        mcf[q] += 1
                        for i in range(nk):
                            if j < ks[i]:
                                pc = mpref[i]
                                pc[old] -= 1
                                pc[q] += 1
                    for i in range(nk):
                        if j < ks[i]:
                            mv[i] = v0
                            mc[i] = q
                pend = 0.0
                V[j] = v0
                S[j] = q
        else:
            counts[2] += 1
            i_ = int(block[bi] * n)
            bi += 1
            j = int(block[bi] * (n - 1))
            bi += 1
            if j >= i_:
                j += 1
            vi = V[i_]
            if vi > V[j]:
                si = S[i_]
                if meter is not None:
                    flush(q, v0, pend)
                    old = S[j]
                    if old != si:
                        mcf[old] -= 1
                        mcf[si] += 1
                        for ii in range(nk):
                            if j < ks[ii]:
                                pc = mpref[ii]
                                pc[old] -= 1
                                pc[si] += 1
                    for ii in range(nk):
                        if j < ks[ii] and vi > mv[ii]:
                            mv[ii] = vi
                            mc[ii] = si
                pend = 0.0
                V[j] = vi
                S[j] = si
    return q, v0, block, bi, pend, elapsed


def run(cfg: SimConfig) -> SimReport:
    """Simulate warmup + measurement and return all steady-state estimates.

    Fully deterministic in the seed: identical configs produce bit-identical
    reports.
    """
    gen, params = cfg.generator, cfg.params
    n, m = params.n, gen.size
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    world = init_state(cfg, rng)
    nu, total, src_cum, src_tgt = _event_tables(gen, params)

    q, v0 = world.source_state, world.source_version
    V, S = world.versions, world.contents
    counts = [0, 0, 0]
    block = rng.random(_BLOCK).tolist()
    bi = 0

    q, v0, block, bi, _, elapsed = _run_events(
        cfg.warmup_events, q, v0, V, S, rng, block, bi, None,
        nu, total, src_cum, src_tgt, n, params.lambda_s, counts,
    )
    world.clock += elapsed
    world.source_state, world.source_version = q, v0

    meter = _Meter(cfg.subset_sizes, m, n)
    meter.recompute(world)
    warm_counts = tuple(counts)

    base, rem = divmod(cfg.measure_events, cfg.batches)
    for b in range(cfg.batches):
        n_ev = base + (1 if b < rem else 0)
        q, v0, block, bi, pend, elapsed = _run_events(
            n_ev, q, v0, V, S, rng, block, bi, meter,
            nu, total, src_cum, src_tgt, n, params.lambda_s, counts,
        )
        meter.flush(q, v0, pend)
        meter.close_batch()
        world.clock += elapsed
    world.source_state, world.source_version = q, v0

    return _assemble_report(cfg, meter, counts, warm_counts)


def _assemble_report(cfg, meter: _Meter, counts, warm_counts) -> SimReport:
    t = meter.time
    acc = meter.acc
    m, nk, ks = meter.m, meter.nk, meter.ks
    rows = np.asarray(meter.batch_rows)
    times = np.asarray(meter.batch_times)
    means = rows / times[:, None]

    def est(slot) -> Estimate:
        return Estimate(value=acc[slot] / t, stderr=batch_stderr(means[:, slot]))

    f_hat = {k: est(meter.off_f + i) for i, k in enumerate(ks)}
    c_hat = est(0)
    c_mode = tuple(est(meter.off_cmode + mm) for mm in range(m))
    g_mode = {
        k: tuple(est(meter.off_g + i * m + mm) for mm in range(m))
        for i, k in enumerate(ks)
    }
    n_cnt = {
        k: tuple(est(meter.off_n + i * m + qq) for qq in range(m))
        for i, k in enumerate(ks)
    }
    joint = {k: est(meter.off_joint + i) for i, k in enumerate(ks)}

    product = {}
    for i, k in enumerate(ks):
        total_val = sum(
            (acc[meter.off_cmode + mm] / t) * (acc[meter.off_g + i * m + mm] / t)
            for mm in range(m)
        )
        per_batch = np.zeros(len(times))
        for mm in range(m):
            per_batch += means[:, meter.off_cmode + mm] * means[:, meter.off_g + i * m + mm]
        product[k] = Estimate(value=total_val, stderr=batch_stderr(per_batch))

    event_counts = {
        "warmup": sum(warm_counts),
        "source": counts[0] - warm_counts[0],
        "push": counts[1] - warm_counts[1],
        "gossip": counts[2] - warm_counts[2],
    }
    return SimReport(
        freshest_accuracy=f_hat,
        mean_accuracy=c_hat,
        mean_accuracy_mode=c_mode,
        zero_age_mode=g_mode,
        content_counts=n_cnt,
        fresh_accurate_product=product,
        fresh_accurate_joint=joint,
        sim_time=t,
        batches=cfg.batches,
        event_counts=event_counts,
        config=cfg,
    )


# --- configuration and report serialization ---

def sim_config_from_json(doc: dict, base_dir: str | Path = ".") -> SimConfig:
    """Build a SimConfig from its JSON document form.

    "generator" is either an inline {"states", "rates"} object or a path to
    a generator file (resolved against base_dir).
    """
    if not isinstance(doc, dict):
        raise InvalidParameter("simulation config must be a JSON object")
    try:
        gspec = doc["generator"]
        n = doc["n"]
        lambda_s = doc["lambda_s"]
        lambda_ = doc["lambda"]
    except KeyError as exc:
        raise InvalidParameter(f"simulation config is missing key {exc}") from None
    if isinstance(gspec, str):
        gen = load_generator(Path(base_dir) / gspec)
    else:
        gen = generator_from_json(gspec)
    params = NetworkParams(n=n, lambda_s=float(lambda_s), lambda_=float(lambda_))
    measure = int(doc.get("measure_events", DEFAULT_EVENTS))
    return SimConfig(
        generator=gen,
        params=params,
        seed=int(doc.get("seed", 1)),
        warmup_events=int(doc.get("warmup_events", measure // 10)),
        measure_events=measure,
        subset_sizes=tuple(doc.get("subset_sizes", [1, params.n])),
        batches=int(doc.get("batches", DEFAULT_BATCHES)),
    )


def sim_config_to_json(cfg: SimConfig) -> dict:
    """Exact echo of the configuration (provenance sidecar)."""
    return {
        "generator": generator_to_json(cfg.generator),
        "n": cfg.params.n,
        "lambda_s": cfg.params.lambda_s,
        "lambda": cfg.params.lambda_,
        "seed": cfg.seed,
        "warmup_events": cfg.warmup_events,
        "measure_events": cfg.measure_events,
        "subset_sizes": list(cfg.subset_sizes),
        "batches": cfg.batches,
    }


def load_sim_config(path) -> SimConfig:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return sim_config_from_json(doc, base_dir=path.parent)


def report_rows(rep: SimReport) -> list[tuple]:
    """Flatten a report into (quantity, k_or_q, estimate, stderr, batches, sim_time) rows."""
    rows = []

    def add(name, key, e: Estimate):
        rows.append((name, key, e.value, e.stderr, rep.batches, rep.sim_time))

    for k in sorted(rep.freshest_accuracy):
        add("f", k, rep.freshest_accuracy[k])
    add("c", rep.config.params.n, rep.mean_accuracy)
    for mm, e in enumerate(rep.mean_accuracy_mode):
        add("c_mode", mm, e)
    for k in sorted(rep.zero_age_mode):
        for mm, e in enumerate(rep.zero_age_mode[k]):
            add(f"g_k{k}", mm, e)
    for k in sorted(rep.content_counts):
        for qq, e in enumerate(rep.content_counts[k]):
            add(f"n_k{k}", qq, e)
    for k in sorted(rep.fresh_accurate_product):
        add("G_product", k, rep.fresh_accurate_product[k])
    for k in sorted(rep.fresh_accurate_joint):
        add("G_joint", k, rep.fresh_accurate_joint[k])
    return rows

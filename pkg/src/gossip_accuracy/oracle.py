"""Exact steady-state ground truth for two-node networks.

The unbounded version counters collapse onto a finite CTMC over
(source mode, both node contents, relative freshness, zero-age flags):
every tracked metric depends on the world only through that tuple, and its
transition law is closed, so the lumping is exact.  Used to certify the
analytic recursions and the simulator end to end at n = 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotTwoNodes, Reducible
from .markov import GeneratorMatrix, NetworkParams, _stationary_from_rates

REL_TIE = 0
REL_NODE1 = 1
REL_NODE2 = 2


class CompressedState(NamedTuple):
    q: int          # source mode
    s1: int         # content at node 1
    s2: int         # content at node 2
    rel: int        # REL_TIE | REL_NODE1 | REL_NODE2 (strictly fresher node)
    b1: bool        # node 1 holds the current version
    b2: bool


@dataclass(frozen=True)
class CompressedChain:
    states: tuple[CompressedState, ...]
    rates: np.ndarray
    index: dict[CompressedState, int]


@dataclass(frozen=True)
class OracleResult:
    """Exact values of every metric family at n = 2.

    fresh_accurate_joint is the true joint probability
    P(node 1 accurate and zero-age); fresh_accurate_product is the mode-wise
    product sum c^(m) g^(m) so the gap between the two constructions is
    reported, not hidden.
    """

    c: float
    f1: float
    f2: float
    fresh_accurate_joint: float
    content_counts: np.ndarray   # E[# nodes holding q], per content q
    c_modes: np.ndarray
    g_modes: np.ndarray          # P(source mode m, node 1 zero-age)
    fresh_accurate_product: float

    @property
    def product_gap(self) -> float:
        return self.fresh_accurate_joint - self.fresh_accurate_product


def _successors(st: CompressedState, gen: GeneratorMatrix, lambda_s: float, lam: float):
    """Outgoing (rate, state) pairs; self-loops (gossip no-ops) omitted."""
    q, s1, s2, rel, b1, b2 = st
    out = []
    for j in range(gen.size):
        if j != q and gen.rates[q, j] > 0:
            # a source transition bumps the version, clearing both flags
            out.append((gen.rates[q, j], CompressedState(j, s1, s2, rel, False, False)))
    if lambda_s > 0:
        half = lambda_s / 2
        out.append((half, CompressedState(q, q, s2, REL_TIE if b2 else REL_NODE1, True, b2)))
        out.append((half, CompressedState(q, s1, q, REL_TIE if b1 else REL_NODE2, b1, True)))
    if lam > 0:
        # ordered-pair gossip at rate lambda/(n-1) = lambda; only a strictly
        # fresher sender changes anything, leaving a tie with shared content
        if rel == REL_NODE1:
            out.append((lam, CompressedState(q, s1, s1, REL_TIE, b1, b1)))
        elif rel == REL_NODE2:
            out.append((lam, CompressedState(q, s2, s2, REL_TIE, b2, b2)))
    return out


def build_compressed_chain(gen: GeneratorMatrix, params: NetworkParams) -> CompressedChain:
    """Enumerate the reachable compressed states by closure and assemble rates."""
    if params.n != 2:
        raise NotTwoNodes(f"oracle needs n = 2, got n = {params.n}")
    if params.lambda_s <= 0:
        raise Reducible("with lambda_s = 0 node contents freeze; the chain is not ergodic")

    starts = [CompressedState(q, q, q, REL_TIE, True, True) for q in range(gen.size)]
    seen = set(starts)
    stack = list(starts)
    adjacency = {}
    while stack:
        st = stack.pop()
        succ = _successors(st, gen, params.lambda_s, params.lambda_)
        adjacency[st] = succ
        for _, nxt in succ:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)

    states = tuple(sorted(seen))
    index = {s: i for i, s in enumerate(states)}
    rates = np.zeros((len(states), len(states)))
    for st, succ in adjacency.items():
        i = index[st]
        for rate, nxt in succ:
            if nxt != st:
                rates[i, index[nxt]] += rate
    np.fill_diagonal(rates, -rates.sum(axis=1))
    rates.setflags(write=False)
    return CompressedChain(states=states, rates=rates, index=index)


def oracle_solve(chain: CompressedChain) -> OracleResult:
    """Stationary solve plus indicator readouts of every metric family."""
    pi = _stationary_from_rates(chain.rates)
    m = max(s.q for s in chain.states) + 1

    c = f1 = f2 = joint = 0.0
    counts = np.zeros(m)
    c_modes = np.zeros(m)
    g_modes = np.zeros(m)
    for st, p in zip(chain.states, pi):
        acc = ((st.s1 == st.q) + (st.s2 == st.q)) / 2.0
        c += p * acc
        c_modes[st.q] += p * acc
        f1 += p * (st.s1 == st.q)
        fresh_content = st.s2 if st.rel == REL_NODE2 else st.s1  # tie: contents agree
        f2 += p * (fresh_content == st.q)
        joint += p * (st.b1 and st.s1 == st.q)
        counts[st.s1] += p
        counts[st.s2] += p
        if st.b1:
            g_modes[st.q] += p

    product = float(c_modes @ g_modes)
    counts.setflags(write=False)
    c_modes.setflags(write=False)
    g_modes.setflags(write=False)
    return OracleResult(
        c=float(c),
        f1=float(f1),
        f2=float(f2),
        fresh_accurate_joint=float(joint),
        content_counts=counts,
        c_modes=c_modes,
        g_modes=g_modes,
        fresh_accurate_product=product,
    )


def chain_rows(chain: CompressedChain) -> list[tuple]:
    """Debug dump of the reachable chain: one row per state with its exit rate."""
    exit_rates = -np.diag(chain.rates)
    return [
        (i, st.q, st.s1, st.s2, st.rel, int(st.b1), int(st.b2), float(exit_rates[i]))
        for i, st in enumerate(chain.states)
    ]

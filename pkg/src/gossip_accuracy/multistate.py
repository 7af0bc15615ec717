"""General M-state source accuracy via the joint chain Z_k = (source, freshest content).

The joint process lives on M^2 states ordered row-major as
(0,0), (0,1), ..., (M-1,M-1): source state first, then the content of the
freshest node of the k-subset.  Its generator is the sum of a source
component, a push component, and an outsider-gossip component whose rates are
conditional content probabilities read off the (k+1)-subset solution, so the
whole family is built backward from k = n where no outsiders exist.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, KOutOfRange, ModeMismatch, ZeroModeMass
from .markov import (
    GeneratorMatrix,
    NetworkParams,
    StationaryDistribution,
    _stationary_from_rates,
    rate_triple,
)

ZERO_MASS_TOL = 1e-14


def joint_index(q: int, r: int, m_states: int) -> int:
    """Linear index of joint state (q, r) under the row-major ordering."""
    if not (0 <= q < m_states and 0 <= r < m_states):
        raise InvalidParameter(f"state ({q},{r}) outside 0..{m_states - 1}")
    return q * m_states + r


@dataclass(frozen=True)
class JointStationary:
    """Stationary distribution of the joint chain for one subset size."""

    m_states: int
    probs: np.ndarray

    def as_matrix(self) -> np.ndarray:
        """View indexed as [q, r]."""
        return self.probs.reshape(self.m_states, self.m_states)

    def freshness(self) -> float:
        """f_k = P(freshest content equals the source state) = trace of the matrix view."""
        return float(np.trace(self.as_matrix()))

    def source_marginal(self) -> np.ndarray:
        return self.as_matrix().sum(axis=1)


@dataclass(frozen=True)
class ConditionalContent:
    """Row-stochastic matrix p[q, r] = P(freshest content = r | source = q)."""

    probs: np.ndarray


@dataclass(frozen=True)
class BackwardProfile:
    """Output of the backward construction: pi^(k) and f_k for k = n..1."""

    by_k: dict[int, JointStationary]
    f: dict[int, float]


def build_src_component(gen: GeneratorMatrix) -> np.ndarray:
    """Source transitions act on the q coordinate only: ((i,r),(j,r)) = q_ij."""
    m = gen.size
    out = np.zeros((m * m, m * m))
    for i in range(m):
        for j in range(m):
            for r in range(m):
                out[i * m + r, j * m + r] = gen.rates[i, j]
    return out


def build_push_component(alpha_k: float, m_states: int) -> np.ndarray:
    """Pushes reset the freshest content to the source state at rate alpha_k."""
    if alpha_k < 0:
        raise InvalidParameter(f"alpha_k must be >= 0, got {alpha_k}")
    m = m_states
    out = np.zeros((m * m, m * m))
    for i in range(m):
        for r in range(m):
            if r != i:
                out[i * m + r, i * m + i] = alpha_k
                out[i * m + r, i * m + r] = -alpha_k
    return out


def conditional_content(pi_next: JointStationary) -> ConditionalContent:
    """Conditional content distribution p_{r|q} from the (k+1)-subset solution."""
    mat = pi_next.as_matrix()
    marg = mat.sum(axis=1)
    if marg.min() < ZERO_MASS_TOL:
        q = int(np.argmin(marg))
        raise ZeroModeMass(f"source mode {q} has stationary mass {marg[q]:.3e}")
    probs = mat / marg[:, None]
    probs.setflags(write=False)
    return ConditionalContent(probs=probs)


def build_out_component(beta_k: float, p: ConditionalContent) -> np.ndarray:
    """Outsider gossip re-draws the freshest content from p_{.|q} at rate beta_k."""
    if beta_k < 0:
        raise InvalidParameter(f"beta_k must be >= 0, got {beta_k}")
    m = p.probs.shape[0]
    out = np.zeros((m * m, m * m))
    for q in range(m):
        for r in range(m):
            for rp in range(m):
                if rp != r:
                    out[q * m + r, q * m + rp] = beta_k * p.probs[q, rp]
            out[q * m + r, q * m + r] = -beta_k * (1.0 - p.probs[q, r])
    return out


def backward_construct(gen: GeneratorMatrix, params: NetworkParams) -> BackwardProfile:
    """Build pi^(k) and f_k for k = n down to 1.

    Initializes at k = n (beta_n = 0, alpha_n = lambda_s), then alternates
    conditional-content extraction, generator assembly, and a stationary
    solve.  Requires lambda_s > 0: without pushes the content coordinate of
    the full-network chain never moves and pi^(n) is not well defined.
    """
    if params.lambda_s <= 0:
        raise InvalidParameter(
            "backward construction needs lambda_s > 0; the no-push regime is "
            "covered by the binary limit formulas"
        )
    m = gen.size
    n = params.n
    src = build_src_component(gen)

    by_k: dict[int, JointStationary] = {}
    f: dict[int, float] = {}

    rates_n = src + build_push_component(params.lambda_s, m)
    pi = _stationary_from_rates(rates_n)
    pi.setflags(write=False)
    by_k[n] = JointStationary(m_states=m, probs=pi)
    f[n] = by_k[n].freshness()

    for k in range(n - 1, 0, -1):
        p = conditional_content(by_k[k + 1])
        rt = rate_triple(params, k)
        rates_k = src + build_push_component(rt.alpha_k, m) + build_out_component(rt.beta_k, p)
        pi = _stationary_from_rates(rates_k)
        pi.setflags(write=False)
        by_k[k] = JointStationary(m_states=m, probs=pi)
        f[k] = by_k[k].freshness()

    return BackwardProfile(by_k=by_k, f=f)


def mode_tagged_accuracy(pi_1: JointStationary) -> np.ndarray:
    """Mode-tagged single-node accuracy c^(m) = pi^(1)_{m,m}; sums to c = f_1."""
    return np.diag(pi_1.as_matrix()).copy()


def node_count_content(
    k: int, pi: StationaryDistribution, q: int, n: int | None = None
) -> float:
    """Expected number of nodes in a k-subset holding content q: exactly k pi_q.

    Independent of both transmission rates; the underlying identity is that
    the content of the freshest node of any subset has distribution pi.
    """
    if k < 1 or (n is not None and k > n):
        raise KOutOfRange(f"k = {k} outside 1..{n if n is not None else '?'}")
    m = len(pi.probs)
    if not 0 <= q < m:
        raise ModeMismatch(f"content state {q} outside 0..{m - 1}")
    return k * float(pi.probs[q])

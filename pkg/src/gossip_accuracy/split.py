"""Decompose accuracy into fresh-and-accurate versus accurate-but-stale.

g_k^(m) is the stationary probability that the source sits in mode m while
the k-subset holds a zero-age packet.  The fresh-and-accurate fraction is the
mode-wise product sum G_k = sum_m c^(m) g_k^(m); whatever accuracy remains,
c - G_k, is carried by stale packets that happen to match the source again.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, ModeMismatch
from .markov import GeneratorMatrix, NetworkParams, rate_triple, stationary_distribution

LIMIT_REGIMES = ("ls_inf", "ls_zero", "l_inf", "l_zero")


@dataclass(frozen=True)
class FreshnessOccupancy:
    """Zero-age occupancy g_k^(m); values[k - 1, m] indexed by subset size."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m_states(self) -> int:
        return self.values.shape[1]

    def per_k(self, k: int) -> np.ndarray:
        return self.values[k - 1]


@dataclass(frozen=True)
class SplitReport:
    """Fresh-and-accurate fraction G_k with its stale remainder, per subset size."""

    fresh_accurate: np.ndarray
    stale_accurate: np.ndarray
    per_mode: np.ndarray
    c: float

    def g_value(self, k: int) -> float:
        return float(self.fresh_accurate[k - 1])


def g_recursion(gen: GeneratorMatrix, params: NetworkParams) -> FreshnessOccupancy:
    """Backward recursion for g_k^(m).

    Boundary g_n^(m) = lambda_s pi_m / (nu_m + lambda_s), then
    g_k^(m) = (alpha_k pi_m + beta_k g_{k+1}^(m)) / (nu_m + alpha_k + beta_k)
    for k = n-1 .. 1.  Denominators stay positive for any irreducible source.
    """
    pi = stationary_distribution(gen).probs
    nu = gen.exit_rates
    n = params.n
    out = np.zeros((n, gen.size))
    out[n - 1] = params.lambda_s * pi / (nu + params.lambda_s)
    for k in range(n - 1, 0, -1):
        rt = rate_triple(params, k)
        out[k - 1] = (rt.alpha_k * pi + rt.beta_k * out[k]) / (nu + rt.alpha_k + rt.beta_k)
    out.setflags(write=False)
    return FreshnessOccupancy(values=out)


def binary_matrix_form(
    q12: float, q21: float, params: NetworkParams, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal step matrices (A_k, B_k) of the two-state specialization
    g_k = A_k pi + B_k g_{k+1}."""
    rt = rate_triple(params, k)
    d1 = q12 + rt.alpha_k + rt.beta_k
    d2 = q21 + rt.alpha_k + rt.beta_k
    a = np.diag([rt.alpha_k / d1, rt.alpha_k / d2])
    b = np.diag([rt.beta_k / d1, rt.beta_k / d2])
    return a, b


def fresh_accurate_fraction(occ: FreshnessOccupancy, c_modes) -> SplitReport:
    """Combine mode-tagged accuracy with zero-age occupancy into G_k per k."""
    c_modes = np.asarray(c_modes, dtype=float)
    if c_modes.shape != (occ.m_states,):
        raise ModeMismatch(
            f"c has {c_modes.shape} modes but g has {occ.m_states}"
        )
    per_mode = occ.values * c_modes[None, :]
    fresh = per_mode.sum(axis=1)
    c = float(c_modes.sum())
    stale = c - fresh
    # A negative remainder would mean G_k > c, which the product form cannot
    # produce; treat it as a bug rather than clamping.
    assert stale.min() > -1e-12, f"stale-accurate fraction {stale.min()} < 0"
    return SplitReport(fresh_accurate=fresh, stale_accurate=stale, per_mode=per_mode, c=c)


def g_limits(gen: GeneratorMatrix, params: NetworkParams, regime: str) -> FreshnessOccupancy:
    """Exact limit formulas for the zero-age occupancy.

    ls_inf:  g_k^(m) = pi_m for every k.
    ls_zero: identically zero.
    l_inf:   every k equals the boundary g_n.
    l_zero:  g_k^(m) = alpha_k pi_m / (nu_m + alpha_k), k-dependent.
    """
    pi = stationary_distribution(gen).probs
    nu = gen.exit_rates
    n = params.n
    if regime == "ls_inf":
        out = np.tile(pi, (n, 1))
    elif regime == "ls_zero":
        out = np.zeros((n, gen.size))
    elif regime == "l_inf":
        gn = params.lambda_s * pi / (nu + params.lambda_s)
        out = np.tile(gn, (n, 1))
    elif regime == "l_zero":
        out = np.zeros((n, gen.size))
        for k in range(1, n + 1):
            alpha_k = k * params.lambda_s / n
            out[k - 1] = alpha_k * pi / (nu + alpha_k)
    else:
        raise InvalidParameter(
            f"unknown regime {regime!r}; expected one of {LIMIT_REGIMES}"
        )
    out.setflags(write=False)
    return FreshnessOccupancy(values=out)

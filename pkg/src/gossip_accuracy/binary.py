"""Exact steady-state accuracy for a binary (two-state) source.

Implements the mode-tagged backward freshness recursion, the average-accuracy
linear system, the four asymptotic limit regimes, and the scalar special case
for a symmetric source.  Mode indices are 0-based throughout: mode 0 flips to
mode 1 at rate q12 and back at rate q21.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllRatesZero, DegenerateChain, InvalidParameter
from .markov import NetworkParams, rate_triple, solve_linear

LIMIT_REGIMES = ("ls_inf", "ls_zero", "l_inf", "l_zero")


@dataclass(frozen=True)
class ModeTaggedPair:
    """Mode-tagged expectation, one entry per source mode."""

    v1: float
    v2: float

    @property
    def total(self) -> float:
        return self.v1 + self.v2

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2])


@dataclass(frozen=True)
class BinaryFreshnessProfile:
    """Mode-tagged freshness-based accuracy f_k for every subset size k = 1..n."""

    pairs: tuple[ModeTaggedPair, ...]

    @property
    def n(self) -> int:
        return len(self.pairs)

    def pair(self, k: int) -> ModeTaggedPair:
        return self.pairs[k - 1]

    def total(self, k: int) -> float:
        return self.pairs[k - 1].total


@dataclass(frozen=True)
class BinaryAccuracyReport:
    """Mode-tagged average accuracy c^(m), its sum c, and the f_2 it used."""

    c1: float
    c2: float
    c: float
    f2: ModeTaggedPair


def _check_binary(q12: float, q21: float):
    if not (q12 > 0 and q21 > 0):
        raise DegenerateChain(f"need q12 > 0 and q21 > 0, got {q12}, {q21}")


def _pi(q12: float, q21: float) -> tuple[float, float]:
    s = q12 + q21
    return q21 / s, q12 / s


def boundary_fn(q12: float, q21: float, lambda_s: float) -> ModeTaggedPair:
    """Closed-form boundary f_n of the freshness recursion.

    f_n^(1) = q21 (lambda_s + q21) / [s (lambda_s + s)] and symmetrically for
    mode 2, with s = q12 + q21.  Independent of the network size.
    """
    _check_binary(q12, q21)
    if lambda_s < 0:
        raise InvalidParameter(f"lambda_s must be >= 0, got {lambda_s}")
    s = q12 + q21
    denom = s * (lambda_s + s)
    return ModeTaggedPair(
        v1=q21 * (lambda_s + q21) / denom,
        v2=q12 * (lambda_s + q12) / denom,
    )


def freshness_recursion(q12: float, q21: float, params: NetworkParams) -> BinaryFreshnessProfile:
    """Mode-tagged freshness-based accuracy for all subset sizes.

    Starts from the closed-form boundary at k = n and walks backward through
    W_k f_k = v_k + beta_k f_{k+1}.  W_k is invertible whenever
    alpha_k + beta_k > 0, so lambda_s and lambda may not both vanish.
    """
    _check_binary(q12, q21)
    if params.lambda_s == 0 and params.lambda_ == 0:
        raise AllRatesZero("lambda_s and lambda cannot both be zero")
    pi1, pi2 = _pi(q12, q21)
    n = params.n

    out = [None] * n
    out[n - 1] = boundary_fn(q12, q21, params.lambda_s)
    fk = out[n - 1].as_array()
    for k in range(n - 1, 0, -1):
        rt = rate_triple(params, k)
        a = rt.alpha_k + rt.beta_k
        w = np.array([[q12 + a, q21], [q12, q21 + a]])
        v = np.array([q21 * pi2 + rt.alpha_k * pi1, q12 * pi1 + rt.alpha_k * pi2])
        fk = solve_linear(w, v + rt.beta_k * fk)
        out[k - 1] = ModeTaggedPair(v1=float(fk[0]), v2=float(fk[1]))
    return BinaryFreshnessProfile(pairs=tuple(out))


def average_accuracy(
    q12: float, q21: float, params: NetworkParams, f2: ModeTaggedPair
) -> BinaryAccuracyReport:
    """Mode-tagged average accuracy from the 2x2 system Wbar c = b + lambda f_2.

    The result is the average accuracy of every subset size; f2 must come from
    freshness_recursion at the same parameters (f_2 is f_n when n = 2).
    """
    _check_binary(q12, q21)
    pi1, pi2 = _pi(q12, q21)
    mu = params.mu
    lam = params.lambda_
    wbar = np.array([[q12 + mu + lam, q21], [q12, q21 + mu + lam]])
    b = np.array([q21 * pi2 + mu * pi1, q12 * pi1 + mu * pi2])
    c = solve_linear(wbar, b + lam * f2.as_array())
    return BinaryAccuracyReport(c1=float(c[0]), c2=float(c[1]), c=float(c.sum()), f2=f2)


def limit_accuracy(
    q12: float, q21: float, params: NetworkParams, regime: str
) -> BinaryAccuracyReport:
    """Exact asymptotic limit of the average accuracy.

    ls_inf:  lambda_s -> infinity, c^(m) = pi_m.
    ls_zero: lambda_s -> 0 with lambda > 0; solves the reduced system using
             f_2 evaluated at lambda_s = 0.
    l_inf:   lambda -> infinity, c = f_n from the boundary closed form.
    l_zero:  lambda -> 0 closed form c^(1) = q21 (q21 + mu) / [s (s + mu)].
    """
    _check_binary(q12, q21)
    pi1, pi2 = _pi(q12, q21)
    s = q12 + q21

    if regime == "ls_inf":
        f2 = ModeTaggedPair(v1=pi1, v2=pi2)
        return BinaryAccuracyReport(c1=pi1, c2=pi2, c=1.0, f2=f2)

    if regime == "l_inf":
        fn = boundary_fn(q12, q21, params.lambda_s)
        return BinaryAccuracyReport(c1=fn.v1, c2=fn.v2, c=fn.total, f2=fn)

    if regime == "l_zero":
        mu = params.mu
        denom = s * (s + mu)
        c1 = q21 * (q21 + mu) / denom
        c2 = q12 * (q12 + mu) / denom
        # With no gossip the recursion decouples; f_2 has the boundary form
        # evaluated at alpha_2 = 2 lambda_s / n.
        a2 = 2 * params.lambda_s / params.n
        f2 = ModeTaggedPair(
            v1=q21 * (q21 + a2) / (s * (s + a2)),
            v2=q12 * (q12 + a2) / (s * (s + a2)),
        )
        return BinaryAccuracyReport(c1=c1, c2=c2, c=c1 + c2, f2=f2)

    if regime == "ls_zero":
        lam = params.lambda_
        if lam <= 0:
            raise AllRatesZero("the lambda_s -> 0 limit needs lambda > 0")
        zero_push = NetworkParams(n=params.n, lambda_s=0.0, lambda_=lam)
        f20 = freshness_recursion(q12, q21, zero_push).pair(2)
        w = np.array([[q12 + lam, q21], [q12, q21 + lam]])
        b = np.array([q21 * pi2, q12 * pi1])
        c = solve_linear(w, b + lam * f20.as_array())
        return BinaryAccuracyReport(
            c1=float(c[0]), c2=float(c[1]), c=float(c.sum()), f2=f20
        )

    raise InvalidParameter(f"unknown regime {regime!r}; expected one of {LIMIT_REGIMES}")


def symmetric_freshness(q: float, params: NetworkParams) -> list[float]:
    """Scalar freshness profile for a symmetric source (q12 = q21 = q).

    The source acts as a Poisson update process of rate q, so no mode tags are
    needed: f_n = (q + lambda_s) / (2q + lambda_s) and backward
    f_k = (q + alpha_k + beta_k f_{k+1}) / (2q + alpha_k + beta_k).
    Returned list is indexed by k - 1.
    """
    if q <= 0:
        raise DegenerateChain(f"symmetric flip rate must be positive, got {q}")
    n = params.n
    out = [0.0] * n
    out[n - 1] = (q + params.lambda_s) / (2 * q + params.lambda_s)
    for k in range(n - 1, 0, -1):
        rt = rate_triple(params, k)
        out[k - 1] = (q + rt.alpha_k + rt.beta_k * out[k]) / (2 * q + rt.alpha_k + rt.beta_k)
    return out


def symmetric_accuracy(q: float, params: NetworkParams, f2sym: float) -> float:
    """Average accuracy of a symmetric source:
    (q + lambda_s/n + lambda f_2) / (2q + lambda_s/n + lambda)."""
    if q <= 0:
        raise DegenerateChain(f"symmetric flip rate must be positive, got {q}")
    mu = params.mu
    lam = params.lambda_
    return (q + mu + lam * f2sym) / (2 * q + mu + lam)

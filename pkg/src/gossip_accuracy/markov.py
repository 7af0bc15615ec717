"""CTMC generator validation, stationary solves, and the network rate model.

Everything downstream (analytic recursions, the joint-chain construction,
the exact oracle, and the simulator) builds on the three primitives here:
a validated generator matrix, a dense stationary-distribution solve, and
the per-subset rates (alpha_k, beta_k, gamma_k) of the fully-connected
gossip network.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    BadShape,
    InvalidParameter,
    KOutOfRange,
    NegativeRate,
    Reducible,
    RowSumViolation,
    SingularSystem,
)

# Structural tolerances; all systems here are at most M^2 x M^2 and
# well-conditioned at the rate magnitudes of interest.
STRUCTURAL_TOL = 1e-12
RESIDUAL_TOL = 1e-10
DIAGONAL_TOL = 1e-9
PIVOT_RTOL = 1e-14
# Practical ceiling: beyond this the M^2 x M^2 dense solves stop being cheap.
MAX_STATES = 40


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Validated M-state CTMC rate matrix (row-major, rows sum to zero)."""

    size: int
    rates: np.ndarray

    @property
    def exit_rates(self) -> np.ndarray:
        """Per-state exit rates nu_m = -q_mm."""
        return -np.diag(self.rates)

    def __eq__(self, other):
        return (
            isinstance(other, GeneratorMatrix)
            and self.size == other.size
            and np.array_equal(self.rates, other.rates)
        )


@dataclass(frozen=True)
class StationaryDistribution:
    """Probability vector pi with pi Q = 0 and sum(pi) = 1."""

    probs: np.ndarray


@dataclass(frozen=True)
class NetworkParams:
    """Network size plus the aggregate source push and gossip rates.

    The source pushes to each node at rate lambda_s / n and every ordered
    node pair gossips at rate lambda / (n - 1).
    """

    n: int
    lambda_s: float
    lambda_: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidParameter(f"need an integer node count n >= 2, got {self.n}")
        for name, value in (("lambda_s", self.lambda_s), ("lambda", self.lambda_)):
            if not np.isfinite(value) or value < 0:
                raise InvalidParameter(f"{name} must be finite and >= 0, got {value}")

    @property
    def mu(self) -> float:
        """Per-node source push rate lambda_s / n."""
        return self.lambda_s / self.n


@dataclass(frozen=True)
class RateTriple:
    """Subset-size-k event rates: pushes into the set, gossip into the set
    from outside, and gossip internal to the set."""

    alpha_k: float
    beta_k: float
    gamma_k: float


def _strongly_connected(positive: np.ndarray) -> bool:
    """True when the boolean adjacency matrix is strongly connected.

    Double BFS: node 0 must reach every node along edges and along
    reversed edges.
    """
    m = positive.shape[0]

    def reaches_all(adj):
        seen = np.zeros(m, dtype=bool)
        seen[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for i in frontier:
                for j in np.nonzero(adj[i])[0]:
                    if not seen[j]:
                        seen[j] = True
                        nxt.append(j)
            frontier = nxt
        return bool(seen.all())

    return reaches_all(positive) and reaches_all(positive.T)


def validate_generator(raw) -> GeneratorMatrix:
    """Validate a raw rate matrix and return an exactly renormalized generator.

    Off-diagonals must be nonnegative, the supplied diagonal must agree with
    the negated off-diagonal row sum to within 1e-9 (it is then replaced by
    the exact value), and the positive-rate digraph must be strongly
    connected.
    """
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise BadShape(f"generator must be a square matrix, got shape {arr.shape}")
    m = arr.shape[0]
    if m < 2:
        raise BadShape(f"generator needs at least 2 states, got {m}")
    if m > MAX_STATES:
        raise BadShape(
            f"generator has {m} states; dense solves are only supported up to "
            f"M = {MAX_STATES}"
        )
    if not np.all(np.isfinite(arr)):
        raise BadShape("generator contains non-finite entries")

    off = arr.copy()
    np.fill_diagonal(off, 0.0)
    if (off < 0).any():
        i, j = np.argwhere(off < 0)[0]
        raise NegativeRate(f"off-diagonal rate q[{i},{j}] = {arr[i, j]} is negative")

    expected_diag = -off.sum(axis=1)
    dev = np.abs(np.diag(arr) - expected_diag)
    if dev.max() > DIAGONAL_TOL:
        i = int(np.argmax(dev))
        raise RowSumViolation(
            f"row {i} sums to {arr[i].sum():.3e}, beyond tolerance {DIAGONAL_TOL}"
        )

    rates = off
    rates[np.diag_indices(m)] = expected_diag
    if not _strongly_connected(rates > 0):
        raise Reducible("positive-rate digraph is not strongly connected")

    rates.setflags(write=False)
    return GeneratorMatrix(size=m, rates=rates)


def generator_from_json(doc) -> GeneratorMatrix:
    """Build a generator from the file schema {"states": M, "rates": [[...]]}."""
    if not isinstance(doc, dict):
        raise BadShape("generator document must be a JSON object")
    try:
        states = doc["states"]
        rates = doc["rates"]
    except KeyError as exc:
        raise BadShape(f"generator document is missing key {exc}") from None
    gen = validate_generator(rates)
    if gen.size != states:
        raise BadShape(
            f"declared states = {states} but rates matrix is {gen.size}x{gen.size}"
        )
    return gen


def load_generator(path) -> GeneratorMatrix:
    """Read a generator JSON file; errors follow the validate_generator taxonomy."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return generator_from_json(doc)


def generator_to_json(gen: GeneratorMatrix) -> dict:
    return {"states": gen.size, "rates": gen.rates.tolist()}


def solve_linear(a, b) -> np.ndarray:
    """Solve the dense system A x = b by LU elimination with partial pivoting.

    Raises SingularSystem when a pivot falls below 1e-14 * ||A||_inf or the
    residual cannot be driven below 1e-10 * (1 + ||b||_inf) by one step of
    iterative refinement.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise BadShape(f"matrix must be square, got shape {a.shape}")
    if b.shape != (a.shape[0],):
        raise BadShape(f"rhs shape {b.shape} does not match matrix {a.shape}")

    norm_a = np.abs(a).sum(axis=1).max()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # we do our own pivot check
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= PIVOT_RTOL * norm_a:
        raise SingularSystem(
            f"pivot {pivots.min():.3e} below threshold {PIVOT_RTOL * norm_a:.3e}"
        )
    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)

    tol = RESIDUAL_TOL * (1.0 + np.abs(b).max())
    resid = b - a @ x
    if np.abs(resid).max() > tol:
        x = x + scipy.linalg.lu_solve((lu, piv), resid, check_finite=False)
        resid = b - a @ x
        if np.abs(resid).max() > tol:
            raise SingularSystem(
                f"residual {np.abs(resid).max():.3e} exceeds tolerance {tol:.3e}"
            )
    return x


def _stationary_from_rates(rates: np.ndarray) -> np.ndarray:
    """Stationary row vector of an irreducible rate matrix.

    Replaces the last balance equation of the transposed system with the
    normalization constraint and solves the dense system.
    """
    m = rates.shape[0]
    a = rates.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(m)
    b[-1] = 1.0
    pi = solve_linear(a, b)

    if pi.min() < -STRUCTURAL_TOL:
        raise SingularSystem(f"stationary solve produced probability {pi.min():.3e}")
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = np.abs(pi @ rates).max()
    if residual > RESIDUAL_TOL:
        raise SingularSystem(f"stationary residual {residual:.3e} too large")
    return pi


def stationary_distribution(gen: GeneratorMatrix) -> StationaryDistribution:
    """Stationary distribution pi of a validated generator."""
    pi = _stationary_from_rates(gen.rates)
    pi.setflags(write=False)
    return StationaryDistribution(probs=pi)


def rate_triple(params: NetworkParams, k: int) -> RateTriple:
    """Subset rates of size k: alpha_k = k lambda_s / n,
    beta_k = k (n - k) lambda / (n - 1), gamma_k = k (k - 1) lambda / (n - 1)."""
    n = params.n
    if not 1 <= k <= n:
        raise KOutOfRange(f"k = {k} outside 1..{n}")
    return RateTriple(
        alpha_k=k * params.lambda_s / n,
        beta_k=k * (n - k) * params.lambda_ / (n - 1),
        gamma_k=k * (k - 1) * params.lambda_ / (n - 1),
    )

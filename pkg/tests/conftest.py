import numpy as np
import pytest

from gossip_accuracy import NetworkParams, validate_generator
from gossip_accuracy.presets import BINARY_RATES, FOUR_STATE_RATES

# binary demo chain: state 0 flips to 1 at rate 0.25, back at 0.75
Q12, Q21 = 0.25, 0.75


@pytest.fixture
def binary_gen():
    return validate_generator(BINARY_RATES)


@pytest.fixture
def four_state_gen():
    return validate_generator(FOUR_STATE_RATES)


@pytest.fixture
def params10():
    return NetworkParams(n=10, lambda_s=1.0, lambda_=1.0)


# --- independent oracles used to derive expected values ---

def power_iteration_stationary(rates, tol=1e-15, max_iters=5_000_000):
    """Second stationary solver: power iteration on the uniformized chain."""
    rates = np.asarray(rates, dtype=float)
    m = rates.shape[0]
    unif = 1.1 * max(-np.diag(rates))
    p = np.eye(m) + rates / unif
    v = np.full(m, 1.0 / m)
    for _ in range(max_iters):
        nv = v @ p
        if np.abs(nv - v).max() < tol:
            v = nv
            break
        v = nv
    return v / v.sum()


def substitution_solve(a, b):
    """Second linear solver: plain elimination with row pivoting plus
    back substitution, coded independently of the production path."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    d = len(b)
    for col in range(d - 1):
        p = col + int(np.argmax(np.abs(a[col:, col])))
        if p != col:
            a[[col, p]] = a[[p, col]]
            b[[col, p]] = b[[p, col]]
        for row in range(col + 1, d):
            factor = a[row, col] / a[col, col]
            a[row, col:] -= factor * a[col, col:]
            b[row] -= factor * b[col]
    x = np.zeros(d)
    for row in range(d - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x


def jacobi_freshness(q12, q21, n, lambda_s, lambda_, tol=1e-14):
    """Independent fixed-point iteration of the mode-tagged balance equations."""
    s = q12 + q21
    pi1, pi2 = q21 / s, q12 / s
    f = np.full((n + 2, 2), 0.4)
    for _ in range(1_000_000):
        new = f.copy()
        for k in range(1, n + 1):
            a = k * lambda_s / n
            bk = k * (n - k) * lambda_ / (n - 1)
            up1 = f[k + 1, 0] if k < n else 0.0
            up2 = f[k + 1, 1] if k < n else 0.0
            new[k, 0] = (q21 * (pi2 - f[k, 1]) + a * pi1 + bk * up1) / (q12 + a + bk)
            new[k, 1] = (q12 * (pi1 - f[k, 0]) + a * pi2 + bk * up2) / (q21 + a + bk)
        if np.abs(new - f).max() < tol:
            f = new
            break
        f = new
    return f[1 : n + 1]

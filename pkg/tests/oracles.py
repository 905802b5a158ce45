"""Independent reference computations used only by the test-suite."""

import math

import numpy as np

from stepcarnot.model import EnergyLevelSchedule


def gibbs_list(E, beta):
    w = [math.exp(-beta * e) for e in E]
    z = math.fsum(w)
    return [x / z for x in w]


def kl(p, q):
    return math.fsum(a * math.log(a / b) for a, b in zip(p, q) if a > 0)


def kl_entropy_production(columns, beta, p_init=None):
    """Entropy generated by quench + full thermalisation, one step at a time.

    Each step contributes D(p_before || Gibbs_after) >= 0; this never forms
    the total heat or entropy, so it checks the bookkeeping route independently.
    """
    p = gibbs_list(columns[0], beta) if p_init is None else list(p_init)
    total = 0.0
    for E in columns[1:]:
        q = gibbs_list(E, beta)
        total += kl(p, q)
        p = q
    return total


def rk4_relax(E, beta, gamma, p0, t, steps):
    """Fixed-step RK4 integration of dp/dt = -gamma(2n+1)p + gamma n."""
    n = 1.0 / (math.exp(beta * E) - 1.0)

    def rhs(p):
        return -gamma * (2 * n + 1) * p + gamma * n

    h = t / steps
    p = p0
    for _ in range(steps):
        k1 = rhs(p)
        k2 = rhs(p + h / 2 * k1)
        k3 = rhs(p + h / 2 * k2)
        k4 = rhs(p + h * k3)
        p += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return p


def discrete_xi(f):
    """Two-level speed-fluctuation factor from a cumulative control table."""
    eps = [b - a for a, b in zip(f, f[1:])]
    N = len(eps)
    return N * math.fsum(e * e for e in eps) / math.fsum(eps) ** 2


def random_schedule(seed, M=None, N=None, tau=1.0):
    rng = np.random.default_rng(seed)
    M = M or int(rng.integers(2, 7))
    N = N or int(rng.integers(1, 51))
    eps = rng.uniform(-1, 1, size=(M, N))
    # spacing 2N+1 keeps every level inside its own band, so no crossing
    E0 = (2 * N + 1) * np.arange(M, dtype=float)
    return EnergyLevelSchedule.from_steps(E0, eps, tau)

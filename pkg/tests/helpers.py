"""Random valid objects and small oracles shared by the tests."""

import math

import numpy as np
from scipy.stats import ortho_group

from alienquanta.phase_space import (
    ComplexStructure,
    DynamicsGenerator,
    PhaseSpace,
    j_from_dynamics,
    make_standard_phase_space,
)

# criterion number -> PASS/FAIL line, filled by the acceptance tests
ACCEPTANCE = {}


def oscillators(omegas, space=None):
    """Uncoupled oscillators on the interleaved standard space."""
    n = len(omegas)
    S = space or make_standard_phase_space(n)
    A = np.zeros((2 * n, 2 * n))
    for i, w in enumerate(omegas):
        A[2 * i, 2 * i + 1] = 1.0
        A[2 * i + 1, 2 * i] = -w * w
    return DynamicsGenerator(S, A)


def osc_J(*omegas) -> ComplexStructure:
    return j_from_dynamics(oscillators(omegas))


def random_spd(rng, d, spread=1.0):
    Q = ortho_group.rvs(d, random_state=rng) if d > 1 else np.eye(1)
    return Q @ np.diag(np.exp(rng.uniform(-spread, spread, d))) @ Q.T


def random_space(rng, n, canonical=True):
    if canonical:
        return make_standard_phase_space(n)
    P = np.eye(2 * n) + 0.3 * rng.normal(size=(2 * n, 2 * n))
    form = make_standard_phase_space(n).form
    return PhaseSpace(P.T @ form @ P)


def random_generator(rng, n, space=None, spread=1.0, scale=None):
    """``A = -form^{-1} h`` with ``h`` positive definite: a positive-energy flow."""
    S = space or make_standard_phase_space(n)
    h = random_spd(rng, 2 * n, spread)
    if scale is not None:
        h = h * scale
    return DynamicsGenerator(S, -np.linalg.solve(S.form, h))


def random_J(rng, n, space=None, spread=0.5):
    return j_from_dynamics(random_generator(rng, n, space, spread))


def squeezed_distribution(mean, n_max):
    """``P(N = k)`` of a single-mode squeezed vacuum with ``sinh^2 r = mean``."""
    r = math.asinh(math.sqrt(mean))
    t = math.tanh(r)
    out = np.zeros(n_max + 1)
    for k in range(0, n_max + 1, 2):
        j = k // 2
        out[k] = math.comb(2 * j, j) / 4**j * t ** (2 * j) / math.cosh(r)
    return out


def truncated_distribution(T, N, state_vec, n_max):
    """Number distribution from a dense eigendecomposition of a truncated ``N``."""
    lam, V = np.linalg.eigh(N)
    amp = np.abs(V.conj().T @ state_vec) ** 2
    k = np.rint(lam).astype(int)
    out = np.zeros(n_max + 1)
    for kk in range(n_max + 1):
        out[kk] = amp[(k == kk) & (np.abs(lam - kk) < 1e-6)].sum()
    return out

"""Representation-free calculus for quasi-free (Gaussian) states.

A zero-mean Gaussian state on the Weyl algebra over ``(S, sigma)`` is fixed by
a symmetric positive form ``G`` through its two-point function::

    <Phi(f) Phi(g)> = (G(f, g) + i sigma(f, g)) / 2

The Fock vacuum of a complex structure ``J`` has ``G = mu_J``; restricting it
to a subspace gives a (generally mixed) Gaussian state with ``G`` restricted.
Everything here works from ``G`` and ``sigma`` alone, without a Hilbert space.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvariantError
from .phase_space import (
    DERIVED_TOL,
    VALIDATION_TOL,
    ComplexStructure,
    PhaseSpace,
    _frozen,
    complex_eigenmodes,
    complex_orthonormal_basis,
    mu_normalize,
)

#: Mode cap for multi-mode tail probabilities.
MAX_TAIL_MODES = 12
#: Cap on stored density-matrix entries in the Fock-amplitude recursion.
MAX_TAIL_ENTRIES = 2_000_000
#: Growth a family's last step must exceed to be called divergent.
DIVERGENCE_STEP = 1e-3


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean Gaussian state given by its symmetric two-point form ``gram``."""

    space: PhaseSpace
    gram: np.ndarray

    def __post_init__(self):
        g = self.space.check_matrix(self.gram)
        if np.max(np.abs(g - g.T)) > 1e-10 * max(1.0, np.max(np.abs(g))):
            raise InvariantError("two-point form is not symmetric", check="symmetry")
        object.__setattr__(self, "gram", _frozen(0.5 * (g + g.T)))

    def two_point(self, f, g) -> complex:
        f = self.space.check_vector(f)
        g = self.space.check_vector(g)
        return 0.5 * complex(f @ self.gram @ g, f @ self.space.form @ g)

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Williamson eigenvalues of ``gram`` relative to ``sigma`` (ascending).

        They are ``>= 1`` for a physical state, all equal to 1 iff it is pure.
        The covariance ``gram / 2`` then has eigenvalues ``>= 1/2``.
        """
        ev = np.linalg.eigvals(np.linalg.solve(self.space.form, self.gram))
        nu = np.sort(np.abs(ev.imag))
        return nu[::2]

    def restrict(self, basis) -> "GaussianState":
        """Restriction to the symplectic subspace spanned by the rows of ``basis``."""
        B = np.atleast_2d(np.asarray(basis, dtype=float))
        if B.shape[1] != self.space.dim:
            raise DimensionError("basis vectors do not match the phase space")
        sub = PhaseSpace(B @ self.space.form @ B.T)
        return GaussianState(sub, B @ self.gram @ B.T)


class FockVacuumState(GaussianState):
    """The Fock vacuum ``omega_J`` of a complex structure, with ``gram = mu_J``."""

    def __init__(self, J: ComplexStructure):
        object.__setattr__(self, "J", J)
        super().__init__(J.space, J.gram)

    def __repr__(self):
        return f"FockVacuumState(dim={self.space.dim})"


def _same_space(a: PhaseSpace, b: PhaseSpace):
    if a != b:
        raise DimensionError("objects live on different phase spaces")


def weyl_expectation(state: GaussianState, f) -> float:
    """``omega(W(f)) = exp(-G(f, f) / 4)``; for a vacuum ``exp(-sigma(f, Jf)/4)``."""
    f = state.space.check_vector(f)
    return math.exp(-float(f @ state.gram @ f) / 4.0)


def two_point(state: GaussianState, f1, f2) -> complex:
    """Vacuum two-point function ``<Phi(f1) Phi(f2)> = (f1, f2)_J / 2``."""
    return state.two_point(f1, f2)


def alien_operator(J1: ComplexStructure, J2: ComplexStructure) -> np.ndarray:
    """``X = -(J1 J2 + J2 J1) - 2I``, positive for ``mu_2`` and zero iff ``J1 = J2``."""
    _same_space(J1.space, J2.space)
    return -(J1.op @ J2.op + J2.op @ J1.op) - 2.0 * np.eye(J1.dim)


def bogoliubov_split(J1: ComplexStructure, J2: ComplexStructure, f):
    """Arguments ``(u, v)`` with ``a_2(f) = a_1^*(u) + a_1(v)``.

    ``u = (I + J1 J2) f / 2`` and ``v = (I - J1 J2) f / 2``.
    """
    _same_space(J1.space, J2.space)
    f = J1.space.check_vector(f)
    P = J1.op @ J2.op
    return 0.5 * (f + P @ f), 0.5 * (f - P @ f)


def mean_alien_number(state: GaussianState, J2: ComplexStructure, f) -> float:
    """Expected number of ``J2``-quanta in the ray of ``f``.

    ``f`` is normalized to ``mu_2(f, f) = 1`` first. For a vacuum ``omega_J1`` this
    is ``mu_2(f, X f) / 4`` with ``X = alien_operator(J1, J2)``; for a mixed state
    it is ``(G(f, f) + G(J2 f, J2 f)) / 4 - 1/2``.
    """
    _same_space(state.space, J2.space)
    f = mu_normalize(J2, f)
    if isinstance(state, FockVacuumState):
        X = alien_operator(state.J, J2)
        return 0.25 * float(f @ J2.gram @ X @ f)
    g = J2.op @ f
    G = state.gram
    return 0.25 * float(f @ G @ f + g @ G @ g) - 0.5


def total_mean_alien_number(state: GaussianState, J2: ComplexStructure) -> float:
    """Total expected ``J2``-quanta: ``Tr_{mu_2}(X) / 8`` for a vacuum.

    The trace runs over a ``mu_2``-orthonormal real basis ``{f_k, J2 f_k}``,
    which visits every complex mode twice. For a mixed state the same sum is
    ``Tr(mu_2^{-1} G) / 4 - n / 2``.
    """
    _same_space(state.space, J2.space)
    mu2 = J2.gram
    if isinstance(state, FockVacuumState):
        X = alien_operator(state.J, J2)
        form = mu2 @ X
        return float(np.trace(np.linalg.solve(mu2, 0.5 * (form + form.T)))) / 8.0
    return 0.25 * float(np.trace(np.linalg.solve(mu2, state.gram))) - 0.25 * state.space.dim


def wick_expectation(w, vectors) -> complex:
    """``<Phi(v1) ... Phi(vk)>`` for a zero-mean Gaussian state, by Wick pairing.

    ``w(f, g)`` is the ordered two-point function; pairs keep their order.
    """
    vectors = list(vectors)
    if not vectors:
        return 1.0 + 0.0j
    if len(vectors) % 2:
        return 0.0j
    first, rest = vectors[0], vectors[1:]
    total = 0.0j
    for i, v in enumerate(rest):
        total += w(first, v) * wick_expectation(w, rest[:i] + rest[i + 1 :])
    return total


def alien_number_variance(state: GaussianState, J2: ComplexStructure, f) -> float:
    """Variance of ``N_{J2}(f)``, from the fourth-moment Wick expansion.

    With ``A = Phi(f)``, ``B = Phi(J2 f)`` and ``f`` ``mu_2``-normalized,
    ``N = (A^2 + B^2 - 1) / 2`` so ``Var N = Var(A^2 + B^2) / 4``.
    """
    _same_space(state.space, J2.space)
    f = mu_normalize(J2, f)
    fields = (f, J2.op @ f)
    w = state.two_point
    second = sum(wick_expectation(w, [x, x]) for x in fields)
    fourth = sum(wick_expectation(w, [x, x, y, y]) for x in fields for y in fields)
    return float((fourth - second**2).real) / 4.0


class Verdict(str, enum.Enum):
    identical = "identical"
    equivalent_finite = "equivalent_finite"
    divergent_family = "divergent_family"


@dataclass(frozen=True)
class EquivalenceReport:
    operator_X: np.ndarray
    total_mean: float
    per_mode_means: tuple
    trace_mu2: float
    verdict: Verdict
    family_totals: tuple = field(default=())


def _pair_report(J1: ComplexStructure, J2: ComplexStructure, tol: float):
    X = alien_operator(J1, J2)
    vals, _ = complex_eigenmodes(J2, X)
    if vals.size and vals.min() < -VALIDATION_TOL * max(1.0, abs(vals).max()):
        raise InvariantError(
            f"alien operator is not mu_2-positive (min eigenvalue {vals.min():.3e})",
            check="alien_positivity",
        )
    state = FockVacuumState(J1)
    total = total_mean_alien_number(state, J2)
    trace = float(np.trace(X))
    if not math.isclose(total, trace / 8.0, rel_tol=0, abs_tol=1e-10 * max(1.0, abs(trace))):
        raise InvariantError("total mean disagrees with trace/8", check="trace_consistency")
    verdict = Verdict.identical if np.max(np.abs(X)) <= tol else Verdict.equivalent_finite
    return X, total, tuple(float(v) / 4.0 for v in vals), trace, verdict


def equivalence_verdict(J1=None, J2=None, family=None, tol: float = VALIDATION_TOL,
                        step_tol: float = DIVERGENCE_STEP) -> EquivalenceReport:
    """Alien-quanta content of ``omega_J1`` relative to ``J2``, or of a family.

    A single pair at finite dimension is always unitarily equivalent, so the
    verdict is ``identical`` (``X = 0``) or ``equivalent_finite``. ``family`` is a
    list of ``(J1, J2)`` pairs at growing dimension; if the total mean grows
    strictly across every step and the last step exceeds ``step_tol`` the verdict
    is ``divergent_family``. The other fields describe the last pair.
    """
    if family is None:
        if J1 is None or J2 is None:
            raise ValueError("need a pair (J1, J2) or a family")
        X, total, means, trace, verdict = _pair_report(J1, J2, tol)
        return EquivalenceReport(X, total, means, trace, verdict)
    family = list(family)
    if not family:
        raise ValueError("empty family")
    totals = []
    for a, b in family:
        X, total, means, trace, verdict = _pair_report(a, b, tol)
        totals.append(total)
    steps = np.diff(totals)
    if len(totals) >= 2 and np.all(steps > 0) and steps[-1] > step_tol:
        verdict = Verdict.divergent_family
    return EquivalenceReport(X, total, means, trace, verdict, tuple(totals))


def mode_state(state: GaussianState, J2: ComplexStructure, f):
    """Reduced state on the ``J2``-ray of ``f`` in canonical coordinates.

    Returns ``(f_normalized, gram_2x2)`` in the basis ``(f, J2 f)`` where the
    form is ``[[0, 1], [-1, 0]]`` and ``J2`` is ``[[0, -1], [1, 0]]``.
    """
    _same_space(state.space, J2.space)
    f = mu_normalize(J2, f)
    B = np.vstack([f, J2.op @ f])
    return f, B @ state.gram @ B.T


def alien_number_distribution(state: GaussianState, J2: ComplexStructure, f, n_max: int,
                              tail_tol: float = 1e-8, max_cutoff: int = 512,
                              rep_tol: float = 1e-8):
    """``P(N_{J2}(f) = k)`` for ``k = 0..n_max`` and the remaining tail mass.

    Computed in a truncated single-mode Fock representation adapted to the
    state and again in one adapted to ``J2``; the two must agree within
    ``rep_tol``. Returns ``(probs, tail)`` with ``probs.sum() + tail == 1``.
    """
    from .fock_rep import mode_distribution

    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _, gram = mode_state(state, J2, f)
    p_state, p_j2, _ = mode_distribution(gram, n_max, tail_tol=tail_tol, max_cutoff=max_cutoff)
    diff = float(np.max(np.abs(p_state - p_j2)))
    if diff > rep_tol:
        raise InvariantError(
            f"representations disagree on the number distribution ({diff:.3e})",
            check="representation_independence",
        )
    probs = p_state[: n_max + 1]
    return probs, 1.0 - float(probs.sum())


def _complex_husimi(gram: np.ndarray) -> np.ndarray:
    """Husimi covariance ``Q`` in ``(a, a^dagger)`` ordering from a mode-block Gram.

    ``gram`` is in the real basis ``(x_1..x_k, p_1..p_k)`` with canonical form.
    """
    k = gram.shape[0] // 2
    eye = np.eye(k)
    W = np.block([[eye, 1j * eye], [eye, -1j * eye]]) / math.sqrt(2.0)
    return W @ (0.5 * gram) @ W.conj().T + 0.5 * np.eye(2 * k)


def _occupations(k: int, n: int):
    out = []
    for total in range(n + 1):
        for combo in itertools.combinations_with_replacement(range(k), total):
            occ = [0] * k
            for c in combo:
                occ[c] += 1
            out.append(tuple(occ))
    return out


def fock_diagonal(gram: np.ndarray, n: int) -> dict:
    """Occupation probabilities ``<p|rho|p>`` for all patterns with ``|p| <= n``.

    ``rho`` is the zero-mean Gaussian state whose Gram matrix ``gram`` is given
    in the canonical block basis ``(x_1..x_k, p_1..p_k)`` of ``k`` modes. The
    density matrix is built entry by entry on the occupation basis truncated to
    at most ``n`` quanta on either side, through the recurrence of its Bargmann
    (multivariate Hermite) representation::

        R(K + e_i) = sum_j A_ij sqrt(K_j) R(K - e_j) / sqrt(K_i + 1)

    with ``A = X (I - Q^{-1})^*`` and ``rho_{pq} = R(p, q) / sqrt(det Q)``.
    The set of index pairs with ``|p|, |q| <= n`` is closed under the
    recurrence, so no cutoff error enters.
    """
    gram = np.asarray(gram, dtype=float)
    k = gram.shape[0] // 2
    Q = _complex_husimi(gram)
    Xs = np.block([[np.zeros((k, k)), np.eye(k)], [np.eye(k), np.zeros((k, k))]])
    A = Xs @ np.conj(np.eye(2 * k) - np.linalg.inv(Q))
    T = 1.0 / np.sqrt(np.linalg.det(Q))
    occ = _occupations(k, n)
    if len(occ) ** 2 > MAX_TAIL_ENTRIES:
        raise ValueError(f"{k} modes with up to {n} quanta exceeds the recursion budget")
    keys = sorted(
        (p + q for p in occ for q in occ),
        key=lambda K: sum(K),
    )
    R = {keys[0]: 1.0 + 0.0j}
    sq = np.sqrt(np.arange(2 * n + 2))
    for K in keys[1:]:
        i = next(idx for idx, v in enumerate(K) if v)
        Kp = list(K)
        Kp[i] -= 1
        acc = 0.0j
        for j, kj in enumerate(Kp):
            if kj and A[i, j] != 0:
                Kj = Kp.copy()
                Kj[j] -= 1
                acc += A[i, j] * sq[kj] * R[tuple(Kj)]
        R[K] = acc / sq[Kp[i] + 1]
    return {p: float((T * R[p + p]).real) for p in occ}


def finite_subspace_tail(state: GaussianState, J2: ComplexStructure, F, n: int) -> float:
    """``Prob(N_{J2}(F) <= n)`` for the ``J2``-number operator of the span of ``F``.

    ``F`` is orthonormalized in ``S_{J2}``; the reduced state on the resulting
    modes is expanded in their occupation basis with :func:`fock_diagonal`.
    Enlarging ``F`` can only lower the result.
    """
    _same_space(state.space, J2.space)
    if n < 0:
        raise ValueError("n must be >= 0")
    F = np.atleast_2d(np.asarray(F, dtype=float))
    if F.shape[0] > MAX_TAIL_MODES:
        raise ValueError(f"at most {MAX_TAIL_MODES} modes are supported, got {F.shape[0]}")
    modes = complex_orthonormal_basis(J2, F)
    if modes.shape[0] != F.shape[0]:
        raise ValueError("spanning set is linearly dependent in the J2-complex sense")
    B = np.vstack([modes, modes @ J2.op.T])
    gram = B @ state.gram @ B.T
    probs = fock_diagonal(gram, n)
    return float(min(1.0, max(0.0, sum(probs.values()))))

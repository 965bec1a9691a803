"""Truncated Fock representations as dense matrices.

A :class:`FockTruncation` fixes a complex structure ``J``, a ``J``-orthonormal
mode basis ``f_1..f_m`` and a per-mode occupation cutoff ``c``. Operators act on
the ``(c+1)^m`` occupation states ``|n_1, .., n_m>`` ordered lexicographically
(mode 1 most significant).

Truncation leaks at the top occupation, so operator identities are only
expected to hold on the sector returned by :meth:`FockTruncation.sector`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from .errors import ConvergenceError, DimensionError, InvariantError
from .gaussian import bogoliubov_split
from .phase_space import (
    ComplexStructure,
    PhaseSpace,
    complex_orthonormal_basis,
    hermitian_inner_product,
    standard_complex_structure,
)

MAX_MODES = 12
MAX_BASIS = 2**20


@dataclass(frozen=True)
class OperatorMatrix:
    label: str
    mat: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        if self.hermitian and mat.size and np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise InvariantError(f"{self.label} flagged Hermitian but is not", check="hermitian")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def H(self) -> "OperatorMatrix":
        return OperatorMatrix(f"({self.label})^*", self.mat.conj().T, self.hermitian)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(f"{self.label} {other.label}", self.mat @ other.mat)
        return self.mat @ other

    def __add__(self, other):
        return OperatorMatrix(f"{self.label} + {other.label}", self.mat + other.mat,
                              self.hermitian and other.hermitian)


class FockTruncation:
    """Occupation-number truncation of the Fock space over ``S_J``."""

    def __init__(self, J: ComplexStructure, cutoff: int, mode_basis=None):
        if cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        m = J.dim // 2
        if m > MAX_MODES:
            raise ValueError(f"at most {MAX_MODES} modes are supported, got {m}")
        if (cutoff + 1) ** m > MAX_BASIS:
            raise ValueError(f"basis size {(cutoff + 1) ** m} exceeds {MAX_BASIS}")
        if mode_basis is None:
            mode_basis = complex_orthonormal_basis(J)
        mode_basis = np.atleast_2d(np.asarray(mode_basis, dtype=float))
        if mode_basis.shape != (m, J.dim):
            raise DimensionError(f"mode basis must have {m} vectors of length {J.dim}")
        ip = np.array([[hermitian_inner_product(J, a, b) for b in mode_basis] for a in mode_basis])
        if np.max(np.abs(ip - np.eye(m))) > 1e-10:
            raise InvariantError("mode basis is not (.,.)_J-orthonormal", check="mode_basis")
        mode_basis.setflags(write=False)
        self.J = J
        self.cutoff = int(cutoff)
        self.modes = m
        self.mode_basis = mode_basis

    @property
    def space(self) -> PhaseSpace:
        return self.J.space

    @property
    def size(self) -> int:
        return (self.cutoff + 1) ** self.modes

    @cached_property
    def basis(self) -> np.ndarray:
        """Occupation tuples, one row per basis index."""
        return np.array(list(itertools.product(range(self.cutoff + 1), repeat=self.modes)), dtype=int)

    def index(self, occupation) -> int:
        return int(np.ravel_multi_index(tuple(occupation), (self.cutoff + 1,) * self.modes))

    def occupation(self, index: int) -> tuple:
        return tuple(int(v) for v in np.unravel_index(index, (self.cutoff + 1,) * self.modes))

    def ket(self, occupation) -> np.ndarray:
        v = np.zeros(self.size, dtype=complex)
        v[self.index(occupation)] = 1.0
        return v

    @property
    def vacuum(self) -> np.ndarray:
        return self.ket((0,) * self.modes)

    def sector(self, depth: int = 2) -> np.ndarray:
        """Indices of states with total occupation ``<= cutoff - depth``."""
        return np.flatnonzero(self.basis.sum(axis=1) <= self.cutoff - depth)

    @cached_property
    def _lowering(self) -> tuple:
        c = self.cutoff
        a1 = np.diag(np.sqrt(np.arange(1, c + 1)), k=1).astype(complex)
        eye = np.eye(c + 1)
        out = []
        for i in range(self.modes):
            factors = [a1 if j == i else eye for j in range(self.modes)]
            out.append(reduce(np.kron, factors))
        return tuple(out)

    def mode_lowering(self, i: int) -> np.ndarray:
        return self._lowering[i]

    def coefficients(self, f) -> np.ndarray:
        """``(f, f_i)_J`` for each mode vector ``f_i``."""
        f = self.space.check_vector(f)
        return np.array([hermitian_inner_product(self.J, f, b) for b in self.mode_basis])


def annihilator(T: FockTruncation, f) -> OperatorMatrix:
    """``a(f) = sum_i (f, f_i)_J a_i``, antilinear in ``f``."""
    coef = T.coefficients(f)
    mat = sum(c * T.mode_lowering(i) for i, c in enumerate(coef) if c != 0)
    if isinstance(mat, int):
        mat = np.zeros((T.size, T.size), dtype=complex)
    return OperatorMatrix("a(f)", mat)


def creator(T: FockTruncation, f) -> OperatorMatrix:
    return OperatorMatrix("a*(f)", annihilator(T, f).mat.conj().T)


def field_operator(T: FockTruncation, f) -> OperatorMatrix:
    """``Phi(f) = (a*(f) + a(f)) / sqrt(2)``."""
    a = annihilator(T, f).mat
    return OperatorMatrix("Phi(f)", (a + a.conj().T) / math.sqrt(2.0), hermitian=True)


def _expi_hermitian(H: np.ndarray, t: float = 1.0) -> np.ndarray:
    lam, V = np.linalg.eigh(H)
    return (V * np.exp(1j * t * lam)) @ V.conj().T


def weyl_operator(T: FockTruncation, f) -> OperatorMatrix:
    """``W(f) = exp(i Phi(f))`` by Hermitian eigendecomposition.

    ``Phi(f)`` is a sum of commuting one-mode terms on the tensor factors of the
    truncated space, so the exponential is the Kronecker product of one-mode
    exponentials. This equals the dense eigendecomposition of ``Phi(f)``.
    """
    c = T.coefficients(f)
    a1 = np.diag(np.sqrt(np.arange(1, T.cutoff + 1)), k=1).astype(complex)
    factors = []
    for ci in c:
        phi = (ci * a1 + np.conj(ci) * a1.conj().T) / math.sqrt(2.0)
        factors.append(_expi_hermitian(phi))
    return OperatorMatrix("W(f)", reduce(np.kron, factors))


def number_operator(T: FockTruncation, f) -> OperatorMatrix:
    a = annihilator(T, f).mat
    return OperatorMatrix("N(f)", a.conj().T @ a, hermitian=True)


def total_number(T: FockTruncation) -> OperatorMatrix:
    return OperatorMatrix("N", np.diag(T.basis.sum(axis=1)).astype(complex), hermitian=True)


def _one_particle(T: FockTruncation, M, kind: str, tol: float) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.shape != (T.modes, T.modes):
        raise DimensionError(f"one-particle operator must be {T.modes}x{T.modes}")
    if kind == "hermitian" and np.max(np.abs(M - M.conj().T)) > tol:
        raise InvariantError("one-particle operator is not Hermitian", check="hermitian")
    if kind == "unitary" and np.max(np.abs(M.conj().T @ M - np.eye(T.modes))) > tol:
        raise InvariantError("one-particle operator is not unitary", check="unitary")
    return M


def dGamma(T: FockTruncation, H, tol: float = 1e-10) -> OperatorMatrix:
    """Second quantization ``sum_ij H_ij a_i^* a_j`` of a one-particle Hermitian ``H``."""
    H = _one_particle(T, H, "hermitian", tol)
    out = np.zeros((T.size, T.size), dtype=complex)
    for i in range(T.modes):
        ai = T.mode_lowering(i)
        for j in range(T.modes):
            if H[i, j] != 0:
                out += H[i, j] * ai.conj().T @ T.mode_lowering(j)
    return OperatorMatrix("dGamma(H)", out, hermitian=True)


def Gamma(T: FockTruncation, U, tol: float = 1e-10) -> OperatorMatrix:
    """``Gamma(U)`` built column by column as ``prod_i a*(U f_i)^{n_i} / sqrt(n_i!) |0>``.

    Exact on states with total occupation ``<= cutoff``; other columns are
    left at zero.
    """
    U = _one_particle(T, U, "unitary", tol)
    raise_ops = [sum(U[j, i] * T.mode_lowering(j).conj().T for j in range(T.modes)) for i in range(T.modes)]
    out = np.zeros((T.size, T.size), dtype=complex)
    vac = T.vacuum
    for idx in T.sector(depth=0):
        occ = T.basis[idx]
        v = vac
        for i, n in enumerate(occ):
            for _ in range(n):
                v = raise_ops[i] @ v
            v = v / math.sqrt(math.factorial(n))
        out[:, idx] = v
    return OperatorMatrix("Gamma(U)", out)


def alien_annihilator(T: FockTruncation, J2: ComplexStructure, f) -> OperatorMatrix:
    """``a_{J2}(f) = a^*(u) + a(v)`` on ``T``'s space, ``(u, v)`` from the Bogoliubov split."""
    u, v = bogoliubov_split(T.J, J2, f)
    return OperatorMatrix("a_2(f)", creator(T, u).mat + annihilator(T, v).mat)


def alien_number_operator(T: FockTruncation, J2: ComplexStructure, f) -> OperatorMatrix:
    a = alien_annihilator(T, J2, f).mat
    return OperatorMatrix("N_2(f)", a.conj().T @ a, hermitian=True)


def _anti(x, y):
    return x @ y + y @ x


def number_commutator_check(T: FockTruncation, J1: ComplexStructure, J2: ComplexStructure, f, g):
    """Compare ``[N_{J1}(f), N_{J2}(g)]`` with the sigma-weighted anticommutator sum.

    The right side is ``(i/2) sum sigma(x, y) [Phi(x), Phi(y)]_+`` over
    ``x in {f, J1 f}`` and ``y in {g, J2 g}``. ``T`` must be built over ``J1``.
    Both sides are compared on the columns of the ``cutoff - 2`` sector.
    Returns a dict with the residual and the size of the commutator there.
    """
    if T.J != J1:
        raise DimensionError("truncation must be built over J1")
    f = T.space.check_vector(f)
    g = T.space.check_vector(g)
    N1 = number_operator(T, f).mat
    N2 = alien_number_operator(T, J2, g).mat
    lhs = N1 @ N2 - N2 @ N1
    rhs = np.zeros_like(lhs)
    for x in (f, J1.op @ f):
        px = field_operator(T, x).mat
        for y in (g, J2.op @ g):
            s = T.space.sigma(x, y)
            if s != 0:
                rhs += s * _anti(px, field_operator(T, y).mat)
    rhs *= 0.5j
    cols = T.sector(2)
    residual = float(np.max(np.abs((lhs - rhs)[:, cols])))
    return {"residual": residual, "commutator_norm": float(np.max(np.abs(lhs[:, cols])))}


def alien_vacuum_action_check(T: FockTruncation, J1: ComplexStructure, J2: ComplexStructure, f):
    """Two-quantum part of ``N_{J2}(f) Omega`` in the ``J1`` representation.

    Returns ``(norm, predicted)``: the norm of the component of ``N_{J2}(f)
    Omega`` with two quanta, and the value ``|a*(v') a*(u') Omega| / 4`` for
    ``u' = (I + J1 J2) f``, ``v' = (I - J1 J2) f`` from the Bogoliubov form.
    """
    if T.J != J1:
        raise DimensionError("truncation must be built over J1")
    vec = alien_number_operator(T, J2, f).mat @ T.vacuum
    two = T.basis.sum(axis=1) == 2
    norm = float(np.linalg.norm(vec[two]))
    u, v = bogoliubov_split(J1, J2, f)
    u, v = 2 * u, 2 * v
    uu = hermitian_inner_product(J1, u, u).real
    vv = hermitian_inner_product(J1, v, v).real
    uv = hermitian_inner_product(J1, u, v)
    predicted = 0.25 * math.sqrt(max(uu * vv + abs(uv) ** 2, 0.0))
    return norm, predicted


def _single_mode_frames(gram: np.ndarray):
    """Standard one-mode space, the state's own complex structure and ``nu``."""
    S = PhaseSpace(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    nu = math.sqrt(float(np.linalg.det(gram)))
    if nu < 1.0 - 1e-9:
        raise InvariantError(f"mode state violates the uncertainty bound (nu={nu:.6g})", check="heisenberg")
    Js = ComplexStructure(S, np.linalg.solve(S.form, gram) / nu)
    return S, standard_complex_structure(S), Js, max(nu, 1.0)


def _ladder(a: np.ndarray, count: int, tol: float = 1e-8):
    """``|0>, |1>, ...`` of an annihilator ``a`` given as a truncated matrix.

    States are the low eigenvectors of ``a^dagger a``. Repeated ``a^dagger`` on
    a ground state would amplify rounding noise factorially at large cutoffs.
    A state is kept only while its eigenvalue is ``k`` and ``|<k-1|a|k>| = sqrt(k)``
    within ``tol``; the truncation is too small for the rest, and the caller
    sees them as missing mass.
    """
    lam, V = np.linalg.eigh(a.conj().T @ a)
    kets = V[:, :count].T
    good = 0
    for k in range(min(count, lam.size)):
        if abs(lam[k] - k) > tol * max(1.0, k):
            break
        if k and abs(abs(np.vdot(kets[k - 1], a @ kets[k])) - math.sqrt(k)) > tol * max(1.0, k):
            break
        good = k + 1
    out = np.zeros((count, a.shape[0]), dtype=complex)
    out[:good] = kets[:good]
    return out, good


def _thermal_weights(nu: float, count: int) -> np.ndarray:
    nbar = 0.5 * (nu - 1.0)
    if nbar <= 0:
        w = np.zeros(count)
        w[0] = 1.0
        return w
    r = nbar / (1.0 + nbar)
    return (1.0 - r) * r ** np.arange(count)


def _distribution_in(gram: np.ndarray, cutoff: int, frame: str):
    """Number distribution of ``N_{J2}`` for the one-mode state ``gram`` at a cutoff.

    ``frame="state"`` works in the Fock space of the state's own complex
    structure (where it is diagonal-thermal) and builds ``a_{J2}`` by a
    Bogoliubov split; ``frame="j2"`` works in the ``J2`` Fock space (where the
    number operator is diagonal) and builds the state's eigenvectors instead.
    Returns ``(p, valid)``: probabilities for ``k <= cutoff // 2`` and how many
    leading entries rest on number states that fit inside the cutoff.
    """
    S, J2, Js, nu = _single_mode_frames(gram)
    e = np.array([1.0, 0.0])
    kmax = cutoff // 2
    weights = _thermal_weights(nu, cutoff + 1)
    es = e / math.sqrt(float(e @ Js.gram @ e))
    if frame == "state":
        T = FockTruncation(Js, cutoff, [es])
        kets, good = _ladder(alien_annihilator(T, J2, e).mat, kmax + 1)
        amp = np.abs(kets) ** 2  # amp[k, n] = |<n_s|k_2>|^2
        return amp @ weights, good
    if frame == "j2":
        T = FockTruncation(J2, cutoff, [e])
        count = int(np.count_nonzero(weights > 1e-18 * weights[0])) or 1
        count = min(count, kmax + 1)
        kets, _ = _ladder(alien_annihilator(T, Js, es).mat, count)
        amp = np.abs(kets[:, : kmax + 1]) ** 2  # amp[n, k] = |<k|n_s>|^2
        return weights[:count] @ amp, kmax + 1
    raise ValueError(f"unknown frame {frame!r}")


def mode_distribution(gram, n_max: int, tail_tol: float = 1e-8, max_cutoff: int = 512):
    """Number distribution of a one-mode Gaussian state in two representations.

    ``gram`` is the 2x2 two-point form in canonical coordinates adapted to the
    counting complex structure (``[[0,-1],[1,0]]``). Starting from cutoff
    ``n_max + 8`` the cutoff doubles until the ``J2`` frame captures all but
    ``tail_tol`` of the probability and the state frame resolves
    ``k = 0..n_max`` with thermal weight below ``tail_tol`` left beyond the
    cutoff.

    Returns ``(p_state, p_j2, cutoff)``, both of length ``n_max + 1``.
    """
    gram = np.asarray(gram, dtype=float)
    cutoff = n_max + 8
    while True:
        cutoff = min(cutoff, max_cutoff)
        p_state, good = _distribution_in(gram, cutoff, "state")
        p_j2, _ = _distribution_in(gram, cutoff, "j2")
        nu = math.sqrt(max(float(np.linalg.det(gram)), 1.0))
        lost = 1.0 - _thermal_weights(nu, cutoff + 1).sum()
        missing = abs(1.0 - p_j2.sum())
        if missing < tail_tol and good > n_max and lost < tail_tol and cutoff // 2 >= n_max:
            return p_state[: n_max + 1], p_j2[: n_max + 1], cutoff
        if cutoff >= max_cutoff:
            raise ConvergenceError(
                f"number distribution did not converge by cutoff {max_cutoff} "
                f"(missing mass {missing:.3e}, resolved {good} of {n_max + 1} levels)"
            )
        cutoff *= 2

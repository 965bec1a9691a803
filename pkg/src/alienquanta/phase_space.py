"""Real symplectic linear algebra: phase spaces, complex structures and flows.

Conventions
-----------
A phase vector ``f`` is a real array of length ``2n``. The symplectic form is
stored as a matrix ``form`` with ``sigma(f, g) = f @ form @ g``. The standard
space built by :func:`make_standard_phase_space` uses interleaved canonical
coordinates ``(q1, p1, q2, p2, ...)`` with ``sigma(q_i, p_j) = delta_ij``.

A complex structure ``J`` turns the phase space into a complex Hilbert space
with inner product ``(f, g)_J = sigma(f, J g) + i sigma(f, g)``; its real part
is the metric ``mu_J`` with Gram matrix ``form @ J``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvariantError

#: Tolerance for structural validation (antisymmetry, J^2 = -I, ...).
VALIDATION_TOL = 1e-10
#: Tolerance for residuals of derived quantities ([J, A] and the like).
DERIVED_TOL = 1e-8
#: Eigenvalue ratio above which the frequency splitting warns.
CONDITION_WARN = 1e12


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def _max_abs(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass(frozen=True)
class PhaseSpace:
    """Real symplectic vector space of dimension ``2n``."""

    form: np.ndarray

    def __post_init__(self):
        form = _frozen(self.form)
        if form.ndim != 2 or form.shape[0] != form.shape[1]:
            raise DimensionError(f"symplectic form must be square, got {form.shape}")
        if form.shape[0] == 0 or form.shape[0] % 2:
            raise DimensionError(f"phase space dimension must be even and positive, got {form.shape[0]}")
        if _max_abs(form + form.T) > 1e-12:
            raise InvariantError("symplectic form is not antisymmetric", check="antisymmetry")
        sv = np.linalg.svd(form, compute_uv=False)
        if sv[-1] <= 1e-10 * sv[0]:
            raise InvariantError("symplectic form is degenerate", check="nondegeneracy")
        object.__setattr__(self, "form", form)

    @property
    def dim(self) -> int:
        return self.form.shape[0]

    @property
    def modes(self) -> int:
        return self.dim // 2

    def check_vector(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.dim,):
            raise DimensionError(f"expected a phase vector of length {self.dim}, got shape {f.shape}")
        return f

    def check_matrix(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        if a.shape != (self.dim, self.dim):
            raise DimensionError(f"expected a {self.dim}x{self.dim} matrix, got shape {a.shape}")
        return a

    def sigma(self, f, g) -> float:
        return float(self.check_vector(f) @ self.form @ self.check_vector(g))

    def __eq__(self, other):
        return isinstance(other, PhaseSpace) and np.array_equal(self.form, other.form)

    def __hash__(self):
        return hash(self.form.tobytes())


def canonical_form(n: int, ordering: str = "interleaved") -> np.ndarray:
    """Canonical symplectic matrix for ``n`` degrees of freedom.

    ``ordering="interleaved"`` gives ``(q1, p1, q2, p2, ...)``; ``"blocks"``
    gives ``(q1..qn, p1..pn)``.
    """
    if n < 1:
        raise ValueError("number of degrees of freedom must be >= 1")
    if ordering == "interleaved":
        return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    if ordering == "blocks":
        eye = np.eye(n)
        zero = np.zeros((n, n))
        return np.block([[zero, eye], [-eye, zero]])
    raise ValueError(f"unknown ordering {ordering!r}")


def make_standard_phase_space(n: int) -> PhaseSpace:
    """The ``2n``-dimensional space with ``sigma(q_i, p_j) = delta_ij``."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return PhaseSpace(canonical_form(int(n)))


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failing(self) -> list:
        return [c.name for c in self.checks if not c.passed]

    def residual(self, name: str) -> float:
        for c in self.checks:
            if c.name == name:
                return c.residual
        raise KeyError(name)

    def as_records(self) -> list:
        return [
            {"check": c.name, "residual": c.residual, "tol": c.tol, "passed": c.passed}
            for c in self.checks
        ]


def validate_complex_structure(space: PhaseSpace, J, tol: float = VALIDATION_TOL) -> ValidationReport:
    """Residuals of the three complex-structure axioms for ``J`` on ``space``.

    The positivity residual is ``max(0, -lambda_min)`` of the symmetric matrix
    ``sigma(e_i, J e_j)``, augmented so that a minimum eigenvalue below ``tol``
    (degenerate but not negative) also fails.
    """
    J = space.check_matrix(J)
    form = space.form
    sympl = _max_abs(J.T @ form @ J - form)
    square = _max_abs(J @ J + np.eye(space.dim))
    gram = form @ J
    sym = 0.5 * (gram + gram.T)
    lam_min = float(np.linalg.eigvalsh(sym)[0])
    # a zero smallest eigenvalue is a failure too, hence the 2*tol shift
    positivity = 0.0 if lam_min > tol else max(tol - lam_min, 2.0 * tol)
    return ValidationReport(
        (
            Check("symplectomorphism", sympl, tol),
            Check("square_minus_identity", square, tol),
            Check("positivity", positivity, tol),
        )
    )


@dataclass(frozen=True)
class ComplexStructure:
    """A validated complex structure ``op`` on ``space``."""

    space: PhaseSpace
    op: np.ndarray
    tol: float = field(default=VALIDATION_TOL, compare=False)

    def __post_init__(self):
        op = _frozen(self.space.check_matrix(self.op))
        report = validate_complex_structure(self.space, op, self.tol)
        if not report.passed:
            bad = report.failing[0]
            raise InvariantError(
                f"not a complex structure: {bad} residual {report.residual(bad):.3e}", check=bad
            )
        object.__setattr__(self, "op", op)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def gram(self) -> np.ndarray:
        """Gram matrix of the metric ``mu_J(f, g) = sigma(f, J g)``."""
        g = self.space.form @ self.op
        return 0.5 * (g + g.T)

    def __eq__(self, other):
        return (
            isinstance(other, ComplexStructure)
            and self.space == other.space
            and np.array_equal(self.op, other.op)
        )

    def __hash__(self):
        return hash((self.space, self.op.tobytes()))


def standard_complex_structure(space: PhaseSpace) -> ComplexStructure:
    """``J = form^{-1}``, which is ``[[0,-1],[1,0]]`` per mode for the canonical form."""
    return ComplexStructure(space, np.linalg.inv(space.form))


@dataclass(frozen=True)
class DynamicsGenerator:
    """Infinitesimally symplectic generator ``A`` of the flow ``T_t = exp(tA)``."""

    space: PhaseSpace
    gen: np.ndarray
    description: str = ""
    tol: float = field(default=VALIDATION_TOL, compare=False)

    def __post_init__(self):
        gen = _frozen(self.space.check_matrix(self.gen))
        form = self.space.form
        resid = _max_abs(gen.T @ form + form @ gen)
        scale = max(1.0, _max_abs(gen))
        if resid > self.tol * scale:
            raise InvariantError(
                f"generator is not infinitesimally symplectic (residual {resid:.3e})",
                check="infinitesimally_symplectic",
            )
        object.__setattr__(self, "gen", gen)
        lam = _minus_square_spectrum(gen)
        if np.max(np.abs(lam.imag)) > 1e-8 * max(1.0, np.max(np.abs(lam))) or lam.real.min() <= self.tol:
            raise InvariantError(
                "no positive-energy structure: -A^2 is not positive "
                f"(min eigenvalue {lam.real.min():.3e})",
                check="positive_energy",
            )

    @property
    def energy_form(self) -> np.ndarray:
        """Symmetric matrix ``h`` with ``A = form^{-1}(-h)``, i.e. ``h = -form @ A``."""
        h = -self.space.form @ self.gen
        return 0.5 * (h + h.T)


def _minus_square_spectrum(A):
    A = np.asarray(A)
    form_free = -A @ A
    return np.linalg.eigvals(form_free)


def _inverse_sqrt_minus_square(dyn: DynamicsGenerator) -> np.ndarray:
    """Principal ``(-A^2)^{-1/2}``.

    When the energy form ``h`` is definite, ``-A^2`` is self-adjoint for the
    metric ``|h|`` and the root comes from a symmetric eigendecomposition in
    the ``|h|``-orthonormal frame. Otherwise a general eigendecomposition is used.
    """
    A = dyn.gen
    h = dyn.energy_form
    hev = np.linalg.eigvalsh(h)
    if hev[0] > 0 or hev[-1] < 0:
        metric = h if hev[0] > 0 else -h
        L = np.linalg.cholesky(metric)
        # in the frame y = L^T x, -A^2 becomes B^T B with B = L^T A L^{-T}
        B = np.linalg.solve(L, (L.T @ A).T).T
        C = B.T @ B
        C = 0.5 * (C + C.T)
        lam, V = np.linalg.eigh(C)
        inv_root = V @ np.diag(lam ** -0.5) @ V.T
        out = np.linalg.solve(L.T, inv_root @ L.T)
    else:
        lam, V = np.linalg.eig(-A @ A)
        lam = lam.real
        out = (V @ np.diag(lam ** -0.5) @ np.linalg.inv(V)).real
    if lam.min() <= 0:
        raise InvariantError("no positive-energy structure: -A^2 is not positive", check="positive_energy")
    if lam.max() / lam.min() > CONDITION_WARN:
        warnings.warn(
            f"frequency splitting is ill-conditioned (eigenvalue ratio {lam.max() / lam.min():.2e})",
            RuntimeWarning,
            stacklevel=3,
        )
    return out


def j_from_dynamics(dyn: DynamicsGenerator, tol: float = VALIDATION_TOL) -> ComplexStructure:
    """Positive-energy complex structure of the flow ``exp(tA)``.

    Returns ``J = s A (-A^2)^{-1/2}``, the sign ``s`` being whichever of ``+1``
    and ``-1`` makes ``sigma(f, J f)`` positive. This is the unique
    complex structure for which the flow is unitary with positive energy.
    One Newton step of the sign iteration ``J <- (J - J^-1)/2`` removes the
    rounding left by ill-conditioned forms; it is a function of ``A`` and
    so keeps ``[J, A] = 0``.
    """
    A = dyn.gen
    base = A @ _inverse_sqrt_minus_square(dyn)
    base = 0.5 * (base - np.linalg.inv(base))
    last = None
    for s in (1.0, -1.0):
        J = s * base
        report = validate_complex_structure(dyn.space, J, tol)
        if report.passed:
            return ComplexStructure(dyn.space, J, tol)
        last = report
    raise InvariantError(
        "frequency splitting failed: neither sign gives a complex structure "
        f"(failing: {', '.join(last.failing)})",
        check="positivity",
    )


def commutator_residual(J: ComplexStructure, dyn: DynamicsGenerator) -> float:
    if J.space != dyn.space:
        raise DimensionError("complex structure and generator live on different spaces")
    return _max_abs(J.op @ dyn.gen - dyn.gen @ J.op)


def unitarizability_check(J: ComplexStructure, dyn: DynamicsGenerator, tol: float = DERIVED_TOL):
    """``(commutes, residual)``; the flow is unitary on ``S_J`` iff ``[J, A] = 0``."""
    resid = commutator_residual(J, dyn)
    return resid <= tol, resid


def hermitian_inner_product(J: ComplexStructure, f, g) -> complex:
    """``(f, g)_J = sigma(f, J g) + i sigma(f, g)``; antilinear in ``f``."""
    f = J.space.check_vector(f)
    g = J.space.check_vector(g)
    form = J.space.form
    return complex(f @ form @ (J.op @ g), f @ form @ g)


def mu_metric(J: ComplexStructure) -> np.ndarray:
    """Gram matrix ``mu_ij = sigma(e_i, J e_j)`` (symmetric positive definite)."""
    return J.gram


def mu_normalize(J: ComplexStructure, f) -> np.ndarray:
    f = J.space.check_vector(f)
    nrm2 = float(f @ J.gram @ f)
    if nrm2 <= 0:
        raise ValueError("cannot normalize the zero vector")
    return f / np.sqrt(nrm2)


def complex_orthonormal_basis(J: ComplexStructure, vectors=None, tol: float = 1e-10) -> np.ndarray:
    """``(.,.)_J``-orthonormal vectors ``f_1..f_k`` spanning the J-complex span of ``vectors``.

    Gram-Schmidt under ``mu_J`` against every accepted ``f`` and ``J f``, with
    one re-orthogonalization pass. ``vectors`` defaults to the coordinate basis
    (giving a full basis of ``n`` modes). Vectors that fall into the span of
    earlier ones are skipped. Returned as rows of a ``(k, 2n)`` array.
    """
    if vectors is None:
        vectors = np.eye(J.dim)
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    G = J.gram
    n = J.dim // 2
    # columns: accepted f_k and J f_k; GB caches G @ basis
    basis = np.zeros((J.dim, 2 * n))
    GB = np.zeros((J.dim, 2 * n))
    k = 0
    for v in vectors:
        v = J.space.check_vector(v)
        scale = np.sqrt(max(float(v @ G @ v), 0.0))
        if scale == 0.0:
            continue
        w = v.copy()
        for _ in range(2):
            w = w - basis[:, : 2 * k] @ (GB[:, : 2 * k].T @ w)
        nrm = np.sqrt(max(float(w @ G @ w), 0.0))
        if nrm <= tol * scale:
            continue
        f = w / nrm
        basis[:, 2 * k] = f
        basis[:, 2 * k + 1] = J.op @ f
        GB[:, 2 * k : 2 * k + 2] = G @ basis[:, 2 * k : 2 * k + 2]
        k += 1
        if k == n:
            break
    return basis[:, 0 : 2 * k : 2].T.copy()


def complex_eigenmodes(J: ComplexStructure, op, tol: float = 1e-10):
    """Eigenmodes of a ``mu_J``-symmetric operator commuting with ``J``.

    Each real eigenvalue of such an operator is (at least) doubly degenerate,
    the eigenspaces being J-invariant. Returns ``(values, modes)``: one value
    per complex mode in ascending order and the ``(.,.)_J``-orthonormal mode
    vectors as rows.
    """
    op = J.space.check_matrix(op)
    G = J.gram
    M = G @ op
    M = 0.5 * (M + M.T)
    # generalized symmetric problem M v = lam G v via Cholesky of G
    L = np.linalg.cholesky(G)
    Linv = np.linalg.inv(L)
    lam, W = np.linalg.eigh(Linv @ M @ Linv.T)
    V = Linv.T @ W
    modes = complex_orthonormal_basis(J, V.T, tol)
    vals = np.array([float(f @ M @ f) for f in modes])
    order = np.argsort(vals, kind="stable")
    return vals[order], modes[order]

"""Lattice Klein-Gordon field in 1+1 dimensions, inertial and boost quantizations.

Sites ``0..L-1`` carry a field value ``phi_i`` and conjugate momentum ``pi_i``;
Dirichlet walls sit just outside both ends. Phase vectors are ordered in
blocks ``(phi_0..phi_{L-1}, pi_0..pi_{L-1})`` with ``sigma(phi_i, pi_j) = delta_ij``.

The inertial flow is generated by ``H = sum pi^2/2 + phi^T Omega^2 phi / 2`` with
``Omega^2 = -Delta / delta^2 + m^2``. The boost flow about the origin site ``o``
acts on one wedge (the sites strictly to one side of ``o``) and is generated by
the distance-weighted energy::

    K = 1/2 sum_i x_i pi_i^2 + 1/2 sum_links x_l (dphi_l / delta)^2 + m^2/2 sum_i x_i phi_i^2

The horizon is placed midway between the origin and the first wedge site, so
site ``i`` sits at ``x_i = (|i - o| - 1/2) delta`` and the link between wedge
sites ``i`` and ``i+1`` at the integer distance between them. The link that
would cross the horizon has weight zero. With the boost rate normalized to
one the restricted inertial vacuum is thermal at inverse temperature ``2 pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantError
from .gaussian import FockVacuumState, GaussianState, equivalence_verdict, mean_alien_number
from .phase_space import (
    ComplexStructure,
    DynamicsGenerator,
    PhaseSpace,
    canonical_form,
    complex_eigenmodes,
    j_from_dynamics,
)

WEDGES = ("right", "left")
MIN_WEDGE_SITES = 3


def dirichlet_laplacian(sites: int) -> np.ndarray:
    """Second-difference matrix ``-Delta`` with Dirichlet walls (tridiagonal 2, -1)."""
    return 2.0 * np.eye(sites) - np.eye(sites, k=1) - np.eye(sites, k=-1)


def frequency_matrix(sites: int, spacing: float, mass: float) -> np.ndarray:
    """``Omega^2 = -Delta / delta^2 + m^2 I``."""
    return dirichlet_laplacian(sites) / spacing**2 + mass**2 * np.eye(sites)


@dataclass(frozen=True)
class LatticeKGModel:
    sites: int
    spacing: float = 1.0
    mass: float = 0.05
    wedge_origin: int | None = None
    boundary: str = "dirichlet"

    def __post_init__(self):
        if int(self.sites) != self.sites or self.sites < 8:
            raise ValueError(f"need at least 8 sites, got {self.sites}")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        if not self.mass > 0:
            raise InvariantError(
                "mass must be positive: a massless lattice field has no positive-energy "
                "structure for the wedge flows",
                check="positive_energy",
            )
        if self.boundary != "dirichlet":
            raise ValueError(f"unsupported boundary {self.boundary!r}")
        origin = self.sites // 2 if self.wedge_origin is None else int(self.wedge_origin)
        if not MIN_WEDGE_SITES <= origin < self.sites - MIN_WEDGE_SITES:
            raise ValueError(f"wedge origin must leave at least {MIN_WEDGE_SITES} sites on each side")
        object.__setattr__(self, "wedge_origin", origin)

    @property
    def space(self) -> PhaseSpace:
        return PhaseSpace(canonical_form(self.sites, "blocks"))

    def wedge_sites(self, wedge: str) -> np.ndarray:
        o = self.wedge_origin
        if wedge == "right":
            return np.arange(o + 1, self.sites)
        if wedge == "left":
            return np.arange(o - 1, -1, -1)
        raise ValueError(f"wedge must be one of {WEDGES}, got {wedge!r}")

    def wedge_indices(self, wedge: str) -> np.ndarray:
        """Phase-space coordinates ``(phi, pi)`` of the wedge sites, nearest the horizon first."""
        s = self.wedge_sites(wedge)
        return np.concatenate([s, s + self.sites])


def minkowski_generator(model: LatticeKGModel) -> DynamicsGenerator:
    L = model.sites
    omega2 = frequency_matrix(L, model.spacing, model.mass)
    A = np.block([[np.zeros((L, L)), np.eye(L)], [-omega2, np.zeros((L, L))]])
    return DynamicsGenerator(model.space, A, "inertial time translation")


def minkowski_structure(model: LatticeKGModel) -> ComplexStructure:
    return j_from_dynamics(minkowski_generator(model))


def restrict_to_wedge(space: PhaseSpace, model: LatticeKGModel, wedge: str):
    """Coordinate projection onto one wedge and the restricted form.

    Returns ``(basis, form)``; the rows of ``basis`` are the coordinate vectors
    of the wedge's ``phi`` then ``pi`` components.
    """
    if space.dim != 2 * model.sites:
        raise ValueError("phase space does not match the model")
    idx = model.wedge_indices(wedge)
    if idx.size == 0:
        raise ValueError(f"{wedge} wedge is empty")
    basis = np.eye(space.dim)[idx]
    return basis, basis @ space.form @ basis.T


def boost_weights(model: LatticeKGModel, wedge: str):
    """Site distances ``x_i`` and link distances ``x_l`` from the horizon.

    Link ``l`` joins wedge sites ``l-1`` and ``l``; link 0 is the horizon link
    (weight 0) and the last link ends on the Dirichlet wall.
    """
    n = model.wedge_sites(wedge).size
    x_site = (np.arange(n) + 0.5) * model.spacing
    x_link = np.arange(n + 1) * model.spacing
    return x_site, x_link


def rindler_generator(model: LatticeKGModel, wedge: str = "right") -> DynamicsGenerator:
    """Boost generator on the wedge phase space, ``A(phi, pi) = (X pi, -K phi)``."""
    n = model.wedge_sites(wedge).size
    if n < MIN_WEDGE_SITES:
        raise ValueError(f"{wedge} wedge has {n} sites, need at least {MIN_WEDGE_SITES}")
    x_site, x_link = boost_weights(model, wedge)
    D = np.zeros((n + 1, n))
    D[np.arange(n), np.arange(n)] = 1.0
    D[np.arange(1, n + 1), np.arange(n)] = -1.0
    K = D.T @ np.diag(x_link) @ D / model.spacing**2 + model.mass**2 * np.diag(x_site)
    A = np.block([[np.zeros((n, n)), np.diag(x_site)], [-K, np.zeros((n, n))]])
    try:
        return DynamicsGenerator(PhaseSpace(canonical_form(n, "blocks")), A, f"boost ({wedge} wedge)")
    except InvariantError as exc:
        spec = np.linalg.eigvalsh(np.sqrt(np.diag(x_site)) @ K @ np.sqrt(np.diag(x_site)))
        raise InvariantError(f"{exc} (boost spectrum starts {spec[:3]})", check=exc.check) from exc


def rindler_structure(model: LatticeKGModel, wedge: str = "right") -> ComplexStructure:
    """Boost complex structure on the wedge phase space."""
    return j_from_dynamics(rindler_generator(model, wedge))


def origin_structure(model: LatticeKGModel) -> np.ndarray:
    """2x2 complex structure of a free oscillator at the origin site, at the on-site frequency."""
    w = math.sqrt(2.0 / model.spacing**2 + model.mass**2)
    return np.array([[0.0, -1.0 / w], [w, 0.0]])


def full_rindler_structure(model: LatticeKGModel) -> ComplexStructure:
    """Left boost structure + origin oscillator + right boost structure on the whole lattice.

    The origin site belongs to neither wedge; it gets the local oscillator of
    :func:`origin_structure` so the result is a complex structure on the full
    phase space, directly comparable with the inertial one.
    """
    L = model.sites
    J = np.zeros((2 * L, 2 * L))
    for wedge in WEDGES:
        if model.wedge_sites(wedge).size == 0:
            continue
        idx = model.wedge_indices(wedge)
        J[np.ix_(idx, idx)] = rindler_structure(model, wedge).op
    o = model.wedge_origin
    J[np.ix_([o, o + L], [o, o + L])] = origin_structure(model)
    return ComplexStructure(model.space, J)


def embed(model: LatticeKGModel, wedge: str, vectors) -> np.ndarray:
    """Lift wedge phase vectors (rows) to the full lattice phase space."""
    vectors = np.atleast_2d(vectors)
    out = np.zeros((vectors.shape[0], 2 * model.sites))
    out[:, model.wedge_indices(wedge)] = vectors
    return out


def wedge_invariance_defect(J: ComplexStructure, model: LatticeKGModel, wedge: str = "right") -> float:
    """Largest fraction of ``|J f|`` outside the wedge over wedge coordinate vectors ``f``."""
    if J.dim != 2 * model.sites:
        raise ValueError("complex structure does not match the model")
    idx = model.wedge_indices(wedge)
    outside = np.ones(J.dim, dtype=bool)
    outside[idx] = False
    cols = J.op[:, idx]
    frac = np.linalg.norm(cols[outside], axis=0) / np.linalg.norm(cols, axis=0)
    return float(frac.max())


def restricted_vacuum(model: LatticeKGModel, wedge: str = "right", M: ComplexStructure | None = None) -> GaussianState:
    """The inertial vacuum restricted to one wedge (a mixed Gaussian state)."""
    if M is None:
        M = minkowski_structure(model)
    basis, _ = restrict_to_wedge(model.space, model, wedge)
    return FockVacuumState(M).restrict(basis)


@dataclass(frozen=True)
class RindlerMode:
    mode: int
    kappa: float
    mean_occupation: float
    bose_einstein: float
    tail_probability: float

    @property
    def abs_rel_err(self) -> float:
        if self.bose_einstein == 0:
            return math.inf
        return abs(self.mean_occupation - self.bose_einstein) / self.bose_einstein


def bose_einstein(kappa, beta: float = 2.0 * math.pi):
    with np.errstate(over="ignore"):
        return 1.0 / np.expm1(beta * np.asarray(kappa, dtype=float))


def rindler_modes(model: LatticeKGModel, wedge: str = "right"):
    """Boost frequencies and mode vectors (rows, on the wedge space), ascending."""
    dyn = rindler_generator(model, wedge)
    R = j_from_dynamics(dyn)
    vals, modes = complex_eigenmodes(R, -dyn.gen @ dyn.gen)
    return R, np.sqrt(vals), modes


def unruh_spectrum(model: LatticeKGModel, wedge: str = "right") -> list:
    """Occupation of each boost mode in the restricted inertial vacuum.

    For a ``mu_R``-normalized mode ``f`` with two-point Gram ``G`` of the
    restricted state, ``nbar = (G(f,f) + G(Rf,Rf))/4 - 1/2`` and
    ``P(N >= 1) = 1 - 1/sqrt(det((G_mode + I)/2))``.
    """
    state = restricted_vacuum(model, wedge)
    R, kappa, modes = rindler_modes(model, wedge)
    be = bose_einstein(kappa)
    rows = []
    for k, (kap, f) in enumerate(zip(kappa, modes)):
        nbar = mean_alien_number(state, R, f)
        B = np.vstack([f, R.op @ f])
        g2 = B @ state.gram @ B.T
        p0 = 1.0 / math.sqrt(float(np.linalg.det(0.5 * (g2 + np.eye(2)))))
        rows.append(RindlerMode(k, float(kap), float(nbar), float(be[k]), 1.0 - p0))
    return rows


def fit_inverse_temperature(kappa, nbar) -> float:
    """Least-squares ``beta`` in ``log(1 + 1/nbar) = beta * kappa`` (line through the origin)."""
    kappa = np.asarray(kappa, dtype=float)
    y = np.log1p(1.0 / np.asarray(nbar, dtype=float))
    return float(kappa @ y / (kappa @ kappa))


def total_rindler_quanta(model: LatticeKGModel, wedge: str = "right") -> float:
    return float(sum(r.mean_occupation for r in unruh_spectrum(model, wedge)))


def fixed_box_family(sizes, length: float = 256.0, mass: float = 0.05) -> list:
    """Models with a common physical length ``sites * spacing`` and mass, refined in ``sites``."""
    return [LatticeKGModel(int(L), spacing=length / L, mass=mass) for L in sizes]


def family_verdict(models):
    """Equivalence report for the inertial/boost pairs across a family of models."""
    pairs = [(minkowski_structure(m), full_rindler_structure(m)) for m in models]
    return equivalence_verdict(family=pairs)

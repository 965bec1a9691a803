import math

import numpy as np
import pytest

from alienquanta.errors import InvariantError
from alienquanta.gaussian import Verdict
from alienquanta.models import (
    LatticeKGModel,
    boost_weights,
    bose_einstein,
    embed,
    family_verdict,
    fit_inverse_temperature,
    fixed_box_family,
    frequency_matrix,
    full_rindler_structure,
    minkowski_generator,
    minkowski_structure,
    restrict_to_wedge,
    restricted_vacuum,
    rindler_generator,
    rindler_modes,
    rindler_structure,
    total_rindler_quanta,
    unruh_spectrum,
    wedge_invariance_defect,
)
from alienquanta.phase_space import commutator_residual, validate_complex_structure


def test_two_site_frequency_matrix():
    assert np.array_equal(frequency_matrix(2, 1.0, 1.0), [[3.0, -1.0], [-1.0, 3.0]])


def test_model_validation():
    with pytest.raises(ValueError):
        LatticeKGModel(4)
    with pytest.raises(InvariantError):
        LatticeKGModel(16, mass=0.0)
    with pytest.raises(ValueError):
        LatticeKGModel(16, spacing=-1.0)
    with pytest.raises(ValueError):
        LatticeKGModel(16, wedge_origin=1)


def test_wedges_partition_lattice():
    m = LatticeKGModel(17)
    left, right = m.wedge_sites("left"), m.wedge_sites("right")
    assert m.wedge_origin not in left and m.wedge_origin not in right
    assert len(left) + len(right) + 1 == m.sites
    assert left[0] == m.wedge_origin - 1 and right[0] == m.wedge_origin + 1


@pytest.mark.parametrize("sites,mass", [(8, 1.0), (16, 0.05), (33, 0.3)])
def test_generators_are_valid(sites, mass):
    model = LatticeKGModel(sites, mass=mass)
    M = minkowski_structure(model)
    assert validate_complex_structure(model.space, M.op).passed
    assert commutator_residual(M, minkowski_generator(model)) <= 1e-8
    for wedge in ("left", "right"):
        dyn = rindler_generator(model, wedge)
        R = rindler_structure(model, wedge)
        assert validate_complex_structure(dyn.space, R.op).passed
        assert commutator_residual(R, dyn) <= 1e-8


def test_boost_weights_positive_and_horizon_link_open():
    model = LatticeKGModel(32, spacing=0.5)
    x_site, x_link = boost_weights(model, "right")
    assert np.all(x_site > 0) and np.all(np.diff(x_site) > 0)
    assert x_link[0] == 0 and np.all(x_link[1:] > 0)


def test_restricted_form_is_canonical():
    model = LatticeKGModel(16)
    basis, form = restrict_to_wedge(model.space, model, "right")
    assert np.allclose(basis @ model.space.form @ basis.T, form)
    k = len(model.wedge_sites("right"))
    assert form.shape == (2 * k, 2 * k)


def test_wedge_invariance_defect():
    model = LatticeKGModel(64, mass=0.1)
    assert wedge_invariance_defect(full_rindler_structure(model), model) <= 1e-10
    assert wedge_invariance_defect(full_rindler_structure(model), model, "left") <= 1e-10
    assert wedge_invariance_defect(minkowski_structure(model), model) > 0.01


def test_embed_places_wedge_vectors():
    model = LatticeKGModel(16)
    k = len(model.wedge_sites("right"))
    v = embed(model, "right", np.ones(2 * k))
    assert v.shape == (1, 32) and v.sum() == 2 * k
    assert np.all(v[0, model.wedge_indices("left")] == 0)


def test_restricted_vacuum_is_mixed_and_physical():
    model = LatticeKGModel(48)
    nu = restricted_vacuum(model).symplectic_eigenvalues()
    # gram = 2 x covariance, so the uncertainty bound is nu >= 1
    assert nu.min() >= 1 - 1e-9
    assert nu.max() > 1 + 1e-3


def test_unruh_occupations_positive():
    rows = unruh_spectrum(LatticeKGModel(64))
    assert all(r.mean_occupation > 0 for r in rows)
    assert all(0 < r.tail_probability < 1 for r in rows)


def test_unruh_thermal_moderate_lattice():
    rows = unruh_spectrum(LatticeKGModel(128, mass=0.05))
    sel = [r for r in rows if 0.2 <= r.kappa <= 1.5]
    assert sel and max(r.abs_rel_err for r in sel) < 0.1
    beta = fit_inverse_temperature([r.kappa for r in sel], [r.mean_occupation for r in sel])
    assert abs(beta / (2 * math.pi) - 1) < 0.1


def test_unruh_monotone_in_thermal_window():
    rows = unruh_spectrum(LatticeKGModel(96))
    nbar = [r.mean_occupation for r in rows if r.kappa <= 1.5]
    assert np.all(np.diff(nbar) < 0)


def test_left_right_symmetry():
    model = LatticeKGModel(41)
    right = unruh_spectrum(model, "right")
    left = unruh_spectrum(model, "left")
    for a, b in zip(right, left):
        assert a.kappa == pytest.approx(b.kappa, abs=1e-9)
        assert a.mean_occupation == pytest.approx(b.mean_occupation, abs=1e-9)


def test_rindler_modes_sorted():
    _, kappa, modes = rindler_modes(LatticeKGModel(24))
    assert np.all(np.diff(kappa) >= 0) and modes.shape[0] == kappa.size


def test_bose_einstein():
    assert bose_einstein(1.0) == pytest.approx(1 / (math.exp(2 * math.pi) - 1))
    assert bose_einstein(1e3) == 0.0


def test_fit_recovers_beta():
    k = np.linspace(0.2, 1.5, 9)
    assert fit_inverse_temperature(k, bose_einstein(k, 5.0)) == pytest.approx(5.0)


def test_family_grows_and_diverges():
    models = fixed_box_family([16, 32, 64], length=64.0)
    totals = [total_rindler_quanta(m) for m in models]
    assert np.all(np.diff(totals) > 0)
    report = family_verdict(models)
    assert report.verdict is Verdict.divergent_family
    assert len(report.family_totals) == 3

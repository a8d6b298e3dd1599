import warnings

import numpy as np
import pytest
from scipy.special import j0

from spacetime_crystal.errors import NumericalWarning
from spacetime_crystal.evolution import EvolutionSpec, evolve
from spacetime_crystal.grid import (
    GridSpec,
    SpacetimeField,
    Units,
    inner,
    make_gaussian,
    norm2,
    normalize,
    plane_wave,
    random_field,
)
from spacetime_crystal.io import read_csv
from spacetime_crystal.massshell import (
    ShellSpec,
    boost,
    commutator_delta,
    field_energy,
    frequency_split,
    kg_residual,
    lightcone_csv,
    lightcone_scan,
    pauli_jordan_closed_form,
    shell_project,
    spectrum_csv,
    tau_fourier,
)

G = GridSpec(32, 32, 8 * np.pi, 8 * np.pi)


def _modes(weights):
    A = np.zeros(G.shape, dtype=complex)
    for (ik, iw), w in weights.items():
        A[ik % G.nx, iw % G.nt] = np.sqrt(w)
    return normalize(SpacetimeField(G, A, "momentum"))


def test_shell_spec_validation():
    with pytest.raises(ValueError):
        ShellSpec(1.0, 0.0)
    with pytest.raises(ValueError):
        ShellSpec(np.nan, 0.1)


def test_shell_project_keeps_only_the_shell():
    f = _modes({(0, 4): 0.5, (0, 8): 0.5})  # q^2 = 1 and 4
    p = shell_project(f, ShellSpec(1.0, 1e-9))
    assert abs(inner(p, plane_wave(G, 0, 4))) == pytest.approx(1.0)
    assert kg_residual(p, 1.0) < 1e-12
    assert kg_residual(f, 1.0) == pytest.approx(np.sqrt(0.5) * 3)


def test_empty_shell_is_flagged():
    p = shell_project(_modes({(0, 4): 1.0}), ShellSpec(2.5, 1e-6))
    assert "empty-shell" in p.flags
    assert np.all(p.values == 0)


def test_frequency_split_partitions_the_field(rng):
    f = random_field(G, rng)
    part, anti = frequency_split(f)
    np.testing.assert_allclose(part.position.values + anti.position.values, f.values, atol=1e-13)
    assert abs(inner(part, anti)) < 1e-13
    assert "zero-frequency" in part.flags
    assert np.all(anti.momentum.values[:, G.w >= 0] == 0)


def test_frequency_split_without_static_modes():
    part, anti = frequency_split(_modes({(1, 3): 0.5, (1, -3): 0.5}))
    assert not part.flags
    assert inner(part, part).real == pytest.approx(0.5)


def test_field_energy_on_shell():
    assert field_energy(_modes({(3, 5): 1.0})) == pytest.approx(0.5, abs=1e-12)
    u = Units(m=2.0)
    f = plane_wave(G, 0, 4, u)
    assert field_energy(f) == pytest.approx(0.25, abs=1e-12)


def test_tau_fourier_resolves_two_shells():
    f = _modes({(0, 4): 0.5, (0, 8): 0.5})
    traj = evolve(f, EvolutionSpec("relativistic-free", 0.1, 1000))
    mu = np.linspace(0, 5, 501)
    spec = tau_fourier(traj, mu)
    np.testing.assert_allclose(spec.peaks(2), [1.0, 4.0], atol=0.01)
    assert spec.flags == ()
    # the field at a peak is the on-shell component
    comp = spec.field(int(np.argmin(np.abs(mu - 1.0))))
    assert kg_residual(comp, 1.0) < 0.05 * kg_residual(f, 1.0)


def test_tau_fourier_flags_aliasing():
    f = _modes({(0, 12): 1.0})  # q^2 = 9, rate 4.5
    traj = evolve(f, EvolutionSpec("relativistic-free", 1.0, 10))
    with pytest.warns(NumericalWarning):
        spec = tau_fourier(traj, np.linspace(0, 10, 11))
    assert "aliasing" in spec.flags


def test_tau_fourier_window_choice():
    traj = evolve(_modes({(0, 4): 1.0}), EvolutionSpec("relativistic-free", 0.1, 200))
    mu = np.linspace(0, 2, 201)
    rect = tau_fourier(traj, mu, "rect")
    hann = tau_fourier(traj, mu, "hann")
    assert rect.normalization == pytest.approx(20.1)
    assert rect.peak_mu() == pytest.approx(1.0) and hann.peak_mu() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        tau_fourier(traj, mu, "kaiser")


def test_spectrum_csv(tmp_path):
    traj = evolve(_modes({(0, 4): 1.0}), EvolutionSpec("relativistic-free", 0.1, 20))
    path = spectrum_csv(tau_fourier(traj, np.linspace(0, 2, 5)), tmp_path / "s.csv")
    _, header, data = read_csv(path)
    assert header == ["mu", "magnitude"] and data.shape == (5, 2)


@pytest.mark.parametrize("x,t", [(0.0, 1.0), (0.7, 2.0), (1.0, -1.5)])
def test_commutator_inside_cone_matches_bessel(x, t):
    got = commutator_delta(x, t, 2.0)
    expected = 1j * np.pi * np.sign(t) * j0(np.sqrt(2.0 * (t * t - x * x)))
    assert abs(got - expected) < 1e-8


def test_commutator_vanishes_outside_cone():
    for x, t in [(1.0, 0.0), (2.0, 1.0), (-3.0, 2.5)]:
        assert abs(commutator_delta(x, t, 1.0)) < 1e-9


def test_closed_form_is_odd_in_time():
    assert pauli_jordan_closed_form(0.2, 1.0, 1.0) == -pauli_jordan_closed_form(0.2, -1.0, 1.0)
    assert pauli_jordan_closed_form(2.0, 1.0, 1.0) == 0


def test_commutator_with_units():
    u = Units(hbar=0.5, c=2.0, m=1.0)
    got = commutator_delta(0.5, 1.0, 1.0, units=u)
    assert abs(got - pauli_jordan_closed_form(0.5, 1.0, 1.0, u)) < 1e-8


def test_commutator_warnings():
    with pytest.warns(NumericalWarning, match="light cone"):
        commutator_delta(1.0, 1.001, 1.0)
    with pytest.warns(NumericalWarning, match="under-resolves"):
        commutator_delta(0.0, 2.0, 1.0, nk=101)
    with pytest.raises(ValueError):
        commutator_delta(0.0, 1.0, 0.0)


def test_boost_preserves_interval():
    dx, dt = boost(0.3, 1.2, 0.6)
    assert dt**2 - dx**2 == pytest.approx(1.2**2 - 0.3**2)
    with pytest.raises(ValueError):
        boost(0.0, 1.0, 1.0)


def test_lightcone_scan_and_csv(tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("error", NumericalWarning)
        rows = lightcone_scan(np.array([-1.0, 0.0]), np.array([0.5, 2.0]), 1.0)
    assert rows.shape == (4, 4)
    path = lightcone_csv(rows, tmp_path / "lc.csv", 1.0)
    comments, header, data = read_csv(path)
    assert comments == ["mu=1.0"]
    np.testing.assert_array_equal(data, rows)


def test_projection_of_on_shell_field_is_identity():
    f = _modes({(0, 4): 0.4, (3, 5): 0.6})  # both at q^2 = 1
    shell = ShellSpec(1.0, 1e-9)
    p = shell_project(f, shell)
    assert abs(inner(p, f)) ** 2 > 1 - 1e-12
    np.testing.assert_allclose(shell_project(p, shell).values, p.values, atol=1e-14)


def test_broadband_packet_projects_onto_shell():
    f = make_gaussian(G, 4 * np.pi, 4 * np.pi, 1.0, 1.0)
    assert kg_residual(f, 1.0) > 0
    p = shell_project(f, ShellSpec(1.0, 0.05))
    assert "empty-shell" not in p.flags
    assert kg_residual(p, 1.0) <= 0.05


def test_two_shell_peaks_follow_the_weights():
    f = _modes({(0, 4): 0.3, (0, 8): 0.7})
    traj = evolve(f, EvolutionSpec("relativistic-free", 0.1, 1000))
    spec = tau_fourier(traj, np.array([1.0, 4.0]), "rect")
    ratio = spec.magnitude[0] ** 2 / spec.magnitude[1] ** 2
    assert ratio == pytest.approx(0.3 / 0.7, rel=0.05)


def _fwhm(spec):
    mag = spec.magnitude
    i = int(np.argmax(mag))
    above = mag >= mag[i] / 2
    lo, hi = i, i
    while lo > 0 and above[lo - 1]:
        lo -= 1
    while hi < len(mag) - 1 and above[hi + 1]:
        hi += 1
    return spec.mu[hi] - spec.mu[lo]


def test_rect_peak_width_scales_inversely_with_window():
    f = _modes({(0, 4): 1.0})
    mu = np.linspace(0.0, 2.0, 4001)
    short = tau_fourier(evolve(f, EvolutionSpec("relativistic-free", 0.1, 200)), mu, "rect")
    long = tau_fourier(evolve(f, EvolutionSpec("relativistic-free", 0.1, 400)), mu, "rect")
    assert _fwhm(short) / _fwhm(long) == pytest.approx(2.0, rel=0.05)


def test_conjugate_symmetric_field_splits_evenly():
    f = _modes({(3, 5): 0.5, (-3, -5): 0.5})
    part, anti = frequency_split(f)
    assert norm2(part) == pytest.approx(norm2(anti), rel=1e-12)
    assert kg_residual(f, 1.0) < 1e-12


def test_field_energy_is_weighted_average():
    f = _modes({(0, 4): 0.25, (0, 8): 0.75})  # q^2 = 1 and 4
    assert field_energy(f) == pytest.approx(0.25 * 0.5 + 0.75 * 2.0, abs=1e-12)


@pytest.mark.parametrize("x,t", [(0.3, 1.1), (2.0, 0.5), (-0.4, 2.2)])
def test_commutator_is_odd_under_reflection(x, t):
    assert commutator_delta(-x, -t, 1.5) == pytest.approx(-commutator_delta(x, t, 1.5), abs=1e-12)

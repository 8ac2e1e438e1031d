import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fermionic_mi.lattice import (
    Boundary,
    ChainGeometry,
    ChemicalPotential,
    FixedFilling,
    FractalDispersion,
    KitaevChain,
    ModelError,
    ModelSpec,
    PhaseModulatedHopping,
    PowerLawHopping,
    SelectiveHopping,
    bogoliubov_spectrum,
    dispersion,
    ell_alpha,
    f_alpha,
    hopping_model,
    kitaev_model,
    mode_grid,
    oriented_distance,
    periodic_distance,
)


class TestGeometry:
    def test_odd_size_rejected(self):
        with pytest.raises(ModelError):
            ChainGeometry(7, Boundary.PERIODIC)

    def test_periodic_grid(self):
        g = ChainGeometry(6, Boundary.PERIODIC)
        assert g.mode_labels().tolist() == [-3, -2, -1, 0, 1, 2]
        assert np.allclose(g.momenta(), 2 * np.pi * np.arange(-3, 3) / 6)

    def test_antiperiodic_grid(self):
        g = ChainGeometry(4, Boundary.ANTIPERIODIC)
        assert np.allclose(g.momenta(), [-3 * np.pi / 4, -np.pi / 4, np.pi / 4, 3 * np.pi / 4])

    @pytest.mark.parametrize("boundary", list(Boundary))
    def test_momenta_strictly_increasing(self, boundary):
        k = ChainGeometry(100, boundary).momenta()
        assert k.size == 100 and np.all(np.diff(k) > 0)


class TestModelSpec:
    def test_kitaev_needs_antiperiodic(self):
        with pytest.raises(ModelError):
            ModelSpec(ChainGeometry(8, Boundary.PERIODIC), KitaevChain(2.0), ChemicalPotential(1.0))

    def test_kitaev_needs_mu(self):
        with pytest.raises(ModelError):
            ModelSpec(ChainGeometry(8, Boundary.ANTIPERIODIC), KitaevChain(2.0), FixedFilling(0.5))

    def test_hopping_needs_periodic_and_filling(self):
        with pytest.raises(ModelError):
            ModelSpec(ChainGeometry(8, Boundary.ANTIPERIODIC), PowerLawHopping(2.0), FixedFilling(0.5))
        with pytest.raises(ModelError):
            ModelSpec(ChainGeometry(8, Boundary.PERIODIC), PowerLawHopping(2.0), ChemicalPotential(0.0))

    def test_non_integer_particle_number_rejected(self):
        with pytest.raises(ModelError):
            hopping_model(10, PowerLawHopping(2.0), 0.25)

    def test_even_gamma_rejected(self):
        with pytest.raises(ModelError):
            FractalDispersion(2)

    @pytest.mark.parametrize("alpha", [0.0, -1.0])
    def test_non_positive_alpha_rejected(self, alpha):
        with pytest.raises(ModelError):
            PowerLawHopping(alpha)

    def test_kitaev_defaults(self):
        v = KitaevChain(2.0)
        assert v.delta == 1.0 and 2 * v.t == 1.0


class TestDistances:
    @pytest.mark.parametrize("i,j,expected", [(1, 3, 2), (1, 9, 2), (1, 6, 5)])
    def test_periodic_distance(self, i, j, expected):
        assert periodic_distance(i, j, 10) == expected

    def test_periodic_distance_range(self):
        with pytest.raises(ModelError):
            periodic_distance(0, 3, 10)
        with pytest.raises(ModelError):
            periodic_distance(1, 11, 10)

    @pytest.mark.parametrize("m,expected", [(3, 3), (1000, -4), (-3, -3)])
    def test_oriented_distance(self, m, expected):
        assert oriented_distance(m, 1004) == expected

    def test_oriented_distance_range(self):
        with pytest.raises(ModelError):
            oriented_distance(1004, 1004)

    @given(st.integers(1, 500).map(lambda h: 2 * h), st.data())
    def test_distance_properties(self, n, data):
        i = data.draw(st.integers(1, n))
        j = data.draw(st.integers(1, n))
        d = periodic_distance(i, j, n)
        assert d == periodic_distance(j, i, n) and 0 <= d <= n // 2
        m = data.draw(st.integers(-(n - 1), n - 1))
        if m != 0 and abs(m) != n // 2:
            assert oriented_distance(m, n) + oriented_distance(-m, n) == 0
        if 0 < abs(m):
            assert abs(oriented_distance(m, n)) == periodic_distance(1, 1 + abs(m), n)


class TestKernels:
    def test_ell_alpha_zeta2_partial_sum(self):
        n = 2000
        # Hurwitz zeta gives the tail of sum 1/n^2 exactly
        ref = float(mpmath.zeta(2) - mpmath.zeta(2, n // 2 + 1))
        assert ell_alpha(0.0, 2.0, n) == pytest.approx(ref, rel=1e-12)

    def test_ell_alpha_large_n_limits(self):
        n = 400_000
        assert ell_alpha(0.0, 2.0, n) == pytest.approx(math.pi**2 / 6, abs=1e-5)
        assert ell_alpha(math.pi, 2.0, n) == pytest.approx(-math.pi**2 / 12, abs=1e-9)

    def test_ell_alpha_short_range_limit(self):
        k = np.linspace(-3, 3, 7)
        assert np.allclose(ell_alpha(k, 1000.0, 50), np.cos(k), atol=1e-12)

    @pytest.mark.parametrize("k,alpha,n", [(0.7, 0.5, 200), (2.1, 1.3, 64), (math.pi / 2, 2.0, 1000)])
    def test_ell_alpha_compensated_reference(self, k, alpha, n):
        ref = math.fsum(math.cos(m * k) / m**alpha for m in range(1, n // 2 + 1))
        assert ell_alpha(k, alpha, n) == pytest.approx(ref, rel=1e-12, abs=1e-14)

    def test_ell_alpha_phase_shift(self):
        assert ell_alpha(0.3, 1.5, 40, phi=0.2) == pytest.approx(ell_alpha(0.5, 1.5, 40), abs=1e-14)

    def test_f_alpha_zero_momentum(self):
        assert f_alpha(0.0, 0.7, 30) == 0.0

    def test_f_alpha_reverse_order_sum(self):
        k, alpha, n = math.pi / 2, 0.5, 200
        terms = [math.sin(m * k) / min(m, n - m) ** alpha for m in range(1, n)]
        ref = 0.0
        for term in reversed(terms):
            ref += term
        assert f_alpha(k, alpha, n) == pytest.approx(ref, abs=1e-12)
        assert f_alpha(k, alpha, n) == pytest.approx(math.fsum(terms), abs=1e-13)

    def test_f_alpha_short_range_keeps_both_unit_arms(self):
        # on a finite ring the m=1 and m=N-1 terms both have |m|_p = 1
        k = np.linspace(-2.5, 2.5, 9)
        n = 20
        assert np.allclose(f_alpha(k, 1e4, n), np.sin(k) + np.sin((n - 1) * k), atol=1e-12)

    def test_scalar_in_scalar_out(self):
        assert isinstance(ell_alpha(0.1, 2.0, 10), float)
        assert isinstance(f_alpha(0.1, 2.0, 10), float)
        assert ell_alpha(np.zeros((2, 3)), 2.0, 10).shape == (2, 3)


class TestDispersion:
    def test_antipodal_parity_rule(self):
        spec = hopping_model(20, SelectiveHopping(10), 0.5)
        g = mode_grid(spec)
        assert np.allclose(g.energies, -2.0 * np.where(g.labels % 2, -1.0, 1.0), atol=1e-12)
        assert np.all(g.energies[g.labels % 2 == 1] == pytest.approx(2.0))

    def test_antipodal_r1_closed_form(self):
        n = 40
        spec = hopping_model(n, SelectiveHopping(n // 2, r=1), 0.5)
        g = mode_grid(spec)
        expected = -2.0 * np.where(g.labels % 2, -1.0, 1.0) * (1 + 2 * np.cos(2 * np.pi * g.labels / n))
        assert np.allclose(g.energies, expected, atol=1e-12)

    def test_selective_zero_mode_limit(self):
        spec = hopping_model(40, SelectiveHopping(7, s2=3, t1=1.0, t2=0.5, r=2), 0.5)
        e0 = dispersion(spec, np.array([0.0]), np.array([0]))[0]
        assert e0 == pytest.approx(-2 * (1.0 + 0.5) * (2 * 2 + 1))

    def test_fractal_value_and_origin(self):
        spec = hopping_model(10, FractalDispersion(1, t=1.3), 0.5)
        assert dispersion(spec, 2 / math.pi, 1) == pytest.approx(-1.3)
        assert dispersion(spec, 0.0, 0) == 0.0

    def test_power_law_at_pi(self):
        spec = hopping_model(400_000, PowerLawHopping(2.0), 0.5)
        assert dispersion(spec, math.pi, 200_000) == pytest.approx(math.pi**2 / 6, abs=1e-9)

    @pytest.mark.parametrize(
        "variant",
        [PowerLawHopping(2.0), PowerLawHopping(0.5), PowerLawHopping(math.inf), FractalDispersion(3),
         SelectiveHopping(5, s2=2, t2=0.3, r=1)],
    )
    def test_even_dispersion(self, variant):
        n = 24
        spec = hopping_model(n, variant, 0.5)
        g = mode_grid(spec)
        energy = dict(zip(g.labels.tolist(), g.energies))
        for lab in range(1, n // 2):
            if isinstance(variant, FractalDispersion):
                # sin(1/k^gamma) is odd for odd gamma, the one exception
                assert energy[lab] == pytest.approx(-energy[-lab], abs=1e-12)
            else:
                assert energy[lab] == pytest.approx(energy[-lab], abs=1e-12)

    def test_phase_modulation_breaks_parity(self):
        g = mode_grid(hopping_model(24, PhaseModulatedHopping(2.0, 0.4), 0.5))
        energy = dict(zip(g.labels.tolist(), g.energies))
        assert abs(energy[3] - energy[-3]) > 1e-3


class TestBogoliubov:
    def test_critical_line_mu_plus_one(self):
        spec = kitaev_model(1000, 1000.0, 1.0)
        assert bogoliubov_spectrum(spec, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_gapped_value(self):
        spec = kitaev_model(1000, 1000.0, 1.5)
        assert bogoliubov_spectrum(spec, 0.0) == pytest.approx(0.5, abs=1e-12)

    def test_critical_mu_minus_one(self):
        spec = kitaev_model(1000, 2.0, -1.0)
        assert bogoliubov_spectrum(spec, math.pi) == pytest.approx(0.0, abs=1e-12)

    def test_non_negative_and_pairing_free_limit(self):
        spec = kitaev_model(64, 1.2, 0.3)
        k = np.linspace(-math.pi, math.pi, 101)
        e = bogoliubov_spectrum(spec, k)
        assert np.all(e >= 0)
        zeros = np.abs(f_alpha(k + math.pi, 1.2, 64)) < 1e-14
        assert np.allclose(e[zeros], np.abs(0.3 - np.cos(k[zeros])))

    def test_power_law_hopping_reduces_to_nearest_neighbour(self):
        k = ChainGeometry(30, Boundary.ANTIPERIODIC).momenta()
        nn = bogoliubov_spectrum(kitaev_model(30, 2.0, 0.4), k)
        lr = bogoliubov_spectrum(kitaev_model(30, 2.0, 0.4, hopping_beta=200.0), k)
        assert np.allclose(nn, lr, atol=1e-12)

    def test_grid_energies_match(self):
        spec = kitaev_model(40, 0.8, 0.2)
        g = mode_grid(spec)
        assert np.allclose(g.energies, bogoliubov_spectrum(spec, g.momenta), atol=1e-12)

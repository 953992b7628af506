import math

import numpy as np
import pytest

from statelock.frequency_modulation import (
    BogoliubovPair,
    ModulationProfile,
    assemble_factored_operator,
    bogoliubov_from_params,
    design_modulation,
    extract_pair_from_matrix,
    factored_equivalence_defect,
    integrate_bogoliubov,
    params_from_bogoliubov,
    propagate_fock_td,
    propagation_fidelity,
)
from statelock.oscillator_analytics import (
    CoherentLabel,
    FockVector,
    SqueezeParams,
    coherent_fock,
    fock_cutoff,
    rotate_coherent,
    squeeze_amplitude,
)


def coherent_input(alpha=0.9 + 0.4j):
    n = fock_cutoff(abs(alpha) ** 2, 1e-12, squeezing=True)
    return coherent_fock(alpha, n, tail_tol=1e-9)


class TestIntegrateBogoliubov:
    def test_constant_profile_pure_rotation(self):
        w, tau = 1.3, 2.1
        pair = integrate_bogoliubov(ModulationProfile("constant", w, w, tau))
        assert abs(pair.u - np.exp(-1j * w * tau)) < 1e-9
        assert abs(pair.v) < 1e-10

    def test_sudden_jump_analytic(self):
        # oracle: basis mismatch of two oscillators, |v| = |w0-wc|/(2 sqrt(w0 wc))
        wc, w0 = 1.0, 4.0
        pair = integrate_bogoliubov(ModulationProfile("sudden", wc, w0, 0.0))
        assert abs(abs(pair.v) - (w0 - wc) / (2 * math.sqrt(w0 * wc))) < 1e-12
        assert pair.identity_defect < 1e-12

    def test_adiabatic_limit(self):
        vs = [
            abs(integrate_bogoliubov(
                ModulationProfile("smooth-ramp", 1.0, 2.0, tau, shape=1.0)
            ).v)
            for tau in (2.0, 6.0, 18.0, 54.0)
        ]
        assert all(a > b for a, b in zip(vs, vs[1:]))

    def test_identity_enforced(self):
        with pytest.raises(ValueError):
            BogoliubovPair(u=1.5, v=0.0)


class TestParamsExtraction:
    def test_pure_rotation(self):
        w, tau = 1.3, 2.1
        sq = params_from_bogoliubov(BogoliubovPair(u=np.exp(-1j * w * tau), v=0.0))
        assert sq.r == 0.0
        assert sq.phi_rot == pytest.approx((w * tau) % (2 * math.pi), abs=1e-12)

    def test_sudden_jump_magnitude(self):
        wc, w0 = 1.0, 4.0
        pair = integrate_bogoliubov(ModulationProfile("sudden", wc, w0, 0.0))
        sq = params_from_bogoliubov(pair)
        assert sq.r == pytest.approx(0.5 * math.log(w0 / wc), abs=1e-12)

    def test_round_trip_through_pair(self):
        sq = SqueezeParams(r=0.37, phi_sq=2.2, phi_rot=0.9)
        back = params_from_bogoliubov(bogoliubov_from_params(sq))
        assert back.r == pytest.approx(sq.r, abs=1e-12)
        assert back.phi_sq == pytest.approx(sq.phi_sq, abs=1e-12)
        assert back.phi_rot == pytest.approx(sq.phi_rot, abs=1e-12)

    def test_round_trip_through_matrix(self):
        sq = SqueezeParams(r=0.37, phi_sq=2.2, phi_rot=0.9)
        pair = extract_pair_from_matrix(assemble_factored_operator(sq, 60))
        back = params_from_bogoliubov(pair)
        assert back.r == pytest.approx(sq.r, abs=1e-8)
        assert back.phi_sq == pytest.approx(sq.phi_sq, abs=1e-8)
        assert back.phi_rot == pytest.approx(sq.phi_rot, abs=1e-8)


class TestPropagateFockTd:
    def test_zero_duration_is_identity(self):
        psi0 = coherent_input()
        p = ModulationProfile("constant", 1.0, 1.0, 0.0)
        out = propagate_fock_td(p, psi0)
        assert np.max(np.abs(out.amps - psi0.amps)) < 1e-12

    def test_constant_profile_rotates_coherent(self):
        alpha, w, tau = 0.9 + 0.4j, 1.3, 2.1
        psi0 = coherent_input(alpha)
        out = propagate_fock_td(ModulationProfile("constant", w, w, tau), psi0)
        expect = coherent_fock(rotate_coherent(alpha, w * tau), psi0.n_max, 1e-9)
        assert abs(np.vdot(expect.amps, out.amps)) > 1 - 1e-8

    def test_sudden_jump_squeezed_vacuum_pattern(self):
        # populations of the quenched ground state follow the squeezed-vacuum
        # pattern; oracle extracts Fock amplitudes from the coherent-label
        # amplitude formula by Fourier analysis on a circle of labels
        wc, w0 = 1.0, 4.0
        prof = ModulationProfile("sudden", wc, w0, 0.0)
        ground = np.zeros(31, dtype=complex)
        ground[0] = 1.0
        out = propagate_fock_td(prof, FockVector(ground))
        sq = params_from_bogoliubov(integrate_bogoliubov(prof))
        n_ang, rho = 64, 0.6
        angles = 2 * np.pi * np.arange(n_ang) / n_ang
        samples = np.array(
            [
                squeeze_amplitude(rho * np.exp(1j * t), 0.0, sq.z) * np.exp(rho**2 / 2)
                for t in angles
            ]
        )
        coeffs = np.fft.ifft(samples)
        pops_oracle = np.array(
            [
                abs(coeffs[k] * math.sqrt(math.factorial(k)) / rho**k) ** 2
                for k in range(12)
            ]
        )
        assert np.max(np.abs(np.abs(out.amps[:12]) ** 2 - pops_oracle)) < 1e-10
        assert np.max(np.abs(out.amps[1::2][:6])) < 1e-12  # odd levels empty

    @pytest.mark.parametrize(
        "family,ws,we,tau",
        [("constant", 1.3, 1.3, 2.1), ("sudden", 1.0, 2.0, 1.0), ("smooth-ramp", 1.0, 2.0, 4.0)],
    )
    def test_factored_equivalence(self, family, ws, we, tau):
        psi0 = coherent_input()
        prof = ModulationProfile(family, ws, we, tau, shape=2.0)
        assert propagation_fidelity(prof, psi0) > 1 - 1e-6
        assert factored_equivalence_defect(prof, psi0) < 1e-5

    def test_rejects_unnormalized(self):
        bad = FockVector.__new__(FockVector)
        bad.amps = np.zeros(8, dtype=complex)
        bad.amps[0] = 0.5
        bad.tail_tol = 1.0
        with pytest.raises(ValueError):
            propagate_fock_td(ModulationProfile("constant", 1.0, 1.0, 1.0), bad)


class TestDesignModulation:
    def test_equal_endpoints_constant_branch(self):
        lab = CoherentLabel(1.0)
        res = design_modulation(1.0, 1.0, lab, gamma=0.0)
        assert res.feasible
        assert res.residual < 1e-12
        assert res.beta_mag == pytest.approx(1.0, abs=1e-12)
        assert res.profile.family == "constant"

    @pytest.mark.slow
    def test_four_to_one_ramp_converges_and_realizes_transfer(self):
        lab = CoherentLabel(1.0)  # one mean quantum
        gamma = 0.3
        res = design_modulation(0.5, 2.0, lab, gamma=gamma)
        assert res.feasible
        assert res.residual < 1e-6
        assert res.squeeze.r < 1e-3
        # the factored operator built from the designed parameters must move
        # the packet onto the target coherent state in truncated numerics
        n = fock_cutoff(abs(lab.alpha) ** 2 + res.beta_mag**2, 1e-12, squeezing=True)
        op = assemble_factored_operator(res.squeeze, n)
        moved = op @ coherent_fock(lab.alpha, n, 1e-9).amps
        target = coherent_fock(res.beta_mag * np.exp(1j * gamma), n, 1e-9).amps
        assert abs(np.vdot(target, moved)) > 1 - 1e-5

    def test_frozen_family_infeasible(self):
        lab = CoherentLabel(1.0)
        res = design_modulation(0.5, 2.0, lab, gamma=0.3, duration_range=(0.05, 0.2))
        assert not res.feasible
        assert res.residual > 1e-3


def test_profile_boundary_conditions():
    p = ModulationProfile("smooth-ramp", 0.5, 2.0, 7.0, shape=3.0)
    assert p.omega(0.0) == pytest.approx(0.5, abs=1e-15)
    assert p.omega(7.0) == pytest.approx(2.0, abs=1e-15)
    ts = np.linspace(0, 7, 101)
    assert np.all(np.asarray(p.omega(ts)) > 0)


def test_profile_validation():
    with pytest.raises(ValueError):
        ModulationProfile("constant", 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        ModulationProfile("smooth-ramp", 1.0, 2.0, 1.0, shape=-1.0)
    with pytest.raises(ValueError):
        ModulationProfile("triangle", 1.0, 2.0, 1.0)

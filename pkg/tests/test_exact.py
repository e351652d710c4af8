import numpy as np
import pytest

from spinbath import (ModelParams, PureState, build_bath_ensemble,
                      debye_frequencies, free_spin_trajectory,
                      propagate_schrodinger, thermal_reduced_density)
from spinbath.exact import stable_substeps
from spinbath.spins import hamiltonian_norm_bound

from conftest import dense_full_hamiltonian, random_state


def make_params(n_s, **kw):
    defaults = dict(omega0=0.8288, beta=0.01, lambda0=1.0, lam=2.0,
                    kT=0.02, n_eig=min(4, 2 ** n_s))
    defaults.update(kw)
    return ModelParams(n_s=n_s, omegas=tuple(debye_frequencies(n_s)), **defaults)


def expm_evolve(h, psi0, t):
    evals, evecs = np.linalg.eigh(h)
    return evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ psi0))


class TestPropagate:
    def test_diagonal_phases(self):
        params = make_params(2, beta=0.0, lambda0=0.0, lam=0.0)
        state0 = PureState((np.arange(8) + 1.0) / np.sqrt(np.sum((np.arange(8) + 1.0) ** 2)))
        final = propagate_schrodinger(state0, params, 10.0, 0.1)
        idx = np.arange(8)
        energy = (np.where(idx >> 2 & 1, 0.5, -0.5) * params.omega0
                  + np.where(idx >> 0 & 1, 0.5, -0.5) * params.omegas[0]
                  + np.where(idx >> 1 & 1, 0.5, -0.5) * params.omegas[1])
        expect = state0.amplitudes * np.exp(-1j * energy * 10.0)
        assert np.abs(final.amplitudes - expect).max() < 1e-9

    def test_matches_dense_expm(self, rng):
        params = make_params(2)
        psi0 = random_state(3, rng)
        final = propagate_schrodinger(PureState(psi0), params, 5.0, 0.1)
        expect = expm_evolve(dense_full_hamiltonian(params), psi0, 5.0)
        assert np.abs(final.amplitudes - expect).max() < 1e-8

    def _thermal_initial_state(self, params):
        # |1> (x) |ground>: the physically populated low-energy sector
        bath = build_bath_ensemble(params)
        amps = np.zeros(2 ** params.n_qubits, dtype=complex)
        amps[2 ** params.n_s:] = bath.eigvecs[0]
        return PureState(amps)

    def test_norm_conserved(self):
        params = make_params(4, lam=4.0)
        state0 = self._thermal_initial_state(params)
        norms = []
        propagate_schrodinger(state0, params, 20.0, 0.1,
                              observer=lambda t, s: norms.append(s.norm()))
        assert max(abs(n - 1.0) for n in norms) < 1e-8

    def test_energy_conserved(self):
        from spinbath.spins import apply_hamiltonian
        params = make_params(4, lam=2.0)
        energies = []

        def observe(t, state):
            h_psi = apply_hamiltonian(state, params)
            energies.append(np.vdot(state.amplitudes, h_psi.amplitudes).real)

        state0 = self._thermal_initial_state(params)
        propagate_schrodinger(state0, params, 20.0, 0.1, observer=observe)
        assert max(energies) - min(energies) < 1e-8

    def test_observer_step_count_and_times(self, rng):
        params = make_params(2)
        times = []
        propagate_schrodinger(PureState(random_state(3, rng)), params, 1.0, 0.3,
                              observer=lambda t, s: times.append(t))
        assert len(times) == 4
        assert times[-1] == 1.0

    def test_norm_drift_aborts(self, rng):
        # force instability by refusing substeps on a stiff model
        params = make_params(6, lam=30.0)
        with pytest.raises((RuntimeError, FloatingPointError)):
            propagate_schrodinger(PureState(random_state(7, rng)), params,
                                  5.0, 0.1, substeps=1)

    def test_substep_choice_scales_with_stiffness(self):
        weak = make_params(4, lam=0.1)
        strong = make_params(4, lam=10.0)
        assert stable_substeps(strong, 0.1) > stable_substeps(weak, 0.1)
        assert stable_substeps(weak, 0.1) >= 1
        # bound actually dominates the true spectral radius
        dense = dense_full_hamiltonian(strong)
        assert hamiltonian_norm_bound(strong) >= np.abs(np.linalg.eigvalsh(dense)).max()


class TestThermalReducedDensity:
    def test_initial_condition(self):
        params = make_params(3, n_eig=2)
        bath = build_bath_ensemble(params)
        traj = thermal_reduced_density(params, bath, 1.0, 0.1)
        rho0 = traj.densities[0]
        assert rho0.rho11 == pytest.approx(1.0, abs=1e-12)
        assert rho0.rho00 == pytest.approx(0.0, abs=1e-12)
        assert abs(rho0.rho10) < 1e-12

    def test_decoupled_matches_free_evolution(self):
        params = make_params(3, lambda0=0.0, n_eig=3)
        bath = build_bath_ensemble(params)
        traj = thermal_reduced_density(params, bath, 20.0, 0.1)
        _, _, z_free = free_spin_trajectory(params.omega0, params.beta, traj.times)
        _, _, _, z = traj.observables()
        assert np.abs(z - z_free).max() < 1e-8

    def test_matches_dense_liouville(self, rng):
        params = make_params(2, n_eig=4)
        bath = build_bath_ensemble(params)
        traj = thermal_reduced_density(params, bath, 5.0, 0.1, dt_out=5.0)
        h = dense_full_hamiltonian(params)
        # chi(0) = |1><1| (x) B evolved exactly, then traced over the bath
        b = (bath.eigvecs.T * bath.weights) @ bath.eigvecs.conj()
        chi0 = np.zeros((8, 8), dtype=complex)
        chi0[4:, 4:] = b
        evals, evecs = np.linalg.eigh(h)
        u = evecs @ np.diag(np.exp(-1j * evals * 5.0)) @ evecs.conj().T
        chi_t = u @ chi0 @ u.conj().T
        rho_dense = np.einsum("sbtb->st", chi_t.reshape(2, 4, 2, 4))
        rho = traj.densities[-1]
        assert rho.rho11 == pytest.approx(rho_dense[1, 1].real, abs=1e-8)
        assert rho.rho00 == pytest.approx(rho_dense[0, 0].real, abs=1e-8)
        assert abs(rho.rho10 - rho_dense[1, 0]) < 1e-8

    def test_purity_and_trace_bounds(self):
        params = make_params(4, n_eig=4, lam=4.0)
        bath = build_bath_ensemble(params)
        # extra substeps: at this small register the stability-based choice
        # leaves visible amplitude error in high modes the ensemble touches
        traj = thermal_reduced_density(params, bath, 10.0, 0.1, substeps=3)
        for rho in traj.densities:
            assert abs(rho.trace - 1.0) < 1e-8
            purity = rho.rho11 ** 2 + rho.rho00 ** 2 + 2 * abs(rho.rho10) ** 2
            assert 0.5 - 1e-8 <= purity <= 1.0 + 1e-8
            lo, hi = rho.eigenvalues()
            assert lo >= -1e-8
            assert hi <= 1.0 + 1e-8

    def test_workers_bit_identical(self):
        params = make_params(3, n_eig=4)
        bath = build_bath_ensemble(params)
        serial = thermal_reduced_density(params, bath, 3.0, 0.1)
        parallel = thermal_reduced_density(params, bath, 3.0, 0.1, workers=2)
        for a, b in zip(serial.densities, parallel.densities):
            assert a.rho11 == b.rho11
            assert a.rho00 == b.rho00
            assert a.rho10 == b.rho10

    def test_dt_out_validation(self):
        params = make_params(2)
        bath = build_bath_ensemble(params)
        with pytest.raises(ValueError):
            thermal_reduced_density(params, bath, 1.0, 0.1, dt_out=0.25)

    def test_output_grid(self):
        params = make_params(2, n_eig=1)
        bath = build_bath_ensemble(params)
        traj = thermal_reduced_density(params, bath, 1.0, 0.1, dt_out=0.2)
        assert np.allclose(traj.times, np.arange(0.0, 1.01, 0.2))


class TestFreeTrajectory:
    def test_initial_point(self):
        x, y, z = free_spin_trajectory(0.8288, 0.01, np.array([0.0]))
        assert (x[0], y[0], z[0]) == (0.0, 0.0, 1.0)

    def test_rabi_depth_and_period(self):
        omega0, beta = 1.0, 0.25
        omega_r = np.hypot(omega0, 2 * beta)
        t = np.array([np.pi / omega_r, 2 * np.pi / omega_r])
        _, _, z = free_spin_trajectory(omega0, beta, t)
        assert z[0] == pytest.approx((omega0 ** 2 - 4 * beta ** 2) / omega_r ** 2, abs=1e-12)
        assert z[1] == pytest.approx(1.0, abs=1e-12)

    def test_unit_bloch_norm(self):
        t = np.linspace(0.0, 30.0, 301)
        x, y, z = free_spin_trajectory(0.8288, 0.01, t)
        assert np.abs(x ** 2 + y ** 2 + z ** 2 - 1.0).max() < 1e-12

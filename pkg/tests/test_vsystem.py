import dataclasses as dc
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jcsim import quantum_core as qc
from jcsim import vsystem as vs
from jcsim.field_states import fock_state, thermal_state
from jcsim.units import cm1_to_hartree

G, E, F = 0, 1, 2


@pytest.fixture(scope="module")
def thermal_run():
    return vs.run_v(vs.preset_config("thermal"), check_psd=True)


@pytest.fixture(scope="module")
def coherent_run():
    return vs.run_v(vs.preset_config("coherent"), keep_states=True)


def mode(lam=1e-4, n_max=4, **kw):
    return vs.ModeConfig(0.09, lam, lam, n_max, **kw)


class TestConfig:
    def test_preset_levels(self):
        cfg = vs.preset_config()
        assert cfg.omega_f - cfg.omega_e == pytest.approx(1.13908e-3, rel=1e-5)
        w = cfg.modes[0].omega
        assert w == pytest.approx(45.56335 / 495.9)
        assert w - cfg.omega_e == pytest.approx(cfg.omega_f - w)
        assert cfg.modes[0].lambda_e == cfg.modes[0].lambda_f == 1e-4
        assert cfg.layout.dims == (3, 10)

    def test_ordering(self):
        with pytest.raises(ValueError, match="ordering"):
            vs.VConfig(0.0, 0.2, 0.1, (mode(),), t_final=1.0)

    def test_mode_count(self):
        with pytest.raises(ValueError):
            vs.VConfig(0.0, 0.1, 0.1, (mode(),) * 3, t_final=1.0)

    def test_negative_coupling(self):
        with pytest.raises(ValueError):
            mode(lam=-1)

    def test_runner_mode_checks(self):
        with pytest.raises(ValueError):
            vs.run_v(vs.two_mode_config(n_max=2))
        with pytest.raises(ValueError):
            vs.run_v_two_mode(vs.preset_config())


class TestHamiltonian:
    def test_uncoupled_diagonal(self):
        cfg = vs.VConfig(0.0, 0.08, 0.1, (mode(lam=0.0),), t_final=1.0)
        h = vs.build_v_hamiltonian(cfg)
        assert np.count_nonzero(h - np.diag(np.diag(h))) == 0
        i, n = np.indices((3, 5)).reshape(2, -1)
        expect = np.array([0.0, 0.08, 0.1])[i] + 0.09 * (n + 0.5)
        np.testing.assert_allclose(np.diag(h).real, expect, rtol=1e-15)

    def test_coupling_elements(self):
        cfg = vs.VConfig(0.0, 0.08, 0.1, (vs.ModeConfig(0.09, 2e-4, 3e-4, 4),), t_final=1.0)
        h = vs.build_v_hamiltonian(cfg)
        lay = cfg.layout
        assert h[lay.flatten((E, 0)), lay.flatten((G, 1))] == pytest.approx(2e-4)
        for n in range(1, 5):
            assert h[lay.flatten((F, n - 1)), lay.flatten((G, n))] == pytest.approx(3e-4 * math.sqrt(n))
            assert h[lay.flatten((E, n - 1)), lay.flatten((G, n))] == pytest.approx(2e-4 * math.sqrt(n))
        assert qc.hermiticity_error(h) == 0.0

    @pytest.mark.parametrize("cfg", [vs.preset_config(), vs.two_mode_config(n_max=3),
                                     vs.two_mode_config(n_max=3, topology="per_transition")])
    def test_conserves_excitations(self, cfg):
        h = vs.build_v_hamiltonian(cfg)
        nexc = np.diag(vs.excitation_number(cfg).astype(float))
        assert np.abs(h @ nexc - nexc @ h).max() == 0.0

    def test_rabi_period_degenerate(self):
        # one-excitation manifold {g1, e0, f0}: gap √2 λ
        cfg = vs.degenerate_config()
        assert vs.rabi_period(cfg) == pytest.approx(2 * math.pi / (math.sqrt(2) * 1e-4), rel=1e-9)


class TestRun:
    def test_single_photon_closed_form(self):
        cfg = vs.degenerate_config()
        tr = vs.run_v(cfg, fields=[fock_state(1, cfg.modes[0].n_max)])
        s2 = 0.5 * np.sin(math.sqrt(2) * 1e-4 * tr.times) ** 2
        np.testing.assert_allclose(tr.rho_ee, s2, atol=1e-10)
        np.testing.assert_allclose(tr.rho_ff, s2, atol=1e-10)

    def test_vacuum_static(self):
        cfg = vs.preset_config()
        tr = vs.run_v(cfg, fields=[fock_state(0, 9)])
        assert np.abs(tr.rho_gg - 1).max() < 1e-14
        assert np.abs(tr.rho_ee).max() < 1e-14

    def test_thermal_selection_rule(self, thermal_run):
        assert np.abs(thermal_run.rho_ge).max() <= 1e-12
        assert np.abs(thermal_run.rho_gf).max() <= 1e-12
        assert thermal_run.field_offdiag_max.max() <= 1e-10

    def test_coherent_nonzero_ge(self, coherent_run):
        assert np.abs(coherent_run.rho_ge).max() > 1e-3
        assert np.abs(coherent_run.rho_gf).max() > 1e-3

    @pytest.mark.parametrize("name", ["thermal_run", "coherent_run"])
    def test_trajectory_invariants(self, name, request):
        tr = request.getfixturevalue(name)
        pops = tr.rho_gg + tr.rho_ee + tr.rho_ff
        assert np.abs(pops - 1).max() <= 1e-9
        assert np.all(np.abs(tr.rho_fe) ** 2 <= tr.rho_ff * tr.rho_ee + 1e-12)
        assert np.abs(tr.trace_m - 1).max() <= 1e-9
        assert np.abs(tr.trace_f - 1).max() <= 1e-9
        assert tr.hermiticity_error.max() <= 1e-9
        assert np.ptp(tr.purity_total) <= 1e-8
        assert np.abs(tr.excitation_blocks - tr.excitation_blocks[0]).max() <= 1e-9

    def test_psd(self, thermal_run):
        assert thermal_run.min_eigenvalue.min() >= -1e-8

    def test_pure_purities_equal(self, coherent_run):
        assert np.abs(coherent_run.purity_m - coherent_run.purity_f).max() <= 1e-8
        # states kept: recompute one partial trace directly
        rho = coherent_run.states[17]
        rm = qc.partial_trace_array(rho, (3, 10), [0])
        np.testing.assert_allclose(rm, coherent_run.rho_m[17], atol=1e-15)

    def test_thermal_purities_out_of_phase(self, thermal_run):
        per = vs.rabi_period(vs.preset_config())
        sel = thermal_run.times <= per * (1 + 1e-9)
        dm = thermal_run.purity_m[sel] - thermal_run.purity_m[0]
        df = thermal_run.purity_f[sel] - thermal_run.purity_f[0]
        assert np.corrcoef(dm, df)[0, 1] < 0

    def test_coherent_thermal_similarity(self, thermal_run, coherent_run):
        d = np.abs(coherent_run.rho_fe - thermal_run.rho_fe).max()
        assert d <= 0.1 * np.abs(thermal_run.rho_fe).max()

    def test_sampling(self):
        cfg = vs.preset_config()
        t = vs.sample_times(cfg)
        assert t[0] == 0 and t[-1] == pytest.approx(cfg.t_final)
        assert len(t) == 3 * vs.SAMPLES_PER_PERIOD + 1
        cfg2 = dc.replace(cfg, dt=100.0)
        assert np.diff(vs.sample_times(cfg2)) == pytest.approx(100.0)

    def test_interaction_picture_degenerate(self):
        cfg = vs.degenerate_config("coherent")
        tr = vs.run_v(cfg)
        ip = vs.interaction_picture(tr, cfg)
        np.testing.assert_allclose(ip[:, F, E], tr.rho_fe, atol=1e-15)

    def test_metadata_records_phase(self):
        cfg = vs.preset_config("coherent")
        cfg = dc.replace(cfg, modes=(dc.replace(cfg.modes[0], phase=0.4),))
        assert vs.run_v(cfg).metadata["coherent_phases"] == [0.4]

    @given(st.floats(0.0, 2 * math.pi))
    def test_phase_invariance_of_populations(self, phase):
        base = vs.degenerate_config("coherent", n_max=4, periods=0.5)
        rot = dc.replace(base, modes=(dc.replace(base.modes[0], phase=phase),))
        a, b = vs.run_v(base), vs.run_v(rot)
        np.testing.assert_allclose(b.rho_ee, a.rho_ee, atol=1e-12)
        np.testing.assert_allclose(np.abs(b.rho_fe), np.abs(a.rho_fe), atol=1e-12)
        np.testing.assert_allclose(np.abs(b.rho_gf), np.abs(a.rho_gf), atol=1e-12)


class TestTwoMode:
    def test_vacuum_static(self):
        cfg = vs.two_mode_config(n_max=3)
        tr = vs.run_v_two_mode(cfg, fields=[fock_state(0, 3), fock_state(0, 3)])
        assert np.abs(tr.rho_gg - 1).max() < 1e-14

    @pytest.mark.parametrize("topology", ["symmetric", "per_transition"])
    def test_thermal_selection_rule(self, topology):
        tr = vs.run_v_two_mode(vs.two_mode_config("thermal", topology=topology))
        assert np.abs(tr.rho_ge).max() <= 1e-12
        assert np.abs(tr.rho_gf).max() <= 1e-12

    def test_per_transition_field_diagonal(self):
        tr = vs.run_v_two_mode(vs.two_mode_config("thermal", topology="per_transition"))
        assert tr.field_offdiag_max.max() <= 1e-10

    def test_symmetric_field_coherence_within_photon_number(self):
        # identical modes swap photons through the atom, so ρ_F picks up
        # coherences, but only between states of equal total photon number
        cfg = vs.two_mode_config("thermal", n_max=4)
        tr = vs.run_v_two_mode(cfg, keep_states=True)
        n1, n2 = np.indices((5, 5)).reshape(2, -1)
        same = np.equal.outer(n1 + n2, n1 + n2)
        worst_in, worst_out = 0.0, 0.0
        for rho in tr.states:
            rf = qc.partial_trace_array(rho, cfg.layout.dims, [1, 2])
            worst_out = max(worst_out, np.abs(rf[~same]).max())
            off = rf - np.diag(np.diag(rf))
            worst_in = max(worst_in, np.abs(off[same]).max())
        assert worst_out <= 1e-12
        assert worst_in > 1e-6

    def test_spectator_mode(self):
        one = vs.preset_config("coherent", n_max=5)
        spect = vs.ModeConfig(one.modes[0].omega * 1.01, 0.0, 0.0, 3, "thermal", 0.008)
        two = vs.VConfig(one.omega_g, one.omega_e, one.omega_f, (one.modes[0], spect),
                         t_final=one.t_final, dt=one.t_final / 150)
        a = vs.run_v(dc.replace(one, dt=two.dt))
        b = vs.run_v_two_mode(two)
        assert np.abs(a.rho_m - b.rho_m).max() <= 1e-10

    def test_cap(self):
        cfg = dc.replace(vs.two_mode_config(n_max=3), cap=40)
        with pytest.raises(qc.DimensionError):
            vs.run_v_two_mode(cfg)

    def test_unknown_topology(self):
        with pytest.raises(ValueError):
            vs.two_mode_config(topology="ring")

import dataclasses as dc
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jcsim import molecular as mol
from jcsim import quantum_core as qc
from jcsim.field_states import fock_state, thermal_occupation

SMALL = mol.Grid(3.0, 11.0, 64)
# analytic Morse values, 30-digit mpmath
OMEGA0_EXCITED = 0.00115915329184153096
SPACING_EXCITED_01 = 0.00114338690921098826


def small_cfg(**kw):
    base = dict(grid=SMALL, ground=mol.GROUND, excited=mol.EXCITED, lam=1e-3, field="thermal",
                n_bar=0.0072, n_max=2, dt=1.0, t_final=200.0, sample_every=10)
    base.update(kw)
    return mol.MolConfig(**base)


@pytest.fixture(scope="module")
def preset_short():
    cfg = mol.preset_config("thermal", t_final=5000.0)
    cfg = dc.replace(cfg, snapshot_times=(0.0, 2500.0, 5000.0))
    return cfg, mol.propagate_mixture(cfg, record_excited_blocks=True)


class TestGridSurface:
    def test_grid(self):
        g = mol.preset_grid()
        assert g.n_points == 256 and g.dr == pytest.approx(12 / 256)
        assert g.r[0] == 3.0 and g.r[-1] < 15.0
        assert g.k.shape == (256,) and g.k[1] == pytest.approx(2 * math.pi / 12)

    @pytest.mark.parametrize("n", [32, 100, 65])
    def test_grid_rejects(self, n):
        with pytest.raises(mol.GridError):
            mol.Grid(3.0, 15.0, n)

    def test_table_values(self):
        g = mol.preset_grid()
        assert mol.GROUND(mol.GROUND.r0) == 0.0
        assert mol.EXCITED(mol.EXCITED.r0) == 0.0911267
        assert mol.GROUND(1e4) == pytest.approx(0.0378492, rel=1e-15)
        assert mol.EXCITED(1e4) == pytest.approx(0.0426108 + 0.0911267, rel=1e-15)
        v = mol.morse_eval(mol.EXCITED, g)
        assert v.min() >= 0.0911267
        assert v.min() == pytest.approx(0.0911267, abs=1e-6)

    def test_surface_validation(self):
        with pytest.raises(ValueError):
            mol.MorseSurface(-1.0, 0.3, 5.0, 0.0)

    def test_omega0(self):
        assert mol.EXCITED.omega0 == pytest.approx(OMEGA0_EXCITED, rel=1e-12)
        assert mol.EXCITED.omega0 == pytest.approx(1.159e-3, abs=5e-7)
        # ν_max = ⌊sqrt(2mD)/b − ½⌋ = 73, so 74 bound levels
        assert mol.EXCITED.n_bound == 74


class TestEigensolve:
    @pytest.mark.parametrize("surface", [mol.GROUND, mol.EXCITED])
    def test_analytic(self, surface):
        b = mol.vibrational_eigensolve(surface, mol.preset_grid(), 16)
        ref = surface.analytic_levels(np.arange(16))
        assert np.abs(b.energies - ref).max() <= 1e-6

    def test_spacing(self):
        b = mol.vibrational_eigensolve(mol.EXCITED, mol.preset_grid(), 5)
        gaps = np.diff(b.energies)
        assert gaps[0] == pytest.approx(SPACING_EXCITED_01, abs=1e-9)
        assert np.all(np.abs(gaps / 0.0011 - 1) <= 0.05)

    def test_orthonormal_and_nodes(self):
        b = mol.vibrational_eigensolve(mol.EXCITED, mol.preset_grid(), 15)
        gram = b.functions @ b.functions.T * b.grid.dr
        assert np.abs(gram - np.eye(15)).max() <= 1e-8
        assert np.all(np.diff(b.energies) > 0)
        for nu, f in enumerate(b.functions):
            big = f[np.abs(f) > 1e-6 * np.abs(f).max()]
            assert np.count_nonzero(np.diff(np.sign(big))) == nu

    def test_sign_convention(self):
        b = mol.vibrational_eigensolve(mol.GROUND, mol.preset_grid(), 3)
        assert np.all(b.functions[0] >= -1e-12)

    def test_too_many(self):
        with pytest.raises(ValueError, match="binds"):
            mol.vibrational_eigensolve(mol.EXCITED, mol.preset_grid(), 80)

    def test_grid_too_small(self):
        with pytest.raises(mol.GridError):
            mol.vibrational_eigensolve(mol.EXCITED, mol.Grid(4.5, 7.5, 64), 5)


class TestStepper:
    def test_block_structure(self):
        cfg = small_cfg(lam=2e-4, n_max=3)
        h = mol.potential_block(cfg, 0.09)
        k = 4
        assert h.shape == (64, 8, 8)
        assert np.abs(h - np.swapaxes(h, 1, 2)).max() == 0
        for n in range(1, k):
            np.testing.assert_allclose(h[:, k + n - 1, n], 2e-4 * math.sqrt(n))
        zero = mol.potential_block(dc.replace(cfg, lam=0.0), 0.09)
        assert np.count_nonzero(zero[:, :k, k:]) == 0

    def test_manifold_matches_block(self):
        cfg = small_cfg(n_max=3, lam=3e-4)
        w = 0.0948
        full = mol.potential_block(cfg, w)
        man = mol.manifold_hamiltonian(cfg, w)
        for m in range(1, 4):
            sel = [m, 4 + m - 1]
            np.testing.assert_array_equal(full[:, sel][:, :, sel], man[m])

    def test_factors_unitary(self):
        st_ = mol.build_mol_stepper(small_cfg())
        u = st_.u_full
        eye = np.eye(2)
        assert np.abs(u @ np.swapaxes(u.conj(), -1, -2) - eye).max() <= 1e-13
        assert np.allclose(np.abs(st_.kinetic_phase), 1.0)

    def test_stationary_phase(self):
        cfg = small_cfg(lam=0.0, dt=1.0)
        st_ = mol.build_mol_stepper(cfg, omega=0.0948)
        b = mol.vibrational_eigensolve(mol.EXCITED, SMALL, 3)
        psi = b.vectors[2].astype(complex)
        amps = np.zeros((1, 2, 64), complex)
        amps[0, 1] = psi
        n = 50
        a = mol._apply_potential(amps, st_.u_half[[1]])
        for s in range(n):
            a = mol._apply_kinetic(a, st_.kinetic_phase)
            a = mol._apply_potential(a, st_.u_full[[1]] if s < n - 1 else st_.u_half[[1]])
        e = b.energies[2] + 0.0948 * 0.5
        ov = np.vdot(psi, a[0, 1])
        assert abs(ov) == pytest.approx(1.0, abs=1e-12)
        assert abs(ov - np.exp(-1j * e * n)) <= n * 1e-9


class TestMixture:
    def test_vacuum_stays_ground(self):
        cfg = small_cfg(field="fock", n_bar=0.0, fock_n=0)
        tr = mol.propagate_mixture(cfg)
        assert np.abs(tr.pop_e).max() == 0.0

    def test_thermal_bounds(self, preset_short):
        cfg, tr = preset_short
        p0 = thermal_occupation(cfg.n_bar, cfg.n_max)[0]
        assert tr.pop_e.max() <= 1 - p0
        assert tr.pop_e.max() > 0
        assert np.abs(tr.pop_g + tr.pop_e - 1).max() <= 1e-9
        assert np.all(tr.correlation <= tr.pop_e + 1e-15)
        assert tr.correlation.min() >= -1e-12

    def test_thermal_coherence_and_field(self, preset_short):
        cfg, tr = preset_short
        assert tr.ge_norm.max() <= 1e-12
        assert tr.field_offdiag_max.max() <= 1e-10

    def test_conservation(self, preset_short):
        cfg, tr = preset_short
        assert np.abs(tr.component_norms - 1).max() <= 1e-8
        en = tr.component_energies
        assert np.abs(en - en[0]).max() <= 1e-7
        assert np.ptp(tr.purity_total) <= 1e-8

    def test_excited_blocks(self, preset_short):
        cfg, tr = preset_short
        assert np.abs(tr.snapshots[0]).max() == 0.0
        for blk, pe in zip(tr.excited_blocks, tr.pop_e):
            assert qc.hermiticity_error(blk) <= 1e-15
            assert np.trace(blk).real == pytest.approx(pe, abs=1e-10)
            assert np.real(np.diag(blk)).min() >= -1e-15
        last = tr.snapshots[-1]
        assert np.trace(last).real == pytest.approx(tr.pop_e[-1], abs=1e-10)

    def test_coherent_ge_nonzero(self):
        cfg = mol.preset_config("coherent", t_final=2000.0)
        tr = mol.propagate_mixture(cfg)
        assert tr.ge_norm.max() > 1e-6
        assert np.abs(tr.component_norms - 1).max() <= 1e-8

    def test_mixture_block(self):
        cfg = small_cfg(field="coherent", n_bar=0.5, lam=5e-3, t_final=50.0)
        fld = cfg.build_field(on_leakage="ignore")
        tr = mol.propagate_mixture(cfg, fld=fld)
        assert np.ptp(tr.purity_total) <= 1e-12
        assert tr.purity_total[0] == pytest.approx(1.0)

    def test_resonant_eigenstate(self):
        cfg = mol.preset_config("fock", t_final=20000.0)
        cfg = dc.replace(cfg, n_bar=1.0, fock_n=1, midpoint_levels=(3, 3), snapshot_times=(20000.0,))
        tr = mol.propagate_mixture(cfg)
        b = mol.vibrational_eigensolve(cfg.excited, cfg.grid, 15)
        ee = tr.snapshots[-1]
        w = np.real(np.diag(b.vectors.conj() @ ee @ b.vectors.T)) / np.trace(ee).real
        assert np.argmax(w) == 3
        assert w[3] >= 0.95

    def test_deterministic(self):
        cfg = small_cfg(t_final=60.0)
        a = mol.propagate_mixture(cfg, record_excited_blocks=True)
        b = mol.propagate_mixture(cfg, record_excited_blocks=True)
        assert a.excited_blocks.tobytes() == b.excited_blocks.tobytes()

    def test_threaded_components_match_serial(self):
        cfg = small_cfg(t_final=60.0)
        a = mol.propagate_mixture(cfg, record_excited_blocks=True)
        b = mol.propagate_mixture(cfg, record_excited_blocks=True, workers=4)
        assert a.excited_blocks.tobytes() == b.excited_blocks.tobytes()
        assert a.pop_e.tobytes() == b.pop_e.tobytes()

    def test_eigh_decomposition_path(self):
        # a non-diagonal mixed field goes through the eigendecomposition branch
        from jcsim.field_states import custom_state
        m = np.diag([0.7, 0.2, 0.1]).astype(complex)
        m[0, 1] = m[1, 0] = 0.05
        cfg = small_cfg(t_final=40.0, lam=5e-3)
        fld = custom_state(m)
        mix = mol.propagate_mixture(cfg, fld, record_excited_blocks=True)
        dense = mol.propagate_dense(cfg, fld)
        assert np.abs(mix.excited_blocks - dense.excited_blocks).max() <= 1e-12
        assert len(mix.metadata["weights"]) == 3

    def test_snapshot_bounds(self):
        with pytest.raises(ValueError, match="snapshot"):
            small_cfg(snapshot_times=(500.0,))


class TestDense:
    @pytest.mark.parametrize("field", ["thermal", "fock"])
    def test_matches_mixture(self, field):
        cfg = small_cfg(field=field, n_bar=1.0 if field == "fock" else 0.0072, fock_n=1)
        d = mol.propagate_dense(cfg)
        m = mol.propagate_mixture(cfg, record_excited_blocks=True)
        assert np.abs(d.excited_blocks - m.excited_blocks).max() <= 1e-9
        assert d.trace_error.max() <= 1e-8
        assert d.hermiticity_error.max() <= 1e-8
        np.testing.assert_allclose(d.pop_e, m.pop_e, atol=1e-12)
        np.testing.assert_allclose(d.correlation, m.correlation, atol=1e-12)

    def test_identity_at_zero(self):
        cfg = small_cfg(t_final=10.0)
        d = mol.propagate_dense(cfg)
        assert np.abs(d.excited_blocks[0]).max() == 0
        assert d.pop_g[0] == pytest.approx(1.0)

    def test_uncoupled(self):
        d = mol.propagate_dense(small_cfg(lam=0.0, t_final=100.0))
        assert np.abs(d.pop_e).max() == 0
        assert d.ge_max.max() == 0

    def test_cap(self):
        with pytest.raises(qc.DimensionError):
            mol.propagate_dense(small_cfg(cap=100))

    def test_excited_block_dispatch(self):
        cfg = small_cfg()
        psi = mol.vibrational_eigensolve(mol.GROUND, SMALL, 1).vectors[0]
        rho = mol.dense_initial_state(cfg, psi, fock_state(1, 2))
        assert mol.excited_block(rho).shape == (64, 64)
        with pytest.raises(TypeError):
            mol.excited_block(np.eye(3))


class TestPreset:
    def test_values(self):
        cfg = mol.preset_config()
        assert cfg.lam == 1e-4 and cfg.n_bar == 0.0072 and cfg.n_fock == 7
        assert cfg.grid == mol.Grid(3.0, 15.0, 256)
        w = mol.resolve_omega(cfg)
        eb = mol.vibrational_eigensolve(cfg.excited, cfg.grid, 5)
        gb = mol.vibrational_eigensolve(cfg.ground, cfg.grid, 1)
        assert w == pytest.approx(0.5 * (eb.energies[3] + eb.energies[4]) - gb.energies[0])
        assert w == pytest.approx(0.0948, abs=1e-4)

    @given(st.floats(0.05, 0.15))
    def test_explicit_omega(self, w):
        cfg = dc.replace(small_cfg(), omega_field=w)
        assert mol.resolve_omega(cfg) == w

import dataclasses as dc
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jcsim import molecular as mol
from jcsim import observables as obs
from jcsim import quantum_core as qc
from jcsim.field_states import thermal_state

PURITY_THERMAL_0008 = 0.984251968503937007876   # (1 - r)/(1 + r), r = n̄/(1 + n̄)


@pytest.fixture(scope="module")
def setup():
    cfg = mol.preset_config("thermal", t_final=20000.0)
    cfg = dc.replace(cfg, snapshot_times=(5000.0, 20000.0))
    tr = mol.propagate_mixture(cfg)
    basis = mol.vibrational_eigensolve(cfg.excited, cfg.grid, 35)
    return cfg, tr, basis


class TestPurity:
    def test_examples(self):
        assert obs.purity(qc.DensityMatrix.projector(2, 5)) == 1.0
        assert obs.purity(qc.DensityMatrix.maximally_mixed(7)) == pytest.approx(1 / 7)
        assert obs.purity(thermal_state(0.008, 9).density()) == pytest.approx(PURITY_THERMAL_0008, rel=1e-12)


class TestProjection:
    def test_eigenstate(self, setup):
        cfg, tr, b = setup
        v = b.vectors[3]
        p = obs.vibrational_projection(np.outer(v, v), b, 15)
        expect = np.zeros((15, 15))
        expect[3, 3] = 1
        assert np.abs(p - expect).max() <= 1e-12

    def test_zero(self, setup):
        cfg, tr, b = setup
        assert np.abs(obs.vibrational_projection(np.zeros((256, 256)), b)).max() == 0

    def test_shape_errors(self, setup):
        cfg, tr, b = setup
        with pytest.raises(ValueError):
            obs.vibrational_projection(np.zeros((64, 64)), b)
        with pytest.raises(ValueError):
            obs.vibrational_projection(np.zeros((256, 256)), b, 36)

    def test_thermal_preset_structure(self, setup):
        cfg, tr, b = setup
        for blk in tr.snapshots:
            p = obs.vibrational_projection(blk, b, 15)
            te = np.trace(blk).real
            assert qc.hermiticity_error(p) <= 1e-15
            assert np.trace(p).real <= te + 1e-9
            assert te - np.trace(p).real <= 1e-3 * te
            w = np.real(np.diag(p))
            assert set(np.argsort(w)[-2:]) == {3, 4}
            assert abs(p[3, 4]) > 0.1 * te

    def test_completeness(self, setup):
        cfg, tr, b = setup
        blk = tr.snapshots[-1]
        te = np.trace(blk).real
        deficits = [te - np.trace(obs.vibrational_projection(blk, b, c)).real for c in (5, 15, 35)]
        assert deficits[0] >= deficits[1] >= deficits[2] >= -1e-15


class TestCorrelation:
    def test_properties(self, setup):
        cfg, tr, b = setup
        c = obs.correlation_function(tr)
        assert c[0] == 0
        assert c.min() >= -1e-12
        assert np.all(c <= tr.pop_e + 1e-15)

    def test_from_block(self, setup):
        cfg, tr, b = setup
        psi = mol.vibrational_eigensolve(cfg.ground, cfg.grid, 1).vectors[0]
        k = int(round(tr.snapshot_times[-1] / (cfg.dt * cfg.sample_every)))
        assert obs.correlation_from_block(tr.snapshots[-1], psi) == pytest.approx(tr.correlation[k], rel=1e-10)

    def test_vacuum(self):
        cfg = dc.replace(mol.preset_config("fock", t_final=500.0), fock_n=0, n_bar=0.0)
        tr = mol.propagate_mixture(cfg)
        assert np.all(obs.correlation_function(tr) == 0)


class TestSpectrum:
    def test_constant(self):
        s = obs.spectrum(np.ones(256), dt=1.0)
        w, a = s.positive()
        assert a.argmax() == 0
        assert np.abs(a[1:]).max() <= 1e-10
        assert obs.find_peaks(s)[0].size == 0
        assert obs.find_peaks(s, include_dc=True)[0][0] == 0

    @given(st.integers(5, 100), st.sampled_from(["none", "hann"]))
    def test_cosine_peak(self, m, window):
        n, dt = 1024, 0.7
        w0 = 2 * math.pi * (m + 0.3) / (n * dt)
        t = dt * np.arange(n)
        s = obs.spectrum(np.cos(w0 * t), times=t, window=window)
        peaks, _ = obs.find_peaks(s)
        assert abs(peaks[0] - w0) <= s.resolution

    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 10))
    def test_parseval(self, seed, dt):
        c = np.random.default_rng(seed).normal(size=300)
        s = obs.spectrum(c, dt=dt)
        lhs = np.sum(np.abs(c) ** 2) * dt
        rhs = np.sum(s.amplitude ** 2) * s.resolution / (2 * math.pi)
        assert rhs == pytest.approx(lhs, rel=1e-8)

    def test_axis_and_signs(self):
        s = obs.spectrum(np.random.default_rng(1).normal(size=129), dt=2.0)
        assert np.all(np.diff(s.omega) > 0)
        assert np.all(s.amplitude >= 0)
        assert s.resolution == pytest.approx(2 * math.pi / (129 * 2.0))

    def test_positive_frequency_convention(self):
        # e^{+iωt} kernel: e^{-iw0 t} maps to +w0
        n, dt = 512, 1.0
        w0 = 2 * math.pi * 40 / (n * dt)
        t = dt * np.arange(n)
        s = obs.spectrum(np.exp(-1j * w0 * t), dt=dt)
        assert s.omega[s.amplitude.argmax()] == pytest.approx(w0)

    def test_errors(self):
        with pytest.raises(ValueError, match="uniform"):
            obs.spectrum(np.ones(4), times=[0, 1, 2, 4])
        with pytest.raises(ValueError):
            obs.spectrum(np.ones(4))
        with pytest.raises(ValueError):
            obs.spectrum(np.ones(4), dt=1.0, window="kaiser")

    def test_subtract_mean(self):
        s = obs.spectrum(3 + np.cos(0.5 * np.arange(200)), dt=1.0, subtract_mean=True)
        w, a = s.positive()
        assert a[0] <= 1e-10

    def test_harmonic_order(self):
        assert obs.harmonic_order(0.0022, 0.0011) == 2
        assert obs.harmonic_order(0.0001, 0.0011) == 1

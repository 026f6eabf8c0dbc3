"""Quantities derived from simulator output: purity, vibrational projections,
the excited-state correlation function and its spectrum."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks as _find_peaks

from . import quantum_core as qc
from .molecular import MolTrajectory, VibrationalBasis


def purity(rho) -> float:
    return qc.purity(rho)


def vibrational_projection(rho_ee: np.ndarray, basis: VibrationalBasis,
                           count: int = 15) -> np.ndarray:
    """P_νμ = ⟨ψ_ν|ρ_ee|ψ_μ⟩ for the first ``count`` basis states.

    ``rho_ee`` is a coordinate matrix in unit-vector normalization (its plain
    trace is the excited population); the basis functions carry the dr weight.
    """
    if count > len(basis):
        raise ValueError(f"basis holds {len(basis)} states, {count} requested")
    rho_ee = np.asarray(rho_ee)
    n = basis.grid.n_points
    if rho_ee.shape != (n, n):
        raise ValueError(f"rho_ee shape {rho_ee.shape} does not match grid of {n} points")
    v = basis.vectors[:count]
    return v.conj() @ rho_ee @ v.T


def correlation_function(traj: MolTrajectory) -> np.ndarray:
    """C(t) = ⟨ψ_g0|ρ_ee(t)|ψ_g0⟩ as recorded along a molecular run."""
    return np.asarray(traj.correlation)


def correlation_from_block(rho_ee: np.ndarray, psi_g0: np.ndarray) -> float:
    return float(np.real(psi_g0.conj() @ rho_ee @ psi_g0))


@dataclass(frozen=True)
class Spectrum:
    omega: np.ndarray
    amplitude: np.ndarray
    window: str
    resolution: float

    def positive(self) -> tuple[np.ndarray, np.ndarray]:
        sel = self.omega >= 0
        return self.omega[sel], self.amplitude[sel]


def spectrum(c, dt: float | None = None, times=None, window: str = "none",
             subtract_mean: bool = False) -> Spectrum:
    """Magnitude of σ(ω) = Σ_j C(t_j) e^{iωt_j} dt on the fftshift-ordered axis.

    With the rectangular window this normalization satisfies
    Σ|C|² dt = Σ|σ|² dω / 2π.
    """
    c = np.asarray(c, dtype=complex)
    if times is not None:
        times = np.asarray(times, dtype=float)
        steps = np.diff(times)
        if steps.size and np.ptp(steps) > 1e-9 * max(abs(steps).max(), 1.0):
            raise ValueError("spectrum requires uniform time sampling")
        dt = float(steps.mean()) if steps.size else 1.0
    if dt is None:
        raise ValueError("pass dt or times")
    if subtract_mean:
        c = c - c.mean()
    if window == "hann":
        c = c * np.hanning(c.size)
    elif window != "none":
        raise ValueError(f"unknown window {window!r}")
    n = c.size
    # e^{+iωt}: inverse transform times n
    amp = np.abs(np.fft.fftshift(np.fft.ifft(c))) * n * dt
    omega = np.fft.fftshift(2 * np.pi * np.fft.fftfreq(n, dt))
    return Spectrum(omega, amp, window, 2 * np.pi / (n * dt))


def find_peaks(s: Spectrum, threshold: float = 0.0, include_dc: bool = False):
    """Local maxima of the non-negative half, strongest first: (omegas, heights)."""
    w, a = s.positive()
    # pad so a maximum at ω = 0 is also reported
    padded = np.concatenate(([-np.inf], a))
    idx, _ = _find_peaks(padded, height=threshold)
    idx = idx - 1
    if not include_dc:
        idx = idx[w[idx] > 0]
    order = np.argsort(a[idx])[::-1]
    idx = idx[order]
    return w[idx], a[idx]


def harmonic_order(omega: float, base: float) -> int:
    return max(1, int(round(omega / base)))

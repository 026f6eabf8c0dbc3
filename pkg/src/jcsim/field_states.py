"""Photon-mode states in a truncated Fock basis.

All constructors renormalize after truncation so the resulting matrices are
exact unit-trace density matrices; the discarded weight is kept on the
state as ``leakage``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import quantum_core as qc
from .units import KB_HARTREE_PER_K, nm_to_hartree

LEAKAGE_TOL = 1e-6
KINDS = ("thermal", "coherent", "fock", "cat", "custom")


class TruncationError(ValueError):
    pass


class TruncationWarning(UserWarning):
    pass


class PlanckUnderflowWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FieldState:
    n_max: int
    matrix: np.ndarray = field(repr=False)
    n_bar: float
    kind: str
    alpha: complex | None = None
    leakage: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if m.shape != (self.n_max + 1, self.n_max + 1):
            raise ValueError(f"matrix shape {m.shape} inconsistent with n_max={self.n_max}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def density(self) -> qc.DensityMatrix:
        return qc.DensityMatrix(qc.HilbertLayout((self.dim,)), self.matrix)

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()

    def mean_photon_number(self) -> float:
        return float(np.dot(np.arange(self.dim), self.populations()))

    def purity(self) -> float:
        return qc.purity(self.matrix)


def _check_leakage(leak, what, on_leakage):
    if leak <= LEAKAGE_TOL or on_leakage == "ignore":
        return
    msg = f"{what}: truncation discards weight {leak:.3e} (> {LEAKAGE_TOL:g})"
    if on_leakage == "raise":
        raise TruncationError(msg)
    warnings.warn(msg, TruncationWarning, stacklevel=3)


def thermal_occupation(n_bar: float, n_max: int, normalize: bool = True) -> np.ndarray:
    """Bose-Einstein Fock populations n̄^n / (1 + n̄)^(n+1) for n = 0..n_max."""
    if n_bar < 0:
        raise ValueError(f"n_bar must be >= 0, got {n_bar}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    n = np.arange(n_max + 1)
    if n_bar == 0:
        p = (n == 0).astype(float)
    else:
        # log form keeps large n̄ and n finite
        p = np.exp(n * math.log(n_bar) - (n + 1) * math.log1p(n_bar))
    return p / p.sum() if normalize else p


def thermal_tail(n_bar: float, n_max: int) -> float:
    """Weight beyond n_max in the untruncated thermal distribution."""
    return (n_bar / (1.0 + n_bar)) ** (n_max + 1)


def thermal_state(n_bar: float, n_max: int, on_leakage: str = "warn") -> FieldState:
    leak = thermal_tail(n_bar, n_max)
    _check_leakage(leak, f"thermal(n_bar={n_bar}, n_max={n_max})", on_leakage)
    p = thermal_occupation(n_bar, n_max)
    return FieldState(n_max, np.diag(p).astype(complex), float(n_bar), "thermal", leakage=leak)


def coherent_amplitudes(alpha: complex, n_max: int, normalize: bool = False,
                        on_leakage: str = "warn") -> np.ndarray:
    """Fock amplitudes exp(-|α|²/2) α^n / sqrt(n!), optionally renormalized."""
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    alpha = complex(alpha)
    c = np.empty(n_max + 1, dtype=np.complex128)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    leak = max(0.0, 1.0 - float(np.vdot(c, c).real))
    _check_leakage(leak, f"coherent(alpha={alpha}, n_max={n_max})", on_leakage)
    return c / np.linalg.norm(c) if normalize else c


def coherent_state(alpha: complex, n_max: int, on_leakage: str = "warn") -> FieldState:
    c = coherent_amplitudes(alpha, n_max, on_leakage=on_leakage)
    leak = max(0.0, 1.0 - float(np.vdot(c, c).real))
    c = c / np.linalg.norm(c)
    return FieldState(n_max, np.outer(c, c.conj()), abs(complex(alpha)) ** 2, "coherent",
                      alpha=complex(alpha), leakage=leak)


def fock_state(n: int, n_max: int) -> FieldState:
    if not 0 <= n <= n_max:
        raise ValueError(f"Fock level {n} outside 0..{n_max}")
    m = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    m[n, n] = 1.0
    return FieldState(n_max, m, float(n), "fock")


def cat_amplitudes(alpha: complex, n_max: int, on_leakage: str = "warn") -> np.ndarray:
    """Normalized amplitudes of the even cat |α⟩ + |−α⟩ in the truncated basis."""
    c = coherent_amplitudes(alpha, n_max, on_leakage=on_leakage)
    c[1::2] = 0.0
    return c / np.linalg.norm(c)


def cat_state(alpha: complex, n_max: int, on_leakage: str = "warn") -> FieldState:
    c = cat_amplitudes(alpha, n_max, on_leakage=on_leakage)
    a2 = abs(complex(alpha)) ** 2
    # mean photon number of the untruncated even cat
    n_bar = a2 * math.tanh(a2) if a2 > 0 else 0.0
    full = coherent_amplitudes(alpha, n_max, on_leakage="ignore")
    full[1::2] = 0.0
    norm_full = math.cosh(a2) * math.exp(-a2) if a2 > 0 else 1.0
    leak = max(0.0, 1.0 - float(np.vdot(full, full).real) / norm_full)
    return FieldState(n_max, np.outer(c, c.conj()), n_bar, "cat", alpha=complex(alpha),
                      leakage=leak)


def custom_state(matrix) -> FieldState:
    m = np.asarray(matrix, dtype=complex)
    m = m / np.trace(m)
    rho = qc.DensityMatrix(qc.HilbertLayout((m.shape[0],)), m, check_psd=True)
    n_bar = float(np.dot(np.arange(m.shape[0]), np.real(np.diag(rho.data))))
    return FieldState(m.shape[0] - 1, rho.data, n_bar, "custom")


def planck_mean_occupation(wavelength_nm: float, temperature_K: float) -> float:
    """Mean photon number 1/(exp(E/kT) - 1) of a mode at the given wavelength.

    Returns 0.0 with a :class:`PlanckUnderflowWarning` once E/kT > 700.
    """
    if wavelength_nm <= 0 or temperature_K <= 0:
        raise ValueError("wavelength and temperature must be positive")
    x = nm_to_hartree(wavelength_nm) / (temperature_K * KB_HARTREE_PER_K)
    if x > 700:
        warnings.warn(f"E/kT = {x:.1f} > 700; occupation underflows to 0",
                      PlanckUnderflowWarning, stacklevel=2)
        return 0.0
    return 1.0 / math.expm1(x)


def two_mode_product(a: FieldState, b: FieldState, cap: int | None = None) -> qc.DensityMatrix:
    return qc.kron(a.density(), b.density(), cap=cap)


def make_field(kind: str, n_max: int, n_bar: float = 0.0, phase: float = 0.0,
               fock_n: int | None = None, on_leakage: str = "warn") -> FieldState:
    """Build a field from a config-style description.

    ``coherent`` and ``cat`` use α = sqrt(n̄)·exp(i·phase) (for the cat n̄ sets |α|²).
    """
    if n_bar < 0:
        raise ValueError(f"n_bar must be >= 0, got {n_bar}")
    if kind == "thermal":
        return thermal_state(n_bar, n_max, on_leakage)
    alpha = math.sqrt(n_bar) * complex(math.cos(phase), math.sin(phase))
    if kind == "coherent":
        return coherent_state(alpha, n_max, on_leakage)
    if kind == "cat":
        return cat_state(alpha, n_max, on_leakage)
    if kind == "fock":
        return fock_state(int(n_bar) if fock_n is None else fock_n, n_max)
    raise ValueError(f"field kind {kind!r} cannot be built from a description")

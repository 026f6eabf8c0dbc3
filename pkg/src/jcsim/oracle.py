"""Closed-form V-system dynamics for the fully resonant case ω = ω_e = ω_f.

Matter starts in |g⟩ and both transitions share one coupling λ. In that case
the interaction-picture propagator acts on a Fock state |n⟩ through a few
scalar functions of sqrt(2n)·λt, and the reduced coherences become short
series over the photon distribution. Series are truncated at the same n_max
as the numerical model, so both describe the identical truncated space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field_states import thermal_occupation


@dataclass(frozen=True)
class OracleParams:
    lam: float
    n_bar: float
    n_terms: int
    alpha: complex | None = None

    def __post_init__(self):
        if self.n_terms < 1:
            raise ValueError("n_terms must be >= 1")
        if self.n_bar < 0:
            raise ValueError("n_bar must be >= 0")

    @property
    def coherent_alpha(self) -> complex:
        return complex(math.sqrt(self.n_bar)) if self.alpha is None else complex(self.alpha)


@dataclass(frozen=True)
class PropagatorElements:
    C_f: complex
    C_fe: complex
    S_fg: complex
    S_gf: complex
    C_g: complex


def propagator_elements(n: int, lam: float, t: float) -> PropagatorElements:
    """Scalars multiplying |n⟩, |n⟩, |n−1⟩, |n+1⟩, |n⟩ when each operator acts on |n⟩."""
    if n < 0:
        raise ValueError("n must be >= 0")
    up = math.sqrt(2 * (n + 1)) * lam * t
    dn = math.sqrt(2 * n) * lam * t
    return PropagatorElements(
        C_f=0.5 * (math.cos(up) + 1.0),
        C_fe=0.5 * (math.cos(up) - 1.0),
        S_fg=-1j / math.sqrt(2) * math.sin(dn),
        S_gf=-1j / math.sqrt(2) * math.sin(up),
        C_g=math.cos(dn),
    )


def _sin2(lam, t, n):
    t = np.asarray(t, dtype=float)
    return np.sin(np.sqrt(2.0 * n)[:, None] * lam * t.ravel()[None, :]) ** 2


def _shape(res, t):
    return res.reshape(np.shape(t)) if np.ndim(t) else res[0]


def thermal_weights(p: OracleParams) -> np.ndarray:
    return thermal_occupation(p.n_bar, p.n_terms - 1)


def poisson_weights(p: OracleParams, normalize: bool = True) -> np.ndarray:
    n = np.arange(p.n_terms)
    a2 = abs(p.coherent_alpha) ** 2
    w = np.exp(-a2) * np.array([a2 ** k / math.factorial(k) for k in n])
    return w / w.sum() if normalize else w


def coherence_fe_thermal(p: OracleParams, t):
    """½ Σ_n p_n sin²(sqrt(2n) λt)."""
    n = np.arange(p.n_terms)
    res = 0.5 * thermal_weights(p) @ _sin2(p.lam, t, n)
    return _shape(res, t)


def coherence_fe_coherent(p: OracleParams, t, normalize: bool = True):
    """½ e^{−n̄} Σ_n n̄^n/n! sin²(sqrt(2n) λt) with Poisson weights in |α|²."""
    n = np.arange(p.n_terms)
    res = 0.5 * poisson_weights(p, normalize) @ _sin2(p.lam, t, n)
    return _shape(res, t)


def coherence_fe_coherent_series(p: OracleParams, t):
    """Same quantity written as ½ e^{−|α|²} Σ |α|^{2n}/n! sin²(...), unnormalized."""
    a = p.coherent_alpha
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    acc = np.zeros(tt.shape)
    for n in range(p.n_terms):
        acc += abs(a) ** (2 * n) / math.factorial(n) * np.sin(math.sqrt(2 * n) * p.lam * tt) ** 2
    res = 0.5 * math.exp(-abs(a) ** 2) * acc
    return res.reshape(np.shape(t)) if np.ndim(t) else res[0]


def coherence_gf_coherent(p: OracleParams, t, normalize: bool = True):
    """⟨g|ρ_M|f⟩ for a coherent field (interaction picture).

    (i/√2) Σ_n c_n c*_{n+1} sin(sqrt(2(n+1)) λt) cos(sqrt(2n) λt), with c_n
    the coherent amplitudes. The sum stops at n = n_terms − 2 so that n+1
    stays inside the truncated basis.
    """
    a = p.coherent_alpha
    c = np.empty(p.n_terms, dtype=complex)
    c[0] = math.exp(-0.5 * abs(a) ** 2)
    for n in range(1, p.n_terms):
        c[n] = c[n - 1] * a / math.sqrt(n)
    if normalize:
        c /= np.linalg.norm(c)
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    n = np.arange(p.n_terms - 1)
    wt = p.lam * tt[None, :]
    terms = (c[:-1] * c[1:].conj())[:, None] * np.sin(np.sqrt(2.0 * (n + 1))[:, None] * wt) \
        * np.cos(np.sqrt(2.0 * n)[:, None] * wt)
    res = 1j / math.sqrt(2) * terms.sum(axis=0)
    return res.reshape(np.shape(t)) if np.ndim(t) else res[0]


def coherence_gf_thermal(p: OracleParams, t):
    """Identically zero: a Fock mixture carries no g-f phase."""
    return np.zeros(np.shape(t), dtype=complex) if np.ndim(t) else 0j


def field_diagonal_thermal(p: OracleParams, t) -> np.ndarray:
    """Fock populations of the field under thermal driving, shape (..., n_terms).

    Level n loses p_n sin²(sqrt(2n) λt) and level n−1 gains the same amount.
    """
    pn = thermal_weights(p)
    n = np.arange(p.n_terms)
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    s2 = _sin2(p.lam, tt, n).T
    moved = pn[None, :] * s2
    out = pn[None, :] - moved
    out[:, :-1] += moved[:, 1:]
    return out.reshape(np.shape(t) + (p.n_terms,))

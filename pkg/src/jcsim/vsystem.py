"""Three-level V system (g, e, f) coupled to one or two quantized modes.

The matter basis is ordered (g, e, f); the composite layout is
matter ⊗ mode_1 [⊗ mode_2]. Propagation is exact: the time-independent
Hamiltonian is diagonalized once and every sample time is reached directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import quantum_core as qc
from .field_states import FieldState, make_field
from .units import cm1_to_hartree, nm_to_hartree

G, E, F = 0, 1, 2
LEVELS = ("g", "e", "f")

SPLITTING_CM1 = 250.0
PRESET_WAVELENGTH_NM = 495.9
PRESET_LAMBDA = 1e-4
PRESET_NBAR = 0.008
PRESET_NMAX = 9
SAMPLES_PER_PERIOD = 50


@dataclass(frozen=True)
class ModeConfig:
    omega: float
    lambda_e: float
    lambda_f: float
    n_max: int
    field: str = "thermal"
    n_bar: float = 0.0
    phase: float = 0.0
    fock_n: int | None = None

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"mode omega must be positive, got {self.omega}")
        if self.lambda_e < 0 or self.lambda_f < 0:
            raise ValueError("coupling constants must be >= 0")
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max}")
        if self.n_bar < 0:
            raise ValueError(f"n_bar must be >= 0, got {self.n_bar}")

    def build_field(self, on_leakage: str = "warn") -> FieldState:
        return make_field(self.field, self.n_max, self.n_bar, self.phase, self.fock_n,
                          on_leakage=on_leakage)


@dataclass(frozen=True)
class VConfig:
    omega_g: float
    omega_e: float
    omega_f: float
    modes: tuple[ModeConfig, ...]
    t_final: float
    dt: float | None = None
    cap: int = qc.DEFAULT_DIM_CAP

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.omega_g < self.omega_e <= self.omega_f:
            raise ValueError("level ordering requires omega_g < omega_e <= omega_f")
        if not 1 <= len(self.modes) <= 2:
            raise ValueError("one or two field modes are supported")
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")

    @property
    def layout(self) -> qc.HilbertLayout:
        return qc.HilbertLayout((3,) + tuple(m.n_max + 1 for m in self.modes))

    @property
    def level_energies(self) -> np.ndarray:
        return np.array([self.omega_g, self.omega_e, self.omega_f])


@dataclass
class VTrajectory:
    """Sampled reduced observables of a V-system run.

    ``rho_m[k]`` is the 3x3 matter matrix at ``times[k]`` in the (g, e, f)
    basis; ``rho_m[:, F, E]`` is the excited-state coherence ⟨f|ρ|e⟩.
    """

    times: np.ndarray
    rho_m: np.ndarray
    field_diag: np.ndarray
    field_offdiag_max: np.ndarray
    purity_m: np.ndarray
    purity_f: np.ndarray
    trace_m: np.ndarray
    trace_f: np.ndarray
    purity_total: np.ndarray
    hermiticity_error: np.ndarray
    excitation_blocks: np.ndarray
    min_eigenvalue: np.ndarray | None = None
    states: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def rho_gg(self):
        return self.rho_m[:, G, G].real

    @property
    def rho_ee(self):
        return self.rho_m[:, E, E].real

    @property
    def rho_ff(self):
        return self.rho_m[:, F, F].real

    @property
    def rho_fe(self):
        return self.rho_m[:, F, E]

    @property
    def rho_ge(self):
        return self.rho_m[:, G, E]

    @property
    def rho_gf(self):
        return self.rho_m[:, G, F]


def _annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def _embed(ops: list[np.ndarray]) -> np.ndarray:
    out = ops[0]
    for o in ops[1:]:
        out = np.kron(out, o)
    return out


def build_v_hamiltonian(cfg: VConfig) -> np.ndarray:
    """H = Σ ω_i|i⟩⟨i| + Σ_k ω_k(a_k†a_k + ½) + Σ_{i,k} λ_ik(|i⟩⟨g| a_k + h.c.)."""
    layout = cfg.layout
    qc.check_cap(layout.total, cfg.cap)
    dims = layout.dims
    eyes = [np.eye(d) for d in dims]
    h = _embed([np.diag(cfg.level_energies).astype(complex)] + eyes[1:])
    for k, mode in enumerate(cfg.modes):
        a = _annihilation(dims[k + 1])
        num = a.conj().T @ a
        ops = [eyes[0]] + eyes[1:]
        ops[k + 1] = num + 0.5 * np.eye(dims[k + 1])
        h = h + mode.omega * _embed(ops)
        for level, lam in ((E, mode.lambda_e), (F, mode.lambda_f)):
            if lam == 0:
                continue
            sigma = np.zeros((3, 3), dtype=complex)
            sigma[level, G] = 1.0
            ops = [sigma] + eyes[1:]
            ops[k + 1] = a
            term = _embed(ops)
            h = h + lam * (term + term.conj().T)
    return h


def excitation_number(cfg: VConfig) -> np.ndarray:
    """Diagonal of N = |e⟩⟨e| + |f⟩⟨f| + Σ_k a_k†a_k over the composite basis."""
    idx = np.indices(cfg.layout.dims).reshape(len(cfg.layout), -1)
    return (idx[0] != G).astype(int) + idx[1:].sum(axis=0)


def rabi_period(cfg: VConfig) -> float:
    """2π over the smallest eigen-gap of the one-excitation manifold."""
    h = build_v_hamiltonian(cfg)
    sel = np.flatnonzero(excitation_number(cfg) == 1)
    ev = np.linalg.eigvalsh(h[np.ix_(sel, sel)])
    gaps = np.diff(ev)
    gaps = gaps[gaps > 1e-12 * max(1.0, np.abs(ev).max())]
    if gaps.size == 0:
        raise ValueError("one-excitation manifold is degenerate (no coupling?)")
    return 2 * math.pi / gaps.min()


def initial_state(cfg: VConfig, fields: list[FieldState] | None = None,
                  on_leakage: str = "warn") -> qc.DensityMatrix:
    if fields is None:
        fields = [m.build_field(on_leakage) for m in cfg.modes]
    if len(fields) != len(cfg.modes):
        raise ValueError("one FieldState per mode required")
    rho = qc.DensityMatrix.projector(G, 3)
    for f in fields:
        rho = qc.kron(rho, f.density(), cap=cfg.cap)
    if rho.layout != cfg.layout:
        raise qc.LayoutMismatch(f"field dimensions {rho.dims} do not match config {cfg.layout.dims}")
    return rho


def sample_times(cfg: VConfig) -> np.ndarray:
    dt = cfg.dt if cfg.dt is not None else rabi_period(cfg) / SAMPLES_PER_PERIOD
    n = int(math.floor(cfg.t_final / dt + 1e-9))
    return dt * np.arange(n + 1)


def _run(cfg: VConfig, fields, keep_states, check_psd, chunk=64) -> VTrajectory:
    rho0 = initial_state(cfg, fields)
    prop = qc.diagonalize(build_v_hamiltonian(cfg), cfg.layout)
    times = sample_times(cfg)
    dims = cfg.layout.dims
    nexc = excitation_number(cfg)
    blocks = np.unique(nexc)
    photon = list(range(1, len(dims)))

    nt = len(times)
    kf = int(np.prod(dims[1:]))
    out = dict(
        rho_m=np.empty((nt, 3, 3), complex), field_diag=np.empty((nt, kf)),
        field_offdiag_max=np.empty(nt), purity_m=np.empty(nt), purity_f=np.empty(nt),
        trace_m=np.empty(nt), trace_f=np.empty(nt), purity_total=np.empty(nt),
        hermiticity_error=np.empty(nt), excitation_blocks=np.empty((nt, blocks.size)),
    )
    min_eig = np.empty(nt) if check_psd else None
    states = np.empty((nt,) + rho0.data.shape, complex) if keep_states else None
    for start in range(0, nt, chunk):
        stack = qc.evolve_many(rho0, prop, times[start:start + chunk])
        for j, rho in enumerate(stack):
            k = start + j
            rm = qc.partial_trace_array(rho, dims, [0])
            rf = qc.partial_trace_array(rho, dims, photon)
            out["rho_m"][k] = rm
            fd = np.diag(rf)
            out["field_diag"][k] = fd.real
            off = rf - np.diag(fd)
            out["field_offdiag_max"][k] = np.abs(off).max() if off.size else 0.0
            out["purity_m"][k] = qc.purity(rm)
            out["purity_f"][k] = qc.purity(rf)
            out["trace_m"][k] = np.trace(rm).real
            out["trace_f"][k] = np.trace(rf).real
            out["purity_total"][k] = qc.purity(rho)
            out["hermiticity_error"][k] = qc.hermiticity_error(rho)
            d = np.diag(rho).real
            out["excitation_blocks"][k] = [d[nexc == b].sum() for b in blocks]
            if check_psd:
                min_eig[k] = np.linalg.eigvalsh(rho).min()
            if keep_states:
                states[k] = rho
    meta = {
        "n_modes": len(cfg.modes),
        "layout": list(dims),
        "excitation_block_labels": blocks.tolist(),
        "coherent_phases": [m.phase for m in cfg.modes if m.field in ("coherent", "cat")],
    }
    return VTrajectory(times=times, min_eigenvalue=min_eig, states=states, metadata=meta, **out)


def run_v(cfg: VConfig, fields: list[FieldState] | None = None, keep_states: bool = False,
          check_psd: bool = False) -> VTrajectory:
    if len(cfg.modes) != 1:
        raise ValueError("run_v expects a single-mode config; use run_v_two_mode")
    return _run(cfg, fields, keep_states, check_psd)


def run_v_two_mode(cfg: VConfig, fields: list[FieldState] | None = None,
                   keep_states: bool = False, check_psd: bool = False) -> VTrajectory:
    if len(cfg.modes) != 2:
        raise ValueError("run_v_two_mode expects two modes")
    return _run(cfg, fields, keep_states, check_psd)


def interaction_picture(traj: VTrajectory, cfg: VConfig) -> np.ndarray:
    """Matter matrices rotated out of the free evolution: ρ_ij · exp(i(ω_i − ω_j)t)."""
    w = cfg.level_energies
    ph = np.exp(1j * np.subtract.outer(w, w)[None] * traj.times[:, None, None])
    return traj.rho_m * ph


# presets -------------------------------------------------------------------

def preset_levels(wavelength_nm: float = PRESET_WAVELENGTH_NM,
                  splitting_cm1: float = SPLITTING_CM1) -> tuple[float, float, float, float]:
    """(ω_g, ω_e, ω_f, ω_field) with the field tuned midway between e and f."""
    w = nm_to_hartree(wavelength_nm)
    half = 0.5 * cm1_to_hartree(splitting_cm1)
    return 0.0, w - half, w + half, w


def preset_config(field_kind: str = "thermal", n_bar: float = PRESET_NBAR,
                  lam: float = PRESET_LAMBDA, n_max: int = PRESET_NMAX,
                  periods: float = 3.0) -> VConfig:
    wg, we, wf, w = preset_levels()
    mode = ModeConfig(w, lam, lam, n_max, field_kind, n_bar)
    cfg = VConfig(wg, we, wf, (mode,), t_final=1.0)
    return replace(cfg, t_final=periods * rabi_period(cfg))


def degenerate_config(field_kind: str = "thermal", n_bar: float = PRESET_NBAR,
                      lam: float = PRESET_LAMBDA, n_max: int = PRESET_NMAX,
                      periods: float = 3.0) -> VConfig:
    """ω_e = ω_f = ω_field, the configuration the closed-form results assume."""
    w = nm_to_hartree(PRESET_WAVELENGTH_NM)
    mode = ModeConfig(w, lam, lam, n_max, field_kind, n_bar)
    cfg = VConfig(0.0, w, w, (mode,), t_final=1.0)
    return replace(cfg, t_final=periods * rabi_period(cfg))


def two_mode_config(field_kind: str = "thermal", n_bar: float = PRESET_NBAR,
                    lam: float = PRESET_LAMBDA, n_max: int = PRESET_NMAX,
                    topology: str = "symmetric", periods: float = 3.0) -> VConfig:
    """Two-mode preset.

    ``symmetric``: both modes at the midpoint, each coupling both transitions.
    ``per_transition``: mode 1 resonant with g-e only, mode 2 with g-f only.
    """
    wg, we, wf, w = preset_levels()
    if topology == "symmetric":
        modes = (ModeConfig(w, lam, lam, n_max, field_kind, n_bar),
                 ModeConfig(w, lam, lam, n_max, field_kind, n_bar))
    elif topology == "per_transition":
        modes = (ModeConfig(we - wg, lam, 0.0, n_max, field_kind, n_bar),
                 ModeConfig(wf - wg, 0.0, lam, n_max, field_kind, n_bar))
    else:
        raise ValueError(f"unknown two-mode topology {topology!r}")
    cfg = VConfig(wg, we, wf, modes, t_final=1.0)
    return replace(cfg, t_final=periods * rabi_period(cfg))

"""Two-surface Born-Oppenheimer molecule on a 1-D grid, coupled to one mode.

Channels are (electronic state i, photon number n). The coupling
λ(|e⟩⟨g| a + h.c.) only connects (g, n) with (e, n-1), so the potential part
of the Hamiltonian splits into excitation manifolds M = 0..K, each at most
2x2 at every grid point:

    manifold M:  slot 0 = (g, M)      (absent for M = K)
                 slot 1 = (e, M - 1)  (absent for M = 0)

Propagation uses the symmetric (Strang) split
exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2). The production path evolves the
eigencomponents of the initial field matrix, each stored as one 2xN
amplitude array per manifold it touches. ``propagate_dense`` evolves the
full composite density matrix and serves as its cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import scipy.fft

from . import quantum_core as qc
from .field_states import FieldState, make_field
from .units import fs_to_au, hartree_to_nm

LI2_REDUCED_MASS = 6394.0


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Periodic uniform grid r_j = r_min + j·dr, j = 0..n_points-1."""

    r_min: float
    r_max: float
    n_points: int

    def __post_init__(self):
        n = self.n_points
        if n < 64 or n & (n - 1):
            raise GridError(f"n_points must be a power of two >= 64, got {n}")
        if self.r_max <= self.r_min:
            raise GridError("r_max must exceed r_min")

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / self.n_points

    @cached_property
    def r(self) -> np.ndarray:
        return self.r_min + self.dr * np.arange(self.n_points)

    @cached_property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n_points, self.dr)


@dataclass(frozen=True)
class MorseSurface:
    D: float
    b: float
    r0: float
    T_shift: float
    reduced_mass: float = LI2_REDUCED_MASS
    name: str = ""

    def __post_init__(self):
        if self.D <= 0 or self.b <= 0:
            raise ValueError("Morse D and b must be positive")
        if self.reduced_mass <= 0:
            raise ValueError("reduced mass must be positive")

    def __call__(self, r):
        return self.D * (1.0 - np.exp(-self.b * (np.asarray(r) - self.r0))) ** 2 + self.T_shift

    @property
    def omega0(self) -> float:
        return self.b * math.sqrt(2 * self.D / self.reduced_mass)

    @property
    def n_bound(self) -> int:
        return int(math.floor(math.sqrt(2 * self.reduced_mass * self.D) / self.b - 0.5)) + 1

    def analytic_levels(self, nu) -> np.ndarray:
        """E_ν = T + ω₀(ν+½) − [ω₀(ν+½)]²/(4D)."""
        x = self.omega0 * (np.asarray(nu, dtype=float) + 0.5)
        return self.T_shift + x - x ** 2 / (4 * self.D)


# Morse fits to the X and A states of Li2, A shifted in energy
GROUND = MorseSurface(0.0378492, 0.4730844, 5.0493478, 0.0, name="g")
EXCITED = MorseSurface(0.0426108, 0.3175063, 5.8713786, 0.0911267, name="e")


def morse_eval(s: MorseSurface, g: Grid) -> np.ndarray:
    return s(g.r)


@dataclass(frozen=True)
class VibrationalBasis:
    """Eigenpairs of T + V on a grid; ``functions`` satisfy Σ ψ_ν ψ_μ dr = δ_νμ."""

    surface: str
    grid: Grid
    energies: np.ndarray
    functions: np.ndarray = field(repr=False)

    @property
    def vectors(self) -> np.ndarray:
        """Unit-norm grid vectors (functions · sqrt(dr)), shape (count, N)."""
        return self.functions * math.sqrt(self.grid.dr)

    def __len__(self):
        return len(self.energies)


def kinetic_matrix(g: Grid, mass: float) -> np.ndarray:
    """Fourier-grid kinetic matrix, the same operator the split stepper applies."""
    n = g.n_points
    diag = g.k ** 2 / (2 * mass)
    t = np.fft.ifft(diag[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)
    return np.real(t + t.conj().T) / 2


def vibrational_eigensolve(s: MorseSurface, g: Grid, count: int,
                           edge_tol: float = 1e-8) -> VibrationalBasis:
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > s.n_bound:
        raise ValueError(f"requested {count} states but surface {s.name!r} binds ~{s.n_bound}")
    h = kinetic_matrix(g, s.reduced_mass) + np.diag(morse_eval(s, g))
    ev, vec = np.linalg.eigh(h)
    ev, vec = ev[:count], vec[:, :count].T.copy()
    edge = np.abs(vec[:, [0, -1]]).max()
    if edge > edge_tol:
        raise GridError(f"grid too small: eigenvector edge amplitude {edge:.2e} > {edge_tol:g}")
    for v in vec:
        # sign convention: first significant lobe from the left is positive
        j = np.flatnonzero(np.abs(v) > 1e-3 * np.abs(v).max())[0]
        if v[j] < 0:
            v *= -1
    return VibrationalBasis(s.name, g, ev, vec / math.sqrt(g.dr))


@dataclass(frozen=True)
class MolConfig:
    grid: Grid
    ground: MorseSurface
    excited: MorseSurface
    lam: float
    field: str = "thermal"
    n_bar: float = 0.0
    n_max: int = 6
    phase: float = 0.0
    fock_n: int | None = None
    omega_field: float | str = "midpoint"
    midpoint_levels: tuple[int, int] = (3, 4)
    dt: float = 1.0
    t_final: float = 1000.0
    sample_every: int = 10
    snapshot_times: tuple[float, ...] = ()
    cap: int = qc.DEFAULT_DIM_CAP

    def __post_init__(self):
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))
        object.__setattr__(self, "midpoint_levels", tuple(int(v) for v in self.midpoint_levels))
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.n_bar < 0:
            raise ValueError("n_bar must be >= 0")
        if self.dt <= 0 or self.t_final <= 0:
            raise ValueError("dt and t_final must be positive")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")
        if self.ground.reduced_mass != self.excited.reduced_mass:
            raise ValueError("both surfaces must share one reduced mass")
        if isinstance(self.omega_field, str) and self.omega_field != "midpoint":
            raise ValueError(f"omega_field must be a number or 'midpoint', got {self.omega_field!r}")
        if any(t < 0 or t > self.t_final for t in self.snapshot_times):
            raise ValueError("snapshot times must lie in [0, t_final]")

    @property
    def mass(self) -> float:
        return self.ground.reduced_mass

    @property
    def n_fock(self) -> int:
        return self.n_max + 1

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def layout(self) -> qc.HilbertLayout:
        return qc.HilbertLayout((2, self.grid.n_points, self.n_fock))

    def build_field(self, on_leakage: str = "warn") -> FieldState:
        return make_field(self.field, self.n_max, self.n_bar, self.phase, self.fock_n,
                          on_leakage=on_leakage)


def resolve_omega(cfg: MolConfig, ground_basis: VibrationalBasis | None = None,
                  excited_basis: VibrationalBasis | None = None) -> float:
    """Field frequency; 'midpoint' means ½[E_e(ν₁) + E_e(ν₂)] − E_g(0)."""
    if not isinstance(cfg.omega_field, str):
        return float(cfg.omega_field)
    nu1, nu2 = cfg.midpoint_levels
    top = max(nu1, nu2) + 1
    if excited_basis is None or len(excited_basis) < top:
        excited_basis = vibrational_eigensolve(cfg.excited, cfg.grid, top)
    if ground_basis is None:
        ground_basis = vibrational_eigensolve(cfg.ground, cfg.grid, 1)
    e = excited_basis.energies
    return 0.5 * (e[nu1] + e[nu2]) - ground_basis.energies[0]


def potential_block(cfg: MolConfig, omega: float) -> np.ndarray:
    """Per-point Hamiltonian without kinetic energy, shape (N, 2K, 2K).

    Channel index is i·K + n with i = 0 (g), 1 (e).
    """
    k = cfg.n_fock
    n = np.arange(k)
    vg = morse_eval(cfg.ground, cfg.grid)
    ve = morse_eval(cfg.excited, cfg.grid)
    npts = cfg.grid.n_points
    h = np.zeros((npts, 2 * k, 2 * k))
    idx = np.arange(k)
    h[:, idx, idx] = vg[:, None] + omega * (n + 0.5)
    h[:, k + idx, k + idx] = ve[:, None] + omega * (n + 0.5)
    # ⟨e, n-1| H |g, n⟩ = λ sqrt(n)
    for m in range(1, k):
        h[:, k + m - 1, m] = cfg.lam * math.sqrt(m)
        h[:, m, k + m - 1] = cfg.lam * math.sqrt(m)
    return h


def _expm_hermitian(h: np.ndarray, tau: float) -> np.ndarray:
    """exp(-i h tau) for a stack of Hermitian matrices via eigendecomposition."""
    ev, vec = np.linalg.eigh(h)
    return (vec * np.exp(-1j * ev * tau)[..., None, :]) @ np.swapaxes(vec.conj(), -1, -2)


def manifold_hamiltonian(cfg: MolConfig, omega: float) -> np.ndarray:
    """Potential block restricted to each excitation manifold, shape (K+1, N, 2, 2).

    Absent slots get zero energy and zero coupling; they carry no amplitude.
    """
    k = cfg.n_fock
    vg = morse_eval(cfg.ground, cfg.grid)
    ve = morse_eval(cfg.excited, cfg.grid)
    h = np.zeros((k + 1, cfg.grid.n_points, 2, 2))
    for m in range(k + 1):
        if m < k:
            h[m, :, 0, 0] = vg + omega * (m + 0.5)
        if m >= 1:
            h[m, :, 1, 1] = ve + omega * (m - 0.5)
        if 1 <= m < k:
            h[m, :, 0, 1] = h[m, :, 1, 0] = cfg.lam * math.sqrt(m)
    return h


@dataclass
class SplitStepper:
    """Precomputed factors for one Strang step of length dt."""

    cfg: MolConfig
    omega: float
    kinetic_phase: np.ndarray
    kinetic_energy: np.ndarray
    h_manifold: np.ndarray
    u_half: np.ndarray
    u_full: np.ndarray

    @property
    def dt(self) -> float:
        return self.cfg.dt

    def block_potential(self) -> np.ndarray:
        return potential_block(self.cfg, self.omega)


def build_mol_stepper(cfg: MolConfig, omega: float | None = None) -> SplitStepper:
    if omega is None:
        omega = resolve_omega(cfg)
    g = cfg.grid
    ke = g.k ** 2 / (2 * cfg.mass)
    h = manifold_hamiltonian(cfg, omega)
    return SplitStepper(cfg=cfg, omega=omega,
                        kinetic_phase=np.exp(-1j * ke * cfg.dt), kinetic_energy=ke,
                        h_manifold=h, u_half=_expm_hermitian(h, cfg.dt / 2),
                        u_full=_expm_hermitian(h, cfg.dt))


@dataclass
class Mixture:
    """ρ = Σ_c w_c |Ψ_c⟩⟨Ψ_c| stored manifold by manifold.

    ``amps[b]`` is the (2, N) amplitude array of block b, which belongs to
    component ``component[b]`` and manifold ``manifold[b]``. Amplitudes are
    unit-norm grid vectors (no dr weight).
    """

    weights: np.ndarray
    amps: np.ndarray
    manifold: np.ndarray
    component: np.ndarray
    n_fock: int

    def copy(self) -> "Mixture":
        return replace(self, amps=self.amps.copy())

    @cached_property
    def _ge_pairs(self):
        pairs = []
        for b, (c, m) in enumerate(zip(self.component, self.manifold)):
            hit = np.flatnonzero((self.component == c) & (self.manifold == m + 1))
            pairs.extend((b, int(j)) for j in hit)
        return pairs

    def populations(self) -> tuple[float, float]:
        w = self.weights[self.component]
        nrm = np.sum(np.abs(self.amps) ** 2, axis=-1)
        return float(w @ nrm[:, 0]), float(w @ nrm[:, 1])

    def component_norms(self) -> np.ndarray:
        nrm = np.sum(np.abs(self.amps) ** 2, axis=(1, 2))
        return np.bincount(self.component, weights=nrm, minlength=len(self.weights))

    def excited_block(self) -> np.ndarray:
        e = self.amps[:, 1, :]
        w = self.weights[self.component]
        return (e.T * w) @ e.conj()

    def ground_block(self) -> np.ndarray:
        g = self.amps[:, 0, :]
        w = self.weights[self.component]
        return (g.T * w) @ g.conj()

    def ge_block(self) -> np.ndarray:
        """⟨g, r| ρ_M |e, r'⟩ = Σ_c w_c Σ_n ψ_c(g, n, r) ψ_c(e, n, r')*."""
        n = self.amps.shape[-1]
        out = np.zeros((n, n), dtype=complex)
        for bg, be in self._ge_pairs:
            w = self.weights[self.component[bg]]
            out += w * np.outer(self.amps[bg, 0], self.amps[be, 1].conj())
        return out

    def ge_norm(self) -> float:
        """Frobenius norm of the g-e coherence block, computed from overlaps only."""
        if not self._ge_pairs:
            return 0.0
        bg = np.array([p[0] for p in self._ge_pairs])
        be = np.array([p[1] for p in self._ge_pairs])
        w = self.weights[self.component[bg]]
        gv, ev = self.amps[bg, 0], self.amps[be, 1]
        gram_g = gv.conj() @ gv.T
        gram_e = ev.conj() @ ev.T
        val = np.einsum("j,k,jk,kj->", w, w, gram_g, gram_e)
        return float(math.sqrt(max(val.real, 0.0)))

    def field_matrix(self) -> np.ndarray:
        k = self.n_fock
        out = np.zeros((k, k), dtype=complex)
        for slot, offset in ((0, 0), (1, -1)):
            v = self.amps[:, slot, :]
            photon = self.manifold + offset
            ok = (photon >= 0) & (photon < k)
            gram = v @ v.conj().T
            same = self.component[:, None] == self.component[None, :]
            w = self.weights[self.component][:, None] * same * ok[:, None] * ok[None, :]
            contrib = w * gram
            ph = np.clip(photon, 0, k - 1)
            np.add.at(out, (ph[:, None], ph[None, :]), contrib)
        return out

    def composite_purity(self) -> float:
        c = len(self.weights)
        flat = self.amps.reshape(len(self.amps), -1)
        gram = flat.conj() @ flat.T
        same_m = self.manifold[:, None] == self.manifold[None, :]
        ov = np.zeros((c, c), dtype=complex)
        np.add.at(ov, (self.component[:, None], self.component[None, :]), gram * same_m)
        return float(np.real(self.weights @ (np.abs(ov) ** 2) @ self.weights))

    def correlation(self, ref: np.ndarray) -> float:
        ov = self.amps[:, 1, :] @ ref.conj()
        return float(self.weights[self.component] @ np.abs(ov) ** 2)


def initial_mixture(cfg: MolConfig, psi_g0: np.ndarray, fld: FieldState,
                    weight_tol: float = 1e-15) -> Mixture:
    """Decompose |g, ψ_g0⟩⟨g, ψ_g0| ⊗ ρ_F into manifold-resolved pure components."""
    rho_f = fld.matrix
    k = cfg.n_fock
    if rho_f.shape != (k, k):
        raise ValueError(f"field has {rho_f.shape[0]} levels, config expects {k}")
    off = rho_f - np.diag(np.diag(rho_f))
    if not np.any(off):
        weights = np.real(np.diag(rho_f)).copy()
        vecs = np.eye(k, dtype=complex)
    else:
        weights, vecs = np.linalg.eigh(rho_f)
        vecs = vecs.T
    keep = weights > weight_tol
    weights, vecs = weights[keep], vecs[keep]
    amps, manifold, component = [], [], []
    for c, v in enumerate(vecs):
        for n in np.flatnonzero(v):
            a = np.zeros((2, cfg.grid.n_points), dtype=complex)
            a[0] = v[n] * psi_g0
            amps.append(a)
            manifold.append(n)
            component.append(c)
    return Mixture(weights=weights / weights.sum(), amps=np.array(amps),
                   manifold=np.array(manifold), component=np.array(component), n_fock=k)


def _apply_potential(amps, u):
    a0, a1 = amps[:, 0], amps[:, 1]
    out = np.empty_like(amps)
    out[:, 0] = u[..., 0, 0] * a0 + u[..., 0, 1] * a1
    out[:, 1] = u[..., 1, 0] * a0 + u[..., 1, 1] * a1
    return out


def _apply_kinetic(amps, phase, workers=None):
    ka = scipy.fft.fft(amps, axis=-1, workers=workers)
    return scipy.fft.ifft(phase * ka, axis=-1, workers=workers)


def component_energies(mix: Mixture, st: SplitStepper) -> np.ndarray:
    """⟨H_mol⟩ of each normalized component."""
    a = mix.amps
    ka = scipy.fft.fft(a, axis=-1)
    kin = np.sum(np.abs(ka) ** 2 * st.kinetic_energy, axis=(1, 2)) / a.shape[-1]
    h = st.h_manifold[mix.manifold]
    ha = _apply_potential(a, h)
    pot = np.real(np.sum(a.conj() * ha, axis=(1, 2)))
    tot = np.bincount(mix.component, weights=kin + pot, minlength=len(mix.weights))
    return tot / mix.component_norms()


@dataclass
class MolTrajectory:
    times: np.ndarray
    pop_g: np.ndarray
    pop_e: np.ndarray
    correlation: np.ndarray
    component_norms: np.ndarray
    component_energies: np.ndarray
    field_diag: np.ndarray
    field_offdiag_max: np.ndarray
    ge_norm: np.ndarray
    purity_total: np.ndarray
    snapshot_times: np.ndarray
    snapshots: np.ndarray
    excited_blocks: np.ndarray | None = None
    trace_error: np.ndarray | None = None
    hermiticity_error: np.ndarray | None = None
    ge_max: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)


def _event_steps(cfg: MolConfig):
    n = cfg.n_steps
    samples = set(range(0, n + 1, cfg.sample_every))
    snaps = {int(round(t / cfg.dt)) for t in cfg.snapshot_times}
    return sorted(samples | snaps), samples, snaps


def _prepare(cfg: MolConfig):
    qc.check_cap(cfg.grid.n_points * cfg.n_fock * 2, cfg.cap)
    gb = vibrational_eigensolve(cfg.ground, cfg.grid, 1)
    omega = resolve_omega(cfg, ground_basis=gb)
    psi0 = gb.vectors[0].astype(complex)
    return gb, omega, psi0


def _metadata(cfg, omega, fld):
    return {"omega_field": omega, "omega_field_nm": hartree_to_nm(omega),
            "reduced_mass": cfg.mass, "n_bar": fld.n_bar, "field": fld.kind,
            "alpha": None if fld.alpha is None else [fld.alpha.real, fld.alpha.imag],
            "leakage": fld.leakage, "dt": cfg.dt, "n_steps": cfg.n_steps}


def propagate_mixture(cfg: MolConfig, fld: FieldState | None = None,
                      record_excited_blocks: bool = False,
                      workers: int | None = None) -> MolTrajectory:
    """Split-operator propagation of the manifold-resolved mixture.

    All component blocks are stepped together as one batched array;
    ``workers`` spreads the per-block FFTs over threads without changing
    the result.
    """
    gb, omega, psi0 = _prepare(cfg)
    fld = cfg.build_field() if fld is None else fld
    st = build_mol_stepper(cfg, omega)
    mix = initial_mixture(cfg, psi0, fld)
    u_half = st.u_half[mix.manifold]
    u_full = st.u_full[mix.manifold]
    kin = st.kinetic_phase

    events, samples, snaps = _event_steps(cfg)
    rec = {k: [] for k in ("t", "pg", "pe", "c", "norm", "en", "fd", "fo", "ge", "pur", "blk")}
    snap_t, snap_m = [], []

    def record(step, m):
        t = step * cfg.dt
        if step in samples:
            pg, pe = m.populations()
            rf = m.field_matrix()
            rec["t"].append(t)
            rec["pg"].append(pg)
            rec["pe"].append(pe)
            rec["c"].append(m.correlation(psi0))
            rec["norm"].append(m.component_norms())
            rec["en"].append(component_energies(m, st))
            rec["fd"].append(np.real(np.diag(rf)))
            rec["fo"].append(np.abs(rf - np.diag(np.diag(rf))).max())
            rec["ge"].append(m.ge_norm())
            rec["pur"].append(m.composite_purity())
            if record_excited_blocks:
                rec["blk"].append(m.excited_block())
        if step in snaps:
            snap_t.append(t)
            snap_m.append(m.excited_block())

    record(0, mix)
    cur = 0
    amps = mix.amps
    for nxt in events[1:]:
        nsteps = nxt - cur
        amps = _apply_potential(amps, u_half)
        for s in range(nsteps):
            amps = _apply_kinetic(amps, kin, workers)
            amps = _apply_potential(amps, u_full if s < nsteps - 1 else u_half)
        cur = nxt
        mix.amps = amps
        record(cur, mix)

    return MolTrajectory(
        times=np.array(rec["t"]), pop_g=np.array(rec["pg"]), pop_e=np.array(rec["pe"]),
        correlation=np.array(rec["c"]), component_norms=np.array(rec["norm"]),
        component_energies=np.array(rec["en"]), field_diag=np.array(rec["fd"]),
        field_offdiag_max=np.array(rec["fo"]), ge_norm=np.array(rec["ge"]),
        purity_total=np.array(rec["pur"]), snapshot_times=np.array(snap_t),
        snapshots=np.array(snap_m).reshape(len(snap_m), cfg.grid.n_points, cfg.grid.n_points),
        excited_blocks=np.array(rec["blk"]) if record_excited_blocks else None,
        metadata=_metadata(cfg, omega, fld) | {"weights": mix.weights.tolist(), "path": "mixture"},
    )


# dense composite path ------------------------------------------------------

def _dense_operators(cfg: MolConfig, omega: float):
    g = cfg.grid
    h = potential_block(cfg, omega)
    u_half = _expm_hermitian(h, cfg.dt / 2)
    ke = g.k ** 2 / (2 * cfg.mass)
    t_prop = np.fft.ifft(np.exp(-1j * ke * cfg.dt)[:, None] * np.fft.fft(np.eye(g.n_points), axis=0),
                         axis=0)
    return u_half, t_prop


def _dense_left(x: np.ndarray, u_half: np.ndarray, t_prop: np.ndarray, k: int) -> np.ndarray:
    """Left-multiply a composite (2·N·K) x D array by one Strang step."""
    n = t_prop.shape[0]
    d = x.shape[1]

    def pot(y):
        # (i, r, n) -> (r, i·K + n) so each grid point sees its 2K x 2K block
        y = y.reshape(2, n, k, d).transpose(1, 0, 2, 3).reshape(n, 2 * k, d)
        y = u_half @ y
        return y.reshape(n, 2, k, d).transpose(1, 0, 2, 3).reshape(2 * n * k, d)

    y = pot(x)
    y = (t_prop @ y.reshape(2, n, k * d)).reshape(2 * n * k, d)
    return pot(y)


def dense_initial_state(cfg: MolConfig, psi_g0: np.ndarray, fld: FieldState) -> qc.DensityMatrix:
    ground = np.zeros(2 * cfg.grid.n_points, dtype=complex)
    ground[: cfg.grid.n_points] = psi_g0
    rho_m = qc.DensityMatrix.from_ket(ground, qc.HilbertLayout((2, cfg.grid.n_points)))
    return qc.kron(rho_m, fld.density(), cap=cfg.cap)


def propagate_dense(cfg: MolConfig, fld: FieldState | None = None) -> MolTrajectory:
    """Evolve the full composite ρ (electronic ⊗ coordinate ⊗ photon) step by step."""
    qc.check_cap(cfg.layout.total, cfg.cap)
    gb, omega, psi0 = _prepare(cfg)
    fld = cfg.build_field() if fld is None else fld
    rho = dense_initial_state(cfg, psi0, fld).data.copy()
    u_half, t_prop = _dense_operators(cfg, omega)
    k, n = cfg.n_fock, cfg.grid.n_points
    dims = cfg.layout.dims
    events, samples, snaps = _event_steps(cfg)
    rec = {k_: [] for k_ in ("t", "pg", "pe", "c", "fd", "fo", "ge", "gemax", "pur", "tr", "h", "blk")}
    snap_t, snap_m = [], []

    def record(step, rho):
        t = step * cfg.dt
        rm = qc.partial_trace_array(rho, dims, [0, 1])
        ee = rm[n:, n:]
        if step in samples:
            rf = qc.partial_trace_array(rho, dims, [2])
            ge = rm[:n, n:]
            rec["t"].append(t)
            rec["pg"].append(np.trace(rm[:n, :n]).real)
            rec["pe"].append(np.trace(ee).real)
            rec["c"].append(np.real(psi0.conj() @ ee @ psi0))
            rec["fd"].append(np.real(np.diag(rf)))
            rec["fo"].append(np.abs(rf - np.diag(np.diag(rf))).max())
            rec["ge"].append(np.linalg.norm(ge))
            rec["gemax"].append(np.abs(ge).max())
            rec["pur"].append(qc.purity(rho))
            rec["tr"].append(abs(np.trace(rho) - 1.0))
            rec["h"].append(qc.hermiticity_error(rho))
            rec["blk"].append(ee)
        if step in snaps:
            snap_t.append(t)
            snap_m.append(ee)

    record(0, rho)
    for s in range(1, cfg.n_steps + 1):
        x = _dense_left(rho, u_half, t_prop, k)
        # S ρ S† = S (S ρ)† for Hermitian ρ
        rho = _dense_left(x.conj().T, u_half, t_prop, k)
        if s in samples or s in snaps:
            record(s, rho)

    nt = len(rec["t"])
    return MolTrajectory(
        times=np.array(rec["t"]), pop_g=np.array(rec["pg"]), pop_e=np.array(rec["pe"]),
        correlation=np.array(rec["c"]), component_norms=np.ones((nt, 1)),
        component_energies=np.full((nt, 1), np.nan), field_diag=np.array(rec["fd"]),
        field_offdiag_max=np.array(rec["fo"]), ge_norm=np.array(rec["ge"]),
        purity_total=np.array(rec["pur"]), snapshot_times=np.array(snap_t),
        snapshots=np.array(snap_m).reshape(len(snap_m), n, n),
        excited_blocks=np.array(rec["blk"]), trace_error=np.array(rec["tr"]),
        hermiticity_error=np.array(rec["h"]), ge_max=np.array(rec["gemax"]),
        metadata=_metadata(cfg, omega, fld) | {"path": "dense"},
    )


def excited_block(state) -> np.ndarray:
    """Coordinate-space ⟨e, r| ρ_M |e, r'⟩ from a Mixture or a dense composite state."""
    if isinstance(state, Mixture):
        return state.excited_block()
    if isinstance(state, qc.DensityMatrix):
        two, n, k = state.dims
        rm = qc.partial_trace_array(state.data, state.dims, [0, 1])
        return rm[n:, n:]
    raise TypeError(f"cannot extract an excited block from {type(state).__name__}")


# presets -------------------------------------------------------------------

PRESET_LAMBDA = 1e-4
PRESET_NBAR = 0.0072
PRESET_NMAX = 6
PRESET_SNAPSHOTS_FS = (0.0, 100.0, 200.0, 300.0, 400.0, 500.0)


def preset_grid() -> Grid:
    return Grid(3.0, 15.0, 256)


def preset_config(field_kind: str = "thermal", t_final: float = 100000.0,
                  dt: float = 1.0) -> MolConfig:
    return MolConfig(grid=preset_grid(), ground=GROUND, excited=EXCITED, lam=PRESET_LAMBDA,
                     field=field_kind, n_bar=PRESET_NBAR, n_max=PRESET_NMAX,
                     omega_field="midpoint", dt=dt, t_final=t_final, sample_every=10,
                     snapshot_times=tuple(fs_to_au(t) for t in PRESET_SNAPSHOTS_FS
                                          if fs_to_au(t) <= t_final))

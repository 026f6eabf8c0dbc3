"""Tensor-product bookkeeping, density matrices and exact unitary stepping.

Composite indices are row-major over the subsystem dimensions, outermost
first, so ``kron(a, b)`` puts ``a`` on the slow index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_DIM_CAP = 16384

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10


class DimensionError(ValueError):
    """Composite space exceeds the configured dimension cap."""


class LayoutMismatch(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class HilbertLayout:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("layout needs at least one subsystem")
        if any(d < 1 for d in dims):
            raise ValueError(f"subsystem dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self):
        return len(self.dims)

    def flatten(self, indices: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(indices), self.dims))

    def unflatten(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.dims))

    def concat(self, other: "HilbertLayout") -> "HilbertLayout":
        return HilbertLayout(self.dims + other.dims)


def check_cap(total: int, cap: int | None = None):
    cap = DEFAULT_DIM_CAP if cap is None else cap
    if total > cap:
        raise DimensionError(f"composite dimension {total} exceeds cap {cap}")


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix over a :class:`HilbertLayout`.

    Construction checks Hermiticity and unit trace. Positivity is an
    O(n^3) sweep and only runs when ``check_psd=True``.
    """

    layout: HilbertLayout
    data: np.ndarray = field(repr=False)
    check_psd: bool = field(default=False, compare=False, repr=False)
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.complex128)
        n = self.layout.total
        if data.shape != (n, n):
            raise LayoutMismatch(f"matrix shape {data.shape} does not match layout total {n}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if self.validate:
            herm = hermiticity_error(data)
            if herm > HERMITIAN_TOL * max(1.0, np.abs(data).max()):
                raise NotHermitianError(f"density matrix not Hermitian (max deviation {herm:.3e})")
            tr = np.trace(data)
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"density matrix trace {tr} != 1")
            if self.check_psd:
                lo = np.linalg.eigvalsh(data).min()
                if lo < -PSD_TOL:
                    raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")

    @classmethod
    def from_ket(cls, psi, layout: HilbertLayout | None = None) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        psi = psi / np.linalg.norm(psi)
        if layout is None:
            layout = HilbertLayout((psi.size,))
        return cls(layout, np.outer(psi, psi.conj()))

    @classmethod
    def projector(cls, index: int, dim: int) -> "DensityMatrix":
        d = np.zeros((dim, dim), dtype=np.complex128)
        d[index, index] = 1.0
        return cls(HilbertLayout((dim,)), d)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(HilbertLayout((dim,)), np.eye(dim) / dim)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layout.dims

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def purity(self) -> float:
        # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        return float(np.vdot(self.data, self.data).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.abs(m - m.conj().T).max()) if m.size else 0.0


def kron(a: DensityMatrix, b: DensityMatrix, cap: int | None = None) -> DensityMatrix:
    layout = a.layout.concat(b.layout)
    check_cap(layout.total, cap)
    return DensityMatrix(layout, np.kron(a.data, b.data))


@dataclass(frozen=True)
class Propagator:
    """Spectral form of a time-independent Hamiltonian, H = U diag(E) U^dagger."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    layout: HilbertLayout

    def hamiltonian(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def unitary(self, t: float) -> np.ndarray:
        u = self.eigenvectors
        return (u * np.exp(-1j * self.eigenvalues * t)) @ u.conj().T


def diagonalize(h, layout: HilbertLayout | None = None, tol: float = 1e-10) -> Propagator:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got shape {h.shape}")
    if layout is None:
        layout = HilbertLayout((h.shape[0],))
    if layout.total != h.shape[0]:
        raise LayoutMismatch(f"layout total {layout.total} != matrix size {h.shape[0]}")
    err = hermiticity_error(h)
    if err > tol:
        raise NotHermitianError(f"Hamiltonian not Hermitian (max deviation {err:.3e})")
    h = 0.5 * (h + h.conj().T)
    # LinAlgError on non-convergence propagates unchanged
    evals, evecs = np.linalg.eigh(h)
    return Propagator(evals, evecs, layout)


def evolve(rho: DensityMatrix, p: Propagator, t: float) -> DensityMatrix:
    if rho.layout != p.layout:
        raise LayoutMismatch(f"state layout {rho.dims} != propagator layout {p.layout.dims}")
    if t == 0:
        return rho
    return DensityMatrix(rho.layout, _rotate(rho.data, p, [t])[0], validate=False)


def evolve_many(rho: DensityMatrix, p: Propagator, times: Iterable[float]) -> np.ndarray:
    """Return the stacked matrices rho(t) for every t, shape (len(times), n, n)."""
    if rho.layout != p.layout:
        raise LayoutMismatch(f"state layout {rho.dims} != propagator layout {p.layout.dims}")
    return _rotate(rho.data, p, list(times))


def _rotate(rho0: np.ndarray, p: Propagator, times) -> np.ndarray:
    u = p.eigenvectors
    uh = u.conj().T
    # work in the eigenbasis where the step is a phase on every element
    rt = uh @ rho0 @ u
    e = p.eigenvalues
    out = np.empty((len(times),) + rho0.shape, dtype=np.complex128)
    for i, t in enumerate(times):
        ph = np.exp(-1j * e * t)
        out[i] = u @ (ph[:, None] * rt * ph.conj()[None, :]) @ uh
    return out


def partial_trace_array(data: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """Partial trace of a raw matrix; ``keep`` lists subsystem indices to retain."""
    dims = tuple(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set must be non-empty")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise IndexError(f"subsystem index out of range for {len(dims)} subsystems: {keep}")
    n = len(dims)
    t = data.reshape(dims + dims)
    # einsum subscripts: traced subsystems share a row/column label
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = [rows[i] if i not in keep else letters[n + i] for i in range(n)]
    out = [rows[i] for i in keep] + [cols[i] for i in keep]
    red = np.einsum("".join(rows) + "".join(cols) + "->" + "".join(out), t)
    d = int(np.prod([dims[i] for i in keep]))
    return red.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    keep = sorted(set(int(k) for k in keep))
    red = partial_trace_array(rho.data, rho.dims, keep)
    layout = HilbertLayout(tuple(rho.dims[i] for i in keep))
    return DensityMatrix(layout, red, validate=False)


def purity(rho) -> float:
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(np.vdot(data, data).real)

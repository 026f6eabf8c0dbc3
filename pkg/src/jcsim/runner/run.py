"""Scenario execution and parameter sweeps."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from .. import __version__
from .. import molecular as mol
from .. import observables as obs
from .. import vsystem as vs
from ..units import AU_TIME_FS, au_to_fs
from . import output
from .config import ConfigError, ScenarioConfig, from_dict, set_path

log = logging.getLogger(__name__)

OUT_ENV = "JCSIM_OUT"


class ScenarioError(RuntimeError):
    pass


@dataclass
class OutputBundle:
    scenario: str
    config_hash: str
    directory: Path | None
    files: list[Path] = field(default_factory=list)
    columns: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    trajectory: object = None
    extras: dict = field(default_factory=dict)


def default_out_root() -> Path:
    return Path(os.environ.get(OUT_ENV, "jcsim_out"))


def _versions():
    return {"jcsim": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def plan(cfg: ScenarioConfig) -> dict:
    """What a run would do, without running it."""
    sysc = cfg.system
    info = {"scenario": cfg.scenario, "kind": cfg.kind, "config_hash": cfg.config_hash,
            "output_dir": cfg.output_dir, "formats": list(cfg.formats)}
    if cfg.kind == "vsystem":
        info |= {"layout": list(sysc.layout.dims), "composite_dim": sysc.layout.total,
                 "n_samples": len(vs.sample_times(sysc)), "t_final_au": sysc.t_final}
    else:
        info |= {"layout": list(sysc.layout.dims), "n_steps": sysc.n_steps,
                 "snapshots_au": list(sysc.snapshot_times), "t_final_au": sysc.t_final}
    return info


def _v_columns(tr: vs.VTrajectory) -> dict:
    return {
        "t": ("au", tr.times),
        "t_fs": ("fs", tr.times * AU_TIME_FS),
        "rho_gg": ("1", tr.rho_gg), "rho_ee": ("1", tr.rho_ee), "rho_ff": ("1", tr.rho_ff),
        "re_rho_fe": ("1", tr.rho_fe.real), "im_rho_fe": ("1", tr.rho_fe.imag),
        "re_rho_ge": ("1", tr.rho_ge.real), "im_rho_ge": ("1", tr.rho_ge.imag),
        "re_rho_gf": ("1", tr.rho_gf.real), "im_rho_gf": ("1", tr.rho_gf.imag),
        "purity_m": ("1", tr.purity_m), "purity_f": ("1", tr.purity_f),
        "trace_m": ("1", tr.trace_m), "trace_f": ("1", tr.trace_f),
        "purity_total": ("1", tr.purity_total),
    }


def _run_v(cfg: ScenarioConfig, bundle: OutputBundle):
    sysc: vs.VConfig = cfg.system
    tr = vs.run_v(sysc) if len(sysc.modes) == 1 else vs.run_v_two_mode(sysc)
    bundle.trajectory = tr
    bundle.columns = _v_columns(tr)
    fcols = {"t": ("au", tr.times)}
    for j in range(tr.field_diag.shape[1]):
        fcols[f"p{j}"] = ("1", tr.field_diag[:, j])
    bundle.extras["field_populations"] = fcols
    bundle.metadata["summary"] = {
        "max_abs_rho_fe": float(np.abs(tr.rho_fe).max()),
        "max_abs_rho_ge": float(np.abs(tr.rho_ge).max()),
        "max_abs_rho_gf": float(np.abs(tr.rho_gf).max()),
        "final_rho_gg": float(tr.rho_gg[-1]),
        "final_rho_ee": float(tr.rho_ee[-1]),
        "final_rho_ff": float(tr.rho_ff[-1]),
        "max_field_offdiag": float(tr.field_offdiag_max.max()),
    }
    bundle.metadata["trajectory"] = tr.metadata


def _run_mol(cfg: ScenarioConfig, bundle: OutputBundle):
    sysc: mol.MolConfig = cfg.system
    tr = mol.propagate_mixture(sysc)
    bundle.trajectory = tr
    count = cfg.projection_count
    eb = mol.vibrational_eigensolve(sysc.excited, sysc.grid, count)
    en = tr.component_energies
    bundle.columns = {
        "t": ("au", tr.times), "t_fs": ("fs", au_to_fs(tr.times)),
        "pop_g": ("1", tr.pop_g), "pop_e": ("1", tr.pop_e),
        "correlation": ("1", tr.correlation), "ge_coherence_norm": ("1", tr.ge_norm),
        "field_offdiag_max": ("1", tr.field_offdiag_max),
        "purity_total": ("1", tr.purity_total),
        "norm_deviation": ("1", np.abs(tr.component_norms - 1).max(axis=1)),
        "energy_drift": ("hartree", np.abs(en - en[0]).max(axis=1)),
    }
    spec = obs.spectrum(tr.correlation, times=tr.times)
    peaks_w, peaks_a = obs.find_peaks(spec)
    bundle.extras["spectrum"] = {"omega": ("hartree", spec.omega), "amplitude": ("au_time", spec.amplitude)}
    projections = [obs.vibrational_projection(s, eb, count) for s in tr.snapshots]
    bundle.extras["snapshots"] = list(zip(tr.snapshot_times, tr.snapshots, projections))
    bundle.extras["grid"] = {"r_min": sysc.grid.r_min, "r_max": sysc.grid.r_max,
                             "n_points": sysc.grid.n_points, "dr": sysc.grid.dr}
    e = eb.energies
    bundle.metadata["summary"] = {
        "max_pop_e": float(tr.pop_e.max()),
        "final_pop_g": float(tr.pop_g[-1]),
        "final_pop_e": float(tr.pop_e[-1]),
        "max_correlation": float(tr.correlation.max()),
        "max_ge_coherence_norm": float(tr.ge_norm.max()),
        "excited_levels": e.tolist(),
        "omega_ex_low": float(e[1] - e[0]),
        "spectrum_peaks": [[float(w), float(a)] for w, a in zip(peaks_w[:10], peaks_a[:10])],
        "projection_34_abs": [float(abs(p[3, 4])) if count > 4 else None for p in projections],
    }
    bundle.metadata["trajectory"] = tr.metadata


def _write(cfg: ScenarioConfig, bundle: OutputBundle, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    head = {"scenario": cfg.scenario, "config_hash": bundle.config_hash}
    files = []
    if "tsv" in cfg.formats:
        files.append(output.write_table(out / "timeseries.tsv", bundle.columns, head))
        if "field_populations" in bundle.extras:
            files.append(output.write_table(out / "field_populations.tsv",
                                            bundle.extras["field_populations"], head))
        if "spectrum" in bundle.extras:
            files.append(output.write_table(out / "spectrum.tsv", bundle.extras["spectrum"], head))
    if "bin" in cfg.formats and "snapshots" in bundle.extras:
        grid = bundle.extras["grid"]
        for i, (t, blk, proj) in enumerate(bundle.extras["snapshots"]):
            meta = head | {"time_au": float(t), "time_fs": au_to_fs(float(t))}
            files.append(output.write_matrix(
                out / f"snapshot_{i:03d}.bin", blk,
                meta | {"quantity": "rho_M_ee(r, r') unit-vector normalization", "grid": grid,
                        "units": "1"}))
            files.append(output.write_matrix(
                out / f"projection_{i:03d}.bin", proj,
                meta | {"quantity": "<psi_e,nu| rho_M_ee |psi_e,mu>", "units": "1"}))
    files.append(output.write_json(out / "metadata.json", bundle.metadata))
    bundle.files = files


def run_scenario(cfg: ScenarioConfig, out_dir=None, dry_run: bool = False) -> OutputBundle | dict:
    """Run one scenario and write its bundle; ``dry_run`` returns the plan only."""
    if out_dir is None and cfg.output_dir is not None:
        out_dir = cfg.output_dir
    if dry_run:
        return plan(cfg) | {"output_dir": None if out_dir is None else str(out_dir)}
    bundle = OutputBundle(cfg.scenario, cfg.config_hash, None if out_dir is None else Path(out_dir))
    bundle.metadata = {"scenario": cfg.scenario, "kind": cfg.kind,
                       "config_hash": cfg.config_hash, "settings": cfg.settings,
                       "derived": cfg.derived, "versions": _versions(),
                       "units": {"energy": "hartree", "time": "au (hbar/hartree)",
                                 "length": "bohr", "mass": "electron masses"}}
    try:
        if cfg.kind == "vsystem":
            _run_v(cfg, bundle)
        else:
            _run_mol(cfg, bundle)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise ScenarioError(f"scenario {cfg.scenario} ({cfg.config_hash}) failed: {exc}") from exc
    if out_dir is not None:
        _write(cfg, bundle, Path(out_dir))
    return bundle


@dataclass
class SweepResult:
    axis: str
    values: list
    bundles: list
    summary: list[dict]

    @property
    def failures(self) -> list[dict]:
        return [row for row in self.summary if row["status"] != "ok"]


def _summary_row(value, bundle: OutputBundle | None, error: str | None) -> dict:
    row = {"value": value, "status": "ok" if error is None else "failed", "error": error}
    if bundle is not None:
        row.update(bundle.metadata["summary"])
    return row


def sweep(base: ScenarioConfig, axis: str, values, out_root=None, threads: int = 1) -> SweepResult:
    """One run per value of the dotted parameter ``axis``; members run concurrently.

    A failing member is reported in its summary row; siblings still run.
    Results are ordered as ``values`` regardless of completion order.
    """
    values = list(values)
    for v in values:
        if not np.isfinite(v):
            raise ConfigError(f"sweep value {v} is not finite", axis)
    # resolve the path once up front so a bad axis fails before any work
    set_path(base.settings, axis, values[0] if values else 0.0)
    leaf = axis.split(".")[-1]

    def member(i, v):
        try:
            cfg = from_dict(set_path(base.settings, axis, v))
            out = None if out_root is None else Path(out_root) / f"{i:03d}_{leaf}={v:g}"
            return run_scenario(cfg, out), None
        except Exception as exc:  # noqa: BLE001 - reported per member
            log.warning("sweep member %s=%s failed: %s", axis, v, exc)
            return None, f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(member, range(len(values)), values))
    bundles = [b for b, _ in results]
    summary = [_summary_row(v, b, e) for v, (b, e) in zip(values, results)]
    if out_root is not None:
        Path(out_root).mkdir(parents=True, exist_ok=True)
        _write_summary(Path(out_root) / "summary.tsv", axis, summary, base.config_hash)
    return SweepResult(axis, values, bundles, summary)


def _write_summary(path: Path, axis: str, rows: list[dict], base_hash: str):
    keys = ["value", "status"]
    scalar = sorted({k for r in rows for k, v in r.items()
                     if k not in keys and isinstance(v, float)})
    lines = [f"# jcsim {__version__}", f"# axis: {axis}", f"# base_config_hash: {base_hash}",
             "# " + "\t".join(keys + scalar + ["error"])]
    for r in rows:
        vals = [format(r["value"], ".17g"), r["status"]]
        vals += [format(r[k], ".17g") if k in r else "nan" for k in scalar]
        vals.append(r["error"] or "")
        lines.append("\t".join(vals))
    path.write_text("\n".join(lines) + "\n")

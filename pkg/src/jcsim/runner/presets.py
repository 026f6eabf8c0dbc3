"""Named parameter sets for the standard V-system and molecular scenarios.

Every preset is a plain settings dict in the config-file schema, so a preset
and a config file that spells out the same values hash identically.
"""

from __future__ import annotations

import copy

from .. import molecular as mol
from .. import vsystem as vs


def _v_mode(omega, field, lam=vs.PRESET_LAMBDA, lam_e=None, lam_f=None):
    return {"omega": omega, "lambda_e": lam if lam_e is None else lam_e,
            "lambda_f": lam if lam_f is None else lam_f, "n_max": vs.PRESET_NMAX,
            "field": field, "n_bar": vs.PRESET_NBAR, "phase": 0.0}


def _v_single(field):
    wg, we, wf, w = vs.preset_levels()
    return {"kind": "vsystem",
            "vsystem": {"omega_g": wg, "omega_e": we, "omega_f": wf, "periods": 3.0,
                        "modes": [_v_mode(w, field)]}}


def _v_two_mode(field):
    wg, we, wf, w = vs.preset_levels()
    return {"kind": "vsystem",
            "vsystem": {"omega_g": wg, "omega_e": we, "omega_f": wf, "periods": 3.0,
                        "topology": "symmetric",
                        "modes": [_v_mode(w, field), _v_mode(w, field)]}}


def _surface(s: mol.MorseSurface):
    return {"D": s.D, "b": s.b, "r0": s.r0, "T_shift": s.T_shift}


def _mol(field):
    cfg = mol.preset_config(field)
    g = cfg.grid
    return {"kind": "molecular",
            "molecular": {
                "grid": {"r_min": g.r_min, "r_max": g.r_max, "n_points": g.n_points},
                "ground": _surface(cfg.ground), "excited": _surface(cfg.excited),
                "reduced_mass": cfg.mass, "lambda": cfg.lam, "field": field,
                "n_bar": cfg.n_bar, "phase": 0.0, "n_max": cfg.n_max,
                "omega_field": "midpoint", "midpoint_levels": list(cfg.midpoint_levels),
                "dt": cfg.dt, "t_final": cfg.t_final, "sample_every": cfg.sample_every,
                "snapshot_times_fs": list(mol.PRESET_SNAPSHOTS_FS), "projection_count": 15}}


PRESETS = {
    "v_coherent": lambda: _v_single("coherent"),
    "v_thermal": lambda: _v_single("thermal"),
    "v_two_mode_coherent": lambda: _v_two_mode("coherent"),
    "v_two_mode_thermal": lambda: _v_two_mode("thermal"),
    "mol_thermal": lambda: _mol("thermal"),
    "mol_coherent": lambda: _mol("coherent"),
}

DESCRIPTIONS = {
    "v_coherent": "V system, single coherent mode, n̄ = 0.008, λ = 1e-4, 10 Fock states",
    "v_thermal": "V system, single thermal mode, n̄ = 0.008, λ = 1e-4, 10 Fock states",
    "v_two_mode_coherent": "V system, two coherent modes at the e-f midpoint, each coupling both transitions",
    "v_two_mode_thermal": "V system, two thermal modes at the e-f midpoint, each coupling both transitions",
    "mol_thermal": "Li2-like Morse pair, thermal mode n̄ = 0.0072, 7 Fock states, ω between excited ν=3 and ν=4",
    "mol_coherent": "Li2-like Morse pair, coherent mode |α|² = 0.0072, otherwise as mol_thermal",
}


def preset_settings(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}")
    return {"scenario": name} | copy.deepcopy(PRESETS[name]())

"""Experiment presets reproducing the figure-level studies at desk scale.

Each preset expands to a full config document (see :mod:`qsync.config`);
``run_preset`` merges overrides on top and executes it.  Frequencies are
zero throughout (the steady-state statements are frequency-independent;
detuning enters only through the sweep axes that set it explicitly).
"""

import copy
import json

from .config import ConfigError, parse_config
from .model import rates_for_magnetization

__all__ = ["PRESETS", "preset_config", "run_preset"]

FIG1_GAINS = [1.0, 0.2, 20.0, 2.0, 2.5, 0.3]
FIG1B_DAMPS = [4.0, 0.8, 80.0, 8.0, 10.0, 1.2]
FIG1C_DAMPS = [0.5, 4.0, 80.0, 1.0, 0.5, 0.2]
FIG1_UXY = 80.0
FIG1_UZ = 1.0

FIG3_ENV_AB = {"base_site": 1, "sites": [2, 3, 4],
               "gain_multipliers": [1.5, 2.5, 0.6], "damp_multipliers": [1.5, 2.5, 0.6]}
FIG3_ENV_CD = {"base_site": 1, "sites": [2, 3, 4],
               "gain_multipliers": [0.8, 5.0, 0.1], "damp_multipliers": [1.3, 0.9, 1.2]}


def _qubits(gains, damps, omegas=None):
    omegas = omegas or [0.0] * len(gains)
    return [
        {"omega": w, "gamma_gain": g, "gamma_damp": d}
        for w, g, d in zip(omegas, gains, damps)
    ]


def _pairs(n, topology, ux, uy, uz):
    if topology == "all_to_all":
        pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    else:
        pairs = [(0, k) for k in range(1, n)]
    return [{"j": j, "k": k, "ux": ux, "uy": uy, "uz": uz} for j, k in pairs]


def _fig1(damps, seed):
    return {
        "command": "evolve",
        "spec": {
            "qubits": _qubits(FIG1_GAINS, damps),
            "interactions": _pairs(6, "all_to_all", FIG1_UXY, FIG1_UXY, FIG1_UZ),
            "topology_tag": "all_to_all",
        },
        "init": {"kind": "ghz"},
        "command_params": {
            "series": [
                {"label": "ghz", "init": {"kind": "ghz"}},
                {"label": "rand", "init": {"kind": "random_pure", "seed": seed}},
                {"label": "ghz_free", "init": {"kind": "ghz"}, "interactions": False},
                {"label": "rand_free", "init": {"kind": "random_pure", "seed": seed},
                 "interactions": False},
            ],
            "t_min": 1e-3,
            "samples": 120,
            "residual_target": 1e-9,
        },
        "seed": seed,
    }


def _fig_s1(seed):
    cfg = _fig1(FIG1B_DAMPS, seed)
    cfg["command_params"]["series"] = [
        {"label": "b", "init": {"kind": "ghz"}},
        {"label": "c", "init": {"kind": "ghz"}, "gamma_damps": FIG1C_DAMPS},
    ]
    return cfg


def _fig2a(seed):
    g1, d1 = rates_for_magnetization(0.5)
    return {
        "command": "sweep",
        "spec": {
            "qubits": _qubits([g1, g1], [d1, d1]),
            "interactions": [{"j": 0, "k": 1, "ux": 1.0, "uy": 1.0, "uz": 1.0}],
            "topology_tag": "custom",
        },
        "command_params": {
            "axes": [
                {"path": "qubits[0].m", "start": -1.0, "stop": 1.0, "count": 41},
                {"path": "qubits[1].m", "start": -1.0, "stop": 1.0, "count": 41},
            ],
        },
        "seed": seed,
    }


def _fig2b(seed):
    g1, d1 = rates_for_magnetization(0.25)
    g2, d2 = rates_for_magnetization(-0.25)
    return {
        "command": "sweep",
        "spec": {
            "qubits": _qubits([g1, g2], [d1, d2]),
            "interactions": [{"j": 0, "k": 1, "ux": 1.0, "uy": 1.0, "uz": 1.0}],
            "topology_tag": "custom",
        },
        "command_params": {
            "axes": [
                {"path": "delta", "start": -4.0, "stop": 4.0, "count": 41},
                {"path": "coupling.u", "start": 0.0, "stop": 2.0, "count": 41},
            ],
        },
        "seed": seed,
    }


def _fig3(topology, ux, uy, env, seed):
    return {
        "command": "sweep",
        "spec": {
            "qubits": _qubits([1.0] * 5, [1.0] * 5),
            "interactions": _pairs(5, topology, ux, uy, 1.0),
            "topology_tag": topology,
        },
        "command_params": {
            "axes": [
                {"path": "qubits[0].m", "start": -1.0, "stop": 1.0, "count": 21},
                {"path": "env.m", "start": -1.0, "stop": 1.0, "count": 21},
            ],
            "env": env,
        },
        "seed": seed,
    }


_BUILDERS = {
    "fig1b": lambda seed: _fig1(FIG1B_DAMPS, seed),
    "fig1c": lambda seed: _fig1(FIG1C_DAMPS, seed),
    "fig2a": _fig2a,
    "fig2b": _fig2b,
    "fig3a": lambda seed: _fig3("all_to_all", 2.0, 2.0, FIG3_ENV_AB, seed),
    "fig3b": lambda seed: _fig3("one_to_all", 2.0, 2.0, FIG3_ENV_AB, seed),
    "fig3c": lambda seed: _fig3("all_to_all", 2.0, 0.5, FIG3_ENV_CD, seed),
    "fig3d": lambda seed: _fig3("one_to_all", 2.0, 0.5, FIG3_ENV_CD, seed),
    "figS1": _fig_s1,
}

PRESETS = tuple(sorted(_BUILDERS))


def _deep_merge(base, overrides):
    out = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def preset_config(name: str, overrides: dict | None = None, seed: int = 0) -> dict:
    if name not in _BUILDERS:
        raise ConfigError("preset", f"unknown preset {name!r}; expected one of {PRESETS}")
    doc = _BUILDERS[name](seed)
    doc["preset"] = name
    if overrides:
        doc = _deep_merge(doc, overrides)
    return doc


def run_preset(name: str, overrides: dict | None = None, seed: int = 0):
    """Build, validate and execute a preset; returns (RunConfig, summary)."""
    from .runners import run_config

    doc = preset_config(name, overrides, seed)
    config = parse_config(json.dumps(doc))
    return config, run_config(config)

"""Run configuration: JSON parsing with field-path validation errors.

A config document looks like

    {
      "command": "evolve",
      "spec": {
        "qubits": [{"omega": 0, "gamma_gain": 1, "gamma_damp": 4}, ...],
        "interactions": [{"j": 0, "k": 1, "ux": 80, "uy": 80, "uz": 1}, ...],
        "topology_tag": "all_to_all"
      },
      "init": {"kind": "ghz"},
      "command_params": {...},
      "output_path": "out.csv",
      "workers": 1,
      "seed": 0
    }

The spec block also accepts the uniform-network shorthand with keys
omegas / gamma_gains / gamma_damps / u_xy / u_y / u_z / topology.
"""

import json
import os
from dataclasses import dataclass, field

from .model import InteractionTerm, QubitParams, StateInit, SystemSpec, xxz_spec

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config", "config_to_dict"]

COMMANDS = ("evolve", "steady", "sync", "sweep", "verify-nogo", "spin1-check", "algebra-check")

DEFAULTS = {"rtol": 1e-8, "atol": 1e-10}


class ConfigError(ValueError):
    """Invalid configuration; carries the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class RunConfig:
    command: str
    spec: SystemSpec | None = None
    init: StateInit = field(default_factory=StateInit)
    command_params: dict = field(default_factory=dict)
    output_path: str | None = None
    workers: int = 1
    seed: int = 0
    raw: dict = field(default_factory=dict)


def _require(mapping, key, path, kind=None):
    if key not in mapping:
        raise ConfigError(f"{path}.{key}", "missing required field")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"{path}.{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _number(mapping, key, path, default=None):
    if key not in mapping:
        if default is None:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return default
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {type(value).__name__}")
    return float(value)


def parse_spec(doc, path="spec") -> SystemSpec:
    if not isinstance(doc, dict):
        raise ConfigError(path, "spec must be an object")
    if "qubits" not in doc:
        # uniform-network shorthand
        try:
            return xxz_spec(
                doc.get("omegas", [0.0] * len(doc["gamma_gains"])),
                _require(doc, "gamma_gains", path, list),
                _require(doc, "gamma_damps", path, list),
                u_xy=_number(doc, "u_xy", path),
                u_z=_number(doc, "u_z", path, 0.0),
                u_y=doc.get("u_y"),
                topology=doc.get("topology", "all_to_all"),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(path, str(exc)) from exc

    qubits = []
    qdocs = _require(doc, "qubits", path, list)
    if not qdocs:
        raise ConfigError(f"{path}.qubits", "needs at least one qubit")
    for i, qd in enumerate(qdocs):
        qpath = f"{path}.qubits[{i}]"
        if not isinstance(qd, dict):
            raise ConfigError(qpath, "expected an object")
        try:
            qubits.append(
                QubitParams(
                    omega=_number(qd, "omega", qpath, 0.0),
                    gamma_gain=_number(qd, "gamma_gain", qpath, 0.0),
                    gamma_damp=_number(qd, "gamma_damp", qpath, 0.0),
                )
            )
        except ValueError as exc:
            raise ConfigError(qpath, str(exc)) from exc

    terms = []
    seen = {}
    for i, td in enumerate(doc.get("interactions", [])):
        tpath = f"{path}.interactions[{i}]"
        if not isinstance(td, dict):
            raise ConfigError(tpath, "expected an object")
        j = td.get("j")
        k = td.get("k")
        if not isinstance(j, int) or not isinstance(k, int):
            raise ConfigError(tpath, "j and k must be integers")
        if (j, k) in seen:
            raise ConfigError(tpath, f"duplicate interaction pair ({j}, {k}); first at interactions[{seen[(j, k)]}]")
        seen[(j, k)] = i
        try:
            terms.append(
                InteractionTerm(
                    j=j,
                    k=k,
                    ux=_number(td, "ux", tpath, 0.0),
                    uy=_number(td, "uy", tpath, 0.0),
                    uz=_number(td, "uz", tpath, 0.0),
                )
            )
        except ValueError as exc:
            raise ConfigError(tpath, str(exc)) from exc

    try:
        return SystemSpec(tuple(qubits), tuple(terms), doc.get("topology_tag", "custom"))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def parse_init(doc, path="init") -> StateInit:
    if doc is None:
        return StateInit()
    if not isinstance(doc, dict):
        raise ConfigError(path, "init must be an object")
    kind = doc.get("kind", "product_steady")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"{path}.seed", "seed must be a nonnegative integer")
    try:
        return StateInit(kind=kind, seed=seed)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("<document>", "top level must be an object")

    command = _require(doc, "command", "<document>", str)
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}; expected one of {COMMANDS}")

    spec = None
    if "spec" in doc and doc["spec"] is not None:
        spec = parse_spec(doc["spec"])
    elif command not in ("spin1-check",):
        raise ConfigError("spec", f"command {command!r} requires a spec")

    params = doc.get("command_params", {})
    if not isinstance(params, dict):
        raise ConfigError("command_params", "must be an object")
    params = dict(params)
    for key, value in DEFAULTS.items():
        params.setdefault(key, value)

    workers = doc.get("workers", 1)
    if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
        raise ConfigError("workers", "must be a positive integer")
    env_workers = os.environ.get("QSYNC_WORKERS")
    if env_workers is not None:
        try:
            workers = max(1, int(env_workers))
        except ValueError as exc:
            raise ConfigError("QSYNC_WORKERS", "must be an integer") from exc

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed", "must be a nonnegative integer")

    return RunConfig(
        command=command,
        spec=spec,
        init=parse_init(doc.get("init")),
        command_params=params,
        output_path=doc.get("output_path"),
        workers=workers,
        seed=seed,
        raw=doc,
    )


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(config: RunConfig) -> dict:
    """Normalized echo of a RunConfig (the reproducibility payload)."""
    out = {
        "command": config.command,
        "command_params": config.command_params,
        "workers": config.workers,
        "seed": config.seed,
    }
    if config.spec is not None:
        out["spec"] = {
            "qubits": [
                {"omega": q.omega, "gamma_gain": q.gamma_gain, "gamma_damp": q.gamma_damp}
                for q in config.spec.qubits
            ],
            "interactions": [
                {"j": t.j, "k": t.k, "ux": t.ux, "uy": t.uy, "uz": t.uz}
                for t in config.spec.interactions
            ],
            "topology_tag": config.spec.topology_tag,
        }
    out["init"] = {"kind": config.init.kind, "seed": config.init.seed}
    if config.output_path:
        out["output_path"] = config.output_path
    return out

"""Parameter-sweep runner: steady state + synchronization report per grid
point, row-major ordering, incremental flushing and resume.

Axis paths understood by :func:`apply_axis_value`:

* ``qubits[J].omega`` / ``qubits[J].gamma_gain`` / ``qubits[J].gamma_damp``
* ``qubits[J].m``   -- set qubit J's rates from a magnetization (fix the
  unit rate on the gain side for m >= 0, damping side for m < 0)
* ``env.m``         -- set the base environment qubit from a magnetization
  and scale the remaining environment qubits by configured multipliers
  (``command_params["env"]``)
* ``delta``         -- symmetric two-qubit detuning (omega_0 - omega_1)
* ``coupling.xy``   -- set ux = uy on every interaction
* ``coupling.z``    -- set uz on every interaction
* ``coupling.u``    -- set ux = uy = uz on every interaction
"""

import itertools
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ConfigError, RunConfig, parse_spec
from .liouville import Liouvillian, SteadyStateError, steady_state
from .model import rates_for_magnetization
from .output import IncrementalCsvWriter, count_data_rows
from .sync import sync_report

__all__ = ["SweepGrid", "axis_values", "apply_axis_value", "sweep_columns", "run_sweep"]

_QUBIT_FIELD = re.compile(r"^qubits\[(\d+)\]\.(omega|gamma_gain|gamma_damp|m)$")


@dataclass
class SweepGrid:
    axes: list  # [(path, ndarray of values)]
    columns: list
    rows: list = field(default_factory=list)
    n_failed: int = 0
    resumed_rows: int = 0


def axis_values(axis_doc, path="command_params.axes") -> np.ndarray:
    if "values" in axis_doc:
        vals = np.asarray(axis_doc["values"], dtype=float)
    else:
        try:
            count = int(axis_doc["count"])
            vals = np.linspace(float(axis_doc["start"]), float(axis_doc["stop"]), count)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(path, f"axis needs values or start/stop/count: {exc}") from exc
    if vals.size == 0:
        raise ConfigError(path, "axis range is empty")
    return vals


def apply_axis_value(spec_doc: dict, path: str, value: float, params: dict):
    """Mutate a plain spec dict so that the named parameter takes ``value``."""
    m = _QUBIT_FIELD.match(path)
    if m:
        idx, fieldname = int(m.group(1)), m.group(2)
        if idx >= len(spec_doc["qubits"]):
            raise ConfigError(path, f"qubit index {idx} out of range")
        q = spec_doc["qubits"][idx]
        if fieldname == "m":
            q["gamma_gain"], q["gamma_damp"] = rates_for_magnetization(value)
        else:
            q[fieldname] = value
        return
    if path == "env.m":
        env = params.get("env")
        if not env:
            raise ConfigError("command_params.env", "env.m axis needs an env block")
        base = env["base_site"]
        g, d = rates_for_magnetization(value)
        spec_doc["qubits"][base]["gamma_gain"] = g
        spec_doc["qubits"][base]["gamma_damp"] = d
        for site, mg, md in zip(env["sites"], env["gain_multipliers"], env["damp_multipliers"]):
            spec_doc["qubits"][site]["gamma_gain"] = mg * g
            spec_doc["qubits"][site]["gamma_damp"] = md * d
        return
    if path == "delta":
        if len(spec_doc["qubits"]) != 2:
            raise ConfigError(path, "delta axis applies to two-qubit specs")
        spec_doc["qubits"][0]["omega"] = value / 2.0
        spec_doc["qubits"][1]["omega"] = -value / 2.0
        return
    if path in ("coupling.xy", "coupling.z", "coupling.u"):
        for term in spec_doc["interactions"]:
            if path in ("coupling.xy", "coupling.u"):
                term["ux"] = value
                term["uy"] = value
            if path in ("coupling.z", "coupling.u"):
                term["uz"] = value
        return
    raise ConfigError(path, "unknown sweep axis path")


def sweep_columns(axis_paths, n_qubits) -> list:
    cols = list(axis_paths) + ["s_total"]
    for j in range(n_qubits):
        for k in range(j + 1, n_qubits):
            cols += [f"s_max_{j}_{k}", f"phi0_{j}_{k}", f"ff_re_{j}_{k}", f"ff_im_{j}_{k}"]
    cols += ["residual_norm", "kernel_dim", "status"]
    return cols


def _base_spec_doc(config: RunConfig) -> dict:
    spec = config.spec
    return {
        "qubits": [
            {"omega": q.omega, "gamma_gain": q.gamma_gain, "gamma_damp": q.gamma_damp}
            for q in spec.qubits
        ],
        "interactions": [
            {"j": t.j, "k": t.k, "ux": t.ux, "uy": t.uy, "uz": t.uz} for t in spec.interactions
        ],
        "topology_tag": spec.topology_tag,
    }


def evaluate_point(spec_doc: dict, params: dict) -> dict:
    """One grid point: steady state + synchronization report."""
    spec = parse_spec(spec_doc)
    n = spec.n_qubits
    out = {"status": "ok"}
    try:
        liouv = Liouvillian.from_spec(spec)
        result = steady_state(
            liouv,
            method=params.get("method", "auto"),
            tol=params.get("tol", 1e-8),
            t_max=params.get("t_max", 1e5),
        )
        report = sync_report(result.rho_ss, spec)
        out["s_total"] = report.total
        for (j, k), entry in report.per_pair.items():
            out[f"s_max_{j}_{k}"] = entry["s_max"]
            out[f"phi0_{j}_{k}"] = entry["phi0"]
            out[f"ff_re_{j}_{k}"] = entry["flip_flop"].real
            out[f"ff_im_{j}_{k}"] = entry["flip_flop"].imag
        out["residual_norm"] = result.residual_norm
        out["kernel_dim"] = result.kernel_dim
    except (SteadyStateError, np.linalg.LinAlgError) as exc:
        out["status"] = "failed"
        out["error"] = str(exc)
        out["s_total"] = math.nan
        for j in range(n):
            for k in range(j + 1, n):
                for c in (f"s_max_{j}_{k}", f"phi0_{j}_{k}", f"ff_re_{j}_{k}", f"ff_im_{j}_{k}"):
                    out[c] = math.nan
        out["residual_norm"] = math.nan
        out["kernel_dim"] = 0
    return out


def _point_job(args):
    spec_doc, params, paths, values = args
    doc = {
        "qubits": [dict(q) for q in spec_doc["qubits"]],
        "interactions": [dict(t) for t in spec_doc["interactions"]],
        "topology_tag": spec_doc["topology_tag"],
    }
    for path, value in zip(paths, values):
        apply_axis_value(doc, path, value, params)
    return evaluate_point(doc, params)


def run_sweep(config: RunConfig, resume: bool = False, writer_path=None) -> SweepGrid:
    """Evaluate the grid row-major; flush each row; optionally resume.

    Resume counts the complete rows already in the output file, recomputes
    nothing for them, and appends the remainder, so an interrupted sweep
    continues byte-identically.
    """
    params = config.command_params
    axes_doc = params.get("axes")
    if not axes_doc:
        raise ConfigError("command_params.axes", "sweep needs at least one axis")
    paths = [a["path"] for a in axes_doc]
    values = [axis_values(a) for a in axes_doc]
    base_doc = _base_spec_doc(config)

    # validate every axis against the base spec before burning CPU
    probe = [dict(q) for q in base_doc["qubits"]]
    for path, vals in zip(paths, values):
        apply_axis_value(
            {"qubits": probe, "interactions": [dict(t) for t in base_doc["interactions"]],
             "topology_tag": base_doc["topology_tag"]},
            path, float(vals[0]), params,
        )

    n = config.spec.n_qubits
    columns = sweep_columns(paths, n)
    grid = SweepGrid(axes=list(zip(paths, values)), columns=columns)
    points = list(itertools.product(*[range(v.size) for v in values]))

    skip = 0
    path_out = writer_path or config.output_path
    if resume and path_out:
        skip = count_data_rows(path_out, columns)
        if skip > len(points):
            raise ConfigError("output_path", "existing output has more rows than the grid")
    grid.resumed_rows = skip

    writer = None
    if path_out:
        comments = [
            "parameter sweep: steady state + synchronization per grid point",
            "axes (row-major, first axis slowest): " + ", ".join(paths),
            "s_total: sum over pairs of (pi/16)|<s+ s->|;"
            " phi0: locked phase [rad]; ff: flip-flop correlation",
        ]
        writer = IncrementalCsvWriter(path_out, comments, columns, append=skip > 0)

    jobs = []
    for flat_idx in range(skip, len(points)):
        idx = points[flat_idx]
        vals = [float(values[a][i]) for a, i in enumerate(idx)]
        jobs.append((base_doc, params, paths, vals))

    def emit(vals, result):
        row = [*vals] + [result[c] for c in columns[len(paths):]]
        grid.rows.append(dict(zip(columns, row)))
        if result["status"] == "failed":
            grid.n_failed += 1
        if writer is not None:
            writer.write_row(row)

    try:
        if config.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                for job, result in zip(jobs, pool.map(_point_job, jobs, chunksize=1)):
                    emit(job[3], result)
        else:
            for job in jobs:
                emit(job[3], _point_job(job))
    finally:
        if writer is not None:
            writer.close()
    return grid

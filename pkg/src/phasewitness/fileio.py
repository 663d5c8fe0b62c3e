"""Reading and writing states, reports, scan tables and click data."""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from ._validation import DomainError
from .detector import ArraySpec, ClickDistribution
from .states import FockDensityMatrix, GaussianState, SqueezedFockState

REPORT_SCHEMA = 1


class FormatError(ValueError):
    """Malformed input file (as opposed to a physically invalid state)."""


def _complex_pair(value, name):
    try:
        re, im = value
        return complex(float(re), float(im))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{name} must be a [re, im] pair") from exc


def _require(obj, key, kind):
    if key not in obj:
        raise FormatError(f"{kind} state is missing '{key}'")
    return obj[key]


def state_from_dict(obj):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FormatError("state must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "gaussian":
        disp = obj.get("displacement", [0.0, 0.0])
        return GaussianState(
            float(_require(obj, "purity", kind)),
            float(obj.get("squeezing", 0.0)),
            float(obj.get("phase", 0.0)),
            _complex_pair(disp, "displacement"),
        )
    if kind == "fock":
        dim = _require(obj, "dim", kind)
        if not isinstance(dim, int) or dim < 1:
            raise FormatError("'dim' must be a positive integer")
        raw = np.asarray(_require(obj, "entries", kind), dtype=float)
        if raw.size != 2 * dim * dim or raw.shape[-1] != 2:
            raise FormatError(f"'entries' must hold {dim * dim} [re, im] pairs")
        pairs = raw.reshape(dim * dim, 2)
        return FockDensityMatrix((pairs[:, 0] + 1j * pairs[:, 1]).reshape(dim, dim))
    if kind == "squeezed_fock":
        base = state_from_dict(_require(obj, "base", kind))
        if not isinstance(base, FockDensityMatrix):
            raise FormatError("'base' of a squeezed_fock state must be a fock state")
        return SqueezedFockState(base, float(obj.get("squeezing", 0.0)), float(obj.get("phase", 0.0)))
    raise FormatError(f"unknown state kind {kind!r}")


def state_to_dict(state) -> dict:
    if isinstance(state, GaussianState):
        d = state.displacement
        return {
            "kind": "gaussian",
            "purity": state.purity,
            "squeezing": state.squeezing,
            "phase": state.phase,
            "displacement": [d.real, d.imag],
        }
    if isinstance(state, FockDensityMatrix):
        flat = state.entries.ravel()
        return {"kind": "fock", "dim": state.dim, "entries": [[float(v.real), float(v.imag)] for v in flat]}
    if isinstance(state, SqueezedFockState):
        return {
            "kind": "squeezed_fock",
            "squeezing": state.squeezing,
            "phase": state.phase,
            "base": state_to_dict(state.base),
        }
    raise TypeError(f"unsupported state type {type(state).__name__}")


def load_state(path):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read state file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"state file {path} is not valid JSON: {exc}") from exc
    return state_from_dict(obj)


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def dumps_report(payload: dict) -> str:
    """Deterministic JSON text with the schema tag added."""
    body = dict(payload)
    body["schema"] = REPORT_SCHEMA
    return json.dumps(_plain(body), sort_keys=True, indent=2, allow_nan=False) + "\n"


def fmt(x) -> str:
    """12 significant digits, lowercase scientific."""
    return f"{float(x):.11e}"


def dumps_table(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def dumps_clicks(clicks: ClickDistribution, stderr=None, shots=None, seed=None) -> str:
    a = clicks.displacement
    lines = [
        f"# detectors={clicks.spec.detectors}",
        f"# efficiency={fmt(clicks.spec.efficiency)}",
        f"# alpha={fmt(a.real)},{fmt(a.imag)}",
        f"# shots={'exact' if shots is None else shots}",
        f"# seed={'none' if seed is None else seed}",
    ]
    err = np.zeros(clicks.probs.size) if stderr is None else np.asarray(stderr, dtype=float)
    rows = [(k, float(p), float(e)) for k, (p, e) in enumerate(zip(clicks.probs, err))]
    return "\n".join(lines) + "\n" + dumps_table(["k", "p_k", "stderr_k"], rows)


def loads_clicks(text: str):
    """Parse click CSV; returns ``(ClickDistribution, stderr, header)``."""
    header = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, val = line[1:].strip().partition("=")
            if not sep:
                raise FormatError(f"bad header line {line!r}")
            header[key.strip()] = val.strip()
        elif line.strip():
            body.append(line)
    for key in ("detectors", "efficiency", "alpha"):
        if key not in header:
            raise FormatError(f"click file header is missing '{key}'")
    try:
        re, im = (float(v) for v in header["alpha"].split(","))
        spec = ArraySpec(int(header["detectors"]), float(header["efficiency"]))
        rows = list(csv.DictReader(body))
        ks = [int(r["k"]) for r in rows]
        probs = np.array([float(r["p_k"]) for r in rows])
        stderr = np.array([float(r.get("stderr_k") or 0.0) for r in rows])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"malformed click file: {exc}") from exc
    if ks != list(range(spec.detectors + 1)):
        raise FormatError("click rows must list k = 0 .. N in order")
    try:
        clicks = ClickDistribution(probs, spec, complex(re, im))
    except DomainError as exc:
        raise FormatError(str(exc)) from exc
    return clicks, stderr, header

"""File formats: curve and map JSON, report envelopes, CSV and SVG views."""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .curves import ClosedCurve
from .errors import CurveError, InputError
from .parametrize import BoundaryMap

__all__ = [
    "curve_from_dict",
    "curve_to_dict",
    "dumps",
    "envelope",
    "file_hash",
    "load_curve",
    "load_json",
    "load_map",
    "map_svg",
    "write_text",
]


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _finite(obj):
    # JSON has no inf/nan; spell them as strings so strict parsers accept the file
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    plain = json.loads(json.dumps(obj, default=_plain))
    return json.dumps(_finite(plain), indent=2, sort_keys=True, allow_nan=False) + "\n"


def file_hash(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def envelope(argv, seed, metric, inputs, result) -> dict:
    """Wrap a result with what is needed to reproduce it."""
    return {
        "tool": {"name": "tqc", "version": __version__},
        "command": list(argv),
        "seed": seed,
        "metric": metric,
        "inputs": {str(p): file_hash(p) for p in inputs},
        "result": result,
    }


def write_text(path, text: str):
    if path in (None, "-"):
        print(text, end="")
    else:
        Path(path).write_text(text)


def load_json(path, what: str = "input"):
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path} is not valid JSON (line {exc.lineno}, column {exc.colno})") from exc


def curve_to_dict(curve: ClosedCurve) -> dict:
    return {"closed": True, "orientation": curve.orientation, "vertices": curve.vertices.tolist()}


def curve_from_dict(d, where: str = "curve") -> ClosedCurve:
    if not isinstance(d, dict):
        raise InputError(f"{where}: expected a JSON object")
    if "vertices" not in d:
        raise InputError(f"{where}: missing field 'vertices'")
    if d.get("closed", True) is not True:
        raise InputError(f"{where}: field 'closed' must be true")
    orient = d.get("orientation", "")
    if orient not in ("", "ccw", "cw"):
        raise InputError(f"{where}: field 'orientation' must be 'ccw' or 'cw', got {orient!r}")
    try:
        v = np.asarray(d["vertices"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: field 'vertices' must be a list of [x, y] number pairs") from exc
    if v.ndim != 2 or v.shape[1] != 2:
        raise InputError(f"{where}: field 'vertices' must be a list of [x, y] number pairs")
    try:
        return ClosedCurve(v, orient)
    except CurveError as exc:
        raise InputError(f"{where}: field 'vertices': {exc}") from exc


def load_curve(path) -> ClosedCurve:
    return curve_from_dict(load_json(path, "curve"), f"curve file {path}")


def load_map(path, source_curve: ClosedCurve | None = None) -> BoundaryMap:
    d = load_json(path, "map")
    where = f"map file {path}"
    if not isinstance(d, dict):
        raise InputError(f"{where}: expected a JSON object")
    if "samples" not in d:
        raise InputError(f"{where}: missing field 'samples'")
    samples = d["samples"]
    if not isinstance(samples, list):
        raise InputError(f"{where}: field 'samples' must be a list")
    for i, s in enumerate(samples):
        for key in ("theta", "x", "y"):
            if not isinstance(s, dict) or key not in s:
                raise InputError(f"{where}: samples[{i}] is missing field '{key}'")
            if not isinstance(s[key], (int, float)) or isinstance(s[key], bool):
                raise InputError(f"{where}: field 'samples[{i}].{key}' must be a number")
    for key, allowed in (("kind", ("tree", "arclength", "reparametrized", "conformal")),
                         ("metric", ("chordal", "arclength"))):
        if key in d and d[key] not in allowed:
            raise InputError(f"{where}: field '{key}' must be one of {allowed}")
    try:
        return BoundaryMap.from_dict(d, source_curve)
    except CurveError as exc:
        raise InputError(f"{where}: field 'samples': {exc}") from exc


def map_svg(m, size: int = 480, circles=(0.25, 0.5, 0.75, 0.9, 0.97), rays: int = 16) -> str:
    """Domain outline with the images of polar circles and radii under a disk map."""
    from .conformal.zipper import eval_map

    v = m.domain_curve.vertices
    lo, hi = v.min(axis=0), v.max(axis=0)
    span = float(max(hi - lo))
    pad = 0.05 * span

    def xy(p):
        x = (p[:, 0] - lo[0] + pad) / (span + 2 * pad) * size
        y = size - (p[:, 1] - lo[1] + pad) / (span + 2 * pad) * size
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y))

    def path(z):
        return np.column_stack([np.real(z), np.imag(z)])

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
             f'<polygon points="{xy(v)}" fill="none" stroke="black" stroke-width="1"/>']
    th = np.linspace(0.0, 2.0 * np.pi, 257)
    for r in circles:
        w = eval_map(m, r * np.exp(1j * th))
        lines.append(f'<polyline points="{xy(path(w))}" fill="none" stroke="steelblue" stroke-width="0.6"/>')
    rad = np.linspace(0.0, 0.97, 64)
    for k in range(rays):
        w = eval_map(m, rad * np.exp(2j * np.pi * k / rays))
        lines.append(f'<polyline points="{xy(path(w))}" fill="none" stroke="indianred" stroke-width="0.6"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"

"""CSV / JSON writers with round-trip exact floats."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(fmt(r[k]) for k in header) for r in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def clean(obj):
    """JSON-ready copy: numpy scalars unwrapped, non-finite floats as null."""
    if isinstance(obj, dict):
        return {k: clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path, obj) -> None:
    # repr floats are the shortest strings that round-trip exactly
    text = json.dumps(clean(obj), indent=2, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def state_snapshot(s) -> dict:
    """Field dump; every array is flattened row-major with x fastest."""
    return {
        "layout": "row-major, x-fastest",
        "nx": s.nx, "ny": s.ny, "a": s.a, "dt": s.dt, "t": s.t,
        "psi_re": s.psi.real.ravel(), "psi_im": s.psi.imag.ravel(),
        "A1": s.A1.ravel(), "A2": s.A2.ravel(), "E1": s.E1.ravel(), "E2": s.E2.ravel(),
    }


def sidecar(out, suffix: str) -> Path:
    out = Path(out)
    return out.with_name(out.stem + suffix)

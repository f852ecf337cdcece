"""Deterministic CSV/JSON output with run manifests.

Data files depend only on the manifest: numbers are printed with 12
significant digits and nothing time-dependent is written into them.  The
wall-clock time goes to a sidecar ``<out>.manifest.json``.
"""
from dataclasses import dataclass, field
import csv
import io
import json
import math
import os

import numpy as np

from . import __version__

__all__ = ["Result", "RunManifest", "emit_report", "format_value", "csv_text", "json_text",
           "ReportError"]


class ReportError(OSError):
    pass


@dataclass
class Result:
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    seed: int = None
    version: str = __version__
    outputs: list = field(default_factory=list)

    def as_dict(self):
        return {"subcommand": self.subcommand, "parameters": self.parameters, "seed": self.seed,
                "version": self.version, "outputs": self.outputs}


def format_value(v):
    """Text form used in CSV cells: 12 significant digits for reals."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.12g" % v
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v) or math.isinf(v):
            return format_value(v)
        return float("%.12g" % v)
    return v


def csv_text(result):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def json_text(result, manifest):
    obj = {"manifest": _jsonable(manifest.as_dict()), "columns": list(result.columns),
           "rows": _jsonable(result.rows), "summary": _jsonable(result.summary)}
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    json.loads(text)  # self-validation
    return text


def emit_report(result, fmt, path, manifest, wall_clock=None, extra=None):
    """Write the data file and its manifest sidecar; returns both paths."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    manifest.outputs = [os.path.basename(path)]
    text = csv_text(result) if fmt == "csv" else json_text(result, manifest)
    side = path + ".manifest.json"
    meta = dict(manifest.as_dict(), outputs=[os.path.abspath(path)], format=fmt)
    if wall_clock is not None:
        meta["wall_clock_seconds"] = wall_clock
    if extra:
        meta.update(extra)
    try:
        d = os.path.dirname(os.path.abspath(path))
        os.makedirs(d, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
        with open(side, "w") as fh:
            fh.write(json.dumps(_jsonable(meta), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc
    return path, side

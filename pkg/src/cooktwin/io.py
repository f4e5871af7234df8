"""CSV emission, snapshot dumps and run manifests.

All text output is byte-deterministic for a fixed configuration: values
print with 9 significant digits, newline-terminated lines, no locale
dependence.
"""

import json
import os
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError

TIMESERIES_COLUMNS = ("t_s", "T_in_K", "T_core_K", "T_surface_K",
                      "T_probe_K", "C_mean", "mass_balance")


def _fmt(v):
    return f"{float(v):.9g}"


def write_csv(columns: dict, path):
    """Write named columns; 9 significant digits, deterministic bytes."""
    names = list(columns)
    arrays = [np.asarray(columns[n], float) for n in names]
    n = arrays[0].size
    if n == 0:
        raise ValueError("refusing to write an empty series")
    if any(a.size != n for a in arrays):
        raise ValueError("columns differ in length")
    lines = [",".join(names)]
    for i in range(n):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def write_timeseries_csv(series, path):
    """Emit a TimeSeries in the canonical column schema.

    An extra conv_mult column is appended when the run carried a
    convection-multiplier channel.
    """
    write_csv(series.columns(), path)


def read_csv(path):
    """Read a CSV written by write_csv back into named float arrays."""
    text = Path(path).read_text(encoding="ascii").strip().splitlines()
    if not text:
        raise ConfigError(f"{path}: empty file")
    names = text[0].split(",")
    rows = [ln.split(",") for ln in text[1:]]
    if any(len(r) != len(names) for r in rows):
        raise ConfigError(f"{path}: ragged rows")
    data = np.array([[float(v) for v in r] for r in rows])
    return {name: data[:, i] for i, name in enumerate(names)}


def write_snapshot(path, field_name, data, spacing, t):
    """Cell snapshot: small text header, then raw little-endian float64."""
    header = (f"cooktwin-snapshot v1\nfield {field_name}\n"
              f"dims {data.shape[0]} {data.shape[1]} {data.shape[2]}\n"
              f"spacing {spacing!r}\ntime {t!r}\n\n")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


def read_snapshot(path):
    raw = Path(path).read_bytes()
    head, _, body = raw.partition(b"\n\n")
    meta = {}
    for line in head.decode("ascii").splitlines()[1:]:
        key, _, rest = line.partition(" ")
        meta[key] = rest
    dims = tuple(int(v) for v in meta["dims"].split())
    data = np.frombuffer(body, dtype="<f8").reshape(dims)
    return meta, data


def write_manifest(out_dir, config_echo: dict, timing_s: float,
                   convergence: dict, files: list):
    """Run manifest: resolved config echo plus provenance, JSON text.

    Written before a run is considered successful; carries everything
    needed to reproduce it.
    """
    from .kernels import BACKEND
    manifest = {
        "artifact": {"name": "cooktwin", "version": __version__},
        "backend": BACKEND,
        "threads": 1,
        "timing_s": round(timing_s, 3),
        "convergence": convergence,
        "config": config_echo,
        "files": [{"name": os.path.basename(str(f)),
                   "bytes": os.path.getsize(f)} for f in files],
        "written_unix": int(time.time()),
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n",
                    encoding="ascii")
    return path

"""Output formats: CSV tables, JSON run records, gnuplot scripts, binary blocks.

Binary layout (all little-endian)::

    8 bytes   magic  b"SYNTURB\\0"
    u32       format version
    u32       header length n
    n bytes   UTF-8 JSON header (sorted keys); ``arrays`` lists name, shape
    ...       float64 payload of every array in header order
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import struct
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .pairdisp import PairEnsemble
from .params import SpectrumParams
from .synthfield import ModeSet, SpectralField
from .rng import stream

__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "FormatError",
    "format_float",
    "csv_text",
    "write_csv",
    "write_json",
    "json_text",
    "gnuplot_script",
    "write_block",
    "read_block",
    "save_field",
    "load_field",
    "save_ensemble",
    "load_ensemble",
    "ensemble_rows",
]

MAGIC = b"SYNTURB\0"
FORMAT_VERSION = 1


class FormatError(ValueError):
    pass


def format_float(v) -> str:
    """Shortest round-trip repr; integers and strings pass through."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(list(header))
    for row in rows:
        w.writerow([format_float(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """RFC-4180 CSV with a header row and CRLF line endings."""
    path = Path(path)
    path.write_bytes(csv_text(header, rows).encode("utf-8"))
    return path


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_bytes(json_text(obj).encode("utf-8"))
    return path


def gnuplot_script(csv_name: str, x: str, ys: Sequence[str], header: Sequence[str], *,
                   logx=False, logy=False, title: str = "") -> str:
    """Plot columns ``ys`` against ``x`` of a CSV written by :func:`write_csv`."""
    col = {name: i + 1 for i, name in enumerate(header)}
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'" if title else "unset title",
        f"set xlabel '{x}'",
    ]
    if logx:
        lines.append("set logscale x")
    if logy:
        lines.append("set logscale y")
    plots = [f"'{csv_name}' using {col[x]}:{col[y]} with linespoints title '{y}'" for y in ys]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


# binary -----------------------------------------------------------------


def write_block(path, header: dict, arrays: Mapping[str, np.ndarray]) -> Path:
    hdr = dict(header)
    hdr["arrays"] = [{"name": k, "shape": list(np.shape(v))} for k, v in arrays.items()]
    raw = json.dumps(_jsonable(hdr), sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(raw)))
        fh.write(raw)
        for v in arrays.values():
            fh.write(np.ascontiguousarray(v, dtype="<f8").tobytes())
    return Path(path)


def read_block(path):
    """Return ``(header, arrays)``; rejects unknown magic or newer versions."""
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise FormatError("not a synturb binary block")
    version, n = struct.unpack("<II", data[8:16])
    if version > FORMAT_VERSION:
        raise FormatError(f"format version {version} is newer than supported {FORMAT_VERSION}")
    hdr = json.loads(data[16:16 + n].decode("utf-8"))
    off = 16 + n
    arrays = {}
    for spec in hdr["arrays"]:
        shape = tuple(spec["shape"])
        cnt = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(data, dtype="<f8", count=cnt, offset=off).reshape(shape)
        arrays[spec["name"]] = arr.astype(float)
        off += 8 * cnt
    if off != len(data):
        raise FormatError("trailing or missing payload bytes")
    return hdr, arrays


def save_field(path, field: SpectralField) -> Path:
    m = field.modes
    header = {
        "kind": "field",
        "params": field.params.to_dict(),
        "band": list(m.band),
        "n_modes": m.n_modes,
        "n_real": m.n_real,
        "seed": field.seed,
        "time": field.time,
    }
    amp = np.stack([field.amp.real, field.amp.imag], axis=-1)
    arrays = {
        "wavevectors": m.wavevectors, "weights": m.weights, "ou_rates": m.ou_rates,
        "std": m.std, "basis": m.basis, "amplitude": amp,
    }
    return write_block(path, header, arrays)


def load_field(path) -> SpectralField:
    """Rebuild a field snapshot; its generator restarts from the stored seed."""
    hdr, arr = read_block(path)
    if hdr.get("kind") != "field":
        raise FormatError("block does not hold a field")
    p = SpectrumParams(**hdr["params"])
    modes = ModeSet(arr["wavevectors"], arr["weights"], arr["ou_rates"], arr["std"],
                    arr["basis"], tuple(hdr["band"]))
    amp = arr["amplitude"][..., 0] + 1j * arr["amplitude"][..., 1]
    seed = hdr.get("seed")
    rng = stream(seed if seed is not None else 0, "field", "replay")
    return SpectralField(p, modes, amp, float(hdr["time"]), rng, seed)


def save_ensemble(path, ens: PairEnsemble) -> Path:
    header = {
        "kind": "ensemble",
        "model": ens.model,
        "seed": ens.seed,
        "kappa": ens.kappa,
        "params": ens.params.to_dict() if ens.params is not None else None,
        "rescale": ens.rescale.to_dict() if ens.rescale is not None else None,
        "meta": ens.meta,
    }
    return write_block(path, header, {"times": ens.times, "x0": ens.x0, "traj": ens.traj})


def load_ensemble(path) -> PairEnsemble:
    hdr, arr = read_block(path)
    if hdr.get("kind") != "ensemble":
        raise FormatError("block does not hold an ensemble")
    p = SpectrumParams(**hdr["params"]) if hdr.get("params") else None
    return PairEnsemble(times=arr["times"], traj=arr["traj"], x0=arr["x0"], seed=hdr["seed"],
                        model=hdr["model"], params=p, kappa=hdr["kappa"], meta=hdr["meta"])


def ensemble_rows(ens: PairEnsemble, pairs: Optional[Sequence[int]] = None):
    """Rows ``(t, pair_id, x1, ..., xd)`` for trajectory CSV output."""
    idx = range(ens.n_pairs) if pairs is None else pairs
    for i in idx:
        for j, t in enumerate(ens.times):
            yield (float(t), int(i), *[float(v) for v in ens.traj[i, j]])

"""JSON readers and writers for modules, barcodes, zigzags, graphs and paths.

Readers check the schema and raise :class:`SchemaError` with a message that
names the offending field. Writers are deterministic and go through
:func:`write_json`, which replaces the target atomically.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from .blocks import KIND_ORDER, Barcode, Shape
from .errors import PDecompError, SchemaError
from .field import PrimeField
from .grid import GridModule, PathModule
from .interlevel import LabeledGraph
from .zigzag import IntervalBarcode, Zigzag


def read_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def write_text(path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj: Any) -> None:
    write_text(path, json.dumps(obj, indent=1) + "\n")


# -- schema helpers ---------------------------------------------------------


def _obj(data, where: str, keys: Sequence[str], optional: Sequence[str] = ()) -> dict:
    if not isinstance(data, dict):
        raise SchemaError(f"{where}: expected an object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise SchemaError(f"{where}: missing key {missing[0]!r}")
    extra = sorted(set(data) - set(keys) - set(optional))
    if extra:
        raise SchemaError(f"{where}: unexpected key {extra[0]!r}")
    return data


def _int(v, where: str, lo: Optional[int] = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{where}: expected an integer")
    if lo is not None and v < lo:
        raise SchemaError(f"{where}: must be at least {lo}")
    return v


def _list(v, where: str) -> list:
    if not isinstance(v, list):
        raise SchemaError(f"{where}: expected a list")
    return v


def _field(v) -> PrimeField:
    p = _int(v, "p", 2)
    try:
        return PrimeField(p)
    except ValueError as exc:
        raise SchemaError(f"p: {exc}") from None


def _matrix(v, shape: tuple[int, int], p: int, where: str) -> np.ndarray:
    rows = _list(v, where)
    if shape[0] == 0 or shape[1] == 0:
        if any(_list(r, where) for r in rows) or len(rows) not in (0, shape[0]):
            raise SchemaError(f"{where}: expected an empty {shape[0]}x{shape[1]} matrix")
        return np.zeros(shape, dtype=np.int64)
    if len(rows) != shape[0]:
        raise SchemaError(f"{where}: expected {shape[0]} rows, got {len(rows)}")
    out = np.zeros(shape, dtype=np.int64)
    for i, row in enumerate(rows):
        row = _list(row, where)
        if len(row) != shape[1]:
            raise SchemaError(f"{where}: row {i} has {len(row)} entries, expected {shape[1]}")
        for j, e in enumerate(row):
            e = _int(e, f"{where}[{i}][{j}]", 0)
            if e >= p:
                raise SchemaError(f"{where}[{i}][{j}]: entry {e} is not below p = {p}")
            out[i, j] = e
    return out


def _matrix_out(mat: np.ndarray) -> list[list[int]]:
    return [[int(e) for e in row] for row in mat]


# -- grid modules -----------------------------------------------------------


def module_to_json(M: GridModule) -> dict:
    def maps(d):
        return {f"{x},{y}": _matrix_out(mat) for (x, y), mat in sorted(d.items()) if mat.size}

    return {
        "p": M.p,
        "n": M.n,
        "m": M.m,
        "dims": [[int(d) for d in row] for row in M.dims],
        "hmaps": maps(M.hmaps),
        "vmaps": maps(M.vmaps),
    }


def _point_key(key: str, where: str) -> tuple[int, int]:
    parts = key.split(",")
    try:
        x, y = (int(c) for c in parts)
    except ValueError:
        raise SchemaError(f"{where}: bad point key {key!r}") from None
    return x, y


def module_from_json(data) -> GridModule:
    data = _obj(data, "module", ["p", "n", "m", "dims", "hmaps", "vmaps"])
    F = _field(data["p"])
    n, m = _int(data["n"], "n", 0), _int(data["m"], "m", 0)
    dims = _list(data["dims"], "dims")
    if len(dims) != n + 1 or any(len(_list(r, "dims")) != m + 1 for r in dims):
        raise SchemaError(f"dims: expected {n + 1} rows of {m + 1} entries")
    dims = np.array([[_int(d, "dims", 0) for d in row] for row in dims], dtype=np.int64).reshape(n + 1, m + 1)
    out = {}
    for name, step in (("hmaps", (1, 0)), ("vmaps", (0, 1))):
        given = data[name]
        if not isinstance(given, dict):
            raise SchemaError(f"{name}: expected an object")
        mats = {}
        for key, val in given.items():
            x, y = _point_key(key, name)
            if not (0 <= x <= n - step[0] and 0 <= y <= m - step[1]):
                raise SchemaError(f"{name}: edge {key!r} is not on the grid")
            shape = (int(dims[x + step[0], y + step[1]]), int(dims[x, y]))
            mats[(x, y)] = _matrix(val, shape, F.p, f"{name}[{key}]")
        for x in range(n + 1 - step[0]):
            for y in range(m + 1 - step[1]):
                if (x, y) in mats:
                    continue
                shape = (int(dims[x + step[0], y + step[1]]), int(dims[x, y]))
                if shape[0] and shape[1]:
                    raise SchemaError(f"{name}: missing nonempty map at {x},{y}")
                mats[(x, y)] = np.zeros(shape, dtype=np.int64)
        out[name] = mats
    return GridModule(F, n, m, dims, out["hmaps"], out["vmaps"])


# -- barcodes -----------------------------------------------------------------


def barcode_to_json(B: Barcode, levels: Optional[Sequence[float]] = None) -> dict:
    data: dict[str, Any] = {
        "n": B.n,
        "m": B.m,
        "blocks": [{"kind": s.kind, "a": s.a, "b": s.b, "mult": k} for s, k in B.items()],
    }
    if levels is not None:
        data["levels"] = [float(c) for c in levels]
    return data


def barcode_from_json(data) -> Barcode:
    data = _obj(data, "barcode", ["n", "m", "blocks"], optional=["levels"])
    n, m = _int(data["n"], "n", 0), _int(data["m"], "m", 0)
    entries: dict[Shape, int] = {}
    for i, blk in enumerate(_list(data["blocks"], "blocks")):
        where = f"blocks[{i}]"
        blk = _obj(blk, where, ["kind", "a", "b", "mult"])
        kind = blk["kind"]
        if not isinstance(kind, str) or kind not in KIND_ORDER:
            raise SchemaError(f"{where}: kind must be one of b, d, h, v")
        shape = Shape(kind, _int(blk["a"], where + ".a"), _int(blk["b"], where + ".b"))
        if not shape.is_canonical(n, m):
            raise SchemaError(f"{where}: {shape!r} is not canonical on the {n}x{m} grid")
        entries[shape] = entries.get(shape, 0) + _int(blk["mult"], where + ".mult", 1)
    return Barcode(n, m, entries)


def barcode_levels(data) -> Optional[list[float]]:
    levels = data.get("levels") if isinstance(data, dict) else None
    if levels is None:
        return None
    return [_float(v, "levels") for v in _list(levels, "levels")]


# -- zigzags and intervals ----------------------------------------------------


def zigzag_to_json(Z: Zigzag) -> dict:
    return {
        "p": Z.field.p,
        "dims": list(Z.dims),
        "maps": [{"dir": d, "mat": _matrix_out(mat)} for d, mat in Z.maps],
    }


def zigzag_from_json(data) -> Zigzag:
    data = _obj(data, "zigzag", ["p", "dims", "maps"])
    F = _field(data["p"])
    dims = [_int(d, "dims", 0) for d in _list(data["dims"], "dims")]
    if not dims:
        raise SchemaError("dims: a zigzag needs at least one space")
    raw = _list(data["maps"], "maps")
    if len(raw) != len(dims) - 1:
        raise SchemaError(f"maps: {len(dims)} spaces need {len(dims) - 1} maps, got {len(raw)}")
    maps = []
    for i, entry in enumerate(raw):
        where = f"maps[{i}]"
        entry = _obj(entry, where, ["dir", "mat"])
        d = entry["dir"]
        if d not in ("fwd", "bwd"):
            raise SchemaError(f"{where}.dir: expected 'fwd' or 'bwd'")
        src, dst = (i, i + 1) if d == "fwd" else (i + 1, i)
        maps.append((d, _matrix(entry["mat"], (dims[dst], dims[src]), F.p, where + ".mat")))
    return Zigzag(F, tuple(dims), tuple(maps))


def intervals_to_json(I: IntervalBarcode) -> dict:
    return {"length": I.length, "intervals": [{"i": i, "j": j, "mult": k} for (i, j), k in I.items()]}


def intervals_from_json(data) -> IntervalBarcode:
    data = _obj(data, "intervals", ["length", "intervals"])
    L = _int(data["length"], "length", 0)
    entries: dict[tuple[int, int], int] = {}
    for idx, iv in enumerate(_list(data["intervals"], "intervals")):
        where = f"intervals[{idx}]"
        iv = _obj(iv, where, ["i", "j", "mult"])
        i, j = _int(iv["i"], where + ".i", 0), _int(iv["j"], where + ".j", 0)
        if not i <= j <= L:
            raise SchemaError(f"{where}: interval [{i}, {j}] outside [0, {L}]")
        entries[(i, j)] = entries.get((i, j), 0) + _int(iv["mult"], where + ".mult", 1)
    return IntervalBarcode(L, entries)


# -- graphs and paths ---------------------------------------------------------


def _float(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaError(f"{where}: expected a finite number")
    return float(v)


def graph_to_json(G: LabeledGraph) -> dict:
    return {"values": list(G.values), "edges": [[u, v] for u, v in G.edges]}


def graph_from_json(data) -> LabeledGraph:
    data = _obj(data, "graph", ["values", "edges"])
    values = [_float(v, "values") for v in _list(data["values"], "values")]
    edges = []
    for i, e in enumerate(_list(data["edges"], "edges")):
        e = _list(e, f"edges[{i}]")
        if len(e) != 2:
            raise SchemaError(f"edges[{i}]: expected a pair of vertex indices")
        u, v = (_int(c, f"edges[{i}]", 0) for c in e)
        if u >= len(values) or v >= len(values):
            raise SchemaError(f"edges[{i}]: vertex index out of range")
        if u == v:
            raise SchemaError(f"edges[{i}]: self-loop")
        edges.append((u, v))
    return LabeledGraph(tuple(values), tuple(edges))


def path_to_json(P: PathModule, intervals: Optional[IntervalBarcode] = None) -> dict:
    data: dict[str, Any] = {
        "p": P.field.p,
        "points": [[x, y] for x, y in P.points],
        "dims": list(P.dims),
        "maps": [
            {"dir": "none", "mat": []} if d is None else {"dir": d, "mat": _matrix_out(mat)}
            for d, mat in P.maps
        ],
    }
    if intervals is not None:
        data["intervals"] = intervals_to_json(intervals)["intervals"]
    return data


def path_from_json(data) -> PathModule:
    data = _obj(data, "path", ["p", "points", "dims", "maps"], optional=["intervals"])
    F = _field(data["p"])
    points = []
    for i, pt in enumerate(_list(data["points"], "points")):
        pt = _list(pt, f"points[{i}]")
        if len(pt) != 2:
            raise SchemaError(f"points[{i}]: expected [x, y]")
        points.append((_int(pt[0], f"points[{i}]", 0), _int(pt[1], f"points[{i}]", 0)))
    dims = [_int(d, "dims", 0) for d in _list(data["dims"], "dims")]
    if len(dims) != len(points) or not points:
        raise SchemaError("dims: one dimension per path point expected")
    raw = _list(data["maps"], "maps")
    if len(raw) != len(points) - 1:
        raise SchemaError("maps: one entry per consecutive pair expected")
    maps = []
    for i, entry in enumerate(raw):
        where = f"maps[{i}]"
        entry = _obj(entry, where, ["dir", "mat"])
        d = entry["dir"]
        if d == "none":
            maps.append((None, None))
            continue
        if d not in ("fwd", "bwd"):
            raise SchemaError(f"{where}.dir: expected 'fwd', 'bwd' or 'none'")
        src, dst = (i, i + 1) if d == "fwd" else (i + 1, i)
        maps.append((d, _matrix(entry["mat"], (dims[dst], dims[src]), F.p, where + ".mat")))
    return PathModule(F, points, dims, maps)


def load(path, reader):
    """Read a file and parse it, turning library validation errors into schema errors."""
    data = read_json(path)
    try:
        return reader(data)
    except SchemaError:
        raise
    except PDecompError as exc:
        raise SchemaError(f"{path}: {exc}") from None

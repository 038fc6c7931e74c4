"""CSV datasets, canonical JSON and small CSV exports."""
from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..data import DataError, LabeledDataset


def save_csv(ds: LabeledDataset, path) -> None:
    """Write ``id,f0..f{d-1},label`` with shortest round-trip float repr."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *(f"f{j}" for j in range(ds.dim)), "label"])
        for i, x, y in zip(ds.ids, ds.features, ds.labels):
            w.writerow([int(i), *(repr(float(v)) for v in x), int(y)])


def load_csv(path) -> LabeledDataset:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with open(path, encoding="utf-8", newline="") as fh:
        rows = csv.reader(fh)
        try:
            header = next(rows)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        dim = len(header) - 2
        expected = ["id", *(f"f{j}" for j in range(dim)), "label"]
        if dim < 1 or [h.strip() for h in header] != expected:
            raise DataError(f"{path}: line 1: header must be id,f0..f{{dim-1}},label")
        ids, feats, labels = [], [], []
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != dim + 2:
                raise DataError(f"{path}: line {lineno}: expected {dim + 2} fields, got {len(row)}")
            try:
                ident = int(row[0])
            except ValueError:
                raise DataError(f"{path}: line {lineno}: bad id {row[0]!r}") from None
            if row[-1].strip() not in ("0", "1"):
                raise DataError(f"{path}: line {lineno}: label {row[-1]!r} not in {{0,1}}")
            try:
                x = [float(v) for v in row[1:-1]]
            except ValueError:
                raise DataError(f"{path}: line {lineno}: non-numeric feature") from None
            if not all(math.isfinite(v) for v in x):
                raise DataError(f"{path}: line {lineno}: non-finite feature")
            if ident < 0:
                raise DataError(f"{path}: line {lineno}: negative id")
            ids.append(ident)
            feats.append(x)
            labels.append(int(row[-1]))
    if not ids:
        raise DataError(f"{path}: no data rows")
    return LabeledDataset(ids, np.array(feats, dtype=np.float64).reshape(len(ids), dim), labels, dim)


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])


def fmt_float(x: float) -> str:
    s = format(x, ".17g")
    return s if any(c in s for c in ".einf") else s + ".0"


def _canon(obj):
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.ndarray):
        return _canon(obj.tolist())
    return obj


def canonical_dumps(obj) -> str:
    """Sorted keys, floats at 17 significant digits, non-finite floats as null."""
    return _dump(_canon(obj), 0) + "\n"


def _dump(o, depth: int) -> str:
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(o, dict):
        if not o:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_dump(o[k], depth + 1)}" for k in sorted(o)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(o, list):
        if not o:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in o):
            return "[" + ", ".join(_dump(v, depth + 1) for v in o) + "]"
        return "[\n" + ",\n".join(inner + _dump(v, depth + 1) for v in o) + "\n" + pad + "]"
    if isinstance(o, float):
        return fmt_float(o)
    return json.dumps(o)


def write_canonical(path, obj) -> None:
    Path(path).write_text(canonical_dumps(obj), encoding="utf-8")


def resolve_out_dir(flag: str | None, configured: str | None, default: str) -> Path:
    """--out beats $DIVKIT_OUT beats the config file beats the default."""
    return Path(flag or os.environ.get("DIVKIT_OUT") or configured or default)

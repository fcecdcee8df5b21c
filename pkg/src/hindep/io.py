"""CSV ingestion/emission and the JSON run report."""
import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import PairedDataset, SampleGrid
from .errors import ParseError


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_csv_matrix(path):
    """Numeric rows of a comma-separated file; a non-numeric first row is a header.

    Returns ``(matrix, header_or_None)``.
    """
    rows = []
    header = None
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            cells = [c.strip() for c in row]
            if lineno == 1 and not all(_is_number(c) for c in cells):
                header = cells
                continue
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ParseError(
                    f"{path}:{lineno}: row has {len(cells)} columns, expected {width}")
            values = []
            for col, c in enumerate(cells, start=1):
                try:
                    v = float(c)
                except ValueError:
                    raise ParseError(
                        f"{path}:{lineno}: column {col} is not numeric: {c!r}") from None
                if not math.isfinite(v):
                    raise ParseError(f"{path}:{lineno}: column {col} is not finite: {c!r}")
                values.append(v)
            rows.append(values)
    if not rows:
        raise ParseError(f"{path}: no numeric rows")
    if header is not None and len(header) != width:
        raise ParseError(f"{path}:1: header has {len(header)} columns, expected {width}")
    return np.array(rows, dtype=float), header


def load_csv_pair(path_x, path_y):
    """Two CSV files (rows = curves, columns = grid points) as a paired dataset."""
    x, _ = read_csv_matrix(path_x)
    y, _ = read_csv_matrix(path_y)
    if x.shape[0] != y.shape[0]:
        raise ParseError(f"{path_x} has {x.shape[0]} rows but {path_y} has {y.shape[0]}")
    if x.shape[1] != y.shape[1]:
        raise ParseError(
            f"{path_x} has {x.shape[1]} columns but {path_y} has {y.shape[1]}")
    if x.shape[1] < 2:
        raise ParseError(f"{path_x}: curves need at least 2 columns")
    if x.shape[0] < 2:
        raise ParseError(f"{path_x}: need at least 2 rows")
    return PairedDataset(x, y, SampleGrid(x.shape[1]))


def write_csv_matrix(path, matrix, header=None):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header is not None:
            w.writerow(header)
        for row in np.atleast_2d(matrix):
            w.writerow([repr(float(v)) for v in row])


def write_csv_table(path, columns):
    """Write a dict of equal-length columns."""
    names = list(columns)
    data = [list(columns[k]) for k in names]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*data):
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for v in row])


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


@dataclass
class Report:
    command: str
    config: dict
    outputs: dict
    seed: int | None = None
    timing: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)

    def to_dict(self):
        return _plain({"command": self.command, "seed": self.seed, "config": self.config,
                       "outputs": self.outputs, "timing": self.timing,
                       "versions": self.versions})

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)

    @classmethod
    def from_dict(cls, d):
        return cls(command=d["command"], config=d["config"], outputs=d["outputs"],
                   seed=d.get("seed"), timing=d.get("timing", {}),
                   versions=d.get("versions", {}))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

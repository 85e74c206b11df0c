"""Landscape similarity from footprint rank correlation."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embedding import Footprint
from .exceptions import UndefinedCorrelationError
from .metrics import spearman


def _vec(f) -> np.ndarray:
    return f.vector if isinstance(f, Footprint) else np.asarray(f, dtype=np.float64)


def sim(a, b) -> float:
    """Spearman correlation between two footprints' coordinates."""
    va, vb = _vec(a), _vec(b)
    if va.shape != vb.shape:
        raise ValueError(f"footprint dimensions differ: {va.shape} vs {vb.shape}")
    return spearman(va, vb)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric Sim values; the diagonal and undefined cells are NaN."""

    ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.ids), len(self.ids)):
            raise ValueError("matrix shape does not match ids")

    def index(self, id_: str) -> int:
        return self.ids.index(id_)

    def get(self, a: str, b: str) -> float:
        return float(self.values[self.index(a), self.index(b)])

    def pairs(self):
        """``(id_i, id_j, sim)`` over unordered pairs, in ``(i, j)`` order."""
        for i in range(len(self.ids)):
            for j in range(i + 1, len(self.ids)):
                yield self.ids[i], self.ids[j], float(self.values[i, j])

    def to_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["id", *self.ids])
            for i, a in enumerate(self.ids):
                row = []
                for j in range(len(self.ids)):
                    v = self.values[i, j]
                    row.append("-" if i == j else ("NA" if math.isnan(v) else f"{v:.6f}"))
                w.writerow([a, *row])

    @classmethod
    def from_csv(cls, path) -> "SimilarityMatrix":
        with Path(path).open(newline="") as fh:
            rows = list(csv.reader(fh))
        ids = tuple(rows[0][1:])
        vals = np.full((len(ids), len(ids)), np.nan)
        for i, row in enumerate(rows[1:]):
            for j, cell in enumerate(row[1:]):
                if cell not in ("-", "NA"):
                    vals[i, j] = float(cell)
        return cls(ids, vals)


def sim_matrix(footprints, ids=None) -> SimilarityMatrix:
    """Sim over all unordered pairs, mirrored.  Undefined pairs stay NaN, never zero."""
    footprints = list(footprints)
    if len(footprints) < 2:
        raise ValueError("need at least two footprints")
    if ids is None:
        ids = [f.lon_id for f in footprints]
    ids = tuple(str(i) for i in ids)
    m = len(footprints)
    vals = np.full((m, m), np.nan)
    vecs = [_vec(f) for f in footprints]
    for i in range(m):
        for j in range(i + 1, m):
            try:
                v = sim(vecs[i], vecs[j])
            except UndefinedCorrelationError:
                v = math.nan
            vals[i, j] = vals[j, i] = v
    return SimilarityMatrix(ids, vals)


def block_summary(matrix: SimilarityMatrix, grouping: dict) -> dict:
    """Mean Sim per ``(group_a, group_b)`` block, diagonal and NaN cells excluded.

    Keys are ordered pairs with ``group_a <= group_b``.
    """
    missing = [i for i in matrix.ids if i not in grouping]
    if missing:
        raise KeyError(f"ids without a group: {missing[:5]}")
    groups = [grouping[i] for i in matrix.ids]
    sums: dict = {}
    for i, j in zip(*np.triu_indices(len(matrix.ids), k=1)):
        v = matrix.values[i, j]
        if math.isnan(v):
            continue
        key = tuple(sorted((groups[i], groups[j])))
        s, c = sums.get(key, (0.0, 0))
        sums[key] = (s + v, c + 1)
    return {k: s / c for k, (s, c) in sorted(sums.items())}

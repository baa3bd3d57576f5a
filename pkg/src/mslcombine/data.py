"""CSV ingestion for labelled biomarker data."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError, EmptyAfterFilter, MissingColumn, ParseError

__all__ = [
    "Dataset",
    "PANCREATIC_BIOMARKERS",
    "PANCREATIC_GROUP_MAPPING",
    "ingest_pancreatic_csv",
    "load_labeled_csv",
    "write_labeled_csv",
]

PANCREATIC_BIOMARKERS = ("LYVE1", "REG1B", "TFF1")
# diagnosis: 1 healthy control, 2 benign pancreatic condition, 3 adenocarcinoma
PANCREATIC_GROUP_MAPPING = {"3": 1, "1": 0, "2": 0}
PANCREATIC_COHORT = ("sample_origin", "BPTB")
PANCREATIC_SCALE = {"LYVE1": 100.0}


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix with binary labels (1 = diseased)."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple
    provenance: str = ""
    dropped_missing: int = 0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=np.int64)
        if feats.ndim != 2 or labels.shape != (feats.shape[0],):
            raise DataError("features must be a matrix with one label per row")
        if feats.shape[1] != len(self.feature_names):
            raise DataError("feature_names must match the number of columns")
        if not np.all(np.isfinite(feats)):
            raise DataError("features contain non-finite values")
        if not np.all((labels == 0) | (labels == 1)):
            raise DataError("labels must be 0 or 1")
        if labels.sum() < 2 or (labels == 0).sum() < 2:
            raise EmptyAfterFilter(f"need at least two rows per group; got n={labels.sum()}, "
                                   f"m={(labels == 0).sum()}")
        feats.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def X(self) -> np.ndarray:
        return self.features[self.labels == 1]

    @property
    def Y(self) -> np.ndarray:
        return self.features[self.labels == 0]

    @property
    def n(self) -> int:
        return int(self.labels.sum())

    @property
    def m(self) -> int:
        return int(self.labels.size - self.labels.sum())

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.features.tobytes())
        h.update(self.labels.tobytes())
        h.update("|".join(self.feature_names).encode())
        return h.hexdigest()


def _read_rows(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = [h.strip() for h in next(reader)]
            except StopIteration:
                raise ParseError("file is empty", row=1) from None
            rows = []
            for row in reader:
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(header):
                    raise ParseError(f"expected {len(header)} fields, found {len(row)}",
                                     row=reader.line_num)
                rows.append((reader.line_num, [c.strip() for c in row]))
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc}", row=0) from None
    except csv.Error as exc:
        raise ParseError(str(exc), row=0) from None
    return header, rows


def _index(header, names):
    missing = [name for name in names if name not in header]
    if missing:
        raise MissingColumn(f"missing column(s): {', '.join(missing)}")
    return [header.index(name) for name in names]


def _parse_float(text, line, column):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"column {column!r}: cannot parse {text!r} as a number", row=line) from None
    if not math.isfinite(value):
        raise ParseError(f"column {column!r}: non-finite value {text!r}", row=line)
    return value


def _norm_code(text):
    # "3" and "3.0" name the same diagnosis group
    try:
        value = float(text)
    except ValueError:
        return text
    return str(int(value)) if value.is_integer() else text


def _build(header, rows, feature_cols, label_col, mapping, cohort, scale, provenance):
    fidx = _index(header, feature_cols)
    (lidx,) = _index(header, [label_col])
    cidx = None
    if cohort is not None:
        (cidx,) = _index(header, [cohort[0]])
    mapping = {_norm_code(str(k)): int(v) for k, v in mapping.items()}

    feats, labels, unknown = [], [], {}
    dropped = 0
    kept_cohort = 0
    for line, row in rows:
        if cidx is not None and row[cidx] != cohort[1]:
            continue
        kept_cohort += 1
        code = _norm_code(row[lidx])
        if code not in mapping:
            unknown.setdefault(row[lidx], line)
            continue
        cells = [row[i] for i in fidx]
        if any(c == "" or c.upper() in ("NA", "NAN") for c in cells):
            dropped += 1
            continue
        values = [_parse_float(c, line, name) * scale.get(name, 1.0) for c, name in zip(cells, feature_cols)]
        feats.append(values)
        labels.append(mapping[code])
    if unknown:
        listing = ", ".join(f"{code!r} (row {line})" for code, line in unknown.items())
        raise DataError(f"unknown {label_col} code(s): {listing}")
    if cohort is not None and kept_cohort == 0:
        raise EmptyAfterFilter(f"no rows with {cohort[0]} == {cohort[1]!r}")
    if not feats:
        raise EmptyAfterFilter("no complete rows remain after filtering")
    return Dataset(np.array(feats, dtype=float), np.array(labels), tuple(feature_cols),
                   provenance=provenance, dropped_missing=dropped,
                   info={"rows_read": len(rows), "rows_in_cohort": kept_cohort})


def ingest_pancreatic_csv(path, group_mapping: dict | None = None, cohort=PANCREATIC_COHORT,
                          label_col: str = "diagnosis") -> Dataset:
    """Urinary biomarker panel (LYVE1 x 100, REG1B, TFF1) for one cohort.

    Parameters
    ----------
    path : path-like
        Comma-separated UTF-8 file with a header row.
    group_mapping : dict, optional
        Diagnosis code to label. Defaults to cancer -> 1, healthy and benign
        -> 0. Codes absent from the mapping raise ``DataError``.
    cohort : (column, value) or None
        Rows are kept only when ``column == value``; ``None`` keeps all.

    Rows with a missing biomarker are dropped; the count is stored in
    ``Dataset.dropped_missing``.
    """
    header, rows = _read_rows(path)
    mapping = PANCREATIC_GROUP_MAPPING if group_mapping is None else group_mapping
    note = f"{path}; cohort={cohort[1] if cohort else 'all'}; LYVE1 x 100"
    return _build(header, rows, list(PANCREATIC_BIOMARKERS), label_col, mapping, cohort,
                  PANCREATIC_SCALE, note)


def load_labeled_csv(path, label_col: str = "label", feature_cols=None, group_mapping: dict | None = None,
                     cohort=None) -> Dataset:
    """Generic loader: every non-label column is a feature unless ``feature_cols`` is given.

    ``group_mapping`` defaults to ``{"1": 1, "0": 0}``.
    """
    header, rows = _read_rows(path)
    if feature_cols is None:
        skip = {label_col} | ({cohort[0]} if cohort else set())
        feature_cols = [h for h in header if h not in skip]
    mapping = {"1": 1, "0": 0} if group_mapping is None else group_mapping
    return _build(header, rows, list(feature_cols), label_col, mapping, cohort, {}, str(path))


def write_labeled_csv(path, X, Y, feature_names=None, label_col: str = "label") -> None:
    """Write diseased rows (label 1) then healthy rows (label 0) with 17-digit floats."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    names = feature_names or [f"x{j + 1}" for j in range(X.shape[1])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(names) + [label_col])
        for block, label in ((X, 1), (Y, 0)):
            for row in block:
                writer.writerow([f"{v:.17g}" for v in row] + [label])

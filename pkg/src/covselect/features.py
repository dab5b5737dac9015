"""Embedding dataset ingestion, generation, normalization, and persistence.

On-disk feature values are IEEE-754 binary32; in memory they are held as
float64 so that all downstream distance and kernel accumulation happens in
double precision. Generators quantize through binary32 so that a store
round-trips bitwise through the binary format.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, FormatError

FEATURE_MAGIC = b"EMB1"
LABEL_MAGIC = b"LBL1"
FORMAT_VERSION = 1
DTYPE_F32 = 1
_FEATURE_HEADER = struct.Struct("<4sIQQB7x")
_LABEL_HEADER = struct.Struct("<4sIQ")


class FeatureStore:
    """An immutable N x d matrix of embedding vectors with optional class labels.

    Label values are only reachable through the ``labels`` property, which
    counts accesses in ``label_reads``; selection code is audited against
    this counter to guarantee it never peeks at annotations.
    """

    def __init__(self, values, labels=None, normalized=False):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise DataError(f"feature values must be a 2-d matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataError("feature values contain non-finite entries")
        self.values = values
        self.values.setflags(write=False)
        self.normalized = bool(normalized)
        self.label_reads = 0
        self._sq_cache = None
        self._row_norms = None
        if labels is None:
            self._labels = None
            self.class_ids = None
        else:
            labels = np.asarray(labels, dtype=np.int64)
            if labels.shape != (values.shape[0],):
                raise DataError(
                    f"labels must have length {values.shape[0]}, got shape {labels.shape}"
                )
            # Remap sparse class ids to dense 0..C-1; class_ids keeps the originals.
            self.class_ids = np.unique(labels)
            dense = np.searchsorted(self.class_ids, labels)
            self._labels = np.ascontiguousarray(dense, dtype=np.int64)
            self._labels.setflags(write=False)

    @property
    def n_samples(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[1]

    @property
    def has_labels(self):
        return self._labels is not None

    @property
    def n_classes(self):
        if self._labels is None:
            return 0
        return int(self.class_ids.size)

    @property
    def labels(self):
        """Dense class ids; every read is tallied in ``label_reads``."""
        if self._labels is None:
            raise DataError("store has no labels")
        self.label_reads += 1
        return self._labels

    def without_labels(self):
        return FeatureStore(self.values, labels=None, normalized=self.normalized)

    def with_labels(self, labels):
        return FeatureStore(self.values, labels=labels, normalized=self.normalized)

    def subset(self, indices):
        """A new store restricted to the given rows (original relative order kept)."""
        indices = np.asarray(indices, dtype=np.int64)
        labels = None if self._labels is None else self._labels[indices]
        return FeatureStore(self.values[indices], labels=labels, normalized=self.normalized)


@dataclass(frozen=True)
class MixtureComponent:
    mean: tuple
    stddev: float
    weight: float


@dataclass(frozen=True)
class MixtureSpec:
    """A seeded Gaussian mixture: list of (mean, stddev, weight) components."""

    components: tuple
    n_samples: int
    seed: int

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, MixtureComponent) else MixtureComponent(tuple(c[0]), float(c[1]), float(c[2]))
            for c in self.components
        )
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ConfigError("mixture needs at least one component")
        dims = {len(c.mean) for c in comps}
        if len(dims) != 1:
            raise ConfigError("mixture components must share one dimensionality")
        if any(c.stddev <= 0 for c in comps):
            raise ConfigError("component stddev must be positive")
        total = sum(c.weight for c in comps)
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"component weights must sum to 1, got {total}")


@dataclass(frozen=True)
class ImbalanceSpec:
    """Exponential long-tail subsampling: least-frequent class keeps rho x n_max."""

    rho: float
    seed: int

    def __post_init__(self):
        if not 0 < self.rho <= 1:
            raise ConfigError(f"rho must lie in (0, 1], got {self.rho}")


def load_features(path, format="binary", label_column=None):
    """Read a feature file into a FeatureStore.

    ``format`` is "binary" (EMB1 layout) or "csv". For csv, ``label_column``
    selects a 0-based column of integer class ids; a header row may also name
    a column "label".
    """
    if format == "binary":
        if label_column is not None:
            raise ConfigError("label_column applies to csv input only")
        return _load_binary(path)
    if format == "csv":
        return _load_csv(path, label_column)
    raise ConfigError(f"unknown feature format {format!r}; expected binary or csv")


def _load_binary(path):
    with open(path, "rb") as fh:
        header = fh.read(_FEATURE_HEADER.size)
        if len(header) < _FEATURE_HEADER.size:
            raise FormatError(f"{path}: truncated header")
        magic, version, n, d, dtype_code = _FEATURE_HEADER.unpack(header)
        if magic != FEATURE_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {FEATURE_MAGIC!r}")
        if version != FORMAT_VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        if dtype_code != DTYPE_F32:
            raise FormatError(f"{path}: unsupported dtype code {dtype_code}")
        raw = np.fromfile(fh, dtype="<f4", count=n * d)
    if raw.size != n * d:
        raise FormatError(f"{path}: expected {n * d} values, file holds {raw.size}")
    values = raw.astype(np.float64).reshape(n, d)
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: non-finite feature values")
    return FeatureStore(values)


def _load_csv(path, label_column):
    rows = []
    header_names = None
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise DataError(f"{path}: empty csv")
    first = lines[0].split(",")
    if not _all_numeric(first):
        header_names = [tok.strip() for tok in first]
        lines = lines[1:]
        if not lines:
            raise DataError(f"{path}: csv has a header but no data rows")
    arity = None
    for ln in lines:
        toks = ln.split(",")
        if arity is None:
            arity = len(toks)
        elif len(toks) != arity:
            raise DataError(f"{path}: ragged csv (row with {len(toks)} fields, expected {arity})")
        try:
            rows.append([float(tok) for tok in toks])
        except ValueError as exc:
            raise DataError(f"{path}: non-numeric field: {exc}") from None
    data = np.asarray(rows, dtype=np.float64)
    if label_column is None and header_names is not None and "label" in header_names:
        label_column = header_names.index("label")
    labels = None
    if label_column is not None:
        if not 0 <= label_column < data.shape[1]:
            raise ConfigError(f"label_column {label_column} out of range for {data.shape[1]} columns")
        raw = data[:, label_column]
        if not np.all(raw == np.round(raw)):
            raise DataError(f"{path}: label column holds non-integer values")
        labels = raw.astype(np.int64)
        data = np.delete(data, label_column, axis=1)
    if not np.all(np.isfinite(data)):
        raise DataError(f"{path}: non-finite feature values")
    return FeatureStore(data, labels=labels)


def _all_numeric(tokens):
    try:
        for tok in tokens:
            float(tok)
    except ValueError:
        return False
    return True


def save_features(store, path):
    """Write the EMB1 binary layout (values quantized to binary32)."""
    header = _FEATURE_HEADER.pack(
        FEATURE_MAGIC, FORMAT_VERSION, store.n_samples, store.dim, DTYPE_F32
    )
    with open(path, "wb") as fh:
        fh.write(header)
        store.values.astype("<f4").tofile(fh)


def load_labels(path):
    with open(path, "rb") as fh:
        header = fh.read(_LABEL_HEADER.size)
        if len(header) < _LABEL_HEADER.size:
            raise FormatError(f"{path}: truncated header")
        magic, version, n = _LABEL_HEADER.unpack(header)
        if magic != LABEL_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {LABEL_MAGIC!r}")
        if version != FORMAT_VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        raw = np.fromfile(fh, dtype="<u4", count=n)
    if raw.size != n:
        raise FormatError(f"{path}: expected {n} labels, file holds {raw.size}")
    return raw.astype(np.int64)


def save_labels(labels, path):
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= 2**32):
        raise DataError("labels do not fit the u32 on-disk format")
    with open(path, "wb") as fh:
        fh.write(_LABEL_HEADER.pack(LABEL_MAGIC, FORMAT_VERSION, labels.size))
        labels.astype("<u4").tofile(fh)


def normalize_rows(store):
    """Scale every row to unit Euclidean norm; labels carry over unchanged.

    Idempotent to double precision. Rows of exactly zero norm are rejected.
    """
    norms = np.sqrt(np.einsum("ij,ij->i", store.values, store.values))
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DataError(f"cannot normalize zero-norm row {zero[0]}")
    values = store.values / norms[:, None]
    labels = store._labels if store.has_labels else None
    return FeatureStore(values, labels=labels, normalized=True)


def generate_mixture(spec):
    """Draw a seeded Gaussian mixture; component index becomes the label.

    Component counts follow a multinomial over the weights, samples are
    concatenated component-by-component, and values are quantized through
    binary32 so the result round-trips bitwise through the binary format.
    Identical spec and seed give identical bytes.
    """
    if spec.n_samples <= 0:
        raise ConfigError("n_samples must be positive")
    rng = np.random.default_rng(spec.seed)
    weights = np.array([c.weight for c in spec.components], dtype=np.float64)
    counts = rng.multinomial(spec.n_samples, weights / weights.sum())
    dim = len(spec.components[0].mean)
    blocks = []
    labels = []
    for comp_id, (comp, count) in enumerate(zip(spec.components, counts)):
        block = np.asarray(comp.mean, dtype=np.float64) + comp.stddev * rng.standard_normal(
            (count, dim)
        )
        blocks.append(block)
        labels.append(np.full(count, comp_id, dtype=np.int64))
    values = np.concatenate(blocks, axis=0).astype(np.float32).astype(np.float64)
    return FeatureStore(values, labels=np.concatenate(labels))


def longtail_counts(n_max, n_classes, rho):
    """Per-class keep counts n_c = round(n_max * rho^(c/(C-1))), half rounded up."""
    exponents = np.arange(n_classes, dtype=np.float64) / (n_classes - 1)
    return np.floor(n_max * np.power(rho, exponents) + 0.5).astype(np.int64)


def make_longtail(store, spec):
    """Subsample a labeled store so class sizes decay exponentially with class id.

    The largest class keeps n_max = (smallest input class count) samples and
    the last class keeps round(n_max * rho). Kept rows preserve their
    original relative order. Input classes must be roughly balanced
    (max/min count <= 2).
    """
    if not store.has_labels:
        raise DataError("long-tail subsampling needs labels")
    labels = store._labels
    n_classes = store.n_classes
    if n_classes < 2:
        raise ConfigError("long-tail subsampling needs at least 2 classes")
    counts = np.bincount(labels, minlength=n_classes)
    if counts.max() > 2 * counts.min():
        raise DataError(
            f"input classes too imbalanced for long-tail generation "
            f"(max/min = {counts.max()}/{counts.min()})"
        )
    n_max = int(counts.min())
    keep_counts = longtail_counts(n_max, n_classes, spec.rho)
    rng = np.random.default_rng(spec.seed)
    kept = []
    for c in range(n_classes):
        members = np.flatnonzero(labels == c)
        chosen = rng.choice(members, size=int(keep_counts[c]), replace=False)
        kept.append(chosen)
    order = np.sort(np.concatenate(kept))
    return store.subset(order)

"""Flow series containers, CSV ingestion, quantization and symbol combination.

Sensor data enters the pipeline as integer vehicle counts per sampling
interval.  Before any information estimate the counts are mapped onto a small
alphabet ``{0, ..., r-1}``; joint symbols of several series are packed into a
single integer with a mixed-radix code (first series least significant).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_flow_matrix, check_int

STRATEGIES = ("equal_width", "equal_frequency")


class IngestError(ValueError):
    """Raised when a flow CSV cannot be turned into series."""


@dataclass(frozen=True)
class FlowSeries:
    """Integer vehicle counts observed by one sensor."""

    node_id: str
    samples: np.ndarray
    period_seconds: int = 300

    def __post_init__(self):
        if not isinstance(self.node_id, str) or not self.node_id:
            raise ValueError("node_id must be a non-empty string")
        samples = np.asarray(self.samples)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError(f"series {self.node_id!r} must be a non-empty 1-D sequence")
        if samples.dtype.kind == "f":
            if not np.all(np.isfinite(samples)):
                raise ValueError(f"series {self.node_id!r} contains non-finite samples")
            samples = np.floor(samples)
        elif samples.dtype.kind not in "iu":
            raise ValueError(f"series {self.node_id!r} must be numeric")
        samples = samples.astype(np.int64)
        if samples.min() < 0:
            raise ValueError(f"series {self.node_id!r} has negative samples")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        check_int(self.period_seconds, "period_seconds", minimum=1)

    def __len__(self) -> int:
        return self.samples.size

    def __eq__(self, other):
        if not isinstance(other, FlowSeries):
            return NotImplemented
        return (self.node_id == other.node_id
                and self.period_seconds == other.period_seconds
                and np.array_equal(self.samples, other.samples))

    __hash__ = None


@dataclass(frozen=True)
class QuantizerSpec:
    levels: int
    strategy: str
    bin_edges: tuple

    def __post_init__(self):
        check_int(self.levels, "levels", minimum=2)
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        edges = tuple(float(e) for e in self.bin_edges)
        if len(edges) != self.levels - 1:
            raise ValueError(f"expected {self.levels - 1} bin edges, got {len(edges)}")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError(f"bin edges must be strictly increasing: {edges}")
        object.__setattr__(self, "bin_edges", edges)


@dataclass(frozen=True)
class QuantizedSeries:
    node_id: str
    symbols: np.ndarray
    spec: QuantizerSpec = field(repr=False)

    def __post_init__(self):
        symbols = np.asarray(self.symbols, dtype=np.int64)
        if symbols.ndim != 1:
            raise ValueError("symbols must be one-dimensional")
        if symbols.size and (symbols.min() < 0 or symbols.max() >= self.spec.levels):
            raise ValueError(f"symbols out of range [0, {self.spec.levels})")
        symbols.setflags(write=False)
        object.__setattr__(self, "symbols", symbols)

    @property
    def alphabet_size(self) -> int:
        return self.spec.levels

    def __len__(self) -> int:
        return self.symbols.size


# --------------------------------------------------------------------------- CSV


def _parse_count(text: str, line: int, column: str) -> int:
    text = text.strip()
    if not text:
        raise IngestError(f"line {line}: missing value in column {column!r}")
    try:
        value = float(text)
    except ValueError:
        raise IngestError(f"line {line}: cannot parse {text!r} in column {column!r}") from None
    if not np.isfinite(value) or value < 0:
        raise IngestError(f"line {line}: invalid flow {text!r} in column {column!r}")
    return int(np.floor(value))


def ingest_csv(stream: TextIO, period_seconds: int | None = None,
               timestamp_column: str = "timestamp") -> list[FlowSeries]:
    """Read a flow CSV into one :class:`FlowSeries` per sensor column.

    The header names a timestamp column followed by one column per sensor.
    Timestamps are integer seconds and must be strictly increasing.  The
    sampling period is taken from ``period_seconds`` when given, otherwise from
    the difference of the first two timestamps.
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty CSV input") from None
    header = [h.strip() for h in header]
    if len(header) < 2:
        raise IngestError("line 1: header needs a timestamp column and at least one sensor")
    if header[0] != timestamp_column:
        raise IngestError(f"line 1: first column must be {timestamp_column!r}, got {header[0]!r}")
    node_ids = header[1:]
    if any(not n for n in node_ids):
        raise IngestError("line 1: empty sensor name in header")
    if len(set(node_ids)) != len(node_ids):
        raise IngestError("line 1: duplicate sensor names in header")

    stamps: list[int] = []
    columns: list[list[int]] = [[] for _ in node_ids]
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise IngestError(f"line {line}: expected {len(header)} fields, got {len(row)}")
        try:
            stamp = int(row[0].strip())
        except ValueError:
            raise IngestError(f"line {line}: bad timestamp {row[0]!r}") from None
        if stamps and stamp <= stamps[-1]:
            raise IngestError(f"line {line}: timestamps must be strictly increasing")
        stamps.append(stamp)
        for j, column in enumerate(node_ids):
            columns[j].append(_parse_count(row[j + 1], line, column))

    if not stamps:
        raise IngestError("CSV has a header but no data rows")
    if period_seconds is None:
        period_seconds = stamps[1] - stamps[0] if len(stamps) > 1 else 300
    return [FlowSeries(node_id, np.asarray(col, dtype=np.int64), period_seconds)
            for node_id, col in zip(node_ids, columns)]


def read_csv(path, period_seconds: int | None = None) -> list[FlowSeries]:
    with open(path, newline="", encoding="utf-8") as fh:
        return ingest_csv(fh, period_seconds=period_seconds)


def write_csv(series: Sequence[FlowSeries], stream: TextIO, start: int = 0) -> None:
    """Write series in the format accepted by :func:`ingest_csv`."""
    if not series:
        raise ValueError("nothing to write")
    n = len(series[0])
    period = series[0].period_seconds
    for s in series:
        if len(s) != n:
            raise ValueError("all series must have the same length")
        if s.period_seconds != period:
            raise ValueError("all series must share the sampling period")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["timestamp", *[s.node_id for s in series]])
    data = np.column_stack([s.samples for s in series])
    for i, row in enumerate(data):
        writer.writerow([start + i * period, *row.tolist()])


def to_csv_text(series: Sequence[FlowSeries]) -> str:
    buf = io.StringIO()
    write_csv(series, buf)
    return buf.getvalue()


def as_matrix(series: Sequence[FlowSeries]) -> np.ndarray:
    """Stack series into an ``(n_samples, n_nodes)`` integer matrix."""
    lengths = {len(s) for s in series}
    if len(lengths) != 1:
        raise ValueError(f"series lengths differ: {sorted(lengths)}")
    return np.column_stack([s.samples for s in series])


# ------------------------------------------------------------------ quantization


def _samples(series) -> np.ndarray:
    if isinstance(series, FlowSeries):
        return series.samples
    return np.asarray(series, dtype=np.float64)


def fit_quantizer(series, levels: int = 2, strategy: str = "equal_width") -> QuantizerSpec:
    """Choose ``levels - 1`` thresholds for a flow series.

    ``equal_width`` splits ``[min, max]`` into equal bins.  ``equal_frequency``
    places the edges at the ``i * 100 / levels`` percentiles.
    """
    levels = check_int(levels, "levels", minimum=2)
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    x = _samples(series).astype(np.float64)
    lo, hi = float(x.min()), float(x.max())
    if strategy == "equal_width":
        if hi == lo:
            # everything lands in bin 0
            edges = lo + np.arange(1, levels)
        else:
            edges = lo + (hi - lo) * np.arange(1, levels) / levels
    else:
        if hi == lo:
            raise ValueError("equal_frequency quantization needs a non-constant series")
        edges = np.percentile(x, 100.0 * np.arange(1, levels) / levels)
        # an edge at the maximum would empty the top bin (edges belong to the lower bin)
        below_max = x[x < hi].max()
        edges = np.minimum(edges, below_max)
        if np.any(np.diff(edges) <= 0):
            raise ValueError(
                f"percentile edges collide for levels={levels} ({edges.tolist()}); "
                "use fewer levels or equal_width")
    return QuantizerSpec(levels, strategy, tuple(edges.tolist()))


def quantize_array(values, spec: QuantizerSpec) -> np.ndarray:
    # number of edges strictly below the value: an edge belongs to the lower bin
    return np.searchsorted(np.asarray(spec.bin_edges), np.asarray(values, dtype=np.float64),
                           side="left").astype(np.int64)


def quantize(series: FlowSeries, spec: QuantizerSpec) -> QuantizedSeries:
    return QuantizedSeries(series.node_id, quantize_array(series.samples, spec), spec)


class FlowQuantizer(TransformerMixin, BaseEstimator):
    """Per-sensor quantizer over an ``(n_samples, n_nodes)`` flow matrix.

    Parameters
    ----------
    levels : int, default=2
        Number of output symbols per sensor.
    strategy : {"equal_width", "equal_frequency"}, default="equal_width"
        How thresholds are placed, fitted independently for every column.

    Attributes
    ----------
    specs_ : list of QuantizerSpec
        One fitted spec per column.
    n_features_in_ : int
    """

    def __init__(self, levels: int = 2, strategy: str = "equal_width"):
        self.levels = levels
        self.strategy = strategy

    def fit(self, X, y=None):
        X = check_flow_matrix(X)
        self.specs_ = [fit_quantizer(X[:, j], self.levels, self.strategy)
                       for j in range(X.shape[1])]
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "specs_")
        X = check_flow_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        return np.column_stack([quantize_array(X[:, j], spec)
                                for j, spec in enumerate(self.specs_)])


# ------------------------------------------------------------ super-alphabet codes


def _check_sizes(sizes: Sequence[int]) -> tuple[int, ...]:
    sizes = tuple(int(s) for s in sizes)
    if any(s < 1 for s in sizes):
        raise ValueError(f"alphabet sizes must be positive: {sizes}")
    return sizes


def combine_symbols(symbols: Sequence[int], sizes: Sequence[int]) -> int:
    """Mixed-radix code of a symbol tuple, first symbol least significant.

    ``combine_symbols((x, y), (nx, ny)) == nx * y + x``.
    """
    sizes = _check_sizes(sizes)
    if len(symbols) != len(sizes):
        raise ValueError("symbols and sizes must have the same length")
    code = 0
    for s, size in zip(reversed(tuple(symbols)), reversed(sizes)):
        s = int(s)
        if not 0 <= s < size:
            raise ValueError(f"symbol {s} outside alphabet [0, {size})")
        code = code * size + s
    return code


def split_symbols(code: int, sizes: Sequence[int]) -> tuple[int, ...]:
    sizes = _check_sizes(sizes)
    total = int(np.prod(sizes, dtype=object))
    code = int(code)
    if not 0 <= code < total:
        raise ValueError(f"code {code} outside [0, {total})")
    out = []
    for size in sizes:
        code, s = divmod(code, size)
        out.append(s)
    return tuple(out)


def combine_arrays(arrays: Iterable[np.ndarray], sizes: Sequence[int]) -> np.ndarray:
    """Vectorized :func:`combine_symbols` over aligned symbol arrays."""
    arrays = [np.asarray(a, dtype=np.int64) for a in arrays]
    sizes = _check_sizes(sizes)
    if len(arrays) != len(sizes):
        raise ValueError("arrays and sizes must have the same length")
    if not arrays:
        raise ValueError("nothing to combine")
    if np.prod(sizes, dtype=float) >= 2.0 ** 62:
        raise OverflowError(f"combined alphabet {sizes} does not fit in 64 bits")
    code = np.zeros_like(arrays[0])
    for a, size in zip(reversed(arrays), reversed(sizes)):
        if a.size and (a.min() < 0 or a.max() >= size):
            raise ValueError(f"symbols outside alphabet [0, {size})")
        code = code * size + a
    return code


def split_array(codes: np.ndarray, sizes: Sequence[int]) -> list[np.ndarray]:
    codes = np.asarray(codes, dtype=np.int64)
    out = []
    for size in _check_sizes(sizes):
        codes, s = np.divmod(codes, size)
        out.append(s)
    return out

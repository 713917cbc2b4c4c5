"""Domain types shared by every stage of the pipeline.

States are always stored as count indices ``0..n``; labels only matter for
reading and writing files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np


class OTSError(ValueError):
    """Base class for validation errors raised by this package."""


class OutOfRangeState(OTSError):
    pass


class TooShort(OTSError):
    pass


class EmptyRange(OTSError):
    pass


class UnknownLabel(OTSError):
    pass


class RangeMismatch(OTSError):
    pass


class LagMismatch(OTSError):
    pass


class LagTooLarge(OTSError):
    pass


@dataclass(frozen=True)
class OrdinalRange:
    """Ordered range ``s_0 < ... < s_n`` with ``n + 1`` states."""

    n: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise EmptyRange(f"range size n must be an integer >= 1, got {self.n!r}")
        if self.labels is not None:
            labels = tuple(str(lab) for lab in self.labels)
            if len(labels) != self.n + 1:
                raise OTSError(
                    f"expected {self.n + 1} labels for n={self.n}, got {len(labels)}")
            if len(set(labels)) != len(labels):
                raise OTSError("state labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return self.n + 1


@dataclass(frozen=True, eq=False)
class OrdinalSeries:
    """A validated ordinal time series stored as state indices."""

    id: str
    range: OrdinalRange
    states: np.ndarray = field(repr=False)

    def __post_init__(self):
        states = np.asarray(self.states)
        if states.ndim != 1:
            raise OTSError("states must be a one-dimensional sequence")
        states = states.astype(np.int64)
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def n(self) -> int:
        return self.range.n

    @property
    def T(self) -> int:
        return int(self.states.shape[0])

    def __len__(self):
        return self.T

    def __eq__(self, other):
        if not isinstance(other, OrdinalSeries):
            return NotImplemented
        return (self.id == other.id and self.range == other.range
                and np.array_equal(self.states, other.states))

    def __hash__(self):
        return hash((self.id, self.range, self.states.tobytes()))

    def decode(self) -> list:
        """Return the states as labels (requires a labelled range)."""
        if self.range.labels is None:
            raise OTSError("series has no state labels")
        return [self.range.labels[i] for i in self.states]


@dataclass(frozen=True)
class LagSet:
    """Strictly increasing collection of positive lags."""

    lags: tuple

    def __post_init__(self):
        lags = tuple(int(l) for l in self.lags)
        if not lags:
            raise OTSError("lag set must be nonempty")
        if lags[0] < 1:
            raise OTSError("lags must be positive")
        if any(b <= a for a, b in zip(lags, lags[1:])):
            raise OTSError("lags must be strictly increasing")
        object.__setattr__(self, "lags", lags)

    @classmethod
    def upto(cls, max_lag: int) -> "LagSet":
        return cls(tuple(range(1, max_lag + 1)))

    @property
    def max(self) -> int:
        return self.lags[-1]

    def __iter__(self):
        return iter(self.lags)

    def __len__(self):
        return len(self.lags)

    def check_against(self, series: Iterable[OrdinalSeries]) -> None:
        """Raise :class:`LagTooLarge` unless every series is longer than the max lag."""
        for x in series:
            if self.max >= x.T:
                raise LagTooLarge(
                    f"max lag {self.max} must be smaller than the length of "
                    f"series {x.id!r} (T={x.T})")


def as_lagset(lags) -> LagSet:
    if isinstance(lags, LagSet):
        return lags
    if isinstance(lags, (int, np.integer)):
        return LagSet((int(lags),))
    return LagSet(tuple(lags))


def validate_series(id: str, states: Sequence[int], n: int,
                    labels: Optional[Sequence[str]] = None) -> OrdinalSeries:
    """Build an :class:`OrdinalSeries`, rejecting (never clamping) bad input.

    Raises
    ------
    EmptyRange
        If ``n < 1``.
    TooShort
        If fewer than two states are given.
    OutOfRangeState
        If any state index lies outside ``[0, n]``.
    """
    rng = OrdinalRange(int(n), tuple(labels) if labels is not None else None)
    arr = np.asarray(list(states) if not isinstance(states, np.ndarray) else states)
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        as_int = arr.astype(np.int64)
        if not np.array_equal(as_int, arr):
            raise OutOfRangeState(f"series {id!r}: states must be integers")
        arr = as_int
    if arr.shape[0] < 2:
        raise TooShort(f"series {id!r} has length {arr.shape[0]} < 2")
    bad = (arr < 0) | (arr > n)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise OutOfRangeState(
            f"series {id!r}: state {int(arr[k])} at position {k} outside [0, {n}]")
    return OrdinalSeries(str(id), rng, arr)


def encode_labels(symbols: Sequence[str], labels: Sequence[str],
                  id: str = "series") -> OrdinalSeries:
    """Map each symbol to its position in the ordered ``labels`` list.

    A single-symbol input is allowed here (the positional encoding is still
    well defined); the length check of :func:`validate_series` is skipped.
    """
    index = {str(lab): k for k, lab in enumerate(labels)}
    if len(index) != len(labels):
        raise OTSError("state labels must be distinct")
    try:
        states = [index[str(sym)] for sym in symbols]
    except KeyError as exc:
        raise UnknownLabel(f"unknown label {exc.args[0]!r}") from None
    rng = OrdinalRange(len(labels) - 1, tuple(labels))
    return OrdinalSeries(str(id), rng, np.asarray(states, dtype=np.int64))


def common_range(series: Sequence[OrdinalSeries]) -> int:
    """Return the shared ``n`` of a data set or raise :class:`RangeMismatch`."""
    ns = {x.n for x in series}
    if len(ns) != 1:
        raise RangeMismatch(f"series have different range sizes: {sorted(ns)}")
    return ns.pop()

"""Parsing and validation of location-activity panels and companion tables.

Table conventions (all inputs): UTF-8 CSV with a header row, comma separated,
RFC-4180 quoting accepted. Identifiers are opaque case-sensitive strings and
are kept sorted lexicographically; period labels are opaque strings (no date
semantics). All parsed containers are immutable after construction.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDatasetError, ParseError, UnknownIdError

TRADE_HEADER = ("location", "activity", "period", "value")
INDICATOR_HEADER = ("location", "value")
ADJACENCY_HEADER = ("location", "neighbor")
ADJACENCY_HEADER_W = ("location", "neighbor", "weight")

INDICATOR_KINDS = ("gini", "emission_intensity", "other")


def _frozen(arr: np.ndarray, dtype=float) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ActivityMatrix:
    """Dense location x activity intensity matrix for a single period.

    ``values[i, j]`` is the measured intensity of ``activities[j]`` in
    ``locations[i]``. Entries are finite and non-negative, identifiers are
    unique and sorted, and every retained row and column has at least one
    positive entry (the parser drops zero-only rows/columns and reports them).
    """

    locations: tuple[str, ...]
    activities: tuple[str, ...]
    period: str
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 2 or v.shape != (len(self.locations), len(self.activities)):
            raise ValueError("values shape does not match identifier lists")
        if not np.all(np.isfinite(v)) or (v < 0).any():
            raise ValueError("matrix entries must be finite and non-negative")
        if len(set(self.locations)) != len(self.locations):
            raise ValueError("duplicate location identifiers")
        if len(set(self.activities)) != len(self.activities):
            raise ValueError("duplicate activity identifiers")
        object.__setattr__(self, "values", v)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ActivityMatrix)
            and self.locations == other.locations
            and self.activities == other.activities
            and self.period == other.period
            and np.array_equal(self.values, other.values)
        )

    def location_index(self, location: str) -> int:
        try:
            return self.locations.index(location)
        except ValueError:
            raise UnknownIdError("location", location) from None

    def activity_index(self, activity: str) -> int:
        try:
            return self.activities.index(activity)
        except ValueError:
            raise UnknownIdError("activity", activity) from None

    def to_csv(self) -> str:
        """Serialize to the canonical long format (zero cells omitted)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRADE_HEADER)
        for i, loc in enumerate(self.locations):
            for j, act in enumerate(self.activities):
                v = self.values[i, j]
                if v != 0.0:
                    w.writerow([loc, act, self.period, repr(float(v))])
        return buf.getvalue()


@dataclass(frozen=True)
class LoadReport:
    """What the trade parser kept and what it discarded."""

    period: str
    rows_used: int
    duplicates_summed: int
    dropped_locations: tuple[str, ...]
    dropped_activities: tuple[str, ...]

    @property
    def dropped_count(self) -> int:
        return len(self.dropped_locations) + len(self.dropped_activities)


@dataclass(frozen=True, eq=False)
class IndicatorVector:
    """Per-location development indicator (e.g. a Gini or emission intensity)."""

    kind: str
    locations: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if len(self.locations) != self.values.shape[0]:
            raise ValueError("indicator length mismatch")

    def __contains__(self, location: str) -> bool:
        return location in self._index

    @property
    def _index(self) -> dict[str, int]:
        d = self.__dict__.get("_index_cache")
        if d is None:
            d = {loc: i for i, loc in enumerate(self.locations)}
            self.__dict__["_index_cache"] = d
        return d

    def get(self, location: str) -> float:
        try:
            return float(self.values[self._index[location]])
        except KeyError:
            raise UnknownIdError("location", location) from None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(INDICATOR_HEADER)
        for loc, v in zip(self.locations, self.values):
            w.writerow([loc, repr(float(v))])
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class SpatialGraph:
    """Undirected weighted adjacency between locations (weights >= 0, default 1)."""

    locations: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]  # (u, v, w) with u < v, sorted

    def neighbors(self, location: str) -> tuple[tuple[str, float], ...]:
        out = []
        for u, v, w in self.edges:
            if u == location:
                out.append((v, w))
            elif v == location:
                out.append((u, w))
        return tuple(sorted(out))

    def degree(self, location: str) -> int:
        return len(self.neighbors(location))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(ADJACENCY_HEADER_W)
        for u, v, wt in self.edges:
            w.writerow([u, v, repr(float(wt))])
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class EntryExitRecord:
    """Cell-level transitions between two specialization snapshots.

    Index sets are the intersection of the two snapshots (dropped ids are
    reported, not silently discarded); ``baseline`` is the earlier snapshot's
    M restricted to that intersection, which defines the candidate universe
    for entry analyses (all cells with baseline 0).
    """

    period0: str
    period1: str
    locations: tuple[str, ...]
    activities: tuple[str, ...]
    baseline: np.ndarray
    entries: frozenset[tuple[str, str]]
    exits: frozenset[tuple[str, str]]
    dropped_locations: tuple[str, ...]
    dropped_activities: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "baseline", _frozen(self.baseline, dtype=np.uint8))


def _read_rows(text: str, expected_header: tuple[str, ...], *,
               alt_header: tuple[str, ...] | None = None):
    """Yield (line_number, row) for each data row; validate the header."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDatasetError("input is empty (missing header row)") from None
    header = tuple(h.strip() for h in header)
    if header != expected_header and header != (alt_header or expected_header):
        want = ",".join(expected_header)
        raise ParseError(f"expected header {want!r}, got {','.join(header)!r}", line=1)
    for row in reader:
        if not row or (len(row) == 1 and row[0].strip() == ""):
            continue  # ignore blank lines
        yield reader.line_num, row
    return


def _parse_value(raw: str, line: int, *, what: str = "value") -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ParseError(f"malformed {what} {raw!r}", line) from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite {what} {raw!r}", line)
    return v


def parse_trade_table(text: str, period: str | None = None) -> tuple[ActivityMatrix, LoadReport]:
    """Parse a ``location,activity,period,value`` table into an ActivityMatrix.

    One period per call: either the file contains a single period label or
    ``period`` selects one. Duplicate (location, activity) rows are summed.
    Zero-only rows/columns are dropped and reported in the LoadReport.
    Negative or malformed values raise ParseError naming the line.
    """
    cells: dict[tuple[str, str], float] = {}
    periods_seen: set[str] = set()
    duplicates = 0
    rows_used = 0
    for line, row in _read_rows(text, TRADE_HEADER):
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", line)
        loc, act, per, raw = (f.strip() for f in row)
        if not loc or not act or not per:
            raise ParseError("empty identifier field", line)
        v = _parse_value(raw, line)
        if v < 0:
            raise ParseError(f"negative value {raw!r}", line)
        periods_seen.add(per)
        if period is not None and per != period:
            continue
        rows_used += 1
        key = (loc, act)
        if key in cells:
            duplicates += 1
            cells[key] += v
        else:
            cells[key] = v
    if period is None:
        if len(periods_seen) > 1:
            raise EmptyDatasetError(
                f"multiple periods present ({', '.join(sorted(periods_seen))}); "
                f"pass a period filter"
            )
        if not cells:
            raise EmptyDatasetError("no data rows")
        period = next(iter(periods_seen))
    elif not cells:
        raise EmptyDatasetError(f"no rows for period {period!r}")

    locations = sorted({loc for loc, _ in cells})
    activities = sorted({act for _, act in cells})
    values = np.zeros((len(locations), len(activities)))
    li = {l: i for i, l in enumerate(locations)}
    ai = {a: j for j, a in enumerate(activities)}
    for (loc, act), v in cells.items():
        values[li[loc], ai[act]] = v

    keep_rows = values.sum(axis=1) > 0
    keep_cols = values.sum(axis=0) > 0
    dropped_locations = tuple(l for l, k in zip(locations, keep_rows) if not k)
    dropped_activities = tuple(a for a, k in zip(activities, keep_cols) if not k)
    values = values[np.ix_(keep_rows, keep_cols)]
    locations = [l for l, k in zip(locations, keep_rows) if k]
    activities = [a for a, k in zip(activities, keep_cols) if k]
    if not locations or not activities:
        raise EmptyDatasetError("all rows/columns were zero-only")

    matrix = ActivityMatrix(tuple(locations), tuple(activities), period, values)
    report = LoadReport(period, rows_used, duplicates, dropped_locations, dropped_activities)
    return matrix, report


def parse_indicator_table(text: str, kind: str) -> IndicatorVector:
    """Parse a ``location,value`` table. Duplicate locations are an error."""
    if kind not in INDICATOR_KINDS:
        raise ValueError(f"unknown indicator kind {kind!r}; expected one of {INDICATOR_KINDS}")
    seen: dict[str, float] = {}
    for line, row in _read_rows(text, INDICATOR_HEADER):
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line)
        loc, raw = (f.strip() for f in row)
        if not loc:
            raise ParseError("empty location field", line)
        if loc in seen:
            raise ParseError(f"duplicate indicator row for location {loc!r}", line)
        seen[loc] = _parse_value(raw, line, what="indicator value")
    if not seen:
        raise EmptyDatasetError("indicator table has no data rows")
    locations = tuple(sorted(seen))
    return IndicatorVector(kind, locations, np.array([seen[l] for l in locations]))


def parse_adjacency(text: str) -> SpatialGraph:
    """Parse a ``location,neighbor[,weight]`` edge list into a SpatialGraph.

    Edges are undirected and symmetrized; duplicate edges keep the maximum
    weight; self-loops and negative weights are errors. Missing weight
    column defaults to 1.
    """
    edges: dict[tuple[str, str], float] = {}
    for line, row in _read_rows(text, ADJACENCY_HEADER, alt_header=ADJACENCY_HEADER_W):
        if len(row) not in (2, 3):
            raise ParseError(f"expected 2 or 3 fields, got {len(row)}", line)
        u, v = row[0].strip(), row[1].strip()
        if not u or not v:
            raise ParseError("empty location field", line)
        if u == v:
            raise ParseError(f"self-loop on {u!r}", line)
        w = _parse_value(row[2], line, what="weight") if len(row) == 3 else 1.0
        if w < 0:
            raise ParseError(f"negative weight {row[2]!r}", line)
        key = (min(u, v), max(u, v))
        edges[key] = max(edges.get(key, 0.0), w)
    if not edges:
        raise EmptyDatasetError("adjacency table has no data rows")
    locations = tuple(sorted({x for e in edges for x in e}))
    edge_list = tuple((u, v, edges[(u, v)]) for u, v in sorted(edges))
    return SpatialGraph(locations, edge_list)


def snapshot_diff(m0, m1) -> EntryExitRecord:
    """Diff two specialization snapshots into entries (0->1) and exits (1->0).

    Accepts any matrix-like objects with ``locations``, ``activities``,
    ``period`` and binary ``values``. Index sets are intersected; ids present
    in only one snapshot are reported as dropped.
    """
    locs = tuple(sorted(set(m0.locations) & set(m1.locations)))
    acts = tuple(sorted(set(m0.activities) & set(m1.activities)))
    if not locs or not acts:
        raise EmptyDatasetError("snapshots share no identifiers")
    dropped_locs = tuple(sorted((set(m0.locations) | set(m1.locations)) - set(locs)))
    dropped_acts = tuple(sorted((set(m0.activities) | set(m1.activities)) - set(acts)))

    def restrict(m):
        ri = [list(m.locations).index(l) for l in locs]
        ci = [list(m.activities).index(a) for a in acts]
        return np.asarray(m.values)[np.ix_(ri, ci)].astype(np.uint8)

    b0, b1 = restrict(m0), restrict(m1)
    ent, ext = [], []
    for i, l in enumerate(locs):
        for j, a in enumerate(acts):
            if b0[i, j] == 0 and b1[i, j] == 1:
                ent.append((l, a))
            elif b0[i, j] == 1 and b1[i, j] == 0:
                ext.append((l, a))
    return EntryExitRecord(
        period0=m0.period, period1=m1.period, locations=locs, activities=acts,
        baseline=b0, entries=frozenset(ent), exits=frozenset(ext),
        dropped_locations=dropped_locs, dropped_activities=dropped_acts,
    )

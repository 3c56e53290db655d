"""Geography-mediated relatedness: neighbor densities, ECI gradients, entry lift.

Locations pick up activities that are present in their geographic neighbors;
these helpers quantify that channel and test how well a chosen signal
(relatedness density, neighbor density, ...) predicts observed entries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import EntryExitRecord, SpatialGraph, _frozen
from .errors import UnknownIdError
from .metrics import ComplexityScores, SpecializationMatrix


@dataclass(frozen=True, eq=False)
class GeoDensityMatrix:
    """Weighted share of each location's neighbors specialized in each activity.

    Rows of locations with no (usable) neighbors are undefined: NaN values with
    ``defined`` False — explicitly not zero.
    """

    locations: tuple[str, ...]
    activities: tuple[str, ...]
    values: np.ndarray
    defined: np.ndarray
    dropped_neighbors: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        d = np.ascontiguousarray(self.defined, dtype=bool)
        d.setflags(write=False)
        object.__setattr__(self, "defined", d)


@dataclass(frozen=True, eq=False)
class GradientVector:
    """Per-location max/mean ECI difference toward geographic neighbors."""

    locations: tuple[str, ...]
    max_gradient: np.ndarray
    mean_gradient: np.ndarray
    defined: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "max_gradient", _frozen(self.max_gradient))
        object.__setattr__(self, "mean_gradient", _frozen(self.mean_gradient))
        d = np.ascontiguousarray(self.defined, dtype=bool)
        d.setflags(write=False)
        object.__setattr__(self, "defined", d)

    def to_payload(self) -> dict:
        return {
            "gradients": [
                {
                    "location": loc,
                    "max": float(self.max_gradient[i]) if self.defined[i] else None,
                    "mean": float(self.mean_gradient[i]) if self.defined[i] else None,
                    "defined": bool(self.defined[i]),
                }
                for i, loc in enumerate(self.locations)
            ]
        }


@dataclass(frozen=True)
class DecileBin:
    lo: float
    hi: float
    entry_rate: float
    count: int


@dataclass(frozen=True, eq=False)
class LiftReport:
    """How much higher the signal is among realized entries than non-entries.

    ``lift`` is mean(signal | entry) / mean(signal | no entry); +inf when the
    non-entry mean is zero but the entry mean is not (``degenerate`` True),
    None when there are no entries (or no non-entries with nonzero mean to
    compare against). A constant signal yields exactly 1.0.
    """

    signal: str
    lift: float | None
    degenerate: bool
    mean_entry: float | None
    mean_non_entry: float | None
    n_entries: int
    n_non_entries: int
    deciles: tuple[DecileBin, ...]

    def to_payload(self) -> dict:
        lift = self.lift
        if lift is not None and not math.isfinite(lift):
            lift = None  # JSON cannot carry Infinity; degenerate flag tells the story
        return {
            "signal": self.signal,
            "lift": lift,
            "degenerate": self.degenerate,
            "means": {"entries": self.mean_entry, "non_entries": self.mean_non_entry},
            "counts": {"entries": self.n_entries, "non_entries": self.n_non_entries},
            "deciles": [
                {"lo": b.lo, "hi": b.hi, "entry_rate": b.entry_rate, "count": b.count}
                for b in self.deciles
            ],
        }


def neighbor_density(m: SpecializationMatrix, geo: SpatialGraph) -> GeoDensityMatrix:
    """g[c, p] = sum over neighbors c' of w(c,c') M[c',p] / sum of w(c,c').

    Graph endpoints without specialization data cannot contribute and are
    dropped (reported); locations left without neighbors are undefined.
    """
    loc_index = {l: i for i, l in enumerate(m.locations)}
    dropped = tuple(sorted(l for l in geo.locations if l not in loc_index))
    n = len(m.locations)
    W = np.zeros((n, n))
    for u, v, w in geo.edges:
        if u in loc_index and v in loc_index:
            i, j = loc_index[u], loc_index[v]
            W[i, j] = w
            W[j, i] = w
    totals = W.sum(axis=1)
    defined = totals > 0
    M = m.values.astype(float)
    values = np.full((n, len(m.activities)), np.nan)
    if defined.any():
        values[defined] = (W[defined] @ M) / totals[defined, None]
    return GeoDensityMatrix(m.locations, m.activities, values, defined, dropped)


def complexity_gradient(scores: ComplexityScores, geo: SpatialGraph) -> GradientVector:
    """Max and mean of (neighbor ECI - own ECI) per graph location.

    Every graph location must have an ECI score. Locations without neighbors
    inside the graph cannot occur (edges define membership), but weights of 0
    still count as neighbors — the gradient is unweighted by design.
    """
    eci = {l: scores.eci_of(l) for l in scores.locations}
    for l in geo.locations:
        if l not in eci:
            raise UnknownIdError("location", l)
    locs = geo.locations
    mx = np.full(len(locs), np.nan)
    mn = np.full(len(locs), np.nan)
    defined = np.zeros(len(locs), dtype=bool)
    for i, l in enumerate(locs):
        nbrs = geo.neighbors(l)
        if not nbrs:
            continue
        diffs = [eci[nb] - eci[l] for nb, _ in nbrs]
        mx[i] = max(diffs)
        mn[i] = sum(diffs) / len(diffs)
        defined[i] = True
    return GradientVector(locs, mx, mn, defined)


def entry_lift(rec: EntryExitRecord, signal, quantiles: int = 10,
               signal_name: str | None = None) -> LiftReport:
    """Did high-signal cells actually get entered?

    The candidate universe is every (location, activity) cell of the record's
    index with baseline 0 and a finite signal value. ``signal`` is any
    matrix-like with locations/activities/values covering that index (e.g. a
    DensityMatrix or GeoDensityMatrix at the baseline period).
    """
    sig_loc = {l: i for i, l in enumerate(signal.locations)}
    sig_act = {a: j for j, a in enumerate(signal.activities)}
    for l in rec.locations:
        if l not in sig_loc:
            raise UnknownIdError("location", l)
    for a in rec.activities:
        if a not in sig_act:
            raise UnknownIdError("activity", a)
    S = np.asarray(signal.values)

    values, is_entry = [], []
    for i, l in enumerate(rec.locations):
        si = sig_loc[l]
        for j, a in enumerate(rec.activities):
            if rec.baseline[i, j]:
                continue
            v = float(S[si, sig_act[a]])
            if not math.isfinite(v):
                continue
            values.append(v)
            is_entry.append((l, a) in rec.entries)
    values_arr = np.array(values)
    entry_arr = np.array(is_entry, dtype=bool)
    name = signal_name or getattr(signal, "kind", None) or type(signal).__name__

    n_e = int(entry_arr.sum())
    n_ne = int((~entry_arr).sum())
    if values_arr.size == 0:
        return LiftReport(name, None, False, None, None, 0, 0, ())

    if np.all(values_arr == values_arr[0]):
        # a constant signal carries no information: lift is exactly 1 by definition
        rate = n_e / values_arr.size
        only = DecileBin(float(values_arr[0]), float(values_arr[0]), rate, values_arr.size)
        me = float(values_arr[0]) if n_e else None
        mne = float(values_arr[0]) if n_ne else None
        return LiftReport(name, 1.0 if (n_e and n_ne) else None, False,
                          me, mne, n_e, n_ne, (only,))

    mean_e = float(values_arr[entry_arr].mean()) if n_e else None
    mean_ne = float(values_arr[~entry_arr].mean()) if n_ne else None
    lift: float | None
    degenerate = False
    if mean_e is None or mean_ne is None:
        lift = None
    elif mean_ne == 0.0:
        lift = math.inf if mean_e > 0 else None
        degenerate = lift is not None
    else:
        lift = mean_e / mean_ne

    edges = np.unique(np.quantile(values_arr, np.linspace(0, 1, quantiles + 1)))
    bins = []
    for b in range(len(edges) - 1):
        lo, hi = float(edges[b]), float(edges[b + 1])
        if b == len(edges) - 2:
            in_bin = (values_arr >= lo) & (values_arr <= hi)
        else:
            in_bin = (values_arr >= lo) & (values_arr < hi)
        cnt = int(in_bin.sum())
        if cnt == 0:
            continue
        bins.append(DecileBin(lo, hi, float(entry_arr[in_bin].mean()), cnt))
    return LiftReport(name, lift, degenerate, mean_e, mean_ne, n_e, n_ne, tuple(bins))

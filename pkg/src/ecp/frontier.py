"""Strategic-frontier diagrams: relatedness vs value scatter with quadrants.

A diagram fixes one location (or, in the dual view, one activity) and plots
every counterpart as (relatedness density, value). Non-specialized points are
classified into four orientation-aware quadrants and the Pareto-maximal set
among them is flagged as the strategic frontier. Specialized points are shown
but never labeled or placed on the frontier.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import IndicatorVector, _frozen
from .errors import MissingIndicatorError, UnknownIdError
from .metrics import ComplexityScores, DensityMatrix, SpecializationMatrix, _pearson

QUADRANTS = ("let_it_be", "wish_you_were_here", "long_road_ahead", "stuck_in_the_mud")

#: value kinds where a *smaller* indicator is the desirable direction
LOWER_IS_BETTER_KINDS = ("pgi", "pei")


@dataclass(frozen=True, eq=False)
class ActivityValueVector:
    """Per-activity value axis: z-scored values plus the raw pre-standardized ones."""

    activities: tuple[str, ...]
    values: np.ndarray
    raw: np.ndarray
    kind: str
    higher_is_better: bool

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "raw", _frozen(self.raw))


@dataclass(frozen=True)
class Thresholds:
    omega: float | None
    value: float


@dataclass(frozen=True)
class DiagramPoint:
    id: str
    omega: float
    value: float
    specialized: bool
    quadrant: str | None
    on_frontier: bool


@dataclass(frozen=True, eq=False)
class FrontierDiagram:
    """Diagram for one location over all activities."""

    location: str
    value_kind: str
    orientation: str  # "higher" | "lower"
    thresholds: Thresholds
    points: tuple[DiagramPoint, ...]
    corr: float | None
    counts: dict[str, int]

    def to_payload(self) -> dict:
        return _payload("location", self.location, "activity", self)


@dataclass(frozen=True, eq=False)
class LocationDiagram:
    """Dual diagram for one activity over all locations (value axis = ECI)."""

    activity: str
    value_kind: str
    orientation: str
    thresholds: Thresholds
    points: tuple[DiagramPoint, ...]
    corr: float | None
    counts: dict[str, int]

    def to_payload(self) -> dict:
        return _payload("activity", self.activity, "location", self)

    def entry_candidates(self) -> tuple[str, ...]:
        """Non-specialized locations ordered by descending relatedness."""
        cands = [p for p in self.points if not p.specialized]
        cands.sort(key=lambda p: (-p.omega, p.id))
        return tuple(p.id for p in cands)


def _payload(subject_key: str, subject: str, point_key: str, diagram) -> dict:
    return {
        subject_key: subject,
        "value_kind": diagram.value_kind,
        "orientation": diagram.orientation,
        "thresholds": {
            "omega": diagram.thresholds.omega,
            "value": diagram.thresholds.value,
        },
        "points": [
            {
                point_key: p.id,
                "omega": p.omega,
                "value": p.value,
                "specialized": p.specialized,
                "quadrant": p.quadrant,
                "on_frontier": p.on_frontier,
            }
            for p in diagram.points
        ],
        "summary": {"corr": diagram.corr, "counts": dict(diagram.counts)},
    }


def activity_value(m: SpecializationMatrix, ind: IndicatorVector,
                   kind: str | None = None,
                   higher_is_better: bool = False) -> ActivityValueVector:
    """Specialization-weighted mean indicator per activity, z-scored.

    raw v[p] = sum_c M[c,p] ind[c] / sum_c M[c,p]. Every specialized location
    must have an indicator value (MissingIndicatorError otherwise). Activities
    nobody is specialized in cannot be averaged and are excluded (the parser
    never produces them, so in practice this is a guard, not a code path).
    """
    M = m.values.astype(float)
    ind_col = np.empty(len(m.locations))
    for i, loc in enumerate(m.locations):
        if M[i].any():
            if loc not in ind:
                raise MissingIndicatorError(loc)
            ind_col[i] = ind.get(loc)
        else:
            ind_col[i] = 0.0
    ubiquity = M.sum(axis=0)
    keep = ubiquity > 0
    acts = tuple(a for a, k in zip(m.activities, keep) if k)
    raw = (M.T @ ind_col)[keep] / ubiquity[keep]
    std = raw.std()
    z = (raw - raw.mean()) / std if std > 0 else np.zeros_like(raw)
    return ActivityValueVector(acts, z, raw, kind or f"mean-{ind.kind}",
                               higher_is_better)


def pci_values(scores: ComplexityScores) -> ActivityValueVector:
    """PCI as a (higher-is-better) value axis; already standardized."""
    return ActivityValueVector(scores.activities, scores.pci, scores.pci,
                               "pci", higher_is_better=True)


def pareto_front(omega: np.ndarray, value: np.ndarray) -> np.ndarray:
    """Boolean mask of Pareto-maximal points under (max omega, max value).

    A point is dominated iff another point is >= in both coordinates and
    strictly greater in at least one; exact ties are all kept on the frontier.
    Sort-and-sweep, O(n log n).
    """
    omega = np.asarray(omega, float)
    value = np.asarray(value, float)
    n = omega.shape[0]
    mask = np.zeros(n, dtype=bool)
    if n == 0:
        return mask
    order = np.lexsort((-value, -omega))  # omega desc, then value desc
    best = -np.inf
    i = 0
    while i < n:
        j = i
        while j < n and omega[order[j]] == omega[order[i]]:
            j += 1
        group = order[i:j]  # one omega level, value descending
        gmax = value[group[0]]
        if gmax > best:
            for k in group:
                if value[k] == gmax:
                    mask[k] = True
            best = gmax
        i = j
    return mask


def _classify(omega: np.ndarray, value: np.ndarray, specialized: np.ndarray,
              higher_is_better: bool, omega_threshold: float | None,
              value_threshold: float):
    """Quadrant labels, frontier flags, corr, and resolved thresholds."""
    cand = ~specialized
    if omega_threshold is None:
        omega_threshold = float(np.median(omega[cand])) if cand.any() else None

    quadrant: list[str | None] = [None] * len(omega)
    oriented = value if higher_is_better else -value
    oriented_thr = value_threshold if higher_is_better else -value_threshold
    for i in np.nonzero(cand)[0]:
        related = omega[i] >= omega_threshold
        desirable = oriented[i] >= oriented_thr
        if related and desirable:
            quadrant[i] = "let_it_be"
        elif desirable:
            quadrant[i] = "wish_you_were_here"
        elif related:
            quadrant[i] = "long_road_ahead"
        else:
            quadrant[i] = "stuck_in_the_mud"

    on_frontier = np.zeros(len(omega), dtype=bool)
    idx = np.nonzero(cand)[0]
    if idx.size:
        on_frontier[idx] = pareto_front(omega[idx], oriented[idx])

    corr = _pearson(omega[cand], value[cand]) if cand.sum() >= 3 else None
    counts = {q: 0 for q in QUADRANTS}
    for q in quadrant:
        if q is not None:
            counts[q] += 1
    return quadrant, on_frontier, corr, omega_threshold, counts


def build_diagram(ids: tuple[str, ...], omega: np.ndarray, value: np.ndarray,
                  specialized: np.ndarray, higher_is_better: bool,
                  omega_threshold: float | None, value_threshold: float):
    """Shared diagram core over explicit arrays; returns the pieces."""
    quad, front, corr, om_thr, counts = _classify(
        omega, value, specialized, higher_is_better, omega_threshold, value_threshold
    )
    points = tuple(
        DiagramPoint(
            id=ids[i], omega=float(omega[i]), value=float(value[i]),
            specialized=bool(specialized[i]), quadrant=quad[i],
            on_frontier=bool(front[i]),
        )
        for i in range(len(ids))
    )
    return points, corr, Thresholds(om_thr, value_threshold), counts


def frontier_diagram(location: str, omega: DensityMatrix, m: SpecializationMatrix,
                     values: ActivityValueVector,
                     omega_threshold: float | None = None,
                     value_threshold: float = 0.0) -> FrontierDiagram:
    """Diagram for one location: every activity at (density, value).

    Default thresholds: the median density over the location's non-specialized
    activities, and 0 on the (z-scored) value axis.
    """
    if location not in m.locations:
        raise UnknownIdError("location", location)
    if values.activities != m.activities:
        raise ValueError("value vector does not cover the matrix activities")
    i = m.locations.index(location)
    om = omega.values[list(omega.locations).index(location)]
    spec = m.values[i].astype(bool)
    points, corr, thr, counts = build_diagram(
        m.activities, om, values.values, spec, values.higher_is_better,
        omega_threshold, value_threshold,
    )
    return FrontierDiagram(
        location=location, value_kind=values.kind,
        orientation="higher" if values.higher_is_better else "lower",
        thresholds=thr, points=points, corr=corr, counts=counts,
    )


def location_diagram(activity: str, omega: DensityMatrix, m: SpecializationMatrix,
                     scores: ComplexityScores,
                     omega_threshold: float | None = None,
                     value_threshold: float = 0.0) -> LocationDiagram:
    """Dual view for one activity: every location at (density toward it, ECI)."""
    if activity not in m.activities:
        raise UnknownIdError("activity", activity)
    j = m.activities.index(activity)
    om = omega.values[:, j]
    spec = m.values[:, j].astype(bool)
    points, corr, thr, counts = build_diagram(
        m.locations, om, scores.eci, spec, True, omega_threshold, value_threshold,
    )
    return LocationDiagram(
        activity=activity, value_kind="eci", orientation="higher",
        thresholds=thr, points=points, corr=corr, counts=counts,
    )

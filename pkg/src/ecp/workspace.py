"""Workspaces: a built pipeline (matrix -> metrics -> graph) on disk.

A workspace directory holds the canonical inputs, every derived artifact as
inspectable CSV, and a manifest recording parameters and content hashes. The
in-memory Workspace is immutable after build; loading re-derives the pipeline
from the canonical inputs and verifies the manifest hash, so artifacts can
never drift from their source.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import frontier as frontier_mod
from .data import (
    ActivityMatrix,
    IndicatorVector,
    LoadReport,
    SpatialGraph,
    parse_adjacency,
    parse_indicator_table,
    parse_trade_table,
)
from .errors import (
    UnknownIdError,
    WorkspaceError,
    WorkspaceRebuildingError,
)
from .frontier import ActivityValueVector, FrontierDiagram, activity_value, pci_values
from .metrics import (
    ComplexityScores,
    DensityMatrix,
    FitnessScores,
    Margins,
    ProximityNetwork,
    RcaMatrix,
    SpecializationMatrix,
    binarize,
    eci_pci,
    fitness_complexity,
    margins,
    proximity,
    rca,
    relatedness_density,
)
from .strategy import ActivityGraph, build_activity_graph

MANIFEST_NAME = "manifest.json"
SCHEMA_VERSION = 1

#: value kind -> (indicator kind required, higher_is_better)
VALUE_KINDS = {
    "pci": (None, True),
    "pgi": ("gini", False),
    "pei": ("emission_intensity", False),
}


class IndicatorsUnavailableError(WorkspaceError):
    """A value kind needs an indicator table the workspace does not have."""

    def __init__(self, value_kind: str, indicator_kind: str):
        super().__init__(
            f"value kind {value_kind!r} needs a {indicator_kind!r} indicator table; "
            f"re-ingest with --indicators/--kind to add one"
        )
        self.value_kind = value_kind
        self.indicator_kind = indicator_kind


@dataclass(frozen=True)
class WorkspaceParams:
    rca_threshold: float = 1.0
    edge_threshold: float = 0.4

    def __post_init__(self):
        if not self.rca_threshold > 0:
            raise ValueError(f"rca threshold must be > 0, got {self.rca_threshold}")
        if not 0 < self.edge_threshold <= 1:
            raise ValueError(f"edge threshold must be in (0, 1], got {self.edge_threshold}")


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True, eq=False)
class Workspace:
    """Everything derived from one trade table under fixed parameters."""

    params: WorkspaceParams
    matrix: ActivityMatrix
    report: LoadReport
    rca: RcaMatrix
    m: SpecializationMatrix
    margins: Margins
    phi: ProximityNetwork
    omega: DensityMatrix
    scores: ComplexityScores
    fitness: FitnessScores
    indicators: dict[str, IndicatorVector]
    geo: SpatialGraph | None
    graph: ActivityGraph | None
    warnings: tuple[str, ...]
    content_hash: str
    built_at: str

    # -- construction ---------------------------------------------------------

    @classmethod
    def build(cls, trade_text: str, *, period: str | None = None,
              indicator_texts: dict[str, str] | None = None,
              adjacency_text: str | None = None,
              params: WorkspaceParams = WorkspaceParams()) -> "Workspace":
        matrix, report = parse_trade_table(trade_text, period)
        warnings: list[str] = []
        if report.dropped_count:
            warnings.append(
                f"dropped {len(report.dropped_locations)} zero-only locations and "
                f"{len(report.dropped_activities)} zero-only activities"
            )
        r = rca(matrix)
        m = binarize(r, params.rca_threshold)
        mg = margins(m)
        if (mg.diversity == 0).any() or (mg.ubiquity == 0).any():
            zloc = [l for l, d in zip(m.locations, mg.diversity) if d == 0]
            zact = [a for a, u in zip(m.activities, mg.ubiquity) if u == 0]
            raise WorkspaceError(
                "degenerate specialization matrix at threshold "
                f"{params.rca_threshold}: zero-diversity locations {zloc}, "
                f"zero-ubiquity activities {zact}"
            )
        phi = proximity(m)
        omega = relatedness_density(m, phi)
        scores = eci_pci(m)
        fitness = fitness_complexity(m)
        if not fitness.converged:
            warnings.append(
                f"fitness recursion did not converge in {fitness.iterations} "
                f"iterations (residual {fitness.residual:.3g}); scores are the "
                f"last iterate"
            )
        indicators = {
            kind: parse_indicator_table(text, kind)
            for kind, text in sorted((indicator_texts or {}).items())
        }
        geo = parse_adjacency(adjacency_text) if adjacency_text else None
        try:
            graph = build_activity_graph(phi, params.edge_threshold)
            if graph.pruned:
                warnings.append(
                    f"{len(graph.pruned)} activities isolated at edge threshold "
                    f"{params.edge_threshold}: {', '.join(graph.pruned)}"
                )
        except ValueError as exc:
            graph = None
            warnings.append(f"no activity graph: {exc}")

        content = hashlib.sha256()
        content.update(json.dumps({
            "rca_threshold": params.rca_threshold,
            "edge_threshold": params.edge_threshold,
        }, sort_keys=True).encode())
        content.update(matrix.to_csv().encode())
        for kind, vec in indicators.items():
            content.update(kind.encode())
            content.update(vec.to_csv().encode())
        if geo is not None:
            content.update(geo.to_csv().encode())

        return cls(
            params=params, matrix=matrix, report=report, rca=r, m=m, margins=mg,
            phi=phi, omega=omega, scores=scores, fitness=fitness,
            indicators=indicators, geo=geo, graph=graph,
            warnings=tuple(warnings), content_hash=content.hexdigest(),
            built_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )

    # -- value vectors and diagrams ------------------------------------------

    def value_vector(self, kind: str) -> ActivityValueVector:
        if kind not in VALUE_KINDS:
            raise ValueError(
                f"unknown value kind {kind!r}; expected one of {sorted(VALUE_KINDS)}"
            )
        indicator_kind, higher = VALUE_KINDS[kind]
        if indicator_kind is None:
            return pci_values(self.scores)
        if indicator_kind not in self.indicators:
            raise IndicatorsUnavailableError(kind, indicator_kind)
        return activity_value(self.m, self.indicators[indicator_kind], kind, higher)

    def frontier(self, location: str, value_kind: str = "pci") -> FrontierDiagram:
        return frontier_mod.frontier_diagram(
            location, self.omega, self.m, self.value_vector(value_kind)
        )

    def location_view(self, activity: str):
        return frontier_mod.location_diagram(activity, self.omega, self.m, self.scores)

    def whatif(self, location: str, add: tuple[str, ...],
               value_kind: str = "pci", recompute: str = "frozen") -> dict:
        """Hypothetically add activities to a location and re-draw its diagram.

        Default keeps proximity and scores frozen and recomputes only the
        location's density row; ``recompute='full'`` re-runs the whole
        pipeline on the modified matrix. The additions must be disjoint from
        the location's current specializations (ValueError otherwise). Returns
        the payload dict (deltas plus re-drawn diagram).
        """
        if recompute not in ("frozen", "full"):
            raise ValueError(f"recompute must be 'frozen' or 'full', got {recompute!r}")
        i = self.m.locations.index(location) if location in self.m.locations else None
        if i is None:
            raise UnknownIdError("location", location)
        for a in add:
            if a not in self.m.activities:
                raise UnknownIdError("activity", a)
        row = self.m.values[i].astype(np.uint8)
        already = [a for a in add if row[self.m.activities.index(a)]]
        if already:
            raise ValueError(
                f"hypothetical additions must be disjoint from current "
                f"specializations; {location!r} already holds {already}"
            )
        new_row = row.copy()
        for a in add:
            new_row[self.m.activities.index(a)] = 1

        base_omega = self.omega.values[i]
        if recompute == "frozen":
            # omega is linear in the row, so the hypothetical row's density is
            # the baseline plus the additions' own contribution. Computing it
            # additively keeps H = empty an exact identity and makes the deltas
            # exactly nonnegative.
            h = (new_row - row).astype(float)
            P = self.phi.values
            denom = P.sum(axis=1)
            contrib = np.where(denom > 0, (h @ P) / np.where(denom > 0, denom, 1.0), 0.0)
            new_omega = base_omega + contrib
            values = self.value_vector(value_kind)
        else:
            new_values = self.m.values.copy()
            new_values[i] = new_row
            m2 = SpecializationMatrix(self.m.locations, self.m.activities,
                                      self.m.period, new_values, self.m.threshold)
            phi2 = proximity(m2)
            omega2 = relatedness_density(m2, phi2)
            new_omega = omega2.values[i]
            if value_kind == "pci":
                values = pci_values(eci_pci(m2))
            else:
                ik, higher = VALUE_KINDS[value_kind]
                if ik not in self.indicators:
                    raise IndicatorsUnavailableError(value_kind, ik)
                values = activity_value(m2, self.indicators[ik], value_kind, higher)

        points, corr, thr, counts = frontier_mod.build_diagram(
            self.m.activities, new_omega, values.values,
            new_row.astype(bool), values.higher_is_better, None, 0.0,
        )
        diagram = FrontierDiagram(
            location=location, value_kind=values.kind,
            orientation="higher" if values.higher_is_better else "lower",
            thresholds=thr, points=points, corr=corr, counts=counts,
        )
        deltas = [
            {
                "activity": a,
                "before": float(base_omega[j]),
                "after": float(new_omega[j]),
                "delta": float(new_omega[j] - base_omega[j]),
            }
            for j, a in enumerate(self.m.activities)
        ]
        return {
            "location": location,
            "added": sorted(add),
            "value_kind": value_kind,
            "recompute": recompute,
            "deltas": deltas,
            "diagram": diagram.to_payload(),
        }

    # -- persistence ----------------------------------------------------------

    def _artifacts(self) -> dict[str, str]:
        """Canonical CSV artifacts, keyed by file name."""
        def table(header, rows):
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
            return buf.getvalue()

        m = self.m
        arts = {
            "trade.csv": self.matrix.to_csv(),
            "specialization.csv": table(
                ("location", "activity", "period", "value"),
                [
                    (l, a, m.period, 1)
                    for i, l in enumerate(m.locations)
                    for j, a in enumerate(m.activities)
                    if m.values[i, j]
                ],
            ),
            "proximity.csv": table(
                ("activity_a", "activity_b", "value"),
                [
                    (m.activities[i], m.activities[j], repr(float(self.phi.values[i, j])))
                    for i in range(len(m.activities))
                    for j in range(i + 1, len(m.activities))
                    if self.phi.values[i, j] != 0.0
                ],
            ),
            "density.csv": table(
                ("location", "activity", "value"),
                [
                    (l, a, repr(float(self.omega.values[i, j])))
                    for i, l in enumerate(m.locations)
                    for j, a in enumerate(m.activities)
                ],
            ),
            "eci.csv": table(
                ("location", "value"),
                [(l, repr(float(v))) for l, v in zip(m.locations, self.scores.eci)],
            ),
            "pci.csv": table(
                ("activity", "value"),
                [(a, repr(float(v))) for a, v in zip(m.activities, self.scores.pci)],
            ),
            "fitness.csv": table(
                ("location", "value"),
                [(l, repr(float(v))) for l, v in zip(m.locations, self.fitness.fitness)],
            ),
            "q_complexity.csv": table(
                ("activity", "value"),
                [(a, repr(float(v))) for a, v in zip(m.activities, self.fitness.q)],
            ),
        }
        for kind, vec in self.indicators.items():
            arts[f"indicators_{kind}.csv"] = vec.to_csv()
        if self.geo is not None:
            arts["adjacency.csv"] = self.geo.to_csv()
        return arts

    def manifest(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "period": self.matrix.period,
            "parameters": {
                "rca_threshold": self.params.rca_threshold,
                "edge_threshold": self.params.edge_threshold,
            },
            "indicator_kinds": sorted(self.indicators),
            "has_adjacency": self.geo is not None,
            "content_hash": self.content_hash,
            "built_at": self.built_at,
            "warnings": list(self.warnings),
            "load_report": {
                "rows_used": self.report.rows_used,
                "duplicates_summed": self.report.duplicates_summed,
                "dropped_locations": list(self.report.dropped_locations),
                "dropped_activities": list(self.report.dropped_activities),
            },
        }

    def write(self, target: str | Path) -> Path:
        """Write all artifacts atomically (build into a temp dir, then rename)."""
        target = Path(target)
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=f".{target.name}-", dir=target.parent))
        try:
            for name, text in self._artifacts().items():
                (tmp / name).write_text(text, encoding="utf-8")
            (tmp / MANIFEST_NAME).write_text(
                json.dumps(self.manifest(), indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            if target.exists():
                backup = target.with_name(target.name + ".old")
                os.replace(target, backup)
                os.replace(tmp, target)
                _rmtree(backup)
            else:
                os.replace(tmp, target)
        except Exception:
            _rmtree(tmp)
            raise
        return target

    @classmethod
    def load(cls, path: str | Path) -> "Workspace":
        """Re-derive the pipeline from a workspace directory's canonical inputs."""
        path = Path(path)
        if not path.is_dir():
            raise WorkspaceError(f"no workspace directory at {path}")
        manifest_path = path / MANIFEST_NAME
        if not manifest_path.is_file():
            raise WorkspaceRebuildingError(
                f"workspace at {path} has no manifest (still being built?)"
            )
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        params = WorkspaceParams(
            rca_threshold=manifest["parameters"]["rca_threshold"],
            edge_threshold=manifest["parameters"]["edge_threshold"],
        )
        trade_path = path / "trade.csv"
        if not trade_path.is_file():
            raise WorkspaceError(f"workspace at {path} is missing trade.csv")
        indicator_texts = {}
        for kind in manifest.get("indicator_kinds", []):
            p = path / f"indicators_{kind}.csv"
            if not p.is_file():
                raise WorkspaceError(f"workspace at {path} is missing {p.name}")
            indicator_texts[kind] = p.read_text(encoding="utf-8")
        adjacency_text = None
        if manifest.get("has_adjacency"):
            p = path / "adjacency.csv"
            if not p.is_file():
                raise WorkspaceError(f"workspace at {path} is missing adjacency.csv")
            adjacency_text = p.read_text(encoding="utf-8")
        try:
            ws = cls.build(
                trade_path.read_text(encoding="utf-8"),
                indicator_texts=indicator_texts,
                adjacency_text=adjacency_text,
                params=params,
            )
        except WorkspaceError:
            raise
        except ValueError as exc:
            # a previously written workspace must rebuild cleanly; any pipeline
            # failure means the directory contents were altered or truncated
            raise WorkspaceError(
                f"workspace at {path} is corrupted: rebuild failed ({exc})"
            ) from exc
        if ws.content_hash != manifest.get("content_hash"):
            raise WorkspaceError(
                f"workspace at {path} is corrupted: content hash mismatch "
                f"(manifest {manifest.get('content_hash')!r}, "
                f"recomputed {ws.content_hash!r})"
            )
        if manifest.get("built_at"):
            ws = dataclasses.replace(ws, built_at=manifest["built_at"])
        return ws


def _rmtree(p: Path) -> None:
    import shutil

    shutil.rmtree(p, ignore_errors=True)

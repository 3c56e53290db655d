"""Command-line interface: ingest, frontier, simulate, serve.

Exit codes: 0 success; 1 data errors (parse failures, degenerate matrices,
corrupted workspaces); 2 usage errors (missing files, bad thresholds);
3 unknown location/activity ids; 4 value kinds whose indicator table is not
in the workspace; 5 exact-DP capacity exceeded.

JSON goes to stdout in canonical form (compact separators, sorted nothing,
trailing newline) so CLI output is byte-identical to the HTTP service body
for the same query.
"""
from __future__ import annotations

import csv
import sys
from pathlib import Path

import click

from .data import INDICATOR_KINDS
from .errors import (
    CapacityError,
    ConvergenceError,
    DisconnectedSpecializationError,
    EmptyDatasetError,
    InfeasibleTargetError,
    ParseError,
    UnknownIdError,
    WorkspaceError,
)
from .jsonutil import canonical_dumps
from .strategy import Policy, expected_completion, load_instance, simulate
from .workspace import (
    IndicatorsUnavailableError,
    Workspace,
    WorkspaceParams,
)

EXIT_DATA = 1
EXIT_UNKNOWN_ID = 3
EXIT_NO_INDICATOR = 4
EXIT_CAPACITY = 5


class _Fail(click.ClickException):
    """ClickException with a caller-chosen exit code."""

    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.exit_code = code


def _read(path: Path, what: str = "file") -> str:
    if not path.is_file():
        raise click.UsageError(f"{what} not found: {path}")
    return path.read_text(encoding="utf-8")


def _load_workspace(path: Path) -> Workspace:
    if not path.exists():
        raise click.UsageError(f"workspace not found: {path}")
    try:
        return Workspace.load(path)
    except WorkspaceError as exc:
        raise _Fail(str(exc), EXIT_DATA) from exc


@click.group()
@click.version_option(package_name="ecp", prog_name="ecp")
def main():
    """Relatedness, complexity, and diversification-strategy toolkit."""


@main.command()
@click.argument("trade_csv", type=click.Path(path_type=Path))
@click.option("--indicators", "indicator_paths", multiple=True,
              type=click.Path(path_type=Path),
              help="Indicator CSV; pair each with a --kind.")
@click.option("--kind", "indicator_kinds", multiple=True,
              type=click.Choice(INDICATOR_KINDS),
              help="Kind of the matching --indicators file, in order.")
@click.option("--adjacency", "adjacency_path", type=click.Path(path_type=Path),
              help="Spatial adjacency CSV (location_a,location_b[,weight]).")
@click.option("--rca-threshold", default=1.0, show_default=True,
              help="Specialization cutoff on the RCA matrix.")
@click.option("--edge-threshold", default=0.4, show_default=True,
              help="Proximity cutoff for the activity graph.")
@click.option("--period", default=None,
              help="Period to select when the trade table has several.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path),
              help="Workspace directory to (over)write.")
def ingest(trade_csv: Path, indicator_paths, indicator_kinds, adjacency_path,
           rca_threshold, edge_threshold, period, out_dir: Path):
    """Build a workspace directory from a trade table."""
    if len(indicator_paths) != len(indicator_kinds):
        raise click.UsageError(
            f"each --indicators needs a matching --kind "
            f"(got {len(indicator_paths)} and {len(indicator_kinds)})"
        )
    try:
        params = WorkspaceParams(rca_threshold, edge_threshold)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    trade_text = _read(trade_csv)
    indicator_texts = {}
    for p, kind in zip(indicator_paths, indicator_kinds):
        if kind in indicator_texts:
            raise click.UsageError(f"duplicate indicator kind {kind!r}")
        indicator_texts[kind] = _read(p, "indicator file")
    adjacency_text = _read(adjacency_path, "adjacency file") if adjacency_path else None

    try:
        ws = Workspace.build(
            trade_text, period=period, indicator_texts=indicator_texts,
            adjacency_text=adjacency_text, params=params,
        )
    except ParseError as exc:
        raise _Fail(f"{trade_csv}: {exc}", EXIT_DATA) from exc
    except (EmptyDatasetError, DisconnectedSpecializationError,
            ConvergenceError, WorkspaceError) as exc:
        raise _Fail(str(exc), EXIT_DATA) from exc

    ws.write(out_dir)
    click.echo(f"workspace written to {out_dir}")
    click.echo(
        f"period {ws.matrix.period}: {len(ws.m.locations)} locations, "
        f"{len(ws.m.activities)} activities"
    )
    for w in ws.warnings:
        click.echo(f"warning: {w}", err=True)


@main.command()
@click.argument("workspace_dir", type=click.Path(path_type=Path))
@click.option("--location", required=True, help="Location id for the diagram.")
@click.option("--value", "value_kind", default="pci", show_default=True,
              type=click.Choice(["pci", "pgi", "pei"]),
              help="Value axis: complexity, or an indicator-derived score.")
@click.option("--format", "fmt", default="json", show_default=True,
              type=click.Choice(["json", "csv"]))
def frontier(workspace_dir: Path, location: str, value_kind: str, fmt: str):
    """Print a location's relatedness-value diagram."""
    ws = _load_workspace(workspace_dir)
    try:
        diagram = ws.frontier(location, value_kind)
    except UnknownIdError as exc:
        raise _Fail(str(exc), EXIT_UNKNOWN_ID) from exc
    except IndicatorsUnavailableError as exc:
        raise _Fail(str(exc), EXIT_NO_INDICATOR) from exc

    if fmt == "json":
        click.echo(canonical_dumps(diagram.to_payload()), nl=False)
        return
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("activity", "omega", "value", "specialized", "quadrant",
                     "on_frontier"))
    for p in diagram.points:
        writer.writerow((
            p.id, repr(p.omega), repr(p.value),
            "true" if p.specialized else "false",
            p.quadrant or "",
            "true" if p.on_frontier else "false",
        ))


def _parse_policy(spec: str) -> Policy:
    """Parse a CLI policy spec; `order:FILE` reads one activity id per line."""
    if spec.startswith("order:"):
        path = Path(spec.split(":", 1)[1])
        text = _read(path, "order file")
        order = tuple(line.strip() for line in text.splitlines() if line.strip())
        try:
            return Policy("order", order=order)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
    try:
        return Policy.parse(spec)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


@main.command("simulate")
@click.argument("instance_json", type=click.Path(path_type=Path))
@click.option("--policy", "policy_spec", default=None,
              help="greedy | optimal | lookahead:K | order:FILE "
                   "[default: the instance's policy, else greedy]")
@click.option("--trials", type=int, default=None,
              help="Monte-Carlo trials; omit for the analytic value only.")
@click.option("--seed", type=int, default=None,
              help="Seed for --trials (required with it).")
@click.option("--ci-level", default=0.95, show_default=True,
              help="Confidence level for the Monte-Carlo interval.")
def simulate_cmd(instance_json: Path, policy_spec, trials, seed, ci_level):
    """Evaluate a diversification policy on a strategy instance."""
    text = _read(instance_json, "instance file")
    try:
        g, active, embedded_policy, params = load_instance(text)
    except UnknownIdError as exc:
        raise _Fail(str(exc), EXIT_UNKNOWN_ID) from exc
    except ValueError as exc:
        raise _Fail(f"{instance_json}: {exc}", EXIT_DATA) from exc

    policy = _parse_policy(policy_spec or embedded_policy or "greedy")
    if trials is None:
        trials = params.get("trials")
    if seed is None:
        seed = params.get("seed")
    if trials is not None and seed is None:
        raise click.UsageError("--trials needs --seed (all randomness is seeded)")

    try:
        if trials is None:
            ev = expected_completion(g, active, policy)
        else:
            ev = simulate(g, active, policy, int(trials), int(seed),
                          ci_level=ci_level)
    except CapacityError as exc:
        raise _Fail(str(exc), EXIT_CAPACITY) from exc
    except InfeasibleTargetError as exc:
        raise _Fail(str(exc), EXIT_DATA) from exc
    except UnknownIdError as exc:
        raise _Fail(str(exc), EXIT_UNKNOWN_ID) from exc
    except ValueError as exc:
        raise _Fail(str(exc), EXIT_DATA) from exc
    click.echo(canonical_dumps(ev.to_payload()), nl=False)


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--workspace-dir", envvar="ECP_WORKSPACE_DIR", required=True,
              type=click.Path(path_type=Path),
              help="Directory whose subdirectories are workspaces "
                   "[env: ECP_WORKSPACE_DIR]")
@click.option("--sim-workers", default=2, show_default=True,
              help="Concurrent simulation worker budget.")
def serve(port: int, host: str, workspace_dir: Path, sim_workers: int):
    """Serve workspaces over HTTP (JSON, same bodies as the CLI)."""
    import uvicorn

    from .server import create_app

    if not workspace_dir.is_dir():
        raise click.UsageError(f"workspace dir not found: {workspace_dir}")
    app = create_app(workspace_dir, sim_workers=sim_workers)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()

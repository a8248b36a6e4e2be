"""Command line entry points; all engine work happens in the library.

Batch commands (`run`, `replay`, `bench`) execute in-process so their output
is deterministic and needs no server; `serve` hands the engine to the web
service. Every option can also be set through a DRIVERSA_* environment
variable (for example DRIVERSA_SERVE_PORT).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .bench import DEFAULT_COUNTS, format_report, run_bench
from .errors import EngineError
from .session import run_session
from .simulator import bundled_scenario_path, load_scenario
from .trace import read_trace, render_header, render_tick, render_tick_detail

CONTEXT_SETTINGS = {"auto_envvar_prefix": "DRIVERSA", "help_option_names": ["-h", "--help"]}


def _load(scenario: str | None):
    path = Path(scenario) if scenario else bundled_scenario_path()
    return load_scenario(path)


@click.group(context_settings=CONTEXT_SETTINGS)
@click.version_option(package_name="driversa")
def main():
    """Driver situation-awareness engine."""


@main.command()
@click.argument("scenario", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False),
              help="Write a canonical NDJSON trace to this file.")
@click.option("--timings", "timings_path", type=click.Path(dir_okay=False),
              help="Write per-tick stage latencies to this sidecar file.")
@click.option("--quiet", is_flag=True, help="Suppress the per-event log.")
def run(scenario, trace_path, timings_path, quiet):
    """Run a scenario front to back (bundled one if none is given)."""
    try:
        scn = _load(scenario)
        summary = run_session(scn, trace_path=trace_path, timings_path=timings_path)
    except EngineError as exc:
        raise click.ClickException(str(exc)) from None
    if not quiet:
        for entry in summary.events:
            tick, _, event = entry.partition(":")
            click.echo(f"[{int(tick):6d}] {event}")
    click.echo(f"{summary.scenario}: {summary.ticks} ticks, "
               f"{len(summary.events)} events, "
               f"{summary.divergence_ticks} ticks with divergences "
               f"(peak priority {summary.peak_divergence:.3f})")
    if trace_path:
        click.echo(f"trace written to {trace_path}")


@main.command()
@click.argument("trace", type=click.Path(exists=True, dir_okay=False))
@click.option("--tick", "tick_no", type=int, default=None,
              help="Show the full detail of one tick instead of the log.")
@click.option("--object", "object_id", default=None,
              help="Only lines involving this vehicle id.")
@click.option("--events", "events_only", is_flag=True,
              help="Only occurred events, no divergences.")
def replay(trace, tick_no, object_id, events_only):
    """Render a recorded trace as a readable log."""
    try:
        header, records = read_trace(trace)
    except EngineError as exc:
        raise click.ClickException(str(exc)) from None
    click.echo(render_header(header))
    if tick_no is not None:
        for rec in records:
            if rec["tick"] == tick_no:
                click.echo("\n".join(render_tick_detail(rec)))
                return
        raise click.ClickException(f"trace has no tick {tick_no}")
    for rec in records:
        lines = render_tick(rec, events_only=events_only, object_id=object_id)
        if lines:
            click.echo("\n".join(lines))


@main.command()
@click.option("--counts", default=",".join(str(c) for c in DEFAULT_COUNTS),
              show_default=True, help="Comma-separated vehicle counts to sweep.")
@click.option("--ticks", default=2000, show_default=True,
              help="Virtual ticks per case.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False),
              help="Also write the full report as JSON.")
def bench(counts, ticks, report_path):
    """Measure pipeline latency over procedural scenarios."""
    try:
        parsed = tuple(int(c) for c in counts.split(",") if c.strip())
    except ValueError:
        raise click.ClickException(f"--counts must be integers, got {counts!r}") from None
    report = run_bench(counts=parsed, ticks=ticks)
    click.echo(format_report(report))
    if report_path:
        report.save(report_path)
        click.echo(f"report written to {report_path}")
    if not all(case.realtime for case in report.cases):
        sys.exit(1)


@main.command()
@click.argument("scenario", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--scripted", is_flag=True,
              help="Keep the scenario's own gaze script instead of switching "
                   "to interactive gaze.")
@click.option("--ui-dir", type=click.Path(file_okay=False), default=None,
              help="Directory with the built web UI to serve at /.")
def serve(scenario, host, port, scripted, ui_dir):
    """Serve live sessions over websocket (plus the web UI if built)."""
    import uvicorn

    from .service.app import create_app

    try:
        scn = _load(scenario)
    except EngineError as exc:
        raise click.ClickException(str(exc)) from None
    app = create_app(scn, interactive=not scripted, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")

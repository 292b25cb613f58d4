"""Command-line entry points: serve the HTTP service, export a saved
session, and run accuracy-audit reports."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from gentl import audit as audit_mod
from gentl import store
from gentl.errors import GenTLError
from gentl.gateway import LiveProvider, MockProvider
from gentl.service import TimelineService


@click.group()
def main() -> None:
    """Generative timeline engine."""


@main.command()
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--provider",
    "provider_name",
    type=click.Choice(["mock", "live"]),
    default="mock",
    show_default=True,
)
@click.option("--fixtures", "fixtures_dir", type=click.Path(), default=None,
              help="Fixture directory for the mock provider.")
@click.option("--sessions", "sessions_dir", type=click.Path(), default="sessions",
              show_default=True, help="Directory for saved sessions (loaded at startup).")
@click.option("--mock-mode", type=click.Choice(["demo", "strict"]), default="demo",
              show_default=True)
@click.option("--base-url", default="https://api.openai.com/v1", show_default=True,
              help="Chat-completions endpoint for the live provider.")
@click.option("--model", default="gpt-4", show_default=True)
@click.option("--search/--no-search", default=True, show_default=True,
              help="Ask the live provider for web-search citations.")
@click.option("--images", is_flag=True, default=False,
              help="Issue image prompts alongside explanations.")
@click.option("--static", "static_dir", type=click.Path(), default="frontend/dist",
              show_default=True, help="Built web client to serve at /.")
@click.option("--request-cap", type=int, default=None,
              help="Optional per-session provider-call budget.")
def serve(
    port: int,
    host: str,
    provider_name: str,
    fixtures_dir: str | None,
    sessions_dir: str,
    mock_mode: str,
    base_url: str,
    model: str,
    search: bool,
    images: bool,
    static_dir: str,
    request_cap: int | None,
) -> None:
    """Run the HTTP service (API plus web client if built)."""
    import uvicorn

    from gentl.api import create_app

    if provider_name == "mock":
        provider = MockProvider(fixtures_dir=fixtures_dir, mode=mock_mode)
    else:
        provider = LiveProvider(base_url=base_url, model=model, search=search)
    service = TimelineService(
        provider,
        sessions_dir=sessions_dir,
        images_enabled=images,
        request_cap=request_cap,
    )
    sessions_path = Path(sessions_dir)
    if sessions_path.is_dir():
        loaded = service.load_sessions(sessions_path)
        if loaded:
            click.echo(f"loaded {len(loaded)} session(s) from {sessions_dir}")
    app = create_app(service, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--session", "session_file", type=click.Path(exists=True), required=True)
@click.option("--out", "out_file", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(["outline", "document"]),
              default="outline", show_default=True)
def export(session_file: str, out_file: str, fmt: str) -> None:
    """Export a saved session as a chronological text outline."""
    try:
        state = store.load_session(session_file)
        text = store.export_timeline(state, fmt)
    except GenTLError as exc:
        raise click.ClickException(str(exc)) from exc
    Path(out_file).write_text(text, "utf-8")
    click.echo(f"wrote {out_file}")


@main.group()
def audit() -> None:
    """Accuracy-audit tooling over generation logs."""


@audit.command("report")
@click.option("--log", "log_file", type=click.Path(exists=True), required=True,
              help="JSON file: either a session document or a list of records.")
@click.option("--labels", "labels_file", type=click.Path(exists=True), required=True)
@click.option("--mode", type=click.Choice(["pooled", "macro"]), default="pooled",
              show_default=True)
@click.option("--study-key", default=None, help="Record field naming the study (macro mode).")
@click.option("--json", "as_json", is_flag=True, default=False)
def audit_report_cmd(
    log_file: str, labels_file: str, mode: str, study_key: str | None, as_json: bool
) -> None:
    """Per-category accuracy percentages from human labels."""
    doc = json.loads(Path(log_file).read_text("utf-8"))
    records = doc["records"] if isinstance(doc, dict) else doc
    try:
        labels = audit_mod.read_labels(labels_file)
        rows = audit_mod.audit_report(
            records,
            labels,
            mode="per_study_macro" if mode == "macro" else "pooled",
            study_key=study_key,
        )
    except GenTLError as exc:
        raise click.ClickException(str(exc)) from exc
    if as_json:
        click.echo(json.dumps(audit_mod.report_json(rows), indent=2))
    else:
        click.echo(audit_mod.format_report(rows), nl=False)


if __name__ == "__main__":
    sys.exit(main())

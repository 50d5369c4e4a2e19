"""Command-line entry points.

Exit codes: 0 on success, 1 when a model has violations (or exploration
finds invariant violations), 2 when a model file cannot be parsed.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .compiler import compile_model, export_dot
from .cpn import net_to_json
from .engine import Engine, SchemaError
from .explorer import explore
from .parsing import ParseError, parse_case_model
from .validation import validate_all


def _load(path: str):
    try:
        return parse_case_model(Path(path).read_text())
    except OSError as exc:
        click.echo(f"cannot read {path}: {exc.strerror}", err=True)
        sys.exit(2)
    except ParseError as exc:
        click.echo(f"parse error in {path}: {exc}", err=True)
        sys.exit(2)


def _load_valid(path: str):
    model = _load(path)
    violations = validate_all(model)
    if violations:
        for v in violations:
            click.echo(f"{v.code} [{v.subject}]: {v.message}", err=True)
        click.echo(f"{len(violations)} violations", err=True)
        sys.exit(1)
    return model


@click.group()
def main() -> None:
    """Validate, compile, explore, and run fragment-based case models."""


@main.command()
@click.argument("model_file")
def validate(model_file: str) -> None:
    """Check a model file; list violations if there are any."""
    model = _load(model_file)
    violations = validate_all(model)
    for v in violations:
        click.echo(f"{v.code} [{v.subject}]: {v.message}")
    click.echo(f"{len(violations)} violations")
    if violations:
        sys.exit(1)


@main.command()
@click.argument("model_file")
@click.option("-o", "--out", "out_file", required=True, help="Where to write the net document.")
@click.option("--dot", "dot_file", default=None, help="Also write a Graphviz rendering.")
def compile(model_file: str, out_file: str, dot_file: str | None) -> None:
    """Compile a model to an executable net document."""
    model = _load_valid(model_file)
    net, report = compile_model(model)
    Path(out_file).write_text(json.dumps(net_to_json(net), indent=2) + "\n")
    if dot_file:
        Path(dot_file).write_text(export_dot(net))
    click.echo(f"{len(net.transitions)} transitions, {len(net.places)} places -> {out_file}")


@main.command("explore")
@click.argument("model_file")
@click.option("--max-states", default=10_000, show_default=True, help="State cap for the search.")
def explore_cmd(model_file: str, max_states: int) -> None:
    """Search the reachable markings and check invariants."""
    model = _load_valid(model_file)
    net, _ = compile_model(model)
    report = explore(net, max_states=max_states)
    click.echo(json.dumps(report.to_json(), indent=2))
    if report.violations:
        sys.exit(1)


def _prompt_value(class_name: str, name: str, type_name: str) -> object:
    while True:
        raw = click.prompt(f"  {class_name}.{name} ({type_name})", type=str)
        if type_name == "string":
            return raw
        if type_name == "integer":
            try:
                return int(raw)
            except ValueError:
                click.echo("  not an integer, try again")
        elif type_name == "boolean":
            if raw.lower() in ("true", "yes", "y", "1"):
                return True
            if raw.lower() in ("false", "no", "n", "0"):
                return False
            click.echo("  expected true or false, try again")


@main.command()
@click.argument("model_file")
def run(model_file: str) -> None:
    """Walk one case interactively: pick steps, fill in attributes."""
    model = _load_valid(model_file)
    engine = Engine(model)
    cs = engine.create_case()
    click.echo(f"case {cs.case_id} on {model_file}")

    while cs.status != "terminated":
        options = engine.enabled_steps(cs)
        if not options:
            click.echo("no enabled steps, case is stuck")
            sys.exit(1)
        click.echo("")
        for n, option in enumerate(options):
            summary = ", ".join(
                f"{var[2:]}={_token_text(tok)}" for var, tok in sorted(option.binding_summary().items())
            )
            click.echo(f"[{n}] {option.human_label}" + (f"  ({summary})" if summary else ""))
        choice = click.prompt("step number (q to quit)", type=str)
        if choice.strip().lower() == "q":
            return
        try:
            option = options[int(choice)]
        except (ValueError, IndexError):
            click.echo("pick one of the listed numbers")
            continue
        attributes: dict[str, dict[str, object]] = {}
        for form in option.required_forms:
            if form.mode != "created":
                continue
            click.echo(f"new {form.class_name}:")
            attributes[form.class_name] = {
                spec.name: _prompt_value(form.class_name, spec.name, spec.type)
                for spec in form.schema
            }
        try:
            cs = engine.apply_step(cs, option, attributes)
        except SchemaError as exc:
            click.echo(f"rejected: {exc}")

    click.echo("\ncase terminated; objects:")
    for record in engine.object_records(cs):
        attrs = ", ".join(f"{k}={v!r}" for k, v in sorted(record.attributes.items()))
        click.echo(f"  {record.to_json()['id']} [{record.current_state}]" + (f" {attrs}" if attrs else ""))


def _token_text(token_json: dict) -> str:
    if token_json["type"] == "id":
        return f"{token_json['class']}#{token_json['index']}"
    if token_json["type"] == "idSet":
        return "{" + ", ".join(f"{t['class']}#{t['index']}" for t in token_json["items"]) + "}"
    return json.dumps(token_json)


@main.command()
@click.argument("model_dir")
@click.option("--port", default=8000, show_default=True, help="Port (FCM_PORT overrides).")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(model_dir: str, port: int, host: str) -> None:
    """Serve the HTTP API over a directory of model files."""
    import uvicorn

    from .service import create_app

    port = int(os.environ.get("FCM_PORT", port))
    uvicorn.run(create_app(model_dir), host=host, port=port)


if __name__ == "__main__":
    main()

"""Command-line interface.

Commands: audit (JSON/text report), overlay (DOT), checklist (Markdown),
adopt (rewrite the root as a chosen branch), serve (HTTP API). Output goes
to stdout unless --out is given. Exit codes: 0 success, 1 usage error,
2 parse/validation error, 3 internal failure.
"""
from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Optional

import click

from . import adoption, branchgen, ident, overlay as overlay_mod, parser, sem
from .model import DagParseError, DagValidationError, RootDag


class CliError(Exception):
    def __init__(self, message: str, exit_code: int) -> None:
        super().__init__(message)
        self.exit_code = exit_code


def _load_root(path: str) -> RootDag:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", 2)
    try:
        root = parser.parse_dag(text)
    except DagParseError as exc:
        raise CliError(f"{path}:{exc}", 2)
    diagnostics = parser.validate_root(root)
    errors = [d for d in diagnostics if d.level == "error"]
    for d in diagnostics:
        if d.level == "warning":
            click.echo(f"{path}: {d}", err=True)
    if errors:
        for d in errors:
            click.echo(f"{path}: {d}", err=True)
        raise CliError(f"{path}: root graph failed validation", 2)
    return root


def _write_output(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _use_color() -> bool:
    return sys.stdout.isatty() and not os.environ.get("NO_COLOR")


def _paint(text: str, color: str) -> str:
    if not _use_color():
        return text
    codes = {"red": 31, "green": 32, "yellow": 33, "cyan": 36}
    return f"\x1b[{codes[color]}m{text}\x1b[0m"


def _audit_text(result: branchgen.AuditResult) -> str:
    root = result.root
    e = root.estimand
    lines = []
    edge_bits = ", ".join(f"{x.tail} -> {x.head}" + (" [fixed]" if x.fixed else "") for x in root.edges)
    lines.append(f"root: {edge_bits or '(no edges)'}")
    target = f"{e.effect_type} effect of {e.exposure} on {e.outcome}"
    adj = ", ".join(sorted(e.adjusted_set)) or "nothing"
    iv = f", instrument {e.instrument}" if e.iv_mode else ""
    lines.append(f"estimand: {target}, adjusted for {adj}{iv}")
    lines.append("")
    lines.append(_paint(f"exclusions ({len(result.exclusions)} supersets):", "cyan"))
    for b in result.exclusions:
        kind = "common cause of" if b.pathway_kind == "bidirected-latent" else "direct pathway"
        link = " and ".join(b.pair) if b.pathway_kind == "bidirected-latent" else f"{b.pair[0]} -> {b.pair[1]}"
        members = ", ".join(b.members)
        lines.append(f"  [{b.id}] {kind} {link} | members: {members} | {b.reason.kind}")
    lines.append(_paint(f"misdirections ({len(result.misdirections)}):", "cyan"))
    for m in result.misdirections:
        flips = ", ".join(f"{t} -> {h}" for t, h in m.flips)
        lines.append(f"  [{m.id}] flip {flips} | {m.reason.kind}")
    if result.rejected:
        lines.append(_paint(f"rejected candidates ({len(result.rejected)}):", "yellow"))
        for rc in result.rejected:
            member = f" (known pathway {rc.member})" if rc.member else ""
            if isinstance(rc.delta, branchgen.AddedPathway):
                what = f"{rc.delta.kind} {rc.delta.tail} -> {rc.delta.head}"
            else:
                what = "flip " + ", ".join(f"{t} -> {h}" for t, h in rc.delta.flips)
            lines.append(f"  {what}{member}: {rc.rejection.code}")
    lines.append("")
    lines.append(f"branch total: {result.branch_count()}")
    return "\n".join(lines) + "\n"


def _verify_sem(result: branchgen.AuditResult, seed: int) -> None:
    """Cross-check accepted adjustment-change branches against the simulation
    oracle; diagnostic output only, on stderr."""
    root = result.root
    e = root.estimand
    if e.iv_mode:
        click.echo("sem-verify: skipped (instrument estimands)", err=True)
        return
    g_root = ident.graph_from_root(root)
    branches = list(result.exclusions) + list(result.misdirections)
    for i, b in enumerate(branches):
        if b.reason.kind != "adjustment-set-change":
            click.echo(f"sem-verify: {b.id} skipped ({b.reason.kind})", err=True)
            continue
        delta = b.delta if isinstance(b, branchgen.ExclusionBranch) else branchgen.FlipSet(b.flips)
        realized = branchgen.realize(root, delta)
        before = sem.sem_oracle_check(g_root, e, e.adjusted_set, trials=8, sample_size=20_000, seed=seed + 2 * i)
        after = sem.sem_oracle_check(realized, e, e.adjusted_set, trials=8, sample_size=20_000, seed=seed + 2 * i + 1)
        verdict = "confirmed" if before != after else "NOT confirmed"
        click.echo(f"sem-verify: {b.id} sufficiency flip {before} -> {after}: {verdict}", err=True)


@click.group()
def cli() -> None:
    """Audit the hidden assumptions encoded in a causal DAG."""


@cli.command()
@click.argument("file", type=str)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json")
@click.option("--audit-log", is_flag=True, help="Include rejected candidates in the output.")
@click.option("--verify-sem", is_flag=True, help="Cross-check accepted branches with the simulation oracle (stderr).")
@click.option("--seed", type=int, default=0, help="Seed for --verify-sem.")
@click.option("--out", type=str, default=None)
def audit(file: str, fmt: str, audit_log: bool, verify_sem: bool, seed: int, out: Optional[str]) -> None:
    """Generate every branch scenario for the root graph in FILE."""
    root = _load_root(file)
    result = branchgen.generate(root, audit=audit_log)
    if verify_sem:
        _verify_sem(result, seed)
    if fmt == "json":
        _write_output(overlay_mod.result_to_json(result, include_rejected=audit_log or None), out)
    else:
        _write_output(_audit_text(result), out)


@cli.command()
@click.argument("file", type=str)
@click.option("--collapsed/--expanded", "collapsed", default=True)
@click.option("--format", "fmt", type=click.Choice(["dot"]), default="dot")
@click.option("--colors", is_flag=True, help="Color overlay edges by branch family.")
@click.option("--explicit-latents", is_flag=True, help="Draw latent pathway nodes as points.")
@click.option("--out", type=str, default=None)
def overlay(file: str, collapsed: bool, fmt: str, colors: bool, explicit_latents: bool, out: Optional[str]) -> None:
    """Emit the branch overlay for FILE as Graphviz DOT."""
    root = _load_root(file)
    result = branchgen.generate(root)
    ov = overlay_mod.build_overlay(result, "collapsed" if collapsed else "expanded")
    _write_output(overlay_mod.overlay_to_dot(ov, colors=colors, explicit_latents=explicit_latents), out)


@cli.command()
@click.argument("file", type=str)
@click.option("--format", "fmt", type=click.Choice(["markdown", "text"]), default="markdown")
@click.option("--out", type=str, default=None)
def checklist(file: str, fmt: str, out: Optional[str]) -> None:
    """Render the assumption checklist for FILE."""
    root = _load_root(file)
    result = branchgen.generate(root)
    items = overlay_mod.checklist(result)
    if fmt == "markdown":
        _write_output(overlay_mod.checklist_markdown(items), out)
    else:
        lines = [f"{i}. [{item.status}] {item.statement} ({item.id})" for i, item in enumerate(items, 1)]
        _write_output("\n".join(lines) + "\n", out)


@cli.command()
@click.argument("file", type=str)
@click.option("--branch", "branch_id", required=True, help="Branch id from a prior audit.")
@click.option("--name", type=str, default=None, help="Name for a promoted common-cause node.")
@click.option("--leave-unadjusted", is_flag=True, help="Record the pathway as known-omitted instead of adjusting for it.")
@click.option("--out", type=str, default=None)
def adopt(file: str, branch_id: str, name: Optional[str], leave_unadjusted: bool, out: Optional[str]) -> None:
    """Rewrite FILE's root as the branch identified by --branch."""
    root = _load_root(file)
    result = branchgen.generate(root)
    try:
        new_root = adoption.adopt(root, result, branch_id, name=name, leave_unadjusted=leave_unadjusted)
    except adoption.UnknownBranchError:
        raise CliError(f"unknown branch id {branch_id!r}; run audit to list branches", 2)
    except ValueError as exc:
        raise CliError(str(exc), 1)
    _write_output(parser.emit_dag(new_root), out)


@cli.command()
@click.option("--port", type=int, default=8000)
@click.option("--host", type=str, default="127.0.0.1")
def serve(port: int, host: str) -> None:
    """Run the session HTTP API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


def main(argv: Optional[list[str]] = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except CliError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except (DagParseError, DagValidationError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except Exception as exc:  # pragma: no cover - internal failure guard
        click.echo(f"internal error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())

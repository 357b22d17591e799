"""Command-line entry point: ``skillscope corpus|scan|check|eval|gen-corpus``.

Findings are data, so ``check`` exits 0 whatever it finds unless
``--fail-on-inconsistency`` is given (exit 3).  Usage and configuration
problems exit 2.  Every output file is written to a temporary name first
and renamed into place.
"""

from __future__ import annotations

import json
import os
import tempfile
from collections import Counter
from pathlib import Path
from typing import Any, Callable

import click

from . import __version__
from .checker.model import DEFAULT_IN_FLIGHT, GatewayConfig, HttpChatGateway, RateLimiter
from .checker.report import Verdict
from .checker.semantics import load_lexicon
from .corpus import dedup, fetch_targets, funnel, load_manifest
from .errors import GatewayConfigError, LabelMismatch, SchemaError, SkillscopeError, TaxonomyInvalid, UnsupportedPattern
from .evaluation import (
    PATTERNS,
    compute_metrics,
    generate_synthetic_corpus,
    load_counts,
    load_ground_truth,
    load_predictions,
)
from .evaluation.metrics import Evaluation
from .pipeline import check_skill, find_skills, load_skills, parallel_map, scan_skill
from .skill import DESCRIPTION_FILE
from .spg import dumps_spg
from .taxonomy import Taxonomy, load_taxonomy

EXIT_CONFIG = 2
EXIT_POLICY = 3
DEFAULT_SPEC = {**{p: 3 for p in PATTERNS if p != "Consistent"}, "Consistent": 6}


class ConfigError(click.ClickException):
    exit_code = EXIT_CONFIG


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _taxonomy(rules: str | None) -> Taxonomy:
    try:
        return load_taxonomy(rules)
    except (TaxonomyInvalid, OSError, ValueError) as exc:
        raise ConfigError(f"cannot load rules: {exc}") from exc


def _skill_dirs(root: str):
    """(skill directories, non-skill entries, base for ids)."""
    path = Path(root)
    try:
        if (path / DESCRIPTION_FILE).is_file():
            return [path], [], path.parent
        found = find_skills(path)
    except (OSError, SkillscopeError) as exc:
        raise ConfigError(f"cannot read skills root {root}: {exc}") from exc
    return list(found.skills), list(found.skipped), path


def _default_jobs() -> int:
    return os.cpu_count() or 1


out_option = click.option(
    "--out", "out", type=click.Path(file_okay=False), default="skillscope-out", show_default=True,
    help="Directory for output files.",
)
rules_option = click.option("--rules", type=click.Path(dir_okay=False), help="Taxonomy and rule file (JSON).")
jobs_option = click.option("--jobs", type=click.IntRange(min=1), default=None, help="Parallel workers [default: cores].")


@click.group()
@click.version_option(__version__, prog_name="skillscope")
def cli() -> None:
    """Check that programmatic skills do what their SKILL.md says."""


@cli.command("corpus")
@click.argument("manifest", type=click.Path(dir_okay=False))
@out_option
@click.option("--materialized", type=click.Path(file_okay=False), help="Directory of fetched targets, for funnel counts.")
@click.option("--fetch-cmd", help="Command template used to fetch each target into --materialized.")
def corpus_cmd(manifest: str, out: str, materialized: str | None, fetch_cmd: str | None) -> None:
    """Group manifest links by download target."""
    try:
        records = load_manifest(manifest)
    except (OSError, SkillscopeError) as exc:
        raise ConfigError(str(exc)) from exc
    report = dedup(records)
    out_dir = Path(out)
    write_atomic(out_dir / "dedup_report.json", _json(report.to_json()))
    click.echo(f"groups={len(report.groups)} rejects={len(report.rejects)} raw={report.raw_count}")
    if fetch_cmd:
        if not materialized:
            raise ConfigError("--fetch-cmd needs --materialized")
        for key, code in fetch_targets(report, fetch_cmd, materialized):
            if code:
                click.echo(f"fetch failed ({code}): {key}", err=True)
    if materialized:
        counts = funnel(report, materialized)
        write_atomic(out_dir / "funnel.json", _json(counts.to_json()))
        click.echo(f"funnel raw={counts.raw} deduplicated={counts.deduplicated} programmatic={counts.programmatic}")


@cli.command("scan")
@click.argument("root", type=click.Path())
@out_option
@rules_option
@jobs_option
def scan_cmd(root: str, out: str, rules: str | None, jobs: int | None) -> None:
    """Build one code graph document per skill under ROOT."""
    taxonomy = _taxonomy(rules)
    dirs, not_skills, base = _skill_dirs(root)
    skills, broken = load_skills(dirs, base)
    results = parallel_map(lambda s: scan_skill(s, taxonomy), skills, jobs or _default_jobs())
    out_dir = Path(out)
    summary = {"skills": [], "skipped_directories": [{"directory": d, "reason": r} for d, r in not_skills + broken]}
    for result in results:
        if result.spg is not None:
            write_atomic(out_dir / "graphs" / f"{result.skill_id}.json", dumps_spg(result.spg))
            stats = result.spg.stats
            entry = {"skill_id": result.skill_id, "nodes": stats.nodes, "edges": stats.edges,
                     "skipped": len(result.spg.skipped_files), "status": "ok"}
        else:
            entry = {"skill_id": result.skill_id, "status": "AllFilesSkipped", "reason": result.error}
        summary["skills"].append(entry)
        click.echo(result.summary_line())
    for directory, reason in not_skills + broken:
        click.echo(f"{directory}: skipped ({reason})")
    write_atomic(out_dir / "scan_summary.json", _json(summary))


@cli.command("check")
@click.argument("root", type=click.Path())
@out_option
@rules_option
@jobs_option
@click.option("--backend", type=click.Choice(["rule", "model"]), default="rule", show_default=True)
@click.option("--lexicon", type=click.Path(dir_okay=False), help="Phrase lexicon overrides (JSON).")
@click.option("--in-flight", type=click.IntRange(min=1), default=DEFAULT_IN_FLIGHT, show_default=True,
              help="Concurrent model requests.")
@click.option("--fail-on-inconsistency", is_flag=True, help="Exit 3 when any skill is Inconsistent.")
def check_cmd(
    root: str,
    out: str,
    rules: str | None,
    jobs: int | None,
    backend: str,
    lexicon: str | None,
    in_flight: int,
    fail_on_inconsistency: bool,
) -> None:
    """Check every skill under ROOT and summarize the verdicts."""
    taxonomy = _taxonomy(rules)
    try:
        lex = load_lexicon(lexicon) if lexicon else None
    except (OSError, ValueError, SchemaError) as exc:
        raise ConfigError(f"cannot load lexicon: {exc}") from exc
    gateway = None
    if backend == "model":
        try:
            gateway = HttpChatGateway(GatewayConfig.from_env(), limiter=RateLimiter(in_flight))
        except GatewayConfigError as exc:
            raise ConfigError(str(exc)) from exc
    dirs, not_skills, base = _skill_dirs(root)
    skills, broken = load_skills(dirs, base)
    work: Callable = lambda s: check_skill(s, taxonomy, lexicon=lex, gateway=gateway)  # noqa: E731
    try:
        results = parallel_map(work, skills, jobs or _default_jobs())
    except GatewayConfigError as exc:
        raise ConfigError(str(exc)) from exc
    out_dir = Path(out)
    counts = Counter({v.value: 0 for v in Verdict})
    predictions = []
    for _, report in results:
        verdict = report.verdict
        counts[verdict.value] += 1
        predictions.append(json.dumps({"skill_id": report.skill_id, "verdict": verdict.value}, sort_keys=True))
        write_atomic(out_dir / "reports" / f"{report.skill_id}.json", report.dumps())
        click.echo(f"{report.skill_id}: {verdict.value} ({report.cause_summary})")
    for directory, reason in not_skills + broken:
        click.echo(f"{directory}: skipped ({reason})")
    order = [v.value for v in (Verdict.INCONSISTENT, Verdict.COARSER, Verdict.CONSISTENT, Verdict.UNCERTAIN)]
    write_atomic(out_dir / "predictions.jsonl", "".join(p + "\n" for p in predictions))
    write_atomic(out_dir / "check_summary.json", _json({"counts": {k: counts[k] for k in order},
                                                         "skipped_directories": [d for d, _ in not_skills + broken]}))
    click.echo("summary " + " ".join(f"{k}={counts[k]}" for k in order))
    if fail_on_inconsistency and counts[Verdict.INCONSISTENT.value]:
        raise SystemExit(EXIT_POLICY)


@cli.command("eval")
@click.argument("predictions", type=click.Path(dir_okay=False))
@click.argument("ground_truth", type=click.Path(dir_okay=False), required=False)
@out_option
def eval_cmd(predictions: str, ground_truth: str | None, out: str) -> None:
    """Score PREDICTIONS against GROUND_TRUTH.

    PREDICTIONS is either the predictions.jsonl written by ``check`` or a
    JSON object with tp, fp and fn counts (no ground truth needed then).
    """
    try:
        counts = load_counts(predictions)
        if counts is not None:
            evaluation = Evaluation(counts, None)
        else:
            if ground_truth is None:
                raise ConfigError("GROUND_TRUTH is required for per-skill predictions")
            evaluation = compute_metrics(load_predictions(predictions), load_ground_truth(ground_truth))
    except (LabelMismatch, SchemaError, OSError) as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
    write_atomic(Path(out) / "metrics.json", evaluation.dumps())
    doc = evaluation.metrics.to_json()
    click.echo(f"tp={doc['tp']} fp={doc['fp']} fn={doc['fn']}")
    click.echo(" ".join(f"{k}={v}%" for k, v in doc["percent"].items()))
    if evaluation.confusion is not None:
        for row in evaluation.confusion.to_json():
            click.echo("confusion " + " ".join(str(x) for x in row))


def _parse_spec(spec: str | None) -> dict[str, int]:
    if spec is None:
        return dict(DEFAULT_SPEC)
    text = Path(spec).read_text(encoding="utf-8") if os.path.isfile(spec) else spec
    try:
        doc = json.loads(text)
    except ValueError:
        doc = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            name, sep, value = part.partition("=")
            if not sep or not value.strip().isdigit():
                raise ConfigError(f"bad spec entry {part!r}; use PATTERN=COUNT")
            doc[name.strip()] = int(value)
    if not isinstance(doc, dict):
        raise ConfigError("spec must map patterns to counts")
    return doc


@cli.command("gen-corpus")
@out_option
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--spec", help="PATTERN=COUNT list or JSON object/file [default: 3 per pattern, 6 Consistent].")
def gen_corpus_cmd(out: str, seed: int, spec: str | None) -> None:
    """Write a synthetic labeled corpus and its ground truth."""
    try:
        generated = generate_synthetic_corpus(seed, _parse_spec(spec), out)
    except UnsupportedPattern as exc:
        raise ConfigError(str(exc)) from exc
    click.echo(f"wrote {len(generated)} skills and ground_truth.jsonl to {out}")


def main() -> None:
    cli(prog_name="skillscope")


if __name__ == "__main__":
    main()

"""Command-line surface: audit, score, simulate, serve.

Exit codes: 0 success, 2 usage/input error, 3 internal error. Judge transport
trouble during audits and scoring degrades to neutral verdicts with a stderr
warning instead of failing the run.
"""

from __future__ import annotations

import functools
import json
import sys
import time
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .config import resolve_cache, resolve_judge_config
from .errors import DeconflictError, SizeLimitError, StrategyError, ValidationError
from .graphs import build_graph
from .judge.gateway import JudgeGateway, build_http_judge
from .judge.prompts import PROMPT_IDS
from .judge.transport import PreferFirstSlotJudge
from .metrics import (
    AccuracySample,
    compute_accuracy,
    compute_cdr,
    render_accuracy_table,
    render_cdr_table,
)
from .pipeline import RewardRequest, compute_rewards_end_to_end
from .records import (
    SampleRecord,
    dumps_canonical,
    matrix_from_record,
    matrix_to_record,
    read_jsonl,
    reward_response_dict,
)
from .resolve import resolve
from .rewards import STRATEGIES, compute_strategy
from .synth import synth_dataset


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValidationError, StrategyError, SizeLimitError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except click.ClickException:
            raise
        except DeconflictError as exc:
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(3)
        except Exception as exc:  # pragma: no cover - last resort
            click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(3)

    return wrapper


def judge_options(fn):
    options = [
        click.option("--judge-kind", type=click.Choice(["http", "stub"]), default="http",
                     show_default=True, help="stub is an offline judge preferring slot A"),
        click.option("--judge-api-base", default=None, help="OpenAI-compatible base URL"),
        click.option("--judge-api-key", default=None),
        click.option("--judge-model", default=None),
        click.option("--judge-prompt", type=click.Choice(PROMPT_IDS), default=None,
                     help="pairwise template (or pointwise/listwise)"),
        click.option("--temperature", type=float, default=None),
        click.option("--max-in-flight", type=int, default=None),
        click.option("--retry-limit", type=int, default=None),
        click.option("--retry-backoff-ms", type=int, default=None),
        click.option("--timeout-ms", type=int, default=None),
        click.option("--swap-check/--no-swap-check", default=None,
                     help="judge each pair in both orders; disagreement means tie"),
        click.option("--cache-dir", default=None, help="judgment cache directory"),
        click.option("--config", "config_path", default=None,
                     help="JSON config file (lowest precedence after defaults)"),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _build_gateway(kwargs) -> JudgeGateway:
    config_path = kwargs.get("config_path")
    flags = {
        "api_base": kwargs.get("judge_api_base"),
        "api_key": kwargs.get("judge_api_key"),
        "model": kwargs.get("judge_model"),
        "prompt_id": kwargs.get("judge_prompt"),
        "temperature": kwargs.get("temperature"),
        "max_in_flight": kwargs.get("max_in_flight"),
        "retry_limit": kwargs.get("retry_limit"),
        "retry_backoff_ms": kwargs.get("retry_backoff_ms"),
        "timeout_ms": kwargs.get("timeout_ms"),
        "swap_check": kwargs.get("swap_check"),
    }
    config = resolve_judge_config(flags, config_path)
    cache = resolve_cache(kwargs.get("cache_dir"), config_path)
    if kwargs.get("judge_kind") == "stub":
        judge = PreferFirstSlotJudge()
    else:
        if not config.api_base:
            raise ValidationError(
                "no judge configured: set JUDGE_API_BASE / --judge-api-base "
                "or pass --judge-kind stub"
            )
        judge = build_http_judge(config)
    return JudgeGateway(judge, config, cache)


@click.group()
@click.version_option(__version__)
def main():
    """Purify pairwise preference judgments into consistent reward signals."""


@main.command()
@click.option("--input", "input_path", required=True, help="JSONL of samples or matrices")
@click.option("--report", "report_path", required=True, help="where to write the JSON report")
@judge_options
@guarded
def audit(input_path, report_path, **kwargs):
    """Audit a dataset for preference conflicts (and accuracy when labeled)."""
    rows = list(read_jsonl(input_path))
    if not rows:
        raise ValidationError(f"{input_path}: no records found")

    gateway: Optional[JudgeGateway] = None
    matrices: list[tuple[str, "object"]] = []
    accuracy_samples: list[AccuracySample] = []
    fallback_total = 0

    for row in rows:
        if "entries" in row:
            record_id, matrix = matrix_from_record(row)
        elif "responses" in row:
            sample = SampleRecord.from_json_dict(row)
            if gateway is None:
                gateway = _build_gateway(kwargs)
            collected = gateway.collect_matrix(sample.query, list(sample.responses))
            record_id, matrix = sample.id, collected.matrix
            fallback_total += collected.report.fallback_verdicts
        else:
            raise ValidationError(
                f"record {row.get('id', '?')}: need either 'entries' or 'responses'"
            )
        matrices.append((record_id, matrix))
        chosen = row.get("chosen_idx")
        rejected = row.get("rejected_idx")
        if chosen is not None and rejected:
            accuracy_samples.append(
                AccuracySample.from_matrix(record_id, matrix, chosen, rejected)
            )

    cdr_report = compute_cdr(matrices)
    accuracy_report = compute_accuracy(accuracy_samples) if accuracy_samples else None

    config = gateway.config if gateway is not None else resolve_judge_config(
        {}, kwargs.get("config_path")
    )
    document = {
        "cdr": cdr_report.to_json_dict(),
        "accuracy": accuracy_report.to_json_dict() if accuracy_report else None,
        "meta": {
            "judge_model": config.model or None,
            "prompt_id": config.prompt_id,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "fallback_verdicts": fallback_total,
        },
    }
    Path(report_path).write_text(
        json.dumps(document, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )

    click.echo(render_cdr_table(cdr_report))
    if accuracy_report:
        click.echo("")
        click.echo(render_accuracy_table(accuracy_report))
    if fallback_total:
        click.echo(f"warning: {fallback_total} fallback verdicts recorded", err=True)


@main.command()
@click.option("--input", "input_path", required=True,
              help="JSONL of matrices, samples, positions, or raw scores ('-' for stdin)")
@click.option("--strategy", required=True, type=click.Choice(STRATEGIES))
@click.option("--seed", type=int, default=None, help="seed for the seeded ablation variants")
@click.option("--output", "output_path", default=None, help="output JSONL (default stdout)")
@judge_options
@guarded
def score(input_path, strategy, seed, output_path, **kwargs):
    """Score records with one reward strategy, emitting response documents."""
    if input_path == "-":
        rows = [json.loads(line) for line in sys.stdin if line.strip()]
    else:
        rows = list(read_jsonl(input_path))
    if not rows:
        raise ValidationError("no records to score")

    gateway: Optional[JudgeGateway] = None
    documents = []
    for row in rows:
        record_id = str(row.get("id", len(documents)))
        if "entries" in row:
            record_id, matrix = matrix_from_record(row)
            rewards, advantages = compute_strategy(matrix, strategy, seed)
            documents.append(reward_response_dict(record_id, rewards, advantages))
        elif "positions" in row:
            rewards, advantages = compute_strategy(list(row["positions"]), strategy, seed)
            documents.append(reward_response_dict(record_id, rewards, advantages))
        elif "raw_scores" in row:
            rewards, advantages = compute_strategy(list(row["raw_scores"]), strategy, seed)
            documents.append(reward_response_dict(record_id, rewards, advantages))
        elif "responses" in row:
            sample = SampleRecord.from_json_dict(row)
            if gateway is None:
                gateway = _build_gateway(kwargs)
            request = RewardRequest(
                id=sample.id,
                query=sample.query,
                responses=sample.responses,
                strategy=strategy,
                seed=seed,
            )
            documents.append(compute_rewards_end_to_end(request, gateway))
        else:
            raise ValidationError(
                f"record {record_id}: need 'entries', 'positions', 'raw_scores', "
                "or 'responses'"
            )

    lines = "".join(dumps_canonical(doc) + "\n" for doc in documents)
    if output_path:
        Path(output_path).write_text(lines, encoding="utf-8")
    else:
        click.echo(lines, nl=False)


@main.command()
@click.option("--n", "n_samples", type=int, required=True, help="number of samples")
@click.option("--g", "group_size", type=int, required=True, help="responses per sample")
@click.option("--noise", type=float, default=0.0, show_default=True)
@click.option("--tie-band", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, help="output matrix JSONL")
@guarded
def simulate(n_samples, group_size, noise, tie_band, seed, out_path):
    """Generate a synthetic judged dataset and summarize its conflicts."""
    if n_samples < 1 or group_size < 1:
        raise ValidationError("--n and --g must be >= 1")
    samples = list(synth_dataset(n_samples, group_size, noise, tie_band, seed))
    with open(out_path, "w", encoding="utf-8") as fh:
        for record_id, matrix in samples:
            fh.write(dumps_canonical(matrix_to_record(record_id, matrix)) + "\n")
    fas_sizes = [
        len(resolve(build_graph(matrix)).removed_edges) for _, matrix in samples
    ]
    summary = {
        "samples": n_samples,
        "g": group_size,
        "noise": noise,
        "tie_band": tie_band,
        "seed": seed,
        "cdr_percent": compute_cdr(samples).cdr_percent if group_size >= 2 else 0.0,
        "mean_fas_size": sum(fas_sizes) / len(fas_sizes),
    }
    click.echo(dumps_canonical(summary))


@main.command()
@click.option("--bind", default="127.0.0.1:8000", show_default=True, help="host:port")
@judge_options
@guarded
def serve(bind, **kwargs):
    """Run the HTTP reward service."""
    import uvicorn

    from .service import create_app

    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValidationError(f"--bind must look like host:port, got {bind!r}")
    gateway = _build_gateway(kwargs)
    app = create_app(gateway)
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")


if __name__ == "__main__":
    main()

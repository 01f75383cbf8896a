"""Command-line interface.

Exit codes: 0 success, 1 configuration error, 2 evaluation error.
"""

from __future__ import annotations

import json
import logging
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

import click

from .core import Annotation
from .errors import ConfigError, DiarBenchError, EvaluationError
from .harness import (
    AdapterConfig,
    compare_runs,
    emit_report,
    evaluate_run,
    load_report,
    read_run,
    run_meta,
    run_system,
    write_run,
)
from .ingest import Split, load_manifest, read_rttm, read_uem
from .metrics import aggregate_global, der_components
from .oracle import Granularity, oracle_segments, stagewise_report
from .pipeline import PipelineConfig, SlidingWindowSpec, ablate, run_pipeline
from .stats import dataset_stats

SPLITS = click.Choice([s.value for s in Split])


def _dump(obj) -> None:
    click.echo(json.dumps(obj, sort_keys=True, indent=2))


def _components_row(comps) -> dict:
    return {**comps.as_dict(), "der": float(comps.der()) if comps.denominator else None}


def _seconds_list(text: str) -> list[int]:
    try:
        values = [Decimal(part) * 1000 for part in text.split(",") if part.strip()]
    except InvalidOperation:
        raise ConfigError(f"bad list of seconds: {text!r}") from None
    if not values or any(v <= 0 or v != v.to_integral_value() for v in values):
        raise ConfigError(f"bad list of seconds: {text!r}")
    return [int(v) for v in values]


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def cli(verbose):
    """Speaker diarization evaluation and benchmarking."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@cli.command()
@click.option("--reference", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--hypothesis", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--uem", type=click.Path(exists=True, dir_okay=False))
@click.option("--collar", default=0, show_default=True, type=click.IntRange(min=0), help="Collar width in ms.")
def evaluate(reference, hypothesis, uem, collar):
    """DER components per recording and globally aggregated."""
    refs = read_rttm(reference)
    hyps = read_rttm(hypothesis)
    uems = read_uem(uem) if uem else {}
    files = {}
    for recording_id in sorted(refs):
        hyp = hyps.get(recording_id, Annotation(recording_id))
        files[recording_id] = der_components(refs[recording_id], hyp, uems.get(recording_id), collar)
    extra = sorted(set(hyps) - set(refs))
    _dump({
        "files": {rid: _components_row(c) for rid, c in files.items()},
        "global": _components_row(aggregate_global(files.values())),
        "unscored_hypotheses": extra,
    })


@cli.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--split", default="test", show_default=True, type=SPLITS)
@click.option("--window", default="10", show_default=True, help="Congestion window length in seconds.")
@click.option("--stride", default="1", show_default=True, help="Congestion window stride in seconds.")
@click.option("--max-local", default=3, show_default=True, type=int)
def stats(manifest, split, window, stride, max_local):
    """Dataset statistics: total audio, overlap ratio, congestion, median speaker count."""
    m = load_manifest(manifest)
    spec = SlidingWindowSpec(_seconds_list(window)[0], _seconds_list(stride)[0])
    result = dataset_stats(m, m.load_references(split), split, spec, max_local)
    _dump({"split": split, **result.as_dict()})


def _entries(manifest, split):
    entries = manifest.split(split)
    if not entries:
        raise ConfigError(f"manifest has no {split!r} recordings")
    return entries


def _pipeline_args(window: str, stride: str, seed: int):
    return SlidingWindowSpec(_seconds_list(window)[0], _seconds_list(stride)[0]), seed


@cli.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", required=True, type=click.Choice(["segmenter", "clusterer"]))
@click.option("--granularity", default="per_track", show_default=True, type=click.Choice([g.value for g in Granularity]))
@click.option("--split", default="validation", show_default=True, type=SPLITS)
@click.option("--strategy", default="per_window", show_default=True, type=click.Choice(["per_window", "per_chunk"]))
@click.option("--window", default="10", show_default=True)
@click.option("--stride", default="1", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
def oracle(manifest, mode, granularity, split, strategy, window, stride, seed):
    """Stage-wise evaluation: simulated base system vs an oracle variant."""
    m = load_manifest(manifest)
    refs = m.load_references(split)
    spec, seed = _pipeline_args(window, stride, seed)
    config = PipelineConfig()
    base, variant = {}, {}
    for entry in _entries(m, split):
        ref = refs[entry.recording_id]
        result = run_pipeline(ref, spec, strategy, seed, config, total=entry.audio_duration)
        base[entry.recording_id] = result.hypothesis
        if mode == "segmenter":
            variant[entry.recording_id] = run_pipeline(
                ref, spec, strategy, seed, config, total=entry.audio_duration, segmentation=oracle_segments(ref)
            ).hypothesis
        else:
            variant[entry.recording_id] = run_pipeline(
                ref, spec, strategy, seed, config, total=entry.audio_duration, oracle_clusterer=granularity
            ).hypothesis
    rows = stagewise_report(
        refs, {"base": base, f"oracle_{mode}": variant}, {e.recording_id: e.dataset for e in m}, m.load_uems(split)
    )
    _dump([row.as_dict() for row in rows])


@cli.command("ablate")
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--strides", default="1,2,4", show_default=True, help="Comma-separated strides in seconds.")
@click.option("--strategies", default="per_window,per_chunk", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--split", default="validation", show_default=True, type=SPLITS)
@click.option("--window", default="10", show_default=True)
def ablate_cmd(manifest, strides, strategies, seed, split, window):
    """Sliding-window stride and embedding-strategy ablation on the simulator."""
    m = load_manifest(manifest)
    refs = m.load_references(split)
    scenarios = [(refs[e.recording_id], e.audio_duration) for e in _entries(m, split)]
    names = [s.strip() for s in strategies.split(",") if s.strip()]
    for name in names:
        if name not in ("per_window", "per_chunk"):
            raise ConfigError(f"unknown strategy {name!r}")
    rows = ablate(scenarios, _seconds_list(strides), names, seed, PipelineConfig(), _seconds_list(window)[0])
    _dump([row.as_dict() for row in rows])


@cli.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--adapter", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--split", default="test", show_default=True, type=SPLITS)
def bench(manifest, adapter, out, split):
    """Run a system over a manifest split and persist the run records."""
    m = load_manifest(manifest)
    config = AdapterConfig.load(adapter)
    records = run_system(config, m, split)
    write_run(out, run_meta(config, m, records, Path(manifest).resolve(), split), records)
    failed = sum(1 for r in records if not r.ok)
    click.echo(f"{len(records)} records written to {out} ({failed} failed)", err=True)


def _report_for(run_path, manifest_path=None, collar=0):
    meta, records = read_run(run_path)
    path = manifest_path or meta.manifest_path
    if not path:
        raise ConfigError(f"{run_path}: no manifest recorded; pass --manifest")
    m = load_manifest(path)
    if meta.manifest_hash and m.digest != meta.manifest_hash:
        raise ConfigError(f"manifest {path} changed since the run was recorded")
    return evaluate_run(records, m.load_references(), m, collar, m.load_uems(), meta)


def _load_any(path, manifest_path=None, collar=0):
    """A run file (JSON lines with a run header) or an emitted JSON report."""
    text = Path(path).read_text()
    first = text.lstrip().split("\n", 1)[0]
    try:
        head = json.loads(first)
    except json.JSONDecodeError:
        head = None
    if isinstance(head, dict) and head.get("type") in ("run", "record"):
        return _report_for(path, manifest_path, collar)
    return load_report(text)


@cli.command()
@click.option("--run", "run_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", default="json", show_default=True, type=click.Choice(["json", "csv", "plotdata"]))
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False), help="Override the recorded manifest.")
@click.option("--collar", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--out", type=click.Path(dir_okay=False), help="Write to a file instead of stdout.")
def report(run_path, fmt, manifest, collar, out):
    """Score a persisted run and emit a report."""
    data = emit_report(_report_for(run_path, manifest, collar), fmt)
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


@cli.command()
@click.option("--a", "path_a", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--b", "path_b", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", default=0.0, show_default=True, type=float, help="DER increase flagged as regression.")
def compare(path_a, path_b, threshold):
    """Per-category DER and speed-factor deltas between two runs or reports."""
    rows = compare_runs(_load_any(path_a), _load_any(path_b), threshold)
    _dump([row.as_dict() for row in rows])


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="diarbench", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except EvaluationError as exc:
        click.echo(f"evaluation error: {exc}", err=True)
        return 2
    except (ConfigError, OSError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        return 1
    except DiarBenchError as exc:
        click.echo(f"evaluation error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

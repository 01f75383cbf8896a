"""System adapters: subprocess (on-device tools), HTTP polling (server APIs), builtin pipeline."""

from __future__ import annotations

import hashlib
import json
import logging
import shlex
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from enum import Enum
from pathlib import Path

import requests

from ..core import Annotation, Segment, Tick
from ..errors import ConfigError, DiarBenchError
from ..ingest import Manifest, ManifestEntry, Split, parse_rttm
from ..pipeline import PipelineConfig, SlidingWindowSpec, run_pipeline
from .records import RunMeta, RunRecord, RunStatus

log = logging.getLogger(__name__)


class AdapterKind(str, Enum):
    SUBPROCESS = "subprocess"
    HTTP_POLL = "http_poll"
    BUILTIN_PIPELINE = "builtin_pipeline"


@dataclass(frozen=True)
class AdapterConfig:
    kind: AdapterKind
    system_tag: str
    command: str = ""
    endpoint: str = ""
    timeout: Tick = 600_000
    max_parallel: int = 1
    poll_interval: Tick = 1_000
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", AdapterKind(self.kind))
        if self.timeout <= 0:
            raise ConfigError("adapter timeout must be positive")
        if self.max_parallel < 1:
            raise ConfigError("max_parallel must be at least 1")
        if self.poll_interval <= 0:
            raise ConfigError("poll_interval must be positive")
        if self.kind is AdapterKind.SUBPROCESS and not self.command:
            raise ConfigError("subprocess adapter needs a command template")
        if self.kind is AdapterKind.HTTP_POLL and not self.endpoint:
            raise ConfigError("http_poll adapter needs an endpoint")

    def to_json(self) -> dict:
        data = asdict(self)
        data["kind"] = self.kind.value
        return data

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @classmethod
    def from_json(cls, data: dict) -> "AdapterConfig":
        known = {"kind", "system_tag", "command", "endpoint", "timeout", "max_parallel", "poll_interval", "options"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown adapter fields: {sorted(unknown)}")
        if "kind" not in data or "system_tag" not in data:
            raise ConfigError("adapter config needs 'kind' and 'system_tag'")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad adapter config: {exc}") from None

    @classmethod
    def load(cls, path: str | Path) -> "AdapterConfig":
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def _ms_since(t0: int) -> Tick:
    return (time.perf_counter_ns() - t0 + 500_000) // 1_000_000


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _pick_annotation(doc: dict[str, Annotation], recording_id: str) -> Annotation:
    if recording_id in doc:
        return doc[recording_id]
    if len(doc) == 1:
        return next(iter(doc.values())).with_id(recording_id)
    if not doc:
        return Annotation(recording_id)
    raise DiarBenchError(f"output holds several recordings but not {recording_id!r}")


def _seconds(value) -> Tick:
    millis = Decimal(str(value)) * 1000
    if millis != millis.to_integral_value():
        raise DiarBenchError(f"sub-millisecond time {value!r} in result")
    return int(millis)


def parse_result(payload, recording_id: str) -> Annotation:
    """Result payload as RTTM text or a JSON list of ``{start, end, speaker}`` in seconds."""
    if isinstance(payload, str):
        return _pick_annotation(parse_rttm(payload), recording_id)
    if isinstance(payload, list):
        try:
            tracks = [(Segment(_seconds(s["start"]), _seconds(s["end"])), str(s["speaker"])) for s in payload]
        except (KeyError, TypeError, ValueError, InvalidOperation) as exc:
            raise DiarBenchError(f"bad segment list: {exc}") from None
        return Annotation(recording_id, tracks)
    raise DiarBenchError(f"unsupported result payload type {type(payload).__name__}")


def _require_audio(entry: ManifestEntry) -> str:
    if not entry.audio_uri:
        raise ConfigError(f"{entry.recording_id}: audio_uri required for this adapter")
    return entry.audio_uri


def _run_subprocess(adapter: AdapterConfig, entry: ManifestEntry, started: str) -> RunRecord:
    audio = _require_audio(entry)
    base = dict(recording_id=entry.recording_id, system_tag=adapter.system_tag,
                audio_duration=entry.audio_duration, started_at=started)
    with tempfile.TemporaryDirectory() as tmp:
        output = Path(tmp) / f"{entry.recording_id}.rttm"
        argv = [
            token.format(audio=audio, output=str(output), recording_id=entry.recording_id)
            for token in shlex.split(adapter.command)
        ]
        t0 = time.perf_counter_ns()
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=adapter.timeout / 1000)
        except subprocess.TimeoutExpired:
            return RunRecord(**base, processing=_ms_since(t0), status=RunStatus.TIMEOUT, message="timed out")
        except OSError as exc:
            return RunRecord(**base, status=RunStatus.ERROR, message=str(exc))
        processing = _ms_since(t0)
        if proc.returncode != 0:
            tail = proc.stderr.strip().splitlines()[-1:] or [""]
            return RunRecord(**base, processing=processing, status=RunStatus.ERROR,
                             message=f"exit code {proc.returncode}: {tail[0]}")
        try:
            text = output.read_text() if output.exists() else proc.stdout
            hypothesis = _pick_annotation(parse_rttm(text), entry.recording_id)
        except DiarBenchError as exc:
            return RunRecord(**base, processing=processing, status=RunStatus.ERROR, message=str(exc))
    return RunRecord(**base, processing=processing, hypothesis=hypothesis)


def _run_http(adapter: AdapterConfig, entry: ManifestEntry, started: str) -> RunRecord:
    """POST audio -> 202 + job id; poll GET job at a fixed interval; read the result."""
    audio = _require_audio(entry)
    base = dict(recording_id=entry.recording_id, system_tag=adapter.system_tag,
                audio_duration=entry.audio_duration, started_at=started)
    endpoint = adapter.endpoint.rstrip("/")
    deadline = time.perf_counter_ns() + adapter.timeout * 1_000_000
    upload = processing = download = 0

    def remaining() -> float:
        left = (deadline - time.perf_counter_ns()) / 1e9
        if left <= 0:
            raise requests.Timeout("adapter deadline exceeded")
        return left

    session = requests.Session()
    try:
        body = Path(audio).read_bytes()
        t0 = time.perf_counter_ns()
        resp = session.post(
            f"{endpoint}/jobs",
            data=body,
            headers={"Content-Type": "application/octet-stream", "X-Filename": Path(audio).name},
            timeout=remaining(),
        )
        upload = _ms_since(t0)
        if resp.status_code != 202:
            return RunRecord(**base, upload=upload, status=RunStatus.ERROR,
                             message=f"upload rejected with HTTP {resp.status_code}")
        job_id = resp.json()["job_id"]

        t1 = time.perf_counter_ns()
        while True:
            t_poll = time.perf_counter_ns()
            resp = session.get(f"{endpoint}/jobs/{job_id}", timeout=remaining())
            resp.raise_for_status()
            status = resp.json()
            state = status.get("status")
            if state == "done":
                break
            if state == "failed":
                return RunRecord(**base, upload=upload, processing=_ms_since(t1), status=RunStatus.ERROR,
                                 message=str(status.get("error", "job failed")))
            if state != "pending":
                return RunRecord(**base, upload=upload, processing=_ms_since(t1), status=RunStatus.ERROR,
                                 message=f"unknown job status {state!r}")
            time.sleep(min(adapter.poll_interval / 1000, remaining()))

        if "result" in status:
            # the terminal poll carried the payload: that request is the download
            processing = (t_poll - t1 + 500_000) // 1_000_000
            download = _ms_since(t_poll)
            payload = status["result"]
        else:
            processing = _ms_since(t1)
            t2 = time.perf_counter_ns()
            resp = session.get(f"{endpoint}/jobs/{job_id}/result", timeout=remaining())
            resp.raise_for_status()
            download = _ms_since(t2)
            payload = resp.json() if "json" in resp.headers.get("Content-Type", "") else resp.text
        hypothesis = parse_result(payload, entry.recording_id)
    except requests.Timeout:
        return RunRecord(**base, upload=upload, processing=processing, download=download,
                         status=RunStatus.TIMEOUT, message="timed out")
    except (requests.RequestException, OSError, KeyError, ValueError, DiarBenchError) as exc:
        return RunRecord(**base, upload=upload, processing=processing, download=download,
                         status=RunStatus.ERROR, message=str(exc))
    finally:
        session.close()
    return RunRecord(**base, upload=upload, processing=processing, download=download, hypothesis=hypothesis)


def pipeline_from_options(options: dict):
    opts = dict(options)
    spec = SlidingWindowSpec(opts.pop("window_ms", 10_000), opts.pop("stride_ms", 1_000))
    strategy = opts.pop("strategy", "per_window")
    seed = opts.pop("seed", 0)
    try:
        config = PipelineConfig(**opts)
    except TypeError as exc:
        raise ConfigError(f"bad pipeline options: {exc}") from None
    return spec, strategy, seed, config


def _run_builtin(adapter: AdapterConfig, entry: ManifestEntry, started: str, scenario: Annotation) -> RunRecord:
    spec, strategy, seed, config = pipeline_from_options(adapter.options)
    base = dict(recording_id=entry.recording_id, system_tag=adapter.system_tag,
                audio_duration=entry.audio_duration, started_at=started)
    t0 = time.perf_counter_ns()
    try:
        result = run_pipeline(scenario, spec, strategy, seed, config, total=entry.audio_duration)
    except (ValueError, DiarBenchError) as exc:
        return RunRecord(**base, processing=_ms_since(t0), status=RunStatus.ERROR, message=str(exc))
    # wall time under 1ms still counts as a request
    return RunRecord(**base, processing=max(1, _ms_since(t0)), hypothesis=result.hypothesis)


def run_system(adapter: AdapterConfig, manifest: Manifest, split: Split | str = Split.TEST) -> list[RunRecord]:
    """One record per manifest entry of ``split``, in manifest order.

    Per-recording failures become ``timeout``/``error`` records; only
    configuration problems raise.
    """
    entries = manifest.split(split)
    scenarios = {}
    if adapter.kind is AdapterKind.BUILTIN_PIPELINE:
        pipeline_from_options(adapter.options)
        scenarios = manifest.load_references(split)
    else:
        for entry in entries:
            _require_audio(entry)

    def one(entry: ManifestEntry) -> RunRecord:
        started = _now()
        log.info("running %s on %s", adapter.system_tag, entry.recording_id)
        if adapter.kind is AdapterKind.SUBPROCESS:
            return _run_subprocess(adapter, entry, started)
        if adapter.kind is AdapterKind.HTTP_POLL:
            return _run_http(adapter, entry, started)
        return _run_builtin(adapter, entry, started, scenarios[entry.recording_id])

    with ThreadPoolExecutor(max_workers=adapter.max_parallel) as pool:
        return list(pool.map(one, entries))


def run_meta(adapter: AdapterConfig, manifest: Manifest, records, manifest_path="", split="test") -> RunMeta:
    return RunMeta(
        system_tag=adapter.system_tag,
        config_hash=adapter.config_hash,
        manifest_hash=manifest.digest,
        started_at=min((r.started_at for r in records), default=""),
        manifest_path=str(manifest_path),
        split=str(Split(split).value),
        adapter=adapter.to_json(),
    )

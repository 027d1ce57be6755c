"""Resumable exhaustive scans over ranges of r.

Each r is an independent work unit. Results are merged in r order, so a
report never depends on the worker count or on where a run was interrupted.
"""

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .tuples import (
    TRIPLE_TAGS, lemma41_prunes, quadruple_scan, theorem11_exclusions, theorem12_fires,
    theorem15_prunes, triples_for,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FILTERS = ("lemma41", "thm11", "thm12", "thm15")
CSV_COLUMNS = ["r", "triples"] + [f"pruned_{f}" for f in FILTERS] + ["quadruples"]


class CheckpointError(Exception):
    """Missing, corrupt, or incompatible checkpoint file."""


@dataclass
class ScanConfig:
    r_min: int
    r_max: int
    s_max: int
    x_max: int
    workers: int = 1
    checkpoint_path: str = None
    output_format: str = "json"
    checkpoint_every: float = 10.0

    def __post_init__(self):
        if self.r_min < 1:
            raise ValueError("r_min must be at least 1")
        if self.s_max < 0 or self.x_max < 0:
            raise ValueError("s_max and x_max must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        if not 0 <= self.checkpoint_every <= 30:
            raise ValueError("checkpoint_every must lie in [0, 30] seconds")
        if self.checkpoint_path is None:
            base = Path(os.environ.get("DLAB_CHECKPOINT_DIR", "."))
            self.checkpoint_path = str(base / f"scan-{self.config_hash()[:12]}.ckpt.json")

    def scope(self) -> dict:
        """The parameters that determine the report's content."""
        return {"r_min": self.r_min, "r_max": self.r_max, "s_max": self.s_max, "x_max": self.x_max}

    def config_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.scope(), sort_keys=True).encode()).hexdigest()


@dataclass
class Report:
    config: dict
    per_r: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)
    wall_seconds: float = 0.0

    @property
    def totals(self) -> dict:
        return {
            "triples": sum(row["triples"] for row in self.per_r),
            "pruned_by": {f: sum(row[f"pruned_{f}"] for row in self.per_r) for f in FILTERS},
            "survivors": sum(row["survivors"] for row in self.per_r),
            "quadruples": sum(row["quadruples"] for row in self.per_r),
        }

    @property
    def ok(self) -> bool:
        return self.totals["quadruples"] == 0 and not self.anomalies

    def to_dict(self, timing: bool = True) -> dict:
        out = {"config": self.config, "per_r": self.per_r, "totals": self.totals,
               "anomalies": self.anomalies}
        if timing:
            out["wall_seconds"] = round(self.wall_seconds, 3)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(data["config"], data["per_r"], data.get("anomalies", []),
                   data.get("wall_seconds", 0.0))


def scan_r(r: int, s_max: int, x_max: int) -> dict:
    """Enumerate, filter and extend the triples of a single r."""
    row = {"r": r, "triples": 0, **{f"pruned_{f}": 0 for f in FILTERS},
           "survivors": 0, "survivor_s": [], "pruned_s": {f: [] for f in FILTERS}, "quadruples": 0}
    anomalies = []
    thm12 = theorem12_fires(r)
    for tw in triples_for(r, s_max):
        row["triples"] += 1
        if lemma41_prunes(tw):
            pruned = "lemma41"
        elif any(tag in TRIPLE_TAGS for tag in theorem11_exclusions(tw)):
            pruned = "thm11"
        elif thm12:
            pruned = "thm12"
        elif theorem15_prunes(tw):
            pruned = "thm15"
        else:
            pruned = None
        if pruned:
            row[f"pruned_{pruned}"] += 1
            row["pruned_s"][pruned].append(tw.s)
        else:
            row["survivors"] += 1
            row["survivor_s"].append(tw.s)
            for cand in quadruple_scan(tw, x_max):
                row["quadruples"] += 1
                anomalies.append({"r": r, "s": tw.s, "x": cand.x, "tag": "quadruple",
                                  "exclusions": theorem11_exclusions(tw, cand.x)})
    return {"row": row, "anomalies": anomalies}


def _scan_unit(args):
    return scan_r(*args)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_atomic(path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _State:
    def __init__(self, config: ScanConfig, checkpoint: dict = None):
        self.config = config
        if checkpoint is None:
            self.completed_r = config.r_min - 1
            self.per_r, self.anomalies = [], []
            self.started_at = _now()
            self.wall_seconds = 0.0
        else:
            self.completed_r = checkpoint["completed_r"]
            self.per_r = checkpoint["per_r"]
            self.anomalies = checkpoint["anomalies"]
            self.started_at = checkpoint["started_at"]
            self.wall_seconds = checkpoint["wall_seconds"]

    def checkpoint(self) -> dict:
        cfg = self.config
        return {
            "schema_version": SCHEMA_VERSION,
            "config_hash": cfg.config_hash(),
            "config": {**cfg.scope(), "workers": cfg.workers, "output_format": cfg.output_format,
                       "checkpoint_every": cfg.checkpoint_every},
            "completed_r": self.completed_r,
            "per_r": self.per_r,
            "anomalies": self.anomalies,
            "started_at": self.started_at,
            "updated_at": _now(),
            "wall_seconds": self.wall_seconds,
        }

    def save(self):
        write_atomic(self.config.checkpoint_path, json.dumps(self.checkpoint(), indent=1))

    def report(self) -> Report:
        return Report(self.config.scope(), list(self.per_r), list(self.anomalies), self.wall_seconds)


def load_checkpoint(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CheckpointError(f"no checkpoint at {path}") from None
    except (OSError, ValueError) as exc:
        raise CheckpointError(f"unreadable checkpoint {path}: {exc}") from None
    if not isinstance(data, dict):
        raise CheckpointError(f"checkpoint {path} is not a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise CheckpointError(f"checkpoint {path} has schema {data.get('schema_version')!r}, "
                              f"expected {SCHEMA_VERSION}")
    required = {"config_hash", "config", "completed_r", "per_r", "anomalies", "started_at", "wall_seconds"}
    if missing := required - data.keys():
        raise CheckpointError(f"checkpoint {path} lacks {sorted(missing)}")
    return data


def _execute(state: _State, on_progress=None) -> Report:
    cfg = state.config
    t0 = time.monotonic()
    base_wall = state.wall_seconds
    last_write = t0
    state.save()
    todo = [(r, cfg.s_max, cfg.x_max) for r in range(state.completed_r + 1, cfg.r_max + 1)]

    def results():
        if cfg.workers == 1 or len(todo) <= 1:
            yield from map(_scan_unit, todo)
        else:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                # map yields in submission order, which keeps the prefix contiguous
                yield from pool.map(_scan_unit, todo, chunksize=1)

    for res in results():
        state.per_r.append(res["row"])
        state.anomalies.extend(res["anomalies"])
        state.completed_r = res["row"]["r"]
        state.wall_seconds = base_wall + time.monotonic() - t0
        now = time.monotonic()
        if now - last_write >= cfg.checkpoint_every:
            state.save()
            last_write = now
        if on_progress is not None:
            on_progress(state.completed_r)
    if todo:
        state.wall_seconds = base_wall + time.monotonic() - t0
    state.save()
    log.info("scan r=%d..%d finished in %.2fs", cfg.r_min, cfg.r_max, state.wall_seconds)
    return state.report()


def run_scan(config: ScanConfig, on_progress=None) -> Report:
    """Scan config.r_min..config.r_max from scratch, checkpointing as it goes.

    ``on_progress(completed_r)`` is called after each r is merged (and after any
    checkpoint write for it).
    """
    return _execute(_State(config), on_progress)


def resume(checkpoint_path, workers: int = None, on_progress=None) -> Report:
    data = load_checkpoint(checkpoint_path)
    c = data["config"]
    config = ScanConfig(c["r_min"], c["r_max"], c["s_max"], c["x_max"],
                        workers=workers or c.get("workers", 1), checkpoint_path=str(checkpoint_path),
                        output_format=c.get("output_format", "json"),
                        checkpoint_every=c.get("checkpoint_every", 10.0))
    if config.config_hash() != data["config_hash"]:
        raise CheckpointError(f"checkpoint {checkpoint_path} config hash does not match its config")
    if not config.r_min - 1 <= data["completed_r"] <= max(config.r_max, config.r_min - 1):
        raise CheckpointError(f"checkpoint {checkpoint_path} has completed_r out of range")
    return _execute(_State(config, data), on_progress)


def render(report: Report, fmt: str = "json", timing: bool = True) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(timing), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(report.per_r)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit(report: Report, fmt: str, path, timing: bool = True) -> Path:
    path = Path(path)
    write_atomic(path, render(report, fmt, timing))
    return path


def read_report(path) -> Report:
    return Report.from_dict(json.loads(Path(path).read_text()))

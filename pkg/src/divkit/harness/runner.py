"""Config-driven entry point shared by every CLI subcommand."""
from __future__ import annotations

import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from ..data import DataError
from ..kernels import BACKEND
from . import config as C
from .experiments import execute
from .io import resolve_out_dir, write_canonical, write_rows

log = logging.getLogger("divkit")

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


def run_config(cfg: C.ExperimentConfig, out: str | None = None, jobs: int = 1) -> Path:
    """Run a validated config and write ``report.json`` plus CSV side files.

    ``report.json`` holds only the canonical body; wall-clock data goes to
    ``run_meta.json`` so identical configs give byte-identical reports.
    """
    out_dir = resolve_out_dir(out, cfg.out, f"divkit-out/{cfg.kind}")
    t0 = time.perf_counter()
    outcome = execute(cfg, jobs)
    elapsed = time.perf_counter() - t0
    out_dir.mkdir(parents=True, exist_ok=True)
    write_canonical(out_dir / "report.json", outcome.report(cfg))
    for name, (header, rows) in outcome.tables.items():
        write_rows(out_dir / name, header, rows)
    meta = {
        "finished_at": datetime.now(timezone.utc).isoformat(),
        "elapsed_seconds": round(elapsed, 3),
        "kernel_backend": BACKEND,
        "jobs": jobs,
    }
    (out_dir / "run_meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    log.info("%s report written to %s (%.2fs)", cfg.kind, out_dir, elapsed)
    return out_dir


def run(config_path, out: str | None = None, jobs: int = 1, overrides: dict | None = None) -> int:
    """Load, validate, run. Returns 0 on success, 1 on validation error, 2 on runtime error."""
    try:
        if overrides:
            raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
            cfg = C.resolve(apply_overrides(raw, overrides))
        else:
            cfg = C.load_config(config_path)
    except (C.ConfigError, DataError, OSError, json.JSONDecodeError) as exc:
        print(f"divkit: invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        run_config(cfg, out, jobs)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        log.debug("runtime failure", exc_info=True)
        print(f"divkit: {cfg.kind} failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def apply_overrides(raw: dict, overrides: dict) -> dict:
    """Dotted-path overrides, e.g. ``{"params.depth": 3, "trials": 5}``."""
    raw = json.loads(json.dumps(raw))
    for key, value in overrides.items():
        if value is None:
            continue
        node = raw
        *parents, leaf = key.split(".")
        for part in parents:
            node = node.setdefault(part, {})
        node[leaf] = value
    return raw

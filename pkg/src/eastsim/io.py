"""Config files, CSV/JSON export and run manifests."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import fields, replace
from datetime import datetime, timezone
from pathlib import Path

from .engine import RoundMetrics, SimConfig
from .errors import ConfigError
from .linkmodel import RadioConstants
from .regioning import REGIONS

REGION_COLUMNS = ("count", "n_c", "n_d", "threshold_dbm", "p_save_levels", "p_save_db", "prr")
CSV_COLUMNS = (
    ("round", "ref_x", "ref_y")
    + tuple(f"{col}_{r}" for r in REGIONS for col in REGION_COLUMNS)
    + ("beacons", "acks", "adjust_msgs")
)

_CONFIG_TYPES = {f.name: f.type for f in fields(SimConfig) if f.name != "radio"}
_RADIO_KEYS = {f.name for f in fields(RadioConstants)}


def _coerce(key: str, raw: str, typ: str):
    if typ == "int":
        return int(raw)
    if typ == "float":
        return float(raw)
    return raw


def parse_config_text(text: str, source: str = "<config>") -> SimConfig:
    """Parse ``key = value`` lines (``#`` starts a comment). Missing keys keep defaults."""
    values: dict = {}
    radio: dict = {}
    key_lines: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        key_lines[key] = lineno
        if not raw:
            raise ConfigError(f"{source}:{lineno}: missing value for {key!r}")
        try:
            if key in _RADIO_KEYS:
                radio[key] = float(raw)
            elif key in _CONFIG_TYPES:
                values[key] = _coerce(key, raw, _CONFIG_TYPES[key])
            else:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {raw!r}") from None
    try:
        cfg = SimConfig(**values)
        if radio:
            cfg = replace(cfg, radio=RadioConstants(**radio))
        return cfg.validate()
    except ValueError as exc:
        msg = str(exc)
        where = next((n for k, n in key_lines.items() if msg.startswith(k)), None)
        if where is None and msg.startswith("temperature range"):
            where = key_lines.get("temp_min", key_lines.get("temp_max"))
        loc = f"{source}:{where}" if where else source
        raise ConfigError(f"{loc}: {msg}") from None


def load_config(path: str | os.PathLike) -> SimConfig:
    """Read a key-value config file, or the config snapshot inside a manifest.json."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        try:
            doc = json.loads(text)
            return config_from_json(doc["config"] if "config" in doc else doc)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: not a valid manifest: {exc}") from None
    return parse_config_text(text, str(path))


def config_to_json(cfg: SimConfig) -> dict:
    d = cfg.to_dict()
    # strict JSON has no infinity
    if math.isinf(d["ref_range"]):
        d["ref_range"] = None
    return d


def config_from_json(d: dict) -> SimConfig:
    d = dict(d)
    if d.get("ref_range") is None:
        d["ref_range"] = math.inf
    return SimConfig.from_dict(d)


def fmt(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return f"{v:.6g}"


def metrics_rows(metrics: list[RoundMetrics]):
    for m in metrics:
        row = [str(m.round), fmt(m.ref_x), fmt(m.ref_y)]
        for r in m.regions:
            row += [str(r.count), str(r.n_c), str(r.n_d), fmt(r.threshold),
                    fmt(r.p_save_levels), fmt(r.p_save_db), fmt(r.prr)]
        row += [str(m.traffic.beacons), str(m.traffic.acks), str(m.traffic.power_adjust_msgs)]
        yield row


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def rounds_csv(metrics: list[RoundMetrics]) -> str:
    return csv_text(CSV_COLUMNS, metrics_rows(metrics))


def read_rounds_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: float(v) for k, v in row.items()} for row in rows]


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    write_atomic(path, json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n")


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def manifest(cfg: SimConfig, started: str, finished: str, outputs: dict) -> dict:
    from . import __version__

    return {
        "tool": "eastsim",
        "version": __version__,
        "seed": cfg.seed,
        "config": config_to_json(cfg),
        "started": started,
        "finished": finished,
        "outputs": outputs,
    }


def _nan_to_none(obj):
    if isinstance(obj, dict):
        return {k: _nan_to_none(v) for k, v in obj.items()}
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def export_run(result, out_dir: str | os.PathLike, started: str | None = None) -> dict:
    """Write rounds.csv, summary.json and manifest.json for one run; return their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = started or now_iso()
    paths = {name: str(out / name) for name in ("rounds.csv", "summary.json", "manifest.json")}
    write_atomic(paths["rounds.csv"], rounds_csv(result.metrics))
    write_json(paths["summary.json"], _nan_to_none(result.summary(digits=6)))
    write_json(paths["manifest.json"], manifest(result.config, started, now_iso(), paths))
    return paths

"""Engine configuration: a small JSON file pointing at the model and store,
plus service and scheduling settings. The QGAUGE_CONFIG environment variable
names the default config file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

ENV_VAR = "QGAUGE_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass
class EngineConfig:
    model_path: Path
    store_path: Path
    window_days: Optional[int] = None
    period_minutes: Optional[int] = None
    host: str = "127.0.0.1"
    port: int = 8400
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    project: str = "default"


def load_config(path: Path | str) -> EngineConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad config JSON in {path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        model_path = doc["model"]
        store_path = doc["store"]
    except KeyError as exc:
        raise ConfigError(f"config {path} missing key {exc}") from None
    base = path.parent
    cors = doc.get("cors_origins", ["*"])
    if isinstance(cors, str):
        cors = [cors]
    return EngineConfig(
        model_path=(base / model_path).resolve(),
        store_path=(base / store_path).resolve(),
        window_days=doc.get("window_days"),
        period_minutes=doc.get("period_minutes"),
        host=doc.get("host", "127.0.0.1"),
        port=int(doc.get("port", 8400)),
        cors_origins=list(cors),
        project=doc.get("project", "default"),
    )


def config_from_env() -> Optional[EngineConfig]:
    path = os.environ.get(ENV_VAR)
    if not path:
        return None
    return load_config(path)

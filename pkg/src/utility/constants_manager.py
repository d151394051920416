from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

from dotenv import find_dotenv, load_dotenv


class ConstantsManager:
    _dotenv_loaded = False

    def __init__(self):
        if not ConstantsManager._dotenv_loaded:
            load_dotenv(dotenv_path=find_dotenv(usecwd=True), override=False)
            ConstantsManager._dotenv_loaded = True

    def get_variable(self, variableName: str) -> str:
        variable = os.environ.get(variableName, "")
        if variable == "":
            raise KeyError(f"Could not find {variableName} environment variable")
        return variable

    def get_optional(self, variableName: str, default: Optional[str] = None) -> Optional[str]:
        try:
            return self.get_variable(variableName)
        except KeyError:
            return default

    def get_cache_dir(self) -> Path:
        return Path(self.get_optional("DAMPKIT_CACHE_DIR", "./.dampkit_cache"))

    def get_log_level(self) -> str:
        return self.get_optional("DAMPKIT_LOG_LEVEL", "INFO").upper()

    def get_workers(self) -> int:
        raw = self.get_optional("DAMPKIT_WORKERS", "1")
        try:
            workers = int(raw)
        except ValueError as exc:
            raise ValueError(f"DAMPKIT_WORKERS must be an integer, got {raw!r}") from exc
        return max(1, workers)

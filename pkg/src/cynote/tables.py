"""Loader for the versioned data tables shipped with the package."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Any


@lru_cache(maxsize=None)
def load(name: str) -> dict[str, Any]:
    path = resources.files("cynote.data").joinpath(f"{name}.json")
    return json.loads(path.read_text(encoding="utf-8"))

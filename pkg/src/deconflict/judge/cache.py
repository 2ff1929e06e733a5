"""Content-addressed on-disk judgment cache.

Keys hash (model, prompt id, rendered prompt); records are append-only JSON
files laid out as <root>/<first two hex chars>/<key>.json. Reads need no
locking; writes go through a temp file and an atomic rename, serialized by a
process-local lock. Records keep the raw judge output so verdicts can always
be re-derived by the one parsing path.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class CacheRecord:
    key_hash: str
    model: str
    prompt_id: str
    rendered_prompt_hash: str
    raw_response: str
    parsed_verdict: Optional[dict]
    timestamp: float


def cache_key(model: str, prompt_id: str, rendered_prompt: str) -> str:
    digest = hashlib.sha256()
    for part in (model, prompt_id, rendered_prompt):
        digest.update(part.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


class JudgmentCache:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> Optional[CacheRecord]:
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (FileNotFoundError, json.JSONDecodeError):
            return None
        return CacheRecord(**data)

    def put(self, record: CacheRecord) -> None:
        path = self._path(record.key_hash)
        with self._write_lock:
            if path.exists():  # append-only: first writer wins
                return
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    json.dump(asdict(record), fh, ensure_ascii=False)
                os.replace(tmp, path)
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)

    def store_response(
        self,
        key: str,
        model: str,
        prompt_id: str,
        rendered_prompt: str,
        raw_response: str,
        parsed_verdict: Optional[dict] = None,
    ) -> None:
        self.put(
            CacheRecord(
                key_hash=key,
                model=model,
                prompt_id=prompt_id,
                rendered_prompt_hash=hashlib.sha256(
                    rendered_prompt.encode("utf-8")
                ).hexdigest(),
                raw_response=raw_response,
                parsed_verdict=parsed_verdict,
                timestamp=time.time(),
            )
        )

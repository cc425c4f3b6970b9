"""Content hashing for stores and repositories.

Hashes are sha256 over a canonical JSON encoding (sorted keys, no spaces) so
"byte-identical" invariants are cheap to assert in tests.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def stable_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)


def content_hash(payload: Any) -> str:
    return hashlib.sha256(stable_json(payload).encode("utf-8")).hexdigest()

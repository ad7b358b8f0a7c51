"""Canonical JSON rendering shared by the CLI and the HTTP service.

Both surfaces must return byte-identical payloads for identical
queries, so they funnel through this one encoder.
"""

import json


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)


def dumps_pretty(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)

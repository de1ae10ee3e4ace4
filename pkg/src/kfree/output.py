"""Versioned CSV and JSON output plus the run manifest."""

import csv
import hashlib
import io
import json
import platform
from dataclasses import asdict, dataclass, field

SCHEMA_VERSION = 1


def csv_text(columns, rows, meta=None):
    """CSV with '#'-prefixed metadata lines, the schema version first."""
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    buf.write(f"# columns: {','.join(columns)}\n")
    for key in sorted(meta or {}):
        buf.write(f"# {key}: {meta[key]}\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def read_csv(text):
    """(metadata dict, rows) from text written by :func:`csv_text`."""
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
        else:
            body.append(line)
    return meta, list(csv.DictReader(body))


def json_text(payload):
    return json.dumps({"schema_version": SCHEMA_VERSION, **payload}, indent=2, sort_keys=True, default=str) + "\n"


def digest(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    """What was run and a digest of what it produced; wall time is not part of the digest."""

    command: str
    parameters: dict
    version: str
    precision: int
    workers: int
    backend: str
    wall_time: float = 0.0
    output_digest: str = ""
    python: str = field(default_factory=platform.python_version)

    def to_json(self):
        return json_text(asdict(self))

    def identity(self):
        """Digest over everything except wall time."""
        d = asdict(self)
        d.pop("wall_time")
        return digest(json.dumps(d, sort_keys=True, default=str))

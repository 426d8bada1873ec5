"""Minimal key=value config file format.

One ``key = value`` pair per line; blank lines and '#' comments ignored.
Values are kept as strings here, typing happens at the consumer. The format
round-trips: parse(serialize(d)) == d.
"""
from __future__ import annotations

from .errors import ConfigError


def parse_kv(text: str, source: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def serialize_kv(entries: dict[str, str]) -> str:
    lines = []
    for key, value in entries.items():
        key = str(key).strip()
        value = str(value).strip()
        if not key or "=" in key or "#" in key or "\n" in key:
            raise ConfigError(f"key {key!r} not representable")
        if "#" in value or "\n" in value:
            raise ConfigError(f"value {value!r} for key {key!r} not representable")
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def load_kv(path: str) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_kv(text, source=path)

"""Plain key=value configuration files (dotted keys for namespacing)."""

from __future__ import annotations

DEFAULTS = {
    "fusion.highpass_rule": "max",
    "fusion.lowpass_rule": "mean",
    "equivalence_rel_tol": 1e-5,
    "dispatch.per_level": True,
}


def load_config(path) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed config line: {raw.rstrip()}")
            out[key.strip()] = _coerce(value.strip())
    return out


def _coerce(value):
    lowered = value.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def merged(config_path=None) -> dict:
    doc = dict(DEFAULTS)
    if config_path:
        doc.update(load_config(config_path))
    return doc

"""Python front end to the uitrust simulator core.

Configs are passed as the same ``key = value`` text the command-line tool
reads. Reports come back as plain dicts.
"""

import json
import math

from . import _uitrust
from ._uitrust import (
    ConfigError,
    TopologyError,
    WireError,
    csv_header,
    decode_lto,
    decode_query,
    decode_response,
    encode_lto,
    encode_query,
    encode_response,
)

__all__ = [
    "ConfigError",
    "TopologyError",
    "WireError",
    "config_text",
    "csv_header",
    "decode_lto",
    "decode_query",
    "decode_response",
    "encode_lto",
    "encode_query",
    "encode_response",
    "evaluate_trust",
    "normalize_config",
    "reports_csv",
    "run",
    "run_detailed",
    "sweep",
]


def config_text(**overrides):
    """Build config text from keyword overrides, e.g. sybil_ratio=0.3."""
    lines = []
    for key, value in overrides.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def normalize_config(text):
    """Canonical text form of a config; raises ConfigError when invalid."""
    return _uitrust.normalize_config(text)


def run(config="", seed=None, trace=None):
    """One deterministic run; returns the metrics report as a dict."""
    return json.loads(_uitrust.run_json(config, seed, trace))


def run_detailed(config="", seed=None):
    """Run with per-device outcomes and the last trust-epoch report."""
    d = _uitrust.run_detailed(config, seed)
    d["report"] = json.loads(d["report"])
    if d["last_trust_report"] is not None:
        d["last_trust_report"] = json.loads(d["last_trust_report"])
    return d


def sweep(config="", seeds=1, ratios=(0.3,), defenses=("uitrust",)):
    """Every (ratio, defense, seed) run in export order."""
    return [json.loads(s) for s in _uitrust.sweep_json(config, seeds, list(ratios), list(defenses))]


def reports_csv(reports):
    """CSV text (header plus one row per report) for report dicts."""
    return _uitrust.reports_csv([json.dumps(r) for r in reports])


def evaluate_trust(lto, hops=None, observer_subject=None, gamma=0.5, theta=0.5, lam=0.5,
                   quorum_cut=0.3, credibility_reference="br_j", prev_gr=None):
    """Full root-side evaluation of an observers x subjects LTO matrix.

    ``lto`` rows hold floats or None. Returns the trust report dict.
    """
    if credibility_reference not in ("br_j", "br_u"):
        raise ValueError("credibility_reference must be 'br_j' or 'br_u'")
    prev = [math.nan if g is None else float(g) for g in (prev_gr or [])]
    out = _uitrust.evaluate_trust_json(
        [list(r) for r in lto], list(hops or []), list(observer_subject or []),
        gamma, theta, lam, quorum_cut, credibility_reference == "br_u", prev)
    return json.loads(out)

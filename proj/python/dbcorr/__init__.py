"""Correlation detection and alignment of Gaussian databases.

Thin wrapper over the C++ core. ``run_config`` drives the same commands as the
``dbcorr`` command-line tool from a dict.
"""

import json as _json

from ._dbcorr import (
    Error,
    default_config,
    detection_ach_risk,
    exact_second_moment,
    g_fa,
    g_md,
    invert_for_rho2,
    ml_decode,
    recovery_ach_perr,
    recovery_conv_perr,
    run,
    sample_alt,
    sample_null,
    sip_statistic,
    truncated_converse_risk,
    unconditional_converse_risk,
)

BOUND_KINDS = (
    "detection achievable",
    "detection converse",
    "recovery achievable",
    "recovery converse",
)


def run_config(command, **overrides):
    """Run `command` with defaults updated by `overrides`.

    Returns ``(body, exit_code, diagnostics)``; the body is parsed when the
    format is JSON.
    """
    config = _json.loads(default_config(command))
    config.update(overrides)
    body, code, diagnostics = run(_json.dumps(config))
    if config["format"] == "json":
        body = _json.loads(body)
    return body, code, diagnostics


__all__ = [name for name in dir() if not name.startswith("_")]

"""Round-trip dense-coding CV-QKD model: closed forms, attacks, key rates and sweeps."""

from ._dcqkd import (
    ConfigError,
    ProtocolParams,
    bob_snr,
    bob_variances,
    correlation_after_tap,
    csv_header,
    detection_sample_size,
    evaluate_attack,
    key_rate,
    monitor_variances,
    mutual_info,
    required_tap_ratio,
    security_threshold,
    simulate_session,
    variance_to_db,
)
from ._dcqkd import run_sweep as _run_sweep

__all__ = [
    "ConfigError",
    "ProtocolParams",
    "bob_snr",
    "bob_variances",
    "correlation_after_tap",
    "csv_header",
    "detection_sample_size",
    "evaluate_attack",
    "key_rate",
    "monitor_variances",
    "mutual_info",
    "required_tap_ratio",
    "run_sweep",
    "security_threshold",
    "simulate_session",
    "variance_to_db",
]


def run_sweep(**settings):
    """Sweep with config-file keys as keyword arguments.

    ``attack`` may be a string or a list of strings. Example::

        run_sweep(sweep="eta:0.1:0.9:0.1", gamma=0.05, attack=["single-tap", "dual-tap"])
    """
    pairs = []
    for key, value in settings.items():
        values = value if isinstance(value, (list, tuple)) else [value]
        for v in values:
            pairs.append((key, str(v).lower() if isinstance(v, bool) else str(v)))
    return _run_sweep(pairs)

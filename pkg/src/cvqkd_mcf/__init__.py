"""CV-QKD key rates, crosstalk noise and guard-band planning for multicore fibre links."""

from .skr import (
    Attack,
    LinkParams,
    ProtocolParams,
    holevo_bound,
    max_tolerable_excess_noise,
    optimize_modulation_variance,
    secret_key_rate,
    skr_bits_per_second,
)

__all__ = [
    "Attack",
    "LinkParams",
    "ProtocolParams",
    "holevo_bound",
    "max_tolerable_excess_noise",
    "optimize_modulation_variance",
    "secret_key_rate",
    "skr_bits_per_second",
]

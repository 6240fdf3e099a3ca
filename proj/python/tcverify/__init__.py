"""Storm-following tropical-cyclone forecast verification.

Thin wrapper around the C++ core. The main operations are exposed directly:

>>> import tcverify
>>> tcverify.haversine_km(0.0, 0.0, 0.0, 90.0)
10007.543398010286
"""

from tcverify._core import (
    VerifyError,
    brier_skill,
    csi,
    decompose_track_error,
    ensemble_event_prob,
    evaluate,
    fair_crps,
    haversine_km,
    initial_bearing_deg,
    label_ri,
    pss,
    scorecard,
    spherical_mean,
    synth,
    track_crps,
)

__all__ = [
    "VerifyError",
    "brier_skill",
    "csi",
    "decompose_track_error",
    "ensemble_event_prob",
    "evaluate",
    "fair_crps",
    "haversine_km",
    "initial_bearing_deg",
    "label_ri",
    "pss",
    "scorecard",
    "spherical_mean",
    "synth",
    "track_crps",
]

"""Orbit analytics: return and divergence sets, sensitivity, witness searches."""

from .neighborhoods import Ball, Cylinder, ball_samples, cylinder_samples
from .orbits import (
    Budget,
    DivergenceProfile,
    Proximality,
    divergence_profile,
    hitting_times,
    proximality_inf,
    return_times,
    sensitivity_set,
)
from .recurrence import (
    CellSpace,
    GillisResult,
    OverlapResult,
    PigeonholeResult,
    gillis_select,
    ip_overlap_search,
    pigeonhole_recurrence,
)
from .rp import RPResult, RPWitness, rp_witness_search, verify_rp_witness

__all__ = [
    "Ball",
    "Budget",
    "CellSpace",
    "Cylinder",
    "DivergenceProfile",
    "GillisResult",
    "OverlapResult",
    "PigeonholeResult",
    "Proximality",
    "RPResult",
    "RPWitness",
    "ball_samples",
    "cylinder_samples",
    "divergence_profile",
    "gillis_select",
    "hitting_times",
    "ip_overlap_search",
    "pigeonhole_recurrence",
    "proximality_inf",
    "return_times",
    "rp_witness_search",
    "sensitivity_set",
    "verify_rp_witness",
]

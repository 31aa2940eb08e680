"""Tunable analysis parameters with a single resolution order.

Precedence, highest first: explicit call arguments, scenario
assumptions, a base Params (service or CLI config), built-in defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Mapping


@dataclass(frozen=True)
class Params:
    course_weight: float = 0.5
    type_weight: float = 0.9
    exact_limit: int = 10
    beam_width: int = 1000
    cell_size_m: float = 500.0
    step_s: float = 60.0
    decay_half_life_s: float = 3600.0
    age_out_eps: float = 0.01
    age_out_area_frac: float = 0.5
    snap_radius_cells: int = 2
    hypothesis_cap: int = 200_000
    focal_cap: int = 500_000


PARAM_NAMES = frozenset(f.name for f in fields(Params))


def resolve_params(
    assumptions: Mapping | None = None,
    base: Params | None = None,
    **overrides,
) -> Params:
    params = base if base is not None else Params()
    if assumptions:
        picked = {
            k: v for k, v in assumptions.items() if k in PARAM_NAMES and v is not None
        }
        if picked:
            params = replace(params, **picked)
    cleaned = {k: v for k, v in overrides.items() if v is not None}
    if cleaned:
        unknown = set(cleaned) - PARAM_NAMES
        if unknown:
            raise ValueError(f"unknown parameters: {sorted(unknown)}")
        params = replace(params, **cleaned)
    return params

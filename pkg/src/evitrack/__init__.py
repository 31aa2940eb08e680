"""Evidential multi-sensor tracking over uncertain sighting reports."""

from .analysis import (
    AnalysisLimitError,
    CountResult,
    JointHypothesis,
    JointMass,
    PathRanking,
    PathResult,
    count_intervals,
    evidence_region,
    incident_start,
    joint_mass,
    min_submarines,
    ranked_paths,
)
from .connection import (
    ConnectionGraph,
    LinkEvidence,
    LinkFactors,
    build_graph,
    communicating_reports,
    evaluate_link,
)
from .evidence import (
    EvidenceError,
    EvidenceInterval,
    Frame,
    MassFunction,
    TotalConflictError,
    combine,
    combine_all,
    interval,
    simple_support,
)
from .evidence_map import (
    EvidenceGrid,
    add_report,
    advance_to,
    age_out,
    field_to_dict,
    init_grid,
    snapshot,
    step,
)
from .geometry import (
    BlockedEndpointError,
    GeoPath,
    MapError,
    NavigationError,
    NavMap,
    NoRouteError,
    Obstacle,
    load_navmap,
    navmap_to_geojson,
    required_speed,
    shortest_path,
)
from .params import Params, resolve_params
from .scenario import (
    Report,
    ReportFilter,
    Scenario,
    SchemaError,
    Sensor,
    SubmarineType,
    canonical_json,
    ingest_ndjson,
    ingest_report,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    select_reports,
    set_flag,
    simulate,
)

__version__ = "0.1.0"

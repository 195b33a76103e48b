"""Operational constraint audit over a mission log."""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Sequence

import networkx as nx

from soarsim.agents.sensing import footprint_radius
from soarsim.metrics.log import MissionLog, TrackRecord
from soarsim.vehicle.aero import required_lift_coefficient
from soarsim.vehicle.models import AirframeParams

logger = logging.getLogger(__name__)

CONSTRAINTS = ("containment", "battery_reserve", "connectivity", "fov_overlap", "turn_rate")


def lens_area(d: float, r_i: float, r_j: float) -> float:
    """
    Overlap area of two footprint discs whose centres are d apart.

    Disjoint or tangent discs give 0; a disc inside the other gives the
    smaller disc's area.
    """
    if d >= r_i + r_j:
        return 0.0
    if d <= abs(r_i - r_j):
        return math.pi * min(r_i, r_j) ** 2
    return lens_area_literal(d, r_i, r_j)


def lens_area_literal(d: float, r_i: float, r_j: float) -> float:
    """The closed-form overlap expression evaluated as written, for d > 0."""
    x = (r_i**2 - r_j**2 + d**2) / (2.0 * d)
    y = math.sqrt(max(r_i**2 - x**2, 0.0))
    return (r_i**2 + r_j**2) * math.atan2(y, x) - d * y


def fov_overlaps(a: TrackRecord, b: TrackRecord, fov: float) -> bool:
    d = math.hypot(a.x - b.x, a.y - b.y)
    return lens_area(d, footprint_radius(a.z, fov), footprint_radius(b.z, fov)) > 0.0


def turn_rate_demand(params: AirframeParams, V_a: float, bank: float) -> float:
    """Turn rate needed to fly R_min at this speed and bank; compared against psi_dot_max."""
    C_L = required_lift_coefficient(params, V_a, bank)
    return (1.0 / params.R_min) * math.sqrt(1.0 / math.cos(bank)) * math.sqrt(
        2.0 * params.m * params.g / (params.rho * params.S * C_L)
    )


def communication_graph(records: Sequence[TrackRecord], comm_range: float) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(r.agent_id for r in records)
    for a, b in itertools.combinations(records, 2):
        if math.dist((a.x, a.y, a.z), (b.x, b.y, b.z)) <= comm_range:
            graph.add_edge(a.agent_id, b.agent_id)
    return graph


@dataclass
class ConstraintReport:
    violations: Dict[str, int]
    ticks: int
    # Ticks where the edge count reached N - 1; necessary for connectivity, not sufficient.
    edge_count_ok: int

    @property
    def clean(self) -> bool:
        return not any(self.violations.values())


def check_constraints(
    log: MissionLog,
    params: AirframeParams,
    battery_reserve: float,
    comm_range: float,
) -> ConstraintReport:
    """
    Count violations per constraint over all ticks.

    Containment, reserve and turn-rate are counted per agent record;
    connectivity once per tick whose alive agents do not form one
    connected graph; FOV overlap once per overlapping pair per tick.
    """
    violations = {name: 0 for name in CONSTRAINTS}
    edge_count_ok = 0
    region = log.region
    ticks = log.by_tick()
    for t, records in ticks.items():
        for r in records:
            inside = region.contains(r.x, r.y) and region.z_min <= r.z <= region.z_max
            if not inside:
                violations["containment"] += 1
            if r.battery_wh / log.battery_capacity_wh < battery_reserve:
                violations["battery_reserve"] += 1
            if turn_rate_demand(params, r.V_a, r.bank) > params.psi_dot_max:
                violations["turn_rate"] += 1
        if len(records) > 1:
            graph = communication_graph(records, comm_range)
            if graph.number_of_edges() >= len(records) - 1:
                edge_count_ok += 1
            if not nx.is_connected(graph):
                violations["connectivity"] += 1
        else:
            edge_count_ok += 1
        for a, b in itertools.combinations(records, 2):
            if fov_overlaps(a, b, log.fov):
                violations["fov_overlap"] += 1
    if any(violations.values()):
        logger.info(f"Constraint violations: {violations}")
    return ConstraintReport(violations=violations, ticks=len(ticks), edge_count_ok=edge_count_ok)


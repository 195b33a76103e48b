"""The bundle of maps an agent reads and writes."""

from dataclasses import dataclass

from soarsim.environment.models import Region
from soarsim.maps.models import GridMap, LiftMap, MissionMap


@dataclass
class MapStore:
    lift: LiftMap
    lift_prob: GridMap
    mission: MissionMap

    @classmethod
    def empty(cls, region: Region, cell_size: float = 100.0, merge_radius: float = 100.0) -> "MapStore":
        return cls(
            lift=LiftMap(merge_radius=merge_radius),
            lift_prob=GridMap.for_region(region, cell_size),
            mission=MissionMap(),
        )

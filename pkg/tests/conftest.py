"""Shared fixtures."""

import pytest

from soarsim.agents.context import AgentContext, SpeedProfile, Thresholds
from soarsim.agents.models import SubMissionKind
from soarsim.agents.tasks import SubMission
from soarsim.config import REPO_ROOT
from soarsim.environment import Region
from soarsim.maps import MapStore
from soarsim.planning import CoverageMode, SubArea
from soarsim.vehicle import load_airframe
from soarsim.vehicle.models import UavState


@pytest.fixture(scope="session")
def airframe():
    return load_airframe(REPO_ROOT / "airframes" / "phoenix2400.txt")


@pytest.fixture
def square_region():
    return Region(lower_bound=(0.0, 0.0), upper_bound=(1000.0, 1000.0), z_min=200.0, z_max=1000.0)


@pytest.fixture
def make_agent(square_region):
    """Factory for agents in the 1 km square region with default thresholds."""

    def make(agent_id=0, x=500.0, y=500.0, z=500.0, psi=0.0, battery_wh=50.0, area=None, task=None, maps=None):
        return AgentContext(
            agent_id=agent_id,
            uav=UavState(V_a=12.0, psi=psi, x=x, y=y, z=z, battery_wh=battery_wh),
            area=area or SubArea.from_region(square_region),
            task=task or SubMission(SubMissionKind.SURVEILLANCE, CoverageMode.SWEEP),
            region=square_region,
            thresholds=Thresholds(),
            maps=maps or MapStore.empty(square_region),
            speeds=SpeedProfile(thermal=9.0, cruise=12.0, v_cap=14.0),
            battery_capacity_wh=50.0,
        )

    return make

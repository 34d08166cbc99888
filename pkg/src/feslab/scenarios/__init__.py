"""Ready-made closed-loop scenarios: a multi-zone building and a robot game."""

from .building import (
    BuildingReport,
    BuildingScenario,
    ThermostatOperator,
    WorkSchedule,
    build_building,
    building_metrics,
    comfort_cost,
    default_disturbance,
    occupancy_process,
    one_room_building,
    spring_weather,
    thermostat_baseline,
)
from .robots import (
    RobotScenario,
    best_response,
    build_robots,
    heading_error,
    nash_equilibrium,
    relative_outputs,
    robot_bundle,
    unicycle_plant,
)

__all__ = [
    "BuildingReport",
    "BuildingScenario",
    "ThermostatOperator",
    "WorkSchedule",
    "build_building",
    "building_metrics",
    "comfort_cost",
    "default_disturbance",
    "occupancy_process",
    "one_room_building",
    "spring_weather",
    "thermostat_baseline",
    "RobotScenario",
    "best_response",
    "build_robots",
    "heading_error",
    "nash_equilibrium",
    "relative_outputs",
    "robot_bundle",
    "unicycle_plant",
]

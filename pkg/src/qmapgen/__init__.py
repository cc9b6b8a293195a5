"""Geopolitical map and history generation driven by an emulated qubit
network: each nation's policy lives in one qubit, tomography of the network
drives city placement, and map events drive gates back into the state."""

from .engine import Game, RoundRecord, RunConfig, run_experiment, serialize_history
from .policy import Tactic, TacticKind
from .qsim import AxisAngle, BlochVector, CouplingMap, NetworkState, PauliAxis
from .tomography import TomographySnapshot, exact_snapshot, plan_settings, sampled_snapshot
from .worldmap import City, MapConfig, NationStats, WorldMap

__version__ = "0.1.0"

__all__ = [
    "AxisAngle",
    "BlochVector",
    "City",
    "CouplingMap",
    "Game",
    "MapConfig",
    "NationStats",
    "NetworkState",
    "PauliAxis",
    "RoundRecord",
    "RunConfig",
    "Tactic",
    "TacticKind",
    "TomographySnapshot",
    "WorldMap",
    "exact_snapshot",
    "plan_settings",
    "run_experiment",
    "sampled_snapshot",
    "serialize_history",
    "__version__",
]

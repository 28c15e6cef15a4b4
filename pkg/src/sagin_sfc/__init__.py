"""SFC deployment and failure recovery on a time-expanded space-air-ground network."""

from sagin_sfc.engine import RunReport, Simulation, run_simulation
from sagin_sfc.scenario import Scenario, ScenarioError, default_scenario, load_scenario

__all__ = ["RunReport", "Scenario", "ScenarioError", "Simulation", "default_scenario",
           "load_scenario", "run_simulation"]
__version__ = "0.1.0"

"""Packetized energy trading microgrid simulator.

A self-contained discrete-time co-simulation of a microgrid of houses
with cooling HVAC, unresponsive appliance loads, rooftop PV and
V2G-capable EVs, all trading power on a per-round continuous double
auction against a capacity-limited grid supply.
"""

__version__ = "0.1.0"

from .kernel import Federation, FederationError, SimClock
from .market import MarketResult, Order, Side, Transaction, match_orders, vwap
from .runner import ScenarioConfig, builtin_config, run_scenario

__all__ = [
    "Federation", "FederationError", "SimClock",
    "MarketResult", "Order", "Side", "Transaction", "match_orders", "vwap",
    "ScenarioConfig", "builtin_config", "run_scenario",
    "__version__",
]

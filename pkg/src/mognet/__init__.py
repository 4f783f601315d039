"""Moving objects on road networks.

Linear-referenced road networks with turn restrictions, network-constrained
moving points, a trajectory algebra, a synthetic traffic generator and a
small query language.
"""

from .errors import MognetError
from .generator import GenParams, generate
from .geometry import MeasuredPolyline, PlanarPoint
from .motion import MGPointUnit, UGPoint
from .network import (
    Edge,
    Network,
    TurnRestriction,
    build_network,
    load_network,
    read_edges_csv,
    save_network,
)
from .routing import network_distance, shortest_path
from .store import GLineRecord, GPointRecord, Store
from .temporal import Period, Periods, format_timestamp, parse_timestamp
from .values import GLine, GPoint, Intime, RouteInterval

__version__ = "0.1.0"

__all__ = [
    "Edge", "GenParams", "GLine", "GLineRecord", "GPoint", "GPointRecord", "Intime", "MGPointUnit",
    "MeasuredPolyline", "MognetError", "Network", "Period", "Periods", "PlanarPoint",
    "RouteInterval", "Store", "TurnRestriction", "UGPoint", "build_network",
    "format_timestamp", "generate", "load_network", "network_distance", "parse_timestamp",
    "read_edges_csv", "save_network", "shortest_path",
]

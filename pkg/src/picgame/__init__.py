"""Competitive rumor blocking under peer-to-peer independent cascades."""

from .diffusion import Scenario, Semantics, run_deterministic, run_stochastic, run_variant, scenario
from .netgraph import Network, assign_probabilities, load_edge_list, read_edge_list
from .realization import Realization, generate

__version__ = "0.1.0"

"""
epsnet core package

Finite metric spaces at a scale: chains and their homotopies, the
edge-path groups, covers, towers and the fixtures they are tested on.
"""

__version__ = "0.3.0"
__author__ = "epsnet contributors"

# Import main classes for easier access
from .metric_space import FiniteMetricSpace, Partition, build_space, chain_components, graph_metric_space
from .chains import Chain, Homotopy, Insert, Remove, apply_move, verify_homotopy
from .rips import Word, presentation, rips2
from .homology import RelationLattice, h1
from .nullity import HomotopyOracle, NullVerdict, bfs_homotopy_oracle, is_null, scale_map
from .spectrum import critical_spectrum
from .covering import CoveringGraph, build_cover, check_refined_connectivity, lift_chain
from .towers import Tower, check_refining, gref_certificate, invlim_scan, validate_tower
from .fixtures import FixtureSpec, generate
from .run_ledger import RunLedger
from .scan_runner import ScanRunner

__all__ = [
    # Spaces
    'FiniteMetricSpace', 'Partition', 'build_space', 'graph_metric_space', 'chain_components',

    # Chains
    'Chain', 'Homotopy', 'Insert', 'Remove', 'apply_move', 'verify_homotopy',

    # Groups
    'Word', 'presentation', 'rips2', 'RelationLattice', 'h1',
    'NullVerdict', 'is_null', 'scale_map', 'HomotopyOracle', 'bfs_homotopy_oracle',
    'critical_spectrum',

    # Covers and towers
    'CoveringGraph', 'build_cover', 'lift_chain', 'check_refined_connectivity',
    'Tower', 'validate_tower', 'check_refining', 'gref_certificate', 'invlim_scan',

    # Plumbing
    'FixtureSpec', 'generate', 'RunLedger', 'ScanRunner',
]

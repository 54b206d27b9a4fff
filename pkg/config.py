"""
Runtime configuration: budgets, tolerances and local directories.
"""
from pathlib import Path
import os

from dotenv import load_dotenv

# Pick up EPSNET_* overrides from a local .env file
load_dotenv()

# Version
VERSION = "0.3.0"
BUILD_DATE = "2026"

# Base directories
BASE_DIR = Path(__file__).parent.resolve()
DATA_DIR = Path(os.environ.get('EPSNET_DATA_DIR', BASE_DIR / 'data'))
LOGS_DIR = DATA_DIR / 'logs'
RUNS_DIR = DATA_DIR / 'runs'

# Numeric tolerances
TRIANGLE_TOLERANCE = 1e-9      # Relative slack for the triangle inequality
LIPSCHITZ_TOLERANCE = 1e-9     # Absolute slack for bonding maps

# Search budgets
COSET_BUDGET = int(os.environ.get('EPSNET_COSET_BUDGET', 200_000))      # Defined cosets
WORD_SEARCH_BUDGET = int(os.environ.get('EPSNET_WORD_BUDGET', 1_000_000))  # Visited words
WORD_LENGTH_CAP = 64           # Longest word the rewriting search keeps
REFINING_PATH_BUDGET = 16      # Candidate kappa-paths per pair
ORACLE_MAX_STATES = 2_000_000  # Chains visited by the brute-force oracle

# Defaults
DEFAULT_SEED = 0
DEFAULT_BASEPOINT = 0
DEFAULT_TRUNCATION = 3         # Deck radius of truncated covers

# Local API
LOCAL_HOST = os.environ.get('EPSNET_HOST', '127.0.0.1')
LOCAL_PORT = int(os.environ.get('EPSNET_PORT', 9999))
MAX_REQUESTS_PER_MINUTE = 100

# Logging
LOG_LEVEL = os.environ.get('EPSNET_LOG_LEVEL', 'INFO').upper()
LOG_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)s | %(message)s'


def ensure_dirs():
    """Create the data directories with private permissions."""
    for d in [DATA_DIR, LOGS_DIR, RUNS_DIR]:
        d.mkdir(parents=True, exist_ok=True, mode=0o700)

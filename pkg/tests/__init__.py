"""
epsnet test suite

Priority:
1. Metric spaces, chains and moves (everything else is built on them)
2. Nullity verdicts and their witnesses
3. Covers and towers
4. CLI and local API
"""

import logging

# Configure test logging
logging.basicConfig(
    level=logging.DEBUG,
    format='%(asctime)s | %(levelname)-8s | %(name)s | %(message)s'
)

"""
epsnet local API package

JSON endpoints over the library operations, for notebooks and other
local tools. Binds to localhost and rate limits per client.
"""

from .local_server import app, initialize_server, run_server

__all__ = [
    'app',
    'initialize_server',
    'run_server',
]

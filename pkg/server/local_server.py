"""
Local JSON API over the same operations as the CLI.
"""
from flask import Flask, abort, jsonify, request
from functools import wraps
import logging
import time

from config import COSET_BUDGET, MAX_REQUESTS_PER_MINUTE, VERSION
from core import storage
from core.covering import build_cover
from core.errors import EpsnetError
from core.metric_space import chain_components, connectivity_threshold
from core.nullity import is_null
from core.run_ledger import RunLedger
from core.spectrum import critical_spectrum

logger = logging.getLogger(__name__)

app = Flask(__name__)
app.config['DEBUG'] = False
app.config['MAX_CONTENT_LENGTH'] = 16 * 1024 * 1024  # 16MB max request

# Injected at startup
ledger: RunLedger = None

# Rate limiting
request_times = {}
RATE_LIMIT = MAX_REQUESTS_PER_MINUTE  # requests per minute


def rate_limit(f):
    """Rate limiting decorator."""
    @wraps(f)
    def decorated_function(*args, **kwargs):
        client_ip = request.remote_addr
        current_time = time.time()

        # Clean old entries
        request_times[client_ip] = [
            t for t in request_times.get(client_ip, [])
            if current_time - t < 60
        ]

        if len(request_times[client_ip]) >= RATE_LIMIT:
            if ledger:
                ledger.log_api_request(request.endpoint, 429, client_ip)
            abort(429, "Rate limit exceeded")

        request_times[client_ip].append(current_time)
        return f(*args, **kwargs)

    return decorated_function


def _body() -> dict:
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        abort(400, "Expected a JSON object")
    return data


def _scale(data: dict) -> float:
    try:
        return float(data['scale'])
    except (KeyError, TypeError, ValueError):
        abort(400, "Missing or invalid 'scale'")


def _logged(endpoint: str, payload: dict):
    if ledger:
        ledger.log_api_request(endpoint, 200, request.remote_addr)
    return jsonify(payload)


@app.route('/api/health')
@rate_limit
def health():
    return jsonify({'status': 'ok', 'version': VERSION})


@app.route('/api/components', methods=['POST'])
@rate_limit
def components():
    data = _body()
    space = storage.space_from_dict(data.get('space'))
    eps = _scale(data)
    part = chain_components(space, eps)
    return _logged('components', {
        'scale': eps,
        'count': part.count,
        'representative': list(part.representative),
        'threshold': connectivity_threshold(space),
    })


@app.route('/api/spectrum', methods=['POST'])
@rate_limit
def spectrum():
    data = _body()
    space = storage.space_from_dict(data.get('space'))
    result = critical_spectrum(space, int(data.get('basepoint', 0)))
    return _logged('spectrum', {
        'csv': result.to_csv(),
        'critical_values': result.critical_values,
        'homotopy_critical_values': result.homotopy_critical_values,
    })


@app.route('/api/null-check', methods=['POST'])
@rate_limit
def null_check():
    data = _body()
    space = storage.space_from_dict(data.get('space'))
    eps = _scale(data)
    loop = storage.chain_from_dict(data.get('loop'), eps)
    verdict = is_null(space, eps, loop, budget=data.get('budget'))
    return _logged('null-check', storage.verdict_to_dict(verdict))


@app.route('/api/cover', methods=['POST'])
@rate_limit
def cover():
    data = _body()
    space = storage.space_from_dict(data.get('space'))
    eps = _scale(data)
    result = build_cover(space, eps, int(data.get('basepoint', 0)),
                         budget=int(data.get('budget', COSET_BUDGET)),
                         radius=data.get('truncate'))
    return _logged('cover', storage.cover_to_dict(result))


@app.errorhandler(EpsnetError)
def input_error_handler(e):
    """Library input errors become 400 with the error type."""
    logger.error("Rejected request: %s: %s", type(e).__name__, e)
    if ledger:
        ledger.log_api_request(request.endpoint, 400, request.remote_addr)
    return jsonify({'error': str(e), 'type': type(e).__name__}), 400


@app.errorhandler(400)
def bad_request_handler(e):
    return jsonify({'error': e.description}), 400


@app.errorhandler(429)
def rate_limit_handler(e):
    """Handle rate limiting."""
    return jsonify({'error': "Rate limit exceeded. Please slow down."}), 429


@app.errorhandler(500)
def internal_error_handler(e):
    """Handle internal errors without leaking info."""
    logger.error("Internal server error: %s", e)
    return jsonify({'error': "Internal server error"}), 500


def initialize_server(run_ledger: RunLedger):
    """Initialize server with dependencies."""
    global ledger
    ledger = run_ledger


def run_server(host='127.0.0.1', port=9999):
    """Run the server."""
    app.run(host=host, port=port, threaded=True, debug=False)

"""
Tests for the local JSON API.
"""
from unittest.mock import MagicMock

import pytest

from core import storage
from server import local_server


@pytest.fixture
def client():
    local_server.request_times.clear()
    local_server.initialize_server(MagicMock())
    local_server.app.config['TESTING'] = True
    with local_server.app.test_client() as c:
        yield c
    local_server.initialize_server(None)


@pytest.fixture
def square_body(square):
    return {'space': storage.space_to_dict(square)}


def test_health(client):
    response = client.get('/api/health')
    assert response.status_code == 200
    assert response.get_json()['status'] == 'ok'


def test_components(client, square_body):
    response = client.post('/api/components', json={**square_body, 'scale': 1.2})
    assert response.status_code == 200
    assert response.get_json()['count'] == 1
    local_server.ledger.log_api_request.assert_called_with('components', 200, '127.0.0.1')


def test_null_check(client, square_body):
    body = {**square_body, 'scale': 1.2, 'loop': {'points': [0, 1, 2, 3, 0]}}
    data = client.post('/api/null-check', json=body).get_json()
    assert data['status'] == 'nonnull'
    assert data['certificate'] == [1]


def test_cover(client, square_body):
    data = client.post('/api/cover', json={**square_body, 'scale': 1.5}).get_json()
    assert data['status'] == 'complete'
    assert data['fibers'] == {'0': 1, '1': 1, '2': 1, '3': 1}


def test_spectrum(client, hexagon):
    data = client.post('/api/spectrum', json={'space': storage.space_to_dict(hexagon)}).get_json()
    assert data['critical_values'] == [1.0, 2.0]


def test_missing_scale(client, square_body):
    response = client.post('/api/components', json=square_body)
    assert response.status_code == 400
    assert 'scale' in response.get_json()['error']


def test_not_json(client):
    response = client.post('/api/components', data='scale=1', content_type='text/plain')
    assert response.status_code == 400


def test_library_error_is_400(client, square_body):
    body = {**square_body, 'scale': 1.0, 'loop': {'points': [0, 1, 2, 3, 0]}}
    response = client.post('/api/null-check', json=body)
    assert response.status_code == 400
    assert response.get_json()['type'] == 'NotALoopError'


def test_bad_space(client):
    response = client.post('/api/components', json={'space': {'graph': {'n': 2}}, 'scale': 1.0})
    assert response.status_code == 400
    assert response.get_json()['type'] == 'SchemaError'


def test_rate_limit(client, monkeypatch):
    monkeypatch.setattr(local_server, 'RATE_LIMIT', 2)
    assert client.get('/api/health').status_code == 200
    assert client.get('/api/health').status_code == 200
    response = client.get('/api/health')
    assert response.status_code == 429
    assert 'Rate limit' in response.get_json()['error']

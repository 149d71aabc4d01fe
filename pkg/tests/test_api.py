import inspect

import pytest
from fastapi.testclient import TestClient
from unittest.mock import patch
from datetime import datetime

from src.api import main as api
from src.api.main import app

client = TestClient(app)


@pytest.fixture
def served(make_network):
    """Serve a small 1107-vertex network instead of reading one from disk"""
    net = make_network({(0, 1): 3, (1, 0): 1, (1, 2): 2, (2, 0): 1, (5, 5): 1},
                       1107, vertex_counts=[4, 6, 2] + [0, 0, 1] + [0] * 1101, n_games=2)
    api.reset_network(net)
    yield net
    api.reset_network(None)


@pytest.fixture
def no_network(tmp_path):
    api.reset_network(None)
    with patch('src.api.main.NETWORK_PATH', str(tmp_path / "absent.json")):
        yield


@patch('src.api.main.Database')
def test_health_check_healthy(mock_db, served):
    """Health check with a loaded network and a recorded run"""
    mock_db.check_connection.return_value = True
    mock_db.last_run.return_value = {
        'id': 1, 'command': 'build', 'status': 'success',
        'started_at': datetime(2024, 1, 1, 12, 0), 'ended_at': datetime(2024, 1, 1, 12, 5),
        'duration_seconds': 300.0, 'n_games': 2, 'corpus_digest': 'abc', 'error_message': None,
    }

    response = client.get("/health")
    assert response.status_code == 200
    data = response.json()
    assert data['status'] == 'healthy'
    assert data['network_loaded'] is True
    assert data['last_run']['command'] == 'build'


@patch('src.api.main.Database')
def test_health_check_without_network(mock_db, no_network):
    mock_db.check_connection.return_value = False

    response = client.get("/health")
    assert response.status_code == 200
    data = response.json()
    assert data['status'] == 'degraded'
    assert data['network_loaded'] is False
    assert data['ledger_connected'] is False
    assert data['last_run'] is None


def test_network_unavailable_is_503(no_network):
    assert client.get("/network").status_code == 503


def test_network_summary(served):
    response = client.get("/network")
    assert response.status_code == 200
    data = response.json()
    assert data['n_vertices'] == 1107
    assert data['n_edges'] == 5
    assert data['total_weight'] == 8
    assert data['total_moves'] == 13
    assert data['d'] == 4


def test_get_plaquette(served):
    response = client.get("/plaquettes/1")
    assert response.status_code == 200
    data = response.json()
    assert data['frequency'] == 6
    assert data['frequency_rank'] == 1
    assert len(data['diagram']) == 3


def test_empty_interior_plaquette(served):
    data = client.get("/plaquettes/0").json()
    assert data['geometry'] == 'interior'
    assert data['diagram'] == ["...", ".+.", "..."]
    assert data['frequency_rank'] == 2


def test_unseen_plaquette_has_no_rank(served):
    data = client.get("/plaquettes/1000").json()
    assert data['frequency'] == 0
    assert data['frequency_rank'] is None


def test_plaquette_out_of_range(served):
    assert client.get("/plaquettes/1107").status_code == 404
    assert client.get("/plaquettes/-1").status_code == 404


def test_pagerank_endpoint(served):
    response = client.get("/rank/pagerank?top=3&alpha=0.85")
    assert response.status_code == 200
    data = response.json()
    assert data['algorithm'] == 'pagerank'
    assert data['alpha'] == 0.85
    assert [e['rank'] for e in data['entries']] == [1, 2, 3]
    values = [e['value'] for e in data['entries']]
    assert values == sorted(values, reverse=True)


def test_hits_endpoints(served):
    hubs = client.get("/rank/hubs?top=1").json()
    authorities = client.get("/rank/authorities?top=1").json()
    assert hubs['alpha'] is None
    assert hubs['entries'][0]['class_id'] in (0, 1, 2, 5)
    assert authorities['entries'][0]['class_id'] in (0, 1, 2, 5)


def test_unknown_algorithm(served):
    assert client.get("/rank/sortrank").status_code == 404


def test_bad_alpha_rejected(served):
    assert client.get("/rank/pagerank?alpha=0").status_code == 422


def test_zipf_endpoint(served):
    response = client.get("/stats/zipf?top=2")
    assert response.status_code == 200
    data = response.json()
    assert data['n_classes_seen'] == 4
    assert [e['class_id'] for e in data['top']] == [1, 0]
    assert data['fit']['n_points'] == 4


def test_zipf_bad_range(served):
    assert client.get("/stats/zipf?fit_min=10&fit_max=5").status_code == 422


def test_root_endpoint():
    response = client.get("/")
    assert response.status_code == 200
    data = response.json()
    assert data['message'] == "Go Move Network API"
    assert "GET /rank/{alg}" in data['endpoints']


@pytest.mark.parametrize("endpoint", [
    api.health_check, api.network_summary, api.get_plaquette, api.get_ranking, api.get_zipf,
])
def test_compute_endpoints_run_in_threadpool(endpoint):
    # plain def handlers are dispatched to the threadpool, keeping the event loop free
    assert not inspect.iscoroutinefunction(endpoint)

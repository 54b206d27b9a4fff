"""
Tests for the run ledger.
"""
import json

from core.run_ledger import Report, RunLedger


def _lines(ledger):
    for handler in ledger.logger.handlers:
        handler.flush()
    return [line for line in ledger.log_file.read_text().splitlines() if line]


def test_event_hash_verifies(ledger):
    event = ledger.log_event('TEST', {'value': 1})
    assert len(event['hash']) == 64
    assert RunLedger.verify(event)


def test_tampering_is_detected(ledger):
    event = ledger.log_event('TEST', {'value': 1})
    event['data']['value'] = 2
    assert not RunLedger.verify(event)


def test_event_written_as_json_line(ledger):
    ledger.log_event('TEST', {'value': 1})
    logged = json.loads(_lines(ledger)[-1].split(' | ', 2)[2])
    assert logged['event'] == 'TEST'
    assert RunLedger.verify(logged)


def test_report_keeps_digest_not_payload(ledger):
    report = Report(['null-check', 'square.json', 'loop.json', '--scale', '1.2'],
                    {'space': 'ab' * 32}, {'status': 'nonnull'}, 0, 0.01)
    event = ledger.log_report(report)
    assert event['event'] == 'RUN'
    assert 'payload' not in event['data']
    assert event['data']['payload_sha256'] == report.payload_digest()
    assert event['data']['exit_code'] == 0


def test_payload_digest_ignores_key_order():
    a = Report(['x'], payload={'a': 1, 'b': 2})
    b = Report(['x'], payload={'b': 2, 'a': 1})
    assert a.payload_digest() == b.payload_digest()


def test_api_request(ledger):
    ledger.log_api_request('components', 200)
    logged = json.loads(_lines(ledger)[-1].split(' | ', 2)[2])
    assert logged['event'] == 'API_REQUEST'
    assert logged['data'] == {'endpoint': 'components', 'status': 200, 'client_ip': '127.0.0.1'}

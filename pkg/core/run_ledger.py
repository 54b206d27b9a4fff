"""
Run ledger - one JSON line per CLI or API run.
Each line carries a hash of its own content so replays can be checked.
"""
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List
import hashlib
import json
import logging


@dataclass
class Report:
    """Command echo, input digests, payload and timing of one run."""
    command: List[str]
    inputs: Dict[str, str] = field(default_factory=dict)
    payload: Any = None
    exit_code: int = 0
    seconds: float = 0.0

    def payload_digest(self) -> str:
        return hashlib.sha256(json.dumps(self.payload, sort_keys=True).encode()).hexdigest()


class RunLedger:
    """
    Append-only log of runs.
    """

    def __init__(self, log_dir: Path):
        self.log_dir = log_dir
        self.log_dir.mkdir(parents=True, exist_ok=True, mode=0o700)

        # Separate log file per day
        self.log_file = self.log_dir / f"runs_{datetime.now().strftime('%Y%m%d')}.log"

        self.logger = logging.getLogger('epsnet.runs')
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False
        if not any(getattr(h, 'baseFilename', None) == str(self.log_file.resolve())
                   for h in self.logger.handlers):
            handler = logging.FileHandler(self.log_file, mode='a')
            handler.setFormatter(logging.Formatter(
                '%(asctime)s | %(levelname)s | %(message)s',
                datefmt='%Y-%m-%d %H:%M:%S UTC'
            ))
            self.logger.addHandler(handler)

    def log_event(self, event_type: str, data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Append one event.

        Args:
            event_type: Event classification
            data: Event details, JSON-serializable

        Returns:
            The event as written, including its hash
        """
        event = {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'event': event_type,
            'data': data
        }
        event_json = json.dumps(event, sort_keys=True)
        event['hash'] = hashlib.sha256(event_json.encode()).hexdigest()

        self.logger.info(json.dumps(event, sort_keys=True))
        return event

    def log_report(self, report: Report) -> Dict[str, Any]:
        data = asdict(report)
        data.pop('payload')
        data['payload_sha256'] = report.payload_digest()
        return self.log_event('RUN', data)

    def log_api_request(self, endpoint: str, status: int, ip: str = '127.0.0.1'):
        self.log_event('API_REQUEST', {
            'endpoint': endpoint,
            'status': status,
            'client_ip': ip
        })

    @staticmethod
    def verify(event: Dict[str, Any]) -> bool:
        """Recompute an event's hash."""
        body = {k: v for k, v in event.items() if k != 'hash'}
        digest = hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()
        return digest == event.get('hash')

"""
JSON persistence for spaces, chains, homotopies, towers and results.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional, Union
import hashlib
import json
import logging

import numpy as np

from .chains import Chain, Homotopy, Insert, Remove
from .covering import CoveringGraph, LiftResult
from .errors import EpsnetError, SchemaError
from .metric_space import FiniteMetricSpace, build_space, graph_metric_space
from .nullity import NullVerdict
from .towers import GrefCertificate, RefiningResult, Tower, TowerCheck

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

def space_to_dict(space: FiniteMetricSpace) -> Dict[str, Any]:
    out: Dict[str, Any] = {'dist': space.dist.tolist(), 'geodesic': space.geodesic_flag}
    if space.labels:
        out['labels'] = list(space.labels)
    return out


def space_from_dict(data: Dict[str, Any]) -> FiniteMetricSpace:
    """Either a distance matrix under 'dist' or a weighted graph {'n', 'edges'} under 'graph'."""
    if not isinstance(data, dict):
        raise SchemaError("a space must be a JSON object")
    labels = data.get('labels')
    if 'dist' in data:
        return build_space(data['dist'], labels=labels, geodesic_flag=bool(data.get('geodesic', False)))
    graph = data.get('graph')
    if isinstance(graph, dict) and {'n', 'edges'} <= set(graph):
        try:
            edges = [(int(i), int(j), float(w)) for i, j, w in graph['edges']]
        except (TypeError, ValueError) as e:
            raise SchemaError(f"edges must be [i, j, weight] triples: {e}")
        return graph_metric_space(int(graph['n']), edges, labels=labels)
    raise SchemaError("a space needs 'dist', or a 'graph' with 'n' and 'edges'")


def chain_to_dict(chain: Chain) -> Dict[str, Any]:
    return {'scale': chain.scale, 'points': list(chain.points)}


def chain_from_dict(data: Dict[str, Any], scale: Optional[float] = None) -> Chain:
    """`scale` overrides the file's scale; one of the two must be present."""
    if not isinstance(data, dict) or 'points' not in data:
        raise SchemaError("a chain needs 'points'")
    scale = scale if scale is not None else data.get('scale')
    if scale is None:
        raise SchemaError("a chain needs a scale")
    return Chain(float(scale), tuple(int(p) for p in data['points']))


def move_to_dict(move) -> Dict[str, Any]:
    if isinstance(move, Insert):
        return {'op': 'ins', 'pos': move.pos, 'pt': move.point}
    return {'op': 'rem', 'pos': move.pos}


def move_from_dict(data: Dict[str, Any]):
    op = data.get('op')
    if op == 'ins':
        return Insert(int(data['pos']), int(data['pt']))
    if op == 'rem':
        return Remove(int(data['pos']))
    raise SchemaError(f"unknown move op {op!r}")


def homotopy_to_dict(homotopy: Homotopy) -> Dict[str, Any]:
    return {'start': chain_to_dict(homotopy.start), 'moves': [move_to_dict(m) for m in homotopy.moves]}


def homotopy_from_dict(data: Dict[str, Any], scale: Optional[float] = None) -> Homotopy:
    if not isinstance(data, dict) or 'start' not in data:
        raise SchemaError("a homotopy needs 'start'")
    try:
        moves = tuple(move_from_dict(m) for m in data.get('moves', []))
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"malformed move: {e}")
    return Homotopy(chain_from_dict(data['start'], scale), moves)


def tower_to_dict(tower: Tower) -> Dict[str, Any]:
    return {
        'indices': list(tower.indices),
        'stages': [space_to_dict(s) for s in tower.stages],
        'bonds': [b.tolist() for b in tower.bonds],
    }


def tower_from_dict(data: Dict[str, Any]) -> Tower:
    if not isinstance(data, dict) or not {'indices', 'stages', 'bonds'} <= set(data):
        raise SchemaError("a tower needs 'indices', 'stages' and 'bonds'")
    stages = tuple(space_from_dict(s) for s in data['stages'])
    return Tower(tuple(data['indices']), stages, tuple(np.asarray(b) for b in data['bonds']))


def verdict_to_dict(verdict: NullVerdict) -> Dict[str, Any]:
    return {
        'status': verdict.status,
        'stage': verdict.stage,
        'budget_spent': verdict.budget_spent,
        'witness': homotopy_to_dict(verdict.witness) if verdict.witness else None,
        'certificate': list(verdict.certificate) if verdict.certificate is not None else None,
    }


def cover_to_dict(cover: CoveringGraph) -> Dict[str, Any]:
    return {
        'scale': cover.scale,
        'status': cover.status,
        'radius': cover.radius,
        'group_order': cover.group_order,
        'basepoint': cover.basepoint,
        'vertices': [list(v) for v in cover.vertices],
        'fibers': {str(x): k for x, k in sorted(cover.fibers().items())},
        'edges': [list(e) for e in cover.edges()],
    }


def lift_to_dict(cover: CoveringGraph, lift: LiftResult) -> Dict[str, Any]:
    return {
        'vertices': list(lift.vertices),
        'classes': [list(cover.vertices[v]) for v in lift.vertices],
        'final': lift.final,
        'closed': lift.final == lift.vertices[0],
    }


def tower_check_to_dict(check: TowerCheck) -> Dict[str, Any]:
    return {
        'ok': check.ok,
        'stages': list(check.stages) if check.stages else None,
        'reason': check.reason,
        'points': list(check.points),
    }


def refining_to_dict(result: RefiningResult) -> Dict[str, Any]:
    return {
        'status': result.status,
        'r': result.r, 't': result.t,
        'eps': result.eps, 'delta': result.delta, 'kappa': result.kappa,
        'pairs': result.pairs,
        'nonnull': result.nonnull,
        'counterexample': list(result.counterexample) if result.counterexample else None,
        'undecided': [list(q) for q in result.undecided],
        'witnesses': [{'from': x, 'to': y, 'points': list(c.points)}
                      for (x, y), c in sorted(result.witnesses.items())],
    }


def gref_to_dict(cert: GrefCertificate) -> Dict[str, Any]:
    return {
        'status': cert.status,
        'eps': cert.eps,
        'preimage_diameter': cert.preimage_diameter,
        'delta': cert.delta,
        'reason': cert.reason,
        'kappa_floor': cert.kappa_floor,
    }


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------

def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'


def load_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"file not found: {path}")
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        logger.error("Failed to parse %s: %s", path, e)
        raise SchemaError(f"{path}: {e}")


def save_json(path: Union[str, Path], payload: Any):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(payload))
    logger.info("Wrote %s", path)


def load_space(path: Union[str, Path]) -> FiniteMetricSpace:
    return space_from_dict(load_json(path))


def load_tower(path: Union[str, Path]) -> Tower:
    return tower_from_dict(load_json(path))


def load_chain(path: Union[str, Path], scale: Optional[float] = None) -> Chain:
    return chain_from_dict(load_json(path), scale)


def load_homotopy(path: Union[str, Path], scale: Optional[float] = None) -> Homotopy:
    return homotopy_from_dict(load_json(path), scale)


def digest_file(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# Named fixtures
# ---------------------------------------------------------------------------

class FixtureStore:
    """
    Named spaces and towers under DATA_DIR/fixtures.
    """

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.fixtures_dir = data_dir / 'fixtures'
        self.fixtures_dir.mkdir(parents=True, exist_ok=True, mode=0o700)

    def path(self, name: str) -> Path:
        if not name or '/' in name or name.startswith('.'):
            raise SchemaError(f"invalid fixture name {name!r}")
        return self.fixtures_dir / f"{name}.json"

    def save(self, name: str, obj: Union[FiniteMetricSpace, Tower]) -> Path:
        payload = tower_to_dict(obj) if isinstance(obj, Tower) else space_to_dict(obj)
        path = self.path(name)
        save_json(path, payload)
        logger.info("Saved fixture: %s", name)
        return path

    def load(self, name: str) -> Union[FiniteMetricSpace, Tower]:
        data = load_json(self.path(name))
        if isinstance(data, dict) and 'stages' in data:
            return tower_from_dict(data)
        return space_from_dict(data)

    def list(self) -> List[str]:
        names = []
        for path in sorted(self.fixtures_dir.glob('*.json')):
            try:
                load_json(path)
                names.append(path.stem)
            except EpsnetError as e:
                logger.error("Failed to load %s: %s", path, e)
        return names

    def delete(self, name: str):
        path = self.path(name)
        if path.exists():
            path.unlink()
            logger.info("Deleted fixture: %s", name)

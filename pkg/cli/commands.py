"""
Command-line surface: one subcommand per operation.

Exit codes: 0 definite result, 1 input or usage error, 2 Unknown or
Undecided. Reports go to stdout or --out; logs go to stderr and LOGS_DIR.
"""
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple
import argparse
import csv
import io
import logging
import sys
import time

from config import (
    DATA_DIR, DEFAULT_BASEPOINT, DEFAULT_SEED, LOCAL_HOST, LOCAL_PORT, RUNS_DIR, VERSION, ensure_dirs,
)
from core.covering import build_cover, lift_chain
from core.errors import EpsnetError, SchemaError
from core.fixtures import FixtureSpec, generate, parse_params
from core.metric_space import (
    ball_chain_components, chain_components, connectivity_threshold,
)
from core.nullity import EXHAUSTED, UNKNOWN, HomotopyOracle, is_null
from core.run_ledger import Report, RunLedger
from core.scan_runner import ScanRunner
from core.spectrum import critical_spectrum
from core import storage
from core.towers import (
    UNDECIDED, Tower, check_refining, gref_certificate, invlim_scan, preimage_diameter,
    validate_tower,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNDECIDED = 2

Outcome = Tuple[object, int]


class UsageError(EpsnetError):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(message)


def _csv(rows: List[List[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator='\n').writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------

def cmd_fixture(args) -> Outcome:
    obj = generate(FixtureSpec(args.kind, parse_params(args.params), args.seed))
    if args.save:
        storage.FixtureStore(DATA_DIR).save(args.save, obj)
    if isinstance(obj, Tower):
        return storage.tower_to_dict(obj), EXIT_OK
    return storage.space_to_dict(obj), EXIT_OK


def cmd_components(args) -> Outcome:
    space = storage.load_space(args.space)
    if args.center is not None:
        members, part = ball_chain_components(space, args.center, args.scale, args.kappa or args.scale)
        groups = [[members[i] for i in g] for g in part.groups().values()]
        return {'center': args.center, 'scale': args.scale, 'kappa': args.kappa or args.scale,
                'count': part.count, 'components': groups}, EXIT_OK
    part = chain_components(space, args.scale)
    return {
        'scale': args.scale,
        'count': part.count,
        'representative': list(part.representative),
        'threshold': connectivity_threshold(space),
    }, EXIT_OK


def cmd_spectrum(args) -> Outcome:
    space = storage.load_space(args.space)
    spectrum = critical_spectrum(space, args.basepoint, ScanRunner(args.jobs))
    return spectrum.to_csv(), EXIT_OK


def cmd_null_check(args) -> Outcome:
    space = storage.load_space(args.space)
    loop = storage.load_chain(args.loop, args.scale)
    verdict = is_null(space, args.scale, loop, budget=args.budget)
    code = EXIT_UNDECIDED if verdict.status == UNKNOWN else EXIT_OK
    return storage.verdict_to_dict(verdict), code


def cmd_oracle(args) -> Outcome:
    space = storage.load_space(args.space)
    loop = storage.load_chain(args.loop, args.scale)
    oracle = HomotopyOracle(space, args.scale, max_chain_len=args.max_len)
    if args.budget:
        oracle.max_states = args.budget
    status = oracle.query(loop)
    code = EXIT_UNDECIDED if status == EXHAUSTED else EXIT_OK
    return {'status': status, 'max_chain_len': args.max_len}, code


def cmd_cover(args) -> Outcome:
    space = storage.load_space(args.space)
    cover = build_cover(space, args.scale, args.basepoint, budget=args.budget, radius=args.truncate)
    return storage.cover_to_dict(cover), EXIT_OK


def cmd_lift(args) -> Outcome:
    space = storage.load_space(args.space)
    chain = storage.load_chain(args.chain, args.scale)
    cover = build_cover(space, args.scale, args.basepoint, budget=args.budget, radius=args.truncate)
    key = (chain.start, args.coset)
    if key not in cover.index:
        raise SchemaError(f"no cover vertex over point {chain.start} with coset {args.coset}")
    lift = lift_chain(cover, chain, cover.index[key])
    return storage.lift_to_dict(cover, lift), EXIT_OK


def cmd_tower_validate(args) -> Outcome:
    tower = storage.load_tower(args.tower)
    check = validate_tower(tower)
    payload = storage.tower_check_to_dict(check)
    payload['stages_points'] = [s.n for s in tower.stages]
    if check.ok:
        payload['preimage_diameters'] = [preimage_diameter(tower, i, i + 1) for i in range(tower.depth)]
    return payload, EXIT_OK


def cmd_refine_check(args) -> Outcome:
    tower = storage.load_tower(args.tower)
    delta = args.delta if args.delta is not None else args.eps / 2
    kappa = args.kappa if args.kappa is not None else delta
    cert = gref_certificate(tower, args.r, args.t, args.eps)
    result = check_refining(tower, args.r, args.t, args.eps, delta, kappa, budget=args.budget)
    payload = storage.refining_to_dict(result)
    payload['gref'] = storage.gref_to_dict(cert)
    return payload, EXIT_UNDECIDED if result.status == UNDECIDED else EXIT_OK


def cmd_invlim_scan(args) -> Outcome:
    tower = storage.load_tower(args.tower)
    grid = [float(v) for v in args.eps_grid.split(',') if v.strip()]
    if not grid:
        raise UsageError("--eps-grid needs at least one scale")
    report = invlim_scan(tower, grid, args.kappa, budget=args.budget, runner=ScanRunner(args.jobs))
    for eps, verdict in report.summary.items():
        logger.info("eps=%s: %s on the sampled grid", eps, verdict)
    code = EXIT_UNDECIDED if UNDECIDED in report.summary.values() else EXIT_OK
    return _csv(report.to_rows()), code


def cmd_serve(args) -> Outcome:
    from server.local_server import initialize_server, run_server
    initialize_server(RunLedger(RUNS_DIR))
    logger.info("Local API on http://%s:%d", args.host, args.port)
    run_server(args.host, args.port)
    return None, EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--out', type=Path, help='write the report here instead of stdout')
    common.add_argument('--seed', type=int, default=DEFAULT_SEED)
    common.add_argument('--budget', type=int, default=None, help='search budget of the command')
    common.add_argument('--jobs', type=int, default=1, help='threads for independent scan cells')
    common.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR')

    parser = _Parser(prog='epsnet', description='Discrete homotopy on finite metric spaces')
    parser.add_argument('--version', action='version', version=f'epsnet {VERSION}')
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)

    def add(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add('fixture', cmd_fixture, 'generate a space or tower')
    p.add_argument('kind')
    p.add_argument('params', nargs='*', help='key=value parameters')
    p.add_argument('-o', dest='out', type=Path)
    p.add_argument('--save', help='also store under this name in the data directory')

    p = add('components', cmd_components, 'chain components at a scale')
    p.add_argument('space')
    p.add_argument('--scale', type=float, required=True)
    p.add_argument('--center', type=int, help='restrict to the open ball around this point')
    p.add_argument('--kappa', type=float, help='fineness inside the ball')

    p = add('spectrum', cmd_spectrum, 'homotopy critical spectrum as CSV')
    p.add_argument('space')
    p.add_argument('--basepoint', type=int, default=DEFAULT_BASEPOINT)

    for name, handler in (('null-check', cmd_null_check), ('oracle', cmd_oracle)):
        p = add(name, handler, 'decide nullity of a loop' if name == 'null-check' else 'brute-force nullity')
        p.add_argument('space')
        p.add_argument('loop')
        p.add_argument('--scale', type=float, required=True)
        if name == 'oracle':
            p.add_argument('--max-len', type=int, default=8)

    for name, handler in (('cover', cmd_cover), ('lift', cmd_lift)):
        p = add(name, handler, 'build the eps-cover' if name == 'cover' else 'lift a chain to the cover')
        p.add_argument('space')
        if name == 'lift':
            p.add_argument('chain')
            p.add_argument('--coset', type=int, default=0)
        p.add_argument('--scale', type=float, required=True)
        p.add_argument('--basepoint', type=int, default=DEFAULT_BASEPOINT)
        p.add_argument('--truncate', type=int, default=None, help='deck radius of truncated covers')

    p = add('tower-validate', cmd_tower_validate, 'check bonds of a tower')
    p.add_argument('tower')

    p = add('refine-check', cmd_refine_check, 'test a composed bond for refining')
    p.add_argument('tower')
    p.add_argument('--r', type=int, required=True)
    p.add_argument('--t', type=int, required=True)
    p.add_argument('--eps', type=float, required=True)
    p.add_argument('--delta', type=float)
    p.add_argument('--kappa', type=float)

    p = add('invlim-scan', cmd_invlim_scan, 'refining pattern over stage pairs and scales')
    p.add_argument('tower')
    p.add_argument('--eps-grid', required=True, help='comma-separated scales')
    p.add_argument('--kappa', type=float)

    p = add('serve', cmd_serve, 'run the local JSON API')
    p.add_argument('--host', default=LOCAL_HOST)
    p.add_argument('--port', type=int, default=LOCAL_PORT)
    return parser


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _input_digests(args) -> Dict[str, str]:
    digests = {}
    for name in ('space', 'loop', 'chain', 'tower'):
        path = getattr(args, name, None)
        if path and Path(path).exists():
            digests[name] = storage.digest_file(path)
    return digests


def _emit(payload, out: Optional[Path]):
    text = payload if isinstance(payload, str) else storage.dumps(payload)
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        logger.info("Report written to %s", out)
    else:
        sys.stdout.write(text)


def run(argv: Optional[List[str]] = None, ledger: Optional[RunLedger] = None) -> int:
    """
    Parse argv, run one subcommand and write its report.

    Returns:
        exit code
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        logger.error("Usage: %s", e)
        sys.stderr.write(f"epsnet: error: {e}\n")
        return EXIT_INPUT
    if getattr(args, 'handler', None) is None:
        sys.stderr.write("epsnet: error: a subcommand is required\n")
        return EXIT_INPUT
    if args.log_level:
        logging.getLogger().setLevel(args.log_level.upper())

    logger.info("=" * 70)
    logger.info("epsnet %s: %s", VERSION, ' '.join(argv))
    logger.info("=" * 70)

    started = time.perf_counter()
    try:
        payload, code = args.handler(args)
    except EpsnetError as e:
        logger.error("%s: %s", type(e).__name__, e)
        sys.stderr.write(f"epsnet: {type(e).__name__}: {e}\n")
        payload, code = {'error': str(e), 'type': type(e).__name__}, EXIT_INPUT
    else:
        if payload is not None:
            _emit(payload, args.out)
    seconds = time.perf_counter() - started

    if args.command != 'serve':
        if ledger is None:
            ensure_dirs()
            ledger = RunLedger(RUNS_DIR)
        ledger.log_report(Report(argv, _input_digests(args), payload, code, round(seconds, 6)))
    logger.info("Finished with exit code %d in %.3f s", code, seconds)
    return code

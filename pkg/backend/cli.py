"""
branegeo command line
Builtin catalog, identity verification, grid reports and Killing-field surveys
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

sys.path.insert(0, str(Path(__file__).parent))

from models.records import KillingSample, KillingSurvey, ReportTable, Tolerance, VerifyReport
from services.catalog_service import catalog
from services.expression_service import MAX_ORDER, parse_expression
from services.killing_service import KillingField, survey_field
from services.manifest_service import resolve_target
from services.report_service import FORMATS, parse_quantities, run_report
from services.verification_service import run_verify
from utils.config import get_settings
from utils.errors import BranegeoError, InsufficientJetOrder
from utils.logger import get_logger
from utils.sampling import grid_points, random_points

logger = get_logger('cli')

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_ORDER = 3

SCHEMAS = {
    'verify': VerifyReport,
    'report': ReportTable,
    'killing': KillingSurvey,
}


def _add_target(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--manifold', help='builtin manifold name (see `branegeo examples`)')
    group.add_argument('--manifest', help='path to a manifest file')
    parser.add_argument('--radius', type=float, help='sphere radius')
    parser.add_argument('--R', dest='R', type=float, help='torus center radius')
    parser.add_argument('--r', dest='r', type=float, help='torus tube radius')
    parser.add_argument('--order', type=int, choices=range(MAX_ORDER + 1), metavar='K',
                        help=f'jet order K (0..{MAX_ORDER})')


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog='branegeo', description='Clifford-bundle submanifold geometry engine')
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('examples', help='list the builtin manifolds')

    verify = sub.add_parser('verify', help='run the identity suite at sampled points')
    _add_target(verify)
    verify.add_argument('--samples', type=int, help=f'number of points (default {settings.samples})')
    verify.add_argument('--seed', type=int, help=f'sampling seed (default {settings.seed})')
    verify.add_argument('--tol', type=float, help='absolute and relative tolerance')
    verify.add_argument('--json', dest='json_out', help="write the JSON report to FILE ('-' for stdout)")
    verify.add_argument('--workers', type=int, help=f'worker processes (default {settings.workers})')

    report = sub.add_parser('report', help='tabulate quantities on a grid')
    _add_target(report)
    report.add_argument('--grid', required=True, help='grid spec such as 32x32')
    report.add_argument('--quantities', default='scalar',
                        help='comma list of metric, shape, curvature, ricci, scalar, hills')
    report.add_argument('--format', dest='fmt', choices=FORMATS, default='csv')
    report.add_argument('--out', help='output file (stdout when omitted)')

    killing = sub.add_parser('killing', help='Killing and Maxwell residuals of one vector field')
    _add_target(killing)
    killing.add_argument('--field', required=True,
                         help="builtin field name or comma-separated components X^i in chart parameters")
    killing.add_argument('--samples', type=int, default=8)
    killing.add_argument('--seed', type=int, help=f'sampling seed (default {settings.seed})')

    schema = sub.add_parser('schema', help='print the JSON schema of an output document')
    schema.add_argument('--kind', choices=sorted(SCHEMAS), default='verify')
    return parser


def _constants(args) -> dict:
    values = {'R': args.R, 'r': args.radius if args.radius is not None else args.r}
    return {k: v for k, v in values.items() if v is not None}


def _resolve(args):
    if args.manifold:
        return resolve_target(manifold=args.manifold, constants=_constants(args))
    return resolve_target(manifest_path=args.manifest)


def _emit(text: str, path: Optional[str]):
    if path and path != '-':
        Path(path).write_text(text, encoding='utf-8')
    else:
        sys.stdout.write(text)


def cmd_examples(args) -> int:
    for entry in catalog.describe():
        fields = ','.join(entry['killing']) or '-'
        controls = ','.join(entry['controls']) or '-'
        sys.stdout.write(f"{entry['name']:<16} {entry['signature']:<9} params={','.join(entry['params'])} "
                         f"killing={fields} controls={controls}\n")
        sys.stdout.write(f"{'':<16} {entry['description']}\n")
    return EXIT_PASS


def cmd_verify(args) -> int:
    settings = get_settings()
    chart, sampling = _resolve(args)
    tol = args.tol
    tolerance = Tolerance(abs_tol=tol, rel_tol=tol) if tol else Tolerance(abs_tol=settings.abs_tol,
                                                                           rel_tol=settings.rel_tol)
    samples = args.samples or (sampling.count if sampling else settings.samples)
    seed = args.seed if args.seed is not None else (
        sampling.seed if sampling and sampling.seed is not None else settings.seed)
    points = None
    if sampling and sampling.mode == 'grid' and sampling.grid and args.samples is None:
        points = list(grid_points(chart.domain, sampling.grid))
    order = args.order if args.order is not None else settings.jet_order
    workers = args.workers or settings.workers
    report = run_verify(chart, samples, seed, tolerance, order, settings.gram_tol, settings.fd_step,
                        target=chart.name, points=points, workers=workers)
    if args.json_out:
        _emit(report.model_dump_json(indent=2) + '\n', args.json_out)
    if args.json_out != '-':
        for record in report.checks:
            if record.status != 'pass':
                sys.stdout.write(f"{record.status.upper():<18} {record.name} at {record.point} "
                                 f"{record.method} {record.detail}\n")
        for entry in report.sign_ledger:
            if entry.literal != entry.expected and entry.literal_residual is not None:
                sys.stdout.write(f"SIGN {entry.relation}: holds with {entry.expected:+d}, "
                                 f"quoted with {entry.literal:+d} (residual {entry.literal_residual:.3g})\n")
        summary = ' '.join(f"{k}={v}" for k, v in report.summary.items())
        sys.stdout.write(f"{report.target}: {summary} exit={report.exit_code}\n")
    return report.exit_code


def cmd_report(args) -> int:
    settings = get_settings()
    chart, _ = _resolve(args)
    order = args.order if args.order is not None else settings.jet_order
    quantities = parse_quantities(args.quantities)
    _, text = run_report(chart, args.grid, quantities, args.fmt, order, settings.gram_tol, chart.name)
    _emit(text, args.out)
    return EXIT_PASS


def _field_from_flag(chart, text: str) -> KillingField:
    found = catalog.find_field(chart, text)
    if found is not None:
        return found
    parts = [p.strip() for p in text.split(',')]
    if len(parts) != chart.m:
        raise ValueError(f"Field '{text}' is neither a known field nor {chart.m} component expressions")
    return KillingField('custom', [parse_expression(p, chart.params) for p in parts])


def cmd_killing(args) -> int:
    settings = get_settings()
    chart, _ = _resolve(args)
    field_ = _field_from_flag(chart, args.field)
    seed = args.seed if args.seed is not None else settings.seed
    order = args.order if args.order is not None else settings.jet_order
    points = random_points(chart.domain, args.samples, seed)
    rows = [KillingSample(**row) for row in survey_field(chart, field_, points, order, settings.gram_tol)]
    survey = KillingSurvey(target=chart.name, field=field_.name, control=field_.control, seed=seed,
                           killing=all(r.precondition is None for r in rows), points=rows)
    sys.stdout.write(json.dumps(survey.model_dump(mode='json'), indent=2, sort_keys=True) + '\n')
    return EXIT_PASS if survey.killing else EXIT_FAILURE


def cmd_schema(args) -> int:
    sys.stdout.write(json.dumps(SCHEMAS[args.kind].model_json_schema(), indent=2, sort_keys=True) + '\n')
    return EXIT_PASS


COMMANDS = {
    'examples': cmd_examples,
    'verify': cmd_verify,
    'report': cmd_report,
    'killing': cmd_killing,
    'schema': cmd_schema,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InsufficientJetOrder as e:
        logger.error(f"✗ {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_ORDER
    except (BranegeoError, KeyError, ValueError, OSError) as e:
        message = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        logger.error(f"✗ {message}")
        sys.stderr.write(f"error: {message}\n")
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())

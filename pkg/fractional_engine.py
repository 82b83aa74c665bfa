"""
Fractional Fit Engine - Main Application Launcher
Fit classical and fractional-order models to observed series and compare them
"""
import sys
import os
import argparse
import json
import logging
from pathlib import Path

# Add current directory to path for imports
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config import FractionalConfig
from core.errors import FractionalEngineError
from dataio.bundled import list_datasets, resolve_dataset
from dataio.timeseries import to_csv_text
from models.registry import MODEL_PAIRS, list_models
from service.fit_service import (
    FitService,
    parse_bounds,
    parse_params,
    parse_range,
    print_compare_summary,
    print_fit_summary,
    resolve_report_dataset,
    setup_logging,
    write_json,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

CURVE_SAMPLES = 101

# flags whose value may itself start with a minus sign (negative parameters or times)
VALUE_FLAGS = ('--params', '--classical-params', '--range')

logger = logging.getLogger('FractionalEngine')


class EngineArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with EXIT_ERROR; exit code 2 is reserved for fits that did not converge"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _attach_values(argv):
    """Join `--params -5,0.01` into `--params=-5,0.01` so the value is not read as an option"""
    merged = []
    for token in argv:
        if merged and merged[-1] in VALUE_FLAGS and token.startswith('-'):
            merged[-1] = f"{merged[-1]}={token}"
        else:
            merged.append(token)
    return merged


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--starts', type=int, default=FractionalConfig.DEFAULT_STARTS,
                        help=f'Number of multistart points (default: {FractionalConfig.DEFAULT_STARTS})')
    parser.add_argument('--seed', type=int, default=FractionalConfig.DEFAULT_SEED,
                        help='Seed for the Latin-hypercube start points')
    parser.add_argument('--bounds', action='append', default=[], metavar='NAME:LO:HI',
                        help='Override the box of one parameter (repeatable)')


def build_parser() -> argparse.ArgumentParser:
    common = EngineArgumentParser(add_help=False)
    common.add_argument('--series-order', type=int, default=None,
                        help=f'Double-series truncation order (default: {FractionalConfig.DOUBLE_SERIES_ORDER})')
    common.add_argument('--log-file', help='Also write the log to this file')
    common.add_argument('--verbose', '-v', action='count', default=0, help='-v for INFO, -vv for DEBUG logging')

    parser = EngineArgumentParser(
        prog='fractional_engine',
        description='Fractional Fit Engine - classical vs fractional-order model fitting',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    fit = sub.add_parser('fit', help='Fit one model to a dataset', parents=[common])
    fit.add_argument('model', choices=list_models())
    fit.add_argument('data', help='bundled:<name> or a path to a t,value CSV file')
    _add_solver_flags(fit)
    fit.add_argument('--out', help='Write the JSON report here')

    ev = sub.add_parser('eval', help='Sample a model curve as t,value CSV', parents=[common])
    ev.add_argument('model', choices=list_models())
    ev.add_argument('--params', required=True, help='Comma-separated parameter values')
    ev.add_argument('--range', required=True, dest='t_range', metavar='A:B', help='Time range a:b')
    ev.add_argument('--n', type=int, default=CURVE_SAMPLES, help=f'Number of samples (default: {CURVE_SAMPLES})')
    ev.add_argument('--out', help='Write the CSV here instead of standard output')

    cmp_ = sub.add_parser('compare', help='Fit a classical and a fractional model and report the efficiency gain', parents=[common])
    cmp_.add_argument('classical', help=f"Classical model, or a pair name ({', '.join(sorted(MODEL_PAIRS))})")
    cmp_.add_argument('fractional', nargs='?', help='Fractional model (omit when a pair name is given)')
    cmp_.add_argument('data', help='bundled:<name> or a path to a t,value CSV file')
    _add_solver_flags(cmp_)
    cmp_.add_argument('--classical-params', help='Evaluate the classical model at these parameters instead of fitting it')
    cmp_.add_argument('--curves', help='Write dense classical/fractional curves to this CSV')
    cmp_.add_argument('--out', help='Write the JSON report here')

    ver = sub.add_parser('verify', help='Recompute every number of a fit or compare report', parents=[common])
    ver.add_argument('report', help='Path to a JSON report')

    ds = sub.add_parser('datasets', help='Dataset utilities', parents=[common])
    ds_sub = ds.add_subparsers(dest='datasets_command', required=True)
    ds_sub.add_parser('list', help='List bundled and external datasets')
    return parser


def _resolve_pair(args) -> tuple:
    if args.fractional is None:
        if args.classical not in MODEL_PAIRS:
            raise FractionalEngineError(
                f"'{args.classical}' is not a model pair; give both models or one of {sorted(MODEL_PAIRS)}"
            )
        return MODEL_PAIRS[args.classical]
    return args.classical, args.fractional


def cmd_fit(args, service: FitService) -> int:
    data = resolve_dataset(args.data)
    report = service.fit(args.model, data)
    print_fit_summary(report)
    if args.out:
        write_json(report.to_dict(), args.out)
        print(f"💾 Report saved to {args.out}")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_eval(args, service: FitService) -> int:
    t_min, t_max = parse_range(args.t_range)
    rows = service.curve(args.model, parse_params(args.params), t_min, t_max, args.n)
    text = to_csv_text(rows)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding='utf-8')
        print(f"💾 {len(rows)} samples of {args.model} saved to {out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_compare(args, service: FitService) -> int:
    classical, fractional = _resolve_pair(args)
    data = resolve_dataset(args.data)
    baseline = parse_params(args.classical_params) if args.classical_params else None
    report = service.compare(classical, fractional, data, classical_params=baseline)
    print_compare_summary(report)
    if args.curves:
        service.export_curves(report, args.curves)
        print(f"💾 Curves saved to {args.curves}")
    if args.out:
        write_json(report.to_dict(), args.out)
        print(f"💾 Report saved to {args.out}")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_verify(args, service: FitService) -> int:
    payload = json.loads(Path(args.report).read_text(encoding='utf-8'))
    data = resolve_report_dataset(payload)
    problems = service.verify(payload, data)
    if problems:
        print(f"❌ {args.report} failed verification:")
        for problem in problems:
            print(f"   {problem}")
        return EXIT_ERROR
    print(f"✅ {args.report} verified: every value re-derived from its parameters")
    return EXIT_OK


def cmd_datasets(args, service: FitService) -> int:
    print("📂 Datasets")
    for entry in list_datasets():
        state = "available" if entry.available else f"missing ({entry.path})"
        print(f"   bundled:{entry.name:<15} {entry.status:<9} {entry.t_unit}/{entry.y_unit:<12} {state}")
    return EXIT_OK


COMMANDS = {
    'fit': cmd_fit,
    'eval': cmd_eval,
    'compare': cmd_compare,
    'verify': cmd_verify,
    'datasets': cmd_datasets,
}


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_attach_values(argv))
    except SystemExit as e:
        return EXIT_OK if e.code in (None, 0) else EXIT_ERROR

    level = {0: None, 1: 'INFO'}.get(args.verbose, 'DEBUG')
    setup_logging(level, args.log_file)

    try:
        service = FitService(
            starts=getattr(args, 'starts', FractionalConfig.DEFAULT_STARTS),
            seed=getattr(args, 'seed', FractionalConfig.DEFAULT_SEED),
            series_order=args.series_order,
            bounds=parse_bounds(getattr(args, 'bounds', [])),
        )
        return COMMANDS[args.command](args, service)
    except (FractionalEngineError, OSError, json.JSONDecodeError, KeyError) as e:
        logger.debug("command failed", exc_info=True)
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

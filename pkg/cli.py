#!/usr/bin/env python3
"""
calmetrics command line.

Commands:
    eval              metrics of a score file, optionally per group, with drift attribution
    curve             ROC / PR / PR-Gain curve as CSV
    oracle            undersampling estimate of a calibrated metric
    synth             two-Gaussian synthetic score file
    prior-sweep       metrics of the optimal scorer over a grid of class priors
    difficulty-sweep  metrics of the optimal scorer over a grid of KL divergences
    rankcorr          Spearman agreement between metrics over model pools

Artifacts go to stdout (or --output), diagnostics to stderr.
Exit codes: 0 success, 2 usage, 3 parse / I/O, 4 degenerate data, 5 invalid configuration.
"""
import argparse
import sys

import curves
import data_io
from calibration import attribute_drift, evaluate, evaluate_groups
from config import DEFAULT_KL_GRID, DEFAULT_PI_RANGE, DEFAULT_PRIOR_GRID, load_settings
from errors import CalMetricsError, InvalidConfigError
from logger import debug, error, exception, info, reset_logger
from mc_oracle import oracle_estimate
from metrics import PriorConfig, check_prior
from rank_analysis import RANK_COLUMN_SETS, RankedMetric, correlation_matrix, synth_pools
from synthetic import DEFAULT_EXPERIMENT_METRICS, SyntheticSpec, difficulty_sweep, generate, prior_sweep
from utils import parse_float_list
from version import get_display_version, get_version_info

# pi0 value meaning "each draw's own empirical prior" in the sweeps
EMPIRICAL_PI0 = 'empirical'


def _metric_list(text):
    return [m.strip() for m in text.split(',') if m.strip()] if text else None


def _float_list(text):
    try:
        return parse_float_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _sweep_pi0(text):
    if text == EMPIRICAL_PI0:
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a prior in (0, 1) or '{EMPIRICAL_PI0}', got {text!r}")


def _pi0(value):
    return None if value is None else check_prior(value, 'pi0')


def cmd_eval(args):
    data, groups = data_io.read_scores(args.file)
    pi0 = _pi0(args.pi0)
    metrics = _metric_list(args.metrics)

    if args.drift and not args.by_group:
        raise InvalidConfigError("--drift needs --by-group")
    if args.by_group:
        if groups is None:
            raise InvalidConfigError(f"{args.file} has no '{data_io.GROUP_COLUMN}' column")
        reports = evaluate_groups(data_io.split_groups(data, groups), pi0=pi0, metric_set=metrics,
                                  threshold=args.threshold, workers=args.workers)
    else:
        reports = [evaluate(data, pi0=pi0, metric_set=metrics, threshold=args.threshold)]

    drift = None
    if args.drift:
        drift = [attribute_drift(reports[0], r, tolerance=args.tolerance) for r in reports[1:]]
        for d in drift:
            info("Drift %s -> %s: %s", d.reference_group, d.group, [(e.metric, e.verdict) for e in d.entries])

    if args.csv:
        if drift is not None:
            raise InvalidConfigError("--drift output is JSON only")
        return data_io.reports_to_csv(reports)
    return data_io.reports_to_json(reports, drift=drift)


def cmd_curve(args):
    data, _ = data_io.read_scores(args.file)
    pi0 = _pi0(args.pi0)
    prior_cfg = PriorConfig.for_data(data, pi0) if pi0 is not None and args.kind != curves.KIND_ROC else None
    result = curves.curve(data, args.kind, prior_cfg)
    if result.clamped:
        info("%s area %.6f clamped to %.6f", args.kind, result.auc_raw, result.auc)
    return data_io.curve_to_csv(result)


def cmd_oracle(args):
    data, _ = data_io.read_scores(args.file)
    result = oracle_estimate(data, _pi0(args.pi0), metric=args.metric, runs=args.runs, seed=args.seed,
                             threshold=args.threshold, workers=args.workers)
    return data_io.oracle_to_json(result)


def cmd_synth(args):
    spec = SyntheticSpec(mu1=args.mu1, mu0=args.mu0, pi=args.pi, n=args.n, seed=args.seed)
    return data_io.dataset_to_csv(generate(spec).labeled_scores(raw_feature=args.raw_feature))


def _table_output(args, table):
    return data_io.table_to_json(table) if args.json else data_io.table_to_csv(table)


def cmd_prior_sweep(args):
    table = prior_sweep(
        args.grid, runs=args.runs, pi0=args.pi0, n=args.n, seed=args.seed,
        mu1=args.mu1, mu0=args.mu0, metrics=_metric_list(args.metrics) or DEFAULT_EXPERIMENT_METRICS,
        threshold=args.threshold, ci_level=args.ci_level, workers=args.workers,
    )
    return _table_output(args, table)


def cmd_difficulty_sweep(args):
    pi_range = tuple(args.pi_range)
    if len(pi_range) != 2:
        raise InvalidConfigError(f"--pi-range needs two values, got {args.pi_range}")
    table = difficulty_sweep(
        args.grid, runs=args.runs, pi0=args.pi0, n=args.n, seed=args.seed,
        mu0=args.mu0, pi_range=pi_range, metrics=_metric_list(args.metrics) or DEFAULT_EXPERIMENT_METRICS,
        threshold=args.threshold, ci_level=args.ci_level, workers=args.workers,
    )
    return _table_output(args, table)


def cmd_rankcorr(args):
    if args.columns:
        columns = [RankedMetric.parse(c) for c in _metric_list(args.columns)]
    else:
        columns = RANK_COLUMN_SETS[args.column_set]
    if args.pools:
        pools = [data_io.read_pool_csv(path) for path in args.pools]
    else:
        pools = synth_pools(args.pool_count, args.models, args.n, args.pi, seed=args.seed)
    result = correlation_matrix(pools, columns=columns, threshold=args.threshold, workers=args.workers)
    if result.skipped:
        info("Skipped pools: %s", ', '.join(result.skipped_ids))
    return data_io.matrix_to_json(result) if args.json else data_io.matrix_to_csv(result)


def build_parser(settings=None):
    """
    Argument parser; settings provide the defaults of the tunable flags.
    """
    settings = settings or load_settings()

    parser = argparse.ArgumentParser(
        prog='calmetrics',
        description='Calibrated precision-based metrics for imbalanced binary classification',
    )
    parser.add_argument('--version', action='version', version=f"calmetrics {get_display_version()}")
    parser.add_argument('--debug', action='store_true', help='Write debug/info lines to the log file')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--output', '-o', default=None, help='Write the artifact here instead of stdout')
    common.add_argument('--threshold', type=float, default=settings['threshold'],
                        help='Operating threshold of the pointwise metrics (score > threshold)')
    common.add_argument('--workers', type=int, default=settings['workers'], help='Worker threads')

    p = sub.add_parser('eval', parents=[common], help='Evaluate a score file')
    p.add_argument('file', help='CSV with header label,score[,group]')
    p.add_argument('--pi0', type=float, default=None,
                   help='Reference prior of the calibrated metrics; use the smallest prior you expect in deployment')
    p.add_argument('--metrics', default=None, help='Comma separated metric names (default: all)')
    p.add_argument('--by-group', action='store_true', help='One report per group, shared pi0')
    p.add_argument('--drift', action='store_true', help='Attribute each group\'s change against the first group')
    p.add_argument('--tolerance', type=float, default=0.01, help='Drift tolerance')
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument('--json', action='store_true', default=True, help='JSON output (default)')
    fmt.add_argument('--csv', action='store_true', help='CSV output, one row per report')
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser('curve', parents=[common], help='Emit a curve as CSV')
    p.add_argument('file')
    p.add_argument('--kind', choices=curves.CURVE_KINDS, default=curves.KIND_PR)
    p.add_argument('--pi0', type=float, default=None, help='Calibrate the PR / PR-Gain curve to this prior')
    p.set_defaults(handler=cmd_curve)

    p = sub.add_parser('oracle', parents=[common], help='Undersampling estimate of a calibrated metric')
    p.add_argument('file')
    p.add_argument('--pi0', type=float, required=True)
    p.add_argument('--runs', type=int, default=settings['oracle_runs'])
    p.add_argument('--seed', type=int, default=settings['seed'])
    p.add_argument('--metric', default='auc_pr')
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser('synth', parents=[common], help='Two-Gaussian synthetic score file')
    p.add_argument('--mu1', type=float, default=settings['mu1'])
    p.add_argument('--mu0', type=float, default=settings['mu0'])
    p.add_argument('--pi', type=float, default=0.5)
    p.add_argument('--n', type=int, default=settings['synthetic_n'])
    p.add_argument('--seed', type=int, default=settings['seed'])
    p.add_argument('--raw-feature', action='store_true', help='Write x instead of the optimal score')
    p.set_defaults(handler=cmd_synth)

    experiment = argparse.ArgumentParser(add_help=False)
    experiment.add_argument('--runs', type=int, default=settings['experiment_runs'])
    experiment.add_argument('--pi0', type=_sweep_pi0, default=0.5,
                            help=f"Reference prior, or '{EMPIRICAL_PI0}' for each draw's own prior")
    experiment.add_argument('--n', type=int, default=settings['synthetic_n'])
    experiment.add_argument('--seed', type=int, default=settings['seed'])
    experiment.add_argument('--mu0', type=float, default=settings['mu0'])
    experiment.add_argument('--metrics', default=None, help='Comma separated metric names')
    experiment.add_argument('--ci-level', type=float, default=settings['ci_level'])
    experiment.add_argument('--json', action='store_true', help='JSON output instead of CSV')

    p = sub.add_parser('prior-sweep', parents=[common, experiment], help='Metrics over a grid of class priors')
    p.add_argument('--grid', type=_float_list, default=DEFAULT_PRIOR_GRID)
    p.add_argument('--mu1', type=float, default=settings['mu1'])
    p.set_defaults(handler=cmd_prior_sweep)

    p = sub.add_parser('difficulty-sweep', parents=[common, experiment], help='Metrics over a grid of KL divergences')
    p.add_argument('--grid', type=_float_list, default=DEFAULT_KL_GRID)
    p.add_argument('--pi-range', type=_float_list, default=list(DEFAULT_PI_RANGE))
    p.set_defaults(handler=cmd_difficulty_sweep)

    p = sub.add_parser('rankcorr', parents=[common], help='Spearman agreement between metrics over model pools')
    p.add_argument('pools', nargs='*', help='Pool CSV files (label + one score column per model); '
                                            'synthetic pools when omitted')
    p.add_argument('--columns', default=None, help="Comma separated columns, e.g. auc_roc,calibrated_auc_pr@1.01pi")
    p.add_argument('--column-set', choices=sorted(RANK_COLUMN_SETS), default='default',
                   help='Column set used when --columns is not given')
    p.add_argument('--pool-count', type=int, default=settings['pool_count'])
    p.add_argument('--models', type=int, default=settings['pool_models'])
    p.add_argument('--n', type=int, default=settings['pool_n'])
    p.add_argument('--pi', type=float, default=settings['pool_pi'])
    p.add_argument('--seed', type=int, default=settings['seed'])
    p.add_argument('--json', action='store_true', help='JSON output instead of CSV')
    p.set_defaults(handler=cmd_rankcorr)

    return parser


def main(argv=None):
    """
    Run one command.

    Returns:
        int: process exit code
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.debug:
        reset_logger(debug_enabled=True)
    version = get_version_info()
    debug("calmetrics %s (build %s) %s: %s", version['version'], version['build'], args.command, vars(args))

    try:
        text = args.handler(args)
        data_io.write_output(text, args.output)
    except CalMetricsError as e:
        exception("%s failed: %s", args.command, e)
        return e.exit_code
    except ValueError as e:
        error("%s failed: %s", args.command, e)
        return InvalidConfigError.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())

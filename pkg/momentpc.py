#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import argparse
import importlib
import os
import sys
import traceback

from typing import List, Optional

try:
    import momentpccore as core
except ImportError:
    sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'core'))
    import momentpccore as core

from momentpccore.experiments import (
    ExperimentConfig,
    METHODS,
    ODE_EXPERIMENTS,
    SWEEP_EXPERIMENTS,
    loadConfig,
    mergeConfig,
    parseIntegerList,
    resolveOutputPath,
    runMomentSweep,
    runOdeExperiment,
    runWindowSweep,
)
from momentpccore.candidates import CANDIDATES
from momentpccore.selftest import runSelfTest
from momentpccore.utils import ConfigurationError, MomentPCError


__version__ = '0.1.0'


class _CustomFormatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    def add_arguments(self, actions):
        actions = sorted(actions, key=lambda x: getattr(x, 'option_strings'))
        super().add_arguments(actions)


class PrintVersionAction(argparse.Action):
    def __call__(self, parser, args, values, option_string=None):
        print("momentpc", __version__)
        print("momentpccore", core.__version__)

        print()
        print("System Software:")
        print()
        print("Python", sys.version.split(' ', maxsplit=1)[0])

        for moduleName in ['numpy', 'scipy']:
            try:
                module = importlib.import_module(moduleName)
                print(moduleName, getattr(module, '__version__', 'unknown'))
            except ImportError:
                pass

        sys.exit(0)


def _integerList(value: str):
    try:
        return parseIntegerList(value)
    except ConfigurationError as exception:
        raise argparse.ArgumentTypeError(str(exception)) from exception


def _names(value: str):
    return tuple(name.strip() for name in value.split(',') if name.strip())


def _parseArgs(rawArgs: Optional[List[str]] = None):
    common = argparse.ArgumentParser(add_help=False)
    commonGroup = common.add_argument_group("Common Options")
    commonGroup.add_argument(
        '--config', type=str,
        help="Configuration file with 'key = value' lines. Command line options take precedence over it.")  # fmt: skip
    commonGroup.add_argument(
        '-o', '--out', type=str,
        help="Output path. If not given, results are printed to standard output. "
             "The environment variable MOMENTPC_OUTPUT_DIR replaces the directory of the output path.")  # fmt: skip
    commonGroup.add_argument(
        '--seed', type=int,
        help="Seed for the least squares grids and the Monte Carlo ensembles.")  # fmt: skip
    commonGroup.add_argument(
        '-k', '--kappa', type=_integerList,
        help="Approximation orders, e.g., 1-10 or 1,2,3.")  # fmt: skip
    commonGroup.add_argument(
        '-d', '--debug', type=int, default=None,
        help="Sets the debugging level. Higher means more output. Currently, 3 is the highest.")  # fmt: skip
    commonGroup.add_argument(
        '-P', '--parallelization', type=int, default=None,
        help="Number of threads for independent cells and Monte Carlo chunks.")  # fmt: skip

    parser = argparse.ArgumentParser(
        prog='momentpc',
        formatter_class=_CustomFormatter,
        description='''\
With momentpc, you can:
  - Compare moment errors of polynomial chaos coefficients computed by Galerkin projection,
    stochastic collocation, least squares, and the moment-exact solvers
  - Track mean and variance of stochastic ODE solutions with the GP surrogate
    and with the linear propagator fitted to moment-exact reference coefficients
  - Study the influence of the window length of the linear propagator
  - Run the self-test of all invariant suites
''',
        epilog='''\
# Result Tables

All tables are CSV files starting with a '# momentpc-csv v1 ...' comment line.
See the README of momentpccore for the columns of each experiment and for the
configuration file format.
''',
    )
    parser.add_argument('-v', '--version', action=PrintVersionAction, nargs=0, default=argparse.SUPPRESS,
                        help="Print version information and exit.")  # fmt: skip

    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    sweep = subparsers.add_parser(
        'sweep', parents=[common], formatter_class=_CustomFormatter,
        help="Moment errors over the approximation order for one candidate function.")  # fmt: skip
    sweep.add_argument(
        '-e', '--experiment', choices=SWEEP_EXPERIMENTS,
        help="Experiment defining the default function, methods, and moment orders. [default: fig-pcerrors]")  # fmt: skip
    sweep.add_argument(
        '-f', '--function', choices=list(CANDIDATES) + ['custom'],
        help="Candidate function.")  # fmt: skip
    sweep.add_argument(
        '--custom-function', type=str,
        help="'package.module:callable' used for --function custom.")  # fmt: skip
    sweep.add_argument(
        '-m', '--method', type=_names,
        help=f"Comma-separated methods out of: {', '.join(METHODS)}")  # fmt: skip
    sweep.add_argument(
        '--moments', type=_integerList,
        help="Moment orders, e.g., 1-4.")  # fmt: skip

    ode = subparsers.add_parser(
        'ode', parents=[common], formatter_class=_CustomFormatter,
        help="Mean and variance over time of the GP propagator and the linear propagator.")  # fmt: skip
    ode.add_argument(
        '-e', '--experiment', choices=ODE_EXPERIMENTS,
        help="dx/dt = -a x (ode-linear) or dx/dt = -a x^2 + sin(x) (ode-nonlinear). [default: ode-linear]")  # fmt: skip

    window = subparsers.add_parser(
        'window', parents=[common], formatter_class=_CustomFormatter,
        help="Terminal errors of the linear propagator for different window lengths.")  # fmt: skip
    window.add_argument(
        '--window-factors', type=_integerList,
        help="Window lengths as multiples of n (N + 1). [default: 1,5,10]")  # fmt: skip

    for timeParser in [ode, window]:
        timeParser.add_argument('--step', type=float, help="RK4 step size. [default: 0.01]")
        timeParser.add_argument('--horizon', type=float, help="Final time. [default: 10]")
        timeParser.add_argument(
            '--free-running', action='store_true', default=None,
            help="Predict from previous predictions instead of reference coefficients.")  # fmt: skip
    ode.add_argument('--mc-samples', type=int, help="Monte Carlo paths for the nonlinear reference. [default: 100000]")

    subparsers.add_parser(
        'selftest', parents=[common], formatter_class=_CustomFormatter,
        help="Runs all invariant suites and prints a JSON report. The exit code is 0 if all suites pass.")  # fmt: skip

    return parser.parse_args(rawArgs)


def _buildConfig(args) -> ExperimentConfig:
    config = loadConfig(args.config) if args.config else ExperimentConfig()

    experiment = getattr(args, 'experiment', None)
    if args.command == 'sweep':
        experiment = experiment or (config.experiment if config.experiment in SWEEP_EXPERIMENTS else 'fig-pcerrors')
    elif args.command == 'ode':
        experiment = experiment or (config.experiment if config.experiment in ODE_EXPERIMENTS else 'ode-linear')
    elif args.command == 'window':
        experiment = 'window-sweep'
    else:
        experiment = 'selftest'

    # fmt: off
    return mergeConfig(
        config,
        experiment      = experiment,
        kappas          = args.kappa,
        function        = getattr(args, 'function', None),
        customFunction  = getattr(args, 'custom_function', None),
        methods         = getattr(args, 'method', None),
        momentOrders    = getattr(args, 'moments', None),
        lsSeed          = args.seed,
        mcSeed          = args.seed,
        mcSamples       = getattr(args, 'mc_samples', None),
        step            = getattr(args, 'step', None),
        horizon         = getattr(args, 'horizon', None),
        windowFactors   = getattr(args, 'window_factors', None),
        freeRunning     = getattr(args, 'free_running', None),
        output          = args.out,
        parallelization = args.parallelization,
        printDebug      = args.debug,
    )
    # fmt: on


def cli(rawArgs: Optional[List[str]] = None) -> int:
    """Command line interface for momentpc. Call with args = [ '--help' ] for a description. Returns the exit code."""

    args = _parseArgs(rawArgs)
    config = _buildConfig(args)

    if args.command == 'selftest':
        report = runSelfTest(printDebug=config.printDebug)
        output = resolveOutputPath(config.output)
        if output:
            with open(output, 'wt', encoding='utf-8') as file:
                file.write(report.toJson() + '\n')
        print(report.toJson())
        return 0 if report.passed else 1

    if args.command == 'sweep':
        table = runMomentSweep(config)
    elif args.command == 'ode':
        table = runOdeExperiment(config)
    else:
        table = runWindowSweep(config)

    if not config.output:
        sys.stdout.write(table.toCsv())
    elif config.printDebug >= 1:
        print(f"[Info] Wrote {len(table.rows)} rows to {resolveOutputPath(config.output)}")
    return 0


def main():
    args = sys.argv[1:]
    debug = 1
    for i in range(len(args) - 1):
        if args[i] in ['-d', '--debug'] and args[i + 1].isdecimal():
            try:
                debug = int(args[i + 1])
            except ValueError:
                continue

    try:
        sys.exit(cli(args))
    except (FileNotFoundError, MomentPCError, argparse.ArgumentTypeError) as exception:
        print("[Error]", exception)
        if debug >= 3:
            traceback.print_exc()
        sys.exit(1)


if __name__ == '__main__':
    main()

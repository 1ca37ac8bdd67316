#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Config-driven experiments producing CSV tables: moment error sweeps over the approximation order, moment tracking
of stochastic ODEs, and the influence of the window length of the linear propagator.
"""

import concurrent.futures
import configparser
import csv
import dataclasses
import io
import os

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .approximators import DEFAULT_LS_SEED, defaultLSGrid, defaultSCNodes, solveGP, solveLS, solveSC
from .candidates import getCandidate, linearDecay, nonlinearDecay
from .constrained import solveConstrainedGP, solveConstrainedLS
from .ExpectationEngine import QuadratureEngine, momentsOf
from .LegendreBasis import buildBasis
from .LinearPropagator import runLinearPropagator
from .PCExpansion import expansionMomentOrder
from .references import LinearDecayReference, MonteCarloReference
from .SurrogateODE import GPSurrogateODE, initialCoefficients, propagateGP
from .UniformParameter import UniformParameter
from .utils import ConfigurationError, IllConditionedError, floorError
from .version import __version__


CSV_HEADER_PREFIX = '# momentpc-csv v1'
OUTPUT_DIR_VARIABLE = 'MOMENTPC_OUTPUT_DIR'

SWEEP_EXPERIMENTS = ('fig-pcerrors', 'fig-conGPC', 'fig-conSC')
ODE_EXPERIMENTS = ('ode-linear', 'ode-nonlinear')
EXPERIMENTS = SWEEP_EXPERIMENTS + ODE_EXPERIMENTS + ('window-sweep', 'selftest')
METHODS = ('gp', 'sc', 'ls', 'constrained-L2', 'constrained-l2')

# fmt: off
DEFAULT_METHODS = {
    'fig-pcerrors' : ('gp', 'sc', 'ls'),
    'fig-conGPC'   : ('gp', 'constrained-L2'),
    'fig-conSC'    : ('sc', 'ls', 'constrained-l2'),
}
DEFAULT_FUNCTIONS = {
    'fig-pcerrors' : 'delta8',
    'fig-conGPC'   : 'sin2',
    'fig-conSC'    : 'gaussbump',
}
DEFAULT_MOMENT_ORDERS = {
    'fig-pcerrors' : (1, 2),
    'fig-conGPC'   : (1, 2, 3, 4),
    'fig-conSC'    : (1, 2, 3, 4),
}
# fmt: on

ODE_PARAMETER = ((0.0, 1.0),)
ODE_INITIAL_VALUE = 1.0


@dataclass
class ExperimentConfig:
    # fmt: off
    experiment       : str                        = 'fig-pcerrors'
    kappas           : Optional[Tuple[int, ...]]  = None
    function         : Optional[str]              = None
    customFunction   : Optional[str]              = None
    methods          : Optional[Tuple[str, ...]]  = None
    momentOrders     : Optional[Tuple[int, ...]]  = None
    quadraturePoints : int                        = 64
    truthPoints      : int                        = 128
    lsSeed           : int                        = DEFAULT_LS_SEED
    mcSamples        : int                        = 100_000
    mcSeed           : int                        = 0
    step             : float                      = 0.01
    horizon          : float                      = 10.0
    windowFactors    : Tuple[int, ...]            = (1, 5, 10)
    freeRunning      : bool                       = False
    output           : Optional[str]              = None
    parallelization  : int                        = 1
    printDebug       : int                        = 0
    # fmt: on

    def resolved(self) -> 'ExperimentConfig':
        """Returns a copy with the experiment-specific defaults filled in. Raises ConfigurationError if invalid."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(
                f"Unknown experiment '{self.experiment}'. Valid values are: {', '.join(EXPERIMENTS)}"
            )

        kappas = self.kappas
        if kappas is None:
            if self.experiment in ODE_EXPERIMENTS:
                kappas = (1, 2, 3)
            elif self.experiment == 'window-sweep':
                kappas = (1,)
            else:
                kappas = tuple(range(1, 11))

        # fmt: off
        config = dataclasses.replace(
            self,
            kappas       = tuple(int(kappa) for kappa in kappas),
            function     = self.function or DEFAULT_FUNCTIONS.get(self.experiment, 'delta8'),
            methods      = tuple(self.methods) if self.methods else DEFAULT_METHODS.get(self.experiment, METHODS),
            momentOrders = tuple(self.momentOrders) if self.momentOrders
                           else DEFAULT_MOMENT_ORDERS.get(self.experiment, (1, 2, 3, 4)),
        )
        # fmt: on
        config.validate()
        return config

    def validate(self) -> None:
        if not self.kappas:
            raise ConfigurationError("The range of approximation orders must not be empty!")
        if any(kappa < 0 for kappa in self.kappas):
            raise ConfigurationError("Approximation orders must not be negative!")
        unknownMethods = [method for method in (self.methods or ()) if method not in METHODS]
        if unknownMethods:
            raise ConfigurationError(
                f"Unknown method(s) {', '.join(unknownMethods)}. Valid values are: {', '.join(METHODS)}"
            )
        if any(order < 1 for order in (self.momentOrders or ())):
            raise ConfigurationError("Moment orders start at 1!")
        if self.quadraturePoints < 1 or self.truthPoints < 1:
            raise ConfigurationError("Quadrature rules need at least one point!")
        if self.mcSamples < 2:
            raise ConfigurationError("The Monte Carlo ensemble needs at least two samples!")
        if not self.step > 0 or not self.horizon > 0:
            raise ConfigurationError("Step size and horizon must be positive!")
        if not self.windowFactors:
            raise ConfigurationError("At least one window factor is required!")
        if self.experiment in SWEEP_EXPERIMENTS:
            getCandidate(self.function or 'delta8', self.customFunction)

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.step))


def parseIntegerList(value: str) -> Tuple[int, ...]:
    """Parses '1-10' or '1,2,3' (also mixed, e.g., '1-3,5') into a tuple of integers."""
    result: List[int] = []
    for part in value.replace(' ', '').split(','):
        if not part:
            continue
        try:
            if '-' in part[1:]:
                first, last = part.split('-', 1)
                start, stop = int(first), int(last)
                if stop < start:
                    raise ConfigurationError(f"Empty range '{part}'!")
                result.extend(range(start, stop + 1))
            else:
                result.append(int(part))
        except ValueError as exception:
            raise ConfigurationError(f"Invalid integer list '{value}'!") from exception
    if not result:
        raise ConfigurationError(f"Empty integer list '{value}'!")
    return tuple(result)


def _parseBool(value: str) -> bool:
    if value.strip().lower() in ('1', 'true', 'yes', 'on'):
        return True
    if value.strip().lower() in ('0', 'false', 'no', 'off'):
        return False
    raise ConfigurationError(f"Invalid boolean value '{value}'!")


def _parseNames(value: str) -> Tuple[str, ...]:
    return tuple(name.strip() for name in value.split(',') if name.strip())


# Maps config file keys to dataclass fields and parsers.
# fmt: off
CONFIG_KEYS = {
    'experiment'        : ('experiment', str.strip),
    'kappa'             : ('kappas', parseIntegerList),
    'kappas'            : ('kappas', parseIntegerList),
    'function'          : ('function', str.strip),
    'custom_function'   : ('customFunction', str.strip),
    'methods'           : ('methods', _parseNames),
    'method'            : ('methods', _parseNames),
    'moment_orders'     : ('momentOrders', parseIntegerList),
    'quadrature_points' : ('quadraturePoints', int),
    'truth_points'      : ('truthPoints', int),
    'ls_seed'           : ('lsSeed', int),
    'mc_samples'        : ('mcSamples', lambda value: int(float(value))),
    'mc_seed'           : ('mcSeed', int),
    'step'              : ('step', float),
    'horizon'           : ('horizon', float),
    'window_factors'    : ('windowFactors', parseIntegerList),
    'free_running'      : ('freeRunning', _parseBool),
    'output'            : ('output', str.strip),
    'parallelization'   : ('parallelization', int),
    'debug'             : ('printDebug', int),
}
# fmt: on


def parseConfig(text: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Parses 'key = value' lines with an optional [experiment] section header and # comments."""
    parser = configparser.ConfigParser(comment_prefixes=('#', ';'), inline_comment_prefixes=('#',))
    try:
        if not text.lstrip().startswith('['):
            text = '[experiment]\n' + text
        parser.read_string(text)
    except configparser.Error as exception:
        raise ConfigurationError(f"Could not parse configuration: {exception}") from exception

    values: Dict[str, Any] = {}
    for section in parser.sections():
        if section != 'experiment':
            raise ConfigurationError(f"Unknown configuration section [{section}]!")
        for key, value in parser.items(section):
            if key not in CONFIG_KEYS:
                raise ConfigurationError(f"Unknown configuration key '{key}'. Valid keys are: {', '.join(CONFIG_KEYS)}")
            name, parse = CONFIG_KEYS[key]
            try:
                values[name] = parse(value)
            except ValueError as exception:
                raise ConfigurationError(f"Invalid value '{value}' for configuration key '{key}'!") from exception

    return dataclasses.replace(base or ExperimentConfig(), **values)


def loadConfig(path: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Configuration file '{path}' does not exist!")
    with open(path, 'rt', encoding='utf-8') as file:
        return parseConfig(file.read(), base)


def mergeConfig(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Applies all overrides that are not None."""
    return dataclasses.replace(config, **{key: value for key, value in overrides.items() if value is not None})


def resolveOutputPath(output: Optional[str]) -> Optional[str]:
    """The directory given by MOMENTPC_OUTPUT_DIR replaces the directory of the output path."""
    directory = os.environ.get(OUTPUT_DIR_VARIABLE, '')
    if not output or not directory:
        return output
    return os.path.join(directory, os.path.basename(output))


def formatValue(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


@dataclass
class ResultTable:
    experiment: str
    columns: Sequence[str]
    rows: List[Tuple[Any, ...]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def column(self, name: str) -> List[Any]:
        index = list(self.columns).index(name)
        return [row[index] for row in self.rows]

    def select(self, **criteria) -> List[Dict[str, Any]]:
        """Rows as dictionaries, filtered by exact column values."""
        records = [dict(zip(self.columns, row)) for row in self.rows]
        return [record for record in records if all(record[key] == value for key, value in criteria.items())]

    def toCsv(self) -> str:
        buffer = io.StringIO()
        buffer.write(f"{CSV_HEADER_PREFIX} experiment={self.experiment} momentpccore={__version__}\n")
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([formatValue(value) for value in row])
        return buffer.getvalue()

    def write(self, path: str) -> None:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'wt', encoding='utf-8', newline='') as file:
            file.write(self.toCsv())


def readTable(path: str) -> ResultTable:
    """Reads a table written by ResultTable.write. All values are returned as strings."""
    with open(path, 'rt', encoding='utf-8', newline='') as file:
        header = file.readline()
        if not header.startswith(CSV_HEADER_PREFIX):
            raise ConfigurationError(f"File '{path}' is not a momentpc result table!")
        attributes = dict(part.split('=', 1) for part in header[len(CSV_HEADER_PREFIX) :].split() if '=' in part)
        reader = csv.reader(file)
        columns = next(reader)
        return ResultTable(attributes.get('experiment', ''), columns, [tuple(row) for row in reader])


def _emit(table: ResultTable, config: ExperimentConfig) -> ResultTable:
    output = resolveOutputPath(config.output)
    if output:
        table.write(output)
        if config.printDebug >= 2:
            print(f"[Info] Wrote {len(table.rows)} rows to {output}")
    return table


def _mapCells(function, cells: Sequence, parallelization: int) -> List:
    """Evaluates all cells, optionally on a thread pool, and returns the results in cell order."""
    if parallelization <= 1 or len(cells) <= 1:
        return [function(cell) for cell in cells]
    with concurrent.futures.ThreadPoolExecutor(parallelization) as pool:
        return list(pool.map(function, cells))


def buildExpansion(method: str, kappa: int, config: ExperimentConfig):
    """Approximates the configured candidate function with the given method and approximation order."""
    candidate = getCandidate(config.function or 'delta8', config.customFunction)
    param = candidate.param
    basis = buildBasis(param, kappa)
    engine = QuadratureEngine(config.quadraturePoints)

    if method == 'gp':
        return solveGP(engine, basis, candidate)
    if method == 'sc':
        return solveSC(defaultSCNodes(param, kappa), candidate, param)
    if method == 'ls':
        return solveLS(defaultLSGrid(basis, config.lsSeed), basis, candidate)
    if method == 'constrained-L2':
        return solveConstrainedGP(momentsOf(engine, param, basis, candidate), basis)
    if method == 'constrained-l2':
        moments = momentsOf(engine, param, basis, candidate)
        return solveConstrainedLS(defaultLSGrid(basis, config.lsSeed), moments, basis, candidate)
    raise ConfigurationError(f"Unknown method '{method}'. Valid values are: {', '.join(METHODS)}")


def runMomentSweep(config: ExperimentConfig) -> ResultTable:
    """
    Absolute errors |E[f^m] - E[f_hat^m]| for each approximation order and method. Errors are lower bounded by
    the machine precision 2^-52. Cells with ill-conditioned systems are skipped with a warning.
    """
    config = config.resolved()
    if config.experiment not in SWEEP_EXPERIMENTS:
        config = dataclasses.replace(config, experiment='fig-pcerrors').resolved()

    candidate = getCandidate(config.function or 'delta8', config.customFunction)
    truths = {order: candidate.trueMoment(order, config.truthPoints) for order in config.momentOrders or ()}
    momentEngine = QuadratureEngine(config.truthPoints)

    def evaluateCell(cell: Tuple[int, str]):
        kappa, method = cell
        try:
            expansion = buildExpansion(method, kappa, config)
        except IllConditionedError as exception:
            return exception
        return {order: float(expansionMomentOrder(expansion, momentEngine, order)[0]) for order in truths}

    cells = [(kappa, method) for kappa in config.kappas or () for method in config.methods or ()]
    if config.printDebug >= 2:
        print(f"[Info] Evaluating {len(cells)} cells for the function {candidate.name}")

    table = ResultTable(config.experiment, ('kappa', 'method', 'moment', 'truth', 'estimate', 'error'))
    for (kappa, method), result in zip(cells, _mapCells(evaluateCell, cells, config.parallelization)):
        if isinstance(result, Exception):
            message = f"Skipped {method} at kappa={kappa}: {result}"
            table.warnings.append(message)
            if config.printDebug >= 1:
                print(f"[Warning] {message}")
            continue
        for order, estimate in result.items():
            table.rows.append(
                (kappa, method, order, truths[order], estimate, floorError(truths[order] - estimate))
            )

    return _emit(table, config)


@dataclass
class OdeTrace:
    """Moment trajectories of the GP propagator and the linear propagator next to the reference."""

    # fmt: off
    kappa         : int
    times         : np.ndarray
    gpMeans       : np.ndarray
    gpVariances   : np.ndarray
    predMeans     : np.ndarray
    predVariances : np.ndarray
    refMeans      : np.ndarray
    refVariances  : np.ndarray
    diagnostics   : List[Any] = field(default_factory=list)
    # fmt: on

    @staticmethod
    def _averaged(errors: np.ndarray, times: np.ndarray, start: float) -> float:
        return float(np.mean(errors[times >= start - 1e-12]))

    def averagedErrors(self, start: float = 1.0) -> Dict[str, float]:
        """Time-averaged absolute errors over t >= start."""
        # fmt: off
        return {
            'gp_mean'            : self._averaged(np.abs(self.gpMeans - self.refMeans), self.times, start),
            'gp_variance'        : self._averaged(np.abs(self.gpVariances - self.refVariances), self.times, start),
            'algorithm1_mean'    : self._averaged(np.abs(self.predMeans - self.refMeans), self.times, start),
            'algorithm1_variance': self._averaged(np.abs(self.predVariances - self.refVariances), self.times, start),
        }
        # fmt: on


def _odeProblem(experiment: str, kappa: int, config: ExperimentConfig):
    param = UniformParameter(ODE_PARAMETER)
    basis = buildBasis(param, kappa)
    if experiment == 'ode-nonlinear':
        ode = GPSurrogateODE(basis, nonlinearDecay, engine=QuadratureEngine(config.quadraturePoints))
        provider = MonteCarloReference(
            basis,
            nonlinearDecay,
            ODE_INITIAL_VALUE,
            config.step,
            config.steps,
            samples=config.mcSamples,
            seed=config.mcSeed,
            parallelization=config.parallelization,
            printDebug=config.printDebug,
        )
    else:
        ode = GPSurrogateODE(basis, linearDecay)
        provider = LinearDecayReference(basis, config.step, x0=ODE_INITIAL_VALUE)
    return basis, ode, provider


def _referenceMoments(provider, steps: int) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(provider, LinearDecayReference):
        times = provider.step * np.arange(steps + 1)
        return (
            np.array([[provider.mean(t)] for t in times]),
            np.array([[provider.variance(t)] for t in times]),
        )
    moments = [provider.moments(k) for k in range(steps + 1)]
    return np.array([m.mean for m in moments]), np.array([np.diag(m.covariance) for m in moments])


def simulateOde(config: ExperimentConfig, kappa: int, windowFactor: int = 1) -> OdeTrace:
    """Runs the GP propagator and the linear propagator with window length windowFactor n (N + 1)."""
    experiment = config.experiment if config.experiment in ODE_EXPERIMENTS else 'ode-linear'
    if windowFactor < 1:
        raise ConfigurationError(
            f"The window length factor must be at least 1 because windows need n (N + 1) transitions "
            f"but got {windowFactor}!"
        )

    basis, ode, provider = _odeProblem(experiment, kappa, config)
    steps = config.steps
    if config.printDebug >= 2:
        print(f"[Info] Propagating {experiment} at kappa={kappa} over {steps} steps")

    gpSeries = propagateGP(ode, initialCoefficients(basis, ODE_INITIAL_VALUE), steps, config.step, config.printDebug)
    result = runLinearPropagator(
        ode,
        provider,
        windowFactor * ode.dimension,
        steps,
        config.step,
        freeRunning=config.freeRunning,
        printDebug=config.printDebug,
    )
    refMeans, refVariances = _referenceMoments(provider, steps)

    # fmt: off
    return OdeTrace(
        kappa         = kappa,
        times         = gpSeries.times,
        gpMeans       = gpSeries.means(),
        gpVariances   = gpSeries.variances(),
        predMeans     = result.predicted.means(),
        predVariances = result.predicted.variances(),
        refMeans      = refMeans,
        refVariances  = refVariances,
        diagnostics   = result.diagnostics,
    )
    # fmt: on


ODE_COLUMNS = (
    't', 'kappa', 'method', 'dim', 'mean', 'variance', 'ref_mean', 'ref_variance', 'mean_error', 'variance_error'
)


def _traceRows(trace: OdeTrace) -> Iterable[Tuple[Any, ...]]:
    methods = (('gp', trace.gpMeans, trace.gpVariances), ('algorithm1', trace.predMeans, trace.predVariances))
    for k, t in enumerate(trace.times):
        for method, means, variances in methods:
            for dim in range(means.shape[1]):
                mean, variance = means[k, dim], variances[k, dim]
                refMean, refVariance = trace.refMeans[k, dim], trace.refVariances[k, dim]
                yield (
                    float(t),
                    trace.kappa,
                    method,
                    dim,
                    mean,
                    variance,
                    refMean,
                    refVariance,
                    abs(mean - refMean),
                    abs(variance - refVariance),
                )


def runOdeExperiment(config: ExperimentConfig) -> ResultTable:
    """Mean and variance time series of the GP propagator and the linear propagator against the reference."""
    config = config.resolved()
    if config.experiment not in ODE_EXPERIMENTS:
        raise ConfigurationError(f"Experiment '{config.experiment}' is not an ODE experiment!")

    traces = _mapCells(lambda kappa: simulateOde(config, kappa), list(config.kappas or ()), config.parallelization)
    table = ResultTable(config.experiment, ODE_COLUMNS)
    for trace in traces:
        table.rows.extend(_traceRows(trace))
        for diagnostic in trace.diagnostics:
            table.warnings.append(f"kappa={trace.kappa}, step {diagnostic.step}: {diagnostic.message}")
    return _emit(table, config)


def runWindowSweep(config: ExperimentConfig) -> ResultTable:
    """Terminal-time errors of the linear propagator on the linear ODE for window lengths q = factor n (N + 1)."""
    config = dataclasses.replace(config, experiment='window-sweep').resolved()
    linearConfig = dataclasses.replace(config, experiment='ode-linear')

    cells = [(kappa, factor) for kappa in config.kappas or () for factor in config.windowFactors]
    for _, factor in cells:
        if factor < 1:
            raise ConfigurationError(f"Window factor {factor} results in q < n (N + 1), which is not allowed!")

    table = ResultTable(
        config.experiment,
        ('kappa', 'factor', 'window_length', 't', 'mean_error', 'variance_error', 'averaged_mean_error'),
    )

    def evaluateCell(cell: Tuple[int, int]):
        kappa, factor = cell
        return simulateOde(linearConfig, kappa, factor)

    for (kappa, factor), trace in zip(cells, _mapCells(evaluateCell, cells, config.parallelization)):
        # fmt: off
        table.rows.append((
            kappa,
            factor,
            factor * (kappa + 1),
            float(trace.times[-1]),
            float(abs(trace.predMeans[-1, 0] - trace.refMeans[-1, 0])),
            float(abs(trace.predVariances[-1, 0] - trace.refVariances[-1, 0])),
            trace.averagedErrors()['algorithm1_mean'],
        ))
        # fmt: on
    return _emit(table, config)


def runExperiment(config: ExperimentConfig) -> ResultTable:
    if config.experiment in SWEEP_EXPERIMENTS:
        return runMomentSweep(config)
    if config.experiment in ODE_EXPERIMENTS:
        return runOdeExperiment(config)
    if config.experiment == 'window-sweep':
        return runWindowSweep(config)
    raise ConfigurationError(f"Experiment '{config.experiment}' does not produce a table!")

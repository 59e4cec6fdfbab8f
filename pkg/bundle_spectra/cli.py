"""
Command-line front end.

    bundle-spectra spectrum      --config run.json --out results/
    bundle-spectra perturb-check --config run.json
    bundle-spectra nodal         --seed 3
    bundle-spectra ensemble      --workers 4
    bundle-spectra convergence   --svg convergence.svg

Exit codes: 0 success, 2 eigensolver failure, 3 formula check failed or a
degenerate branch was requested, 64 configuration error, 65 invalid
discretization or metric parameters.
"""

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from bundle_spectra.errors import (
    ConfigError,
    ConvergenceError,
    DegenerateBranchError,
    DiscretizationError,
    MetricNotPositiveError,
    UnsupportedConfigurationError,
)
from bundle_spectra.io import emit, render_csv, render_json
from bundle_spectra.perturbation import REPORT_COLUMNS
from bundle_spectra.simulations import (
    DEFAULT_RESOLUTIONS,
    ENSEMBLE_COLUMNS,
    SCENARIOS,
    SPECTRUM_COLUMNS,
    ConvergenceSimulation,
    EnsembleSimulation,
    NodalSimulation,
    PerturbationSimulation,
    SpectrumSimulation,
    build_metric,
)
from bundle_spectra.solvers import LanczosSolver

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_FORMULA = 3
EXIT_CONFIG = 64
EXIT_DISCRETIZATION = 65

COMMANDS = ("spectrum", "perturb-check", "nodal", "ensemble", "convergence")


@dataclass(frozen=True)
class ExperimentConfig:
    """Every parameter of every command, with explicit defaults.

    ``index`` defaults per command: 0 for perturb-check and nodal, 1 for
    the flat_eigenvalue convergence scenario.
    """

    d: int = 1
    euler: int = 0
    resolution: int = 32
    preset: Optional[str] = None
    seed: int = 0
    modes: int = 2
    amplitude: float = 0.0
    weights: Tuple[Any, ...] = (0, 1, 2)
    m: int = 5
    residual_tol: float = 1e-8
    cluster_tol: float = 1e-8
    collision_tol: float = 1e-6
    rel_threshold: float = 1e-3
    steps: Tuple[float, ...] = (1e-3, 5e-4)
    match_overlap: bool = False
    zero_velocity: bool = False
    index: Optional[int] = None
    alpha: Any = 1
    n_theta: Optional[int] = None
    zero_tol: float = 1e-7
    synthetic: bool = False
    ensemble_size: int = 10
    nodal: bool = True
    resolutions: Tuple[int, ...] = DEFAULT_RESOLUTIONS
    scenario: str = "flat_eigenvalue"
    lambdas: Optional[Tuple[float, ...]] = None
    alpha_max: int = 8
    workers: int = 1
    timestamp: bool = True

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"config must be a JSON object, got {type(data).__name__}")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        values = {name: _CONVERTERS[name](name, value) for name, value in data.items()}
        config = cls(**values)
        config.validate()
        return config

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {', '.join(SCENARIOS)}, got {self.scenario!r}")
        for name in ("resolution", "m", "workers", "alpha_max"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.ensemble_size < 0:
            raise ConfigError(f"ensemble_size must be non-negative, got {self.ensemble_size}")
        if self.amplitude < 0:
            raise ConfigError(f"amplitude must be non-negative, got {self.amplitude}")
        if not 1 <= len(self.steps) <= 2:
            raise ConfigError(f"steps must hold one or two step sizes, got {list(self.steps)}")

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)

    def replace(self, **changes: Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _integer(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return value


def _optional(convert: Callable[[str, Any], Any]) -> Callable[[str, Any], Any]:
    return lambda name, value: None if value is None else convert(name, value)


def _number(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    return float(value)


def _boolean(name: str, value: Any) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{name} must be true or false, got {value!r}")
    return value


def _string(name: str, value: Any) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{name} must be a string, got {value!r}")
    return value


def _weight(name: str, value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_integer(name, v) for v in value)
    return _integer(name, value)


def _sequence(convert: Callable[[str, Any], Any]) -> Callable[[str, Any], Tuple]:
    def parse(name: str, value: Any) -> Tuple:
        if not isinstance(value, list):
            raise ConfigError(f"{name} must be a list, got {value!r}")
        return tuple(convert(name, v) for v in value)
    return parse


_CONVERTERS: Dict[str, Callable[[str, Any], Any]] = {
    "d": _integer,
    "euler": _integer,
    "resolution": _integer,
    "preset": _optional(_string),
    "seed": _integer,
    "modes": _integer,
    "amplitude": _number,
    "weights": _sequence(_weight),
    "m": _integer,
    "residual_tol": _number,
    "cluster_tol": _number,
    "collision_tol": _number,
    "rel_threshold": _number,
    "steps": _sequence(_number),
    "match_overlap": _boolean,
    "zero_velocity": _boolean,
    "index": _optional(_integer),
    "alpha": _weight,
    "n_theta": _optional(_integer),
    "zero_tol": _number,
    "synthetic": _boolean,
    "ensemble_size": _integer,
    "nodal": _boolean,
    "resolutions": _sequence(_integer),
    "scenario": _string,
    "lambdas": _optional(_sequence(_number)),
    "alpha_max": _integer,
    "workers": _integer,
    "timestamp": _boolean,
}


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse JSON config text; errors carry the byte offset of the problem."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ConfigError(f"invalid JSON at byte {offset}: {exc.msg}", offset=offset) from exc
    return ExperimentConfig.from_dict(data)


def load_config(path: Optional[str]) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="bundle-spectra",
        description="Spectra, variations and nodal sets of weight Laplacians on torus bundles.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", metavar="PATH", help="JSON experiment configuration")
    parser.add_argument("--seed", type=int, help="override the metric seed")
    parser.add_argument("--out", metavar="DIR", help="write outputs into DIR instead of stdout")
    parser.add_argument("--no-timestamp", action="store_true", help="omit the CSV timestamp line")
    parser.add_argument("--print-config", action="store_true", help="print the defaulted config and exit")
    parser.add_argument("--workers", type=int, help="worker processes for ensembles")
    parser.add_argument("--svg", metavar="PATH", help="convergence chart output")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    return parser


def _solver(config: ExperimentConfig, tol: Optional[float] = None) -> LanczosSolver:
    return LanczosSolver(tol=tol or config.residual_tol, seed=config.seed, cluster_tol=config.cluster_tol)


def _metric(config: ExperimentConfig):
    return build_metric(
        config.d, config.euler, config.resolution, config.preset,
        config.seed, config.modes, config.amplitude,
    )


def _write(text: str, out: Optional[str], name: str, stream) -> None:
    if out is None:
        emit(text, stream=stream)
    else:
        emit(text, path=Path(out) / name)


def cmd_spectrum(config: ExperimentConfig, out: Optional[str], stream) -> int:
    result = SpectrumSimulation(_metric(config), _solver(config)).run(
        weights=config.weights, m=config.m, collision_tol=config.collision_tol
    )
    _write(render_csv(SPECTRUM_COLUMNS, result["rows"], config.timestamp), out, "spectrum.csv", stream)
    if out is not None:
        rows = [tuple(c) for c in result["collisions"]]
        emit(
            render_csv(("alpha", "beta", "lambda_alpha", "lambda_beta"), rows, config.timestamp),
            path=Path(out) / "collisions.csv",
        )
    return EXIT_OK


def cmd_perturb_check(config: ExperimentConfig, out: Optional[str], stream) -> int:
    result = PerturbationSimulation(_metric(config), _solver(config, tol=1e-11)).run(
        alpha=config.alpha,
        index=config.index or 0,
        steps=config.steps,
        rel_threshold=config.rel_threshold,
        match_overlap=config.match_overlap,
        zero_velocity=config.zero_velocity,
        seed=config.seed,
    )
    rows = [r.row() for r in result["reports"]]
    _write(render_csv(REPORT_COLUMNS, rows, config.timestamp), out, "perturb_check.csv", stream)
    if result["failures"]:
        failing = ", ".join(r.formula_id for r in result["failures"])
        print(f"formula checks failed: {failing}", file=sys.stderr)
        return EXIT_FORMULA
    return EXIT_OK


def cmd_nodal(config: ExperimentConfig, out: Optional[str], stream) -> int:
    alpha = config.alpha[0] if isinstance(config.alpha, tuple) else config.alpha
    result = NodalSimulation(_metric(config), _solver(config)).run(
        alpha=alpha,
        index=config.index or 0,
        n_theta=config.n_theta,
        zero_tol=config.zero_tol,
        synthetic=config.synthetic,
        sign_dump=None if out is None else str(Path(out) / "signs.bin"),
    )
    _write(result["report"].to_json(), out, "nodal.json", stream)
    return EXIT_OK


def cmd_ensemble(config: ExperimentConfig, out: Optional[str], stream) -> int:
    simulation = EnsembleSimulation(
        d=config.d, euler=config.euler, resolution=config.resolution,
        preset=config.preset, modes=config.modes, amplitude=config.amplitude,
    )
    result = simulation.run(
        size=config.ensemble_size,
        seed=config.seed,
        weights=config.weights,
        m=config.m,
        collision_tol=config.collision_tol,
        cluster_tol=config.cluster_tol,
        nodal=config.nodal,
        zero_tol=config.zero_tol,
        workers=config.workers,
    )
    summary = result["summary"]
    payload = {
        "aggregates": summary.aggregates(),
        "rows": [row._asdict() for row in summary.rows],
        "params": result["params"],
    }
    _write(render_json(payload), out, "ensemble.json", stream)
    if out is not None:
        emit(
            render_csv(ENSEMBLE_COLUMNS, summary.rows, config.timestamp),
            path=Path(out) / "ensemble.csv",
        )
    return EXIT_OK


def cmd_convergence(config: ExperimentConfig, out: Optional[str], stream, svg: Optional[str] = None) -> int:
    simulation = ConvergenceSimulation(
        scenario=config.scenario, preset=config.preset, euler=config.euler,
        seed=config.seed, modes=config.modes, amplitude=config.amplitude,
        solver=_solver(config),
    )
    index = config.index if config.index is not None else 1
    alpha = config.alpha[0] if isinstance(config.alpha, tuple) else config.alpha
    result = simulation.run(
        resolutions=config.resolutions, alpha=alpha, index=index,
        lambdas=config.lambdas, alpha_max=config.alpha_max,
    )
    _write(render_csv(result["header"], result["rows"], config.timestamp), out, "convergence.csv", stream)
    if out is not None:
        emit(render_json(result["summary"]), path=Path(out) / "convergence.json")
    if svg is not None:
        from bundle_spectra.plotting import save_convergence_svg

        save_convergence_svg(result, svg)
    return EXIT_OK


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def run(argv: Optional[Sequence[str]] = None, stream=None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    stream = stream if stream is not None else sys.stdout
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.no_timestamp:
        overrides["timestamp"] = False
    config = config.replace(**overrides)
    config.validate()

    if args.print_config:
        emit(render_json(config.to_dict()), stream=stream)
        return EXIT_OK

    logger.info("running %s", args.command)
    if args.command == "spectrum":
        return cmd_spectrum(config, args.out, stream)
    if args.command == "perturb-check":
        return cmd_perturb_check(config, args.out, stream)
    if args.command == "nodal":
        return cmd_nodal(config, args.out, stream)
    if args.command == "ensemble":
        return cmd_ensemble(config, args.out, stream)
    return cmd_convergence(config, args.out, stream, svg=args.svg)


def main(argv: Optional[List[str]] = None) -> int:
    """Console entry point; maps exceptions to exit codes."""
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DiscretizationError, MetricNotPositiveError, UnsupportedConfigurationError) as exc:
        minimal = getattr(exc, "minimal", None)
        suffix = "" if minimal is None else f" (minimal admissible value {minimal:g})"
        print(f"invalid parameters: {exc}{suffix}", file=sys.stderr)
        return EXIT_DISCRETIZATION
    except DegenerateBranchError as exc:
        print(f"degenerate branch: {exc}", file=sys.stderr)
        return EXIT_FORMULA
    except ConvergenceError as exc:
        residuals = ", ".join("%.3e" % r for r in exc.residuals)
        print(f"eigensolver failed: {exc}; best residuals [{residuals}]", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

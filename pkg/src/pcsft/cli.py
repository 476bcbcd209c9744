"""
Command-line driver.

Subcommands::

    pcsft dequantize-check --config CFG   # kappa sweep of the remainder + exact/MC cross-checks
    pcsft parallelism-demo --config CFG   # oracle applied to a random field, Deutsch-Jozsa readout
    pcsft field-stats      --config CFG   # sampler checks: mean, dispersion, covariance, J-invariance

Common flags: ``--seed INT``, ``--samples INT``, ``--workers INT``,
``--output PATH``, ``--format json|csv``.  Flags override config values.

The config is a JSON object with any of the keys

    dimension, kappa, kappa_grid, sample_count, seed, workers,
    variable_spec, function_spec, state, output, format, dump

Relative paths inside a config resolve against the config file's directory.
``state`` is ``"mixed"`` (kappa I/n), ``"basis"`` (|0>) or a list of
amplitudes (numbers or ``re:im`` strings, normalized on load).

Report JSON keys (fixed, in this order): command, version, seed, config
(the effective configuration, minus ``workers`` and ``output``), checks,
table, pass, seconds.  Each check is {name, expected, observed, tolerance,
pass}.  ``table`` holds the kappa sweep rows for dequantize-check and is
empty otherwise.  With ``--format csv`` the sweep table is written with
columns kappa, classical_avg, quantum_term, gap; for commands without a
sweep the checks are written with columns name, expected, observed,
tolerance, pass.

``field-stats --dump PATH`` writes the sampled ensemble, one sample per
line, entries ``re:im`` separated by commas.

Exit status: 0 if every check passed, 1 if any check failed, 2 on invalid
input (a JSON error object is printed to stderr).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .dequantizer import (
    DEFAULT_KAPPA_GRID,
    quantum_average,
    remainder_scaling_exponent,
    spec_from_density,
    to_density_operator,
    to_observable,
)
from .errors import ParseError, PcsftError, ValidationError
from .formats import dump_ensemble, load_boolean_function, load_variable, parse_complex
from .gaussian_fields import (
    GaussianFieldSpec,
    dispersion_stderr,
    empirical_covariance_c,
    empirical_dispersion,
    empirical_mean,
    empirical_pseudo_covariance,
    empirical_real_covariance,
    mixed_state_spec,
    pure_state_spec,
    sample_fields,
)
from .hilbert_core import real_operator_of
from .prequantum_variables import PrequantumVariable, classical_average_exact, classical_average_mc
from .quantum_register import (
    deutsch_jozsa_demo,
    deutsch_jozsa_statevector,
    oracle_unitary,
    parallel_evaluation_state,
    pushforward_samples,
    uniform_superposition,
)

SIGMAS = 5.0
SLOPE_TOL = 1e-3
R2_TOL = 1e-3
EXACT_TOL = 1e-12


def derive_seed(seed: int, name: str) -> int:
    """Deterministic per-experiment seed from the global seed."""
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass
class ExperimentConfig:
    dimension: int | None = None
    kappa: float | None = None
    kappa_grid: list | None = None
    sample_count: int = 100_000
    seed: int = 0
    workers: int = 1
    variable_spec: str | None = None
    function_spec: str | None = None
    state: object = "mixed"
    output: str | None = None
    format: str = "json"
    dump: str | None = None
    base_dir: Path = field(default=Path("."), repr=False)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except OSError as exc:
            raise ParseError(f"cannot read config: {exc.strerror}", path=path) from None
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, path) from None
        if not isinstance(raw, dict):
            raise ParseError("config must be a JSON object", path=path)
        known = {f.name for f in fields(cls)} - {"base_dir"}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ParseError(f"unknown config keys: {', '.join(unknown)}", path=path)
        return cls(**raw, base_dir=path.parent)

    def validate(self) -> None:
        if self.dimension is not None and int(self.dimension) < 1:
            raise ValidationError(f"dimension must be >= 1, got {self.dimension}")
        if int(self.sample_count) < 1:
            raise ValidationError(f"sample_count must be >= 1, got {self.sample_count}")
        if int(self.workers) < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")
        if self.kappa is not None and not float(self.kappa) > 0:
            raise ValidationError(f"kappa must be > 0, got {self.kappa}")
        if self.kappa_grid is not None and any(not float(k) > 0 for k in self.kappa_grid):
            raise ValidationError("kappa_grid values must be > 0")
        if self.format not in ("json", "csv"):
            raise ValidationError(f"format must be json or csv, got {self.format!r}")

    def resolve(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    def echo(self) -> dict:
        # where and how the run executes must not change the report
        d = asdict(self)
        d.pop("base_dir")
        d.pop("workers")
        d.pop("output")
        return d


@dataclass
class Check:
    name: str
    expected: object
    observed: object
    tolerance: object
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "observed": self.observed,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
        }


def within(name, expected, observed, tol) -> Check:
    expected, observed, tol = float(expected), float(observed), float(tol)
    return Check(name, expected, observed, tol, abs(observed - expected) <= tol)


def at_most(name, observed, bound) -> Check:
    return Check(name, 0.0, float(observed), float(bound), float(observed) <= float(bound))


@dataclass
class Report:
    command: str
    seed: int
    config: dict
    checks: list = field(default_factory=list)
    table: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "seed": self.seed,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "table": self.table,
            "pass": self.passed,
            "seconds": self.seconds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.table:
            cols = ["kappa", "classical_avg", "quantum_term", "gap"]
            w.writerow(cols)
            for row in self.table:
                w.writerow([repr(row[c]) for c in cols])
        else:
            w.writerow(["name", "expected", "observed", "tolerance", "pass"])
            for c in self.checks:
                d = c.to_dict()
                w.writerow([d["name"], _csv_cell(d["expected"]), _csv_cell(d["observed"]),
                            _csv_cell(d["tolerance"]), str(d["pass"]).lower()])
        return buf.getvalue()


def _csv_cell(value) -> str:
    # strings go in raw; numbers, booleans and lists in their JSON spelling
    return value if isinstance(value, str) else json.dumps(value)


def _state_spec(config: ExperimentConfig, dimension: int, kappa: float) -> GaussianFieldSpec:
    state = config.state
    if state == "mixed":
        return mixed_state_spec(dimension, kappa)
    if state == "basis":
        psi = np.zeros(dimension, dtype=complex)
        psi[0] = 1.0
        return pure_state_spec(psi, kappa)
    if isinstance(state, list):
        psi = np.array([parse_complex(s) if isinstance(s, str) else complex(s) for s in state])
        if psi.size != dimension:
            raise ValidationError(f"state has {psi.size} amplitudes, expected {dimension}")
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ValidationError("state amplitudes are all zero")
        return pure_state_spec(psi / norm, kappa)
    raise ValidationError(f"state must be 'mixed', 'basis' or a list of amplitudes, got {state!r}")


def cmd_dequantize_check(config: ExperimentConfig) -> Report:
    config.validate()
    if config.variable_spec is None:
        raise ValidationError("dequantize-check needs variable_spec")
    v = load_variable(config.resolve(config.variable_spec))
    if config.dimension is not None and int(config.dimension) != v.dimension:
        raise ValidationError(f"config dimension {config.dimension} does not match variable dimension {v.dimension}")
    if not v.has_quartic:
        raise ValidationError("remainder identically zero: variable has no quartic part")
    grid = [float(k) for k in (config.kappa_grid or DEFAULT_KAPPA_GRID)]
    D = to_density_operator(_state_spec(config, v.dimension, 1.0))
    report = Report("dequantize-check", config.seed, config.echo())

    fit = remainder_scaling_exponent(v, D, grid)
    report.checks.append(within("remainder_slope", 2.0, fit.slope, SLOPE_TOL))
    report.checks.append(within("remainder_fit_r_squared", 1.0, fit.r_squared, R2_TOL))

    A = to_observable(v)
    quadratic_only = PrequantumVariable(v.quadratic)
    worst = 0.0
    for k, gap in zip(grid, fit.gaps):
        spec = spec_from_density(D, k)
        quantum_term = k * quantum_average(D, A)
        classical = classical_average_exact(v, spec)
        report.table.append({"kappa": k, "classical_avg": classical, "quantum_term": quantum_term, "gap": gap})
        worst = max(worst, abs(classical_average_exact(quadratic_only, spec) - quantum_term))
    report.checks.append(at_most("first_order_exact_for_quadratic_part", worst, EXACT_TOL))

    k_mc = float(config.kappa) if config.kappa is not None else max(grid)
    spec = spec_from_density(D, k_mc)
    e = sample_fields(spec, int(config.sample_count), derive_seed(config.seed, "dequantize-check/mc"),
                      workers=int(config.workers))
    mc, se = classical_average_mc(v, e)
    report.checks.append(within("exact_vs_monte_carlo", classical_average_exact(v, spec), mc, SIGMAS * se))
    return report


def cmd_parallelism_demo(config: ExperimentConfig) -> Report:
    config.validate()
    if config.function_spec is None:
        raise ValidationError("parallelism-demo needs function_spec")
    f = load_boolean_function(config.resolve(config.function_spec))
    kappa = float(config.kappa) if config.kappa is not None else 1.0
    N = int(config.sample_count)
    report = Report("parallelism-demo", config.seed, config.echo())

    U = oracle_unitary(f)
    report.checks.append(Check("oracle_self_inverse", True, bool(U.compose(U).is_identity()), 0, U.compose(U).is_identity()))

    psi_f = parallel_evaluation_state(f)
    expected_support = sorted(x * 2**f.n_out + f(x) for x in range(2**f.n_in))
    observed_support = sorted(psi_f.support())
    report.checks.append(Check("support_is_graph_of_f", expected_support, observed_support, 0,
                               expected_support == observed_support))

    ancilla = np.zeros(2**f.n_out, dtype=complex)
    ancilla[0] = 1.0
    start = np.kron(uniform_superposition(f.n_in).amplitudes, ancilla)
    e = sample_fields(pure_state_spec(start, kappa), N, derive_seed(config.seed, "parallelism-demo/field"),
                      workers=int(config.workers))
    pushed = pushforward_samples(U, e)
    target = kappa * np.outer(psi_f.amplitudes, psi_f.amplitudes.conj())
    dist = float(np.linalg.norm(empirical_covariance_c(pushed) - target))
    report.checks.append(at_most("covariance_distance_to_psi_f", dist, SIGMAS * kappa / np.sqrt(N)))

    if f.n_out == 1 and (f.is_constant() or f.is_balanced()):
        exact = deutsch_jozsa_statevector(f)
        dj = deutsch_jozsa_demo(f, kappa, N, derive_seed(config.seed, "parallelism-demo/dj"),
                                workers=int(config.workers))
        report.checks.append(Check("deutsch_jozsa_verdict", exact.verdict, dj.verdict, 0, exact.verdict == dj.verdict))
        report.checks.append(within("deutsch_jozsa_p0", exact.p0_estimate, dj.p0_estimate, 1e-9))
    return report


def cmd_field_stats(config: ExperimentConfig) -> Report:
    config.validate()
    dimension = int(config.dimension) if config.dimension is not None else 8
    kappa = float(config.kappa) if config.kappa is not None else 1.0
    N = int(config.sample_count)
    spec = _state_spec(config, dimension, kappa)
    report = Report("field-stats", config.seed, config.echo())

    e = sample_fields(spec, N, derive_seed(config.seed, "field-stats/samples"), workers=int(config.workers))
    rms = kappa / np.sqrt(N)
    report.checks.append(at_most("mean_norm", np.linalg.norm(empirical_mean(e)), SIGMAS * np.sqrt(kappa / N)))
    report.checks.append(within("dispersion", kappa, empirical_dispersion(e), SIGMAS * dispersion_stderr(e)))
    report.checks.append(at_most(
        "covariance_error", np.linalg.norm(empirical_covariance_c(e) - spec.covariance_c), SIGMAS * rms))
    report.checks.append(at_most(
        "pseudo_covariance_norm", np.linalg.norm(empirical_pseudo_covariance(e)), SIGMAS * rms))
    embedded = real_operator_of(spec.covariance_c)
    B = embedded / 2
    sigma_real = np.sqrt((kappa**2 + 4 * np.linalg.norm(B) ** 2) / N)
    report.checks.append(at_most(
        "complex_equals_twice_real_covariance", np.linalg.norm(2 * empirical_real_covariance(e) - embedded),
        SIGMAS * sigma_real))
    if config.dump:
        config.resolve(config.dump).write_text(dump_ensemble(e))
    return report


COMMANDS = {
    "dequantize-check": cmd_dequantize_check,
    "parallelism-demo": cmd_parallelism_demo,
    "field-stats": cmd_field_stats,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcsft", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON experiment config")
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int, help="Monte Carlo sample count")
        p.add_argument("--workers", type=int, help="sampling threads (results do not depend on it)")
        p.add_argument("--output", help="report path (default: stdout)")
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--kappa", type=float)
        if name == "dequantize-check":
            p.add_argument("--variable", dest="variable_spec", help="variable file")
        if name == "parallelism-demo":
            p.add_argument("--function", dest="function_spec", help="Boolean function file")
        if name == "field-stats":
            p.add_argument("--dimension", type=int)
            p.add_argument("--dump", help="write the sampled ensemble to this path")
    return parser


def _config_from_args(args) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    overrides = {
        "seed": args.seed,
        "sample_count": args.samples,
        "workers": args.workers,
        "output": args.output,
        "format": args.format,
        "kappa": args.kappa,
    }
    for key in ("variable_spec", "function_spec", "dimension", "dump"):
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    # paths given on the command line are relative to the working directory
    for key in ("variable_spec", "function_spec", "dump", "output"):
        if getattr(args, key, None) is not None:
            setattr(config, key, str(Path(getattr(args, key)).resolve()))
    return config


def run(argv=None) -> tuple[int, str]:
    """Run the CLI and return (exit status, rendered report)."""
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        config = _config_from_args(args)
        report = COMMANDS[args.command](config)
    except PcsftError as exc:
        err = {"command": args.command, "error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(err), file=sys.stderr)
        return 2, ""
    report.seconds = time.perf_counter() - start
    text = report.to_csv() if config.format == "csv" else report.to_json()
    if config.output:
        config.resolve(config.output).write_text(text)
    else:
        sys.stdout.write(text)
    return (0 if report.passed else 1), text


def main(argv=None) -> int:
    status, _ = run(argv)
    return status


if __name__ == "__main__":
    sys.exit(main())

"""Experiment orchestration: convergence sweeps, scheme comparisons, and file output.

A run executes the Monte Carlo error estimator once per mesh size, fits
convergence slopes (per interval and for the max-over-intervals aggregate),
and writes:

* errors CSV      -- header ``N,h,j,err,spread,K,p``, one row per (N, j)
* slopes CSV      -- header ``kind,from_N,to_N,slope`` with one ``pairwise``
                     row per consecutive mesh pair and final ``ols``/``r2``
                     rows (written next to the errors CSV as
                     ``<stem>_slopes.csv``)
* optional SVG    -- log-log points plus the fitted line

All numbers are emitted with 17 significant digits and LF line endings, so
equal seeds and configurations reproduce output files byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import TextIO

from .analysis import (
    DegenerateSlopeError,
    ErrorTable,
    ReferenceSpec,
    SlopeReport,
    fit_slopes,
    mc_error,
)
from .core import ConfigError, Trajectory
from .problems import ProblemPreset
from .randomness import derive_stream
from .solvers import SCHEMES, SolverConfig, classical_euler, randomized_euler
from .svgplot import Series, render_loglog

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "ComparisonResult",
    "run_experiment",
    "compare_schemes",
    "solve_trajectory",
    "write_error_csv",
    "write_slopes_csv",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a convergence experiment depends on.

    Exactly one of ``ref`` or ``oracle`` selects the error baseline; oracle
    mode requires the preset to carry a closed-form solution.
    """

    preset: ProblemPreset
    N_list: tuple[int, ...]
    K: int = 200
    ref: ReferenceSpec | None = None
    seed: int = 0
    p: float = 2.0
    scheme: str = "randomized"
    oracle: bool = False
    csv_path: str | Path | None = None
    svg_path: str | Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "N_list", tuple(int(N) for N in self.N_list))
        if not self.N_list:
            raise ConfigError("N_list must not be empty")
        if any(N < 1 for N in self.N_list):
            raise ConfigError(f"mesh sizes must be positive, got {self.N_list}")
        if len(set(self.N_list)) != len(self.N_list):
            raise ConfigError(f"duplicate mesh sizes in {self.N_list}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not isinstance(self.K, int) or self.K < 1:
            raise ConfigError(f"sample count K must be a positive integer, got {self.K!r}")
        if self.oracle and self.ref is not None:
            raise ConfigError("choose either oracle mode or a reference spec, not both")
        if not self.oracle and self.ref is None:
            raise ConfigError("a reference spec is required unless oracle mode is chosen")
        if self.oracle and self.preset.exact_solution is None:
            raise ConfigError(
                f"preset {self.preset.name!r} has no closed-form solution for oracle mode"
            )
        if not self.p >= 1.0:
            raise ConfigError(f"norm order p must be >= 1, got {self.p!r}")


@dataclass(frozen=True)
class ExperimentResult:
    table: ErrorTable
    slopes: SlopeReport | None
    per_interval: dict[int, SlopeReport]
    degenerate: str | None
    csv_path: Path | None
    slopes_csv_path: Path | None
    svg_path: Path | None

    @property
    def exit_code(self) -> int:
        return 2 if self.table.partial else 0


@dataclass(frozen=True)
class ComparisonResult:
    randomized: ExperimentResult
    classical: ExperimentResult

    @property
    def exit_code(self) -> int:
        return max(self.randomized.exit_code, self.classical.exit_code)


def _format(value) -> str:
    return f"{value:.17g}"


def write_error_csv(table: ErrorTable, out: TextIO) -> None:
    out.write("N,h,j,err,spread,K,p\n")
    for r in table.rows:
        out.write(
            f"{r.N},{_format(r.h)},{r.j},{_format(r.err)},{_format(r.spread)},{r.K},{_format(r.p)}\n"
        )


def write_slopes_csv(report: SlopeReport | None, out: TextIO) -> None:
    out.write("kind,from_N,to_N,slope\n")
    if report is None:
        return
    for from_n, to_n, slope in report.pairwise:
        out.write(f"pairwise,{from_n},{to_n},{_format(slope)}\n")
    out.write(f"ols,,,{_format(report.ols_slope)}\n")
    out.write(f"r2,,,{_format(report.r_squared)}\n")


def _slopes_path(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.stem + "_slopes" + csv_path.suffix)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Estimate errors per mesh size, fit slopes, and write any requested files."""
    preset = config.preset
    oracle = preset.exact_solution if config.oracle else None
    tables = [
        mc_error(
            preset.problem,
            N,
            K=config.K,
            ref=config.ref,
            master_seed=config.seed,
            p=config.p,
            scheme=config.scheme,
            oracle=oracle,
        )
        for N in sorted(config.N_list)
    ]
    table = ErrorTable.merge(tables)

    degenerate = None
    slopes = None
    try:
        slopes = fit_slopes(table, "max")
    except DegenerateSlopeError as exc:
        degenerate = str(exc)
    per_interval: dict[int, SlopeReport] = {}
    for j in table.intervals():
        try:
            per_interval[j] = fit_slopes(table, j)
        except DegenerateSlopeError:
            continue

    csv_path = slopes_csv_path = svg_path = None
    if config.csv_path is not None:
        csv_path = Path(config.csv_path)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", newline="") as fh:
            write_error_csv(table, fh)
        slopes_csv_path = _slopes_path(csv_path)
        with open(slopes_csv_path, "w", newline="") as fh:
            write_slopes_csv(slopes, fh)
    if config.svg_path is not None:
        points = tuple(
            (h, e) for (_, h, e) in table.max_over_intervals() if e > 0.0
        )
        if points:
            series = [
                Series(
                    label=f"max over j (slope {slopes.ols_slope:.2f})" if slopes else "max over j",
                    points=points,
                    fit=(slopes.ols_slope, slopes.ols_intercept) if slopes else None,
                )
            ]
            if len(table.intervals()) > 1 and len(table.intervals()) <= 6:
                for j in table.intervals():
                    jpts = tuple((r.h, r.err) for r in table.for_interval(j) if r.err > 0.0)
                    if jpts:
                        series.append(Series(label=f"interval j={j}", points=jpts))
            svg_path = Path(config.svg_path)
            svg_path.parent.mkdir(parents=True, exist_ok=True)
            svg_path.write_text(
                render_loglog(
                    series,
                    title=f"{preset.name}: {config.scheme} scheme",
                    xlabel="step size h",
                    ylabel=f"L^{config.p:g} error",
                )
            )
    return ExperimentResult(
        table=table,
        slopes=slopes,
        per_interval=per_interval,
        degenerate=degenerate,
        csv_path=csv_path,
        slopes_csv_path=slopes_csv_path,
        svg_path=svg_path,
    )


def _suffixed(path, suffix: str) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    return p.with_name(p.stem + "_" + suffix + p.suffix)


def compare_schemes(config: ExperimentConfig) -> ComparisonResult:
    """Run the experiment once per scheme against identical reference data.

    Reference trajectories depend only on (seed, sample, reference mesh), so
    both schemes are measured against the same realizations.
    """
    results = {}
    for scheme in SCHEMES:
        scheme_cfg = replace(
            config,
            scheme=scheme,
            csv_path=_suffixed(config.csv_path, scheme),
            svg_path=_suffixed(config.svg_path, scheme),
        )
        results[scheme] = run_experiment(scheme_cfg)
    return ComparisonResult(randomized=results["randomized"], classical=results["classical"])


def solve_trajectory(preset: ProblemPreset, N: int, scheme: str = "randomized", seed: int = 0) -> Trajectory:
    """Single solver run for a preset, with the stream derived from the seed."""
    if scheme == "randomized":
        stream = derive_stream(seed, "solve", [N])
        return randomized_euler(preset.problem, SolverConfig(N=N, stream=stream))
    return classical_euler(preset.problem, SolverConfig(N=N, scheme="classical"))

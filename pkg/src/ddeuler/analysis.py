"""Monte Carlo error estimation and convergence-slope regression.

For each sample a coarse run and a reference run (finer mesh, same scheme
family, distinct substreams) are compared on the coarse grid; the estimator
aggregates, per lag interval j,

    err_j = ( (1/K) * sum_k  max_i |y~_i^j - y_i^j|^p )^(1/p),

the L^p(Omega) estimate of the max-over-grid deviation, together with the
sample standard deviation of the per-sample maxima.  Slopes come from
pairwise differences of consecutive (log N, log err) points and from an
ordinary least-squares fit of log err against log h; a clean power law
err = c*h^s makes both equal s.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from . import _batch
from .core import ConfigError, DDEProblem, ValidationError, restrict
from .problems import ProblemPreset
from .randomness import derive_stream
from .solvers import (
    SCHEMES,
    DivergenceError,
    SolverConfig,
    classical_euler,
    pair_streams,
    randomized_euler,
)

__all__ = [
    "ErrorRow",
    "SampleFailure",
    "ErrorTable",
    "ReferenceSpec",
    "SlopeReport",
    "DegenerateSlopeError",
    "mc_error",
    "fit_slopes",
]


@dataclass(frozen=True)
class ErrorRow:
    """One (N, interval) entry of the error table."""

    N: int
    h: float
    j: int
    err: float
    spread: float
    K: int
    p: float


@dataclass(frozen=True)
class SampleFailure:
    """A Monte Carlo sample whose solver run diverged."""

    sample: int
    N: int
    detail: str


@dataclass(frozen=True)
class ErrorTable:
    """Rows sorted by (N, j), plus any per-sample failures."""

    rows: tuple[ErrorRow, ...]
    failures: tuple[SampleFailure, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "rows", tuple(sorted(self.rows, key=lambda r: (r.N, r.j)))
        )
        for row in self.rows:
            if row.err < 0 or row.K < 1:
                raise ValidationError(f"invalid error row {row}")

    @property
    def partial(self) -> bool:
        return bool(self.failures)

    def n_values(self) -> tuple[int, ...]:
        return tuple(sorted({r.N for r in self.rows}))

    def intervals(self) -> tuple[int, ...]:
        return tuple(sorted({r.j for r in self.rows}))

    def for_interval(self, j: int) -> tuple[ErrorRow, ...]:
        return tuple(r for r in self.rows if r.j == j)

    def max_over_intervals(self) -> tuple[tuple[int, float, float], ...]:
        """Per N: (N, h, max over j of err) -- the displayed aggregate."""
        out = []
        for N in self.n_values():
            rows = [r for r in self.rows if r.N == N]
            out.append((N, rows[0].h, max(r.err for r in rows)))
        return tuple(out)

    @staticmethod
    def merge(tables: Sequence["ErrorTable"]) -> "ErrorTable":
        rows: list[ErrorRow] = []
        failures: list[SampleFailure] = []
        for t in tables:
            rows.extend(t.rows)
            failures.extend(t.failures)
        return ErrorTable(tuple(rows), tuple(failures))


@dataclass(frozen=True)
class ReferenceSpec:
    """How the reference mesh refines the coarse one: a factor or an absolute step.

    An absolute step is rounded to the nearest exact refinement of the coarse
    mesh (the reference grid must contain the coarse nodes); the requested
    step must be within one part in 10^6 of an exact divisor.
    """

    m: int | None = None
    step: float | None = None

    def __post_init__(self):
        if (self.m is None) == (self.step is None):
            raise ConfigError("specify exactly one of refinement factor m or absolute step")
        if self.m is not None and (not isinstance(self.m, int) or self.m < 1):
            raise ConfigError(f"refinement factor must be a positive integer, got {self.m!r}")
        if self.step is not None and not self.step > 0:
            raise ConfigError(f"reference step must be positive, got {self.step!r}")

    @classmethod
    def by_factor(cls, m: int) -> "ReferenceSpec":
        return cls(m=m)

    @classmethod
    def by_step(cls, step: float) -> "ReferenceSpec":
        return cls(step=step)

    def resolve(self, tau: float, N: int) -> int:
        """Refinement factor for a coarse mesh with N steps per interval."""
        if self.m is not None:
            return self.m
        h = tau / N
        m = max(1, round(h / self.step))
        if abs(h / (m * self.step) - 1.0) > 1e-6:
            raise ConfigError(
                f"reference step {self.step} does not evenly refine h={h} (closest factor {m})"
            )
        return m


def _sample_deviations_scalar(problem, N, m, sample_stream, scheme, share_streams, oracle):
    """Per-interval max deviation for one sample via the scalar solvers."""
    coarse_stream, ref_stream = pair_streams(sample_stream, N, m or 1, share_streams)
    if scheme == "randomized":
        coarse = randomized_euler(problem, SolverConfig(N=N, stream=coarse_stream))
    else:
        coarse = classical_euler(problem, SolverConfig(N=N, scheme="classical"))
    if oracle is not None:
        dev = np.empty(problem.n + 1)
        for j in range(problem.n + 1):
            times = coarse.mesh.interval_times(j)
            exact = np.asarray(oracle(times), dtype=float)
            if exact.ndim == 1:
                exact = exact[:, None]
            diff = coarse.values[j] - exact
            dev[j] = np.sqrt((diff * diff).sum(axis=-1)).max()
        return dev
    fine = randomized_euler(problem, SolverConfig(N=m * N, stream=ref_stream))
    reference = restrict(fine, m)
    diff = reference.values - coarse.values
    return np.sqrt((diff * diff).sum(axis=-1)).max(axis=1)


def mc_error(
    problem: DDEProblem | ProblemPreset,
    N: int,
    *,
    K: int,
    ref: ReferenceSpec | None = None,
    master_seed: int = 0,
    p: float = 2.0,
    scheme: str = "randomized",
    oracle: Callable | None = None,
    share_streams: bool = False,
) -> ErrorTable:
    """Monte Carlo L^p error estimate at one mesh size, one row per interval.

    Each sample k runs a coarse/reference pair under substreams derived from
    (master_seed, "sample", k), so the result is a pure function of the seed
    and configuration, independent of execution or chunk order.  With
    ``oracle`` the deviation is measured against a closed-form solution
    instead of a reference run.  Diverged samples are dropped from the
    aggregate and reported in ``failures``.
    """
    if isinstance(problem, ProblemPreset):
        problem = problem.problem
    if not isinstance(K, int) or K < 1:
        raise ConfigError(f"sample count K must be a positive integer, got {K!r}")
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if not (p >= 1.0):
        raise ConfigError(f"norm order p must be >= 1, got {p!r}")
    if (ref is None) == (oracle is None):
        raise ConfigError("specify exactly one of a reference spec or an oracle")
    m = None
    if ref is not None:
        m = ref.resolve(problem.tau, N)
        if m == 1 and not share_streams:
            # permitted, but only meaningful as a self-test configuration
            warnings.warn("refinement m=1 compares two equal-resolution runs", stacklevel=2)

    sample_streams = [derive_stream(master_seed, "sample", [s]) for s in range(K)]
    if problem.rhs.vectorized:
        if scheme == "randomized":
            coarse_streams = [s.child("coarse", N) for s in sample_streams]
        else:
            coarse_streams = [None] * K
        if oracle is not None:
            dev = _batch.oracle_deviations(problem, N, coarse_streams, scheme, oracle)
        else:
            role = "coarse" if share_streams else "reference"
            fine_streams = [s.child(role, m * N) for s in sample_streams]
            dev = _batch.pair_deviations(problem, N, m, coarse_streams, fine_streams, scheme)
        failures = tuple(
            SampleFailure(s, N, "non-finite state in solver run")
            for s in range(K)
            if not np.isfinite(dev[s]).all()
        )
    else:
        dev = np.empty((K, problem.n + 1))
        failure_list = []
        for s, stream in enumerate(sample_streams):
            try:
                dev[s] = _sample_deviations_scalar(
                    problem, N, m, stream, scheme, share_streams, oracle
                )
            except DivergenceError as exc:
                dev[s] = np.nan
                failure_list.append(SampleFailure(s, N, str(exc)))
        failures = tuple(failure_list)

    completed = dev[np.isfinite(dev).all(axis=1)]
    if completed.shape[0] == 0:
        return ErrorTable((), failures)
    h = problem.tau / N
    rows = []
    for j in range(problem.n + 1):
        column = completed[:, j]
        if math.isinf(p):
            err = float(column.max())
        else:
            err = float(np.mean(column**p) ** (1.0 / p))
        spread = float(np.std(column, ddof=1)) if column.size > 1 else 0.0
        rows.append(ErrorRow(N=N, h=h, j=j, err=err, spread=spread, K=column.size, p=p))
    return ErrorTable(tuple(rows), failures)


class DegenerateSlopeError(ConfigError):
    """The table has too few usable (positive-error) points for a slope fit."""


@dataclass(frozen=True)
class SlopeReport:
    """Pairwise slopes between consecutive mesh sizes plus an OLS fit.

    ``pairwise`` entries are (from_N, to_N, slope) with
    slope = -dlog(err)/dlog(N); ``ols_slope`` is the regression coefficient of
    log err on log h.  Both are positive for a decaying error.
    """

    pairwise: tuple[tuple[int, int, float], ...]
    ols_slope: float
    ols_intercept: float
    r_squared: float
    n_points: int
    notes: tuple[str, ...] = ()

    @property
    def mean_pairwise(self) -> float:
        return float(np.mean([s for _, _, s in self.pairwise]))


def fit_slopes(table: ErrorTable, aggregate: int | Literal["max"] = "max") -> SlopeReport:
    """Convergence slopes from an error table.

    ``aggregate`` selects one interval index, or "max" for the max-over-
    intervals error (the usual headline quantity).  Rows with zero error are
    excluded from the logs, with a note; fewer than two usable points is an
    error.
    """
    if aggregate == "max":
        points = [(N, h, e) for (N, h, e) in table.max_over_intervals()]
    else:
        points = [(r.N, r.h, r.err) for r in table.for_interval(int(aggregate))]
    points.sort(key=lambda t: t[0])
    notes = []
    usable = [(N, h, e) for (N, h, e) in points if e > 0.0]
    dropped = len(points) - len(usable)
    if dropped:
        notes.append(f"dropped {dropped} zero-error points from the log-log fit")
    if len(usable) < 2:
        if points and not usable:
            raise DegenerateSlopeError("degenerate: zero errors")
        raise DegenerateSlopeError(
            f"degenerate: {len(usable)} usable points, need at least 2"
        )
    log_n = np.log([N for N, _, _ in usable])
    log_h = np.log([h for _, h, _ in usable])
    log_e = np.log([e for _, _, e in usable])
    pairwise = tuple(
        (
            usable[i][0],
            usable[i + 1][0],
            float(-(log_e[i + 1] - log_e[i]) / (log_n[i + 1] - log_n[i])),
        )
        for i in range(len(usable) - 1)
    )
    slope, intercept = np.polyfit(log_h, log_e, 1)
    pred = intercept + slope * log_h
    ss_res = float(np.sum((log_e - pred) ** 2))
    ss_tot = float(np.sum((log_e - log_e.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SlopeReport(
        pairwise=pairwise,
        ols_slope=float(slope),
        ols_intercept=float(intercept),
        r_squared=r2,
        n_points=len(usable),
        notes=tuple(notes),
    )

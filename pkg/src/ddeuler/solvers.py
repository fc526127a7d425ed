"""Euler-type steppers for constant-lag delay problems.

Both schemes march the recursion

    y_0^j    = y_N^{j-1}            (y^{-1} identically x0),
    y_{k+1}^j = y_k^j + h * f(t_eval, y_k^j, y_k^{j-1}),

over intervals j = 0..n and steps k = 0..N-1.  The randomized scheme draws
t_eval = t_k^j + h*u with u uniform on [0, 1) from the supplied stream, one
draw per step in (j, k) lexicographic order -- exactly (n+1)*N draws per run.
The classical scheme evaluates at the left node t_k^j and consumes no
randomness.  The delayed argument is always the stored grid value of the
previous interval, never an interpolation: the lag is N steps by construction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigError,
    DDEProblem,
    Trajectory,
    ValidationError,
    make_mesh,
    restrict,
)
from .randomness import RandomStream, sample_theta

__all__ = [
    "SolverConfig",
    "DivergenceError",
    "StepCountWarning",
    "randomized_euler",
    "classical_euler",
    "solve_pair",
]

SCHEMES = ("randomized", "classical")


class StepCountWarning(UserWarning):
    """N is below ceil(tau); the convergence-rate guarantees assume N >= ceil(tau)."""


class DivergenceError(RuntimeError):
    """The recursion produced a non-finite state value."""

    def __init__(self, j: int, k: int, t_eval: float):
        self.j = j
        self.k = k
        self.t_eval = t_eval
        super().__init__(
            f"non-finite state after step k={k} of interval j={j} (f evaluated at t={t_eval!r})"
        )


@dataclass(frozen=True)
class SolverConfig:
    """Stepping configuration: steps per interval, scheme, and variate source."""

    N: int
    scheme: str = "randomized"
    stream: RandomStream | None = None

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ConfigError(f"steps per interval N must be a positive integer, got {self.N!r}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.scheme == "randomized" and self.stream is None:
            raise ConfigError("randomized scheme requires a stream")


def _warn_if_coarse(problem: DDEProblem, N: int) -> None:
    if N < math.ceil(problem.tau):
        warnings.warn(
            f"N={N} is below ceil(tau)={math.ceil(problem.tau)}; the scheme is well-defined "
            "but the convergence-rate guarantees assume N >= ceil(tau)",
            StepCountWarning,
            stacklevel=3,
        )


def _run_euler(problem: DDEProblem, N: int, stream: RandomStream | None) -> Trajectory:
    """Shared recursion; ``stream`` None selects left-node (classical) evaluation."""
    mesh = make_mesh(problem.tau, N, problem.n)
    d = problem.dim
    h = mesh.h
    rhs = problem.rhs.eval
    values = np.empty((problem.n + 1, N + 1, d))
    values[0, 0] = problem.x0
    for j in range(problem.n + 1):
        if j > 0:
            values[j, 0] = values[j - 1, N]
        delayed_row = values[j - 1] if j > 0 else None
        for k in range(N):
            if stream is not None:
                t_eval = sample_theta(stream, mesh, j, k)
            else:
                t_eval = mesh.time(j, k)
            z = problem.x0 if delayed_row is None else delayed_row[k]
            slope = np.asarray(rhs(t_eval, values[j, k], z), dtype=float)
            if slope.shape != (d,):
                raise ValidationError(
                    f"right-hand side returned shape {slope.shape}, expected ({d},)"
                )
            y_next = values[j, k] + h * slope
            if not np.isfinite(y_next).all():
                raise DivergenceError(j, k, t_eval)
            values[j, k + 1] = y_next
    return Trajectory(mesh, values, problem.x0)


def randomized_euler(problem: DDEProblem, cfg: SolverConfig) -> Trajectory:
    """Run the randomized Euler scheme; consumes (n+1)*N uniforms from cfg.stream."""
    if cfg.scheme != "randomized":
        raise ConfigError(f"randomized_euler called with scheme {cfg.scheme!r}")
    _warn_if_coarse(problem, cfg.N)
    return _run_euler(problem, cfg.N, cfg.stream)


def classical_euler(problem: DDEProblem, cfg: SolverConfig) -> Trajectory:
    """Run the deterministic left-node Euler scheme; consumes no randomness."""
    if cfg.scheme != "classical":
        raise ConfigError(f"classical_euler called with scheme {cfg.scheme!r}")
    _warn_if_coarse(problem, cfg.N)
    return _run_euler(problem, cfg.N, None)


def pair_streams(sample_stream: RandomStream, N: int, m: int, share_streams: bool = False):
    """Derived (coarse, reference) stream pair for one Monte Carlo sample.

    The two runs use distinct substreams of the sample's stream; with
    ``share_streams`` (self-test hook) the reference reuses the coarse key, so
    m = 1 reproduces the coarse run exactly.
    """
    coarse = sample_stream.child("coarse", N)
    role = "coarse" if share_streams else "reference"
    reference = sample_stream.child(role, m * N)
    return coarse, reference


def solve_pair(
    problem: DDEProblem,
    N: int,
    m: int,
    sample_stream: RandomStream,
    share_streams: bool = False,
) -> tuple[Trajectory, Trajectory]:
    """Coarse randomized run at N plus a fine reference at m*N, both on the coarse mesh.

    The reference is the same randomized scheme on the refined mesh
    t~_i^j = j*tau + i*h/m, restricted back to the coarse grid.
    """
    if not isinstance(m, int) or m < 1:
        raise ValidationError(f"refinement factor must be a positive integer, got {m!r}")
    coarse_stream, ref_stream = pair_streams(sample_stream, N, m, share_streams)
    coarse = randomized_euler(problem, SolverConfig(N=N, stream=coarse_stream))
    fine = randomized_euler(problem, SolverConfig(N=m * N, stream=ref_stream))
    return coarse, restrict(fine, m)

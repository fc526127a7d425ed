"""Problem statements, uniform meshes, and grid trajectories.

The equation solved throughout the package is the constant-lag delay
differential equation

    x'(t) = f(t, x(t), x(t - tau)),   t in [0, (n+1)*tau],
    x(t)  = x0,                       t in [-tau, 0),

discretized on the per-interval uniform mesh t_k^j = j*tau + k*h with
h = tau/N, j = 0..n, k = 0..N.  Interval right endpoints are computed as
(j+1)*tau, never as j*tau + N*h, so that t_N^j and t_0^{j+1} are the same
floating-point number; several built-in right-hand sides blow up at interval
right endpoints and rely on this identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

__all__ = [
    "ValidationError",
    "ConfigError",
    "RightHandSide",
    "DDEProblem",
    "Mesh",
    "Trajectory",
    "make_mesh",
    "trajectory_at",
    "restrict",
    "write_trajectory_csv",
]


class ValidationError(ValueError):
    """A problem, mesh, or argument violates a documented precondition."""


class ConfigError(ValidationError):
    """An experiment or solver configuration is inconsistent."""


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def as_state_vector(x, dim: int, name: str = "x0") -> np.ndarray:
    """Coerce ``x`` to a read-only float vector of length ``dim``."""
    arr = np.array(x, dtype=float, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.shape != (dim,):
        raise ValidationError(f"{name} must have dimension {dim}, got shape {arr.shape}")
    return _readonly(arr)


@dataclass(frozen=True)
class RightHandSide:
    """Right-hand side f(t, x, z) of the delay equation.

    ``eval`` must be a pure function of its arguments: repeated calls with
    identical inputs return identical vectors of length ``dim``.  When
    ``vectorized`` is true the callable must additionally accept a batch of
    states -- t of shape (B,) (or a scalar), x and z of shape (B, dim) --
    and return shape (B, dim); this enables the vectorized Monte Carlo
    driver.
    """

    dim: int
    eval: Callable
    vectorized: bool = False

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValidationError(f"state dimension must be a positive integer, got {self.dim!r}")
        if not callable(self.eval):
            raise ValidationError("eval must be callable")

    def __call__(self, t, x, z):
        return self.eval(t, x, z)


@dataclass(frozen=True)
class DDEProblem:
    """A constant-lag initial value problem on [0, (n+1)*tau].

    ``n`` counts lag intervals beyond the first, so the domain always spans
    n+1 intervals of length ``tau``.  The initial segment is the constant
    vector ``x0`` on [-tau, 0).
    """

    rhs: RightHandSide
    tau: float
    n: int
    x0: np.ndarray

    def __post_init__(self):
        if not (isinstance(self.tau, (int, float)) and math.isfinite(self.tau) and self.tau > 0):
            raise ValidationError(f"lag tau must be a positive finite real, got {self.tau!r}")
        if not isinstance(self.n, int) or self.n < 0:
            raise ValidationError(f"horizon n must be a nonnegative integer, got {self.n!r}")
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "x0", as_state_vector(self.x0, self.rhs.dim, "x0"))

    @property
    def dim(self) -> int:
        return self.rhs.dim

    @property
    def horizon(self) -> float:
        """Right end of the time domain, (n+1)*tau."""
        return (self.n + 1) * self.tau


@dataclass(frozen=True)
class Mesh:
    """Uniform per-interval grid t_k^j = j*tau + k*h, h = tau/N."""

    tau: float
    N: int
    n: int
    h: float

    def time(self, j: int, k: int) -> float:
        """Grid time t_k^j; the right endpoint k = N is exactly (j+1)*tau."""
        self._check_indices(j, k)
        if k == self.N:
            return (j + 1) * self.tau
        return j * self.tau + k * self.h

    def interval_times(self, j: int) -> np.ndarray:
        """All N+1 grid times of interval j."""
        times = j * self.tau + np.arange(self.N + 1) * self.h
        times[-1] = (j + 1) * self.tau
        return times

    def _check_indices(self, j: int, k: int, allow_initial: bool = False) -> None:
        j_low = -1 if allow_initial else 0
        if not (j_low <= j <= self.n):
            raise ValidationError(f"interval index j={j} outside {j_low}..{self.n}")
        if not (0 <= k <= self.N):
            raise ValidationError(f"step index k={k} outside 0..{self.N}")


def make_mesh(tau: float, N: int, n: int) -> Mesh:
    """Build the uniform mesh with N steps per lag interval.

    Grid times are always formed as j*tau + k*(tau/N) from the indices,
    never by accumulating h, so meshes with equal parameters are identical
    and interval endpoints coincide bitwise.
    """
    if not (isinstance(tau, (int, float)) and math.isfinite(tau) and tau > 0):
        raise ValidationError(f"lag tau must be a positive finite real, got {tau!r}")
    if not isinstance(N, int) or N < 1:
        raise ValidationError(f"steps per interval N must be a positive integer, got {N!r}")
    if not isinstance(n, int) or n < 0:
        raise ValidationError(f"horizon n must be a nonnegative integer, got {n!r}")
    tau = float(tau)
    return Mesh(tau=tau, N=N, n=n, h=tau / N)


@dataclass(frozen=True)
class Trajectory:
    """Grid values y_k^j on a mesh, plus the constant initial segment.

    ``values`` has shape (n+1, N+1, d).  Row j=-1 is not stored; it is the
    constant vector ``x0`` (see :func:`trajectory_at`).  Construction checks
    the continuity splice values[j, 0] == values[j-1, N].
    """

    mesh: Mesh
    values: np.ndarray
    x0: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        expected = (self.mesh.n + 1, self.mesh.N + 1)
        if vals.ndim != 3 or vals.shape[:2] != expected:
            raise ValidationError(
                f"values must have shape ({expected[0]}, {expected[1]}, d), got {vals.shape}"
            )
        object.__setattr__(self, "values", _readonly(vals))
        object.__setattr__(self, "x0", as_state_vector(self.x0, vals.shape[2], "x0"))
        splice_ok = np.array_equal(vals[1:, 0, :], vals[:-1, -1, :], equal_nan=True)
        if not splice_ok:
            raise ValidationError("continuity splice violated: values[j, 0] != values[j-1, N]")

    @property
    def dim(self) -> int:
        return self.values.shape[2]


def trajectory_at(traj: Trajectory, j: int, k: int) -> np.ndarray:
    """Stored value y_k^j; j = -1 returns the initial vector x0."""
    traj.mesh._check_indices(j, k, allow_initial=True)
    if j == -1:
        return traj.x0
    return traj.values[j, k]


def restrict(fine: Trajectory, m: int) -> Trajectory:
    """Keep every m-th step of each interval, returning a coarse trajectory.

    The fine mesh must have a step count divisible by m; coarse value (j, i)
    is exactly fine value (j, i*m).
    """
    if not isinstance(m, int) or m < 1:
        raise ValidationError(f"refinement factor must be a positive integer, got {m!r}")
    if fine.mesh.N % m != 0:
        raise ValidationError(f"fine step count {fine.mesh.N} not divisible by m={m}")
    if m == 1:
        return fine
    coarse_mesh = make_mesh(fine.mesh.tau, fine.mesh.N // m, fine.mesh.n)
    return Trajectory(coarse_mesh, fine.values[:, ::m, :].copy(), fine.x0)


def write_trajectory_csv(traj: Trajectory, out: TextIO) -> None:
    """Dump a trajectory as CSV: j,k,t,component_0..component_{d-1}."""
    d = traj.dim
    header = "j,k,t," + ",".join(f"component_{i}" for i in range(d))
    out.write(header + "\n")
    for j in range(traj.mesh.n + 1):
        for k in range(traj.mesh.N + 1):
            comps = ",".join(f"{v:.17g}" for v in traj.values[j, k])
            out.write(f"{j},{k},{traj.mesh.time(j, k):.17g},{comps}\n")

"""A-priori solution bounds and Hoelder-continuity certificates.

Given an integrable envelope K(t) with ||f(t,x,z)|| <= K(t)(1+||x||)(1+||z||),
the solution admits computable interval-wise bounds

    K_{-1} = ||x0||,
    K_j    = (1 + K_{j-1}) (1 + ||K||_{L1,j}) * exp((1 + K_{j-1}) ||K||_{L1,j}),

where ||K||_{L1,j} is the envelope's L1 norm over [j*tau, (j+1)*tau], and the
solution increments obey

    ||x(t) - x(s)|| <= C_j |t - s|^(1 - 1/p),
    C_j = (1 + K_{j-1}) (1 + K_j) ||K||_{Lp,j}.

The recursion grows doubly exponentially in j; entries that overflow a double
saturate to +inf, which keeps the checks sound (an infinite bound never
produces a spurious violation report).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ConfigError, Trajectory, ValidationError

__all__ = [
    "BoundCertificate",
    "IntervalBoundCheck",
    "IntervalHolderCheck",
    "BoundReport",
    "HolderReport",
    "bound_certificate",
    "check_bounds",
    "check_holder",
]


@dataclass(frozen=True)
class BoundCertificate:
    """Per-interval solution bounds K_j and Hoelder constants C_j.

    ``K`` stores K_{-1}..K_n (so K[0] is the initial-value norm); ``holder``
    stores C_0..C_n computed for norm order ``p``.
    """

    K: tuple[float, ...]
    holder: tuple[float, ...]
    l1_norms: tuple[float, ...]
    lp_norms: tuple[float, ...]
    x0_norm: float
    p: float

    def K_j(self, j: int) -> float:
        """Solution bound for interval j (j = -1 gives ||x0||)."""
        if not -1 <= j <= len(self.K) - 2:
            raise ValidationError(f"interval index {j} outside -1..{len(self.K) - 2}")
        return self.K[j + 1]

    @property
    def intervals(self) -> int:
        return len(self.holder)


def bound_certificate(
    l1_norms: Sequence[float],
    lp_norms: Sequence[float],
    x0_norm: float,
    p: float,
) -> BoundCertificate:
    """Evaluate the bound recursion from per-interval envelope norms."""
    if len(l1_norms) != len(lp_norms) or not l1_norms:
        raise ConfigError("need equal, nonempty per-interval L1 and Lp norm sequences")
    if any(v < 0 for v in l1_norms) or any(v < 0 for v in lp_norms):
        raise ConfigError("envelope norms must be nonnegative")
    if x0_norm < 0:
        raise ConfigError("x0 norm must be nonnegative")
    if not p > 1:
        raise ConfigError(f"norm order p must exceed 1, got {p!r}")
    ks = [float(x0_norm)]
    with np.errstate(over="ignore"):
        for l1 in l1_norms:
            prev = ks[-1]
            ks.append(float((1.0 + prev) * (1.0 + l1) * np.exp((1.0 + prev) * l1)))
    holder = tuple(
        (1.0 + ks[j]) * (1.0 + ks[j + 1]) * lp_norms[j] for j in range(len(lp_norms))
    )
    return BoundCertificate(
        K=tuple(ks),
        holder=holder,
        l1_norms=tuple(float(v) for v in l1_norms),
        lp_norms=tuple(float(v) for v in lp_norms),
        x0_norm=float(x0_norm),
        p=float(p),
    )


@dataclass(frozen=True)
class IntervalBoundCheck:
    j: int
    observed: float
    limit: float
    ok: bool


@dataclass(frozen=True)
class IntervalHolderCheck:
    j: int
    worst_ratio: float
    limit: float
    ok: bool
    worst_pair: tuple[int, int]


@dataclass(frozen=True)
class BoundReport:
    entries: tuple[IntervalBoundCheck, ...]

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def violations(self) -> tuple[IntervalBoundCheck, ...]:
        return tuple(e for e in self.entries if not e.ok)


@dataclass(frozen=True)
class HolderReport:
    entries: tuple[IntervalHolderCheck, ...]
    exponent: float

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def violations(self) -> tuple[IntervalHolderCheck, ...]:
        return tuple(e for e in self.entries if not e.ok)


def check_bounds(traj: Trajectory, cert: BoundCertificate) -> BoundReport:
    """Report, per interval, whether max_k ||y_k^j|| <= K_j."""
    if cert.intervals < traj.mesh.n + 1:
        raise ConfigError(
            f"certificate covers {cert.intervals} intervals, trajectory has {traj.mesh.n + 1}"
        )
    entries = []
    for j in range(traj.mesh.n + 1):
        observed = float(np.sqrt((traj.values[j] ** 2).sum(axis=-1)).max())
        limit = cert.K_j(j)
        entries.append(IntervalBoundCheck(j, observed, limit, observed <= limit))
    return BoundReport(tuple(entries))


def check_holder(traj: Trajectory, cert: BoundCertificate, p: float | None = None) -> HolderReport:
    """Report, per interval, whether all grid increments obey the Hoelder bound.

    Checks ||y_i^j - y_k^j|| <= C_j * |t_i - t_k|^(1 - 1/p) over every grid
    pair within each interval (p = inf gives the Lipschitz case, exponent 1).
    """
    if p is None:
        p = cert.p
    elif p != cert.p:
        raise ConfigError(f"norm order {p} does not match the certificate's p={cert.p}")
    exponent = 1.0 if math.isinf(p) else 1.0 - 1.0 / p
    if cert.intervals < traj.mesh.n + 1:
        raise ConfigError(
            f"certificate covers {cert.intervals} intervals, trajectory has {traj.mesh.n + 1}"
        )
    N = traj.mesh.N
    entries = []
    for j in range(traj.mesh.n + 1):
        limit = cert.holder[j]
        times = traj.mesh.interval_times(j)
        vals = traj.values[j]
        worst_ratio = 0.0
        worst_pair = (0, 0)
        # blockwise over the pair matrix to bound memory at N+1 ~ thousands
        for lo in range(0, N + 1, 512):
            hi = min(lo + 512, N + 1)
            diff = vals[lo:hi, None, :] - vals[None, :, :]
            dist = np.sqrt((diff * diff).sum(axis=-1))
            dt = np.abs(times[lo:hi, None] - times[None, :]) ** exponent
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(dt > 0.0, dist / dt, 0.0)
            flat = int(np.argmax(ratio))
            i_loc, k_loc = divmod(flat, N + 1)
            if ratio[i_loc, k_loc] > worst_ratio:
                worst_ratio = float(ratio[i_loc, k_loc])
                worst_pair = (lo + i_loc, k_loc)
        entries.append(
            IntervalHolderCheck(j, worst_ratio, limit, worst_ratio <= limit, worst_pair)
        )
    return HolderReport(tuple(entries), exponent)

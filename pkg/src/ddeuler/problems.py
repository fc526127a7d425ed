"""Catalog of built-in test problems.

Five presets, all scalar (d = 1):

* ``f1``   -- singular-weight, Lipschitz-in-x forcing
              f(t,x,z) = k(t) * (x + 0.01*|z|^alpha + sin(M*x)*cos(P*|z|^alpha))
* ``f2``   -- singular-weight, only locally Lipschitz forcing
              f(t,x,z) = k(t) * sin(10*x) * P*|z|^alpha / M
* ``kainhofer``  -- x'(t) = 3*x(t-tau)*sin(lambda*t), with a closed-form
              solution on the first two lag intervals
* ``comparison`` -- x'(t) = sin(lambda1*t) + x(t) + |x(t-1)|^alpha, a
              high-frequency forcing the deterministic scheme aliases to zero
* ``wiener`` -- x'(t) = x + Z(t) + z + Z(t-tau) for one frozen Wiener
              realization Z, evaluated by piecewise-linear interpolation

The weight k(t) = ((j+1)*tau - t)^(-1/gamma) on [j*tau, (j+1)*tau) is
tau-periodic and blows up at every interval right endpoint; intervals are
treated as half-open so k is finite everywhere it is ever evaluated
(randomized nodes satisfy theta < right endpoint, classical nodes are left
nodes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import DDEProblem, RightHandSide, ValidationError
from .randomness import PiecewisePath, RandomStream, brownian_path, derive_stream, eval_path_linear

__all__ = [
    "GrowthEnvelope",
    "ProblemPreset",
    "PRESET_NAMES",
    "k_weight",
    "make_f1",
    "make_f2",
    "make_kainhofer",
    "kainhofer_exact",
    "make_comparison",
    "make_wiener_perturbed",
    "make_preset",
]

PRESET_NAMES = ("f1", "f2", "kainhofer", "comparison", "wiener")


def _column(w, like):
    """Broadcast a per-time weight against states shaped (d,) or (B, d)."""
    w = np.asarray(w, dtype=float)
    if w.ndim == 0 or np.ndim(like) <= 1:
        return w
    return w[:, None]


def k_weight(t, gamma: float, tau: float, n: int):
    """Singular weight ((j+1)*tau - t)^(-1/gamma) on the interval containing t.

    Intervals are half-open, [j*tau, (j+1)*tau): an interior multiple of tau
    belongs to the interval it starts, so the returned value is always finite.
    t = (n+1)*tau and anything outside [0, (n+1)*tau) are rejected.
    """
    if not gamma > 0:
        raise ValidationError(f"gamma must be positive, got {gamma!r}")
    tt = np.asarray(t, dtype=float)
    idx = np.floor(tt / tau).astype(np.int64)
    # the division can land one ulp off a boundary; snap to the half-open cell
    idx = np.where(tt >= (idx + 1) * tau, idx + 1, idx)
    idx = np.where(tt < idx * tau, idx - 1, idx)
    if np.any(idx < 0) or np.any(idx > n):
        raise ValidationError(
            f"time {tt[(idx < 0) | (idx > n)] if tt.ndim else float(tt)} outside [0, {(n + 1) * tau})"
        )
    out = ((idx + 1) * tau - tt) ** (-1.0 / gamma)
    if np.ndim(t) == 0:
        return float(out)
    return out


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise ValidationError(f"alpha must lie in (0, 1], got {alpha!r}")


def _check_positive(value, name: str) -> None:
    if not value > 0:
        raise ValidationError(f"{name} must be positive, got {value!r}")


def make_f1(M: float, P: float, alpha: float, gamma: float, tau: float, n: int, x0=1.0) -> DDEProblem:
    """Singular-weight problem  k(t)*(x + 0.01*|z|^alpha + sin(M*x)*cos(P*|z|^alpha))."""
    _check_alpha(alpha)
    _check_positive(gamma, "gamma")
    if M == 0:
        raise ValidationError("M must be nonzero")

    def f(t, x, z):
        w = k_weight(t, gamma, tau, n)
        az = np.abs(z) ** alpha
        return _column(w, x) * (x + 0.01 * az + np.sin(M * x) * np.cos(P * az))

    return DDEProblem(RightHandSide(1, f, vectorized=True), tau, n, x0)


def make_f2(M: float, P: float, alpha: float, gamma: float, tau: float, n: int, x0=1.0) -> DDEProblem:
    """Singular-weight problem  k(t)*sin(10*x)*P*|z|^alpha/M."""
    _check_alpha(alpha)
    _check_positive(gamma, "gamma")
    if M == 0:
        raise ValidationError("M must be nonzero")

    def f(t, x, z):
        w = k_weight(t, gamma, tau, n)
        return _column(w, x) * np.sin(10.0 * x) * (P / M) * np.abs(z) ** alpha

    return DDEProblem(RightHandSide(1, f, vectorized=True), tau, n, x0)


def make_kainhofer(lam: float, tau: float, x0=1.0, n: int = 1) -> DDEProblem:
    """Delay oscillator  x'(t) = 3*x(t-tau)*sin(lambda*t)."""
    _check_positive(lam, "lambda")

    def f(t, x, z):
        return _column(np.sin(lam * np.asarray(t, dtype=float)), x) * 3.0 * z

    return DDEProblem(RightHandSide(1, f, vectorized=True), tau, n, x0)


def kainhofer_exact(t, lam: float, tau: float, x0: float = 1.0):
    """Closed-form solution of the delay oscillator on [0, 2*tau].

    On [0, tau]:   x0 + 3*x0*(1 - cos(lam*t))/lam.
    On [tau, 2*tau] the result of integrating the first branch once more; the
    two branches agree at t = tau.
    """
    _check_positive(lam, "lambda")
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0.0) or np.any(tt > 2.0 * tau):
        raise ValidationError(f"closed form only valid on [0, {2.0 * tau}]")
    phi0 = x0 + 3.0 * x0 * (1.0 - np.cos(lam * tt)) / lam
    phi0_tau = x0 + 3.0 * x0 * (1.0 - math.cos(lam * tau)) / lam
    cos_lt = math.cos(lam * tau)
    phi1 = (
        phi0_tau
        - (9.0 * x0 / lam**2 + 3.0 * x0 / lam) * (np.cos(lam * tt) - cos_lt)
        + (9.0 * x0 / (2.0 * lam)) * (tt - tau) * math.sin(-lam * tau)
        + (9.0 * x0 / (4.0 * lam**2)) * (np.cos(2.0 * lam * tt - lam * tau) - cos_lt)
    )
    out = np.where(tt <= tau, phi0, phi1)
    if np.ndim(t) == 0:
        return float(out)
    return out


def make_comparison(lambda1: float = 2**9 * math.pi, alpha: float = 0.2, tau: float = 1.0, n: int = 2, x0=1.0) -> DDEProblem:
    """High-frequency forcing  sin(lambda1*t) + x + |z|^alpha.

    With the default lambda1 = 2^9*pi, every left node of a mesh with
    h = 2^-i, i <= 9, lands on a multiple of pi: the classical scheme sees
    the forcing as identically zero while the randomized scheme does not.
    """
    _check_alpha(alpha)
    _check_positive(lambda1, "lambda1")

    def f(t, x, z):
        s = np.sin(lambda1 * np.asarray(t, dtype=float))
        return _column(s, x) + x + np.abs(z) ** alpha

    return DDEProblem(RightHandSide(1, f, vectorized=True), tau, n, x0)


def make_wiener_perturbed(path: PiecewisePath, tau: float, n: int, x0=1.0) -> DDEProblem:
    """Linear equation driven by a frozen path:  x + Z(t) + z + Z(t-tau).

    Z is evaluated by piecewise-linear interpolation and vanishes for
    negative times, so the delayed path term is silent on the first interval.
    """
    if path.horizon < (n + 1) * tau:
        raise ValidationError(
            f"path horizon {path.horizon} shorter than the time domain {(n + 1) * tau}"
        )

    def f(t, x, z):
        tt = np.asarray(t, dtype=float)
        drive = eval_path_linear(path, tt) + eval_path_linear(path, tt - tau)
        return _column(drive, x) + x + z

    return DDEProblem(RightHandSide(1, f, vectorized=True), tau, n, x0)


@dataclass(frozen=True)
class GrowthEnvelope:
    """Integrable envelope K(t) with ||f(t,x,z)|| <= K(t)*(1+||x||)*(1+||z||).

    Either a constant, or constant * k_weight(t, gamma) when ``gamma`` is set.
    Because k is tau-periodic, per-interval norms do not depend on the
    interval; norms that fail the integrability condition come out +inf.
    """

    constant: float
    tau: float
    gamma: float | None = None

    def l1(self) -> float:
        """L1 norm over one lag interval."""
        if self.gamma is None:
            return self.constant * self.tau
        if self.gamma <= 1.0:
            return math.inf
        e = 1.0 - 1.0 / self.gamma
        return self.constant * self.tau**e / e

    def lp(self, p: float) -> float:
        """Lp norm over one lag interval (p may be inf)."""
        if self.gamma is None:
            return self.constant if math.isinf(p) else self.constant * self.tau ** (1.0 / p)
        if math.isinf(p) or self.gamma <= p:
            return math.inf
        e = 1.0 - p / self.gamma
        return self.constant * (self.tau**e / e) ** (1.0 / p)

    def l1_norms(self, n: int) -> tuple[float, ...]:
        return (self.l1(),) * (n + 1)

    def lp_norms(self, n: int, p: float) -> tuple[float, ...]:
        return (self.lp(p),) * (n + 1)


@dataclass(frozen=True)
class ProblemPreset:
    """A named catalog entry: parameters, assembled problem, and extras.

    ``exact_solution`` maps grid times to true values when a closed form is
    known (kainhofer on at most two lag intervals); ``envelope`` feeds the
    a-priori bound certificates.
    """

    name: str
    parameters: dict
    problem: DDEProblem
    exact_solution: Callable | None = None
    envelope: GrowthEnvelope | None = None
    path: PiecewisePath | None = None


_DEFAULTS: dict[str, dict] = {
    "f1": dict(M=10.0, P=100.0, alpha=1.0, gamma=5.0, tau=1.0, n=5, x0=1.0),
    "f2": dict(M=10.0, P=100.0, alpha=1.0, gamma=5.0, tau=1.0, n=5, x0=1.0),
    "kainhofer": dict(lam=2.0**8, tau=1.0, x0=1.0, n=1),
    "comparison": dict(lambda1=2**9 * math.pi, alpha=0.2, tau=1.0, n=2, x0=1.0),
    "wiener": dict(tau=2.0, n=1, x0=1.0, seed=0, h_ref=2.0**-16),
}


def make_preset(name: str, **overrides) -> ProblemPreset:
    """Assemble a preset by name, applying parameter overrides.

    Unknown parameters are rejected; see ``PRESET_NAMES`` for the catalog.
    """
    if name not in PRESET_NAMES:
        raise ValidationError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    params = dict(_DEFAULTS[name])
    unknown = set(overrides) - set(params)
    if unknown:
        raise ValidationError(f"preset {name!r} does not take parameters {sorted(unknown)}")
    params.update({k: v for k, v in overrides.items() if v is not None})
    if "n" in params:
        params["n"] = int(params["n"])

    if name == "f1":
        problem = make_f1(**params)
        envelope = GrowthEnvelope(constant=1.01, tau=params["tau"], gamma=params["gamma"])
        return ProblemPreset(name, params, problem, envelope=envelope)
    if name == "f2":
        problem = make_f2(**params)
        envelope = GrowthEnvelope(
            constant=abs(params["P"] / params["M"]), tau=params["tau"], gamma=params["gamma"]
        )
        return ProblemPreset(name, params, problem, envelope=envelope)
    if name == "kainhofer":
        problem = make_kainhofer(**params)
        exact = None
        if params["n"] <= 1:
            lam, tau, x0 = params["lam"], params["tau"], params["x0"]
            exact = lambda t: kainhofer_exact(t, lam, tau, x0)  # noqa: E731
        return ProblemPreset(
            name, params, problem, exact_solution=exact,
            envelope=GrowthEnvelope(constant=3.0, tau=params["tau"]),
        )
    if name == "comparison":
        problem = make_comparison(**params)
        return ProblemPreset(
            name, params, problem, envelope=GrowthEnvelope(constant=2.0, tau=params["tau"])
        )
    # wiener: the path is itself derived from the seed so the preset stays a
    # pure function of its parameters
    seed, h_ref = params["seed"], params["h_ref"]
    tau, n = params["tau"], params["n"]
    path = brownian_path((n + 1) * tau, h_ref, derive_stream(seed, "wiener-path"))
    problem = make_wiener_perturbed(path, tau, n, params["x0"])
    z_max = float(np.max(np.abs(path.values)))
    return ProblemPreset(
        name, params, problem, path=path,
        envelope=GrowthEnvelope(constant=1.0 + 2.0 * z_max, tau=tau),
    )

"""Reproducible keyed randomness for the randomized scheme and Brownian paths.

Streams are derived by key, not by jumping: a stream is identified by a
master seed plus a path of (role, indices) labels, hashed into a counter-based
Philox generator through ``numpy.random.SeedSequence`` spawn keys.  Equal
(master_seed, path) pairs replay bitwise-identical variate sequences, distinct
paths give statistically independent ones, and children can be derived in any
order.  This is what makes every experiment in the package a pure function of
its master seed.

Normal variates are produced by inverse-CDF transform (``scipy.special.ndtri``)
of the stream's uniforms -- a fixed, documented choice so Brownian paths are
bitwise reproducible across platforms independent of numpy's internal normal
sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np
from scipy.special import ndtri

from .core import Mesh, ValidationError

__all__ = [
    "RandomStream",
    "PiecewisePath",
    "derive_stream",
    "sample_theta",
    "brownian_path",
    "eval_path_linear",
    "write_path_csv",
]

_MAX_KEY = 2**32
# Uniform draws below this cannot occur (ndtri(0) = -inf); see normals().
_TINY_UNIFORM = 2.0**-54


def _encode_path(path) -> tuple[int, ...]:
    """Flatten a ((role, indices), ...) path into an unambiguous spawn key.

    Each element is framed as (len(role), *role_bytes, len(indices), *indices)
    so distinct paths can never collide.
    """
    key: list[int] = []
    for role, indices in path:
        raw = role.encode("utf-8")
        key.append(len(raw))
        key.extend(raw)
        key.append(len(indices))
        for idx in indices:
            if not isinstance(idx, (int, np.integer)) or not (0 <= idx < _MAX_KEY):
                raise ValidationError(f"stream index {idx!r} must be an integer in [0, 2^32)")
            key.append(int(idx))
    return tuple(key)


class RandomStream:
    """Uniform-variate source identified by (master_seed, derivation path).

    Instances are stateful consumers (they remember how far into the keyed
    sequence they have read) and must not be shared across concurrent
    consumers; derive a child per consumer instead.  Consumption pattern does
    not matter: interleaved single and block draws read the same underlying
    sequence.
    """

    __slots__ = ("master_seed", "path", "_gen", "_buf", "_pos")

    def __init__(self, master_seed: int, path=()):
        if not isinstance(master_seed, (int, np.integer)) or not (0 <= master_seed < 2**64):
            raise ValidationError(f"master seed must be an integer in [0, 2^64), got {master_seed!r}")
        self.master_seed = int(master_seed)
        self.path = tuple((str(role), tuple(idx)) for role, idx in path)
        self._gen = None
        self._buf = np.empty(0)
        self._pos = 0

    def child(self, role: str, *indices: int) -> "RandomStream":
        """Derive an independent, unconsumed substream for (role, indices)."""
        return RandomStream(self.master_seed, self.path + ((str(role), tuple(indices)),))

    def _generator(self) -> np.random.Generator:
        if self._gen is None:
            seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=_encode_path(self.path))
            self._gen = np.random.Generator(np.random.Philox(seed=seq))
        return self._gen

    def uniforms(self, count: int) -> np.ndarray:
        """Next ``count`` uniforms on [0, 1)."""
        if count < 0:
            raise ValidationError("count must be nonnegative")
        buffered = self._buf[self._pos :]
        if count <= buffered.size:
            out = buffered[:count].copy()
            self._pos += count
            return out
        fresh = self._generator().random(count - buffered.size)
        self._buf = np.empty(0)
        self._pos = 0
        return np.concatenate([buffered, fresh])

    def next_uniform(self) -> float:
        """Next single uniform on [0, 1)."""
        if self._pos >= self._buf.size:
            self._buf = self._generator().random(256)
            self._pos = 0
        value = float(self._buf[self._pos])
        self._pos += 1
        return value

    def normals(self, count: int) -> np.ndarray:
        """Next ``count`` standard normals via inverse CDF of the uniforms.

        A uniform of exactly 0 (probability 2^-53 per draw) is nudged to
        2^-54 so the transform never yields -inf.
        """
        u = self.uniforms(count)
        return ndtri(np.maximum(u, _TINY_UNIFORM))

    def __repr__(self):
        return f"RandomStream(master_seed={self.master_seed}, path={self.path!r})"


def derive_stream(master_seed: int, role: str, indices: Iterable[int] = ()) -> RandomStream:
    """Deterministic, collision-free substream for (master_seed, role, indices)."""
    return RandomStream(master_seed).child(role, *indices)


def sample_theta(stream: RandomStream, mesh: Mesh, j: int, k: int) -> float:
    """Draw the randomized evaluation time for step k of interval j.

    Returns t_k^j + h*u with u uniform on [0, 1), so the result lies in
    [t_k^j, t_{k+1}^j) and in particular never hits an interval right
    endpoint, where the built-in singular weights are infinite.
    """
    if not (0 <= k <= mesh.N - 1):
        raise ValidationError(f"step index k={k} outside 0..{mesh.N - 1}")
    t_left = mesh.time(j, k)
    return t_left + mesh.h * stream.next_uniform()


@dataclass(frozen=True)
class PiecewisePath:
    """A scalar path sampled on a uniform grid of step ``h_ref``, zero for t < 0."""

    h_ref: float
    values: np.ndarray

    def __post_init__(self):
        if not (self.h_ref > 0 and math.isfinite(self.h_ref)):
            raise ValidationError(f"path step must be positive and finite, got {self.h_ref!r}")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValidationError("path values must be a 1-d array with at least 2 nodes")
        if vals[0] != 0.0:
            raise ValidationError("path must start at 0")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def horizon(self) -> float:
        return (self.values.size - 1) * self.h_ref


def brownian_path(T: float, h_ref: float, stream: RandomStream) -> PiecewisePath:
    """One Wiener realization on the grid {0, h_ref, 2*h_ref, ...} covering [0, T].

    Cumulative sum of independent N(0, h_ref) increments with Z(0) = 0; the
    grid extends to ceil(T/h_ref) steps so the whole horizon is covered.
    """
    if not (T > 0 and math.isfinite(T)):
        raise ValidationError(f"horizon T must be positive and finite, got {T!r}")
    if not (h_ref > 0 and math.isfinite(h_ref)):
        raise ValidationError(f"path step must be positive and finite, got {h_ref!r}")
    steps = max(1, math.ceil(T / h_ref - 1e-12))
    while steps * h_ref < T:
        steps += 1
    increments = stream.normals(steps) * math.sqrt(h_ref)
    values = np.empty(steps + 1)
    values[0] = 0.0
    np.cumsum(increments, out=values[1:])
    return PiecewisePath(h_ref=float(h_ref), values=values)


def eval_path_linear(path: PiecewisePath, t):
    """Piecewise-linear interpolation of the path; 0 for t < 0.

    Accepts a scalar or an array of times.  Times beyond the stored horizon
    are rejected.  Values at grid nodes reproduce the stored samples exactly
    whenever ``h_ref`` is a power of two (the package default), since the
    index arithmetic is then exact.
    """
    tt = np.asarray(t, dtype=float)
    npts = path.values.size - 1
    if np.any(tt > path.horizon):
        raise ValidationError(
            f"time {np.max(tt)} beyond stored path horizon {path.horizon}"
        )
    scaled = np.maximum(tt, 0.0) / path.h_ref
    idx = np.minimum(scaled.astype(np.int64), npts - 1)
    frac = scaled - idx
    out = path.values[idx] * (1.0 - frac) + path.values[idx + 1] * frac
    out = np.where(tt < 0.0, 0.0, out)
    if np.ndim(t) == 0:
        return float(out)
    return out


def write_path_csv(path: PiecewisePath, out: TextIO) -> None:
    """Dump a path as CSV: i,t,Z."""
    out.write("i,t,Z\n")
    for i, z in enumerate(path.values):
        out.write(f"{i},{i * path.h_ref:.17g},{z:.17g}\n")

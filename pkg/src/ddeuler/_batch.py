"""Vectorized multi-sample Euler driver for Monte Carlo error estimation.

Advances a chunk of samples in lockstep through the same (j, k) recursion the
scalar solvers implement, consuming each sample's keyed stream in the
identical order.  Per-sample results therefore agree with the scalar path to
floating-point roundoff and do not depend on the chunk layout; chunking is
sized from the problem alone so runs are reproducible byte for byte.

Requires a right-hand side with ``vectorized=True``.
"""

from __future__ import annotations

import numpy as np

from .core import DDEProblem

# draw randomized nodes in blocks of this many steps to bound transient memory
_THETA_BLOCK = 8192
# rough cap on per-chunk working set (two full interval rows per run)
_CHUNK_BYTES = 256 * 1024 * 1024


def _chunk_size(K: int, fine_steps: int, coarse_steps: int, d: int) -> int:
    per_sample = 8.0 * d * 2.0 * (fine_steps + coarse_steps + 2)
    per_sample += 8.0 * 2.0 * min(_THETA_BLOCK, max(fine_steps, coarse_steps))
    return max(1, min(K, int(_CHUNK_BYTES / per_sample)))


def _march_interval(f, h, t_base, streams, y0, delayed, out_rows, steps):
    """One interval of the recursion for a whole chunk.

    ``t_base`` holds the left nodes of the interval; when ``streams`` is given
    each step evaluates f at t_base[k] + h*u with per-sample uniforms, else at
    the left node itself.  ``delayed`` is indexed [k] for the previous
    interval's values.  Rows are written into ``out_rows`` (steps+1, B, d).
    """
    out_rows[0] = y0
    y = y0
    if streams is None:
        for k in range(steps):
            y = y + h * f(t_base[k], y, delayed[k])
            out_rows[k + 1] = y
        return y
    for start in range(0, steps, _THETA_BLOCK):
        stop = min(start + _THETA_BLOCK, steps)
        count = stop - start
        u = np.empty((count, len(streams)))
        for s, stream in enumerate(streams):
            u[:, s] = stream.uniforms(count)
        thetas = t_base[start:stop, None] + h * u
        for k in range(start, stop):
            y = y + h * f(thetas[k - start], y, delayed[k])
            out_rows[k + 1] = y
    return y


def _run_state(x0, B):
    return np.tile(np.asarray(x0, dtype=float), (B, 1))


def pair_deviations(
    problem: DDEProblem,
    N: int,
    m: int,
    coarse_streams,
    fine_streams,
    scheme: str,
) -> np.ndarray:
    """Per-(sample, interval) max grid deviation between a run at N and one at m*N.

    Returns shape (K, n+1); rows of samples whose recursion went non-finite
    are NaN.  The coarse run follows ``scheme``; the reference is always the
    randomized scheme, as in the scalar pairing.
    """
    K = len(fine_streams)
    n, d, tau, x0 = problem.n, problem.dim, problem.tau, problem.x0
    h, S = tau / N, m * N
    hf = tau / S
    f = problem.rhs.eval
    out = np.empty((K, n + 1))
    chunk = _chunk_size(K, S, N, d)
    for lo in range(0, K, chunk):
        hi = min(lo + chunk, K)
        B = hi - lo
        cs = coarse_streams[lo:hi] if scheme == "randomized" else None
        fs = fine_streams[lo:hi]
        y_c, y_f = _run_state(x0, B), _run_state(x0, B)
        rows_c = np.empty((N + 1, B, d))
        rows_f = np.empty((S + 1, B, d))
        prev_c = prev_f = None
        x0_c = np.broadcast_to(problem.x0, (N, B, d))
        x0_f = np.broadcast_to(problem.x0, (S, B, d))
        finite = np.ones(B, dtype=bool)
        for j in range(n + 1):
            t0 = j * tau
            y_c = _march_interval(
                f, h, t0 + np.arange(N) * h, cs, y_c,
                prev_c if j > 0 else x0_c, rows_c, N,
            )
            y_f = _march_interval(
                f, hf, t0 + np.arange(S) * hf, fs, y_f,
                prev_f if j > 0 else x0_f, rows_f, S,
            )
            diff = rows_f[::m] - rows_c
            dev = np.sqrt(np.einsum("kbd,kbd->kb", diff, diff)).max(axis=0)
            finite &= np.isfinite(rows_c).all(axis=(0, 2))
            finite &= np.isfinite(rows_f).all(axis=(0, 2))
            out[lo:hi, j] = dev
            if j < n:
                rows_c, prev_c = (np.empty_like(rows_c), rows_c)
                rows_f, prev_f = (np.empty_like(rows_f), rows_f)
        out[lo:hi][~finite] = np.nan
    return out


def oracle_deviations(
    problem: DDEProblem,
    N: int,
    coarse_streams,
    scheme: str,
    oracle,
) -> np.ndarray:
    """Per-(sample, interval) max grid deviation from a closed-form solution."""
    K = len(coarse_streams)
    n, d, tau, x0 = problem.n, problem.dim, problem.tau, problem.x0
    h = tau / N
    f = problem.rhs.eval
    out = np.empty((K, n + 1))
    exact_rows = []
    for j in range(n + 1):
        times = j * tau + np.arange(N + 1) * h
        times[-1] = (j + 1) * tau
        exact = np.asarray(oracle(times), dtype=float)
        if exact.ndim == 1:
            exact = exact[:, None]
        exact_rows.append(exact.reshape(N + 1, 1, d))
    chunk = _chunk_size(K, 0, N, d)
    for lo in range(0, K, chunk):
        hi = min(lo + chunk, K)
        B = hi - lo
        cs = coarse_streams[lo:hi] if scheme == "randomized" else None
        y_c = _run_state(x0, B)
        rows_c = np.empty((N + 1, B, d))
        prev_c = None
        x0_c = np.broadcast_to(problem.x0, (N, B, d))
        finite = np.ones(B, dtype=bool)
        for j in range(n + 1):
            y_c = _march_interval(
                f, h, j * tau + np.arange(N) * h, cs, y_c,
                prev_c if j > 0 else x0_c, rows_c, N,
            )
            diff = rows_c - exact_rows[j]
            dev = np.sqrt(np.einsum("kbd,kbd->kb", diff, diff)).max(axis=0)
            finite &= np.isfinite(rows_c).all(axis=(0, 2))
            out[lo:hi, j] = dev
            if j < n:
                rows_c, prev_c = (np.empty_like(rows_c), rows_c)
        out[lo:hi][~finite] = np.nan
    return out

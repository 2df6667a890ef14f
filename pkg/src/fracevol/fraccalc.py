"""Discrete fractional calculus on uniformly sampled functions.

Provides the Riemann-Liouville fractional integral, the Caputo and
Riemann-Liouville fractional derivatives (L1-type schemes), and a product
quadrature for convolutions with weakly singular kernels of the form
(t - s)**(alpha - 1) * h(t - s).  The quadrature integrates the singular
power factor exactly on every subinterval against the piecewise linear
interpolant of the sampled data, so no kernel value is ever requested at
the singularity itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import DomainError
from .specfun import gamma


@dataclass(frozen=True)
class TimeGrid:
    """Uniform partition of [0, horizon] into n_steps subintervals."""

    horizon: float
    n_steps: int

    def __post_init__(self) -> None:
        if not np.isfinite(self.horizon) or self.horizon <= 0.0:
            raise DomainError("horizon must be a positive finite number")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError("n_steps must be a positive integer")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_steps + 1)

    @property
    def delta(self) -> float:
        return self.horizon / self.n_steps

    def locate(self, t: float) -> tuple[int, float]:
        """Return (j, theta) with t = (j + theta) * delta, 0 <= theta < 1.

        t equal to the horizon maps to (n_steps, 0.0).
        """
        if not 0.0 <= t <= self.horizon * (1.0 + 1e-12):
            raise DomainError(f"time {t!r} outside [0, {self.horizon}]")
        pos = t / self.delta
        j = min(int(np.floor(pos)), self.n_steps)
        theta = pos - j
        # snap to the nearest node; keeps on-node queries exact despite
        # floating fuzz in t
        if theta > 1.0 - 1e-9 and j < self.n_steps:
            j, theta = j + 1, 0.0
        elif theta < 1e-9:
            theta = 0.0
        if j == self.n_steps:
            theta = 0.0
        return j, theta


@dataclass(frozen=True)
class SampledFn:
    """Function values on the nodes of a TimeGrid.

    values has one row per node; each row is either a scalar or a vector
    of mode coefficients.  node0_extrapolated marks outputs of the
    derivative operators whose t = 0 entry comes from one-sided
    extrapolation rather than from the defining integral.
    """

    grid: TimeGrid
    values: np.ndarray
    node0_extrapolated: bool = field(default=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.shape[0] != self.grid.n_steps + 1:
            raise DomainError(
                f"expected {self.grid.n_steps + 1} samples, got {vals.shape[0]}"
            )
        if not np.all(np.isfinite(vals)):
            raise DomainError("sampled values must all be finite")
        object.__setattr__(self, "values", vals)


def _check_order(alpha: float, allow_one: bool = False) -> float:
    alpha = float(alpha)
    hi_ok = alpha <= 1.0 if allow_one else alpha < 1.0
    if not (np.isfinite(alpha) and 0.0 < alpha and hi_ok):
        rng = "(0, 1]" if allow_one else "(0, 1)"
        raise DomainError(f"order alpha={alpha!r} outside {rng}")
    return alpha


def _uniform_kernel(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Convolution weights of the power kernel against hat functions.

    Returns (k, mu1) with k[d] the weight multiplying the sample at lag d
    and mu1[d] = integral of sigma**(alpha-1) * (d - sigma) over [d-1, d],
    needed to correct the contribution of the t = 0 sample.
    """
    d = np.arange(0, n + 2, dtype=float)
    mu0 = np.zeros(n + 2)
    mu1 = np.zeros(n + 2)
    mu0[1:] = (d[1:] ** alpha - d[:-1] ** alpha) / alpha
    mu1[1:] = d[1:] * mu0[1:] - (d[1:] ** (alpha + 1.0) - d[:-1] ** (alpha + 1.0)) / (
        alpha + 1.0
    )
    k = np.empty(n + 1)
    k[0] = mu1[1]
    k[1:] = mu0[1 : n + 1] - mu1[1 : n + 1] + mu1[2 : n + 2]
    return k, mu1


def _power_convolution(alpha: float, grid: TimeGrid, values: np.ndarray) -> np.ndarray:
    """integral_0^{t_i} (t_i - s)**(alpha-1) * interp(values)(s) ds, all i."""
    n = grid.n_steps
    k, mu1 = _uniform_kernel(alpha, n)
    scale = grid.delta ** alpha
    if values.ndim == 1:
        out = np.convolve(k, values)[: n + 1] - mu1[1 : n + 2] * values[0]
        return scale * out
    out = np.empty_like(values)
    for m in range(values.shape[1]):
        col = np.convolve(k, values[:, m])[: n + 1] - mu1[1 : n + 2] * values[0, m]
        out[:, m] = col
    return scale * out


def power_kernel_weights(alpha: float, grid: TimeGrid, t: float) -> np.ndarray:
    """Quadrature weights w with w . values ~= integral_0^t (t-s)**(a-1) f(s) ds.

    Exact whenever f is piecewise linear on the grid.  t may fall strictly
    between nodes; the trailing partial subinterval gets its own exact
    moments.  t = 0 yields all-zero weights.
    """
    alpha = _check_order(alpha, allow_one=True)
    n = grid.n_steps
    w = np.zeros(n + 1)
    if t == 0.0:
        return w
    jp, theta = grid.locate(t)
    delta = grid.delta
    if jp > 0:
        # full panels [t_j, t_{j+1}], j = 0..jp-1; lag interval [u, u+delta]
        j = np.arange(jp)
        u = t - (j + 1) * delta
        hi = u + delta
        a0 = (hi ** alpha - u ** alpha) / alpha
        p1 = (hi ** (alpha + 1.0) - u ** (alpha + 1.0)) / (alpha + 1.0)
        toward_right = (p1 - u * a0) / delta  # pairs with the sample at t_j
        toward_left = (hi * a0 - p1) / delta  # pairs with the sample at t_{j+1}
        np.add.at(w, j, toward_right)
        np.add.at(w, j + 1, toward_left)
    if theta > 0.0:
        # partial panel [t_jp, t]; data still interpolated on [t_jp, t_{jp+1}]
        w0 = theta * delta
        m0 = w0 ** alpha / alpha
        mt = w0 ** (alpha + 1.0) / (alpha + 1.0)
        w[jp] += ((delta - w0) * m0 + mt) / delta
        w[jp + 1] += (w0 * m0 - mt) / delta
    return w


def rl_integral(alpha: float, f: SampledFn) -> SampledFn:
    """Fractional integral of order alpha at every grid node; node 0 is 0."""
    alpha = _check_order(alpha, allow_one=True)
    conv = _power_convolution(alpha, f.grid, f.values)
    return SampledFn(f.grid, conv / gamma(alpha))


def rl_integral_at(alpha: float, f: SampledFn, t: float) -> float | np.ndarray:
    """Fractional integral evaluated at an arbitrary time in [0, horizon]."""
    alpha = _check_order(alpha, allow_one=True)
    w = power_kernel_weights(alpha, f.grid, t)
    return w @ f.values / gamma(alpha)


def _extrapolate_node0(vals: np.ndarray) -> np.ndarray:
    n = vals.shape[0] - 1
    if n >= 3:
        vals[0] = 3.0 * vals[1] - 3.0 * vals[2] + vals[3]
    elif n == 2:
        vals[0] = 2.0 * vals[1] - vals[2]
    else:
        vals[0] = vals[1]
    return vals


def caputo_derivative(alpha: float, f: SampledFn) -> SampledFn:
    """L1 discretization of the Caputo derivative of order alpha in (0, 1).

    Exact zero for constant data.  The node 0 value is extrapolated from
    nodes 1..3 and flagged, since the defining kernel is singular there.
    """
    alpha = _check_order(alpha)
    n = f.grid.n_steps
    if n < 1:
        raise DomainError("need at least two nodes")
    d = np.arange(0, n + 1, dtype=float)
    b = np.zeros(n + 1)
    b[1:] = d[1:] ** (1.0 - alpha) - d[:-1] ** (1.0 - alpha)
    coef = f.grid.delta ** (-alpha) / gamma(2.0 - alpha)
    vals = np.asarray(f.values, dtype=float)
    single = vals.ndim == 1
    cols = vals[:, None] if single else vals
    out = np.zeros_like(cols)
    for m in range(cols.shape[1]):
        diffs = np.diff(cols[:, m])
        out[1:, m] = coef * np.convolve(b[1:], diffs)[:n]
    out = _extrapolate_node0(out)
    return SampledFn(f.grid, out[:, 0] if single else out, node0_extrapolated=True)


def rl_derivative(alpha: float, f: SampledFn) -> SampledFn:
    """Riemann-Liouville derivative: Caputo part plus the t**(-alpha) offset.

    Coincides with caputo_derivative whenever f(0) = 0.
    """
    alpha = _check_order(alpha)
    cap = caputo_derivative(alpha, f)
    out = np.array(cap.values, dtype=float)
    t_pos = f.grid.nodes[1:]
    boundary = t_pos ** (-alpha) / gamma(1.0 - alpha)
    f0 = np.asarray(f.values, dtype=float)[0]
    if out.ndim == 1:
        out[1:] += f0 * boundary
    else:
        out[1:] += np.outer(boundary, f0)
    out = _extrapolate_node0(out)
    return SampledFn(f.grid, out, node0_extrapolated=True)


def singular_convolution(
    alpha: float,
    kernel_smooth: Callable[[np.ndarray], np.ndarray],
    f: SampledFn,
    t_index: int,
) -> float | np.ndarray:
    """integral_0^{t_i} (t_i - s)**(alpha-1) * h(t_i - s) * f(s) ds.

    The power factor is integrated exactly per subinterval against the
    piecewise linear interpolant of the sampled product h(t_i - s) f(s).
    h is only ever evaluated at nonnegative lags including 0, never at a
    point where the combined kernel is singular.
    """
    n = f.grid.n_steps
    i = int(t_index)
    if not 0 <= i <= n:
        raise DomainError(f"t_index {t_index!r} outside 0..{n}")
    return singular_convolution_at(alpha, kernel_smooth, f, f.grid.nodes[i])


def singular_convolution_at(
    alpha: float,
    kernel_smooth: Callable[[np.ndarray], np.ndarray],
    f: SampledFn,
    t: float,
) -> float | np.ndarray:
    """Same product quadrature with an arbitrary upper limit t in [0, horizon].

    When t falls strictly between nodes, the product on the trailing
    partial subinterval is interpolated between its value at the last node
    below t and its value at t itself, so kernel lags stay nonnegative.
    """
    w = singular_kernel_weights(alpha, kernel_smooth, f.grid, t)
    return w @ np.asarray(f.values, dtype=float)


def singular_kernel_weights(
    alpha: float,
    kernel_smooth: Callable[[np.ndarray], np.ndarray],
    grid: TimeGrid,
    t: float,
) -> np.ndarray:
    """Weight vector representing the singular product quadrature at t.

    The value singular_convolution_at returns is exactly this vector dotted
    with the sample values; exposing the weights lets linear functionals of
    the data (endpoint response rows, Gramian assembly) reuse the identical
    discretization.
    """
    alpha = _check_order(alpha, allow_one=True)
    jp, theta = grid.locate(t)
    w = np.zeros(grid.n_steps + 1)
    if jp == 0 and theta == 0.0:
        return w
    delta = grid.delta
    w0 = theta * delta
    tt = (jp + theta) * delta  # work with the snapped time
    if jp > 0:
        lags = tt - grid.nodes[: jp + 1]
        h = _sample_callable(kernel_smooth, lags)
        j = np.arange(jp)
        u = tt - (j + 1) * delta
        hi = u + delta
        a0 = (hi ** alpha - u ** alpha) / alpha
        p1 = (hi ** (alpha + 1.0) - u ** (alpha + 1.0)) / (alpha + 1.0)
        toward_right = (p1 - u * a0) / delta
        toward_left = (hi * a0 - p1) / delta
        pw = np.zeros(jp + 1)
        np.add.at(pw, j, toward_right)
        np.add.at(pw, j + 1, toward_left)
        w[: jp + 1] = pw * h
    if theta > 0.0:
        m0 = w0 ** alpha / alpha
        mt = w0 ** (alpha + 1.0) / (alpha + 1.0)
        h_edge = _sample_callable(kernel_smooth, np.array([w0, 0.0]))
        edge = h_edge[1] * (m0 - mt / w0)
        w[jp] += h_edge[0] * (mt / w0) + edge * (1.0 - theta)
        w[jp + 1] += edge * theta
    return w


def singular_convolution_all(
    alpha: float, smooth_at_lags: np.ndarray, f: SampledFn
) -> np.ndarray:
    """Vectorized singular_convolution at every node at once.

    smooth_at_lags[d] must hold h(d * delta).  Identical values to calling
    singular_convolution node by node, at convolution cost.
    """
    alpha = _check_order(alpha, allow_one=True)
    n = f.grid.n_steps
    k, mu1 = _uniform_kernel(alpha, n)
    kap = k * smooth_at_lags
    vals = np.asarray(f.values, dtype=float)
    scale = f.grid.delta ** alpha
    corr = mu1[1 : n + 2] * smooth_at_lags
    if vals.ndim == 1:
        out = np.convolve(kap, vals)[: n + 1] - corr * vals[0]
        return scale * out
    out = np.empty_like(vals)
    for m in range(vals.shape[1]):
        out[:, m] = np.convolve(kap, vals[:, m])[: n + 1] - corr * vals[0, m]
    return scale * out


def _sample_callable(h: Callable, lags: np.ndarray) -> np.ndarray:
    """Evaluate h on an array of lags, tolerating scalar-only callables."""
    try:
        out = np.asarray(h(lags), dtype=float)
        if out.shape == lags.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(h(ell)) for ell in lags])

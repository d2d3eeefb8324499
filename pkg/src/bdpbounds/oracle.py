"""Numerical ground truth: the forward Kolmogorov system on a finite grid.

Integration uses SciPy's eighth-order Dormand-Prince scheme with a
tridiagonal right-hand side and a step cap of ``0.1 / sup ||A(t)||_1``.
Mass is never renormalized, so its drift doubles as an accuracy check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal

from .errors import DimensionMismatch, InvalidParameter, OutOfRange, StepFailure
from .model import BDPSpec, build_B
from .serialize import write_csv

DEFAULT_TOL = 1e-9
DEFAULT_LOSS_THRESHOLD = 1e-6
TOP_BAND = 0.05
NORM_KINDS = ("l1", "l1D", "q")


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    p: np.ndarray
    truncation_loss: np.ndarray
    tol: float
    threshold: float = DEFAULT_LOSS_THRESHOLD

    @property
    def mass(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def max_truncation_loss(self) -> float:
        return float(self.truncation_loss.max()) if len(self.truncation_loss) else 0.0

    @property
    def flagged(self) -> bool:
        return self.max_truncation_loss > self.threshold

    def mean(self) -> np.ndarray:
        return self.p @ np.arange(self.p.shape[1])

    def cdf(self, j: int) -> np.ndarray:
        return self.p[:, : j + 1].sum(axis=1)

    def to_csv(self, path) -> None:
        n = self.p.shape[1]
        header = ["t"] + [f"p_{i}" for i in range(n)] + ["mass", "truncation_loss"]
        rows = (
            [float(t), *map(float, row), float(m), float(loss)]
            for t, row, m, loss in zip(self.t, self.p, self.mass, self.truncation_loss)
        )
        write_csv(path, header, rows)


def point_mass(spec: BDPSpec, k: int) -> np.ndarray:
    if not 0 <= k < spec.size:
        raise InvalidParameter(f"state {k} is outside 0..{spec.last}")
    p = np.zeros(spec.size)
    p[k] = 1.0
    return p


def _sup_rate(f) -> float:
    return f.periodic_max() + abs(float(f.vanishing.evaluate(0.0)))


def integrate_kolmogorov(spec: BDPSpec, p0, t_grid, tol: float = DEFAULT_TOL,
                         threshold: float = DEFAULT_LOSS_THRESHOLD) -> Trajectory:
    p0 = np.asarray(p0, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    if p0.shape != (spec.size,):
        raise DimensionMismatch(f"p0 has shape {p0.shape}, expected ({spec.size},)")
    if np.any(p0 < 0) or abs(p0.sum() - 1) > 1e-9:
        raise InvalidParameter("p0 must be a probability vector")
    if not tol > 0:
        raise InvalidParameter("tol must be positive")
    if t_grid.ndim != 1 or len(t_grid) < 1 or np.any(np.diff(t_grid) <= 0) or t_grid[0] < 0:
        raise InvalidParameter("t_grid must be a strictly increasing grid of nonnegative times")

    lam, mu = spec.generator_rates()
    a, b = spec.a, spec.b

    def rhs(t, p):
        at, bt = a.evaluate(t), b.evaluate(t)
        dp = -(lam * at + mu * bt) * p
        dp[1:] += lam[:-1] * at * p[:-1]
        dp[:-1] += mu[1:] * bt * p[1:]
        return dp

    norm_sup = 2.0 * float(np.max(lam * _sup_rate(a) + mu * _sup_rate(b)))
    max_step = 0.1 / norm_sup if norm_sup > 0 else np.inf

    if len(t_grid) == 1:
        P = p0[None, :].copy()
    else:
        sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), p0, method="DOP853", t_eval=t_grid,
                        rtol=tol, atol=tol * 1e-3, max_step=max_step)
        if not sol.success:
            raise StepFailure(sol.message)
        P = sol.y.T
    if spec.finite:
        loss = np.zeros(len(t_grid))
    else:
        band = max(1, math.ceil(TOP_BAND * spec.size))
        loss = P[:, -band:].sum(axis=1)
    return Trajectory(t_grid.copy(), P, loss, tol, threshold)


def weighted_norm(x, w, kind: str) -> np.ndarray | float:
    """``l1``, ``l1D`` or ``q``-weighted norm of a (batch of) full vector(s)."""
    if kind not in NORM_KINDS:
        raise InvalidParameter(f"norm kind must be one of {NORM_KINDS}")
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if kind == "l1":
        out = np.abs(x).sum(axis=-1)
    elif kind == "q":
        q = np.cumsum(w.d_prefix(n - 1))
        out = (np.abs(x[..., 1:]) * q).sum(axis=-1)
    elif w.kind == "triangular":
        d = w.d_prefix(n - 1)
        # tails[k] = sum_{i > k} x_i for k = 0..n-2
        tails = np.flip(np.cumsum(np.flip(x[..., 1:], axis=-1), axis=-1), axis=-1)
        out = (d * np.abs(tails)).sum(axis=-1)
    else:
        out = (w.d_prefix(n) * np.abs(x)).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def cesaro_average(traj: Trajectory, t: float) -> np.ndarray:
    """Trapezoidal mean of ``p`` over ``[t_0, t]``."""
    t0, t_end = traj.t[0], traj.t[-1]
    if not t0 <= t <= t_end * (1 + 1e-12):
        raise OutOfRange(f"t = {t} outside the trajectory span [{t0}, {t_end}]")
    if t == t0:
        return traj.p[0].copy()
    t = min(t, t_end)
    i = int(np.searchsorted(traj.t, t, side="right"))
    ts = traj.t[:i]
    ps = traj.p[:i]
    if ts[-1] < t:
        frac = (t - traj.t[i - 1]) / (traj.t[i] - traj.t[i - 1])
        ps = np.vstack([ps, (1 - frac) * traj.p[i - 1] + frac * traj.p[i]])
        ts = np.append(ts, t)
    return np.trapezoid(ps, ts, axis=0) / (t - t0)


def stationary_distribution(spec: BDPSpec, t: float = 0.0) -> np.ndarray:
    """Detailed-balance solution of the frozen numerical model at time ``t``."""
    lam, mu = spec.generator_rates()
    up = lam[:-1] * spec.a.evaluate(t)
    down = mu[1:] * spec.b.evaluate(t)
    if np.any(up <= 0) or np.any(down <= 0):
        raise InvalidParameter("detailed balance needs positive frozen rates")
    logp = np.concatenate([[0.0], np.cumsum(np.log(up) - np.log(down))])
    p = np.exp(logp - logp.max())
    return p / p.sum()


def frozen_spectrum(spec: BDPSpec, t: float) -> np.ndarray:
    """Eigenvalues of the reduced matrix ``B(t)``, sorted by real part.

    The generator is similar to a symmetric tridiagonal matrix, so its
    spectrum is computed stably; ``B`` shares it minus the zero eigenvalue.
    """
    lam, mu = spec.generator_rates()
    lt = lam * spec.a.evaluate(t)
    mt = mu * spec.b.evaluate(t)
    diag = -(lt + mt)
    off = np.sqrt(lt[:-1] * mt[1:])
    ev = eigh_tridiagonal(diag, off, eigvals_only=True)
    ev = np.delete(ev, int(np.argmin(np.abs(ev))))
    return np.sort(ev)[::-1]


def frozen_spectrum_dense(spec: BDPSpec, t: float) -> np.ndarray:
    """Same spectrum from a dense eigen-solve of ``B(t)`` (small chains)."""
    B, _ = build_B(spec, t)
    ev = np.linalg.eigvals(B)
    return ev[np.argsort(-ev.real)]


def spectral_gap(spec: BDPSpec, t: float = 0.0) -> float:
    """``min -Re(nu)`` over the eigenvalues of ``B(t)``."""
    return float(-frozen_spectrum(spec, t).max())

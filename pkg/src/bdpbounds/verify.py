"""Compare certificates with oracle trajectories.

A report passes when ``min(slack) >= -tol_verify`` where
``tol_verify = 100 * tol_ode + 10 * truncation_loss`` and the slack is
signed so that a nonnegative value means the statement holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundCertificate, envelope
from .errors import InvalidParameter, OrderViolation, TruncationLoss
from .model import BDPSpec
from .oracle import DEFAULT_TOL, Trajectory, integrate_kolmogorov, point_mass, weighted_norm


@dataclass(frozen=True, eq=False)
class VerificationReport:
    certificate: str
    direction: str
    t: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    tol_ode: float
    truncation_loss: float
    notes: tuple = ()
    scenario: dict = field(default_factory=dict)

    @property
    def slack(self) -> np.ndarray:
        return self.rhs - self.lhs if self.direction == "upper" else self.lhs - self.rhs

    @property
    def min_slack(self) -> float:
        return float(self.slack.min())

    @property
    def worst_time(self) -> float:
        return float(self.t[int(np.argmin(self.slack))])

    @property
    def tol_verify(self) -> float:
        return 100.0 * self.tol_ode + 10.0 * self.truncation_loss

    @property
    def passed(self) -> bool:
        return self.min_slack >= -self.tol_verify

    def summary(self) -> dict:
        return {
            "certificate": self.certificate,
            "direction": self.direction,
            "passed": self.passed,
            "min_slack": self.min_slack,
            "worst_time": self.worst_time,
            "tol_ode": self.tol_ode,
            "truncation_loss": self.truncation_loss,
            "tol_verify": self.tol_verify,
            "notes": list(self.notes),
            "scenario": dict(self.scenario),
        }

    def rows(self):
        for t, l, r, s in zip(self.t, self.lhs, self.rhs, self.slack):
            yield float(t), float(l), float(r), float(s)


def format_table(reports) -> str:
    head = f"{'certificate':<28} {'dir':<6} {'min slack':>12} {'at t':>8} {'tol':>10}  result"
    lines = [head, "-" * len(head)]
    for r in reports:
        lines.append(
            f"{r.certificate:<28} {r.direction:<6} {r.min_slack:>12.4e} {r.worst_time:>8.3f} "
            f"{r.tol_verify:>10.2e}  {'PASS' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines)


def standard_pair(spec: BDPSpec) -> tuple[np.ndarray, np.ndarray]:
    """Point masses at 0 and at ``min(10, top state)``."""
    return point_mass(spec, 0), point_mass(spec, min(10, spec.last))


def trajectory(spec, p0, t_grid, tol=DEFAULT_TOL, cache=None):
    """Oracle run, memoized in ``cache`` by initial vector."""
    key = tuple(np.flatnonzero(p0)), tuple(p0[p0 != 0])
    if cache is not None and key in cache:
        return cache[key]
    traj = integrate_kolmogorov(spec, p0, t_grid, tol)
    if cache is not None:
        cache[key] = traj
    return traj


def _decay_report(cert, spec, w, diff: np.ndarray, t_grid, tol, loss, notes=(), scenario=None):
    lhs = weighted_norm(diff, w, cert.norm)
    init = weighted_norm(diff[0], w, cert.init_norm)
    rhs = envelope(cert, spec, t_grid, s=float(t_grid[0])) * init
    return VerificationReport(cert.statement_id, cert.direction, np.asarray(t_grid), lhs, rhs, tol, loss,
                              tuple(notes), scenario or {})


def check_decay(cert: BoundCertificate, spec: BDPSpec, w, p1_0, p2_0, t_grid, tol: float = DEFAULT_TOL,
                cache: dict | None = None) -> VerificationReport:
    """Two trajectories, or one trajectory against ``params['pi']``."""
    if cert.shape != "decay" or cert.init_norm is None:
        raise InvalidParameter(f"{cert.statement_id} is not a two-point decay statement")
    t1 = trajectory(spec, np.asarray(p1_0, float), t_grid, tol, cache)
    if "pi" in cert.params and p2_0 is None:
        diff = t1.p - np.asarray(cert.params["pi"])[None, :]
        loss = t1.max_truncation_loss
    else:
        t2 = trajectory(spec, np.asarray(p2_0, float), t_grid, tol, cache)
        diff = t1.p - t2.p
        loss = max(t1.max_truncation_loss, t2.max_truncation_loss)
    return _decay_report(cert, spec, w, diff, t_grid, tol, loss)


def ordered(p1, p2) -> bool:
    """Tail-sum (stochastic) order in either orientation.

    This is the cone the transformed reduced system preserves: the
    triangular weight matrix maps ``z2 - z1`` to weighted tail sums.
    """
    tails = np.cumsum((np.asarray(p2) - np.asarray(p1))[::-1])[::-1][1:]
    scale = 1e-15
    return bool(np.all(tails >= -scale) or np.all(tails <= scale))


def check_two_sided(certs, spec: BDPSpec, w, p1_0, p2_0, t_grid, tol: float = DEFAULT_TOL,
                    cache: dict | None = None) -> list[VerificationReport]:
    if any(c.params.get("ordered") for c in certs) and not ordered(p1_0, p2_0):
        raise OrderViolation("ordered lower bounds need initial vectors ordered by tail sums")
    t1 = trajectory(spec, np.asarray(p1_0, float), t_grid, tol, cache)
    t2 = trajectory(spec, np.asarray(p2_0, float), t_grid, tol, cache)
    diff = t1.p - t2.p
    loss = max(t1.max_truncation_loss, t2.max_truncation_loss)
    out = []
    for c in certs:
        notes = ("ordered initial vectors (tail-sum order)",) if c.params.get("ordered") else ()
        out.append(_decay_report(c, spec, w, diff, t_grid, tol, loss, notes))
    return out


def check_null(certs, spec: BDPSpec, w, p0, t_grid, tol: float = DEFAULT_TOL,
               cache: dict | None = None) -> list[VerificationReport]:
    """Weighted-sum and per-state bounds from ``p0``; cumulative bounds from ``X(0) = k``."""
    t_grid = np.asarray(t_grid, dtype=float)
    base = trajectory(spec, np.asarray(p0, float), t_grid, tol, cache)
    d = w.d_prefix(spec.size)
    out = []
    for c in certs:
        if c.norm == "cumulative":
            traj = trajectory(spec, point_mass(spec, c.params["k"]), t_grid, tol, cache)
            lhs = traj.cdf(c.params["j"])
        elif c.norm == "weighted_sum":
            traj, lhs = base, base.p @ d
        else:
            traj, lhs = base, base.p[:, c.params["state"]]
        if traj.flagged:
            raise TruncationLoss(
                f"mass {traj.max_truncation_loss:.3g} reached the top band; raise the truncation level"
            )
        rhs = envelope(c, spec, t_grid, s=float(t_grid[0]))
        out.append(VerificationReport(c.statement_id, c.direction, t_grid, lhs, rhs, tol,
                                      traj.max_truncation_loss, scenario={"k": c.params.get("k", 0)}))
    return out


def check_means_and_tails(certs, spec: BDPSpec, w, t_grid, tol: float = DEFAULT_TOL,
                          cache: dict | None = None) -> list[VerificationReport]:
    """Each statement is conditional on ``X(0) = params['k']``."""
    t_grid = np.asarray(t_grid, dtype=float)
    out = []
    for c in certs:
        traj: Trajectory = trajectory(spec, point_mass(spec, c.params.get("k", 0)), t_grid, tol, cache)
        lhs = traj.cdf(c.params["j"]) if c.norm == "cdf" else traj.mean()
        rhs = envelope(c, spec, t_grid)
        # truncation distorts the mean by at most (top state) * (band mass)
        loss = traj.max_truncation_loss * (spec.last if c.norm == "mean" else 1.0)
        out.append(VerificationReport(c.statement_id, c.direction, t_grid, lhs, rhs, tol, loss,
                                      scenario={"k": c.params.get("k", 0)}))
    return out


def falsification(run, certs, factor: float = 2.0) -> tuple[list, list]:
    """Run a check with genuine and with rate-inflated certificates.

    ``run`` maps a certificate list to reports.  Returns both report lists;
    the guard holds when the genuine run passes and the inflated one does not.
    """
    genuine = run(certs)
    inflated = run([c.inflated(factor) for c in certs])
    return genuine, inflated

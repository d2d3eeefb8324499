"""Bound certificates: serializable statements evaluated against the oracle.

A certificate pairs a symbolic rate ``c_a a(t) + c_b b(t) + c`` with a
prefactor and a norm; ``direction`` says which side of the data it bounds.  ``envelope`` turns it into numbers on
a time grid; the verification layer multiplies by the initial norm where
the statement has one.

Envelope shapes (``shape`` field):

* ``decay``       ``prefactor * exp(-int_s^t rate)``
* ``constant``    ``params["value"]``
* ``drift``       ``params["k"] + int_0^t rate``
* ``relaxation``  ``y' = inflow - rate * y``, ``y(0) = params["k"]``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import EpsilonTooLarge, HypothesisUnmet, InvalidParameter, RequiresFinite
from .lognorm import linear_bounds
from .model import BDPSpec
from .rates import LinearRate
from .weights import ErgodicFeasibility, NullFeasibility, WeightSequence

SHAPES = ("decay", "constant", "drift", "relaxation")
K_GRID_MIN = 10_000
K_SAFETY = 1.1


@dataclass(frozen=True, eq=False)
class BoundCertificate:
    statement_id: str
    shape: str
    rate: LinearRate | None
    prefactor: float
    norm: str
    direction: str
    init_norm: str | None = None
    hypotheses: tuple = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise InvalidParameter(f"unknown certificate shape {self.shape!r}")
        if self.direction not in ("upper", "lower"):
            raise InvalidParameter("direction must be 'upper' or 'lower'")
        if not self.prefactor > 0:
            raise InvalidParameter("prefactor must be positive")

    def inflated(self, factor: float = 2.0) -> BoundCertificate:
        """Same statement with its rate multiplied by ``factor``.

        Only the certificate rate moves; an inflow term stays as it is.
        """
        rate = self.rate.scaled(factor) if self.rate is not None else None
        return replace(self, rate=rate, params=dict(self.params),
                       statement_id=self.statement_id + "@x" + f"{factor:g}")

    def to_dict(self) -> dict:
        return {
            "statement_id": self.statement_id,
            "shape": self.shape,
            "rate": self.rate.to_dict() if self.rate is not None else None,
            "prefactor": self.prefactor,
            "norm": self.norm,
            "direction": self.direction,
            "init_norm": self.init_norm,
            "hypotheses": list(self.hypotheses),
            "params": dict(self.params),
        }


def envelope(cert: BoundCertificate, spec: BDPSpec, t, s: float = 0.0) -> np.ndarray:
    """Right-hand side of the certificate on ``t`` (without the initial norm)."""
    t = np.asarray(t, dtype=float)
    a, b = spec.a, spec.b
    if cert.shape == "decay":
        return cert.prefactor * np.exp(-cert.rate.integrate(a, b, s, t))
    if cert.shape == "constant":
        return np.full(t.shape, float(cert.params["value"]))
    if cert.shape == "drift":
        return float(cert.params["k"]) + cert.rate.integrate(a, b, 0.0, t)
    return _relaxation(cert, spec, t)


def _relaxation(cert, spec, t):
    inflow = LinearRate.from_dict(cert.params["inflow"])
    k = float(cert.params["k"])
    a, b = spec.a, spec.b
    if cert.rate.is_constant_in_time(a, b) and inflow.is_constant_in_time(a, b):
        r = float(cert.rate.evaluate(a, b, 0.0))
        f = float(inflow.evaluate(a, b, 0.0))
        if r == 0:
            return k + f * t
        return k * np.exp(-r * t) + (f / r) * (1 - np.exp(-r * t))
    order = np.argsort(t)
    ts = t[order]
    if ts[-1] <= 0:
        return np.full(t.shape, k)
    sol = solve_ivp(
        lambda u, y: [inflow.evaluate(a, b, u) - cert.rate.evaluate(a, b, u) * y[0]],
        (0.0, float(ts[-1])), [k], t_eval=ts, rtol=1e-11, atol=1e-13, method="DOP853",
    )
    out = np.empty_like(t)
    out[order] = sol.y[0]
    return out


def _resolve_rate(feas, rate: LinearRate | None) -> LinearRate:
    if rate is not None:
        return rate
    if feas is not None:
        return feas.drift
    raise HypothesisUnmet("no drift rate: supply a feasibility record or an explicit rate")


def _hyp(feas) -> tuple:
    if feas is None:
        return ("closed-form drift",)
    return tuple(f"{name}:{'ok' if ok else 'failed'}" for name, ok in feas.conditions.items())


def _weights_summary(w: WeightSequence, n: int) -> tuple[float, float]:
    d = w.d_prefix(n)
    return float(d.min()), float(d.max())


# -- decay statements -----------------------------------------------------
def weak_ergodic_certificate(spec: BDPSpec, feas: ErgodicFeasibility | None, w: WeightSequence,
                             rate: LinearRate | None = None) -> tuple[BoundCertificate, BoundCertificate]:
    """``l1D`` contraction and the derived ``l1`` bound with prefactor ``4/g``."""
    if w.kind != "triangular":
        raise HypothesisUnmet("weak ergodicity bounds need triangular weights")
    rate = _resolve_rate(feas, rate)
    g = w.g
    if not g > 0:
        raise HypothesisUnmet("g = 0: the l1 comparison is unavailable")
    hyp = _hyp(feas)
    return (
        BoundCertificate("weak-ergodic-l1D", "decay", rate, 1.0, "l1D", "upper", "l1D", hyp),
        BoundCertificate("weak-ergodic-l1", "decay", rate, 4.0 / g, "l1", "upper", "q", hyp, {"g": g}),
    )


def two_sided_certificate(spec: BDPSpec, w: WeightSequence, feas: ErgodicFeasibility | None = None,
                          rate: LinearRate | None = None) -> list[BoundCertificate]:
    """Upper and lower envelopes for a finite chain.

    Upper statements use ``rate`` (or the feasibility drift, or the
    componentwise lower bound of ``alpha``).  Lower statements use the
    componentwise upper bound of ``zeta``; the ordered-input lower bounds
    use the componentwise upper bound of ``alpha``.
    """
    if not spec.finite:
        raise RequiresFinite("two-sided bounds need a finite state space")
    if w.kind != "triangular":
        raise HypothesisUnmet("two-sided bounds need triangular weights")
    alpha_lo, alpha_hi = linear_bounds(spec, w, "alpha")
    _, zeta_hi = linear_bounds(spec, w, "zeta")
    if rate is None:
        rate = feas.drift if feas is not None else alpha_lo
    N = spec.n_states
    g, G = _weights_summary(w, N)
    wide = 4.0 * N * G / g
    hyp = ("finite",) + (_hyp(feas) if feas is not None else ())
    common = {"N": N, "g": g, "G": G}
    return [
        BoundCertificate("two-sided-l1D-upper", "decay", rate, 1.0, "l1D", "upper", "l1D", hyp, common),
        BoundCertificate("two-sided-l1D-lower", "decay", zeta_hi, 1.0, "l1D", "lower", "l1D", hyp, common),
        BoundCertificate("two-sided-l1-upper", "decay", rate, wide, "l1", "upper", "l1", hyp, common),
        BoundCertificate("two-sided-l1-lower", "decay", zeta_hi, 1.0 / wide, "l1", "lower", "l1", hyp, common),
        BoundCertificate("ordered-l1D-lower", "decay", alpha_hi, 1.0, "l1D", "lower", "l1D",
                         hyp + ("ordered",), {**common, "ordered": True}),
        BoundCertificate("ordered-l1-lower", "decay", alpha_hi, 1.0 / wide, "l1", "lower", "l1",
                         hyp + ("ordered",), {**common, "ordered": True}),
    ]


def null_ergodic_certificate(spec: BDPSpec, feas: NullFeasibility | None, w: WeightSequence,
                             states=(0, 3, 10), pairs=None,
                             rate: LinearRate | None = None) -> list[BoundCertificate]:
    """Weighted-sum, per-state and cumulative bounds for a null-ergodic chain.

    ``pairs`` lists ``(j, k)`` for ``Pr(X(t) <= j | X(0) = k)``; by default
    every pair drawn from ``states``.
    """
    if w.kind != "diagonal":
        raise HypothesisUnmet("null-ergodic bounds need diagonal weights")
    rate = _resolve_rate(feas, rate)
    hyp = _hyp(feas)
    d = w.d_prefix(spec.size)
    G = float(d.max())
    certs = [BoundCertificate("null-weighted", "decay", rate, G, "weighted_sum", "upper", None, hyp,
                              {"k": 0})]
    for k in states:
        certs.append(BoundCertificate(f"null-state-{k}", "decay", rate, G / d[k], "state", "upper", None,
                                      hyp, {"state": int(k), "k": 0}))
    if pairs is None:
        pairs = [(j, k) for j in states for k in states]
    for j, k in pairs:
        dmin = float(d[: j + 1].min())
        certs.append(BoundCertificate(f"null-cumulative-{j}-{k}", "decay", rate, d[k] / dmin, "cumulative",
                                      "upper", None, hyp, {"j": int(j), "k": int(k)}))
    return certs


def ergodic_certificate(spec: BDPSpec, feas: ErgodicFeasibility | None, w: WeightSequence, pi,
                        rate: LinearRate | None = None) -> BoundCertificate:
    """Distance to a limiting vector ``pi`` (constant rates only)."""
    if not (spec.a.is_constant() and spec.b.is_constant()):
        raise HypothesisUnmet("a limiting vector is only defined here for constant rates")
    rate = _resolve_rate(feas, rate)
    if not w.g > 0:
        raise HypothesisUnmet("g = 0: the l1 comparison is unavailable")
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (spec.size,):
        raise InvalidParameter("pi must have one entry per state")
    return BoundCertificate("ergodic-limit", "decay", rate, 4.0 / w.g, "l1", "upper", "q", _hyp(feas),
                            {"pi": pi.tolist()})


# -- the constant K(eps) --------------------------------------------------
def decay_constant(rate: LinearRate, spec: BDPSpec, eps: float) -> float:
    """``K`` with ``exp(-int_s^t rate) <= K exp(-(m - eps)(t - s))`` for all ``s <= t``.

    ``m`` is the long-run mean of ``rate``.  The supremum is taken on a
    bounded window that provably contains the maximizing pairs.
    """
    a, b = spec.a, spec.b
    m = rate.mean(a, b)
    if not 0 < eps < m:
        raise EpsilonTooLarge(f"epsilon must lie in (0, {m:.6g}), got {eps!r}")
    if rate.is_constant_in_time(a, b):
        return 1.0
    T = max(a.period if rate.coef_a else 0.0, b.period if rate.coef_b else 0.0, 1e-9)
    burn = max(a.burn_in(1e-6), b.burn_in(1e-6))

    def psi(x):
        return (m - eps) * x - rate.primitive(a, b, x)

    probe = np.linspace(0.0, burn + 3 * T, K_GRID_MIN)
    resid = m * probe - rate.primitive(a, b, probe)
    osc = 1.5 * float(resid.max() - resid.min()) + 1e-12
    P = max(burn + 3 * T, 2 * osc / eps + T)
    H = burn + T + P
    n = int(min(max(K_GRID_MIN, 2000 * H / T), 2_000_000))
    x = np.linspace(0.0, H, n)
    v = psi(x)
    best = float(np.max(v - np.minimum.accumulate(v)))
    return K_SAFETY * math.exp(best)


def _geometric_factor(x: float, T: float) -> float:
    e = math.exp(x * T)
    return 1.0 + e / (e - 1.0)


def _inflow_constant(spec: BDPSpec, rate: LinearRate, eps: float) -> tuple[float, dict]:
    """``K lambda_0 M (1 + e^{xT}/(e^{xT}-1))`` with ``x = mean - eps``."""
    a = spec.a
    K = decay_constant(rate, spec, eps)
    x = rate.mean(spec.a, spec.b) - eps
    T = a.period
    mass = T * a.long_run_average() + a.vanishing_mass()
    lam0 = float(spec.lam(np.array([0]))[0])
    const = K * lam0 * mass * _geometric_factor(x, T)
    return const, {"K": K, "epsilon": eps, "period_mass": mass, "lambda0": lam0, "x": x}


def tail_certificate(spec: BDPSpec, feas: ErgodicFeasibility | None, w: WeightSequence, eps: float,
                     j: int, rate: LinearRate | None = None) -> BoundCertificate:
    """``Pr(X(t) <= j | X(0) = 0) >= 1 - const / q_{j+1}``."""
    if w.kind != "triangular":
        raise HypothesisUnmet("tail bounds need triangular weights")
    rate = _resolve_rate(feas, rate)
    const, info = _inflow_constant(spec, rate, eps)
    q = w.d_prefix(j + 1).sum()
    value = 1.0 - const / q
    return BoundCertificate(f"tail-{j}", "constant", rate, 1.0, "cdf", "lower", None, _hyp(feas),
                            {**info, "j": int(j), "k": 0, "q": float(q), "value": value})


# -- mean statements ------------------------------------------------------
def mean_upper_certificate(spec: BDPSpec, feas: ErgodicFeasibility | None, w: WeightSequence, eps: float,
                           rate: LinearRate | None = None) -> BoundCertificate:
    """``E(t; 0) <= const / W``."""
    rate = _resolve_rate(feas, rate)
    W = w.W
    if not W > 0:
        raise HypothesisUnmet("W = 0: the mean bound is unavailable")
    const, info = _inflow_constant(spec, rate, eps)
    return BoundCertificate("mean-upper", "constant", rate, 1.0, "mean", "upper", None, _hyp(feas),
                            {**info, "W": W, "k": 0, "value": const / W})


def growth_rate(spec: BDPSpec) -> LinearRate:
    """Componentwise lower bound of ``min(lambda_0 a, inf_i lambda_i a - mu_i b)``."""
    i = np.arange(1, spec.last + 1)
    lam = np.append(spec.lam(np.arange(0, spec.last + 1)), spec.lam_limit if not spec.finite else np.inf)
    mu = spec.mu(i)
    mu_sup = float(mu.max()) if spec.finite else max(float(mu.max()), spec.mu_limit)
    return LinearRate(float(lam.min()), -mu_sup)


def mean_lower_certificate(spec: BDPSpec, k: int = 0) -> BoundCertificate:
    """``E(t; k) >= k + int_0^t r``."""
    if spec.finite:
        raise RequiresFinite("the growth bound is stated for infinite chains")
    return BoundCertificate("mean-lower", "drift", growth_rate(spec), 1.0, "mean", "lower", None,
                            ("infinite",), {"k": int(k)})


def loss_mean_certificate(spec: BDPSpec, k: int = 0) -> BoundCertificate:
    """``E(t; k) <= k e^{-int b} + int a(u) e^{-int_u^t b} du`` for the loss queue."""
    if spec.name != "mmss":
        raise HypothesisUnmet("the relaxation bound is specific to the loss queue")
    lam = spec.params.get("lam", 1.0)
    mu = spec.params.get("mu", 1.0)
    return BoundCertificate("mean-upper-loss", "relaxation", LinearRate(0.0, mu), 1.0, "mean", "upper", None,
                            ("loss queue",), {"k": int(k), "inflow": LinearRate(lam, 0.0).to_dict()})


def mean_bounds(spec: BDPSpec, feas=None, w: WeightSequence | None = None, eps: float | None = None,
                k: int = 0, rate: LinearRate | None = None, regime: str | None = None) -> list[BoundCertificate]:
    """Every mean statement whose hypotheses hold in this context."""
    out = []
    if spec.name == "mmss":
        out.append(loss_mean_certificate(spec, k))
    if isinstance(feas, NullFeasibility) or (regime == "null" and not spec.finite):
        out.append(mean_lower_certificate(spec, k))
    if w is not None and w.kind == "triangular" and not spec.finite and (feas is not None or rate is not None):
        r = _resolve_rate(feas, rate)
        if eps is None:
            eps = 0.5 * r.mean(spec.a, spec.b)
        if k == 0:
            out.append(mean_upper_certificate(spec, feas if isinstance(feas, ErgodicFeasibility) else None,
                                              w, eps, rate=r))
    if not out:
        raise HypothesisUnmet("no mean bound applies to this model and regime")
    return out

"""Weight sequences for the similarity transforms.

A weight sequence stores ``delta_k`` on a finite prefix and a constant
``tail`` used beyond it.  Cumulative products give ``d_k``; partial sums
of ``d`` give ``q_i``.  Two kinds exist:

* ``triangular`` acts on the reduced system (ergodic-type bounds);
* ``diagonal`` acts on the full system (null-ergodic bounds).

Both kinds store ``delta[0] = 0`` by convention and ``d_0 = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisUnmet, Infeasible, InvalidParameter, NegativeDiscriminant
from .lognorm import coefficients, dominates
from .model import BDPSpec
from .rates import LinearRate

KINDS = ("triangular", "diagonal")
CHOICES = ("geometric", "lower", "upper")
# relative slack when an admissible interval collapses to a point
INTERVAL_RTOL = 1e-12
GRID_POINTS = 64
GOLDEN_TOL = 1e-6
DELTA_CAP = 1e4


@dataclass(frozen=True, eq=False)
class WeightSequence:
    kind: str
    delta: np.ndarray
    tail: float | None = None
    finite: bool = True
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameter(f"weight kind must be one of {KINDS}, got {self.kind!r}")
        delta = np.asarray(self.delta, dtype=float).copy()
        if delta.ndim != 1 or len(delta) < 1:
            raise InvalidParameter("delta must be a non-empty 1-d sequence")
        delta[0] = 0.0
        if np.any(delta[1:] <= 0) or not np.all(np.isfinite(delta)):
            raise InvalidParameter("weights must be positive and finite")
        object.__setattr__(self, "delta", delta)
        if not self.finite:
            if self.tail is None or not self.tail > 0:
                raise InvalidParameter("an infinite chain needs a positive tail weight")
            if self.kind == "triangular" and not self.tail > 1:
                raise InvalidParameter("triangular weights need a tail above 1")
            if self.kind == "diagonal" and not self.tail < 1:
                raise InvalidParameter("diagonal weights need a tail below 1")

    # -- derived sequences -------------------------------------------------
    @property
    def d(self) -> np.ndarray:
        return np.cumprod(np.concatenate([[1.0], self.delta[1:]]))

    @property
    def q(self) -> np.ndarray:
        """``q_i`` for ``i = 1..len(d)``."""
        return np.cumsum(self.d)

    def delta_at(self, k) -> np.ndarray:
        k = np.asarray(k)
        n = len(self.delta)
        inside = np.minimum(k, n - 1)
        tail = self.tail if self.tail is not None else np.nan
        return np.where(k < n, self.delta[inside], tail)

    def d_prefix(self, n: int) -> np.ndarray:
        """``d_0 .. d_{n-1}``, extending the stored prefix with the tail."""
        d = self.d
        if n <= len(d):
            return d[:n].copy()
        if self.tail is None:
            raise InvalidParameter(f"weights hold {len(d)} entries, {n} requested")
        extra = d[-1] * self.tail ** np.arange(1, n - len(d) + 1)
        return np.concatenate([d, extra])

    @property
    def g(self) -> float:
        """Smallest ``d_k``; zero when the tail drives ``d`` to 0."""
        if not self.finite and self.tail < 1:
            return 0.0
        return float(self.d.min())

    @property
    def G(self) -> float:
        if not self.finite and self.tail > 1:
            return math.inf
        return float(self.d.max())

    @property
    def W(self) -> float:
        """``inf q_i / i`` over the prefix and, for infinite chains, the tail."""
        q = self.q
        ratios = q / np.arange(1, len(q) + 1)
        best = float(ratios.min())
        if self.finite:
            return best
        if self.tail < 1:
            return 0.0
        # With tail >= 1 the increments d_i eventually dominate the running
        # mean, after which q_i / i never decreases again.
        d = self.d
        i = len(q)
        qi, di = q[-1], d[-1]
        for _ in range(100_000):
            if di >= qi / i:
                break
            di *= self.tail
            qi += di
            i += 1
            best = min(best, qi / i)
        return best

    def to_dict(self, head: int = 20) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "delta_head": self.delta[1 : head + 1].tolist(),
            "tail": self.tail,
            "stored": len(self.delta),
            "g": self.g,
            "G": self.G,
            "W": self.W if self.kind == "triangular" else None,
        }


def constant_weights(kind: str, value: float, n: int, finite: bool, label: str = "") -> WeightSequence:
    """``delta_k = value`` for ``k = 1..n-1`` and in the tail."""
    delta = np.full(n, float(value))
    return WeightSequence(kind, delta, None if finite else float(value), finite, label=label)


def explicit_weights(kind: str, delta, tail: float | None, finite: bool) -> WeightSequence:
    """User-supplied ``delta_1, delta_2, ...`` (``delta_0`` is implied)."""
    delta = np.concatenate([[0.0], np.asarray(delta, dtype=float)])
    return WeightSequence(kind, delta, tail, finite, label="explicit")


# -- index sequences ------------------------------------------------------
@dataclass(frozen=True)
class IndexedValues:
    """Values on ``k`` in a stored index set plus an optional limit."""

    k: np.ndarray
    values: np.ndarray
    limit: float | None = None

    @property
    def inf(self) -> float:
        lo = float(self.values.min()) if len(self.values) else math.inf
        return lo if self.limit is None else min(lo, self.limit)


def _limits(spec: BDPSpec) -> tuple[float, float]:
    return spec.lam_limit, spec.mu_limit


def _index_top(spec: BDPSpec) -> int:
    """Largest ``k`` in the reduced index set: ``N-1`` or ``K_trunc``."""
    return spec.n_states - 1 if spec.finite else spec.trunc


def f_sequence(spec: BDPSpec, Delta: float) -> IndexedValues:
    if not Delta > 0:
        raise InvalidParameter("Delta must be positive")
    lam, mu = _limits(spec)
    if lam <= 0:
        raise Infeasible("hypotheses", "the limiting birth rate must be positive")
    k = np.arange(0, _index_top(spec) + 1)
    lp, lk = spec.lam(k - 1), spec.lam(k)
    mk, mn = spec.mu(k), spec.mu(k + 1)
    lin = Delta * lam * mn - lp * mu
    cross = lp * mn - lk * mk
    rad = lin**2 + 4 * Delta * lam * mu * cross
    scale = np.maximum(lin**2, (Delta * lam * mu) ** 2)
    if np.any(rad < -1e-12 * scale):
        bad = int(k[np.argmax(rad < -1e-12 * scale)])
        raise NegativeDiscriminant(f"radicand negative at k={bad}; condition (a) fails")
    vals = (lin + np.sqrt(np.maximum(rad, 0.0))) / (2 * Delta * lam * mu)
    limit = None if spec.finite else (Delta - 1 + abs(Delta - 1)) / (2 * Delta)
    return IndexedValues(k, vals, limit)


def h_sequence(spec: BDPSpec, Delta: float) -> IndexedValues:
    if not Delta > 0:
        raise InvalidParameter("Delta must be positive")
    lam, mu = _limits(spec)
    k = np.arange(1, spec.last + 1)
    vals = (Delta * mu * spec.lam(k - 1) - lam * spec.mu(k)) / (Delta * lam * mu)
    limit = None if spec.finite else (Delta - 1) / Delta
    return IndexedValues(k, vals, limit)


# -- feasibility records --------------------------------------------------
@dataclass(frozen=True, eq=False)
class ErgodicFeasibility:
    Delta: float
    c: float
    f: float
    lo: np.ndarray
    hi: np.ndarray
    lam: float
    mu: float
    a_mean: float
    b_mean: float
    conditions: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def drift(self) -> LinearRate:
        """``l(t) = c (mu b(t) - Delta lambda a(t))``."""
        return LinearRate(-self.c * self.Delta * self.lam, self.c * self.mu)

    @property
    def l_mean(self) -> float:
        return self.c * (self.mu * self.b_mean - self.Delta * self.lam * self.a_mean)

    mean_drift = l_mean

    def to_dict(self) -> dict:
        return {"regime": "ergodic", "Delta": self.Delta, "c": self.c, "f": self.f,
                "conditions": dict(self.conditions), "drift": self.drift.to_dict(),
                "l_mean": self.l_mean, "notes": list(self.notes)}


@dataclass(frozen=True, eq=False)
class NullFeasibility:
    Delta: float
    c: float
    h: float
    lo: np.ndarray
    hi: np.ndarray
    lam: float
    mu: float
    a_mean: float
    b_mean: float
    conditions: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def drift(self) -> LinearRate:
        """``theta(t) = c (lambda a(t) - Delta mu b(t))``."""
        return LinearRate(self.c * self.lam, -self.c * self.Delta * self.mu)

    @property
    def theta_mean(self) -> float:
        return self.c * (self.lam * self.a_mean - self.Delta * self.mu * self.b_mean)

    mean_drift = theta_mean

    def to_dict(self) -> dict:
        return {"regime": "null", "Delta": self.Delta, "c": self.c, "h": self.h,
                "conditions": dict(self.conditions), "drift": self.drift.to_dict(),
                "theta_mean": self.theta_mean, "notes": list(self.notes)}


def _pick(lo, hi, choice: str):
    if choice == "geometric":
        return np.sqrt(lo * hi)
    if choice == "lower":
        return lo
    if choice == "upper":
        return hi
    raise InvalidParameter(f"choice must be one of {CHOICES}")


def _check_interval(lo, hi, k, what="interval"):
    bad = lo > hi * (1 + INTERVAL_RTOL)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise Infeasible(what, f"empty interval at k={int(k[j])}: [{lo[j]:.6g}, {hi[j]:.6g}]")


def _clip(value, lo, hi):
    # keep the choice inside the interval when rounding puts lo a hair above hi
    return np.minimum(np.maximum(value, np.minimum(lo, hi)), hi)


# -- ergodic interval construction -----------------------------------------
def _ergodic_c_max(spec: BDPSpec, Delta: float) -> tuple[float, float]:
    """Largest admissible ``c`` for this ``Delta`` and the value ``f``."""
    f = f_sequence(spec, Delta).inf
    return min(f, _ergodic_strict(spec) * (1 - 1e-9)), f


def _ergodic_strict(spec: BDPSpec) -> float:
    """``min(1, inf_{k>=1} mu_(k+1)/mu)``: a strict upper bound for ``c``."""
    _, mu = _limits(spec)
    k = np.arange(1, _index_top(spec) + 1)
    ratio = spec.mu(k + 1) / mu
    return min(1.0, float(ratio.min()) if len(ratio) else 1.0)


def _ergodic_objective(spec, Delta, c_fixed):
    lam, mu = _limits(spec)
    a_m, b_m = spec.a.long_run_average(), spec.b.long_run_average()
    drift = mu * b_m - Delta * lam * a_m
    if drift <= 0:
        return -math.inf
    try:
        c_max, _ = _ergodic_c_max(spec, Delta)
    except (NegativeDiscriminant, Infeasible):
        return -math.inf
    if c_max <= 0:
        return -math.inf
    c = c_max if c_fixed is None else (c_fixed if c_fixed <= c_max else -math.inf)
    return c * drift if c > 0 else -math.inf


def _golden_max(fun, lo, hi, tol=GOLDEN_TOL):
    """Maximize a unimodal function on ``[lo, hi]`` by golden-section search."""
    inv = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - inv * (hi - lo), lo + inv * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv * (hi - lo)
            f2 = fun(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv * (hi - lo)
            f1 = fun(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _search_delta(objective, upper: float) -> float:
    grid = np.linspace(1.0, upper, GRID_POINTS + 1)[1:]
    vals = np.array([objective(x) for x in grid])
    if not np.any(np.isfinite(vals)):
        return float(grid[-1])
    i = int(np.nanargmax(vals))
    lo = grid[i - 1] if i > 0 else 1.0 + 1e-12
    hi = grid[min(i + 1, len(grid) - 1)]
    x, fx = _golden_max(objective, lo, hi)
    return float(x) if fx >= vals[i] else float(grid[i])


def find_ergodic_weights(spec: BDPSpec, Delta: float | None = None, c: float | None = None,
                         choice: str = "geometric") -> tuple[ErgodicFeasibility, WeightSequence]:
    """Weights satisfying the admissible intervals of the ergodic theorem.

    ``Delta`` or ``c`` set to ``None`` are searched for; the search
    maximizes the long-run drift ``c (mu b_m - Delta lambda a_m)``.
    """
    lam, mu = _limits(spec)
    a_m, b_m = spec.a.long_run_average(), spec.b.long_run_average()
    if lam <= 0:
        raise Infeasible("hypotheses", "the limiting birth rate must be positive")
    top = _index_top(spec)
    k = np.arange(0, top + 1)
    cross = spec.lam(k - 1) * spec.mu(k + 1) - spec.lam(k) * spec.mu(k)
    tol = 1e-12 * np.maximum(spec.lam(k) * spec.mu(k), 1.0)
    if np.any(cross < -tol):
        bad = int(k[np.argmax(cross < -tol)])
        raise Infeasible("a", f"lambda_(k-1) mu_(k+1) < lambda_k mu_k at k={bad}")
    if Delta is not None and not Delta > 1:
        raise InvalidParameter("Delta must exceed 1")
    if c is not None and not 0 < c < 1:
        raise InvalidParameter("c must lie in (0, 1)")

    if Delta is None:
        if a_m > 0:
            upper = min(mu * b_m / (lam * a_m), DELTA_CAP)
        else:
            upper = DELTA_CAP
        if upper <= 1:
            raise Infeasible("b", "mu b_m <= lambda a_m leaves no Delta > 1")
        Delta = _search_delta(lambda x: _ergodic_objective(spec, x, c), upper)

    if not mu * b_m - Delta * lam * a_m > 0:
        raise Infeasible("b", f"mu b_m - Delta lambda a_m = {mu * b_m - Delta * lam * a_m:.6g} <= 0")
    c_max, f = _ergodic_c_max(spec, Delta)
    if not f > 0:
        raise Infeasible("c", f"f = {f:.6g} is not positive")
    if c is None:
        c = c_max
    elif c > f * (1 + INTERVAL_RTOL):
        raise Infeasible("c", f"c = {c:.6g} exceeds f = {f:.6g}")
    elif c >= _ergodic_strict(spec):
        raise Infeasible("c", f"c = {c:.6g} violates c < mu_(k+1)/mu")

    ks = np.arange(1, top + 1)
    lo = spec.mu(ks) / (spec.mu(ks + 1) - c * mu)
    hi = (spec.lam(ks - 1) + c * Delta * lam) / spec.lam(ks)
    _check_interval(lo, hi, ks)
    delta = np.concatenate([[0.0], _clip(_pick(lo, hi, choice), lo, hi)])

    tail = None
    if not spec.finite:
        lo_lim, hi_lim = 1 / (1 - c), 1 + c * Delta
        tail = float(_pick(lo_lim, hi_lim, choice))
        # the tail must also sit inside the exact intervals past the prefix
        far = np.arange(top + 1, 4 * top + 2)
        lo_far = spec.mu(far) / (spec.mu(far + 1) - c * mu)
        hi_far = (spec.lam(far - 1) + c * Delta * lam) / spec.lam(far)
        out = (tail < lo_far * (1 - INTERVAL_RTOL)) | (tail > hi_far * (1 + INTERVAL_RTOL))
        if np.any(out):
            raise Infeasible("interval", f"tail weight {tail:.6g} leaves the interval at k={int(far[np.argmax(out)])}")

    feas = ErgodicFeasibility(
        Delta=float(Delta), c=float(c), f=float(f), lo=lo, hi=hi, lam=lam, mu=mu,
        a_mean=a_m, b_mean=b_m,
        conditions={"a": True, "b": True, "c": True, "interval": True},
    )
    w = WeightSequence("triangular", delta, tail, spec.finite, lo=lo, hi=hi, label=f"ergodic-{choice}")
    return feas, w


# -- null interval construction --------------------------------------------
def _null_c_max(spec: BDPSpec, Delta: float) -> tuple[float, float]:
    h = h_sequence(spec, Delta).inf
    return min(h, _null_strict(spec) * (1 - 1e-9)), h


def _null_strict(spec: BDPSpec) -> float:
    """``min(1, inf_k lambda_k/lambda)``: a strict upper bound for ``c``."""
    lam, _ = _limits(spec)
    ratio = spec.lam(np.arange(0, spec.last + 1)) / lam
    return min(1.0, float(ratio.min()))


def _null_objective(spec, Delta, c_fixed):
    lam, mu = _limits(spec)
    a_m, b_m = spec.a.long_run_average(), spec.b.long_run_average()
    drift = lam * a_m - Delta * mu * b_m
    if drift <= 0:
        return -math.inf
    c_max, _ = _null_c_max(spec, Delta)
    if c_max <= 0:
        return -math.inf
    c = c_max if c_fixed is None else (c_fixed if c_fixed <= c_max else -math.inf)
    return c * drift if c > 0 else -math.inf


def find_null_weights(spec: BDPSpec, Delta: float | None = None, c: float | None = None,
                      choice: str = "geometric") -> tuple[NullFeasibility, WeightSequence]:
    """Diagonal weights for the null-ergodic theorem (infinite chains only)."""
    if spec.finite:
        raise Infeasible("finite", "a finite chain cannot be null-ergodic")
    lam, mu = _limits(spec)
    a_m, b_m = spec.a.long_run_average(), spec.b.long_run_average()
    if lam <= 0:
        raise Infeasible("hypotheses", "the limiting birth rate must be positive")
    if Delta is not None and not Delta > 1:
        raise InvalidParameter("Delta must exceed 1")
    if c is not None and not 0 < c < 1:
        raise InvalidParameter("c must lie in (0, 1)")

    if Delta is None:
        if b_m > 0:
            upper = min(lam * a_m / (mu * b_m), DELTA_CAP)
        else:
            upper = DELTA_CAP
        if upper <= 1:
            raise Infeasible("drift", "lambda a_m <= mu b_m leaves no Delta > 1")
        Delta = _search_delta(lambda x: _null_objective(spec, x, c), upper)

    if not lam * a_m - Delta * mu * b_m > 0:
        raise Infeasible("drift", f"lambda a_m - Delta mu b_m = {lam * a_m - Delta * mu * b_m:.6g} <= 0")
    c_max, h = _null_c_max(spec, Delta)
    if not h > 0:
        raise Infeasible("h", f"h = {h:.6g} is not positive")
    if c is None:
        c = c_max
    elif c > h * (1 + INTERVAL_RTOL) or c >= _null_strict(spec):
        raise Infeasible("c", f"c = {c:.6g} violates c <= h = {h:.6g} or c < lambda_k/lambda")

    ks = np.arange(1, spec.last + 1)
    lo = spec.mu(ks) / (spec.mu(ks + 1) + c * mu * Delta)
    hi = (spec.lam(ks - 1) - c * lam) / spec.lam(ks - 1)
    _check_interval(lo, hi, ks)
    delta = np.concatenate([[0.0], _clip(_pick(lo, hi, choice), lo, hi)])

    lo_lim, hi_lim = 1 / (1 + c * Delta), 1 - c
    tail = float(_pick(lo_lim, hi_lim, choice))
    far = np.arange(spec.last + 1, 4 * spec.last + 2)
    lo_far = spec.mu(far) / (spec.mu(far + 1) + c * mu * Delta)
    hi_far = (spec.lam(far - 1) - c * lam) / spec.lam(far - 1)
    out = (tail < lo_far * (1 - INTERVAL_RTOL)) | (tail > hi_far * (1 + INTERVAL_RTOL))
    if np.any(out):
        raise Infeasible("interval", f"tail weight {tail:.6g} leaves the interval at k={int(far[np.argmax(out)])}")

    feas = NullFeasibility(
        Delta=float(Delta), c=float(c), h=float(h), lo=lo, hi=hi, lam=lam, mu=mu,
        a_mean=a_m, b_mean=b_m,
        conditions={"h": True, "drift": True, "c": True, "interval": True},
    )
    w = WeightSequence("diagonal", delta, tail, False, lo=lo, hi=hi, label=f"null-{choice}")
    return feas, w


# -- fixed weights of the preset queues -----------------------------------
def preset_weights(name: str, n: int, *, rho: float | None = None, S: int | None = None,
                   epsilon: float | None = None, case: int | None = None,
                   finite: bool | None = None) -> WeightSequence:
    """Closed-form weights for the four queues, ``n`` stored entries.

    ``mm1``/``mms``: ``delta = rho^(-1/2)``, triangular when ``rho < 1``
    and diagonal when ``rho > 1``.  ``mmss`` case 1 uses ``delta = 1`` and
    case 2 ``delta = (S-1)/S``.  ``discouragement`` uses 1 below ``S`` and
    ``1 + epsilon`` from ``S`` on.
    """
    if n < 1:
        raise InvalidParameter("need at least one stored weight")
    if name in ("mm1", "mms"):
        if rho is None or not rho > 0 or rho == 1:
            raise InvalidParameter(f"{name} weights need rho > 0 with rho != 1, got {rho!r}")
        kind = "triangular" if rho < 1 else "diagonal"
        return constant_weights(kind, rho**-0.5, n, bool(finite), label=f"{name}-preset")
    if name == "mmss":
        if S is None or S < 1:
            raise InvalidParameter("mmss weights need S >= 1")
        case = 1 if case is None else case
        if case == 1:
            value = 1.0
        elif case == 2:
            if S < 2:
                raise InvalidParameter("mmss case 2 needs S >= 2")
            value = (S - 1) / S
        else:
            raise InvalidParameter(f"mmss case must be 1 or 2, got {case!r}")
        return constant_weights("triangular", value, n, True, label=f"mmss-case{case}")
    if name == "discouragement":
        if S is None or S < 1:
            raise InvalidParameter("discouragement weights need S >= 1")
        if epsilon is None or not 0 < epsilon < 1:
            raise InvalidParameter(f"epsilon must lie in (0, 1), got {epsilon!r}")
        k = np.arange(n)
        delta = np.where(k < S, 1.0, 1.0 + epsilon)
        return WeightSequence("triangular", delta, 1.0 + epsilon, bool(finite), label="discouragement")
    raise InvalidParameter(f"no preset weights for {name!r}")


def weight_count(spec: BDPSpec, kind: str) -> int:
    """Stored entries a weight sequence needs for the numerical model."""
    if kind == "triangular":
        return spec.size - 1 if spec.finite else spec.size
    return spec.size


@dataclass(frozen=True, eq=False)
class PresetSetup:
    """Weights, drift rate and feasibility record for one preset queue."""

    regime: str
    weights: WeightSequence
    drift: LinearRate
    feasibility: ErgodicFeasibility | NullFeasibility | None
    notes: tuple = ()


def preset_setup(spec: BDPSpec, epsilon: float | None = None, case: int | None = None) -> PresetSetup:
    """Weights and drift for a preset queue, checked against the theorems.

    Single- and multi-server queues go through the interval construction
    with the standard ``(Delta, c)`` choices, which reproduces
    ``delta = rho^(-1/2)`` wherever that choice is admissible.
    """
    name = spec.name
    a_m, b_m = spec.a.long_run_average(), spec.b.long_run_average()
    if name in ("mm1", "mms"):
        rho = spec.traffic_intensity()
        S = spec.params.get("S", 1) or 1
        if rho < 1:
            Delta = rho**-0.5
            c = 1 - rho**0.5 if name == "mm1" else min(1.0 / S, 1 - rho**0.5)
            notes = ()
            if name == "mms" and c < 1 - rho**0.5:
                notes = ("light traffic: c = 1/S, interval upper endpoints used as weights",)
            feas, w = find_ergodic_weights(spec, Delta, c, choice="upper")
            return PresetSetup("ergodic", w, feas.drift, feas, notes)
        if rho > 1:
            Delta = rho**0.5
            c = 1 - rho**-0.5
            feas, w = find_null_weights(spec, Delta, c, choice="upper")
            notes = ()
            if abs(rho**0.5 - 1 - c) > 1e-12:
                notes = (f"c = rho^(1/2) - 1 = {rho ** 0.5 - 1:.6g} replaced by 1 - rho^(-1/2) = {c:.6g}",)
            return PresetSetup("null", w, feas.drift, feas, notes)
        raise Infeasible("b", "rho = 1 leaves no Delta > 1 with a positive drift")
    if name == "mmss":
        S = spec.params["S"]
        lam, mu = spec.params.get("lam", 1.0), spec.params.get("mu", 1.0)
        if case is None:
            case = 1 if b_m > 0 else 2
        w = preset_weights("mmss", weight_count(spec, "triangular"), S=S, case=case)
        if case == 1:
            # inf alpha_k = mu b(t): the k >= 1 terms have zero birth part
            drift = LinearRate(0.0, mu)
        else:
            delta = (S - 1) / S
            drift = LinearRate(lam * (1 - delta) if S > 1 else lam, 0.0)
        return PresetSetup("ergodic", w, drift, None)
    if name == "discouragement":
        S = spec.params["S"]
        lam, mu = spec.params.get("lam", 1.0), spec.params.get("mu", 1.0)
        if epsilon is None:
            epsilon = 0.5
        w = preset_weights("discouragement", weight_count(spec, "triangular"), S=S,
                           epsilon=epsilon, finite=False)
        scale = S * epsilon / (1 + epsilon)
        drift = LinearRate(-scale * epsilon * lam, scale * mu)
        if not dominates(coefficients(spec, w, "alpha"), drift):
            raise HypothesisUnmet(
                f"the closed-form drift does not bound alpha_k for S={S}, epsilon={epsilon}"
            )
        return PresetSetup("ergodic", w, drift, None)
    raise InvalidParameter(f"no preset weights for {name!r}")

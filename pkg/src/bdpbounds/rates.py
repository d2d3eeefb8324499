"""Asymptotically periodic basic functions ``a(t)``, ``b(t)``.

A :class:`RateFunction` is a periodic part plus a part vanishing at infinity,
each drawn from a small closed set of forms so that primitives and period
averages are available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InvalidParameter, NegativeRate

SAMPLES_PER_PERIOD = 10_000
MAX_CHECKED_PERIODS = 1_000


def _as_time(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("time must be nonnegative")
    return arr


# ---------------------------------------------------------------------------
# periodic parts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: float

    form = "constant"

    def evaluate(self, t, period):
        return np.full(np.shape(t), float(self.value))

    def primitive(self, t, period):
        return self.value * np.asarray(t, dtype=float)

    def mean(self, period):
        return float(self.value)

    def breakpoints(self, period):
        return np.zeros(0)

    def parameters(self):
        return {"value": self.value}


@dataclass(frozen=True)
class TrigSeries:
    """``offset + sum_k cos_k cos(2 pi k t/T) + sin_k sin(2 pi k t/T)``."""

    offset: float
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()

    form = "trig"

    def _harmonics(self, period):
        n = max(len(self.cos), len(self.sin))
        c = np.zeros(n)
        s = np.zeros(n)
        c[: len(self.cos)] = self.cos
        s[: len(self.sin)] = self.sin
        w = 2.0 * np.pi * np.arange(1, n + 1) / period
        return c, s, w

    def evaluate(self, t, period):
        t = np.asarray(t, dtype=float)
        c, s, w = self._harmonics(period)
        out = np.full(t.shape, float(self.offset))
        for ck, sk, wk in zip(c, s, w):
            out = out + ck * np.cos(wk * t) + sk * np.sin(wk * t)
        return out

    def primitive(self, t, period):
        t = np.asarray(t, dtype=float)
        c, s, w = self._harmonics(period)
        out = self.offset * t
        for ck, sk, wk in zip(c, s, w):
            out = out + ck * np.sin(wk * t) / wk + sk * (1.0 - np.cos(wk * t)) / wk
        return out

    def mean(self, period):
        return float(self.offset)

    def breakpoints(self, period):
        return np.zeros(0)

    def parameters(self):
        return {"offset": self.offset, "cos": list(self.cos), "sin": list(self.sin)}


def _check_knots(knots, values, period):
    if len(knots) == 0 or len(knots) != len(values):
        raise InvalidParameter("knots and values must be nonempty and of equal length")
    k = np.asarray(knots, dtype=float)
    if k[0] != 0.0 or np.any(np.diff(k) <= 0) or k[-1] >= period:
        raise InvalidParameter("knots must start at 0, increase strictly and stay below the period")


def _reduce(t, period):
    t = np.asarray(t, dtype=float)
    n = np.floor(t / period)
    r = np.clip(t - n * period, 0.0, period)
    return n, r


@dataclass(frozen=True)
class PiecewiseConstant:
    """Value ``values[i]`` on ``[knots[i], knots[i+1])``, repeated every period.

    At a jump the right limit is returned.
    """

    knots: tuple[float, ...]
    values: tuple[float, ...]

    form = "piecewise_constant"

    def _table(self, period):
        _check_knots(self.knots, self.values, period)
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        widths = np.diff(np.append(k, period))
        cum = np.concatenate([[0.0], np.cumsum(v * widths)])
        return k, v, cum

    def evaluate(self, t, period):
        k, v, _ = self._table(period)
        _, r = _reduce(t, period)
        idx = np.clip(np.searchsorted(k, r, side="right") - 1, 0, len(k) - 1)
        return v[idx]

    def primitive(self, t, period):
        k, v, cum = self._table(period)
        n, r = _reduce(t, period)
        idx = np.clip(np.searchsorted(k, r, side="right") - 1, 0, len(k) - 1)
        return n * cum[-1] + cum[idx] + v[idx] * (r - k[idx])

    def mean(self, period):
        return float(self._table(period)[2][-1] / period)

    def breakpoints(self, period):
        return np.asarray(self.knots, dtype=float)

    def parameters(self):
        return {"knots": list(self.knots), "values": list(self.values)}


@dataclass(frozen=True)
class PiecewiseLinear:
    """Periodic linear interpolation through ``(knots[i], values[i])``.

    The segment after the last knot closes back onto ``values[0]`` at ``t = T``.
    """

    knots: tuple[float, ...]
    values: tuple[float, ...]

    form = "piecewise_linear"

    def _table(self, period):
        _check_knots(self.knots, self.values, period)
        k = np.append(np.asarray(self.knots, dtype=float), period)
        v = np.asarray(self.values, dtype=float)
        v = np.append(v, v[0])
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(k))])
        return k, v, cum

    def evaluate(self, t, period):
        k, v, _ = self._table(period)
        _, r = _reduce(t, period)
        return np.interp(r, k, v)

    def primitive(self, t, period):
        k, v, cum = self._table(period)
        n, r = _reduce(t, period)
        idx = np.clip(np.searchsorted(k, r, side="right") - 1, 0, len(k) - 2)
        h = r - k[idx]
        slope = (v[idx + 1] - v[idx]) / (k[idx + 1] - k[idx])
        return n * cum[-1] + cum[idx] + v[idx] * h + 0.5 * slope * h * h

    def mean(self, period):
        return float(self._table(period)[2][-1] / period)

    def breakpoints(self, period):
        return np.asarray(self.knots, dtype=float)

    def parameters(self):
        return {"knots": list(self.knots), "values": list(self.values)}


# ---------------------------------------------------------------------------
# vanishing parts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    form = "zero"

    def evaluate(self, t):
        return np.zeros(np.shape(t))

    def primitive(self, t):
        return np.zeros(np.shape(t))

    def magnitude_at(self, t):
        return 0.0

    def burn_in(self, eps):
        return 0.0

    def parameters(self):
        return {}


@dataclass(frozen=True)
class ExponentialDecay:
    """``scale * exp(-rate * t)``."""

    scale: float
    rate: float

    form = "exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidParameter("exponential decay needs rate > 0")

    def evaluate(self, t):
        return self.scale * np.exp(-self.rate * np.asarray(t, dtype=float))

    def primitive(self, t):
        return self.scale / self.rate * -np.expm1(-self.rate * np.asarray(t, dtype=float))

    def magnitude_at(self, t):
        return abs(self.scale) * math.exp(-self.rate * t)

    def burn_in(self, eps):
        if abs(self.scale) <= eps:
            return 0.0
        return math.log(abs(self.scale) / eps) / self.rate

    def parameters(self):
        return {"scale": self.scale, "rate": self.rate}


@dataclass(frozen=True)
class PowerDecay:
    """``scale / (1 + t) ** power``."""

    scale: float
    power: float

    form = "power"

    def __post_init__(self):
        if not self.power > 0:
            raise InvalidParameter("power decay needs power > 0")

    def evaluate(self, t):
        return self.scale * (1.0 + np.asarray(t, dtype=float)) ** (-self.power)

    def primitive(self, t):
        x = np.log1p(np.asarray(t, dtype=float))
        if self.power == 1.0:
            return self.scale * x
        e = 1.0 - self.power
        return self.scale * np.expm1(e * x) / e

    def magnitude_at(self, t):
        return abs(self.scale) * (1.0 + t) ** (-self.power)

    def burn_in(self, eps):
        if abs(self.scale) <= eps:
            return 0.0
        return (abs(self.scale) / eps) ** (1.0 / self.power) - 1.0

    def parameters(self):
        return {"scale": self.scale, "power": self.power}


PERIODIC_FORMS = {
    "constant": lambda p: Constant(float(p["value"])),
    "trig": lambda p: TrigSeries(
        float(p.get("offset", 0.0)),
        tuple(float(x) for x in p.get("cos", ())),
        tuple(float(x) for x in p.get("sin", ())),
    ),
    "piecewise_constant": lambda p: PiecewiseConstant(
        tuple(float(x) for x in p["knots"]), tuple(float(x) for x in p["values"])
    ),
    "piecewise_linear": lambda p: PiecewiseLinear(
        tuple(float(x) for x in p["knots"]), tuple(float(x) for x in p["values"])
    ),
}

VANISHING_FORMS = {
    "zero": lambda p: Zero(),
    "exponential": lambda p: ExponentialDecay(float(p["scale"]), float(p["rate"])),
    "power": lambda p: PowerDecay(float(p["scale"]), float(p["power"])),
}


# ---------------------------------------------------------------------------
# rate function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateFunction:
    periodic: Any
    vanishing: Any = field(default_factory=Zero)
    period: float = 1.0

    def __post_init__(self):
        if not self.period > 0:
            raise InvalidParameter("period must be positive")
        self._check_nonnegative()

    # construction helpers --------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> RateFunction:
        return cls(Constant(float(value)))

    @classmethod
    def sinusoid(cls, mean: float, amplitude: float, period: float = 1.0, vanishing=None) -> RateFunction:
        """``mean + amplitude * sin(2 pi t / period)``."""
        return cls(TrigSeries(float(mean), (), (float(amplitude),)), vanishing or Zero(), float(period))

    # core operations -------------------------------------------------------

    def evaluate(self, t):
        """Value at ``t``; raises :class:`NegativeRate` rather than clamping."""
        tt = _as_time(t)
        v = self.periodic.evaluate(tt, self.period) + self.vanishing.evaluate(tt)
        if np.any(v < 0):
            raise NegativeRate(f"rate is negative at t={tt[v < 0].ravel()[:1] if tt.ndim else float(tt)}")
        return v if np.ndim(t) else float(v)

    __call__ = evaluate

    def periodic_value(self, t):
        return self.periodic.evaluate(np.asarray(t, dtype=float), self.period)

    def primitive(self, t):
        """``int_0^t f(u) du``."""
        tt = _as_time(t)
        v = self.periodic.primitive(tt, self.period) + self.vanishing.primitive(tt)
        return v if np.ndim(t) else float(v)

    def integrate(self, s, t):
        if np.any(np.asarray(s) > np.asarray(t)):
            raise ValueError("integrate needs s <= t")
        return self.primitive(t) - self.primitive(s)

    def long_run_average(self) -> float:
        return self.periodic.mean(self.period)

    def burn_in(self, eps: float = 1e-6) -> float:
        return self.vanishing.burn_in(eps)

    def vanishing_mass(self) -> float:
        """Upper bound on ``int_u^{u+T} |vanishing|`` over all ``u >= 0``."""
        if isinstance(self.vanishing, Zero):
            return 0.0
        return abs(float(self.vanishing.primitive(self.period)))

    def is_constant(self) -> bool:
        return isinstance(self.periodic, Constant) and isinstance(self.vanishing, Zero)

    def sample_grid(self, periods: float = 1.0) -> np.ndarray:
        n = int(SAMPLES_PER_PERIOD * periods) + 1
        return np.linspace(0.0, periods * self.period, n)

    def periodic_min(self) -> float:
        u = np.concatenate([self.sample_grid(), self.periodic.breakpoints(self.period)])
        return float(np.min(self.periodic.evaluate(u, self.period)))

    def periodic_max(self) -> float:
        u = np.concatenate([self.sample_grid(), self.periodic.breakpoints(self.period)])
        return float(np.max(self.periodic.evaluate(u, self.period)))

    def _check_nonnegative(self):
        lo = self.periodic_min()
        if lo < 0:
            raise NegativeRate(f"periodic part dips to {lo:.6g} < 0")
        if isinstance(self.vanishing, Zero) or self.vanishing.parameters().get("scale", 0.0) >= 0:
            return
        T = self.period
        for k in range(MAX_CHECKED_PERIODS):
            # |vanishing| is nonincreasing, so its start-of-period value is the worst case.
            if lo - self.vanishing.magnitude_at(k * T) >= 0:
                return
            u = np.linspace(k * T, (k + 1) * T, SAMPLES_PER_PERIOD + 1)
            v = self.periodic.evaluate(u, T) + self.vanishing.evaluate(u)
            if np.any(v < 0):
                raise NegativeRate(f"rate is negative near t={u[np.argmax(v < 0)]:.6g}")
        raise InvalidParameter("could not certify nonnegativity within the checked horizon")

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "form": self.periodic.form,
            "parameters": self.periodic.parameters(),
            "period": self.period,
            "vanishing": {"form": self.vanishing.form, "parameters": self.vanishing.parameters()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> RateFunction:
        try:
            periodic = PERIODIC_FORMS[data["form"]](data.get("parameters", {}))
            van = data.get("vanishing") or {"form": "zero"}
            vanishing = VANISHING_FORMS[van["form"]](van.get("parameters", {}))
        except KeyError as exc:
            raise InvalidParameter(f"unknown or incomplete rate form: {exc}") from exc
        return cls(periodic, vanishing, float(data.get("period", 1.0)))


@dataclass(frozen=True)
class LinearRate:
    """Symbolic rate ``coef_a * a(t) + coef_b * b(t) + const``."""

    coef_a: float
    coef_b: float
    const: float = 0.0

    def evaluate(self, a: RateFunction, b: RateFunction, t):
        return self.coef_a * a.evaluate(t) + self.coef_b * b.evaluate(t) + self.const

    def primitive(self, a: RateFunction, b: RateFunction, t):
        return self.coef_a * a.primitive(t) + self.coef_b * b.primitive(t) + self.const * np.asarray(t, dtype=float)

    def integrate(self, a: RateFunction, b: RateFunction, s, t):
        return self.primitive(a, b, t) - self.primitive(a, b, s)

    def mean(self, a: RateFunction, b: RateFunction) -> float:
        return self.coef_a * a.long_run_average() + self.coef_b * b.long_run_average() + self.const

    def scaled(self, factor: float) -> LinearRate:
        return LinearRate(self.coef_a * factor, self.coef_b * factor, self.const * factor)

    def is_constant_in_time(self, a: RateFunction, b: RateFunction) -> bool:
        return (self.coef_a == 0 or a.is_constant()) and (self.coef_b == 0 or b.is_constant())

    def to_dict(self) -> dict:
        return {"a": self.coef_a, "b": self.coef_b, "const": self.const}

    @classmethod
    def from_dict(cls, d: dict) -> LinearRate:
        return cls(float(d["a"]), float(d["b"]), float(d.get("const", 0.0)))

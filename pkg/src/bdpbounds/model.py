"""Birth-death process specifications and their intensity matrices.

Rates follow the product form ``lambda_n(t) = lambda_n a(t)``,
``mu_n(t) = mu_n b(t)``.  Matrices use the column convention
``dp/dt = A(t) p``: column ``j`` holds the outflow of state ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, UnknownPreset
from .rates import RateFunction

DEFAULT_TRUNC = 200
PRESETS = ("mm1", "mms", "discouragement", "mmss")

Rule = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class BDPSpec:
    """A birth-death process on ``{0..N}`` (``n_states=N``) or on ``{0,1,...}``.

    ``birth`` and ``death`` map integer arrays ``n`` to unit-scaled rates.
    Infinite chains are integrated on ``{0..trunc}`` with a reflecting top.
    """

    birth: Rule
    death: Rule
    a: RateFunction
    b: RateFunction
    n_states: int | None = None
    trunc: int = DEFAULT_TRUNC
    lambda_lim: float = 0.0
    mu_lim: float = 0.0
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_states is not None and self.n_states < 1:
            raise InvalidParameter("a finite chain needs N >= 1")
        if self.trunc < 2:
            raise InvalidParameter("truncation level must be at least 2")
        lam = self.lam(np.arange(self.last))
        mu = self.mu(np.arange(1, self.last + 1))
        if np.any(lam <= 0) or np.any(mu <= 0):
            raise InvalidParameter("need lambda_n > 0 below the top state and mu_n > 0 above state 0")
        if self.mu(np.array([0]))[0] != 0:
            raise InvalidParameter("mu_0 must be 0")

    @property
    def finite(self) -> bool:
        return self.n_states is not None

    @property
    def last(self) -> int:
        """Index of the top state of the numerical model."""
        return self.n_states if self.finite else self.trunc

    @property
    def size(self) -> int:
        return self.last + 1

    @property
    def lam_limit(self) -> float:
        """``lambda`` of the theory: the limit, or ``lambda_{N-1}`` when finite."""
        if self.finite:
            return float(self.lam(np.array([self.n_states - 1]))[0])
        return float(self.lambda_lim)

    @property
    def mu_limit(self) -> float:
        if self.finite:
            return float(self.mu(np.array([self.n_states]))[0])
        return float(self.mu_lim)

    def lam(self, n) -> np.ndarray:
        """Unit birth rates; zero at and above ``N`` for finite chains, 0 for n < 0."""
        n = np.asarray(n)
        out = np.where(n >= 0, self.birth(np.maximum(n, 0)), 0.0).astype(float)
        if self.finite:
            out = np.where(n >= self.n_states, 0.0, out)
        return out

    def mu(self, n) -> np.ndarray:
        n = np.asarray(n)
        out = np.where(n >= 1, self.death(np.maximum(n, 1)), 0.0).astype(float)
        if self.finite:
            out = np.where(n > self.n_states, 0.0, out)
        return out

    def generator_rates(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit rates of the numerical model, with ``lambda_last = 0``."""
        idx = np.arange(self.size)
        lam = self.lam(idx)
        lam[-1] = 0.0
        return lam, self.mu(idx)

    def traffic_intensity(self) -> float:
        return self.lam_limit * self.a.long_run_average() / (self.mu_limit * self.b.long_run_average())

    def with_rates(self, a: RateFunction | None = None, b: RateFunction | None = None) -> BDPSpec:
        return BDPSpec(
            self.birth, self.death, a or self.a, b or self.b, self.n_states, self.trunc,
            self.lambda_lim, self.mu_lim, self.name, dict(self.params),
        )

    def with_trunc(self, trunc: int) -> BDPSpec:
        return BDPSpec(
            self.birth, self.death, self.a, self.b, self.n_states, int(trunc),
            self.lambda_lim, self.mu_lim, self.name, dict(self.params),
        )

    def to_dict(self) -> dict:
        out = {"name": self.name, "params": dict(self.params), "n_states": self.n_states,
               "trunc": None if self.finite else self.trunc,
               "a": self.a.to_dict(), "b": self.b.to_dict()}
        if self.name == "custom":
            out["birth"] = self.lam(np.arange(self.last)).tolist()
            out["death"] = self.mu(np.arange(1, self.last + 1)).tolist()
        return out


def from_tables(birth, death, a: RateFunction, b: RateFunction) -> BDPSpec:
    """Finite chain from explicit tables ``birth = [lambda_0..lambda_{N-1}]``,
    ``death = [mu_1..mu_N]``."""
    lam = np.asarray(birth, dtype=float)
    mu = np.asarray(death, dtype=float)
    if lam.ndim != 1 or lam.shape != mu.shape or len(lam) < 1:
        raise DimensionMismatch("birth and death tables must be 1-d and of equal length N")
    N = len(lam)
    lam_ext = np.append(lam, 0.0)
    mu_ext = np.concatenate([[0.0], mu])
    return BDPSpec(
        birth=lambda n: lam_ext[np.minimum(n, N)],
        death=lambda n: mu_ext[np.minimum(n, N)],
        a=a, b=b, n_states=N, name="custom",
        params={"birth": lam.tolist(), "death": mu.tolist()},
    )


def preset(name: str, a: RateFunction, b: RateFunction, S: int | None = None,
           trunc: int = DEFAULT_TRUNC, lam: float = 1.0, mu: float = 1.0) -> BDPSpec:
    """The four queues: ``mm1``, ``mms``, ``discouragement`` and ``mmss``.

    ``lam`` and ``mu`` scale the unit rate sequences (both 1 in the
    textbook forms, where all time dependence sits in ``a`` and ``b``).
    """
    if name not in PRESETS:
        raise UnknownPreset(f"unknown preset {name!r}; expected one of {PRESETS}")
    if name != "mm1":
        if S is None or int(S) != S or S < 1:
            raise InvalidParameter(f"preset {name!r} needs an integer S >= 1, got {S!r}")
        S = int(S)
    if lam <= 0 or mu <= 0:
        raise InvalidParameter("rate scales must be positive")
    params = {"S": S, "lam": lam, "mu": mu}

    if name == "mm1":
        params.pop("S")
        return BDPSpec(
            birth=lambda n: np.full(np.shape(n), lam),
            death=lambda n: np.full(np.shape(n), mu),
            a=a, b=b, trunc=trunc, lambda_lim=lam, mu_lim=mu, name=name, params=params,
        )
    if name == "mms":
        return BDPSpec(
            birth=lambda n: np.full(np.shape(n), lam),
            death=lambda n: mu * np.minimum(n, S).astype(float),
            a=a, b=b, trunc=trunc, lambda_lim=lam, mu_lim=S * mu, name=name, params=params,
        )
    if name == "discouragement":
        return BDPSpec(
            birth=lambda n: np.where(n < S, lam, lam / np.maximum(np.asarray(n) - S + 2.0, 1.0)),
            death=lambda n: mu * np.minimum(n, S).astype(float),
            a=a, b=b, trunc=trunc, lambda_lim=0.0, mu_lim=S * mu, name=name, params=params,
        )
    # mmss: loss system on {0..S}
    return BDPSpec(
        birth=lambda n: np.full(np.shape(n), lam),
        death=lambda n: mu * np.asarray(n, dtype=float),
        a=a, b=b, n_states=S, name=name, params=params,
    )


def build_A(spec: BDPSpec, t: float) -> np.ndarray:
    lam, mu = spec.generator_rates()
    lt = lam * spec.a.evaluate(t)
    mt = mu * spec.b.evaluate(t)
    A = np.diag(-(lt + mt))
    A += np.diag(lt[:-1], -1)
    A += np.diag(mt[1:], 1)
    return A


def build_B(spec: BDPSpec, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Reduced system ``dz/dt = B z + f`` for ``z = (p_1..p_N)`` after
    eliminating ``p_0 = 1 - sum z``."""
    A = build_A(spec, t)
    f = A[1:, 0].copy()
    B = A[1:, 1:] - f[:, None]
    return B, f


def build_transformed(spec: BDPSpec, w, t: float) -> np.ndarray:
    """Closed-form ``D B D^-1`` (triangular weights) or ``D A D^-1`` (diagonal)."""
    lam, mu = spec.generator_rates()
    lt = lam * spec.a.evaluate(t)
    mt = mu * spec.b.evaluate(t)
    if w.kind == "triangular":
        n = spec.size - 1
        d = w.d_prefix(n)
        M = np.diag(-(lt[:n] + mt[1 : n + 1]))
        # super-diagonal (k, k+1): d_k / d_{k+1} mu_{k+1}
        M += np.diag(d[:-1] / d[1:] * mt[1:n], 1)
        # sub-diagonal (k+1, k): d_{k+1} / d_k lambda_{k+1}
        M += np.diag(d[1:] / d[:-1] * lt[1:n], -1)
        return M
    if w.kind == "diagonal":
        n = spec.size
        d = w.d_prefix(n)
        M = np.diag(-(lt + mt))
        M += np.diag(d[:-1] / d[1:] * mt[1:], 1)
        M += np.diag(d[1:] / d[:-1] * lt[:-1], -1)
        return M
    raise DimensionMismatch(f"unknown weight kind {w.kind!r}")


def triangular_D(d: np.ndarray) -> np.ndarray:
    """Upper-triangular matrix with row ``k`` equal to ``d_k`` from column ``k`` on."""
    n = len(d)
    return np.triu(np.ones((n, n))) * np.asarray(d, dtype=float)[:, None]

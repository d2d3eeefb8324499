"""Logarithmic norms in l1 and the coefficient sequences of the transforms.

For triangular weights the transformed reduced matrix has column sums
``-alpha_k(t)``; ``zeta_k(t)`` is the matching absolute column sum.  For
diagonal weights the transformed full matrix has column sums
``-alpha0_k(t)``.  Each coefficient is linear in ``(a(t), b(t))``:
``alpha_k(t) = A_k a(t) + B_k b(t)``, which lets time-uniform bounds be
taken componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KindMismatch
from .model import BDPSpec
from .rates import LinearRate
from .serialize import write_csv

COEFFICIENT_KINDS = ("alpha", "zeta", "alpha0")


def lognorm_l1(M) -> float:
    """Largest column value ``m_jj + sum_{i != j} |m_ij|``."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    diag = np.diag(M)
    off = np.abs(M).sum(axis=0) - np.abs(diag)
    return float(np.max(diag + off))


def lognorm_limit(M, h: float = 1e-6) -> float:
    """Difference quotient ``(||I + hM||_1 - 1)/h`` approximating the norm."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    return (float(np.abs(np.eye(n) + h * M).sum(axis=0).max()) - 1.0) / h


@dataclass(frozen=True)
class Coefficients:
    """``A_k``, ``B_k`` on the stored index set plus their ``k -> inf`` limit."""

    kind: str
    k: np.ndarray
    A: np.ndarray
    B: np.ndarray
    A_lim: float | None = None
    B_lim: float | None = None

    def values(self, a: float, b: float) -> np.ndarray:
        return self.A * a + self.B * b

    def limit_value(self, a: float, b: float) -> float | None:
        if self.A_lim is None:
            return None
        # the limit of a vanishing birth part is 0 whatever a(t) is
        return (self.A_lim * a if self.A_lim else 0.0) + (self.B_lim * b if self.B_lim else 0.0)

    def lower_rate(self) -> LinearRate:
        """Time-uniform lower bound valid for all ``a, b >= 0``."""
        A, B = self.A, self.B
        if self.A_lim is not None:
            A, B = np.append(A, self.A_lim), np.append(B, self.B_lim)
        return LinearRate(float(A.min()), float(B.min()))

    def upper_rate(self) -> LinearRate:
        A, B = self.A, self.B
        if self.A_lim is not None:
            A, B = np.append(A, self.A_lim), np.append(B, self.B_lim)
        return LinearRate(float(A.max()), float(B.max()))


def coefficients(spec: BDPSpec, w, kind: str) -> Coefficients:
    """Closed-form ``A_k``, ``B_k`` with the ``delta_0 = 0`` convention."""
    if kind not in COEFFICIENT_KINDS:
        raise KindMismatch(f"coefficient kind must be one of {COEFFICIENT_KINDS}")
    if kind in ("alpha", "zeta") and w.kind != "triangular":
        raise KindMismatch(f"{kind} needs triangular weights, got {w.kind}")
    if kind == "alpha0" and w.kind != "diagonal":
        raise KindMismatch(f"alpha0 needs diagonal weights, got {w.kind}")

    if kind == "alpha0":
        top = spec.n_states if spec.finite else spec.trunc
    else:
        top = spec.n_states - 1 if spec.finite else spec.trunc
    k = np.arange(0, top + 1)
    dk = w.delta_at(k)
    dn = w.delta_at(k + 1)
    if spec.finite:
        # past the top state the delta never multiplies a nonzero rate
        dn = np.where(np.isnan(dn), 0.0, dn)
    lk, ln = spec.lam(k), spec.lam(k + 1)
    mk, mn = spec.mu(k), spec.mu(k + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        back = np.where(k == 0, 0.0, mk / np.where(k == 0, 1.0, dk))

    if kind == "alpha":
        A, B = lk - dn * ln, mn - back
    elif kind == "zeta":
        A, B = lk + dn * ln, mn + back
    else:
        A, B = lk * (1 - dn), mk * (1 - np.where(k == 0, 1.0, 1 / np.where(k == 0, 1.0, dk)))
        if spec.finite:
            A = np.where(k == spec.n_states, 0.0, A)

    A_lim = B_lim = None
    if not spec.finite:
        lam, mu, t = spec.lam_limit, spec.mu_limit, w.tail
        if kind == "alpha":
            A_lim, B_lim = lam * (1 - t), mu * (1 - 1 / t)
        elif kind == "zeta":
            A_lim, B_lim = lam * (1 + t), mu * (1 + 1 / t)
        else:
            A_lim, B_lim = lam * (1 - t), mu * (1 - 1 / t)
    return Coefficients(kind, k, A, B, A_lim, B_lim)


@dataclass(frozen=True)
class CoefficientProfile:
    t: float
    kind: str
    k: np.ndarray
    values: np.ndarray
    limit: float | None

    @property
    def inf(self) -> float:
        lo = float(self.values.min())
        return lo if self.limit is None else min(lo, self.limit)

    @property
    def sup(self) -> float:
        hi = float(self.values.max())
        return hi if self.limit is None else max(hi, self.limit)

    def to_csv(self, path) -> None:
        rows = [[int(k), float(v)] for k, v in zip(self.k, self.values)]
        if self.limit is not None:
            rows.append(["inf", float(self.limit)])
        write_csv(path, ["k", "value"], rows)


def coefficient_profile(spec: BDPSpec, w, t: float, kind: str) -> CoefficientProfile:
    co = coefficients(spec, w, kind)
    a, b = float(spec.a(t)), float(spec.b(t))
    return CoefficientProfile(float(t), kind, co.k, co.values(a, b), co.limit_value(a, b))


def lognorm_of_transformed(spec: BDPSpec, w, t: float) -> float:
    """``-inf_k alpha_k(t)`` (or ``alpha0``) over the full index set."""
    kind = "alpha" if w.kind == "triangular" else "alpha0"
    return -coefficient_profile(spec, w, t, kind).inf


def linear_bounds(spec: BDPSpec, w, kind: str) -> tuple[LinearRate, LinearRate]:
    """Rates ``(lower, upper)`` enclosing every coefficient at every time."""
    co = coefficients(spec, w, kind)
    return co.lower_rate(), co.upper_rate()


def dominates(co: Coefficients, rate: LinearRate) -> bool:
    """True when ``A_k >= rate.a`` and ``B_k >= rate.b`` for every ``k``.

    This is sufficient for ``alpha_k(t) >= rate(t)`` whenever ``a, b >= 0``.
    """
    if rate.const > 0:
        return False
    ok = bool(np.all(co.A >= rate.coef_a - 1e-12 * (1 + abs(rate.coef_a))))
    ok &= bool(np.all(co.B >= rate.coef_b - 1e-12 * (1 + abs(rate.coef_b))))
    if co.A_lim is not None:
        ok &= co.A_lim >= rate.coef_a - 1e-12 and co.B_lim >= rate.coef_b - 1e-12
    return ok


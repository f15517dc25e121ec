"""Closed-form trajectories the process variables are expected to follow.

With ``t = i / n^2`` and ``p = 1 - 6t``::

    q(t)       = exp(-sum_F 6 e_F / |Aut F| * (6t)^(e_F - 1))
    q_tilde(t) = sum_F 36 e_F (e_F - 1) (6t)^(e_F - 2) / |Aut F|      (q' = -q q_tilde)
    q_hat      = p^3 q n^3 / 6           (available triples)
    y_hat      = p^2 q n                 (available codegree of an alive pair)
    w_hat[F,k] = 6 e_F / |Aut F| * C(e_F - 1, k) (6t)^k (p^3 q n)^(e_F - 1 - k)

Sums run over obstructions on at least six vertices only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson

from .catalog import Obstruction, ObstructionCatalog

T_END = 1.0 / 6.0


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    n: int
    p: float
    pi: float
    q: float
    q_tilde: float
    q_hat: float
    y_hat: float
    w_hat: dict = field(default_factory=dict)  # (key hex, k) -> value

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("t", "n", "p", "pi", "q", "q_tilde", "q_hat", "y_hat")}
        d["w_hat"] = {f"{key}:{k}": v for (key, k), v in sorted(self.w_hat.items())}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrajectoryPoint":
        w = {}
        for name, v in d.get("w_hat", {}).items():
            key, k = name.rsplit(":", 1)
            w[(key, int(k))] = float(v)
        return cls(float(d["t"]), int(d["n"]), float(d["p"]), float(d["pi"]), float(d["q"]),
                   float(d["q_tilde"]), float(d["q_hat"]), float(d["y_hat"]), w)


def _check_t(t: float) -> None:
    if not (0.0 <= t <= T_END):
        raise ValueError(f"t={t} outside [0, 1/6]")


def _coef(F: Obstruction) -> float:
    return 6.0 * F.edge_count / F.aut_count


def log_q(t: float, catalog: ObstructionCatalog) -> float:
    return -sum(_coef(F) * (6.0 * t) ** (F.edge_count - 1) for F in catalog.large_members)


def q_of(t: float, catalog: ObstructionCatalog) -> float:
    return math.exp(log_q(t, catalog))


def q_tilde_of(t: float, catalog: ObstructionCatalog) -> float:
    return sum(36.0 * F.edge_count * (F.edge_count - 1) * (6.0 * t) ** (F.edge_count - 2) / F.aut_count
               for F in catalog.large_members)


def _power(base: float, expo: int) -> float:
    """base**expo, falling back to log space when it would overflow."""
    if expo == 0:
        return 1.0
    if base <= 0.0:
        return 0.0 if base == 0.0 else base**expo
    lg = expo * math.log(base)
    if lg > 690.0:
        return math.exp(min(lg, 709.0)) if lg < 709.0 else math.inf
    return base**expo


def w_hat(F: Obstruction, k: int, t: float, n: int, q: float | None = None,
          catalog: ObstructionCatalog | None = None) -> float:
    e = F.edge_count
    if not 0 <= k <= e - 2:
        raise ValueError(f"k={k} outside [0, {e - 2}]")
    if q is None:
        q = q_of(t, catalog)
    p = 1.0 - 6.0 * t
    return _coef(F) * math.comb(e - 1, k) * (6.0 * t) ** k * _power(p**3 * q * n, e - 1 - k)


def evaluate(t: float, n: int, catalog: ObstructionCatalog) -> TrajectoryPoint:
    """All predicted values at time ``t`` for ``n`` vertices."""
    _check_t(t)
    p = 1.0 - 6.0 * t
    q = q_of(t, catalog)
    w = {}
    for F in catalog.large_members:
        for k in range(F.edge_count - 1):
            w[(F.key_hex, k)] = w_hat(F, k, t, n, q)
    return TrajectoryPoint(
        t=t, n=n, p=p, pi=6.0 * t / n, q=q, q_tilde=q_tilde_of(t, catalog),
        q_hat=p**3 * q * n**3 / 6.0, y_hat=p**2 * q * n, w_hat=w,
    )


def copies_count(F: Obstruction, n: int) -> float:
    """Number of copies of F in the complete n-vertex triple system."""
    if n < F.vertex_count:
        return 0.0
    return math.perm(n, F.vertex_count) / F.aut_count


def n_uvw_count(F: Obstruction, n: int) -> float:
    """Exact number of copies of F through a fixed triple: |copies| * e_F / C(n,3).

    The leading-order form is ``6 e_F / |Aut F| * n^(e_F - 1)``
    (:func:`n_uvw_leading`), equal to this value up to ``O(n^(e_F - 2))``.
    """
    if n < F.vertex_count:
        return 0.0
    return copies_count(F, n) * F.edge_count / math.comb(n, 3)


def n_uvw_leading(F: Obstruction, n: int) -> float:
    return _coef(F) * float(n) ** (F.edge_count - 1)


class CountingEstimate(NamedTuple):
    log_n1: float
    log_n2: float
    log_ratio: float
    closed_form_log_n1: float | None
    closed_form_log_ratio: float | None


def _integral_log_q(catalog: ObstructionCatalog, panels: int = 10_000) -> float:
    ts = np.linspace(0.0, T_END, panels + 1)
    vals = np.array([log_q(t, catalog) for t in ts])
    return float(simpson(vals, x=ts))


def counting_estimate(n: int, catalog: ObstructionCatalog) -> CountingEstimate:
    """Natural-log estimates of completions (N1), orderings (N2) and their ratio.

    ``log N1 = n^2 * integral_0^{1/6} log q_hat(t) dt``: the log-p part is
    integrated exactly (``3 * integral log(1 - 6t) = -1/2``), the log-q part
    by composite Simpson.  ``log N2 = m log m - m`` with ``m = n^2/6``.
    For ell = 6 the closed forms ``(n^2/6)(log(n^3/6) - 13/4)`` and
    ``(n^2/6)(log n - 9/4)`` are reported too.
    """
    m = n * n / 6.0
    integral = T_END * math.log(n**3 / 6.0) - 0.5 + _integral_log_q(catalog)
    log_n1 = n * n * integral
    log_n2 = m * math.log(m) - m
    closed_n1 = closed_ratio = None
    if catalog.ell == 6:
        closed_n1 = m * (math.log(n**3 / 6.0) - 3.0 - 0.25)
        closed_ratio = m * (math.log(n) - 2.25)
    return CountingEstimate(log_n1, log_n2, log_n1 - log_n2, closed_n1, closed_ratio)


class DerivativeReport(NamedTuple):
    t: float
    q_prime_fd: float
    q_prime_pred: float
    fd_deviation: float
    identity_lhs: float
    identity_rhs: float
    identity_deviation: float


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    if scale < 1e-300:
        return 0.0
    return abs(a - b) / scale


def derivative_check(t: float, n: int, catalog: ObstructionCatalog, h: float = 1e-6) -> DerivativeReport:
    """Central-difference check of ``q' = -q q_tilde`` and of
    ``sum_F w_hat[F, e_F - 2] / q_hat = q_tilde / n^2`` at an interior time."""
    if not (0.0 < t - h and t + h < T_END):
        raise ValueError(f"t={t} is not interior for step {h}")
    fd = (q_of(t + h, catalog) - q_of(t - h, catalog)) / (2.0 * h)
    pred = -q_of(t, catalog) * q_tilde_of(t, catalog)
    pt = evaluate(t, n, catalog)
    lhs = sum(pt.w_hat[(F.key_hex, F.edge_count - 2)] for F in catalog.large_members) / pt.q_hat
    rhs = pt.q_tilde / n**2
    return DerivativeReport(t, fd, pred, _rel(fd, pred), lhs, rhs, _rel(lhs, rhs))

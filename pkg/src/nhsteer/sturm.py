"""Sturm-Liouville certification of the supported families.

Every family here solves (1/w) (P y')' + lambda y = 0 on (-1, 1) with

* legendre:          P = 1 - t^2,                 lambda = n (n + 1)
* chebyshev_first:   P = sqrt(1 - t^2),           lambda = n^2
* chebyshev_second:  P = (1 - t^2)^(3/2),         lambda = n (n + 2)
* jacobi:            P = (1-t)^(a+1) (1+t)^(b+1), lambda = n (n + a + b + 1)
* trig_sin/cos:      P = 1,                       lambda = n^2 pi^2

``sl_residual`` plugs a candidate function into that expression;
``jacobi_pairing`` builds the coefficient pair (a1, a2) whose weighted-energy
problem has Jacobi extremals, together with the partner family that shares
the same eigenvalue, and ``certify_pair`` checks both numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .orthopoly import (
    CANONICAL_INTERVAL,
    JACOBI,
    LEGENDRE,
    CHEBYSHEV_FIRST,
    CHEBYSHEV_SECOND,
    TRIG_COS,
    TRIG_SIN,
    BasisElement,
    InputSignal,
    Harmonic,
    WeightFn,
    evaluate,
    evaluate_derivative,
    evaluate_second_derivative,
    weight_fn,
)

__all__ = [
    "SLProblem",
    "JacobiPairing",
    "PairingReport",
    "chebyshev_nodes",
    "family_sl_problem",
    "sl_residual",
    "jacobi_pairing",
    "certify_pair",
    "value_and_derivatives",
]

_FD_STEP = 1e-5


def chebyshev_nodes(count: int, interval=CANONICAL_INTERVAL) -> np.ndarray:
    """``count`` strictly interior Chebyshev-spaced points of the interval."""
    if count < 1:
        raise ValueError("need at least one node")
    lo, hi = float(interval[0]), float(interval[1])
    k = np.arange(count)
    tau = np.cos((2 * k + 1) * np.pi / (2 * count))
    return 0.5 * (hi + lo) + 0.5 * (hi - lo) * tau


def value_and_derivatives(y, t: float) -> tuple[float, float, float]:
    """(y, y', y'') at a scalar t.

    Basis elements, input signals and harmonics use their analytic
    derivatives; a bare callable falls back to central differences with
    step 1e-5 (good to ~1e-6 for smooth functions).
    """
    if isinstance(y, BasisElement):
        return (
            float(evaluate(y, t)),
            float(evaluate_derivative(y, t)),
            float(evaluate_second_derivative(y, t)),
        )
    if isinstance(y, (InputSignal, Harmonic)):
        return float(y(t)), float(y.derivative(t)), float(y.second_derivative(t))
    h = _FD_STEP
    f0 = float(y(t))
    fp = float(y(t + h))
    fm = float(y(t - h))
    return f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)


@dataclass(frozen=True)
class SLProblem:
    """Coefficients of (1/w) (P y')' + Q y + lambda y with its eigenvalue."""

    p: object
    dp: object
    w: object
    lam: float
    q: object | None = None
    interval: tuple[float, float] = CANONICAL_INTERVAL


def family_sl_problem(family: str, index: int, jacobi_params=None) -> SLProblem:
    """The self-adjoint problem solved by the family's ``index``-th element."""
    n = int(index)
    if n < 0:
        raise ValueError("index must be nonnegative")
    if family == LEGENDRE:
        return SLProblem(
            p=lambda t: 1.0 - t * t,
            dp=lambda t: -2.0 * t,
            w=lambda t: np.ones_like(np.asarray(t, dtype=float)),
            lam=float(n * (n + 1)),
        )
    if family == CHEBYSHEV_FIRST:
        return SLProblem(
            p=lambda t: np.sqrt(1.0 - t * t),
            dp=lambda t: -t / np.sqrt(1.0 - t * t),
            w=weight_fn(CHEBYSHEV_FIRST),
            lam=float(n * n),
        )
    if family == CHEBYSHEV_SECOND:
        return SLProblem(
            p=lambda t: (1.0 - t * t) ** 1.5,
            dp=lambda t: -3.0 * t * np.sqrt(1.0 - t * t),
            w=weight_fn(CHEBYSHEV_SECOND),
            lam=float(n * (n + 2)),
        )
    if family == JACOBI:
        if jacobi_params is None:
            raise ValueError("jacobi problems need jacobi_params")
        alpha, beta = map(float, jacobi_params)
        if alpha <= -1.0 or beta <= -1.0:
            raise ValueError("jacobi parameters must satisfy alpha, beta > -1")

        def p(t, a=alpha, b=beta):
            return (1.0 - t) ** (a + 1.0) * (1.0 + t) ** (b + 1.0)

        def dp(t, a=alpha, b=beta):
            return p(t) * (-(a + 1.0) / (1.0 - t) + (b + 1.0) / (1.0 + t))

        return SLProblem(
            p=p,
            dp=dp,
            w=weight_fn(JACOBI, jacobi_params=(alpha, beta)),
            lam=float(n * (n + alpha + beta + 1.0)),
        )
    if family in (TRIG_SIN, TRIG_COS):
        return SLProblem(
            p=lambda t: np.ones_like(np.asarray(t, dtype=float)),
            dp=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            w=lambda t: np.ones_like(np.asarray(t, dtype=float)),
            lam=float(n * n) * math.pi**2,
        )
    raise ValueError(f"unknown family {family!r}")


def sl_residual(problem: SLProblem, y, t: float) -> float:
    """Residual of the self-adjoint equation at an interior point t.

    Computes (P'(t) y' + P(t) y'') / w(t) + Q(t) y + lambda y; an
    eigenfunction makes this vanish identically.
    """
    lo, hi = problem.interval
    t = float(t)
    if not (lo < t < hi):
        raise DomainError("sl_residual is defined at interior points only")
    val, d1, d2 = value_and_derivatives(y, t)
    p_val = float(problem.p(t))
    if problem.dp is not None:
        dp_val = float(problem.dp(t))
    else:
        h = _FD_STEP
        dp_val = (float(problem.p(t + h)) - float(problem.p(t - h))) / (2.0 * h)
    w_val = float(problem.w(t))
    res = (dp_val * d1 + p_val * d2) / w_val + problem.lam * val
    if problem.q is not None:
        res += float(problem.q(t)) * val
    return res


@dataclass(frozen=True)
class JacobiPairing:
    """Coefficient pair whose extremals are Jacobi-type in both channels.

    ``a1`` is the reciprocal family weight (1-t)^(-alpha) (1+t)^(-beta);
    ``a2`` is (1-t)^(alpha+1) (1+t)^(beta+1).  The first channel's shape is
    k1 = P_n^(alpha, beta).  The second channel shares the eigenvalue
    4 lambda^2 = n (n + alpha + beta + 1) through the exponent-flipped
    parameters (eta, zeta) = (-alpha - 1, -beta - 1) at order
    l = n + alpha + beta + 1; k2 is constructible only when l is a
    nonnegative integer and eta, zeta > -1, and is None otherwise.
    """

    alpha: float
    beta: float
    n: int
    lam: float
    eta: float
    zeta: float
    order2: float
    a1: WeightFn
    a2: WeightFn
    k1: BasisElement
    k2: BasisElement | None


def jacobi_pairing(alpha: float, beta: float, n: int) -> JacobiPairing:
    """Build the weighted-energy pairing for parameters (alpha, beta).

    Requires -1 < alpha, beta <= 0 so that both coefficient functions are
    integrable weights; ``n`` is the order of the first channel's shape.
    """
    alpha = float(alpha)
    beta = float(beta)
    if not (-1.0 < alpha <= 0.0) or not (-1.0 < beta <= 0.0):
        raise DomainError("jacobi pairing requires alpha, beta in (-1, 0]")
    n = int(n)
    if n < 0:
        raise ValueError("n must be a nonnegative integer")
    lam_sq4 = n * (n + alpha + beta + 1.0)
    lam = 0.5 * math.sqrt(max(lam_sq4, 0.0))
    eta = -alpha - 1.0
    zeta = -beta - 1.0
    order2 = n + alpha + beta + 1.0
    a1 = weight_fn(JACOBI, jacobi_params=(-alpha, -beta))
    a2 = weight_fn(JACOBI, jacobi_params=(alpha + 1.0, beta + 1.0))
    k1 = BasisElement(JACOBI, n, jacobi_params=(alpha, beta))
    k2 = None
    l_int = round(order2)
    if abs(order2 - l_int) < 1e-12 and l_int >= 0 and eta > -1.0 and zeta > -1.0:
        k2 = BasisElement(JACOBI, int(l_int), jacobi_params=(eta, zeta))
    return JacobiPairing(
        alpha=alpha,
        beta=beta,
        n=n,
        lam=lam,
        eta=eta,
        zeta=zeta,
        order2=order2,
        a1=a1,
        a2=a2,
        k1=k1,
        k2=k2,
    )


@dataclass(frozen=True)
class PairingReport:
    residual_k1: float
    residual_k2: float | None
    nodes: int


def certify_pair(pairing: JacobiPairing, nodes: int = 50) -> PairingReport:
    """Max self-adjoint residual of each channel shape over interior nodes.

    The first channel is checked against the (alpha, beta) Jacobi problem
    with eigenvalue 4 lambda^2; the second, when constructible, against the
    (eta, zeta) problem at the shared eigenvalue.  Residuals of genuine
    pairs sit at roundoff.
    """
    pts = chebyshev_nodes(nodes)
    prob1 = family_sl_problem(JACOBI, pairing.n, (pairing.alpha, pairing.beta))
    res1 = max(abs(sl_residual(prob1, pairing.k1, t)) for t in pts)
    res2 = None
    if pairing.k2 is not None:
        prob2 = family_sl_problem(
            JACOBI, pairing.k2.index, (pairing.eta, pairing.zeta)
        )
        # Shared eigenvalue: l (l + eta + zeta + 1) equals n (n + alpha + beta + 1).
        res2 = max(abs(sl_residual(prob2, pairing.k2, t)) for t in pts)
    return PairingReport(residual_k1=res1, residual_k2=res2, nodes=len(pts))

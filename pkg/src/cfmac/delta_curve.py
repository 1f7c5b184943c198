"""Correlation-benefit curve: the best sum-rate gain under an input-dependence budget.

delta(a) maximizes I(X1,X2;Y) over joint input distributions whose input
mutual information I(X1;X2) stays below ``a``.  The solver combines an
analytic perturbation start around each capacity-achieving product
distribution with multi-start SLSQP refinement over the joint simplex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .channel import (
    LN2,
    CapacityResult,
    JointDist,
    Mac,
    ProductDist,
    _stats_nats,
    _unit_scale,
    info_density_tables,
    sum_capacity,
)
from .errors import NonConvergence, NotCapacityAchieving

_FEAS_TOL = 1e-9
_EPS = 1e-300


@dataclass(frozen=True)
class DeltaPoint:
    a: float
    delta: float
    argmax_joint: JointDist
    achieved_mi_budget: float
    units: str = "bits"


@dataclass(frozen=True)
class Perturbation:
    """First-order optimal direction away from a capacity-achieving product law.

    ``r_table`` has zero row and column sums; ``lambda_scale`` is the factor
    1/(2 lambda) fixed by the dependence budget.
    """

    base: ProductDist
    j_table: np.ndarray
    r_table: np.ndarray
    lambda_scale: float
    units: str = "bits"


def perturbation_direction(
    mac: Mac,
    base: ProductDist,
    a: float,
    capacity: CapacityResult | None = None,
    tol: float = 1e-6,
    units: str = "bits",
) -> Perturbation:
    """Budget-scaled optimal perturbation of the joint law around ``base``."""
    if a <= 0:
        raise ValueError("a must be positive")
    if capacity is None:
        capacity = sum_capacity(mac, units=units)
    mutual, _, _, _ = _stats_nats(mac, base)
    scale = _unit_scale(units)
    if mutual * scale < capacity.c_sum - tol:
        raise NotCapacityAchieving(
            f"base achieves {mutual * scale:.6g} {units}/use, "
            f"sum-capacity is {capacity.c_sum:.6g}"
        )
    tables = info_density_tables(mac, base, units=units)
    i_bar = tables.i_bar
    p1, p2 = base.p1, base.p2
    # Centered density: on an exact maximizer the row and column averages both
    # equal the sum-capacity, so this reduces to i_bar - C on the support.
    row_mean = i_bar @ p2
    col_mean = p1 @ i_bar
    total = float(p1 @ i_bar @ p2)
    j = i_bar - row_mean[:, None] - col_mean[None, :] + total
    p12 = base.joint()
    e_j2 = float((p12 * j * j).sum())
    if e_j2 < 1e-18:
        return Perturbation(base, j, np.zeros_like(j), 0.0, units)
    budget = a * (2.0 * LN2 if units == "bits" else 2.0)
    lam_scale = math.sqrt(budget / e_j2)
    r = lam_scale * p12 * j
    return Perturbation(base, j, r, lam_scale, units)


def delta_small_a(v1_star: float, a: float, units: str = "bits") -> float:
    """Small-budget closed form sqrt(2 a V1* ln 2) (ln 2 dropped in nats mode)."""
    if a < 0 or v1_star < 0:
        raise ValueError("a and v1_star must be nonnegative")
    factor = 2.0 * LN2 if units == "bits" else 2.0
    return math.sqrt(a * factor * v1_star)


# ---------------------------------------------------------------------------
# solver internals (all in nats)


def _mi_xy_nats(kernel: np.ndarray, p12: np.ndarray) -> float:
    p_y = np.einsum("ij,ijy->y", p12, kernel)
    logt = np.log(np.maximum(kernel, _EPS)) - np.log(np.maximum(p_y, _EPS))
    return float((p12[:, :, None] * np.where(kernel > 0, kernel * logt, 0.0)).sum())


def _mi_xy_grad_nats(kernel: np.ndarray, p12: np.ndarray) -> np.ndarray:
    p_y = np.einsum("ij,ijy->y", p12, kernel)
    logt = np.log(np.maximum(kernel, _EPS)) - np.log(np.maximum(p_y, _EPS))
    # d/dp of (sum_c p_c D(W_c || pY)): the divergence minus a constant 1.
    return np.where(kernel > 0, kernel * logt, 0.0).sum(axis=2) - 1.0


def _mi_12_nats(p12: np.ndarray) -> float:
    p1 = p12.sum(axis=1)
    p2 = p12.sum(axis=0)
    prod = np.outer(p1, p2)
    ratio = np.log(np.maximum(p12, _EPS)) - np.log(np.maximum(prod, _EPS))
    return float(np.where(p12 > 0, p12 * ratio, 0.0).sum())


def _mi_12_grad_nats(p12: np.ndarray) -> np.ndarray:
    p1 = p12.sum(axis=1)
    p2 = p12.sum(axis=0)
    return (
        np.log(np.maximum(p12, _EPS))
        - np.log(np.maximum(p1, _EPS))[:, None]
        - np.log(np.maximum(p2, _EPS))[None, :]
        - 1.0
    )


def _project_feasible(p12: np.ndarray, a_nats: float) -> np.ndarray:
    """Shrink toward the product of marginals until the budget constraint holds."""
    if _mi_12_nats(p12) <= a_nats + _FEAS_TOL:
        return p12
    prod = np.outer(p12.sum(axis=1), p12.sum(axis=0))
    lo, hi = 0.0, 1.0  # theta=1 is the fully independent (feasible) endpoint
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _mi_12_nats((1 - mid) * p12 + mid * prod) <= a_nats:
            hi = mid
        else:
            lo = mid
    return (1 - hi) * p12 + hi * prod


def _line_search_start(kernel, base: ProductDist, r: np.ndarray, a_nats: float) -> np.ndarray:
    """p* + t r with t capped at both the simplex boundary and the budget."""
    p0 = base.joint()
    if not np.any(r != 0):
        return p0
    neg = r < 0
    t_box = 1.0
    if np.any(neg):
        t_box = float(np.min(p0[neg] / -r[neg]))
    lo, hi = 0.0, t_box
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _mi_12_nats(np.clip(p0 + mid * r, 0.0, None)) <= a_nats:
            lo = mid
        else:
            hi = mid
    p = np.clip(p0 + lo * r, 0.0, None)
    return p / p.sum()


def _refine(kernel, p_start: np.ndarray, a_nats: float):
    shape = p_start.shape
    m = p_start.size

    def neg_obj(x):
        return -_mi_xy_nats(kernel, x.reshape(shape))

    def neg_obj_grad(x):
        return -_mi_xy_grad_nats(kernel, x.reshape(shape)).ravel()

    cons = [
        {"type": "eq", "fun": lambda x: x.sum() - 1.0, "jac": lambda x: np.ones(m)},
        {
            "type": "ineq",
            "fun": lambda x: a_nats - _mi_12_nats(x.reshape(shape)),
            "jac": lambda x: -_mi_12_grad_nats(x.reshape(shape)).ravel(),
        },
    ]
    res = minimize(
        neg_obj,
        p_start.ravel(),
        jac=neg_obj_grad,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * m,
        constraints=cons,
        options={"ftol": 1e-14, "maxiter": 400},
    )
    p = np.clip(res.x.reshape(shape), 0.0, None)
    total = p.sum()
    if total <= 0:
        return None
    return _project_feasible(p / total, a_nats)


def _joint_ba_unconstrained(kernel: np.ndarray, iters: int = 400) -> np.ndarray:
    """Blahut-Arimoto over the composite input alphabet X1 x X2 (no budget)."""
    n1, n2, ny = kernel.shape
    w = kernel.reshape(n1 * n2, ny)
    p = np.full(n1 * n2, 1.0 / (n1 * n2))
    for _ in range(iters):
        p_y = p @ w
        logt = np.log(np.maximum(w, _EPS)) - np.log(np.maximum(p_y, _EPS))[None, :]
        d = np.where(w > 0, w * logt, 0.0).sum(axis=1)
        new_p = p * np.exp(d - d.max())
        new_p /= new_p.sum()
        if np.abs(new_p - p).sum() < 1e-14:
            p = new_p
            break
        p = new_p
    return p.reshape(n1, n2)


def delta(
    mac: Mac,
    a: float,
    tol: float = 1e-6,
    units: str = "bits",
    capacity: CapacityResult | None = None,
) -> DeltaPoint:
    """Constrained maximum sum-rate gain at dependence budget ``a``."""
    if a < 0:
        raise ValueError("a must be nonnegative")
    if capacity is None:
        capacity = sum_capacity(mac, units=units)
    scale = _unit_scale(units)
    a_nats = a * (LN2 if units == "bits" else 1.0)
    kernel = mac.kernel
    c_sum_nats = capacity.c_sum / scale

    starts: list[np.ndarray] = []
    for base in capacity.argmax_dists:
        starts.append(base.joint())
        if a > 0:
            pert = perturbation_direction(mac, base, a, capacity=capacity, units=units)
            if np.any(pert.r_table != 0):
                starts.append(_line_search_start(kernel, base, pert.r_table, a_nats))
    starts.append(np.full((mac.x1_size, mac.x2_size), 1.0 / (mac.x1_size * mac.x2_size)))
    starts.append(_project_feasible(_joint_ba_unconstrained(kernel), a_nats))

    best_val = -np.inf
    best_p: np.ndarray | None = None
    for p0 in starts:
        candidates = [p0] if a == 0 else [p0, _refine(kernel, p0, a_nats)]
        for p in candidates:
            if p is None:
                continue
            if _mi_12_nats(p) > a_nats + _FEAS_TOL:
                continue
            val = _mi_xy_nats(kernel, p)
            if val > best_val:
                best_val, best_p = val, p
    if best_p is None:
        raise NonConvergence("no feasible candidate found")

    return DeltaPoint(
        a=a,
        delta=(best_val - c_sum_nats) * scale,
        argmax_joint=JointDist(best_p),
        achieved_mi_budget=_mi_12_nats(best_p) * scale,
        units=units,
    )

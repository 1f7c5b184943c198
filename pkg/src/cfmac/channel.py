"""Discrete memoryless MAC model, information densities, and the sum-capacity solver.

All internal computation is in nats; public containers carry a units flag
(default bits) and conversion happens once at the boundary.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import rel_entr, xlogy

from .errors import (
    NegativeEntry,
    NonConvergence,
    RowNotStochastic,
    SizeMismatch,
    UnreachableDensity,
)

LN2 = float(np.log(2.0))

_ROW_TOL = 1e-9


def _unit_scale(units: str) -> float:
    """Multiplier converting nats to the requested units."""
    if units == "bits":
        return 1.0 / LN2
    if units == "nats":
        return 1.0
    raise ValueError(f"unknown units {units!r}")


@dataclass(frozen=True)
class Mac:
    """Finite-alphabet MAC with transition kernel indexed [x1][x2][y]."""

    kernel: np.ndarray

    def __post_init__(self):
        kernel = np.asarray(self.kernel, dtype=float)
        if kernel.ndim != 3:
            raise SizeMismatch(f"kernel must be 3-dimensional, got shape {kernel.shape}")
        if kernel.size == 0:
            raise SizeMismatch("alphabet sizes must be at least 1")
        if np.any(kernel < 0):
            raise NegativeEntry("kernel has negative entries")
        rows = kernel.sum(axis=2)
        bad = np.abs(rows - 1.0) > _ROW_TOL
        if np.any(bad):
            x1, x2 = np.argwhere(bad)[0]
            raise RowNotStochastic(
                f"kernel row (x1={x1}, x2={x2}) sums to {rows[x1, x2]:.12g}"
            )
        kernel.setflags(write=False)
        object.__setattr__(self, "kernel", kernel)

    @property
    def x1_size(self) -> int:
        return self.kernel.shape[0]

    @property
    def x2_size(self) -> int:
        return self.kernel.shape[1]

    @property
    def y_size(self) -> int:
        return self.kernel.shape[2]


def _check_prob_vector(p: np.ndarray, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise NegativeEntry(f"{name} has negative entries")
    if abs(p.sum() - 1.0) > _ROW_TOL:
        raise RowNotStochastic(f"{name} sums to {p.sum():.12g}")
    p.setflags(write=False)
    return p


@dataclass(frozen=True)
class ProductDist:
    """Independent input distribution p1(x1) * p2(x2)."""

    p1: np.ndarray
    p2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p1", _check_prob_vector(self.p1, "p1"))
        object.__setattr__(self, "p2", _check_prob_vector(self.p2, "p2"))

    def joint(self) -> np.ndarray:
        return np.outer(self.p1, self.p2)


@dataclass(frozen=True)
class JointDist:
    """Joint input distribution p12(x1, x2)."""

    p12: np.ndarray

    def __post_init__(self):
        p12 = np.asarray(self.p12, dtype=float)
        if p12.ndim != 2:
            raise SizeMismatch(f"p12 must be a matrix, got shape {p12.shape}")
        if np.any(p12 < 0):
            raise NegativeEntry("p12 has negative entries")
        if abs(p12.sum() - 1.0) > _ROW_TOL:
            raise RowNotStochastic(f"p12 sums to {p12.sum():.12g}")
        p12.setflags(write=False)
        object.__setattr__(self, "p12", p12)

    def joint(self) -> np.ndarray:
        return self.p12

    @property
    def p1(self) -> np.ndarray:
        return self.p12.sum(axis=1)

    @property
    def p2(self) -> np.ndarray:
        return self.p12.sum(axis=0)


InputDist = ProductDist | JointDist


@dataclass(frozen=True)
class InfoDensityTable:
    """Tabulated information densities for a fixed MAC and input distribution.

    ``i_joint[x1, x2, y]`` compares the kernel to the output marginal,
    ``i_1``/``i_2`` condition on the other user's symbol, and ``i_bar[x1, x2]``
    is the per-pair expected density (a divergence).  Entries at kernel zeros
    are -inf; entries flagged in ``undefined`` have zero probability under the
    design distribution and must never be evaluated.
    """

    i_joint: np.ndarray
    i_1: np.ndarray
    i_2: np.ndarray
    i_bar: np.ndarray
    p_y: np.ndarray
    undefined: np.ndarray
    units: str = "bits"


@dataclass(frozen=True)
class ChannelStats:
    mutual_info: float
    v1: float
    v2: float
    v_max: float
    units: str = "bits"


@dataclass(frozen=True)
class CapacityResult:
    c_sum: float
    argmax_dists: list[ProductDist]
    v1_star: float
    iterations: int
    kkt_residual: float
    units: str = "bits"


# ---------------------------------------------------------------------------
# channel construction


def load_channel(spec: dict) -> Mac:
    """Build and validate a Mac from a parsed channel description record."""
    try:
        x1_size = int(spec["x1_size"])
        x2_size = int(spec["x2_size"])
        y_size = int(spec["y_size"])
        kernel = np.asarray(spec["kernel"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SizeMismatch(f"malformed channel spec: {exc}") from exc
    if min(x1_size, x2_size, y_size) < 1:
        raise SizeMismatch("alphabet sizes must be at least 1")
    if kernel.shape != (x1_size, x2_size, y_size):
        raise SizeMismatch(
            f"kernel shape {kernel.shape} does not match declared sizes "
            f"({x1_size}, {x2_size}, {y_size})"
        )
    return Mac(kernel)


def adder2() -> Mac:
    """Noiseless binary adder: Y = X1 + X2 over {0, 1, 2}."""
    kernel = np.zeros((2, 2, 3))
    for x1 in range(2):
        for x2 in range(2):
            kernel[x1, x2, x1 + x2] = 1.0
    return Mac(kernel)


def xor_channel(p: float) -> Mac:
    """Binary XOR with flip probability p: Y = X1 ^ X2 ^ N, N ~ Bern(p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability must lie in [0, 1], got {p}")
    kernel = np.zeros((2, 2, 2))
    for x1 in range(2):
        for x2 in range(2):
            y = x1 ^ x2
            kernel[x1, x2, y] = 1.0 - p
            kernel[x1, x2, 1 - y] = p
    return Mac(kernel)


def named_channel(name: str) -> Mac:
    """Resolve the built-in channel names 'adder2' and 'xor:<p>'."""
    if name == "adder2":
        return adder2()
    if name.startswith("xor:"):
        return xor_channel(float(name.split(":", 1)[1]))
    raise ValueError(f"unknown built-in channel {name!r}")


def uniform_product(mac: Mac) -> ProductDist:
    return ProductDist(
        np.full(mac.x1_size, 1.0 / mac.x1_size),
        np.full(mac.x2_size, 1.0 / mac.x2_size),
    )


# ---------------------------------------------------------------------------
# densities and statistics


def output_marginal(mac: Mac, d: InputDist) -> np.ndarray:
    """Output distribution p_Y induced by the input distribution."""
    p12 = d.joint()
    if p12.shape != (mac.x1_size, mac.x2_size):
        raise SizeMismatch(
            f"input distribution shape {p12.shape} does not match alphabets "
            f"({mac.x1_size}, {mac.x2_size})"
        )
    return np.einsum("ij,ijy->y", p12, mac.kernel)


def info_density_tables(mac: Mac, d: InputDist, units: str = "bits") -> InfoDensityTable:
    """All three information-density tables plus per-pair expected density."""
    w = mac.kernel
    p12 = d.joint()
    if p12.shape != w.shape[:2]:
        raise SizeMismatch(
            f"input distribution shape {p12.shape} does not match alphabets {w.shape[:2]}"
        )
    p_y = np.einsum("ij,ijy->y", p12, w)
    p1 = p12.sum(axis=1)
    p2 = p12.sum(axis=0)

    reachable_pair = p12 > 0
    if np.any(reachable_pair[:, :, None] & (w > 0) & (p_y <= 0.0)[None, None, :]):
        raise UnreachableDensity("positive-probability output has zero marginal")

    # Conditional output marginals p_{Y|X1}, p_{Y|X2} under the joint input law.
    with np.errstate(divide="ignore", invalid="ignore"):
        cond_2_given_1 = np.where(p1[:, None] > 0, p12 / np.where(p1[:, None] > 0, p1[:, None], 1.0), 0.0)
        cond_1_given_2 = np.where(p2[None, :] > 0, p12 / np.where(p2[None, :] > 0, p2[None, :], 1.0), 0.0)
    p_y_given_x1 = np.einsum("ij,ijy->iy", cond_2_given_1, w)
    p_y_given_x2 = np.einsum("ij,ijy->jy", cond_1_given_2, w)

    with np.errstate(divide="ignore", invalid="ignore"):
        log_w = np.where(w > 0, np.log(np.where(w > 0, w, 1.0)), -np.inf)
        log_py = np.where(p_y > 0, np.log(np.where(p_y > 0, p_y, 1.0)), -np.inf)
        log_py1 = np.where(p_y_given_x1 > 0, np.log(np.where(p_y_given_x1 > 0, p_y_given_x1, 1.0)), -np.inf)
        log_py2 = np.where(p_y_given_x2 > 0, np.log(np.where(p_y_given_x2 > 0, p_y_given_x2, 1.0)), -np.inf)

    with np.errstate(invalid="ignore"):
        i_joint = log_w - log_py[None, None, :]
        i_1 = log_w - log_py2[None, :, :]
        i_2 = log_w - log_py1[:, None, :]

    # Undefined-but-unreachable: kernel zero meeting a zero reference marginal.
    undefined = (w == 0) & (
        (p_y == 0)[None, None, :]
        | (p_y_given_x1 == 0)[:, None, :]
        | (p_y_given_x2 == 0)[None, :, :]
    )
    # 0 * log 0 = 0 convention: only kernel-positive entries enter expectations.
    i_joint = np.where((w == 0) & undefined, 0.0, i_joint)
    i_1 = np.where((w == 0) & undefined, 0.0, i_1)
    i_2 = np.where((w == 0) & undefined, 0.0, i_2)

    i_bar = np.where(w > 0, w * np.where(np.isfinite(i_joint), i_joint, 0.0), 0.0).sum(axis=2)

    scale = _unit_scale(units)
    return InfoDensityTable(
        i_joint=i_joint * scale,
        i_1=i_1 * scale,
        i_2=i_2 * scale,
        i_bar=i_bar * scale,
        p_y=p_y,
        undefined=undefined,
        units=units,
    )


def _stats_nats(mac: Mac, d: InputDist) -> tuple[float, float, float, float]:
    """(mutual_info, v1, v2, v_max) in nats for a product or joint input."""
    tables = info_density_tables(mac, d, units="nats")
    p12 = d.joint()
    w = mac.kernel
    i_bar = tables.i_bar
    mutual = float((p12 * i_bar).sum())
    v1 = float((p12 * (i_bar - mutual) ** 2).sum())
    finite_i = np.where(np.isfinite(tables.i_joint), tables.i_joint, 0.0)
    per_pair_var = np.where(w > 0, w * (finite_i - i_bar[:, :, None]) ** 2, 0.0).sum(axis=2)
    v2 = float((p12 * per_pair_var).sum())
    support = p12 > 0
    v_max = float(per_pair_var[support].max()) if support.any() else 0.0
    # Snap solver-noise-level variances to an exact zero so degenerate
    # channels (constant i_bar, deterministic kernels) behave exactly.
    if v1 < 1e-13:
        v1 = 0.0
    if v2 < 1e-13:
        v2 = 0.0
    return mutual, v1, v2, v_max


def channel_stats(mac: Mac, d: InputDist, units: str = "bits") -> ChannelStats:
    """Mutual information and the two dispersion components under ``d``."""
    mutual, v1, v2, v_max = _stats_nats(mac, d)
    s = _unit_scale(units)
    return ChannelStats(
        mutual_info=mutual * s,
        v1=v1 * s * s,
        v2=v2 * s * s,
        v_max=v_max * s * s,
        units=units,
    )


def mutual_information(mac: Mac, d: InputDist, units: str = "bits") -> float:
    return channel_stats(mac, d, units=units).mutual_info


# ---------------------------------------------------------------------------
# sum-capacity over product distributions


def _mi_nats(kernel: np.ndarray, p1: np.ndarray, p2: np.ndarray) -> float:
    p12 = np.outer(p1, p2)
    p_y = np.einsum("ij,ijy->y", p12, kernel)
    h_y = -float(xlogy(p_y, p_y).sum())
    h_y_given_x = -float((p12[:, :, None] * xlogy(kernel, kernel)).sum())
    return h_y - h_y_given_x


def _dbar_nats(kernel: np.ndarray, p1: np.ndarray, p2: np.ndarray):
    """Per-letter divergences D(W_{x1,x2} || p_Y) and their p2/p1 averages."""
    p12 = np.outer(p1, p2)
    p_y = np.einsum("ij,ijy->y", p12, kernel)
    div = rel_entr(kernel, np.broadcast_to(p_y, kernel.shape)).sum(axis=2)
    return div, div @ p2, p1 @ div


def _ba_ascend(kernel, p1, p2, max_iter, tol):
    """Alternating multiplicative ascent on the product-input objective."""
    value = _mi_nats(kernel, p1, p2)
    it = 0
    for it in range(1, max_iter + 1):
        _, dbar1, _ = _dbar_nats(kernel, p1, p2)
        g = np.exp(dbar1 - dbar1.max())
        new_p1 = p1 * g
        total = new_p1.sum()
        if total > 0:
            p1 = new_p1 / total
        _, _, dbar2 = _dbar_nats(kernel, p1, p2)
        g = np.exp(dbar2 - dbar2.max())
        new_p2 = p2 * g
        total = new_p2.sum()
        if total > 0:
            p2 = new_p2 / total
        new_value = _mi_nats(kernel, p1, p2)
        if new_value - value < tol:
            value = max(value, new_value)
            break
        value = new_value
    return p1, p2, value, it


def _polish(kernel, p1, p2):
    """Joint local refinement of (p1, p2) with SLSQP."""
    n1 = len(p1)
    n2 = len(p2)

    def split(x):
        return x[:n1], x[n1:]

    def neg_mi(x):
        a, b = split(x)
        return -_mi_nats(kernel, np.abs(a), np.abs(b))

    cons = [
        {"type": "eq", "fun": lambda x: x[:n1].sum() - 1.0},
        {"type": "eq", "fun": lambda x: x[n1:].sum() - 1.0},
    ]
    res = minimize(
        neg_mi,
        np.concatenate([p1, p2]),
        method="SLSQP",
        bounds=[(0.0, 1.0)] * (n1 + n2),
        constraints=cons,
        options={"ftol": 1e-14, "maxiter": 500},
    )
    a, b = split(res.x)
    a = np.clip(a, 0.0, None)
    b = np.clip(b, 0.0, None)
    a /= a.sum()
    b /= b.sum()
    value = _mi_nats(kernel, a, b)
    return a, b, value


def _seed_grid(mac: Mac) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic multi-start seeds: uniform, vertex-leaning, and a skew mix."""
    n1, n2 = mac.x1_size, mac.x2_size
    u1 = np.full(n1, 1.0 / n1)
    u2 = np.full(n2, 1.0 / n2)
    seeds = [(u1, u2)]
    for a, b in itertools.product(range(n1), range(n2)):
        p1 = np.full(n1, 0.1 / n1)
        p1[a] += 0.9
        p2 = np.full(n2, 0.1 / n2)
        p2[b] += 0.9
        seeds.append((p1, p2))
    skew1 = np.arange(1, n1 + 1, dtype=float)
    skew2 = np.arange(n2, 0, -1, dtype=float)
    seeds.append((skew1 / skew1.sum(), skew2 / skew2.sum()))
    return seeds


def sum_capacity(
    mac: Mac,
    tol: float = 1e-7,
    units: str = "bits",
    max_iter: int = 5000,
) -> CapacityResult:
    """Maximize I(X1, X2; Y) over product input distributions.

    Alternating multiplicative updates from a deterministic seed grid, each
    polished with a local constrained optimizer; near-maximizers are kept
    (deduplicated at L1 distance 1e-6) and the codeword dispersion is
    maximized over them.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    kernel = mac.kernel
    tol_nats = tol * (LN2 if units == "bits" else 1.0)

    candidates = []
    total_iters = 0
    for p1, p2 in _seed_grid(mac):
        p1, p2, _, it = _ba_ascend(kernel, p1, p2, max_iter, min(tol_nats, 1e-12))
        total_iters += it
        p1, p2, value = _polish(kernel, p1, p2)
        candidates.append((value, p1, p2))
    if not candidates:
        raise NonConvergence("no solver starts produced a result")

    best = max(c[0] for c in candidates)

    # Keep every start that landed within tolerance of the best value.
    keepers: list[tuple[np.ndarray, np.ndarray]] = []
    for value, p1, p2 in sorted(candidates, key=lambda c: (-c[0], tuple(c[1]), tuple(c[2]))):
        if value < best - tol_nats:
            continue
        dup = any(
            np.abs(p1 - q1).sum() + np.abs(p2 - q2).sum() < 1e-6 for q1, q2 in keepers
        )
        if not dup:
            keepers.append((p1, p2))

    scale = _unit_scale(units)
    dists = [ProductDist(p1, p2) for p1, p2 in keepers]
    v1_star = 0.0
    for d in dists:
        _, v1, _, _ = _stats_nats(mac, d)
        v1_star = max(v1_star, v1)

    # KKT residual at the top maximizer: E[i_bar(x1, X2)] <= C with equality
    # on the support, and symmetrically for x2.
    p1, p2 = keepers[0]
    _, dbar1, dbar2 = _dbar_nats(kernel, p1, p2)
    resid = max(
        float(np.max(dbar1 - best)),
        float(np.max(dbar2 - best)),
        float(np.max(np.abs(dbar1[p1 > 1e-9] - best))) if np.any(p1 > 1e-9) else 0.0,
        float(np.max(np.abs(dbar2[p2 > 1e-9] - best))) if np.any(p2 > 1e-9) else 0.0,
    )
    return CapacityResult(
        c_sum=best * scale,
        argmax_dists=dists,
        v1_star=v1_star * scale * scale,
        iterations=total_iters,
        kkt_residual=resid * scale,
        units=units,
    )

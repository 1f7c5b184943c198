"""Monte Carlo simulation of the facilitated random-coding constructions.

Two constructions are supported: i.i.d. codebooks with a score-argmax
facilitator and threshold decoder, and constant-composition (type-class)
codebooks with a type-matching facilitator and a type-constrained decoder.
``estimate_error`` estimates the ensemble-average error probability (fresh
codebooks every trial); ``fbl_bound`` evaluates the constant-free
finite-blocklength upper bound the constructions are validated against.

Randomness is organized in counter-keyed streams: trials are processed in
fixed-size blocks, each block drawing from its own Philox stream derived
from (seed, block index).  Results are bit-for-bit reproducible for a given
(config, seed) and independent of scheduling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import beta as _beta

from .channel import (
    InputDist,
    JointDist,
    Mac,
    ProductDist,
    info_density_tables,
    named_channel,
)
from .errors import DegenerateThresholds, ModeMismatch, NotAnNType

_BLOCK = 1024  # trials per RNG block; fixed so streams are reproducible

IID = "iid"
TYPE = "type"


@dataclass(frozen=True)
class DecoderThresholds:
    c12: float
    c1: float
    c2: float
    type_constraint: np.ndarray | None = None
    units: str = "bits"

    def require_finite(self):
        if not all(map(math.isfinite, (self.c12, self.c1, self.c2))):
            raise DegenerateThresholds(
                f"thresholds must be finite, got ({self.c12}, {self.c1}, {self.c2})"
            )


@dataclass(frozen=True)
class Codebooks:
    f1: np.ndarray  # [m1][k][i] symbol indices
    f2: np.ndarray
    mode: str
    seed: int

    @property
    def n(self) -> int:
        return self.f1.shape[2]


@dataclass(frozen=True)
class FacilitatorTable:
    e: np.ndarray  # [m1][m2] zero-based index into [K]
    mode: str
    unmatched: np.ndarray | None = None  # type mode: no k matched the target


@dataclass(frozen=True)
class SimConfig:
    mac: Mac
    dist: InputDist
    n: int
    m1_count: int
    m2_count: int
    k: int
    mode: str = IID
    thresholds: DecoderThresholds | None = None
    trials: int = 10_000
    seed: int = 0
    units: str = "bits"

    def resolved_thresholds(self) -> DecoderThresholds:
        if self.thresholds is not None:
            return self.thresholds
        return default_thresholds(
            self.mac, self.dist, self.n, self.m1_count, self.m2_count, self.k,
            self.mode, self.units,
        )


@dataclass(frozen=True)
class SimReport:
    trials: int
    errors: int
    p_hat: float
    ci95: tuple[float, float]
    decomposition: dict
    seed: int
    fbl_bound: float | None = None

    def to_dict(self) -> dict:
        out = {
            "trials": self.trials,
            "errors": self.errors,
            "p_hat": self.p_hat,
            "ci95": list(self.ci95),
            "decomposition": dict(self.decomposition),
            "seed": self.seed,
        }
        if self.fbl_bound is not None:
            out["fbl_bound"] = self.fbl_bound
        return out


# ---------------------------------------------------------------------------
# defaults and small helpers


def _logb(x: float, units: str) -> float:
    return math.log2(x) if units == "bits" else math.log(x)


def default_thresholds(
    mac: Mac,
    dist: InputDist,
    n: int,
    m1_count: int,
    m2_count: int,
    k: int,
    mode: str = IID,
    units: str = "bits",
) -> DecoderThresholds:
    """Threshold choices from the two constructions' explicit settings."""
    half_log_n = 0.5 * _logb(n, units)
    if mode == IID:
        return DecoderThresholds(
            c12=_logb(m1_count * m2_count * k, units) + half_log_n,
            c1=_logb(m1_count, units) + half_log_n,
            c2=_logb(m2_count, units) + half_log_n,
            units=units,
        )
    if mode == TYPE:
        counting = mac.x1_size * mac.x2_size * _logb(n + 1, units)
        return DecoderThresholds(
            c12=_logb(m1_count * m2_count, units) + half_log_n + counting,
            c1=_logb(m1_count, units) + half_log_n + counting,
            c2=_logb(m2_count, units) + half_log_n + counting,
            type_constraint=np.asarray(dist.joint()),
            units=units,
        )
    raise ModeMismatch(f"unknown mode {mode!r}")


def _type_counts(dist: JointDist, n: int) -> np.ndarray:
    counts = np.asarray(dist.p12) * n
    rounded = np.rint(counts)
    if np.max(np.abs(counts - rounded)) > 1e-9:
        raise NotAnNType(f"joint distribution is not an n-type for n={n}")
    return rounded.astype(np.int64)


def _marginal_base_word(counts: np.ndarray) -> np.ndarray:
    return np.repeat(np.arange(len(counts)), counts)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) + int(block)))


def _clopper_pearson(errors: int, trials: int, conf: float = 0.95) -> tuple[float, float]:
    alpha = 1.0 - conf
    low = 0.0 if errors == 0 else float(_beta.ppf(alpha / 2, errors, trials - errors + 1))
    high = 1.0 if errors == trials else float(_beta.ppf(1 - alpha / 2, errors + 1, trials - errors))
    return low, high


# ---------------------------------------------------------------------------
# batched primitives (leading batch axis)


def _draw_words_iid(rng, cdf, batch, msgs, k, n):
    u = rng.random((batch, msgs, k, n))
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def _draw_words_type(rng, base_word, batch, msgs, k, n):
    keys = rng.random((batch, msgs, k, n))
    order = np.argsort(keys, axis=-1, kind="stable")
    return base_word[order]


def _pair_scores(i_bar, f1, f2):
    # f1: (B, m1, k, n), f2: (B, m2, k, n) -> scores (B, m1, m2, k)
    x1 = f1[:, :, None, :, :]
    x2 = f2[:, None, :, :, :]
    return i_bar[x1, x2].sum(axis=-1)


def _joint_type_counts(f1, f2, nx1, nx2):
    # counts of joint symbols per (B, m1, m2, k) slot
    b, m1, k, n = f1.shape
    m2 = f2.shape[1]
    cells = nx1 * nx2
    idx = f1[:, :, None, :, :] * nx2 + f2[:, None, :, :, :]
    slot = np.arange(b * m1 * m2 * k).reshape(b, m1, m2, k)
    flat = (idx + slot[..., None] * cells).ravel()
    counts = np.bincount(flat, minlength=b * m1 * m2 * k * cells)
    return counts.reshape(b, m1, m2, k, cells)


def _facilitate_score_batch(i_bar, f1, f2):
    scores = _pair_scores(i_bar, f1, f2)
    return scores.argmax(axis=-1)


def _facilitate_type_batch(f1, f2, target_counts, nx1, nx2, u_choice):
    counts = _joint_type_counts(f1, f2, nx1, nx2)
    matched = (counts == target_counts.ravel()).all(axis=-1)  # (B, m1, m2, k)
    n_match = matched.sum(axis=-1)
    k = f1.shape[2]
    # uniform pick among matched k; uniform over [K] when none matched
    pick = np.floor(u_choice * np.where(n_match > 0, n_match, k)).astype(np.int64)
    pick = np.minimum(pick, np.where(n_match > 0, n_match, k) - 1)
    order = np.argsort(~matched, axis=-1, kind="stable")  # matched ks first
    e = np.take_along_axis(order, pick[..., None], axis=-1)[..., 0]
    return e, matched, n_match == 0


def _selected_words(f1, f2, e):
    b, m1, k, n = f1.shape
    m2 = f2.shape[1]
    bb = np.arange(b)[:, None, None]
    x1 = f1[bb, np.arange(m1)[None, :, None], e]
    x2 = f2[bb, np.arange(m2)[None, None, :], e]
    return x1, x2  # each (B, m1, m2, n)


def _decode_metrics(d12, d1, d2, x1, x2, y):
    yy = y[:, None, None, :]
    return (
        d12[x1, x2, yy].sum(axis=-1),
        d1[x1, x2, yy].sum(axis=-1),
        d2[x1, x2, yy].sum(axis=-1),
    )


def _decode_tables(mac: Mac, dist: InputDist, units: str):
    """Density tables for decoding: kernel zeros are -inf (zero likelihood)."""
    t = info_density_tables(mac, dist, units=units)
    w = mac.kernel
    neg = np.where(w > 0, 0.0, -np.inf)
    return t.i_joint + neg, t.i_1 + neg, t.i_2 + neg, t.i_bar


# ---------------------------------------------------------------------------
# public single-shot operations


def draw_codebooks(
    mac: Mac,
    dist: InputDist,
    n: int,
    m1_count: int,
    m2_count: int,
    k: int,
    mode: str = IID,
    seed: int = 0,
) -> Codebooks:
    """One reproducible codebook draw (i.i.d. symbols or type-class words)."""
    rng = _block_rng(seed, 0)
    if mode == IID:
        cdf1 = np.cumsum(np.asarray(dist.p1))
        cdf2 = np.cumsum(np.asarray(dist.p2))
        f1 = _draw_words_iid(rng, cdf1, 1, m1_count, k, n)[0]
        f2 = _draw_words_iid(rng, cdf2, 1, m2_count, k, n)[0]
    elif mode == TYPE:
        if not isinstance(dist, JointDist):
            raise ModeMismatch("type mode requires a JointDist n-type")
        counts = _type_counts(dist, n)
        base1 = _marginal_base_word(counts.sum(axis=1))
        base2 = _marginal_base_word(counts.sum(axis=0))
        f1 = _draw_words_type(rng, base1, 1, m1_count, k, n)[0]
        f2 = _draw_words_type(rng, base2, 1, m2_count, k, n)[0]
    else:
        raise ModeMismatch(f"unknown mode {mode!r}")
    return Codebooks(f1=f1, f2=f2, mode=mode, seed=seed)


def facilitate(
    codebooks: Codebooks,
    mac: Mac,
    dist: InputDist,
    mode: str = IID,
    seed: int = 0,
) -> FacilitatorTable:
    """Choose e(m1, m2) in [K] for every message pair."""
    if mode != codebooks.mode:
        raise ModeMismatch(
            f"facilitator mode {mode!r} does not match codebook mode {codebooks.mode!r}"
        )
    f1 = codebooks.f1[None]
    f2 = codebooks.f2[None]
    if mode == IID:
        i_bar = info_density_tables(mac, dist, units="nats").i_bar
        e = _facilitate_score_batch(i_bar, f1, f2)[0]
        return FacilitatorTable(e=e, mode=mode)
    counts = _type_counts(dist, codebooks.n)
    rng = _block_rng(seed, 1)
    u = rng.random((1,) + e_shape(codebooks))
    e, _, unmatched = _facilitate_type_batch(
        f1, f2, counts, mac.x1_size, mac.x2_size, u
    )
    return FacilitatorTable(e=e[0], mode=mode, unmatched=unmatched[0])


def e_shape(codebooks: Codebooks) -> tuple[int, int]:
    return codebooks.f1.shape[0], codebooks.f2.shape[0]


def threshold_decode(
    y_word: np.ndarray,
    codebooks: Codebooks,
    e_table: FacilitatorTable,
    thresholds: DecoderThresholds,
    mac: Mac,
    dist: InputDist,
):
    """Decode one received word; returns ((m1, m2), 'decoded') or (None, reason)."""
    d12, d1, d2, _ = _decode_tables(mac, dist, thresholds.units)
    x1, x2 = _selected_words(codebooks.f1[None], codebooks.f2[None], e_table.e[None])
    y = np.asarray(y_word, dtype=np.int64)[None]
    m12, m1d, m2d = _decode_metrics(d12, d1, d2, x1, x2, y)
    passes = (m12[0] >= thresholds.c12) & (m1d[0] >= thresholds.c1) & (m2d[0] >= thresholds.c2)
    if thresholds.type_constraint is not None:
        counts = _type_counts(JointDist(thresholds.type_constraint), codebooks.n)
        joint = _joint_type_counts(
            codebooks.f1[None], codebooks.f2[None], mac.x1_size, mac.x2_size
        )[0]
        matched_k = (joint == counts.ravel()).all(axis=-1)  # (m1, m2, k)
        sel = np.take_along_axis(matched_k, e_table.e[..., None], axis=-1)[..., 0]
        passes &= sel
    hits = np.argwhere(passes)
    if len(hits) == 1:
        return (int(hits[0][0]), int(hits[0][1])), "decoded"
    return None, ("none-pass" if len(hits) == 0 else "multiple-pass")


# ---------------------------------------------------------------------------
# ensemble simulation


def estimate_error(config: SimConfig) -> SimReport:
    """Ensemble-average error probability with fresh codebooks every trial."""
    if config.trials < 1:
        raise ValueError("trials must be at least 1")
    mac, dist = config.mac, config.dist
    thresholds = config.resolved_thresholds()
    n, m1c, m2c, k = config.n, config.m1_count, config.m2_count, config.k
    d12, d1, d2, i_bar_nats = _decode_tables(mac, dist, thresholds.units)
    i_bar_score = info_density_tables(mac, dist, units="nats").i_bar
    kernel_cdf = np.cumsum(mac.kernel, axis=-1)

    type_mode = config.mode == TYPE
    if type_mode:
        if not isinstance(dist, JointDist):
            raise ModeMismatch("type mode requires a JointDist n-type")
        counts = _type_counts(dist, n)
        base1 = _marginal_base_word(counts.sum(axis=1))
        base2 = _marginal_base_word(counts.sum(axis=0))
    elif config.mode == IID:
        cdf1 = np.cumsum(np.asarray(dist.p1))
        cdf2 = np.cumsum(np.asarray(dist.p2))
    else:
        raise ModeMismatch(f"unknown mode {config.mode!r}")

    check_type = thresholds.type_constraint is not None
    if check_type:
        target_counts = _type_counts(JointDist(thresholds.type_constraint), n)

    errors = 0
    tally = {"threshold_miss": 0, "impostor_pass": 0, "ambiguity": 0, "type_miss": 0}
    done = 0
    block = 0
    while done < config.trials:
        b = min(_BLOCK, config.trials - done)
        rng = _block_rng(config.seed, block)
        if type_mode:
            f1 = _draw_words_type(rng, base1, b, m1c, k, n)
            f2 = _draw_words_type(rng, base2, b, m2c, k, n)
            u_choice = rng.random((b, m1c, m2c))
            e, matched, _ = _facilitate_type_batch(
                f1, f2, counts, mac.x1_size, mac.x2_size, u_choice
            )
        else:
            f1 = _draw_words_iid(rng, cdf1, b, m1c, k, n)
            f2 = _draw_words_iid(rng, cdf2, b, m2c, k, n)
            e = _facilitate_score_batch(i_bar_score, f1, f2)

        msg1 = rng.integers(0, m1c, size=b)
        msg2 = rng.integers(0, m2c, size=b)
        x1, x2 = _selected_words(f1, f2, e)
        bb = np.arange(b)
        tx1 = x1[bb, msg1, msg2]  # (b, n)
        tx2 = x2[bb, msg1, msg2]
        u = rng.random((b, n))
        rows = kernel_cdf[tx1, tx2]  # (b, n, ny)
        y = (u[..., None] < rows).argmax(axis=-1)

        m12, m1d, m2d = _decode_metrics(d12, d1, d2, x1, x2, y)
        passes = (m12 >= thresholds.c12) & (m1d >= thresholds.c1) & (m2d >= thresholds.c2)
        if check_type:
            joint = _joint_type_counts(f1, f2, mac.x1_size, mac.x2_size)
            matched_k = (joint == target_counts.ravel()).all(axis=-1)
            sel = np.take_along_axis(matched_k, e[..., None], axis=-1)[..., 0]
            passes &= sel

        npass = passes.sum(axis=(1, 2))
        true_pass = passes[bb, msg1, msg2]
        correct = (npass == 1) & true_pass
        err = ~correct
        errors += int(err.sum())
        ambiguous = err & (npass >= 2)
        impostor = err & (npass == 1)
        none_pass = err & (npass == 0)
        if check_type:
            true_in_type = np.take_along_axis(
                matched_k[bb, msg1, msg2], e[bb, msg1, msg2, None], axis=-1
            )[..., 0]
            type_miss = none_pass & ~true_in_type
            tally["type_miss"] += int(type_miss.sum())
            none_pass = none_pass & true_in_type
        tally["threshold_miss"] += int(none_pass.sum())
        tally["ambiguity"] += int(ambiguous.sum())
        tally["impostor_pass"] += int(impostor.sum())
        done += b
        block += 1

    p_hat = errors / config.trials
    return SimReport(
        trials=config.trials,
        errors=errors,
        p_hat=p_hat,
        ci95=_clopper_pearson(errors, config.trials),
        decomposition=tally,
        seed=config.seed,
    )


# ---------------------------------------------------------------------------
# finite-blocklength bound


def fbl_bound(
    config: SimConfig,
    thresholds: DecoderThresholds | None = None,
    mc_samples: int = 100_000,
    seed: int | None = None,
) -> float:
    """Upper bound on the ensemble-average error probability.

    The probability that the facilitated pair's density vector misses the
    thresholds is estimated by Monte Carlo (upper endpoint of its 99%
    confidence interval, keeping the bound valid with high confidence); the
    impostor union terms are exact closed forms.
    """
    mac, dist = config.mac, config.dist
    th = thresholds if thresholds is not None else config.resolved_thresholds()
    th.require_finite()
    n, m1c, m2c, k = config.n, config.m1_count, config.m2_count, config.k
    base = 2.0 if th.units == "bits" else math.e
    if seed is None:
        seed = config.seed

    d12, d1, d2, _ = _decode_tables(mac, dist, th.units)
    i_bar_score = info_density_tables(mac, dist, units="nats").i_bar
    kernel_cdf = np.cumsum(mac.kernel, axis=-1)

    type_mode = config.mode == TYPE
    if type_mode:
        counts = _type_counts(dist, n)
        base1 = _marginal_base_word(counts.sum(axis=1))
        base2 = _marginal_base_word(counts.sum(axis=0))
    else:
        cdf1 = np.cumsum(np.asarray(dist.p1))
        cdf2 = np.cumsum(np.asarray(dist.p2))

    fails = 0
    type_misses = 0
    done = 0
    block = 0
    while done < mc_samples:
        b = min(_BLOCK, mc_samples - done)
        rng = _block_rng(seed + 1, block)  # distinct stream family from trials
        if type_mode:
            f1 = _draw_words_type(rng, base1, b, 1, k, n)
            f2 = _draw_words_type(rng, base2, b, 1, k, n)
            u_choice = rng.random((b, 1, 1))
            e, matched, unmatched = _facilitate_type_batch(
                f1, f2, counts, mac.x1_size, mac.x2_size, u_choice
            )
            type_misses += int(unmatched.sum())
        else:
            f1 = _draw_words_iid(rng, cdf1, b, 1, k, n)
            f2 = _draw_words_iid(rng, cdf2, b, 1, k, n)
            e = _facilitate_score_batch(i_bar_score, f1, f2)
        x1, x2 = _selected_words(f1, f2, e)
        tx1 = x1[:, 0, 0]
        tx2 = x2[:, 0, 0]
        u = rng.random((b, n))
        rows = kernel_cdf[tx1, tx2]
        y = (u[..., None] < rows).argmax(axis=-1)
        m12, m1d, m2d = _decode_metrics(d12, d1, d2, x1, x2, y)
        ok = (m12[:, 0, 0] >= th.c12) & (m1d[:, 0, 0] >= th.c1) & (m2d[:, 0, 0] >= th.c2)
        fails += int((~ok).sum())
        done += b
        block += 1

    fail_upper = float(_beta.ppf(0.995, fails + 1, mc_samples - fails)) if fails < mc_samples else 1.0
    if type_mode:
        counting = float((n + 1) ** (mac.x1_size * mac.x2_size))
        union = counting * (
            m1c * m2c * base ** (-th.c12)
            + m1c * base ** (-th.c1)
            + m2c * base ** (-th.c2)
        )
        miss_upper = (
            float(_beta.ppf(0.995, type_misses + 1, mc_samples - type_misses))
            if type_misses < mc_samples
            else 1.0
        )
        return miss_upper + fail_upper + union
    union = (
        m1c * m2c * k * base ** (-th.c12)
        + m1c * base ** (-th.c1)
        + m2c * base ** (-th.c2)
    )
    return fail_upper + union


def estimate_error_fixed_code(
    codebooks: Codebooks,
    e_table: FacilitatorTable,
    config: SimConfig,
) -> SimReport:
    """Error rate of one fixed codebook draw over random messages and noise.

    Exploration aid only: the finite-blocklength bound applies to the
    codebook ensemble average, not to an individual draw, so this report is
    excluded from bound validation.
    """
    if config.trials < 1:
        raise ValueError("trials must be at least 1")
    mac, dist = config.mac, config.dist
    thresholds = config.resolved_thresholds()
    n, m1c, m2c = config.n, config.m1_count, config.m2_count
    d12, d1, d2, _ = _decode_tables(mac, dist, thresholds.units)
    kernel_cdf = np.cumsum(mac.kernel, axis=-1)
    x1, x2 = _selected_words(codebooks.f1[None], codebooks.f2[None], e_table.e[None])
    x1, x2 = x1[0], x2[0]  # (m1, m2, n)

    check_type = thresholds.type_constraint is not None
    if check_type:
        target_counts = _type_counts(JointDist(thresholds.type_constraint), n)
        joint = _joint_type_counts(
            codebooks.f1[None], codebooks.f2[None], mac.x1_size, mac.x2_size
        )[0]
        matched_k = (joint == target_counts.ravel()).all(axis=-1)
        sel_type_ok = np.take_along_axis(matched_k, e_table.e[..., None], axis=-1)[..., 0]

    errors = 0
    tally = {"threshold_miss": 0, "impostor_pass": 0, "ambiguity": 0, "type_miss": 0}
    done = 0
    block = 0
    while done < config.trials:
        b = min(_BLOCK, config.trials - done)
        rng = _block_rng(config.seed, block)
        msg1 = rng.integers(0, m1c, size=b)
        msg2 = rng.integers(0, m2c, size=b)
        tx1 = x1[msg1, msg2]
        tx2 = x2[msg1, msg2]
        u = rng.random((b, n))
        rows = kernel_cdf[tx1, tx2]
        y = (u[..., None] < rows).argmax(axis=-1)
        yy = y[:, None, None, :]
        m12 = d12[x1[None], x2[None], yy].sum(axis=-1)
        m1d = d1[x1[None], x2[None], yy].sum(axis=-1)
        m2d = d2[x1[None], x2[None], yy].sum(axis=-1)
        passes = (m12 >= thresholds.c12) & (m1d >= thresholds.c1) & (m2d >= thresholds.c2)
        if check_type:
            passes &= sel_type_ok[None]
        npass = passes.sum(axis=(1, 2))
        bb = np.arange(b)
        true_pass = passes[bb, msg1, msg2]
        correct = (npass == 1) & true_pass
        err = ~correct
        errors += int(err.sum())
        ambiguous = err & (npass >= 2)
        impostor = err & (npass == 1)
        none_pass = err & (npass == 0)
        if check_type:
            true_in_type = sel_type_ok[msg1, msg2]
            type_miss = none_pass & ~true_in_type
            tally["type_miss"] += int(type_miss.sum())
            none_pass = none_pass & true_in_type
        tally["threshold_miss"] += int(none_pass.sum())
        tally["ambiguity"] += int(ambiguous.sum())
        tally["impostor_pass"] += int(impostor.sum())
        done += b
        block += 1

    return SimReport(
        trials=config.trials,
        errors=errors,
        p_hat=errors / config.trials,
        ci95=_clopper_pearson(errors, config.trials),
        decomposition=tally,
        seed=config.seed,
    )


def simulate_with_bound(config: SimConfig, mc_samples: int = 100_000) -> SimReport:
    """estimate_error plus the finite-blocklength bound in one report."""
    report = estimate_error(config)
    bound = fbl_bound(config, mc_samples=mc_samples)
    return replace(report, fbl_bound=bound)


# ---------------------------------------------------------------------------
# JSON-document form of a simulation config


def sim_config_to_dict(config: SimConfig) -> dict:
    out = {
        "channel": {
            "x1_size": config.mac.x1_size,
            "x2_size": config.mac.x2_size,
            "y_size": config.mac.y_size,
            "kernel": config.mac.kernel.tolist(),
        },
        "n": config.n,
        "m1_count": config.m1_count,
        "m2_count": config.m2_count,
        "k": config.k,
        "mode": config.mode,
        "trials": config.trials,
        "seed": config.seed,
        "units": config.units,
    }
    if isinstance(config.dist, JointDist):
        out["dist"] = {"p12": np.asarray(config.dist.p12).tolist()}
    else:
        out["dist"] = {
            "p1": np.asarray(config.dist.p1).tolist(),
            "p2": np.asarray(config.dist.p2).tolist(),
        }
    if config.thresholds is not None:
        th = config.thresholds
        out["thresholds"] = {"c12": th.c12, "c1": th.c1, "c2": th.c2}
        if th.type_constraint is not None:
            out["thresholds"]["type_constraint"] = np.asarray(th.type_constraint).tolist()
    return out


def sim_config_from_dict(doc: dict) -> SimConfig:
    from .channel import load_channel

    chan = doc["channel"]
    mac = named_channel(chan) if isinstance(chan, str) else load_channel(chan)
    dd = doc["dist"]
    if "p12" in dd:
        dist: InputDist = JointDist(np.asarray(dd["p12"], dtype=float))
    else:
        dist = ProductDist(np.asarray(dd["p1"], dtype=float), np.asarray(dd["p2"], dtype=float))
    units = doc.get("units", "bits")
    thresholds = None
    if "thresholds" in doc:
        td = doc["thresholds"]
        tc = td.get("type_constraint")
        thresholds = DecoderThresholds(
            c12=float(td["c12"]),
            c1=float(td["c1"]),
            c2=float(td["c2"]),
            type_constraint=None if tc is None else np.asarray(tc, dtype=float),
            units=units,
        )
    return SimConfig(
        mac=mac,
        dist=dist,
        n=int(doc["n"]),
        m1_count=int(doc["m1_count"]),
        m2_count=int(doc["m2_count"]),
        k=int(doc["k"]),
        mode=doc.get("mode", IID),
        thresholds=thresholds,
        trials=int(doc.get("trials", 10_000)),
        seed=int(doc.get("seed", 0)),
        units=units,
    )

"""Monte-Carlo experiment engine: BER estimation, noise-threshold search,
(T, Ta) grid search, and instrumented decoding runs.

Blocks are independent work units. Block ``b`` of a run with master seed ``s``
draws all of its randomness from ``np.random.default_rng([s, b])``, so the
aggregate counters do not depend on how blocks are distributed across workers:
parallel and serial execution are bit-for-bit identical.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .bch import CodeSpec, build_code
from .channel import ERASURE, ChannelConfig, quantize, transmit
from .pc import (
    DrsdConfig,
    drsd_decode,
    ibdd_decode,
    ieaed_decode,
    pc_encode,
    split_ternary,
)

DECODERS = ("ibdd", "ieaed", "ideal_eaed", "drsd", "drsd_plus", "none")

#: Empirically calibrated erasure thresholds by component-code length
#: (grid-searched at the 1e-4 noise threshold; the n=511 value is a
#: same-erasures-per-row extrapolation).
DEFAULT_ERASURE_T = {7: 0.13, 8: 0.10, 9: 0.08}


class SearchError(RuntimeError):
    """Raised when a threshold search cannot proceed (non-bracketing bounds)."""


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce a Monte-Carlo run."""

    nu: int = 8
    t: int = 2
    even_weight: bool = True
    decoder: str = "drsd"
    iters: int = 20
    erasure_T: float = None        # None -> per-decoder default
    drs_levels: int = 32
    anchor_T0: int = None          # None -> DrsdConfig.make default
    anchor_T_star: int = None
    init_lo: int = None
    init_hi: int = None
    deterministic_fill: bool = False
    target_ber: float = 1e-4
    min_block_errors: int = 100
    min_bit_errors: int = 500
    max_blocks: int = 1_000_000
    chunk_blocks: int = 32
    master_seed: int = 0
    workers: int = 1
    count_all_bits: bool = False

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; pick one of {DECODERS}")
        if self.min_block_errors <= 0 or self.min_bit_errors <= 0:
            raise ValueError("stopping-rule error counts must be positive")
        if self.max_blocks <= 0 or self.chunk_blocks <= 0:
            raise ValueError("block budgets must be positive")
        if not 0.0 < self.target_ber < 1.0:
            raise ValueError(f"target_ber must be in (0, 1), got {self.target_ber}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.erasure_T is not None and self.erasure_T < 0:
            raise ValueError("erasure_T must be >= 0")

    @property
    def resolved_erasure_T(self) -> float:
        if self.erasure_T is not None:
            return self.erasure_T
        if self.decoder in ("ibdd", "none"):
            return 0.0
        return DEFAULT_ERASURE_T[self.nu]

    def code(self) -> CodeSpec:
        return _cached_code(self.nu, self.t, self.even_weight)

    @property
    def pc_rate(self) -> float:
        code = self.code()
        return (code.k / code.n) ** 2

    def drsd_config(self) -> DrsdConfig:
        if self.decoder not in ("drsd", "drsd_plus"):
            raise ValueError(f"decoder {self.decoder!r} has no score config")
        overrides = {}
        for name in ("anchor_T0", "anchor_T_star", "init_lo", "init_hi"):
            value = getattr(self, name)
            if value is not None:
                overrides[name] = value
        return DrsdConfig.make(
            t=self.t, iters=self.iters, erasure_T=self.resolved_erasure_T,
            variant=self.decoder, drs_levels=self.drs_levels,
            n=self.code().n, deterministic_fill=self.deterministic_fill,
            **overrides)


@dataclass(frozen=True)
class BerEstimate:
    ebn0_db: float
    blocks: int
    bits: int
    bit_errors: int
    block_errors: int
    ber: float
    ci_lo: float
    ci_hi: float

    def __str__(self):
        return (f"{self.ebn0_db:.3f} dB: BER {self.ber:.3e} "
                f"[{self.ci_lo:.2e}, {self.ci_hi:.2e}] "
                f"({self.block_errors}/{self.blocks} blocks in error)")


@lru_cache(maxsize=None)
def _cached_code(nu: int, t: int, even_weight: bool) -> CodeSpec:
    return build_code(nu, t, even_weight)


def _run_block(code: CodeSpec, cfg: ExperimentConfig, ch: ChannelConfig,
               block_index: int, metrics_sink=None, genie=False):
    """Simulate one block; returns (bit_errors, bits_counted)."""
    rng = np.random.default_rng([cfg.master_seed, block_index])
    payload = rng.integers(0, 2, (code.k, code.k), dtype=np.uint8)
    X = pc_encode(code, payload)
    soft = transmit(X, ch, rng)
    dec = cfg.decoder

    if dec == "none":
        # Decoder bypass: count raw hard-decision symbol errors (erasures are
        # neither errors nor correct decisions here).
        Y = quantize(soft, cfg.resolved_erasure_T)
        err = int(np.count_nonzero((Y != X) & (Y != ERASURE)))
        return err, X.size

    ref = X if (genie or dec == "ideal_eaed") else None
    if dec == "ibdd":
        bits, _ = split_ternary(quantize(soft, 0.0))
        out = ibdd_decode(code, bits, cfg.iters, transmitted=ref,
                          metrics_sink=metrics_sink)
    elif dec in ("ieaed", "ideal_eaed"):
        Y = quantize(soft, cfg.resolved_erasure_T)
        out = ieaed_decode(code, Y, cfg.iters, rng, transmitted=ref,
                           ideal=dec == "ideal_eaed", metrics_sink=metrics_sink,
                           deterministic_fill=cfg.deterministic_fill)
    else:
        out = drsd_decode(code, soft, cfg.drsd_config(), rng, transmitted=ref,
                          metrics_sink=metrics_sink)

    if cfg.count_all_bits:
        return int(np.count_nonzero(out != X)), X.size
    return int(np.count_nonzero(out[:code.k, :code.k] != payload)), code.k ** 2


def _simulate_chunk(cfg: ExperimentConfig, ebn0_db: float, start: int, count: int):
    """Worker entry point: simulate blocks [start, start + count)."""
    code = _cached_code(cfg.nu, cfg.t, cfg.even_weight)
    ch = ChannelConfig(cfg.pc_rate, ebn0_db, cfg.resolved_erasure_T)
    bit_errors = block_errors = bits = 0
    sumsq = 0  # sum of squared per-block bit-error counts (cluster variance)
    for b in range(start, start + count):
        err, nbits = _run_block(code, cfg, ch, b)
        bit_errors += err
        bits += nbits
        sumsq += err * err
        block_errors += err > 0
    return count, bits, bit_errors, block_errors, sumsq


def _cluster_ci(blocks, bits, bit_errors, sumsq, z=1.96):
    """95% CI for the BER treating blocks as sampling clusters."""
    ber = bit_errors / bits if bits else 0.0
    if blocks < 2 or bits == 0:
        return ber, 0.0, 1.0
    bits_per_block = bits / blocks
    mean = bit_errors / blocks
    var = max(sumsq / blocks - mean * mean, 0.0) * blocks / (blocks - 1)
    se = math.sqrt(var / blocks) / bits_per_block
    return ber, max(ber - z * se, 0.0), min(ber + z * se, 1.0)


def estimate_ber(cfg: ExperimentConfig, ebn0_db: float,
                 decide_target: float = None) -> BerEstimate:
    """Estimate the post-decoding BER at one SNR point.

    Blocks run in chunks committed in index order; the stopping rule is
    evaluated after each chunk, so the result is independent of the worker
    count. ``decide_target`` enables early exit once the estimate is
    confidently on one side of the given BER (used by threshold searches).
    """
    blocks = bits = bit_errors = block_errors = sumsq = 0
    min_decide_blocks = 4 * cfg.chunk_blocks

    def commit(result):
        nonlocal blocks, bits, bit_errors, block_errors, sumsq
        n, b, be, ble, sq = result
        blocks += n
        bits += b
        bit_errors += be
        block_errors += ble
        sumsq += sq

    def done():
        if blocks >= cfg.max_blocks:
            return True
        if block_errors >= cfg.min_block_errors and bit_errors >= cfg.min_bit_errors:
            return True
        if decide_target is not None and blocks >= min_decide_blocks:
            if block_errors < 3:
                # Too few error events for a meaningful cluster CI. Declare
                # "below target" only once a BER-at-target process would very
                # likely have shown more block errors, conservatively assuming
                # every errored block has up to 1% of its bits wrong.
                return blocks * decide_target / 0.01 - block_errors > 12
            ber, lo, hi = _cluster_ci(blocks, bits, bit_errors, sumsq, z=2.807)
            if decide_target < lo or decide_target > hi:
                return True
        return False

    def chunk_sizes():
        remaining = cfg.max_blocks
        start = 0
        while remaining > 0:
            n = min(cfg.chunk_blocks, remaining)
            yield start, n
            start += n
            remaining -= n

    if cfg.workers == 1:
        for start, n in chunk_sizes():
            commit(_simulate_chunk(cfg, ebn0_db, start, n))
            if done():
                break
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            sizes = chunk_sizes()
            pending = {}
            next_submit = 0
            next_commit = 0
            exhausted = False
            while True:
                while not exhausted and len(pending) < cfg.workers + 2:
                    try:
                        start, n = next(sizes)
                    except StopIteration:
                        exhausted = True
                        break
                    pending[next_submit] = pool.submit(
                        _simulate_chunk, cfg, ebn0_db, start, n)
                    next_submit += 1
                if next_commit not in pending:
                    break
                commit(pending.pop(next_commit).result())
                next_commit += 1
                if done():
                    for fut in pending.values():
                        fut.cancel()
                    break

    ber, lo, hi = _cluster_ci(blocks, bits, bit_errors, sumsq)
    return BerEstimate(ebn0_db, blocks, bits, bit_errors, block_errors, ber, lo, hi)


@dataclass
class ThresholdResult:
    threshold_db: float
    bracket: tuple
    evaluations: list = field(default_factory=list)


def noise_threshold(cfg: ExperimentConfig, lo_db: float, hi_db: float,
                    resolution: float = 0.02, max_bisections: int = 12) -> ThresholdResult:
    """Minimal Eb/N0 achieving ``cfg.target_ber``, by bisection.

    Requires BER(lo) > target > BER(hi); raises SearchError otherwise.
    Returns the midpoint of the final bracket.
    """
    if not lo_db < hi_db:
        raise SearchError(f"bounds must satisfy lo < hi, got [{lo_db}, {hi_db}]")
    target = cfg.target_ber
    evals = []

    def ber_at(snr):
        est = estimate_ber(cfg, snr, decide_target=target)
        evals.append(est)
        return est.ber

    if ber_at(lo_db) <= target:
        raise SearchError(
            f"BER at lower bound {lo_db} dB is already <= target {target}")
    if ber_at(hi_db) > target:
        raise SearchError(
            f"BER at upper bound {hi_db} dB is still > target {target}")

    for _ in range(max_bisections):
        if hi_db - lo_db <= resolution:
            break
        mid = 0.5 * (lo_db + hi_db)
        if ber_at(mid) > target:
            lo_db = mid
        else:
            hi_db = mid
    return ThresholdResult(0.5 * (lo_db + hi_db), (lo_db, hi_db), evals)


def grid_search_thresholds(cfg: ExperimentConfig, T_grid, Ta_grid,
                           lo_db: float, hi_db: float, **search_kwargs):
    """Noise threshold over a (T, Ta) grid; returns (T_opt, Ta_opt, rows).

    Rows are (T, Ta, threshold_db); points where the search fails to bracket
    get threshold NaN and are skipped in the argmin.
    """
    rows = []
    best = None
    for T in T_grid:
        for Ta in Ta_grid:
            pt = replace(cfg, erasure_T=float(T),
                         anchor_T0=None if Ta is None else int(Ta))
            try:
                thr = noise_threshold(pt, lo_db, hi_db, **search_kwargs).threshold_db
            except SearchError:
                thr = float("nan")
            rows.append((float(T), Ta, thr))
            if not math.isnan(thr) and (best is None or thr < best[2]):
                best = rows[-1]
    if best is None:
        raise SearchError("threshold search failed on every grid point")
    return best[0], best[1], rows


@dataclass
class InstrumentRow:
    half_iter: int
    blocks: int                    # blocks still decoding at this half-iteration
    anchors: float
    err_anchors: float
    miscorrections: float
    bdd_steps_norm: float


@dataclass
class InstrumentResult:
    rows: list
    estimate: BerEstimate
    total_steps_norm: float        # total BDD steps per block / (n * 2 * L_ref)


def instrumented_run(cfg: ExperimentConfig, ebn0_db: float, blocks: int,
                     l_ref: int = 10) -> InstrumentResult:
    """Per-half-iteration metrics averaged over ``blocks`` blocks.

    The genie reference (transmitted block) is retained so miscorrections and
    wrongly-marked anchors are exact. BDD steps are normalized by n * 2 * l_ref
    (l_ref reference full iterations of one-component-decode-per-word).
    """
    if cfg.decoder not in ("ibdd", "ieaed", "drsd", "drsd_plus"):
        raise ValueError(f"instrumentation unsupported for decoder {cfg.decoder!r}")
    code = cfg.code()
    ch = ChannelConfig(cfg.pc_rate, ebn0_db, cfg.resolved_erasure_T)
    norm = code.n * 2 * l_ref
    acc = {}
    bit_errors = block_errors = bits = sumsq = total_steps = 0
    for b in range(blocks):
        sink = []
        err, nbits = _run_block(code, cfg, ch, b, metrics_sink=sink, genie=True)
        bit_errors += err
        bits += nbits
        sumsq += err * err
        block_errors += err > 0
        for rep in sink:
            count, anc, wrong, mis, steps = acc.setdefault(
                rep.half_iter, [0, 0.0, 0.0, 0, 0])
            acc[rep.half_iter] = [
                count + 1,
                anc + (0.0 if math.isnan(rep.anchors_fraction) else rep.anchors_fraction),
                wrong + (0.0 if math.isnan(rep.erroneous_anchor_fraction)
                         else rep.erroneous_anchor_fraction),
                mis + rep.miscorrection_count,
                steps + rep.bdd_step_count,
            ]
            total_steps += rep.bdd_step_count
    rows = []
    for half in sorted(acc):
        count, anc, wrong, mis, steps = acc[half]
        rows.append(InstrumentRow(half, count, anc / count, wrong / count,
                                  mis / count, steps / count / norm))
    ber, lo, hi = _cluster_ci(blocks, bits, bit_errors, sumsq)
    est = BerEstimate(ebn0_db, blocks, bits, bit_errors, block_errors, ber, lo, hi)
    return InstrumentResult(rows, est, total_steps / blocks / norm)

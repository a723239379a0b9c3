"""
Monte Carlo harness: frame-error-rate runs, optimal-list rank counting, and
threshold calibration statistics.

Determinism contract: every frame's randomness comes from
SeedSequence(master_seed, point_index, frame_index) (message bits drawn
first, then the noise), frames are processed in fixed-size batches, and
stopping decisions are taken only at batch boundaries, so results are
bit-identical no matter how many workers run the batches.

Frame-error runs transmit a fresh random codeword per frame: the search
loop seeds its optimum with the hard-decision pattern, whose test word is
the all-zero codeword, so always sending zero would hand the decoder the
answer and understate the error rate at small list budgets.  The rank
counting and threshold statistics depend only on the coset geometry, which
is transmission invariant, so those runs keep the all-zero convention.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import sigma_from_ebn0, transmit
from .decoder import DecoderConfig, lc_osd
from .gf2 import BitMatrix, LinearCode, nullspace_basis
from .preprocess import preprocess
from .slva import SlvaSession

BATCH_FRAMES = 256

# How close a constrained pattern's weight may come to the true pattern's
# weight and still count as strictly lighter; float sums over permuted
# reliabilities wobble a few ulps below this.
_WEIGHT_MARGIN = 1e-9


def default_workers() -> int:
    env = os.environ.get("LCOSD_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def frame_rng(master_seed: int, point_index: int, frame_index: int) -> np.random.Generator:
    """Per-frame generator, independent of batching and worker layout."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(point_index, frame_index))
    )


@dataclass(frozen=True)
class SimRecord:
    """One grid point of a frame-error-rate run."""

    ebn0_db: float
    frames: int
    frame_errors: int
    fer: float
    l_avg: float
    ml_certified_fraction: float
    wall_seconds: float
    mld_lb_errors: int | None = None

    @property
    def mld_lb_fer(self) -> float | None:
        if self.mld_lb_errors is None:
            return None
        return self.mld_lb_errors / self.frames


@dataclass(frozen=True)
class ListRankRecord:
    """One grid point of an optimal-list rank-counting run.

    For each reported list size l: `miss_counts[l]` frames had rank >= l
    (the transmitted word missed a size-l list), and `rank_sums[l]` totals
    the rank over the remaining frames, so conditional rank means need no
    per-frame storage.
    """

    ebn0_db: float
    frames: int
    rank_cap: int
    miss_counts: dict[int, int]
    rank_sums: dict[int, float]

    def miss_rate(self, l_max: int) -> float:
        return self.miss_counts[l_max] / self.frames

    def conditional_mean_rank(self, l_max: int) -> float:
        """Mean rank of the transmitted word among frames where it made the list."""
        below = self.frames - self.miss_counts[l_max]
        if below == 0:
            return float("nan")
        return self.rank_sums[l_max] / below


def _code_payload(code: LinearCode) -> tuple:
    return code.n, code.k, code.h.to_dense().tobytes()


def _code_from_payload(payload: tuple) -> LinearCode:
    n, k, blob = payload
    dense = np.frombuffer(blob, dtype=np.uint8).reshape(n - k, n)
    return LinearCode(n, k, BitMatrix.from_dense(dense))


def _run_batches(worker, tasks, workers: int):
    """Yield per-batch results in task order, optionally via a process pool.

    Submission is windowed so that an early stop (the caller breaking out)
    does not leave a long queue of pending batches behind.
    """
    if workers <= 1:
        for task in tasks:
            yield worker(task)
        return
    from collections import deque

    window = 2 * workers
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures: deque = deque()
        it = iter(tasks)
        try:
            for task in it:
                futures.append(pool.submit(worker, task))
                if len(futures) >= window:
                    break
            while futures:
                result = futures.popleft().result()
                nxt = next(it, None)
                if nxt is not None:
                    futures.append(pool.submit(worker, nxt))
                yield result
        finally:
            for fut in futures:
                fut.cancel()


# ---------------------------------------------------------------------------
# Frame-error-rate runs.
# ---------------------------------------------------------------------------


def _fer_batch(task) -> tuple[int, int, float, int, int]:
    payload, sigma, cfg_fields, master_seed, point_index, start, stop, track_mld = task
    code = _code_from_payload(payload)
    config = DecoderConfig(**cfg_fields)
    basis = nullspace_basis(code.h)
    errors = 0
    searches = 0
    certified = 0
    mld_errors = 0
    for f in range(start, stop):
        rng = frame_rng(master_seed, point_index, f)
        bits = rng.integers(0, 2, size=code.k, dtype=np.uint8)
        sent = (bits @ basis % 2).astype(np.uint8)
        frame = transmit(sent, sigma, rng)
        result = lc_osd(code, frame, config)
        searches += result.searches
        wrong = not np.array_equal(result.codeword, sent)
        errors += wrong
        certified += result.ml_certified
        if track_mld and wrong:
            gamma_sent = float(np.abs(frame.r) @ (frame.z ^ sent))
            mld_errors += result.gamma_opt < gamma_sent - _WEIGHT_MARGIN
    return stop - start, errors, searches, certified, mld_errors


def run_fer_point(
    code: LinearCode,
    ebn0_db: float,
    config: DecoderConfig,
    max_frames: int,
    max_errors: int,
    master_seed: int,
    point_index: int = 0,
    workers: int = 1,
    track_mld_lb: bool = False,
) -> SimRecord:
    """Simulate one Eb/N0 point until max_frames or max_errors frame errors.

    The error budget is checked after whole batches so that the outcome does
    not depend on the worker count.
    """
    sigma = sigma_from_ebn0(ebn0_db, code.rate)
    payload = _code_payload(code)
    cfg_fields = {
        "delta": config.delta,
        "l_max": config.l_max,
        "lga": config.lga,
        "stopping": config.stopping,
        "tau": config.tau,
    }
    t0 = time.perf_counter()
    tasks = []
    start = 0
    while start < max_frames:
        stop = min(start + BATCH_FRAMES, max_frames)
        tasks.append((payload, sigma, cfg_fields, master_seed, point_index, start, stop, track_mld_lb))
        start = stop

    frames = errors = searches = certified = mld_errors = 0
    for n_frames, n_err, n_srch, n_cert, n_mld in _run_batches(_fer_batch, tasks, workers):
        frames += n_frames
        errors += n_err
        searches += n_srch
        certified += n_cert
        mld_errors += n_mld
        if errors >= max_errors:
            break
    return SimRecord(
        ebn0_db=ebn0_db,
        frames=frames,
        frame_errors=errors,
        fer=errors / frames,
        l_avg=searches / frames,
        ml_certified_fraction=certified / frames,
        wall_seconds=time.perf_counter() - t0,
        mld_lb_errors=mld_errors if track_mld_lb else None,
    )


def run_fer_grid(
    code: LinearCode,
    ebn0_grid,
    config: DecoderConfig,
    max_frames: int,
    max_errors: int,
    master_seed: int,
    workers: int = 1,
    track_mld_lb: bool = False,
) -> list[SimRecord]:
    return [
        run_fer_point(
            code, db, config, max_frames, max_errors, master_seed,
            point_index=i, workers=workers, track_mld_lb=track_mld_lb,
        )
        for i, db in enumerate(ebn0_grid)
    ]


# ---------------------------------------------------------------------------
# Optimal-list rank counting (list-decoding FER without full decoding).
# ---------------------------------------------------------------------------


def count_list_rank(code: LinearCode, frame, delta: int, cap: int) -> int:
    """Rank of the true pattern in the constrained search, capped at `cap`.

    Counts constrained patterns strictly lighter than the true reliable-part
    pattern; the transmitted word makes a size-L list exactly when this count
    is below L.
    """
    inst = preprocess(code, frame, delta)
    true_r = inst.z_perm[inst.left_width :]  # all-zero codeword sent
    gamma_true = float(inst.r_abs_right @ true_r)
    session = SlvaSession(inst.p2, inst.r_abs_right, inst.s2)
    rank = 0
    while rank < cap:
        cand = session.next_candidate()
        if cand is None or cand.weight >= gamma_true - _WEIGHT_MARGIN:
            break
        rank += 1
    return rank


def _rank_batch(task) -> tuple[int, np.ndarray]:
    payload, sigma, delta, cap, master_seed, point_index, start, stop = task
    code = _code_from_payload(payload)
    zero = np.zeros(code.n, dtype=np.uint8)
    ranks = np.empty(stop - start, dtype=np.int64)
    for f in range(start, stop):
        frame = transmit(zero, sigma, frame_rng(master_seed, point_index, f))
        ranks[f - start] = count_list_rank(code, frame, delta, cap)
    return stop - start, ranks


def run_list_rank_point(
    code: LinearCode,
    ebn0_db: float,
    delta: int,
    rank_cap: int,
    frames: int,
    master_seed: int,
    l_values=None,
    point_index: int = 0,
    workers: int = 1,
) -> ListRankRecord:
    """Observed rank statistics of the transmitted word at one Eb/N0 point.

    `l_values` are the list sizes (each <= rank_cap) whose miss counts are
    reported; the default is just rank_cap.
    """
    if l_values is None:
        l_values = [rank_cap]
    l_values = sorted(set(int(v) for v in l_values))
    if l_values[-1] > rank_cap:
        raise ValueError("every reported list size must be <= rank_cap")
    sigma = sigma_from_ebn0(ebn0_db, code.rate)
    payload = _code_payload(code)
    tasks = []
    start = 0
    while start < frames:
        stop = min(start + BATCH_FRAMES, frames)
        tasks.append((payload, sigma, delta, rank_cap, master_seed, point_index, start, stop))
        start = stop

    miss = {l: 0 for l in l_values}
    sums = {l: 0.0 for l in l_values}
    total = 0
    for n_frames, ranks in _run_batches(_rank_batch, tasks, workers):
        total += n_frames
        for l in l_values:
            in_list = ranks < l
            miss[l] += int(n_frames - np.count_nonzero(in_list))
            sums[l] += float(ranks[in_list].sum())
    return ListRankRecord(
        ebn0_db=ebn0_db,
        frames=total,
        rank_cap=rank_cap,
        miss_counts=miss,
        rank_sums=sums,
    )


# ---------------------------------------------------------------------------
# Threshold calibration: Monte Carlo mean of the unreliable-part weight.
# ---------------------------------------------------------------------------


def _left_weight_batch(task) -> tuple[int, float]:
    payload, sigma, delta, master_seed, point_index, start, stop = task
    code = _code_from_payload(payload)
    zero = np.zeros(code.n, dtype=np.uint8)
    from .preprocess import get_permutation

    left_width = code.n - code.k - delta
    acc = 0.0
    for f in range(start, stop):
        frame = transmit(zero, sigma, frame_rng(master_seed, point_index, f))
        pi = get_permutation(code.h, np.abs(frame.r), delta)
        z_perm = frame.z[pi.map[:left_width]]
        r_perm = np.abs(frame.r[pi.map[:left_width]])
        acc += float(r_perm @ z_perm)
    return stop - start, acc


def mean_left_soft_weight(
    code: LinearCode,
    ebn0_db: float,
    delta: int,
    frames: int,
    master_seed: int,
    point_index: int = 0,
    workers: int = 1,
) -> float:
    """Monte Carlo E[soft weight of the true pattern's unreliable part]."""
    sigma = sigma_from_ebn0(ebn0_db, code.rate)
    payload = _code_payload(code)
    tasks = []
    start = 0
    while start < frames:
        stop = min(start + BATCH_FRAMES, frames)
        tasks.append((payload, sigma, delta, master_seed, point_index, start, stop))
        start = stop
    total = 0
    acc = 0.0
    for n_frames, s in _run_batches(_left_weight_batch, tasks, workers):
        total += n_frames
        acc += s
    return acc / total

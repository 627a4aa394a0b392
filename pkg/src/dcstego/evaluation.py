"""Quantitative harness: distribution tests, failure bounds, robustness curves.

Trials are independent and may run across worker processes; every trial's
randomness is derived from an explicit master seed and the trial index, so
results are identical for any worker count and aggregation order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .channel import ChannelSpec, apply_channel
from .codec import (
    CodecParams,
    Transcript,
    decode,
    encode,
    encode_single_block,
)
from .distance import prefix_distance_rows
from .errors import ParameterError, StegoError
from .model import SourceModel, Tokens, _truncate
from .randomness import Seed

MAX_ENUMERABLE_SPACE = 4096
TRIALS_PER_CELL = 50


def wilson_interval(successes: int, trials: int, z: float = 1.959964) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def hoeffding_delta(threshold: int, e: float, n: int) -> float:
    """Failure-probability bound exp(-(d_T - 2en)^2 / (2n))."""
    if not n > threshold:
        raise ParameterError(f"need n > threshold, got n={n}, threshold={threshold}")
    if not threshold > 2 * e * n:
        raise ParameterError(
            f"need threshold > 2*e*n, got threshold={threshold}, 2*e*n={2 * e * n}"
        )
    return math.exp(-((threshold - 2 * e * n) ** 2) / (2 * n))


def _key_values(report: "object", keys: Sequence[str]) -> str:
    return "\n".join(f"{k}: {getattr(report, k)}" for k in keys) + "\n"


# --- output distribution vs the (truncated) model ------------------------

def enumerate_sequence_probs(
    model: SourceModel, history: Sequence[int], block_len: int, top_p: float
) -> dict[Tokens, float]:
    """Exact probability of every length-block_len sequence under the model."""
    out: dict[Tokens, float] = {}
    stack: list[tuple[list[int], float]] = [([], 1.0)]
    base = list(history)
    while stack:
        prefix, prob = stack.pop()
        if len(prefix) == block_len:
            out[tuple(prefix)] = prob
            continue
        dist = _truncate(model.distribution(base + prefix), top_p)
        for token, p in zip(dist.tokens, dist.probs):
            stack.append((prefix + [token], prob * p))
    return out


@dataclass
class SecurityReport:
    space_size: int
    trials: int
    tv_distance: float
    chi2_stat: float
    p_value: float
    counts: dict[Tokens, int] = field(repr=False, default_factory=dict)
    exact_probs: dict[Tokens, float] = field(repr=False, default_factory=dict)

    def to_text(self) -> str:
        return _key_values(
            self, ["space_size", "trials", "tv_distance", "chi2_stat", "p_value"]
        )

    def to_csv(self) -> str:
        lines = ["sequence,probability,count"]
        for seq in sorted(self.exact_probs):
            token_text = " ".join(map(str, seq))
            lines.append(
                f"{token_text},{self.exact_probs[seq]!r},{self.counts.get(seq, 0)}"
            )
        return "\n".join(lines) + "\n"


def _security_chunk(args) -> dict[Tokens, int]:
    model, params, master, start, stop = args
    ell = params.ell
    counts: dict[Tokens, int] = {}
    for trial in range(start, stop):
        trial_seed = master.derive_child(2 * trial)
        bit_source = master.derive_child(2 * trial + 1).key
        head = format(
            int.from_bytes(bit_source[:8], "big") >> (64 - ell), f"0{ell}b"
        ) if ell else ""
        outcome = encode_single_block(
            model, (), head, replace(params, seed=trial_seed)
        )
        counts[outcome.chosen] = counts.get(outcome.chosen, 0) + 1
    return counts


def security_test(
    model: SourceModel,
    params: CodecParams,
    trials: int,
    master_seed: Seed,
    workers: int | None = None,
) -> SecurityReport:
    """Empirical single-block output distribution vs exact enumeration.

    Every trial uses a fresh derived seed and fresh random head bits, the
    regime in which the output distribution provably matches the model.
    """
    space = model.alphabet_size ** params.block_len
    if space > MAX_ENUMERABLE_SPACE:
        raise ParameterError(
            f"sequence space {space} exceeds enumerable bound {MAX_ENUMERABLE_SPACE}"
        )
    if trials < TRIALS_PER_CELL * space:
        raise ParameterError(
            f"need at least {TRIALS_PER_CELL * space} trials for {space} sequences"
        )
    chunks = _chunk_ranges(trials, workers)
    counts: dict[Tokens, int] = {}
    for part in _run_chunks(
        _security_chunk,
        [(model, params, master_seed, start, stop) for start, stop in chunks],
        workers,
    ):
        for seq, c in part.items():
            counts[seq] = counts.get(seq, 0) + c
    exact = enumerate_sequence_probs(model, (), params.block_len, params.top_p)
    tv = 0.5 * (
        sum(abs(counts.get(seq, 0) / trials - p) for seq, p in exact.items())
        + sum(c / trials for seq, c in counts.items() if seq not in exact)
    )
    support = sorted(exact)
    f_obs = np.array([counts.get(seq, 0) for seq in support], dtype=float)
    f_exp = np.array([exact[seq] * trials for seq in support])
    f_exp *= f_obs.sum() / f_exp.sum()  # guard tiny enumeration round-off
    chi2, p_value = stats.chisquare(f_obs, f_exp)
    return SecurityReport(
        space_size=space,
        trials=trials,
        tv_distance=tv,
        chi2_stat=float(chi2),
        p_value=float(p_value),
        counts=counts,
        exact_probs=exact,
    )


# --- single-block failure rate vs the analytic bound ---------------------

@dataclass
class BoundReport:
    threshold: int
    error_rate: float
    block_len: int
    delta: float
    trials: int
    failures: int
    failure_rate: float
    mc_standard_error: float
    limit: float

    @property
    def within_bound(self) -> bool:
        return self.failure_rate <= self.limit

    def to_text(self) -> str:
        keys = [
            "threshold", "error_rate", "block_len", "delta", "trials",
            "failures", "failure_rate", "mc_standard_error", "limit",
        ]
        return _key_values(self, keys) + f"within_bound: {self.within_bound}\n"


def _min_distance_group(outcome, received: Tokens) -> int:
    """Whole-sequence minimum-distance decision; ties pick the lowest index."""
    entries = np.asarray(outcome.codebook.entries, dtype=np.int64)
    rec = np.asarray(received, dtype=np.int64)
    dists = prefix_distance_rows(entries, rec)[:, -1]
    index = int(np.argmin(dists))
    return outcome.pcb.merged[outcome.partition.group_of[index]]


def _bound_chunk(args) -> int:
    model, params, channel, master, start, stop = args
    ell = params.ell
    failures = 0
    for trial in range(start, stop):
        trial_seed = master.derive_child(2 * trial)
        bit_source = master.derive_child(2 * trial + 1).key
        head = format(
            int.from_bytes(bit_source[:8], "big") >> (64 - ell), f"0{ell}b"
        ) if ell else ""
        outcome = encode_single_block(
            model, (), head, replace(params, seed=trial_seed)
        )
        received = apply_channel(
            outcome.chosen, replace(channel, rng_seed=channel.rng_seed + trial)
        )
        if _min_distance_group(outcome, received) != outcome.group_id:
            failures += 1
    return failures


def failure_bound_run(
    model: SourceModel,
    params: CodecParams,
    channel: ChannelSpec,
    trials: int,
    master_seed: Seed,
    workers: int | None = None,
) -> BoundReport:
    """Empirical per-block failure frequency against the Hoeffding bound."""
    delta = hoeffding_delta(
        params.distance_threshold, channel.error_rate, params.block_len
    )
    chunks = _chunk_ranges(trials, workers)
    failures = sum(
        _run_chunks(
            _bound_chunk,
            [(model, params, channel, master_seed, a, b) for a, b in chunks],
            workers,
        )
    )
    se = math.sqrt(delta * (1 - delta) / trials)
    return BoundReport(
        threshold=params.distance_threshold,
        error_rate=channel.error_rate,
        block_len=params.block_len,
        delta=delta,
        trials=trials,
        failures=failures,
        failure_rate=failures / trials,
        mc_standard_error=se,
        limit=delta + 3 * se,
    )


# --- Full-session robustness ----------------------------------------------

@dataclass
class CurvePoint:
    error_rate: float
    trials: int
    successes: int
    rate: float
    wilson_low: float
    wilson_high: float


@dataclass
class RunReport:
    trials: int
    success_count: int
    success_rate: float
    wilson_low: float
    wilson_high: float
    mean_d_min: float | None
    payload_bits_per_token: float
    entropy_utilization: float
    utilization_defined: bool
    curve: list[CurvePoint] = field(default_factory=list)

    def to_text(self) -> str:
        keys = [
            "trials", "success_count", "success_rate", "wilson_low",
            "wilson_high", "mean_d_min", "payload_bits_per_token",
            "entropy_utilization", "utilization_defined",
        ]
        return _key_values(self, keys)

    def curve_csv(self) -> str:
        lines = ["error_rate,trials,successes,rate,wilson_low,wilson_high"]
        for pt in self.curve:
            lines.append(
                f"{pt.error_rate!r},{pt.trials},{pt.successes},"
                f"{pt.rate!r},{pt.wilson_low!r},{pt.wilson_high!r}"
            )
        return "\n".join(lines) + "\n"


def _message_bits(master: Seed, trial: int, count: int) -> str:
    # Odd child indices carry message material; even ones are trial seeds.
    chunks: list[str] = []
    have = 0
    index = 0
    while have < count:
        key = master.derive_child(2 * trial + 1).derive_child(index).key
        chunks.append("".join(format(b, "08b") for b in key))
        have += 8 * len(key)
        index += 1
    return "".join(chunks)[:count]


def _robustness_chunk(args):
    model, params, channel, message_bits, master, start, stop, want_stats = args
    successes = 0
    tokens_total = 0
    consumed_total = 0
    entropy_total = 0.0
    d_min_sum = 0
    d_min_count = 0
    for trial in range(start, stop):
        trial_seed = master.derive_child(2 * trial)
        message = _message_bits(master, trial, message_bits)
        trial_params = replace(params, seed=trial_seed)
        transcript = Transcript() if want_stats else None
        stego = encode(model, (), message, trial_params, transcript)
        tokens_total += len(stego)
        if channel is not None and channel.error_rate > 0:
            received = apply_channel(
                stego, replace(channel, rng_seed=channel.rng_seed + trial)
            )
        else:
            received = stego
        try:
            result = decode(
                model, (), received, trial_params,
                expected_min_bits=message_bits,
            )
            if result.payload == message:
                successes += 1
        except StegoError:
            pass
        if transcript is not None:
            consumed_total += transcript.total_consumed_bits()
            entropy_total += transcript.total_entropy_bits()
            for v in transcript.d_min_values():
                d_min_sum += v
                d_min_count += 1
    return (successes, tokens_total, consumed_total, entropy_total,
            d_min_sum, d_min_count)


def robustness_run(
    model: SourceModel,
    params: CodecParams,
    channel: ChannelSpec | None,
    message_bits: int,
    trials: int,
    master_seed: Seed,
    workers: int | None = None,
    collect_stats: bool = True,
) -> RunReport:
    """Independent encode -> channel -> decode sessions with exact-match scoring."""
    chunks = _chunk_ranges(trials, workers)
    args = [
        (model, params, channel, message_bits, master_seed, a, b, collect_stats)
        for a, b in chunks
    ]
    successes = tokens_total = consumed_total = 0
    entropy_total = 0.0
    d_min_sum = d_min_count = 0
    for part in _run_chunks(_robustness_chunk, args, workers):
        successes += part[0]
        tokens_total += part[1]
        consumed_total += part[2]
        entropy_total += part[3]
        d_min_sum += part[4]
        d_min_count += part[5]
    low, high = wilson_interval(successes, trials)
    utilization = float("nan")
    defined = entropy_total > 0.0
    if defined:
        utilization = consumed_total / entropy_total
    e = channel.error_rate if channel is not None else 0.0
    return RunReport(
        trials=trials,
        success_count=successes,
        success_rate=successes / trials,
        wilson_low=low,
        wilson_high=high,
        mean_d_min=(d_min_sum / d_min_count) if d_min_count else None,
        payload_bits_per_token=(message_bits * trials / tokens_total)
        if tokens_total else 0.0,
        entropy_utilization=utilization,
        utilization_defined=defined,
        curve=[CurvePoint(e, trials, successes, successes / trials, low, high)],
    )


def robustness_sweep(
    model: SourceModel,
    params: CodecParams,
    channel_base: ChannelSpec,
    error_rates: Iterable[float],
    message_bits: int,
    trials: int,
    master_seed: Seed,
    workers: int | None = None,
) -> list[tuple[float, RunReport]]:
    out = []
    for offset, e in enumerate(error_rates):
        channel = replace(
            channel_base, error_rate=e,
            rng_seed=channel_base.rng_seed + offset * 1_000_000,
        )
        report = robustness_run(
            model, params, channel, message_bits, trials,
            master_seed.derive_child(10_000_019 + offset), workers,
        )
        out.append((e, report))
    return out


def entropy_utilization(transcript: Transcript) -> float:
    """Consumed secret bits over generated model entropy; NaN when undefined."""
    total_entropy = transcript.total_entropy_bits()
    if total_entropy <= 0.0:
        return float("nan")
    return transcript.total_consumed_bits() / total_entropy


# --- Decoding-region experiment -------------------------------------------

@dataclass
class WeightPoint:
    weight: int
    probes: int
    home: int

    @property
    def fraction(self) -> float:
        return self.home / self.probes if self.probes else 1.0


@dataclass
class VoronoiReport:
    codewords: int
    length: int
    alphabet: int
    threshold: int
    points: list[WeightPoint]
    min_cell_radius: int
    mean_cell_radius: float

    def fraction_at(self, weight: int) -> float:
        for pt in self.points:
            if pt.weight == weight:
                return pt.fraction
        raise KeyError(weight)

    def to_text(self) -> str:
        head = _key_values(
            self,
            ["codewords", "length", "alphabet", "threshold",
             "min_cell_radius", "mean_cell_radius"],
        )
        rows = "".join(
            f"weight_{pt.weight}_home_fraction: {pt.fraction!r}\n"
            for pt in self.points
        )
        return head + rows

    def to_csv(self) -> str:
        lines = ["weight,probes,home,fraction"]
        for pt in self.points:
            lines.append(f"{pt.weight},{pt.probes},{pt.home},{pt.fraction!r}")
        return "\n".join(lines) + "\n"


def _sample_separated_codewords(
    rng: np.random.Generator, count: int, length: int, alphabet: int, threshold: int
) -> np.ndarray:
    rows: list[np.ndarray] = []
    attempts = 0
    while len(rows) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise ParameterError("rejection sampling cannot separate codewords")
        cand = rng.integers(0, alphabet, length)
        if rows:
            existing = np.vstack(rows)
            if int((existing != cand).sum(axis=1).min()) <= threshold:
                continue
        rows.append(cand)
    return np.vstack(rows)


def voronoi_experiment(
    n_codewords: int,
    length: int,
    alphabet: int,
    threshold: int,
    probes: int,
    weights: Sequence[int] | None = None,
    rng_seed: int = 0,
) -> VoronoiReport:
    """Substitution probes around separated codewords, nearest-codeword decoded.

    Codewords are rejection-sampled to pairwise Hamming distance strictly
    above the threshold.  Each probe flips `weight` distinct positions to
    different values; decoding is nearest-codeword by Hamming distance with
    squared-Euclidean distance on token ids as the tie-breaker.
    """
    if weights is None:
        weights = list(range(1, threshold + 1))
    rng = np.random.default_rng(rng_seed)
    codewords = _sample_separated_codewords(
        rng, n_codewords, length, alphabet, threshold
    )
    points = []
    home_by_cell_weight = {}
    for weight in weights:
        if weight > length:
            raise ParameterError("probe weight cannot exceed the codeword length")
        home = 0
        origins = rng.integers(0, n_codewords, probes)
        for start in range(0, probes, 512):
            batch = origins[start : start + 512]
            probe_block = codewords[batch].copy()
            for row in range(len(batch)):
                cols = rng.choice(length, size=weight, replace=False)
                shift = rng.integers(1, alphabet, size=weight)
                probe_block[row, cols] = (probe_block[row, cols] + shift) % alphabet
            hamming = (probe_block[:, None, :] != codewords[None, :, :]).sum(axis=2)
            best = hamming.min(axis=1)
            for row in range(len(batch)):
                tied = np.flatnonzero(hamming[row] == best[row])
                if len(tied) > 1:
                    sq = ((codewords[tied] - probe_block[row]) ** 2).sum(axis=1)
                    tied = tied[np.flatnonzero(sq == sq.min())]
                decoded_home = len(tied) == 1 and tied[0] == batch[row]
                home += decoded_home
                cell = int(batch[row])
                ok_count, total = home_by_cell_weight.get((cell, weight), (0, 0))
                home_by_cell_weight[(cell, weight)] = (
                    ok_count + decoded_home, total + 1
                )
        points.append(WeightPoint(weight=weight, probes=probes, home=home))
    radii = []
    for cell in range(n_codewords):
        radius = 0
        for weight in sorted(weights):
            ok_count, total = home_by_cell_weight.get((cell, weight), (0, 0))
            if total and ok_count == total:
                radius = weight
            elif total:
                break
        radii.append(radius)
    return VoronoiReport(
        codewords=n_codewords,
        length=length,
        alphabet=alphabet,
        threshold=threshold,
        points=points,
        min_cell_radius=min(radii),
        mean_cell_radius=sum(radii) / len(radii),
    )


# --- parallel plumbing -----------------------------------------------------

def _chunk_ranges(trials: int, workers: int | None) -> list[tuple[int, int]]:
    n_workers = workers if workers else (os.cpu_count() or 1)
    n_chunks = max(1, min(trials, 4 * n_workers))
    step = -(-trials // n_chunks)
    return [(a, min(a + step, trials)) for a in range(0, trials, step)]


def _run_chunks(worker, args: list, workers: int | None) -> list:
    n_workers = workers if workers else (os.cpu_count() or 1)
    if n_workers <= 1 or len(args) <= 1:
        return [worker(a) for a in args]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(worker, args))

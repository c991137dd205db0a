"""Per-realization sum rates of the transmission strategies.

Every ``rate_*`` function takes a :class:`~ris_mumimo.channel.ChannelRealization`,
the per-user transmit power and the noise power (both in watts) and returns a
:class:`RateSample`.  User indices are 0-based.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .optimizer import PhaseConfig, align_phases, build_qcqp, randomize_extract, solve_sdp
from .seeding import STREAM_FDMA_TARGET, STREAM_JT, STREAM_RPS, make_rng, mix


class SchemeId(str, enum.Enum):
    DC = "DC"
    TDMA = "TDMA"
    FDMA = "FDMA"
    FDMA_US = "FDMA_US"
    RPS = "RPS"
    JT = "JT"
    JT_UPPER = "JT_UPPER"
    OT = "OT"

    @classmethod
    def parse(cls, name: str) -> "SchemeId":
        key = name.strip().upper().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise InvalidInputError(
                f"unknown scheme {name!r}; expected one of {', '.join(s.value for s in cls)}"
            ) from None


ALL_SCHEMES = tuple(SchemeId)


@dataclass(frozen=True)
class RateSample:
    scheme: SchemeId
    trial: int
    sum_rate_bps_hz: float
    selected_user: int | None = None
    flag: str = ""


@dataclass(frozen=True)
class SdrParams:
    """Settings of the relaxation-and-randomization pipeline used by JT."""

    tol: float = 1e-6
    max_iter: int = 5000
    n_candidates: int = 100
    method: str = "mixing"

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidInputError("tol must be > 0")
        if self.max_iter < 1 or self.n_candidates < 1:
            raise InvalidInputError("max_iter and n_candidates must be >= 1")
        if self.method not in ("mixing", "admm"):
            raise InvalidInputError(f"unknown SDP method {self.method!r}")


def _log_rate(gain, power, noise):
    if not noise > 0:
        raise InvalidInputError(f"noise power must be > 0, got {noise}")
    return np.log2(1 + np.asarray(gain, dtype=float) * power / noise)


def aligned_gain(f, g_k, d_k) -> float:
    """Magnitude of the co-phased channel, ``sum_n |f_n||g_nk| + |d_k|``."""
    return float(np.sum(np.abs(f) * np.abs(g_k)) + abs(d_k))


def aligned_gains(realization) -> np.ndarray:
    return np.abs(realization.f) @ np.abs(realization.g_matrix) + np.abs(realization.d)


def _composite(realization, phases) -> np.ndarray:
    return (realization.f * np.exp(1j * phases.theta)) @ realization.g_matrix + realization.d


def rate_dc(realization, power, noise, trial=0) -> RateSample:
    rate = _log_rate(np.sum(np.abs(realization.d) ** 2), power, noise)
    return RateSample(SchemeId.DC, trial, float(rate))


def rate_tdma(realization, power, noise, trial=0) -> RateSample:
    a = aligned_gains(realization)
    return RateSample(SchemeId.TDMA, trial, float(np.mean(_log_rate(a**2, power, noise))))


def fdma_user_rates(realization, target_user, power, noise) -> np.ndarray:
    """Per-user rates (before the 1/K split) with the RIS co-phased to ``target_user``."""
    k_users = realization.n_users
    if not 0 <= target_user < k_users:
        raise InvalidInputError(f"target user {target_user} outside 0..{k_users - 1}")
    phases = align_phases(realization.f, realization.g_matrix[:, target_user], realization.d[target_user])
    gains = np.abs(_composite(realization, phases)) ** 2
    gains[target_user] = aligned_gain(
        realization.f, realization.g_matrix[:, target_user], realization.d[target_user]
    ) ** 2
    return _log_rate(gains, power, noise)


def rate_fdma(realization, target_user, power, noise, trial=0) -> RateSample:
    rate = float(np.mean(fdma_user_rates(realization, target_user, power, noise)))
    return RateSample(SchemeId.FDMA, trial, rate, int(target_user))


def random_fdma_target(realization, rng_seed) -> int:
    return int(make_rng(mix(rng_seed, STREAM_FDMA_TARGET)).integers(realization.n_users))


def rate_fdma_us(realization, power, noise, trial=0) -> RateSample:
    rates = [np.mean(fdma_user_rates(realization, k, power, noise)) for k in range(realization.n_users)]
    best = int(np.argmax(rates))
    return RateSample(SchemeId.FDMA_US, trial, float(rates[best]), best)


def joint_rate(realization, phases, power, noise) -> float:
    """Sum rate when all users share the resource under one phase setting."""
    return float(_log_rate(np.sum(np.abs(_composite(realization, phases)) ** 2), power, noise))


def rate_rps(realization, power, noise, rng_seed, trial=0) -> RateSample:
    rng = make_rng(mix(rng_seed, STREAM_RPS))
    phases = PhaseConfig(rng.uniform(0.0, 2 * np.pi, size=realization.n_elements))
    return RateSample(SchemeId.RPS, trial, joint_rate(realization, phases, power, noise))


def jt_phases(realization, sdr: SdrParams, rng_seed):
    """Run the relaxation pipeline; returns ``(PhaseConfig, SdpSolution)``."""
    problem = build_qcqp(realization.f, realization.g_matrix, realization.d)
    solution = solve_sdp(problem, tol=sdr.tol, max_iter=sdr.max_iter, method=sdr.method)
    phases = randomize_extract(solution, problem, sdr.n_candidates, mix(rng_seed, STREAM_JT))
    return phases, solution


def rate_jt(realization, power, noise, sdr: SdrParams | None = None, rng_seed=0, trial=0) -> RateSample:
    phases, solution = jt_phases(realization, sdr or SdrParams(), rng_seed)
    flag = "" if solution.certified else "uncertified"
    return RateSample(SchemeId.JT, trial, joint_rate(realization, phases, power, noise), flag=flag)


def rate_jt_upper(realization, power, noise, trial=0) -> RateSample:
    a = aligned_gains(realization)
    return RateSample(SchemeId.JT_UPPER, trial, float(_log_rate(np.sum(a**2), power, noise)))


def rate_ot(realization, power, noise, trial=0) -> RateSample:
    a = aligned_gains(realization)
    best = int(np.argmax(a))
    return RateSample(SchemeId.OT, trial, float(_log_rate(a[best] ** 2, power, noise)), best)


def evaluate(scheme: SchemeId, realization, power, noise, rng_seed, sdr: SdrParams | None = None,
             trial=0) -> RateSample:
    """Dispatch one scheme; randomized schemes draw from sub-streams of ``rng_seed``."""
    scheme = SchemeId(scheme)
    if scheme is SchemeId.DC:
        return rate_dc(realization, power, noise, trial)
    if scheme is SchemeId.TDMA:
        return rate_tdma(realization, power, noise, trial)
    if scheme is SchemeId.FDMA:
        return rate_fdma(realization, random_fdma_target(realization, rng_seed), power, noise, trial)
    if scheme is SchemeId.FDMA_US:
        return rate_fdma_us(realization, power, noise, trial)
    if scheme is SchemeId.RPS:
        return rate_rps(realization, power, noise, rng_seed, trial)
    if scheme is SchemeId.JT:
        return rate_jt(realization, power, noise, sdr, rng_seed, trial)
    if scheme is SchemeId.JT_UPPER:
        return rate_jt_upper(realization, power, noise, trial)
    return rate_ot(realization, power, noise, trial)

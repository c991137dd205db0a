"""Information-theoretic rates of the RIS-aided multiple-access channel.

All rates are in bit/s/Hz.  Per-user gains enter as ``|h_k|^2`` so that the
same functions serve the reduced scalar model and the multi-antenna model.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SizeLimitError

MAX_REGION_USERS = 20


@dataclass(frozen=True)
class EffectiveChannel:
    """Composite reflected-plus-direct channel of one user."""

    h: complex | np.ndarray

    @property
    def gain(self) -> float:
        return float(np.sum(np.abs(self.h) ** 2))


@dataclass(frozen=True)
class RateRegionConstraint:
    subset: frozenset
    bound_bps_hz: float


def _check_link(power, noise):
    if not noise > 0:
        raise InvalidInputError(f"noise power must be > 0, got {noise}")
    if not power >= 0:
        raise InvalidInputError(f"power must be >= 0, got {power}")


def single_user_bound(h_gain: float, power: float, noise: float) -> float:
    _check_link(power, noise)
    if not h_gain >= 0:
        raise InvalidInputError(f"gain must be >= 0, got {h_gain}")
    return float(np.log2(1 + h_gain * power / noise))


def sum_capacity(h_gains, power: float, noise: float) -> float:
    """``log2(1 + P * sum_k |h_k|^2 / noise)``, equal power for every user."""
    _check_link(power, noise)
    gains = np.asarray(h_gains, dtype=float).reshape(-1)
    if np.any(gains < 0):
        raise InvalidInputError("gains must be >= 0")
    return float(np.log2(1 + gains.sum() * power / noise))


def region_constraints(h_gains, power: float, noise: float) -> list[RateRegionConstraint]:
    """One sum-rate bound per non-empty user subset, in order of subset size.

    User indices are 0-based.
    """
    gains = np.asarray(h_gains, dtype=float).reshape(-1)
    if gains.size > MAX_REGION_USERS:
        raise SizeLimitError(
            f"{gains.size} users would need {2 ** gains.size - 1} constraints"
            f" (limit K <= {MAX_REGION_USERS})"
        )
    out = []
    for size in range(1, gains.size + 1):
        for subset in itertools.combinations(range(gains.size), size):
            out.append(
                RateRegionConstraint(frozenset(subset), sum_capacity(gains[list(subset)], power, noise))
            )
    return out


def in_capacity_region(rates, h_gains, power: float, noise: float) -> bool:
    rates = np.asarray(rates, dtype=float)
    if np.any(rates < 0):
        return False
    return all(
        rates[list(c.subset)].sum() <= c.bound_bps_hz
        for c in region_constraints(h_gains, power, noise)
    )


def effective_channels(realization, phases) -> list[EffectiveChannel]:
    """``F Phi g_k + d_k`` per user; uses the full matrices when present."""
    theta = np.asarray(getattr(phases, "theta", phases), dtype=float)
    coeff = np.exp(1j * theta)
    fm = getattr(realization, "f_matrix", None)
    if fm is not None:
        h = (fm * coeff) @ realization.g_matrix + realization.d_matrix
        return [EffectiveChannel(h[:, k]) for k in range(h.shape[1])]
    h = (realization.f * coeff) @ realization.g_matrix + realization.d
    return [EffectiveChannel(complex(v)) for v in h]


def gain_equivalence_check(realization, phases) -> tuple[float, float]:
    """Per-user gain sum versus the norm of the stacked composite channel.

    Returns ``(sum_k |h_k|^2, ||F Phi G + D||^2)``; the two agree up to
    rounding for every phase configuration.
    """
    theta = np.asarray(getattr(phases, "theta", phases), dtype=float)
    lhs = float(sum(h.gain for h in effective_channels(realization, theta)))
    coeff = np.exp(1j * theta)
    fm = getattr(realization, "f_matrix", None)
    if fm is not None:
        stacked = fm @ np.diag(coeff) @ realization.g_matrix + realization.d_matrix
    else:
        stacked = realization.f @ np.diag(coeff) @ realization.g_matrix + realization.d
    rhs = float(np.linalg.norm(stacked) ** 2)
    return lhs, rhs

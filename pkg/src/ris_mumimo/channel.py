"""Geometry, large-scale fading and small-scale fading for the RIS uplink.

Distances are Euclidean in the horizontal plane, in meters.  The three-slope
path-loss model is evaluated with distances converted to kilometers, which is
the unit its intercept ``L`` is calibrated for.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .seeding import STREAM_FADING, STREAM_POSITIONS, make_rng, mix


@dataclass(frozen=True)
class ScenarioConfig:
    """Cell geometry, link budget and array size.

    Defaults describe a 500 m x 500 m cell with the BS at the origin, the
    RIS at the middle of the far edge, one cell-center user drawn from
    ``[0, x2]^2`` and one cell-edge user drawn from ``[x1, x3]^2``.
    """

    n_elements: int = 200
    n_users: int = 2
    n_center_users: int = 1
    n_edge_users: int = 1
    ue_power_watts: float = 1.0
    noise_density_dbm_hz: float = -174.0
    noise_figure_db: float = 9.0
    bandwidth_hz: float = 1e6
    carrier_ghz: float = 1.9
    bs_height_m: float = 15.0
    ue_height_m: float = 1.65
    shadow_std_db: float = 8.0
    ris_pathloss_ref_db: float = -30.0
    ris_pathloss_exp: float = 2.0
    rician_factor: float = 5.0
    x1_m: float = 250.0
    x2_m: float = 300.0
    x3_m: float = 500.0
    breakpoints_m: tuple[float, float] = (10.0, 50.0)
    bs_position: tuple[float, float] = (0.0, 0.0)
    ris_position: tuple[float, float] = (500.0, 250.0)

    def __post_init__(self):
        for name in ("breakpoints_m", "bs_position", "ris_position"):
            value = tuple(float(v) for v in getattr(self, name))
            if len(value) != 2:
                raise InvalidInputError(f"{name} must have two entries, got {value}")
            object.__setattr__(self, name, value)
        if self.n_elements < 0:
            raise InvalidInputError("n_elements must be >= 0")
        if self.n_users < 1:
            raise InvalidInputError("n_users must be >= 1")
        if self.n_center_users < 0 or self.n_edge_users < 0:
            raise InvalidInputError("user splits must be >= 0")
        if self.n_center_users + self.n_edge_users != self.n_users:
            raise InvalidInputError(
                f"n_center_users + n_edge_users = {self.n_center_users + self.n_edge_users}"
                f" does not match n_users = {self.n_users}"
            )
        if not self.ue_power_watts > 0:
            raise InvalidInputError("ue_power_watts must be > 0")
        if not self.rician_factor >= 0:
            raise InvalidInputError("rician_factor must be >= 0")
        if not self.x1_m < self.x3_m:
            raise InvalidInputError("x1_m must be < x3_m")
        if not self.x2_m > 0:
            raise InvalidInputError("x2_m must be > 0")
        if not self.shadow_std_db >= 0:
            raise InvalidInputError("shadow_std_db must be >= 0")
        if not self.bandwidth_hz > 0:
            raise InvalidInputError("bandwidth_hz must be > 0")
        d0, d1 = self.breakpoints_m
        if not 0 < d0 < d1:
            raise InvalidInputError("breakpoints must satisfy 0 < d0 < d1")
        if not (self.noise_power > 0 and math.isfinite(self.noise_power)):
            raise InvalidInputError("derived noise power must be positive and finite")

    @property
    def noise_power(self) -> float:
        """Thermal noise power in watts over the signal bandwidth."""
        dbm = self.noise_density_dbm_hz + 10 * math.log10(self.bandwidth_hz) + self.noise_figure_db
        return 10 ** ((dbm - 30) / 10)

    def with_users(self, n_users: int) -> "ScenarioConfig":
        """Same scenario with ``n_users`` users, edge users getting the smaller half."""
        n_edge = n_users // 2
        return dataclasses.replace(
            self, n_users=n_users, n_center_users=n_users - n_edge, n_edge_users=n_edge
        )

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for name in ("breakpoints_m", "bs_position", "ris_position"):
            out[name] = list(out[name])
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidInputError(f"unknown scenario keys: {', '.join(unknown)}")
        data = dict(data)
        # a config that only sets the split (or only n_users) stays consistent
        if "n_users" in data and not {"n_center_users", "n_edge_users"} & set(data):
            return cls(**{k: v for k, v in data.items() if k != "n_users"}).with_users(data["n_users"])
        if "n_users" not in data and {"n_center_users", "n_edge_users"} & set(data):
            data["n_users"] = data.get("n_center_users", cls.n_center_users) + data.get(
                "n_edge_users", cls.n_edge_users
            )
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise InvalidInputError("scenario JSON must be an object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        return cls.from_json(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the reduced (reference-antenna) channel.

    ``f`` is the RIS-to-BS vector (length N_s), column ``k`` of ``g_matrix``
    is user k's channel to the RIS, ``d`` holds the direct user-to-BS
    coefficients.  ``los_angle`` is the angle that steered the LOS part of
    ``f``.
    """

    f: np.ndarray
    g_matrix: np.ndarray
    d: np.ndarray
    user_positions: list = field(default_factory=list)
    los_angle: float = 0.0

    def __post_init__(self):
        f = np.asarray(self.f, dtype=complex).reshape(-1)
        g = np.asarray(self.g_matrix, dtype=complex)
        d = np.asarray(self.d, dtype=complex).reshape(-1)
        if g.ndim != 2 or g.shape != (f.size, d.size):
            raise InvalidInputError(
                f"g_matrix shape {g.shape} inconsistent with len(f)={f.size}, len(d)={d.size}"
            )
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g)) and np.all(np.isfinite(d))):
            raise InvalidInputError("channel coefficients must be finite")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g_matrix", g)
        object.__setattr__(self, "d", d)

    @property
    def n_elements(self) -> int:
        return self.f.size

    @property
    def n_users(self) -> int:
        return self.d.size


@dataclass(frozen=True)
class FullChannelRealization(ChannelRealization):
    """Reduced channel plus the multi-antenna matrices F (N_b x N_s) and D (N_b x K)."""

    f_matrix: np.ndarray = None
    d_matrix: np.ndarray = None

    def __post_init__(self):
        super().__post_init__()
        fm = np.asarray(self.f_matrix, dtype=complex)
        dm = np.asarray(self.d_matrix, dtype=complex)
        if fm.ndim != 2 or dm.ndim != 2 or fm.shape[0] != dm.shape[0]:
            raise InvalidInputError("f_matrix and d_matrix must be 2-D with equal row counts")
        if fm.shape[1] != self.n_elements or dm.shape[1] != self.n_users:
            raise InvalidInputError("full matrices inconsistent with the reduced channel")
        object.__setattr__(self, "f_matrix", fm)
        object.__setattr__(self, "d_matrix", dm)


def hata_intercept_db(config: ScenarioConfig) -> float:
    """Distance-independent loss term ``L`` of the three-slope model."""
    lf = math.log10(config.carrier_ghz * 1e3)
    return (
        46.3
        + 33.9 * lf
        - 13.82 * math.log10(config.bs_height_m)
        - (1.1 * lf - 0.7) * config.ue_height_m
        + (1.56 * lf - 0.8)
    )


def path_loss_three_slope(distance_m, config: ScenarioConfig):
    """Average channel gain in dB (negative) at ``distance_m`` meters.

    Slopes are 0, 20 and 35 dB/decade below ``d0``, between the breakpoints
    and beyond ``d1``.  Accepts a scalar or an array.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(~(d > 0)):
        raise InvalidInputError(f"distance must be > 0 m, got {distance_m}")
    big_l = hata_intercept_db(config)
    d0, d1 = (b / 1e3 for b in config.breakpoints_m)
    dk = d / 1e3
    far = -big_l - 35 * np.log10(dk)
    mid = -big_l - 15 * math.log10(d1) - 20 * np.log10(dk)
    near = -big_l - 15 * math.log10(d1) - 20 * math.log10(d0)
    out = np.where(dk > d1, far, np.where(dk > d0, mid, near))
    return float(out) if out.ndim == 0 else out


def ris_link_gain(distance_m: float, config: ScenarioConfig) -> float:
    """Linear LOS gain of the BS-RIS link, referenced to 1 m."""
    if not distance_m >= 1:
        raise InvalidInputError(f"RIS link distance must be >= 1 m, got {distance_m}")
    return 10 ** (config.ris_pathloss_ref_db / 10) * distance_m ** (-config.ris_pathloss_exp)


def draw_user_positions(config: ScenarioConfig, rng_seed: int) -> list:
    """Center users uniform on ``[0, x2]^2``, then edge users uniform on ``[x1, x3]^2``."""
    rng = make_rng(rng_seed)
    center = rng.uniform(0.0, config.x2_m, size=(config.n_center_users, 2))
    edge = rng.uniform(config.x1_m, config.x3_m, size=(config.n_edge_users, 2))
    return [tuple(p) for p in np.vstack([center, edge])]


def complex_gaussian(rng: np.random.Generator, size, variance=1.0) -> np.ndarray:
    """Circularly symmetric CN(0, variance) samples; ``variance`` broadcasts."""
    scale = np.sqrt(np.asarray(variance, dtype=float) / 2)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def steering_vector(n: int, angle: float) -> np.ndarray:
    """Half-wavelength ULA response ``exp(j*pi*m*sin(angle))``, m = 0..n-1."""
    return np.exp(1j * np.pi * np.arange(n) * math.sin(angle))


def rician_vector(rng: np.random.Generator, n: int, power: float, factor: float):
    """Rician vector with average per-entry ``power`` and K-factor ``factor``.

    Returns ``(vector, los_part, angle)``; the LOS part is a steering vector
    at a uniformly drawn angle.
    """
    angle = float(rng.uniform(0.0, 2 * np.pi))
    los = math.sqrt(power * factor / (factor + 1)) * steering_vector(n, angle)
    nlos = complex_gaussian(rng, n, power / (factor + 1))
    return los + nlos, los, angle


def link_variances(config: ScenarioConfig, positions, rng: np.random.Generator):
    """Per-user variances of the direct link and of the user-RIS link.

    Each link gets its own log-normal shadowing draw.
    """
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    d_bs = np.linalg.norm(pos - np.asarray(config.bs_position), axis=1)
    d_ris = np.linalg.norm(pos - np.asarray(config.ris_position), axis=1)
    shadow = rng.normal(0.0, config.shadow_std_db, size=(2, pos.shape[0]))
    var_d = 10 ** ((path_loss_three_slope(d_bs, config) + shadow[0]) / 10)
    var_g = 10 ** ((path_loss_three_slope(d_ris, config) + shadow[1]) / 10)
    return np.atleast_1d(var_d), np.atleast_1d(var_g)


def generate_realization(config: ScenarioConfig, rng_seed: int, positions=None) -> ChannelRealization:
    """Draw one channel realization; ``positions`` pins the users if given."""
    if positions is None:
        positions = draw_user_positions(config, mix(rng_seed, STREAM_POSITIONS))
    positions = [tuple(float(c) for c in p) for p in positions]
    if len(positions) != config.n_users:
        raise InvalidInputError(f"expected {config.n_users} positions, got {len(positions)}")
    rng = make_rng(mix(rng_seed, STREAM_FADING))
    var_d, var_g = link_variances(config, positions, rng)
    d = complex_gaussian(rng, config.n_users, var_d)
    g = complex_gaussian(rng, (config.n_elements, config.n_users), var_g[None, :])
    bs_ris = float(np.linalg.norm(np.subtract(config.ris_position, config.bs_position)))
    f, _, angle = rician_vector(
        rng, config.n_elements, ris_link_gain(bs_ris, config), config.rician_factor
    )
    return ChannelRealization(f=f, g_matrix=g, d=d, user_positions=positions, los_angle=angle)


def expand_to_array(realization: ChannelRealization, n_bs: int, rng_seed: int) -> FullChannelRealization:
    """Lift a reduced realization to an ``n_bs``-antenna BS.

    Every path arriving at the BS is scaled by a half-wavelength steering
    vector whose first (reference) entry is 1, so row 0 of ``f_matrix``
    equals ``f`` and row 0 of ``d_matrix`` equals ``d``.
    """
    if n_bs < 1:
        raise InvalidInputError("n_bs must be >= 1")
    rng = make_rng(rng_seed)
    angles = rng.uniform(0.0, 2 * np.pi, size=realization.n_users + 1)
    f_matrix = np.outer(steering_vector(n_bs, angles[0]), realization.f)
    d_matrix = np.column_stack(
        [steering_vector(n_bs, a) * dk for a, dk in zip(angles[1:], realization.d)]
    ).reshape(n_bs, realization.n_users)
    return FullChannelRealization(
        f=realization.f,
        g_matrix=realization.g_matrix,
        d=realization.d,
        user_positions=list(realization.user_positions),
        los_angle=realization.los_angle,
        f_matrix=f_matrix,
        d_matrix=d_matrix,
    )

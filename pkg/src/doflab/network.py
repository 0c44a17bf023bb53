"""Network configuration and constant-coefficient channel generation.

An L-cell network with K users per cell: user (l, k) has M transmit
antennas, every base station has N receive antennas, and the channel from
user (l, k) to base station m is an N x M matrix drawn once (constant
coefficients, no fading process).  Cells and users are 1-based in all
interfaces, matching the usual lk subscript convention.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import InputError
from .linalg import Tolerance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NetworkConfig:
    """Dimensions and generation parameters for one network realization."""

    L: int
    K: int
    M: int
    N: int
    beta: int = 1
    seed: int = 0
    dist: str = "complex-gaussian"
    tol: Tolerance = field(default_factory=Tolerance)

    def __post_init__(self):
        for name in ("L", "K", "M", "N", "beta"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InputError(f"{name} must be a positive integer, got {value!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise InputError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.dist not in linalg.DISTRIBUTIONS:
            raise InputError(
                f"unknown distribution {self.dist!r}, expected one of "
                f"{linalg.DISTRIBUTIONS}")

    def to_dict(self) -> dict:
        return {"L": self.L, "K": self.K, "M": self.M, "N": self.N,
                "beta": self.beta, "seed": self.seed, "dist": self.dist,
                "rel_rank_tol": self.tol.rel_rank_tol}

    @classmethod
    def from_dict(cls, doc: dict) -> "NetworkConfig":
        known = {"L", "K", "M", "N", "beta", "seed", "dist", "rel_rank_tol"}
        unknown = set(doc) - known
        if unknown:
            raise InputError(f"unknown network config keys: {sorted(unknown)}")
        kwargs = {k: doc[k] for k in ("L", "K", "M", "N") if k in doc}
        missing = {"L", "K", "M", "N"} - set(kwargs)
        if missing:
            raise InputError(f"network config missing keys: {sorted(missing)}")
        for opt in ("beta", "seed", "dist"):
            if opt in doc:
                kwargs[opt] = doc[opt]
        if "rel_rank_tol" in doc:
            kwargs["tol"] = Tolerance(doc["rel_rank_tol"])
        return cls(**kwargs)


@dataclass(frozen=True)
class PowerPolicy:
    """Per-user transmit power rho split equally over beta streams.

    With unit-norm precoder columns the transmit covariance has trace
    beta * (rho / beta) = rho, meeting the average power constraint with
    equality.  Noise power is normalized to 1, so rho is the linear SNR.
    """

    rho: float
    beta: int = 1

    def __post_init__(self):
        if not self.rho > 0:
            raise InputError(f"rho must be positive, got {self.rho}")
        if self.beta < 1:
            raise InputError(f"beta must be >= 1, got {self.beta}")

    @property
    def per_stream_power(self) -> float:
        return self.rho / self.beta


@dataclass(frozen=True)
class ChannelSet:
    """All L*L*K channel matrices of one network realization, immutable."""

    config: NetworkConfig
    channels: dict[tuple[int, int, int], np.ndarray] = field(repr=False)

    def channel(self, m: int, l: int, k: int) -> np.ndarray:
        """Channel from user (l, k) to base station m (all 1-based)."""
        cfg = self.config
        if not 1 <= m <= cfg.L:
            raise IndexError(f"cell index m={m} out of range 1..{cfg.L}")
        if not 1 <= l <= cfg.L:
            raise IndexError(f"cell index l={l} out of range 1..{cfg.L}")
        if not 1 <= k <= cfg.K:
            raise IndexError(f"user index k={k} out of range 1..{cfg.K}")
        return self.channels[(m, l, k)]


def generate_channels(config: NetworkConfig) -> ChannelSet:
    """Draw the full family of nondegenerate channel matrices.

    Each matrix gets its own RNG stream keyed by (seed, m, l, k), so the
    set is bit-reproducible and individual links can be regenerated in
    isolation.  A draw that fails the nondegeneracy check (numeric rank
    below min(M, N), probability zero at double precision) is logged and
    redrawn from the same stream.
    """
    cfg = config
    full_rank = min(cfg.M, cfg.N)
    channels = {}
    for m in range(1, cfg.L + 1):
        for l in range(1, cfg.L + 1):
            for k in range(1, cfg.K + 1):
                rng = linalg.seeded_rng(cfg.seed, m, l, k)
                h = linalg.random_matrix(cfg.N, cfg.M, cfg.dist, rng)
                while linalg.numeric_rank(h, cfg.tol) < full_rank:
                    log.warning("degenerate channel draw at (m=%d, l=%d, k=%d); "
                                "redrawing", m, l, k)
                    h = linalg.random_matrix(cfg.N, cfg.M, cfg.dist, rng)
                h.setflags(write=False)
                channels[(m, l, k)] = h
    return ChannelSet(cfg, channels)


def desired_channels(cs: ChannelSet, m: int) -> list[np.ndarray]:
    """Channels from base station m's own users, in user order."""
    return [cs.channel(m, m, k) for k in range(1, cs.config.K + 1)]


def interference_channels(cs: ChannelSet, m: int) -> list[np.ndarray]:
    """Out-of-cell channels into base station m, ordered by (l, k)."""
    cfg = cs.config
    if not 1 <= m <= cfg.L:
        raise IndexError(f"cell index m={m} out of range 1..{cfg.L}")
    return [cs.channel(m, l, k)
            for l in range(1, cfg.L + 1) if l != m
            for k in range(1, cfg.K + 1)]


def channel_set_to_dict(cs: ChannelSet) -> dict:
    """JSON-ready document: {config, channels: [{m, l, k, re, im}]}.

    ``re`` and ``im`` are row-major nested lists (one inner list per
    matrix row).  Field names are part of the CLI replay format.
    """
    entries = []
    for (m, l, k), h in sorted(cs.channels.items()):
        entries.append({"m": m, "l": l, "k": k,
                        "re": h.real.tolist(), "im": h.imag.tolist()})
    return {"config": cs.config.to_dict(), "channels": entries}


def channel_set_from_dict(doc: dict) -> ChannelSet:
    """Rebuild a ChannelSet from the document format above."""
    if set(doc) != {"config", "channels"}:
        raise InputError("channel document must have exactly the keys "
                         "'config' and 'channels'")
    cfg = NetworkConfig.from_dict(doc["config"])
    channels = {}
    for entry in doc["channels"]:
        if set(entry) != {"m", "l", "k", "re", "im"}:
            raise InputError("channel entry must have exactly the keys "
                             "'m', 'l', 'k', 're', 'im'")
        h = np.asarray(entry["re"], dtype=float) + 1j * np.asarray(entry["im"],
                                                                   dtype=float)
        if h.shape != (cfg.N, cfg.M):
            raise InputError(
                f"channel (m={entry['m']}, l={entry['l']}, k={entry['k']}) has "
                f"shape {h.shape}, expected ({cfg.N}, {cfg.M})")
        h.setflags(write=False)
        channels[(entry["m"], entry["l"], entry["k"])] = h
    expected = {(m, l, k)
                for m in range(1, cfg.L + 1)
                for l in range(1, cfg.L + 1)
                for k in range(1, cfg.K + 1)}
    if set(channels) != expected:
        raise InputError("channel document does not cover exactly the "
                         f"{len(expected)} (m, l, k) triples of the config")
    return ChannelSet(cfg, channels)

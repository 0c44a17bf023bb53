"""Finite-SNR rates, empirical DoF slopes and lemma Monte Carlo harnesses.

Rates are exact log-det expressions of the constructed schemes (no noise
sampling), so a slope fit over a high-SNR window is a deterministic
function of the channel seed.  The Monte Carlo harnesses sub-seed every
trial from (seed, trial index), which makes results independent of worker
count and aggregation order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import linregress

from . import linalg, schemes
from .errors import ContractError, InputError
from .linalg import Tolerance
from .network import ChannelSet, NetworkConfig, PowerPolicy, generate_channels
from .schemes import PrecoderSet, ProjectorSet, SchemeReport, build_nsia, other_cell

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class SnrGrid:
    """Strictly increasing SNR grid in dB, at least two points."""

    points_db: tuple[float, ...]

    def __post_init__(self):
        pts = self.points_db
        if len(pts) < 2:
            raise InputError(f"SNR grid needs at least 2 points, got {len(pts)}")
        if not all(math.isfinite(p) for p in pts):
            raise InputError("SNR grid points must be finite")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise InputError(f"SNR grid must be strictly increasing, got {pts}")

    @classmethod
    def from_range(cls, start_db: float, step_db: float, stop_db: float) -> "SnrGrid":
        if step_db <= 0:
            raise InputError(f"SNR step must be positive, got {step_db}")
        count = int(math.floor((stop_db - start_db) / step_db + 1e-9)) + 1
        if count < 2:
            raise InputError(
                f"SNR range {start_db}:{step_db}:{stop_db} has fewer than 2 points")
        return cls(tuple(start_db + i * step_db for i in range(count)))

    @property
    def linear(self) -> np.ndarray:
        return 10.0 ** (np.asarray(self.points_db) / 10.0)


DEFAULT_SNR_GRID = SnrGrid.from_range(60.0, 10.0, 100.0)


@dataclass(frozen=True)
class SlopeEstimate:
    """Least-squares fit of sum rate against log2(rho)."""

    grid: SnrGrid
    sum_rates: tuple[float, ...]
    slope: float
    intercept: float
    r_squared: float

    @property
    def clean(self) -> bool:
        return self.r_squared >= 0.99

    def to_dict(self) -> dict:
        return {
            "snr_db": list(self.grid.points_db),
            "sum_rates": list(self.sum_rates),
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
        }


@dataclass(frozen=True)
class LemmaTrialReport:
    """Pass count of a Monte Carlo lemma verification."""

    trials: int
    passes: int
    dims: tuple[int, ...]

    def __post_init__(self):
        if self.passes > self.trials:
            raise InputError("passes cannot exceed trials")

    @property
    def all_passed(self) -> bool:
        return self.passes == self.trials

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "trials": self.trials,
                "passes": self.passes, "all_passed": self.all_passed}


def _log_det_rate(gram_eigs: np.ndarray, per_stream_power: float) -> float:
    """log2 det(I + p * diag(eigs)) for a Hermitian PSD Gram spectrum."""
    eigs = np.clip(gram_eigs, 0.0, None)
    return float(np.sum(np.log1p(per_stream_power * eigs)) / LOG2)


def sum_rate(cs: ChannelSet, precoders: PrecoderSet, rho: float,
             projectors: ProjectorSet | None = None,
             report: SchemeReport | None = None) -> float:
    """Achievable sum rate (bits/channel use) of a verified scheme.

    Per cell, with effective desired channel G (projected when projectors
    are given), the rate is log2 det(I + (rho/beta) G G*): equal per-stream
    power, white noise.  Interference does not appear because the scheme
    is verified interference-free first; a non-decodable scheme is a
    contract violation, as are projectors without orthonormal rows (the
    projected noise would not be white).
    """
    if not rho > 0:
        raise InputError(f"rho must be positive, got {rho}")
    if projectors is not None and not projectors.row_orthonormalized:
        raise ContractError("projectors must be row-orthonormalized for the "
                            "white-noise rate formula")
    if report is None:
        report = schemes.verify_scheme(cs, precoders, projectors)
    if not report.decodable:
        raise ContractError(
            f"scheme is not decodable (residual {report.residual_interference:.3e}, "
            f"ranks {report.effective_rank})")
    power = PowerPolicy(rho, precoders.beta)
    total = 0.0
    for m in (1, 2):
        g = schemes.desired_matrix(cs, precoders, m)
        if projectors is not None:
            g = projectors.projector(m) @ g
        eigs = np.linalg.eigvalsh(g @ g.conj().T)
        total += _log_det_rate(eigs, power.per_stream_power)
    return total


def interference_limited_rate(cs: ChannelSet, precoders: PrecoderSet,
                              rho: float) -> float:
    """Sum rate when residual interference is treated as noise.

    Per cell: log2 det(I + Q_signal (I + Q_interference)^-1), evaluated as
    a difference of log-dets of two Hermitian positive definite matrices.
    Reduces to sum_rate when the interference terms vanish.  Baseline for
    the slope experiment; saturates at high SNR for generic precoders.
    """
    if not rho > 0:
        raise InputError(f"rho must be positive, got {rho}")
    cfg = cs.config
    power = PowerPolicy(rho, precoders.beta)
    total = 0.0
    for m in (1, 2):
        src = other_cell(m)
        q_signal = np.zeros((cfg.N, cfg.N), dtype=complex)
        q_interf = np.zeros((cfg.N, cfg.N), dtype=complex)
        for k in range(1, cfg.K + 1):
            hw = cs.channel(m, m, k) @ precoders.precoder(m, k)
            q_signal += power.per_stream_power * (hw @ hw.conj().T)
            hw = cs.channel(m, src, k) @ precoders.precoder(src, k)
            q_interf += power.per_stream_power * (hw @ hw.conj().T)
        eye = np.eye(cfg.N)
        _, num = np.linalg.slogdet(eye + q_interf + q_signal)
        _, den = np.linalg.slogdet(eye + q_interf)
        total += (num - den) / LOG2
    return total


def estimate_dof_slope(cs: ChannelSet, precoders: PrecoderSet,
                       grid: SnrGrid = DEFAULT_SNR_GRID,
                       projectors: ProjectorSet | None = None,
                       interference_limited: bool = False) -> SlopeEstimate:
    """Fit sum rate against log2(rho) over the grid.

    For a verified optimal scheme the slope approaches 2*K*beta.  With
    ``interference_limited`` the rates come from the saturating baseline
    formula instead (no decodability requirement, projectors ignored).
    """
    if interference_limited:
        rates = [interference_limited_rate(cs, precoders, rho)
                 for rho in grid.linear]
    else:
        report = schemes.verify_scheme(cs, precoders, projectors)
        rates = [sum_rate(cs, precoders, rho, projectors, report=report)
                 for rho in grid.linear]
    fit = linregress(np.log2(grid.linear), rates)
    return SlopeEstimate(grid=grid, sum_rates=tuple(rates),
                         slope=float(fit.slope), intercept=float(fit.intercept),
                         r_squared=float(fit.rvalue ** 2))


def random_precoders(cs: ChannelSet, beta: int, seed: int) -> PrecoderSet:
    """Generic orthonormal-column precoders, the non-aligned baseline."""
    cfg = cs.config
    if beta > cfg.M:
        raise InputError(f"beta={beta} exceeds M={cfg.M}")
    precoders = {}
    for l in range(1, cfg.L + 1):
        for k in range(1, cfg.K + 1):
            rng = linalg.seeded_rng(seed, l, k)
            w = linalg.random_matrix(cfg.M, beta, cfg.dist, rng)
            q, _ = np.linalg.qr(w)
            precoders[(l, k)] = q
    return PrecoderSet(beta, precoders)


def _run_trials(trial: Callable[[int], bool], trials: int,
                workers: int | None) -> int:
    """Count passing trials; a commutative sum, so worker count is moot."""
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1:
        return sum(trial(i) for i in range(trials))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(trial, range(trials)))


def monte_carlo_lemma1(m: int, n: int, l: int, trials: int, seed: int,
                       dist: str = "complex-gaussian",
                       tol: Tolerance = Tolerance(),
                       workers: int | None = 1) -> LemmaTrialReport:
    """Check rank(A B) = min(m, l) for independent A (m x n), B (n x l).

    Requires n >= max(m, l), the hypothesis under which the product is
    full rank with probability one.
    """
    if min(m, n, l) < 1:
        raise InputError(f"dimensions must be >= 1, got ({m}, {n}, {l})")
    if n < max(m, l):
        raise InputError(f"lemma requires n >= max(m, l), got n={n}, "
                         f"max(m, l)={max(m, l)}")

    def trial(i: int) -> bool:
        rng = linalg.seeded_rng(seed, i)
        a = linalg.random_matrix(m, n, dist, rng)
        b = linalg.random_matrix(n, l, dist, rng)
        return linalg.numeric_rank(a @ b, tol) == min(m, l)

    passes = _run_trials(trial, trials, workers)
    return LemmaTrialReport(trials=trials, passes=passes, dims=(m, n, l))


def monte_carlo_lemma2(M: int, N: int, trials: int, seed: int,
                       p_source: str = "random",
                       dist: str = "complex-gaussian",
                       tol: Tolerance = Tolerance(),
                       workers: int | None = 1) -> LemmaTrialReport:
    """Check dim null(P H) = dim(ran(H) ∩ null(P)) for tall full-rank H.

    H is N x M with N > M and rank M; P is M x N, either generic or an
    alignment plane constructed by the null-space scheme (which makes both
    sides equal beta = N - M instead of the generic zero).
    """
    if min(M, N) < 1:
        raise InputError(f"dimensions must be >= 1, got ({M}, {N})")
    if N <= M:
        raise InputError(f"lemma requires N > M, got M={M}, N={N}")
    if p_source not in ("random", "nsia"):
        raise InputError(f"p_source must be 'random' or 'nsia', got {p_source!r}")
    if p_source == "nsia":
        beta = N - M
        if M % beta != 0:
            raise InputError(
                f"nsia-constructed P needs (N - M) | M so that K = M/(N-M) "
                f"is an integer, got M={M}, N={N}")
        users = M // beta

    def trial(i: int) -> bool:
        rng = linalg.seeded_rng(seed, i)
        if p_source == "random":
            h = linalg.random_matrix(N, M, dist, rng)
            while linalg.numeric_rank(h, tol) < M:
                h = linalg.random_matrix(N, M, dist, rng)
            p = linalg.random_matrix(M, N, dist, rng)
        else:
            sub_seed = int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
            cfg = NetworkConfig(L=2, K=users, M=M, N=N, beta=beta,
                                seed=sub_seed, dist=dist, tol=tol)
            cs = generate_channels(cfg)
            projectors, _ = build_nsia(cs, beta)
            p = projectors.projector(1)
            h = cs.channel(1, 2, 1)
        scale = np.linalg.norm(p) * np.linalg.norm(h)
        lhs = linalg.null_space_basis(p @ h, tol, scale=scale).dim
        rhs = linalg.intersection_dim(linalg.range_basis(h, tol),
                                      linalg.null_space_basis(p, tol), tol)
        return lhs == rhs

    passes = _run_trials(trial, trials, workers)
    return LemmaTrialReport(trials=trials, passes=passes, dims=(M, N))

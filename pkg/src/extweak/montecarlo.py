"""Photon-counting emulation of the post-selected which-path measurement.

Each photon is first accepted by the H polarizers with probability
``p_postselect`` and, if accepted, lands on port b1 with probability
``p_b1``.  Photons are processed in fixed-size chunks, each with its own
child stream spawned from ``numpy.random.SeedSequence(seed)``; the chunk
layout never depends on the worker count, so results are bit-identical for
any degree of parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .optics import InterferometerConfig, PostSelectionError, run_pipeline
from .theory import zeta_at, fluctuation_from_zeta, diff_from_zeta, pipeline_sign

CHUNK = 1 << 16


@dataclass(frozen=True)
class ShotConfig:
    n_photons: int
    seed: int
    cfg: InterferometerConfig

    def __post_init__(self):
        if self.n_photons < 1:
            raise ValueError("n_photons must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class CountResult:
    n_photons: int
    n_postselected: int
    n_b1: int
    n_b2: int
    estimate: float | None  # None when nothing survived post-selection
    stderr: float | None
    seed: int

    @property
    def defined(self) -> bool:
        return self.estimate is not None


def port_probabilities(cfg: InterferometerConfig) -> tuple[float, float]:
    """``(p_postselect, p_b1)``; a vanishing post-selection gives ``(0, 0)``."""
    try:
        out = run_pipeline(cfg)
    except PostSelectionError:
        return 0.0, 0.0
    return out.p_postselect, out.p_b1


def _count_chunk(args) -> tuple[int, int]:
    seed_seq, m, p_ps, p_b1 = args
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    accepted = int(np.count_nonzero(rng.random(m) < p_ps))
    n_b1 = int(np.count_nonzero(rng.random(accepted) < p_b1))
    return accepted, n_b1


def tally(n_photons: int, seed: int, p_ps: float, p_b1: float, workers: int = 1) -> CountResult:
    n_chunks = -(-n_photons // CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(CHUNK, n_photons - i * CHUNK) for i in range(n_chunks)]
    jobs = [(c, m, p_ps, p_b1) for c, m in zip(children, sizes)]
    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_count_chunk, jobs))
    else:
        parts = [_count_chunk(j) for j in jobs]
    n_ps = sum(p[0] for p in parts)
    n_b1 = sum(p[1] for p in parts)
    n_b2 = n_ps - n_b1
    if n_ps == 0:
        return CountResult(n_photons, 0, 0, 0, None, None, seed)
    est = (n_b1 - n_b2) / n_ps
    stderr = math.sqrt(max(1.0 - est * est, 0.0) / n_ps)
    return CountResult(n_photons, n_ps, n_b1, n_b2, est, stderr, seed)


def simulate_counts(sc: ShotConfig, workers: int = 1) -> CountResult:
    p_ps, p_b1 = port_probabilities(sc.cfg)
    return tally(sc.n_photons, sc.seed, p_ps, p_b1, workers)


def trial_seeds(seed: int, n_trials: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n_trials, dtype=np.uint64)]


@dataclass(frozen=True)
class ShotNoiseReport:
    phi: float
    theta: float
    n_photons: int
    n_trials: int
    true_diff: float
    mean_estimate: float
    mean_n_postselected: float
    empirical_std: float
    predicted_fluctuation: float
    predicted_std: float
    degenerate: bool
    relative_error: float | None
    passed: bool

    @property
    def empirical_fluctuation(self) -> float:
        """Empirical stddev rescaled by ``sqrt(mean n_postselected)``."""
        return self.empirical_std * math.sqrt(self.mean_n_postselected)


def shot_noise_validation(cfg: InterferometerConfig, n_photons: int, n_trials: int, seed: int,
                          workers: int = 1, rel_tol: float = 0.10,
                          degenerate_tol: float = 1e-6) -> ShotNoiseReport:
    """Compare the spread of the estimator over trials with ``Δ / sqrt(N_ps)``."""
    if n_trials < 30:
        raise ValueError("need at least 30 trials for a stddev comparison")
    p_ps, p_b1 = port_probabilities(cfg)
    seeds = trial_seeds(seed, n_trials)

    def one(s):
        return tally(n_photons, s, p_ps, p_b1)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    if any(not r.defined for r in results):
        raise PostSelectionError("a trial had no post-selected photons")

    est = np.array([r.estimate for r in results])
    mean_n = float(np.mean([r.n_postselected for r in results]))
    emp = float(np.std(est, ddof=1))

    phi, theta, interp = cfg.prep.phi, cfg.hwp.theta, cfg.hwp.interpretation
    z = zeta_at(phi, theta, interp)
    true_diff = cfg.visibility * pipeline_sign(interp) * diff_from_zeta(z)
    fl = math.sqrt(max(1.0 - true_diff**2, 0.0)) if cfg.visibility != 1.0 else fluctuation_from_zeta(z)
    pred = fl / math.sqrt(mean_n)
    degenerate = fl <= 1e-12
    if degenerate:
        rel, passed = None, emp <= degenerate_tol
    else:
        rel = abs(emp - pred) / pred
        passed = rel <= rel_tol
    return ShotNoiseReport(phi, theta, n_photons, n_trials, true_diff, float(np.mean(est)), mean_n,
                           emp, fl, pred, degenerate, rel, passed)

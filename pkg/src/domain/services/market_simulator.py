"""Single Event Market Simulator - Domain Services

Paired GBM price paths with and without carbon exposure. Each path draws its
transition time and its Gaussian noise from streams keyed by
(master_seed, path_index), so results do not depend on how paths are spread
over worker threads.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from src.domain.entities.arrival_process import ArrivalProcess
from src.domain.entities.market import McReport, MarketParams, PremiumApplication, SimulationPath
from src.domain.entities.premium_model import PremiumModel
from src.domain.exceptions import DomainError

_ARRIVAL_STREAM = 0
_NOISE_STREAM = 1
_CHUNK = 4096


def path_seed_sequence(master_seed: int, path_index: int, stream: int) -> np.random.SeedSequence:
    """Seed sequence of one stream of one path"""
    return np.random.SeedSequence(master_seed, spawn_key=(path_index, stream))


def arrival_seed(master_seed: int, path_index: int) -> int:
    """64-bit seed handed to the arrival sampler for a path"""
    state = path_seed_sequence(master_seed, path_index, _ARRIVAL_STREAM).generate_state(1, dtype=np.uint64)
    return int(state[0])


def _mean_and_se(values: np.ndarray) -> Tuple[float, float]:
    """Sample mean and its standard error with exactly rounded sums.

    Deviations are taken from the first value, so identical samples give
    that value back exactly with zero standard error.
    """
    n = len(values)
    reference = float(values[0])
    mean = reference + math.fsum(values - reference) / n
    variance = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(variance / n)


class MarketSimulator:
    """Monte Carlo oracle for the weak no-arbitrage identity"""

    def __init__(self, workers: int = 1, logger: Optional[logging.Logger] = None):
        if workers < 1:
            raise DomainError(f"workers must be at least 1, got {workers}")
        self.workers = workers
        self.logger = logger or logging.getLogger(__name__)

    def simulate_path(
        self,
        params: MarketParams,
        premium: PremiumModel,
        phi: float,
        arrival: ArrivalProcess,
        path_index: int,
    ) -> SimulationPath:
        """Simulate one risk-free path and its carbon-exposed twin"""
        if not (math.isfinite(phi) and phi >= 0):
            raise DomainError(f"phi must be nonnegative, got {phi}")
        if path_index < 0:
            raise DomainError(f"path_index must be nonnegative, got {path_index}")

        seed = arrival_seed(params.master_seed, path_index)
        tau = arrival.sample(seed).transition_time

        n = params.n_steps
        times = premium.t0 + params.dt * np.arange(n + 1, dtype=float)
        rng = np.random.Generator(np.random.Philox(path_seed_sequence(params.master_seed, path_index, _NOISE_STREAM)))
        shocks = rng.standard_normal(n)
        steps = (params.mu - 0.5 * params.sigma ** 2) * params.dt + params.sigma * math.sqrt(params.dt) * shocks
        log_path = np.concatenate([[0.0], np.cumsum(steps)])
        riskfree = params.s0 * np.exp(log_path)

        # the premium stops accruing once the transition has happened
        accrued = np.asarray(premium.cumulative(np.minimum(times, max(tau, premium.t0))), dtype=float)
        if params.premium_application is PremiumApplication.ADDITIVE:
            carbon = riskfree + accrued
        else:
            carbon = params.s0 * np.exp(log_path + accrued)

        hits = np.flatnonzero(times >= tau)
        step = int(hits[0]) if hits.size else None
        clamped = False
        if step is not None:
            if carbon[step] < phi and not params.clamp_at_zero:
                raise DomainError(
                    f"Path {path_index}: shock phi={phi:g} exceeds the carbon price "
                    f"{carbon[step]:.6g} at t={times[step]:g}; enable clamp_at_zero to floor prices"
                )
            carbon[step:] = carbon[step:] - phi
            if params.clamp_at_zero and np.any(carbon[step:] < 0):
                carbon[step:] = np.maximum(carbon[step:], 0.0)
                clamped = True
                self.logger.warning(f"Path {path_index}: post-shock carbon price clamped at zero")

        return SimulationPath(
            path_index=path_index,
            times=times,
            riskfree_price=riskfree,
            carbon_price=carbon,
            transition_time=tau,
            phi_applied=phi,
            arrival_seed=seed,
            transition_step=step,
            clamped=clamped,
        )

    def simulate_paths(
        self,
        params: MarketParams,
        premium: PremiumModel,
        phi: float,
        arrival: ArrivalProcess,
        n_paths: int,
    ) -> List[SimulationPath]:
        """Simulate paths 0..n_paths-1, returned in path order"""
        if n_paths < 1:
            raise DomainError(f"n_paths must be at least 1, got {n_paths}")
        indices = range(n_paths)
        if self.workers == 1:
            return [self.simulate_path(params, premium, phi, arrival, i) for i in indices]
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            return list(executor.map(lambda i: self.simulate_path(params, premium, phi, arrival, i), indices))

    def sample_transition_times(self, params: MarketParams, arrival: ArrivalProcess, n_paths: int) -> np.ndarray:
        """Transition time of every path, from the same streams simulate_path uses"""

        def chunk(start: int) -> np.ndarray:
            stop = min(start + _CHUNK, n_paths)
            return np.array([
                arrival.sample(arrival_seed(params.master_seed, i)).transition_time
                for i in range(start, stop)
            ])

        starts = range(0, n_paths, _CHUNK)
        if self.workers == 1:
            parts = [chunk(s) for s in starts]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                parts = list(executor.map(chunk, starts))
        return np.concatenate(parts) if parts else np.empty(0)

    def run_monte_carlo(
        self,
        params: MarketParams,
        premium: PremiumModel,
        phi: float,
        arrival: ArrivalProcess,
        n_paths: int,
    ) -> McReport:
        """Estimate E[A(tau)] and the expected loss over n_paths paths.

        Premium earned on a path is A(tau), exact given tau, including
        transitions beyond the horizon. Every path eventually loses phi.
        """
        if n_paths < 2:
            raise DomainError(f"n_paths must be at least 2, got {n_paths}")
        if not (math.isfinite(phi) and phi >= 0):
            raise DomainError(f"phi must be nonnegative, got {phi}")

        self.logger.info(f"Running {n_paths} Monte Carlo paths with {self.workers} worker(s)")
        taus = self.sample_transition_times(params, arrival, n_paths)
        earned = np.asarray(premium.cumulative(np.maximum(taus, premium.t0)), dtype=float)
        losses = np.full(n_paths, float(phi))

        mean_premium, se_premium = _mean_and_se(earned)
        mean_loss, se_loss = _mean_and_se(losses)
        in_horizon = int(np.count_nonzero(taus <= premium.t0 + params.horizon))

        report = McReport(
            n_paths=n_paths,
            mean_premium_earned=mean_premium,
            se_premium=se_premium,
            mean_loss=mean_loss,
            se_loss=se_loss,
            residual=mean_premium - mean_loss,
            fraction_transitioned_in_horizon=in_horizon / n_paths,
        )
        self.logger.info(
            f"Monte Carlo: E[A]={report.mean_premium_earned:.6g} (se {report.se_premium:.2e}), "
            f"loss={report.mean_loss:.6g}, residual={report.residual:.3e}"
        )
        return report

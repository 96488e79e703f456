"""Arrival Process Entity - Domain Layer

Probability law of the transition-event time. Parametric kinds describe the
elapsed time t - t0; PointMass and EmpiricalHistogram are stated in absolute
days. Every method accepts a float or a numpy array and answers in kind.
"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import ClassVar, Dict, Any, Tuple, Union

import numpy as np
from scipy import special

from src.domain.entities.numerics_settings import NumericsSettings
from src.domain.entities.quadrature_result import QuadratureResult
from src.domain.exceptions import DivergentExpectation, DomainError, TailUndefined
from src.domain.services import quadrature

ArrayLike = Union[float, np.ndarray]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_MASS_TOLERANCE = 1e-12


def _out(values: np.ndarray, like: ArrayLike) -> ArrayLike:
    """Return a float for scalar input, an array otherwise"""
    if np.ndim(like) == 0:
        return float(values)
    return values


def make_generator(seed: int) -> np.random.Generator:
    """Counter-based generator for a 64-bit seed"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


@dataclass(frozen=True)
class RiskProcessSample:
    """One realisation of the risk process: the day it switches to 1"""

    transition_time: float


@dataclass(frozen=True, kw_only=True)
class ArrivalProcess(ABC):
    """Density f(t) of the transition-event arrival on [t0, inf)"""

    t0: float = 0.0

    kind: ClassVar[str] = ""

    def __post_init__(self) -> None:
        if not math.isfinite(self.t0):
            raise DomainError(f"t0 must be finite, got {self.t0}")

    # -- primitives provided by each kind -------------------------------

    @abstractmethod
    def pdf(self, t: ArrayLike) -> ArrayLike:
        """Density at t (zero before t0)"""

    @abstractmethod
    def cdf(self, t: ArrayLike) -> ArrayLike:
        """Probability that the transition has happened by t"""

    @abstractmethod
    def survival(self, t: ArrayLike) -> ArrayLike:
        """Probability that the transition happens after t"""

    @abstractmethod
    def log_survival(self, t: ArrayLike) -> ArrayLike:
        """Natural log of survival, -inf where survival is zero"""

    def log_pdf(self, t: ArrayLike) -> ArrayLike:
        """Natural log of the density, -inf where the density is zero"""
        with np.errstate(divide='ignore'):
            return _out(np.log(np.asarray(self.pdf(t), dtype=float)), t)

    @abstractmethod
    def mean(self) -> float:
        """Expected arrival time E(t)"""

    @abstractmethod
    def ppf(self, u: ArrayLike) -> ArrayLike:
        """Inverse cdf, used for sampling"""

    @abstractmethod
    def truncation_point(self, cutoff: float) -> float:
        """A time T* with survival(T*) <= cutoff"""

    @abstractmethod
    def tail_decay_rate(self) -> float:
        """Largest r with survival(t) = O(exp(-r t)); inf for bounded or faster tails"""

    @abstractmethod
    def parameters(self) -> Dict[str, Any]:
        """Kind-specific parameters for serialization"""

    # -- shared behaviour ------------------------------------------------

    def breakpoints(self) -> Tuple[float, ...]:
        """Points where the density may jump"""
        return ()

    def has_density(self) -> bool:
        return True

    def hazard(self, t: float, hazard_floor: float = NumericsSettings().hazard_floor) -> float:
        """Instantaneous transition intensity pdf(t) / survival(t)"""
        t = float(t)
        s = self.survival(t)
        if s <= hazard_floor:
            raise TailUndefined(
                f"survival({t:g}) = {s:.3e} is at or below the hazard floor {hazard_floor:.1e}",
                t=t,
            )
        return self._hazard(t, s)

    def _hazard(self, t: float, s: float) -> float:
        return float(self.pdf(t)) / s

    def probability_between(self, t_a: float, t_b: float) -> float:
        """Probability that the transition falls inside (t_a, t_b)"""
        if t_a > t_b:
            raise DomainError(f"Interval bounds must satisfy tA <= tB, got ({t_a}, {t_b})")
        if t_a < self.t0:
            raise DomainError(f"Interval start {t_a} precedes the origin t0={self.t0}")
        if t_a == t_b:
            return 0.0
        if math.isinf(t_b):
            return float(self.survival(t_a))
        if self.cdf(t_a) > 0.5:
            value = self.survival(t_a) - self.survival(t_b)
        else:
            value = self.cdf(t_b) - self.cdf(t_a)
        return float(min(max(value, 0.0), 1.0))

    def conditional_mean_after(self, t_prime: float, settings: NumericsSettings = NumericsSettings()) -> float:
        """E(t | t > t') = t' + (integral of survival beyond t') / survival(t')"""
        return self.conditional_mean_result(t_prime, settings).value

    def conditional_mean_result(
        self, t_prime: float, settings: NumericsSettings = NumericsSettings()
    ) -> QuadratureResult:
        """Conditional mean together with its quadrature error estimate"""
        t_prime = float(t_prime)
        s = float(self.survival(t_prime))
        if s <= settings.hazard_floor:
            raise TailUndefined(
                f"survival({t_prime:g}) = {s:.3e} is at or below the hazard floor "
                f"{settings.hazard_floor:.1e}; the conditional mean is undefined",
                t=t_prime,
            )
        start = max(t_prime, self.t0)
        upper = self.truncation_point(max(settings.tail_cutoff * s, 5e-324))
        excess = quadrature.integrate_to_tail(
            self.survival,
            start,
            upper,
            rel_tol=settings.rel_tol,
            tail_cutoff=settings.tail_cutoff,
            max_evaluations=settings.max_evaluations,
            breakpoints=self.breakpoints(),
        )
        return QuadratureResult(
            value=start + excess.value / s,
            abs_error_estimate=excess.abs_error_estimate / s,
            evaluations=excess.evaluations,
        )

    def finite_mean(self) -> float:
        """Mean, rejecting configurations whose expected arrival is infinite"""
        value = self.mean()
        if not math.isfinite(value):
            raise DivergentExpectation(
                f"{self.kind} arrival with {self.parameters()} has an infinite mean"
            )
        return value

    def sample(self, rng_seed: int) -> RiskProcessSample:
        """Draw one transition time by inversion"""
        return RiskProcessSample(transition_time=float(self.sample_many(rng_seed, 1)[0]))

    def sample_many(self, rng_seed: int, n: int) -> np.ndarray:
        """Draw n transition times by inversion from a single seeded stream"""
        u = make_generator(rng_seed).random(int(n))
        return np.asarray(self.ppf(u), dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        """Serialize in the scenario-file format"""
        data: Dict[str, Any] = {'kind': self.kind}
        data.update(self.parameters())
        data['t0_days'] = self.t0
        return data

    def _elapsed(self, t: ArrayLike) -> np.ndarray:
        return np.asarray(t, dtype=float) - self.t0


@dataclass(frozen=True, kw_only=True)
class ExponentialArrival(ArrivalProcess):
    """Memoryless arrival with constant hazard 1/scale"""

    scale: float

    kind: ClassVar[str] = "exponential"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise DomainError(f"Exponential scale must be positive, got {self.scale}")

    def pdf(self, t: ArrayLike) -> ArrayLike:
        x = self._elapsed(t)
        values = np.where(x >= 0, np.exp(-np.maximum(x, 0.0) / self.scale) / self.scale, 0.0)
        return _out(values, t)

    def log_pdf(self, t: ArrayLike) -> ArrayLike:
        x = self._elapsed(t)
        values = np.where(x >= 0, -np.maximum(x, 0.0) / self.scale - math.log(self.scale), -np.inf)
        return _out(values, t)

    def cdf(self, t: ArrayLike) -> ArrayLike:
        x = np.maximum(self._elapsed(t), 0.0)
        return _out(-np.expm1(-x / self.scale), t)

    def survival(self, t: ArrayLike) -> ArrayLike:
        x = np.maximum(self._elapsed(t), 0.0)
        return _out(np.exp(-x / self.scale), t)

    def log_survival(self, t: ArrayLike) -> ArrayLike:
        x = np.maximum(self._elapsed(t), 0.0)
        return _out(-x / self.scale, t)

    def _hazard(self, t: float, s: float) -> float:
        return 0.0 if t < self.t0 else 1.0 / self.scale

    def mean(self) -> float:
        return self.t0 + self.scale

    def conditional_mean_result(
        self, t_prime: float, settings: NumericsSettings = NumericsSettings()
    ) -> QuadratureResult:
        s = float(self.survival(t_prime))
        if s <= settings.hazard_floor:
            raise TailUndefined(
                f"survival({t_prime:g}) = {s:.3e} is at or below the hazard floor", t=float(t_prime)
            )
        return QuadratureResult(max(float(t_prime), self.t0) + self.scale, 0.0, 1)

    def ppf(self, u: ArrayLike) -> ArrayLike:
        return _out(self.t0 - self.scale * np.log1p(-np.asarray(u, dtype=float)), u)

    def truncation_point(self, cutoff: float) -> float:
        return self.t0 + self.scale * math.log(1.0 / cutoff)

    def tail_decay_rate(self) -> float:
        return 1.0 / self.scale

    def parameters(self) -> Dict[str, Any]:
        return {'scale_days': self.scale}


@dataclass(frozen=True, kw_only=True)
class WeibullArrival(ArrivalProcess):
    """Weibull arrival; shape > 1 gives an increasing hazard"""

    shape: float
    scale: float

    kind: ClassVar[str] = "weibull"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not (math.isfinite(self.shape) and self.shape > 0):
            raise DomainError(f"Weibull shape must be positive, got {self.shape}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise DomainError(f"Weibull scale must be positive, got {self.scale}")

    def _z(self, t: ArrayLike) -> np.ndarray:
        x = np.maximum(self._elapsed(t), 0.0)
        return (x / self.scale) ** self.shape

    def pdf(self, t: ArrayLike) -> ArrayLike:
        x = self._elapsed(t)
        ratio = np.maximum(x, 0.0) / self.scale
        with np.errstate(divide='ignore'):
            body = (self.shape / self.scale) * ratio ** (self.shape - 1.0) * np.exp(-ratio ** self.shape)
        return _out(np.where(x >= 0, body, 0.0), t)

    def log_pdf(self, t: ArrayLike) -> ArrayLike:
        x = self._elapsed(t)
        ratio = np.maximum(x, 0.0) / self.scale
        positive = ratio > 0
        safe = np.where(positive, ratio, 1.0)
        body = math.log(self.shape / self.scale) + (self.shape - 1.0) * np.log(safe) - safe ** self.shape
        origin = float(self.pdf(self.t0))
        at_origin = math.log(origin) if origin > 0 else -math.inf
        return _out(np.where(positive, body, np.where(x == 0, at_origin, -np.inf)), t)

    def cdf(self, t: ArrayLike) -> ArrayLike:
        return _out(-np.expm1(-self._z(t)), t)

    def survival(self, t: ArrayLike) -> ArrayLike:
        return _out(np.exp(-self._z(t)), t)

    def log_survival(self, t: ArrayLike) -> ArrayLike:
        return _out(-self._z(t), t)

    def _hazard(self, t: float, s: float) -> float:
        x = t - self.t0
        if x < 0:
            return 0.0
        with np.errstate(divide='ignore'):
            return float((self.shape / self.scale) * np.float64(x / self.scale) ** (self.shape - 1.0))

    def mean(self) -> float:
        return self.t0 + self.scale * float(special.gamma(1.0 + 1.0 / self.shape))

    def ppf(self, u: ArrayLike) -> ArrayLike:
        u = np.asarray(u, dtype=float)
        return _out(self.t0 + self.scale * (-np.log1p(-u)) ** (1.0 / self.shape), u)

    def truncation_point(self, cutoff: float) -> float:
        return self.t0 + self.scale * math.log(1.0 / cutoff) ** (1.0 / self.shape)

    def tail_decay_rate(self) -> float:
        if self.shape > 1.0:
            return math.inf
        if self.shape == 1.0:
            return 1.0 / self.scale
        return 0.0

    def parameters(self) -> Dict[str, Any]:
        return {'shape': self.shape, 'scale_days': self.scale}


@dataclass(frozen=True, kw_only=True)
class LogNormalArrival(ArrivalProcess):
    """log(t - t0) is normal with the given mean and standard deviation"""

    log_mean: float
    log_sd: float

    kind: ClassVar[str] = "lognormal"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not math.isfinite(self.log_mean):
            raise DomainError(f"LogNormal log_mean must be finite, got {self.log_mean}")
        if not (math.isfinite(self.log_sd) and self.log_sd > 0):
            raise DomainError(f"LogNormal log_sd must be positive, got {self.log_sd}")

    def _z(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(divide='ignore'):
            return (np.log(np.maximum(x, 0.0)) - self.log_mean) / self.log_sd

    def pdf(self, t: ArrayLike) -> ArrayLike:
        x = self._elapsed(t)
        positive = x > 0
        safe = np.where(positive, x, 1.0)
        z = self._z(safe)
        body = np.exp(-0.5 * z * z) / (safe * self.log_sd * _SQRT_2PI)
        return _out(np.where(positive, body, 0.0), t)

    def log_pdf(self, t: ArrayLike) -> ArrayLike:
        x = self._elapsed(t)
        positive = x > 0
        safe = np.where(positive, x, 1.0)
        z = self._z(safe)
        body = -0.5 * z * z - np.log(safe * self.log_sd * _SQRT_2PI)
        return _out(np.where(positive, body, -np.inf), t)

    def cdf(self, t: ArrayLike) -> ArrayLike:
        return _out(special.ndtr(self._z(self._elapsed(t))), t)

    def survival(self, t: ArrayLike) -> ArrayLike:
        return _out(special.ndtr(-self._z(self._elapsed(t))), t)

    def log_survival(self, t: ArrayLike) -> ArrayLike:
        return _out(special.log_ndtr(-self._z(self._elapsed(t))), t)

    def _hazard(self, t: float, s: float) -> float:
        x = t - self.t0
        if x <= 0:
            return 0.0
        z = (math.log(x) - self.log_mean) / self.log_sd
        log_pdf = -0.5 * z * z - math.log(x * self.log_sd * _SQRT_2PI)
        return math.exp(log_pdf - float(special.log_ndtr(-z)))

    def mean(self) -> float:
        exponent = self.log_mean + 0.5 * self.log_sd ** 2
        return self.t0 + (math.exp(exponent) if exponent < 709.0 else math.inf)

    def ppf(self, u: ArrayLike) -> ArrayLike:
        u = np.asarray(u, dtype=float)
        return _out(self.t0 + np.exp(self.log_mean + self.log_sd * special.ndtri(u)), u)

    def truncation_point(self, cutoff: float) -> float:
        return self.t0 + math.exp(self.log_mean - self.log_sd * float(special.ndtri(cutoff)))

    def tail_decay_rate(self) -> float:
        return 0.0

    def parameters(self) -> Dict[str, Any]:
        return {'log_mean': self.log_mean, 'log_sd': self.log_sd}


@dataclass(frozen=True, kw_only=True)
class PointMassArrival(ArrivalProcess):
    """Deterministic transition at event_time; handled with exact atom arithmetic"""

    event_time: float

    kind: ClassVar[str] = "point_mass"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not math.isfinite(self.event_time):
            raise DomainError(f"event_time must be finite, got {self.event_time}")
        if self.event_time < self.t0:
            raise DomainError(f"event_time {self.event_time} precedes t0={self.t0}")

    def has_density(self) -> bool:
        return False

    def pdf(self, t: ArrayLike) -> ArrayLike:
        return _out(np.zeros_like(np.asarray(t, dtype=float)), t)

    def cdf(self, t: ArrayLike) -> ArrayLike:
        return _out(np.where(np.asarray(t, dtype=float) >= self.event_time, 1.0, 0.0), t)

    def survival(self, t: ArrayLike) -> ArrayLike:
        return _out(np.where(np.asarray(t, dtype=float) >= self.event_time, 0.0, 1.0), t)

    def log_survival(self, t: ArrayLike) -> ArrayLike:
        return _out(np.where(np.asarray(t, dtype=float) >= self.event_time, -np.inf, 0.0), t)

    def _hazard(self, t: float, s: float) -> float:
        return 0.0

    def mean(self) -> float:
        return self.event_time

    def conditional_mean_result(
        self, t_prime: float, settings: NumericsSettings = NumericsSettings()
    ) -> QuadratureResult:
        if t_prime >= self.event_time:
            raise TailUndefined(
                f"No transition can occur after t={t_prime:g}: the atom sits at {self.event_time:g}",
                t=float(t_prime),
            )
        return QuadratureResult(self.event_time, 0.0, 1)

    def ppf(self, u: ArrayLike) -> ArrayLike:
        return _out(np.full(np.shape(u), self.event_time, dtype=float), u)

    def truncation_point(self, cutoff: float) -> float:
        return self.event_time

    def tail_decay_rate(self) -> float:
        return math.inf

    def parameters(self) -> Dict[str, Any]:
        return {'event_time_days': self.event_time}


@dataclass(frozen=True, kw_only=True)
class HistogramArrival(ArrivalProcess):
    """Piecewise-constant density over absolute bin edges"""

    bin_edges: Tuple[float, ...]
    masses: Tuple[float, ...]

    _cumulative: np.ndarray = field(init=False, repr=False, compare=False)
    _tail: np.ndarray = field(init=False, repr=False, compare=False)

    kind: ClassVar[str] = "histogram"

    def __post_init__(self) -> None:
        super().__post_init__()
        edges = np.asarray(self.bin_edges, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise DomainError("Histogram needs at least two bin edges")
        if masses.size != edges.size - 1:
            raise DomainError(
                f"Histogram has {edges.size} edges but {masses.size} masses; expected {edges.size - 1}"
            )
        if not (np.all(np.isfinite(edges)) and np.all(np.isfinite(masses))):
            raise DomainError("Histogram edges and masses must be finite")
        if np.any(np.diff(edges) <= 0):
            raise DomainError("Histogram bin edges must be strictly increasing")
        if edges[0] < self.t0:
            raise DomainError(f"First bin edge {edges[0]} precedes t0={self.t0}")
        if np.any(masses < 0):
            raise DomainError("Histogram masses must be nonnegative")
        if abs(math.fsum(masses) - 1.0) > _MASS_TOLERANCE:
            raise DomainError(f"Histogram masses sum to {math.fsum(masses)!r}, expected 1")

        object.__setattr__(self, 'bin_edges', tuple(float(e) for e in edges))
        object.__setattr__(self, 'masses', tuple(float(m) for m in masses))
        cumulative = np.concatenate([[0.0], np.cumsum(masses)])
        tail = np.concatenate([np.cumsum(masses[::-1])[::-1], [0.0]])
        object.__setattr__(self, '_cumulative', cumulative)
        object.__setattr__(self, '_tail', tail)

    def _locate(self, t: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        edges = np.asarray(self.bin_edges)
        t_arr = np.asarray(t, dtype=float)
        index = np.searchsorted(edges, t_arr, side='right') - 1
        inside = (index >= 0) & (index < len(self.masses))
        safe = np.clip(index, 0, len(self.masses) - 1)
        return t_arr, safe, inside, edges

    def breakpoints(self) -> Tuple[float, ...]:
        return self.bin_edges

    def pdf(self, t: ArrayLike) -> ArrayLike:
        t_arr, index, inside, edges = self._locate(t)
        masses = np.asarray(self.masses)
        density = masses[index] / (edges[index + 1] - edges[index])
        return _out(np.where(inside, density, 0.0), t)

    def cdf(self, t: ArrayLike) -> ArrayLike:
        t_arr, index, inside, edges = self._locate(t)
        masses = np.asarray(self.masses)
        width = edges[index + 1] - edges[index]
        within = self._cumulative[index] + masses[index] * (t_arr - edges[index]) / width
        values = np.where(t_arr < edges[0], 0.0, np.where(inside, within, 1.0))
        return _out(np.clip(values, 0.0, 1.0), t)

    def survival(self, t: ArrayLike) -> ArrayLike:
        t_arr, index, inside, edges = self._locate(t)
        masses = np.asarray(self.masses)
        width = edges[index + 1] - edges[index]
        within = self._tail[index + 1] + masses[index] * (edges[index + 1] - t_arr) / width
        values = np.where(t_arr <= edges[0], 1.0, np.where(inside, within, 0.0))
        return _out(np.clip(values, 0.0, 1.0), t)

    def log_survival(self, t: ArrayLike) -> ArrayLike:
        s = np.asarray(self.survival(t), dtype=float)
        with np.errstate(divide='ignore'):
            return _out(np.log(s), t)

    def mean(self) -> float:
        edges = np.asarray(self.bin_edges)
        midpoints = 0.5 * (edges[:-1] + edges[1:])
        return math.fsum(np.asarray(self.masses) * midpoints)

    def ppf(self, u: ArrayLike) -> ArrayLike:
        u_arr = np.asarray(u, dtype=float)
        edges = np.asarray(self.bin_edges)
        masses = np.asarray(self.masses)
        index = np.clip(np.searchsorted(self._cumulative, u_arr, side='right') - 1, 0, len(masses) - 1)
        mass = masses[index]
        safe_mass = np.where(mass > 0, mass, 1.0)
        fraction = np.where(mass > 0, (u_arr - self._cumulative[index]) / safe_mass, 0.0)
        values = edges[index] + np.clip(fraction, 0.0, 1.0) * (edges[index + 1] - edges[index])
        return _out(values, u)

    def truncation_point(self, cutoff: float) -> float:
        return self.bin_edges[-1]

    def tail_decay_rate(self) -> float:
        return math.inf

    def parameters(self) -> Dict[str, Any]:
        return {'bin_edges_days': list(self.bin_edges), 'masses': list(self.masses)}

"""Chaotic 1D maps and coupled master-slave time-series generators.

Two map families (skew tent, logistic) and two coupled systems built on
them, plus a coupled autoregressive pair with additive gaussian noise.
The slave mixes its own dynamics (weight 1 - eta) with the master's
previous state (weight eta); eta = 0 decouples the pair, eta = 1 turns
the slave into a one-step-delayed copy of the master.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    # One independent stream per (base seed, trial index) so trials can be
    # regenerated individually and in any order.
    return np.random.default_rng([seed, trial])


def skew_tent_step(x: float, b: float) -> float:
    """One iteration of the skew tent map with skewness b.

    Rises linearly as x/b on [0, b), falls as (1-x)/(1-b) on [b, 1].
    The boundary x = b takes the falling branch.
    """
    if not 0.0 < b < 1.0:
        raise ValueError(f"skewness b must lie in (0, 1), got {b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"state x must lie in [0, 1], got {x}")
    if x < b:
        return x / b
    return (1.0 - x) / (1.0 - b)


def logistic_step(x: float, a: float) -> float:
    """One iteration of the logistic map x -> a*x*(1-x)."""
    if not 0.0 < a <= 4.0:
        raise ValueError(f"logistic parameter must lie in (0, 4], got {a}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"state x must lie in [0, 1], got {x}")
    return a * x * (1.0 - x)


def _tent_vec(x: np.ndarray, b: float) -> np.ndarray:
    return np.where(x < b, x / b, (1.0 - x) / (1.0 - b))


def _logistic_vec(x: np.ndarray, a: float) -> np.ndarray:
    return a * x * (1.0 - x)


@dataclass(frozen=True)
class MapSpec:
    """A 1D map choice: kind 'tent' (param = skewness b) or 'logistic' (param = growth rate A)."""

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in ("tent", "logistic"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind == "tent" and not 0.0 < self.param < 1.0:
            raise ValueError(f"tent skewness must lie in (0, 1), got {self.param}")
        if self.kind == "logistic" and not 0.0 < self.param <= 4.0:
            raise ValueError(f"logistic parameter must lie in (0, 4], got {self.param}")

    def step(self, x: float) -> float:
        if self.kind == "tent":
            return skew_tent_step(x, self.param)
        return logistic_step(x, self.param)

    def step_vec(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "tent":
            return _tent_vec(x, self.param)
        return _logistic_vec(x, self.param)


@dataclass(frozen=True)
class CoupledMapConfig:
    """Master-slave coupled 1D chaotic maps."""

    master_map: MapSpec
    slave_map: MapSpec
    eta: float
    length: int = 2000
    transient: int = 500
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"coupling eta must lie in [0, 1], got {self.eta}")
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.transient < 0:
            raise ValueError("transient must be >= 0")

    def tag(self) -> dict:
        return {
            "system": "coupled_map",
            "master": (self.master_map.kind, self.master_map.param),
            "slave": (self.slave_map.kind, self.slave_map.param),
            "eta": self.eta,
            "length": self.length,
            "transient": self.transient,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class CoupledArConfig:
    """Master-slave coupled AR(1) pair with additive gaussian noise.

    master: M(t) = a1*M(t-1) + gamma*r(t)
    slave:  S(t) = a2*S(t-1) + eta*M(t-1) + gamma*r(t)
    with r(t) i.i.d. standard normal, drawn independently per series.
    """

    a1: float = 0.8
    a2: float = 0.9
    gamma: float = 0.03
    eta: float = 0.0
    length: int = 2000
    transient: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError("noise intensity gamma must be >= 0")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"coupling eta must lie in [0, 1], got {self.eta}")
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.transient < 0:
            raise ValueError("transient must be >= 0")

    def tag(self) -> dict:
        return {
            "system": "coupled_ar",
            "a1": self.a1,
            "a2": self.a2,
            "gamma": self.gamma,
            "eta": self.eta,
            "length": self.length,
            "transient": self.transient,
            "seed": self.seed,
        }


@dataclass
class TimeSeriesPair:
    """One (master, slave) trial: the cause series and the driven series."""

    master: np.ndarray
    slave: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.master = np.asarray(self.master, dtype=float)
        self.slave = np.asarray(self.slave, dtype=float)
        if self.master.shape != self.slave.shape or self.master.ndim != 1:
            raise ValueError("master and slave must be 1D arrays of identical length")

    def __len__(self) -> int:
        return self.master.size


def generate_coupled_map_trials(
    config: CoupledMapConfig, n_trials: int
) -> tuple[np.ndarray, np.ndarray]:
    """Generate n_trials coupled-map pairs as (n_trials, length) arrays.

    Trial i uses the RNG stream (config.seed, i) for its initial values,
    so the batch is sample-for-sample identical to n_trials calls of
    generate_coupled_map_pair with trial=i.
    """
    total = config.length + config.transient
    m = np.empty((total, n_trials))
    s = np.empty((total, n_trials))
    for i in range(n_trials):
        rng = _trial_rng(config.seed, i)
        m[0, i] = rng.uniform()
        s[0, i] = rng.uniform()
    eta = config.eta
    for t in range(1, total):
        m[t] = config.master_map.step_vec(m[t - 1])
        # Convex combination of values in [0, 1]; clip guards the invariant
        # against sub-ulp rounding excursions only.
        s[t] = np.clip(
            (1.0 - eta) * config.slave_map.step_vec(s[t - 1]) + eta * m[t - 1],
            0.0,
            1.0,
        )
    keep = slice(config.transient, None)
    return m[keep].T.copy(), s[keep].T.copy()


def generate_coupled_map_pair(config: CoupledMapConfig, trial: int = 0) -> TimeSeriesPair:
    """Generate one master-slave coupled map trial.

    Iterates M(n) = T1(M(n-1)) and S(n) = (1-eta)*T2(S(n-1)) + eta*M(n-1)
    from random initial values in (0, 1), discards the transient, and keeps
    `length` samples per series. Deterministic given (seed, trial).
    """
    rng = _trial_rng(config.seed, trial)
    total = config.length + config.transient
    m = np.empty(total)
    s = np.empty(total)
    m[0] = rng.uniform()
    s[0] = rng.uniform()
    eta = config.eta
    for t in range(1, total):
        m[t] = config.master_map.step(m[t - 1])
        nxt = (1.0 - eta) * config.slave_map.step(s[t - 1]) + eta * m[t - 1]
        s[t] = min(max(nxt, 0.0), 1.0)
    meta = config.tag()
    meta["trial"] = trial
    return TimeSeriesPair(m[config.transient :], s[config.transient :], meta)


def generate_coupled_ar_trials(
    config: CoupledArConfig, n_trials: int
) -> tuple[np.ndarray, np.ndarray]:
    """Generate n_trials coupled-AR pairs as (n_trials, length) arrays.

    Per-trial RNG streams match generate_coupled_ar_pair exactly.
    """
    total = config.length + config.transient
    m = np.empty((total, n_trials))
    s = np.empty((total, n_trials))
    noise = np.empty((total - 1, 2, n_trials)) if total > 1 else None
    for i in range(n_trials):
        rng = _trial_rng(config.seed, i)
        m[0, i] = rng.uniform()
        s[0, i] = rng.uniform()
        if total > 1:
            noise[:, :, i] = rng.standard_normal((total - 1, 2))
    for t in range(1, total):
        m[t] = config.a1 * m[t - 1] + config.gamma * noise[t - 1, 0]
        s[t] = config.a2 * s[t - 1] + config.eta * m[t - 1] + config.gamma * noise[t - 1, 1]
    keep = slice(config.transient, None)
    return m[keep].T.copy(), s[keep].T.copy()


def generate_coupled_ar_pair(config: CoupledArConfig, trial: int = 0) -> TimeSeriesPair:
    """Generate one coupled-AR trial; see CoupledArConfig for the recursions.

    Initial values are uniform on (0, 1); the transient washes them out.
    Master and slave noise terms are independent draws.
    """
    rng = _trial_rng(config.seed, trial)
    total = config.length + config.transient
    m = np.empty(total)
    s = np.empty(total)
    m[0] = rng.uniform()
    s[0] = rng.uniform()
    noise = rng.standard_normal((total - 1, 2)) if total > 1 else np.empty((0, 2))
    for t in range(1, total):
        m[t] = config.a1 * m[t - 1] + config.gamma * noise[t - 1, 0]
        s[t] = config.a2 * s[t - 1] + config.eta * m[t - 1] + config.gamma * noise[t - 1, 1]
    meta = config.tag()
    meta["trial"] = trial
    return TimeSeriesPair(m[config.transient :], s[config.transient :], meta)


def synchronization_error(pair: TimeSeriesPair) -> float:
    """Mean absolute difference between master and slave; 0 means identical."""
    if len(pair) == 0:
        raise ValueError("cannot compute synchronization error of an empty pair")
    return float(np.mean(np.abs(pair.master - pair.slave)))


def lag_synchronization_error(pair: TimeSeriesPair, lag: int = 1) -> float:
    """Mean squared deviation of the slave from the lag-shifted master.

    At full coupling the slave reproduces the master delayed by one step
    (S(n) = M(n-1)), so the synchronization manifold of the driven pair is
    the delayed diagonal; this measures the mean squared distance from it.
    """
    if not 0 <= lag < len(pair):
        raise ValueError(f"lag must lie in [0, {len(pair)}), got {lag}")
    if len(pair) == 0:
        raise ValueError("cannot compute synchronization error of an empty pair")
    m = pair.master[: len(pair) - lag]
    s = pair.slave[lag:]
    e = s - m
    return float(np.mean(e * e))

"""Chaotic-neuron firing and per-stimulus feature extraction.

Each input value (stimulus) drives a neuron that iterates the skew tent
map from a fixed initial activity q until the orbit lands within epsilon
of the stimulus. Four features summarize the pre-recognition trace:
firing time N, firing rate R (fraction of samples at or above the
threshold b), energy E (sum of squared samples), and the Shannon entropy
H of the binary threshold symbols, in bits.

Because the orbit depends only on (q, b), all stimuli of a dataset share
one trajectory; batch transforms exploit this by computing first-passage
times into each stimulus's epsilon ball and reading features out of
prefix tables. fire_trace/extract_features remain the reference
per-stimulus path and the two are tested against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dynamics import skew_tent_step


@dataclass(frozen=True)
class NeurochaosConfig:
    """Neuron hyperparameters: initial activity q, threshold b, neighborhood epsilon."""

    q: float
    b: float = 0.499
    epsilon: float = 0.171
    max_iter: int = 10000

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"initial activity q must lie in (0, 1), got {self.q}")
        if not 0.0 < self.b < 1.0:
            raise ValueError(f"threshold b must lie in (0, 1), got {self.b}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class NeuralTrace:
    """Pre-recognition samples of one neuron; recognized=False means the cap was hit."""

    samples: np.ndarray
    recognized: bool

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class FeatureVector:
    firing_time: int
    firing_rate: float
    energy: float
    entropy: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.firing_time, self.firing_rate, self.energy, self.entropy], dtype=float
        )


@dataclass
class FeatureMatrix:
    """Per-stimulus features of one instance: row i = (N, R, E, H) of stimulus i.

    `recognized` flags stimuli whose trace hit the iteration cap instead of
    recognizing; their features cover the capped trace.
    """

    values: np.ndarray
    recognized: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.recognized = np.asarray(self.recognized, dtype=bool)
        if self.values.ndim != 2 or self.values.shape[1] != 4:
            raise ValueError("feature matrix must have shape (n_stimuli, 4)")
        if self.recognized.shape != (self.values.shape[0],):
            raise ValueError("recognized flags must match the row count")

    @property
    def flat(self) -> np.ndarray:
        """Stimulus-major flattening: (N1, R1, E1, H1, N2, R2, ...)."""
        return self.values.reshape(-1)

    def __len__(self) -> int:
        return self.values.shape[0]


def normalize_series(raw: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Affine map of raw values onto [0, 1], clamping anything outside [lo, hi].

    Use when fixed bounds (e.g. training-set statistics) should apply to
    every series identically.
    """
    if not hi > lo:
        raise ValueError(f"degenerate normalization range: lo={lo}, hi={hi}")
    x = (np.asarray(raw, dtype=float) - lo) / (hi - lo)
    return np.clip(x, 0.0, 1.0)


def normalize_instances(instances: np.ndarray) -> np.ndarray:
    """Min-max rescale each row to [0, 1] by its own range.

    This is the stock preparation before the neuron: each series fills the
    unit interval, so amplitude differences between series carry no signal
    and only the temporal structure remains. Constant rows have no usable
    range and are rejected.
    """
    x = np.asarray(instances, dtype=float)
    if x.ndim != 2:
        raise ValueError("expected a 2D array of instances")
    lo = x.min(axis=1, keepdims=True)
    hi = x.max(axis=1, keepdims=True)
    degenerate = np.flatnonzero((hi <= lo).ravel())
    if degenerate.size:
        raise ValueError(
            f"constant series cannot be normalized: rows {degenerate[:5].tolist()}"
        )
    return (x - lo) / (hi - lo)


@lru_cache(maxsize=32)
def _orbit_cached(q: float, b: float, max_iter: int) -> np.ndarray:
    y = np.empty(max_iter)
    y[0] = q
    for t in range(1, max_iter):
        y[t] = skew_tent_step(y[t - 1], b)
    y.setflags(write=False)
    return y


def chaotic_orbit(config: NeurochaosConfig) -> np.ndarray:
    """The shared neuron trajectory y(0..max_iter-1), y(0) = q (read-only view)."""
    return _orbit_cached(config.q, config.b, config.max_iter)


def first_passage_times(
    stimuli: np.ndarray, orbit: np.ndarray, epsilon: float
) -> np.ndarray:
    """First index t with |orbit[t] - s| < epsilon, per stimulus.

    Stimuli never recognized within the orbit get len(orbit). Windowed
    scan: nearly all stimuli resolve in the first few steps, so the full
    (n_stimuli x len(orbit)) comparison is never materialized.
    """
    s = np.asarray(stimuli, dtype=float).ravel()
    n_total = orbit.size
    out = np.full(s.size, n_total, dtype=np.int64)
    pending = np.arange(s.size)
    start = 0
    width = 16
    while pending.size and start < n_total:
        stop = min(start + width, n_total)
        hits = np.abs(s[pending, None] - orbit[None, start:stop]) < epsilon
        found = hits.any(axis=1)
        out[pending[found]] = start + hits[found].argmax(axis=1)
        pending = pending[~found]
        start = stop
        width *= 4
    return out


def fire_trace(stimulus: float, config: NeurochaosConfig) -> NeuralTrace:
    """Run one neuron on one stimulus and return its pre-recognition trace.

    The trace is y(0)..y(N-1) where N is the first time the orbit enters
    the epsilon ball around the stimulus; the recognizing sample itself is
    excluded, so immediate recognition yields an empty trace. If no sample
    within max_iter recognizes, the full capped trace is returned with
    recognized=False.
    """
    if not 0.0 <= stimulus <= 1.0:
        raise ValueError(f"stimulus must lie in [0, 1], got {stimulus}")
    orbit = chaotic_orbit(config)
    n = int(first_passage_times(np.array([stimulus]), orbit, config.epsilon)[0])
    if n >= config.max_iter:
        return NeuralTrace(orbit[: config.max_iter].copy(), recognized=False)
    return NeuralTrace(orbit[:n].copy(), recognized=True)


def extract_features(trace: NeuralTrace, config: NeurochaosConfig) -> FeatureVector:
    """Compute (N, R, E, H) from a neural trace; an empty trace maps to zeros."""
    y = trace.samples
    n = y.size
    if n == 0:
        return FeatureVector(0, 0.0, 0.0, 0.0)
    ones = int(np.count_nonzero(y >= config.b))
    rate = ones / n
    energy = float(np.sum(y * y))
    entropy = _binary_entropy(ones / n)
    return FeatureVector(n, rate, energy, entropy)


def _binary_entropy(p1: float) -> float:
    if p1 <= 0.0 or p1 >= 1.0:
        return 0.0
    p0 = 1.0 - p1
    return float(-(p0 * np.log2(p0) + p1 * np.log2(p1)))


@lru_cache(maxsize=32)
def _feature_tables(q: float, b: float, max_iter: int):
    # Prefix tables over the shared orbit: index N gives the features of
    # the length-N trace y(0..N-1).
    orbit = _orbit_cached(q, b, max_iter)
    ones = np.concatenate(([0], np.cumsum(orbit >= b))).astype(float)
    sumsq = np.concatenate(([0.0], np.cumsum(orbit * orbit)))
    counts = np.arange(max_iter + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        p1 = ones / counts
        p0 = 1.0 - p1
        h = -(np.where(p0 > 0, p0 * np.log2(np.where(p0 > 0, p0, 1.0)), 0.0)
              + np.where(p1 > 0, p1 * np.log2(np.where(p1 > 0, p1, 1.0)), 0.0))
        rate = np.where(counts > 0, p1, 0.0)
    h[0] = 0.0
    for table in (rate, sumsq, h):
        table.setflags(write=False)
    return rate, sumsq, h


def transform_instance(instance: np.ndarray, config: NeurochaosConfig) -> FeatureMatrix:
    """Map an instance of n stimuli in [0, 1] to its (n, 4) feature matrix."""
    x = np.asarray(instance, dtype=float).ravel()
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise ValueError("stimuli must lie in [0, 1]; normalize first")
    orbit = chaotic_orbit(config)
    n_fire = first_passage_times(x, orbit, config.epsilon)
    recognized = n_fire < config.max_iter
    n_eff = np.minimum(n_fire, config.max_iter)
    rate, sumsq, h = _feature_tables(config.q, config.b, config.max_iter)
    values = np.column_stack((n_eff.astype(float), rate[n_eff], sumsq[n_eff], h[n_eff]))
    return FeatureMatrix(values, recognized)


def transform_instances(
    instances: np.ndarray, config: NeurochaosConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Batch transform_instance: (m, n) stimuli -> (m, n, 4) features, (m, n) flags."""
    x = np.asarray(instances, dtype=float)
    if x.ndim != 2:
        raise ValueError("expected a 2D array of instances")
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise ValueError("stimuli must lie in [0, 1]; normalize first")
    orbit = chaotic_orbit(config)
    n_fire = first_passage_times(x.ravel(), orbit, config.epsilon).reshape(x.shape)
    recognized = n_fire < config.max_iter
    n_eff = np.minimum(n_fire, config.max_iter)
    rate, sumsq, h = _feature_tables(config.q, config.b, config.max_iter)
    features = np.stack(
        (n_eff.astype(float), rate[n_eff], sumsq[n_eff], h[n_eff]), axis=-1
    )
    return features, recognized

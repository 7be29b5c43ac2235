"""Experiment orchestration and reporting.

Everything the experiments need around the core algorithms: turning batches
of coupled-system trials into labeled train/test splits, sweeping the
coupling coefficient for either classifier, transfer evaluation on systems
the model never saw, directional causality sweeps on raw series or learned
features, ingestion of the prey-predator field data, and CSV export with a
JSON manifest so any run can be reproduced from its output directory.

Conventions: the master series is class 0 (cause), the slave class 1
(effect). Sweeps reseed per grid point as base_seed + eta_index so any
single row can be regenerated without rerunning the sweep.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .causality import CausalityReport, CccConfig, GcConfig, ccc, granger_f_statistic
from .chaosfex import NeurochaosConfig, normalize_instances, transform_instances
from .chaosnet import evaluate, fit
from .dynamics import (
    CoupledArConfig,
    CoupledMapConfig,
    MapSpec,
    TimeSeriesPair,
    generate_coupled_ar_trials,
    generate_coupled_map_trials,
)
from .mlp_baseline import MlpConfig, evaluate_mlp, hidden_activations, train_mlp

logger = logging.getLogger(__name__)

# Train counts per 1000 trials of each class; the remainder is the test set.
_TRAIN_PER_1000 = (801, 799)

PREY_PREDATOR_TRANSIENTS = 9


def tent_system(
    eta: float,
    b1: float = 0.65,
    b2: float = 0.47,
    length: int = 2000,
    transient: int = 500,
    seed: int = 0,
) -> CoupledMapConfig:
    """Skew-tent master-slave pair with the stock skewness parameters."""
    return CoupledMapConfig(
        MapSpec("tent", b1), MapSpec("tent", b2), eta, length, transient, seed
    )


def logistic_system(
    eta: float,
    a1: float = 4.0,
    a2: float = 3.82,
    length: int = 2000,
    transient: int = 500,
    seed: int = 0,
) -> CoupledMapConfig:
    return CoupledMapConfig(
        MapSpec("logistic", a1), MapSpec("logistic", a2), eta, length, transient, seed
    )


def ar_system(
    eta: float, length: int = 2000, transient: int = 500, seed: int = 0
) -> CoupledArConfig:
    return CoupledArConfig(eta=eta, length=length, transient=transient, seed=seed)


def generate_trials(
    system: CoupledMapConfig | CoupledArConfig, n_trials: int
) -> tuple[np.ndarray, np.ndarray]:
    """(masters, slaves) as (n_trials, length) arrays for either system kind."""
    if isinstance(system, CoupledArConfig):
        return generate_coupled_ar_trials(system, n_trials)
    return generate_coupled_map_trials(system, n_trials)


# ---------------------------------------------------------------------------
# Dataset splitting
# ---------------------------------------------------------------------------


@dataclass
class DatasetSplit:
    """Labeled train/test partition of the instances of a trial batch."""

    train_instances: np.ndarray
    train_labels: np.ndarray
    test_instances: np.ndarray
    test_labels: np.ndarray
    train_counts: tuple
    test_counts: tuple


def _trials_to_arrays(trials) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(trials, tuple) and len(trials) == 2:
        masters = np.asarray(trials[0], dtype=float)
        slaves = np.asarray(trials[1], dtype=float)
    else:
        masters = np.stack([p.master for p in trials])
        slaves = np.stack([p.slave for p in trials])
    if masters.ndim != 2 or masters.shape != slaves.shape:
        raise ValueError(
            f"master/slave trial counts or lengths mismatch: "
            f"{masters.shape} vs {slaves.shape}"
        )
    return masters, slaves


def split_train_test(trials, seed: int = 0) -> DatasetSplit:
    """Seeded per-class split; masters are class 0, slaves class 1.

    With 1000 trials the train side holds exactly 801 masters and 799
    slaves (total 1600/400); other trial counts scale those proportions.
    Accepts either a (masters, slaves) array pair or a sequence of
    TimeSeriesPair.
    """
    masters, slaves = _trials_to_arrays(trials)
    n = masters.shape[0]
    if n < 2:
        raise ValueError("need at least 2 trials to split")
    rng = np.random.default_rng(seed)
    counts = []
    train_parts, test_parts = [], []
    for ref, block in zip(_TRAIN_PER_1000, (masters, slaves)):
        k = int(round(ref * n / 1000.0))
        k = min(max(k, 1), n - 1)
        order = rng.permutation(n)
        train_parts.append(block[order[:k]])
        test_parts.append(block[order[k:]])
        counts.append(k)
    train_instances = np.vstack(train_parts)
    test_instances = np.vstack(test_parts)
    train_labels = np.repeat([0, 1], [counts[0], counts[1]])
    test_labels = np.repeat([0, 1], [n - counts[0], n - counts[1]])
    return DatasetSplit(
        train_instances,
        train_labels,
        test_instances,
        test_labels,
        (counts[0], counts[1]),
        (n - counts[0], n - counts[1]),
    )


# ---------------------------------------------------------------------------
# Sweep configuration and result rows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared knobs for the sweep-style experiments.

    system is a template whose eta and seed are replaced per grid point
    (seed = base_seed + index of eta in the grid). gc/ccc left as None
    pick the defaults appropriate to the feature being analyzed.
    """

    system: CoupledMapConfig | CoupledArConfig
    etas: tuple
    n_trials: int = 1000
    neuro: NeurochaosConfig = NeurochaosConfig(q=0.56)
    mlp: MlpConfig = MlpConfig()
    gc: GcConfig | None = None
    ccc: CccConfig | None = None
    base_seed: int = 0

    def __post_init__(self):
        if len(self.etas) == 0:
            raise ValueError("eta grid must be non-empty")
        for eta in self.etas:
            if not 0.0 <= eta <= 1.0:
                raise ValueError(f"eta must lie in [0, 1], got {eta}")
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")

    def system_at(self, index: int) -> CoupledMapConfig | CoupledArConfig:
        return replace(
            self.system, eta=float(self.etas[index]), seed=self.base_seed + index
        )

    def manifest(self) -> dict:
        return {
            "system": self.system.tag(),
            "etas": [float(e) for e in self.etas],
            "n_trials": self.n_trials,
            "neuro": asdict(self.neuro),
            "mlp": {
                "layer_sizes": list(self.mlp.layer_sizes),
                "activations": list(self.mlp.activations),
                "learning_rate": self.mlp.learning_rate,
                "batch_size": self.mlp.batch_size,
                "n_epochs": self.mlp.n_epochs,
                "seed": self.mlp.seed,
            },
            "gc": None if self.gc is None else asdict(self.gc),
            "ccc": None if self.ccc is None else asdict(self.ccc),
            "base_seed": self.base_seed,
        }


@dataclass
class ResultRow:
    """One classification measurement: a method's macro F1 at one eta."""

    eta: float
    method: str
    macro_f1: float
    seed: int
    n_train: int
    n_test: int
    case: str = ""

    def __post_init__(self):
        if not 0.0 <= self.macro_f1 <= 1.0:
            raise ValueError(f"macro_f1 out of [0, 1]: {self.macro_f1}")

    def to_dict(self) -> dict:
        d = {
            "eta": self.eta,
            "method": self.method,
            "macro_f1": self.macro_f1,
            "seed": self.seed,
            "n_train": self.n_train,
            "n_test": self.n_test,
        }
        if self.case:
            d = {"case": self.case, **d}
        return d


def _fit_eval_chaosnet(split: DatasetSplit, neuro: NeurochaosConfig) -> float:
    model = fit(split.train_instances, split.train_labels, neuro)
    return evaluate(model, split.test_instances, split.test_labels).macro_f1


def _fit_eval_mlp(split: DatasetSplit, mlp: MlpConfig) -> float:
    # The network sees the same per-series normalized input as the neuron.
    model = train_mlp(normalize_instances(split.train_instances), split.train_labels, mlp)
    return evaluate_mlp(
        model, normalize_instances(split.test_instances), split.test_labels
    ).macro_f1


def run_eta_sweep(method: str, config: ExperimentConfig) -> list[ResultRow]:
    """Generate, split, fit and score at every eta for one method."""
    if method not in ("chaosnet", "mlp"):
        raise ValueError(f"unknown method {method!r}")
    rows = []
    for i in range(len(config.etas)):
        system = config.system_at(i)
        trials = generate_trials(system, config.n_trials)
        split = split_train_test(trials, seed=system.seed)
        if method == "chaosnet":
            score = _fit_eval_chaosnet(split, config.neuro)
        else:
            score = _fit_eval_mlp(split, replace(config.mlp, seed=system.seed))
        logger.info("eta=%.2f method=%s macro_f1=%.4f", system.eta, method, score)
        rows.append(
            ResultRow(
                system.eta,
                method,
                score,
                system.seed,
                split.train_labels.size,
                split.test_labels.size,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Transfer evaluation
# ---------------------------------------------------------------------------

TRANSFER_CASES = {
    "I": ("tent", 0.6, 0.4),
    "II": ("tent", 0.1, 0.3),
    "III": ("tent", 0.49, 0.52),
    "IV": ("logistic", 4.0, 3.82),
}


def _transfer_target(case_id: str, base: CoupledMapConfig) -> CoupledMapConfig:
    try:
        kind, p1, p2 = TRANSFER_CASES[case_id]
    except KeyError:
        raise ValueError(
            f"unknown transfer case {case_id!r}; expected one of "
            f"{sorted(TRANSFER_CASES)}"
        ) from None
    return replace(base, master_map=MapSpec(kind, p1), slave_map=MapSpec(kind, p2))


def run_transfer_case(case_ids, methods, config: ExperimentConfig) -> list[ResultRow]:
    """Train on the stock tent pair, evaluate unchanged on other systems.

    Models are fitted per eta on a (b1=0.65, b2=0.47) tent system and then
    scored on the test portion of each target case's own split: (I) tent
    0.6/0.4, (II) tent 0.1/0.3, (III) tent 0.49/0.52, (IV) logistic
    4.0/3.82. case_ids and methods may be single values or sequences.
    """
    if isinstance(case_ids, str):
        case_ids = [case_ids]
    if isinstance(methods, str):
        methods = [methods]
    for m in methods:
        if m not in ("chaosnet", "mlp"):
            raise ValueError(f"unknown method {m!r}")
    if not isinstance(config.system, CoupledMapConfig):
        raise ValueError("transfer experiments start from a coupled-map system")
    targets = {c: _transfer_target(c, config.system) for c in case_ids}

    rows = []
    for i in range(len(config.etas)):
        base = config.system_at(i)
        base_split = split_train_test(
            generate_trials(base, config.n_trials), seed=base.seed
        )
        models = {}
        if "chaosnet" in methods:
            models["chaosnet"] = fit(
                base_split.train_instances, base_split.train_labels, config.neuro
            )
        if "mlp" in methods:
            models["mlp"] = train_mlp(
                normalize_instances(base_split.train_instances),
                base_split.train_labels,
                replace(config.mlp, seed=base.seed),
            )
        for case_id in case_ids:
            target = replace(targets[case_id], eta=base.eta, seed=base.seed)
            target_split = split_train_test(
                generate_trials(target, config.n_trials), seed=target.seed
            )
            for m in methods:
                if m == "chaosnet":
                    score = evaluate(
                        models[m], target_split.test_instances, target_split.test_labels
                    ).macro_f1
                else:
                    score = evaluate_mlp(
                        models[m],
                        normalize_instances(target_split.test_instances),
                        target_split.test_labels,
                    ).macro_f1
                logger.info(
                    "case=%s eta=%.2f method=%s macro_f1=%.4f",
                    case_id,
                    base.eta,
                    m,
                    score,
                )
                rows.append(
                    ResultRow(
                        base.eta,
                        m,
                        score,
                        base.seed,
                        base_split.train_labels.size,
                        target_split.test_labels.size,
                        case=case_id,
                    )
                )
    return rows


# ---------------------------------------------------------------------------
# Causality sweeps
# ---------------------------------------------------------------------------


@dataclass
class CausalitySweep:
    """Directional causality statistics per eta, plus per-trial rows."""

    statistic: str
    feature: str
    etas: tuple
    forward: list  # CausalityReport per eta, master -> slave
    reverse: list  # CausalityReport per eta, slave -> master
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def _firing_time_series(instances: np.ndarray, neuro: NeurochaosConfig) -> np.ndarray:
    """Per-row firing-time trace; each series is min-max normalized first."""
    features, _ = transform_instances(normalize_instances(instances), neuro)
    return features[:, :, 0]


def run_gc_experiment(feature: str, config: ExperimentConfig) -> CausalitySweep:
    """Granger F-statistics in both directions on per-trial feature series.

    feature 'chaosfex_firing_time' runs the neuron over each series and
    uses its firing-time trace; 'mlp_hidden' trains the network per eta on
    that eta's trials (master=0, slave=1) and uses the last hidden layer's
    activations, whose width bounds the usable autoregression order.
    """
    if feature not in ("chaosfex_firing_time", "mlp_hidden"):
        raise ValueError(f"unknown gc feature {feature!r}")
    if config.gc is not None:
        gc_config = config.gc
    elif feature == "mlp_hidden":
        gc_config = GcConfig(max_order=5)
    else:
        gc_config = GcConfig(max_order=30)

    forward_reports, reverse_reports = [], []
    rows, failures = [], []
    for i in range(len(config.etas)):
        system = config.system_at(i)
        masters, slaves = generate_trials(system, config.n_trials)
        if feature == "chaosfex_firing_time":
            m_feat = _firing_time_series(masters, config.neuro)
            s_feat = _firing_time_series(slaves, config.neuro)
        else:
            instances = normalize_instances(np.vstack((masters, slaves)))
            labels = np.repeat([0, 1], masters.shape[0])
            model = train_mlp(
                instances, labels, replace(config.mlp, seed=system.seed)
            )
            hidden = np.asarray(hidden_activations(model, instances), dtype=float)
            m_feat = hidden[: masters.shape[0]]
            s_feat = hidden[masters.shape[0] :]
        fwd_vals, rev_vals = [], []
        for trial in range(config.n_trials):
            for direction, x, y, sink in (
                ("master->slave", m_feat[trial], s_feat[trial], fwd_vals),
                ("slave->master", s_feat[trial], m_feat[trial], rev_vals),
            ):
                try:
                    res = granger_f_statistic(x, y, gc_config)
                except (np.linalg.LinAlgError, ValueError) as exc:
                    failures.append(
                        {"eta": system.eta, "trial": trial, "direction": direction,
                         "error": str(exc)}
                    )
                    continue
                sink.append(res.f_stat)
                rows.append(
                    {
                        "eta": system.eta,
                        "trial": trial,
                        "direction": direction,
                        "f_stat": res.f_stat,
                        "log_ratio": res.log_ratio,
                        "p_value": res.p_value,
                        "order": res.order,
                    }
                )
        forward_reports.append(CausalityReport.from_values("master->slave", fwd_vals))
        reverse_reports.append(CausalityReport.from_values("slave->master", rev_vals))
        logger.info(
            "eta=%.2f gc[%s] fwd=%.3f rev=%.3f",
            system.eta,
            feature,
            forward_reports[-1].mean,
            reverse_reports[-1].mean,
        )
    return CausalitySweep(
        "gc_f", feature, tuple(config.etas), forward_reports, reverse_reports, rows,
        failures,
    )


def run_ccc_experiment(source: str, config: ExperimentConfig) -> CausalitySweep:
    """Compression-complexity causality in both directions per trial.

    source 'raw' symbolizes the series themselves (default windows
    L=100, w=15, delta=50, B=4); 'chaosfex_firing_time' symbolizes the
    neuron's firing-time traces (default L=120, w=15, delta=60, B=2).
    """
    if source not in ("raw", "chaosfex_firing_time"):
        raise ValueError(f"unknown ccc source {source!r}")
    if config.ccc is not None:
        ccc_config = config.ccc
    elif source == "raw":
        ccc_config = CccConfig(past_len=100, step=15, future_len=50, n_bins=4)
    else:
        ccc_config = CccConfig(past_len=120, step=15, future_len=60, n_bins=2)

    forward_reports, reverse_reports = [], []
    rows, failures = [], []
    for i in range(len(config.etas)):
        system = config.system_at(i)
        masters, slaves = generate_trials(system, config.n_trials)
        if source == "chaosfex_firing_time":
            m_src = _firing_time_series(masters, config.neuro)
            s_src = _firing_time_series(slaves, config.neuro)
        else:
            m_src, s_src = masters, slaves
        fwd_vals, rev_vals = [], []
        for trial in range(config.n_trials):
            for direction, x, y, sink in (
                ("master->slave", m_src[trial], s_src[trial], fwd_vals),
                ("slave->master", s_src[trial], m_src[trial], rev_vals),
            ):
                try:
                    value = ccc(x, y, ccc_config)
                except ValueError as exc:
                    failures.append(
                        {"eta": system.eta, "trial": trial, "direction": direction,
                         "error": str(exc)}
                    )
                    continue
                sink.append(value)
                rows.append(
                    {
                        "eta": system.eta,
                        "trial": trial,
                        "direction": direction,
                        "ccc": value,
                    }
                )
        forward_reports.append(CausalityReport.from_values("master->slave", fwd_vals))
        reverse_reports.append(CausalityReport.from_values("slave->master", rev_vals))
        logger.info(
            "eta=%.2f ccc[%s] fwd=%.4f rev=%.4f",
            system.eta,
            source,
            forward_reports[-1].mean,
            reverse_reports[-1].mean,
        )
    return CausalitySweep(
        "ccc", source, tuple(config.etas), forward_reports, reverse_reports, rows,
        failures,
    )


# ---------------------------------------------------------------------------
# Real data and I/O
# ---------------------------------------------------------------------------


def load_prey_predator(path) -> TimeSeriesPair:
    """Load the predator/prey abundance CSV and drop the startup transients.

    Expects columns time, prey, predator (any order). The canonical file
    has 71 rows; other counts are accepted with a warning. The first 9
    rows are discarded. The predator series is returned as master (cause)
    and prey as slave, matching the reported causal direction.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = [f.strip().lower() for f in reader.fieldnames or []]
        for required in ("time", "prey", "predator"):
            if required not in fields:
                raise ValueError(f"missing column {required!r} in {path}")
        prey, predator = [], []
        for rownum, row in enumerate(reader, start=2):
            cleaned = {k.strip().lower(): v for k, v in row.items() if k}
            try:
                prey.append(float(cleaned["prey"]))
                predator.append(float(cleaned["predator"]))
            except (TypeError, KeyError, ValueError):
                raise ValueError(f"malformed row {rownum} in {path}") from None
    n = len(prey)
    if n != 71:
        logger.warning("expected 71 rows in %s, found %d; proceeding", path, n)
    if n <= PREY_PREDATOR_TRANSIENTS:
        raise ValueError(
            f"only {n} rows; need more than {PREY_PREDATOR_TRANSIENTS} to drop "
            "the transients"
        )
    keep = slice(PREY_PREDATOR_TRANSIENTS, None)
    meta = {
        "system": "prey_predator",
        "source": str(path),
        "master": "predator",
        "slave": "prey",
        "dropped_transients": PREY_PREDATOR_TRANSIENTS,
    }
    return TimeSeriesPair(
        np.asarray(predator[keep]), np.asarray(prey[keep]), meta
    )


def _row_to_dict(row) -> dict:
    if isinstance(row, dict):
        return row
    if isinstance(row, ResultRow):
        return row.to_dict()
    return asdict(row)


def export_results(rows, path, manifest: dict | None = None) -> Path:
    """Write rows to CSV plus a .manifest.json sidecar; refuses empty input.

    Column order follows the first row; every row must have the same keys.
    The sidecar records whatever manifest dict the caller supplies (configs
    and seeds) plus the row count and column names.
    """
    dicts = [_row_to_dict(r) for r in rows]
    if not dicts:
        raise ValueError("refusing to export an empty result set")
    columns = list(dicts[0].keys())
    for i, d in enumerate(dicts):
        if list(d.keys()) != columns:
            raise ValueError(f"row {i} columns {list(d)} differ from {columns}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(dicts)
    sidecar = path.with_suffix(path.suffix + ".manifest.json")
    payload = {
        "output": path.name,
        "n_rows": len(dicts),
        "columns": columns,
        "config": manifest or {},
    }
    with open(sidecar, "w") as fh:
        json.dump(payload, fh, indent=2, default=str)
    return path

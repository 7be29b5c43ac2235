"""Command-line entry points.

Subcommands cover the full pipeline: simulate coupled systems, extract
neuron features, train/evaluate both classifiers, run directional
causality analyses, and drive the sweep/transfer experiments. Every
output CSV gets a JSON manifest (sidecar or directory-level) recording
the configuration and seeds that produced it.

Trial CSVs use the header index,master,slave; feature CSVs use
idx,firing_time,firing_rate,energy,entropy. Config files are JSON.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .causality import CccConfig, GcConfig, ccc, granger_f_statistic
from .chaosfex import (
    NeurochaosConfig,
    normalize_instances,
    normalize_series,
    transform_instance,
)
from .chaosnet import evaluate, fit, load_model, save_model
from .dynamics import CoupledArConfig
from .harness import (
    ExperimentConfig,
    ar_system,
    export_results,
    generate_trials,
    load_prey_predator,
    logistic_system,
    run_ccc_experiment,
    run_eta_sweep,
    run_gc_experiment,
    run_transfer_case,
    tent_system,
)
from .mlp_baseline import (
    MlpConfig,
    evaluate_mlp,
    hidden_activations,
    load_mlp,
    save_mlp,
    train_mlp,
)

logger = logging.getLogger(__name__)

TRIAL_HEADER = ("index", "master", "slave")
FEATURE_HEADER = ("idx", "firing_time", "firing_rate", "energy", "entropy")


def _etas(text: str) -> tuple:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eta list {text!r}") from None


def _load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _neuro_from_mapping(cfg: dict) -> NeurochaosConfig:
    if "q" not in cfg:
        raise SystemExit("config file must set 'q'")
    return NeurochaosConfig(
        q=float(cfg["q"]),
        b=float(cfg.get("b", 0.499)),
        epsilon=float(cfg.get("epsilon", 0.171)),
        max_iter=int(cfg.get("max_iter", 10000)),
    )


def _mlp_from_mapping(cfg: dict) -> MlpConfig:
    kwargs = {}
    if "layer_sizes" in cfg:
        kwargs["layer_sizes"] = tuple(int(s) for s in cfg["layer_sizes"])
    if "activations" in cfg:
        kwargs["activations"] = tuple(cfg["activations"])
    for key in ("learning_rate", "batch_size", "n_epochs", "seed"):
        if key in cfg:
            kwargs[key] = type(MlpConfig.__dataclass_fields__[key].default)(cfg[key])
    return MlpConfig(**kwargs)


def _system_from_args(args, eta: float):
    if args.system == "tent":
        return tent_system(
            eta, length=args.length, transient=args.transient, seed=args.seed
        )
    if args.system == "logistic":
        return logistic_system(
            eta, length=args.length, transient=args.transient, seed=args.seed
        )
    return ar_system(eta, length=args.length, transient=args.transient, seed=args.seed)


def _write_manifest(directory: Path, payload: dict) -> None:
    with open(directory / "manifest.json", "w") as fh:
        json.dump(payload, fh, indent=2, default=str)


def _read_trial_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader, [])]
    for name in TRIAL_HEADER:
        if name not in header:
            raise SystemExit(f"{path}: missing column {name!r}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, header.index("master")], data[:, header.index("slave")]


def _read_trials_dir(directory) -> tuple[np.ndarray, np.ndarray, list]:
    directory = Path(directory)
    paths = sorted(p for p in directory.glob("*.csv"))
    if not paths:
        raise SystemExit(f"no trial CSVs found in {directory}")
    masters, slaves = [], []
    for p in paths:
        m, s = _read_trial_csv(p)
        masters.append(m)
        slaves.append(s)
    lengths = {len(m) for m in masters} | {len(s) for s in slaves}
    if len(lengths) != 1:
        raise SystemExit(f"trial CSVs in {directory} disagree on length: {lengths}")
    return np.vstack(masters), np.vstack(slaves), paths


def _dir_eta(directory) -> float:
    manifest = Path(directory) / "manifest.json"
    if manifest.exists():
        try:
            payload = json.loads(manifest.read_text())
            return float(payload["system"]["eta"])
        except (KeyError, TypeError, ValueError, json.JSONDecodeError):
            pass
    return float("nan")


def _stacked_instances(masters: np.ndarray, slaves: np.ndarray):
    instances = np.vstack((masters, slaves))
    labels = np.repeat([0, 1], [masters.shape[0], slaves.shape[0]])
    return instances, labels


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def _cmd_generate(args) -> int:
    system = _system_from_args(args, args.eta)
    masters, slaves = generate_trials(system, args.trials)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for i in range(args.trials):
        with open(outdir / f"trial_{i:04d}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRIAL_HEADER)
            for t in range(masters.shape[1]):
                writer.writerow(
                    (t, repr(float(masters[i, t])), repr(float(slaves[i, t])))
                )
    _write_manifest(outdir, {"system": system.tag(), "n_trials": args.trials})
    print(f"wrote {args.trials} trial CSVs to {outdir}")
    return 0


def _cmd_features(args) -> int:
    cfg = _load_json(args.config)
    neuro = _neuro_from_mapping(cfg)
    bounds = None
    if "lo" in cfg or "hi" in cfg:
        bounds = (float(cfg["lo"]), float(cfg["hi"]))
    indir = Path(getattr(args, "in"))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    masters, slaves, paths = _read_trials_dir(indir)
    written = 0
    for path, m, s in zip(paths, masters, slaves):
        for series_name, series in (("master", m), ("slave", s)):
            lo, hi = bounds if bounds else (series.min(), series.max())
            fm = transform_instance(normalize_series(series, lo, hi), neuro)
            out = outdir / f"{path.stem}_{series_name}.csv"
            with open(out, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(FEATURE_HEADER)
                for idx, row in enumerate(fm.values):
                    writer.writerow((idx,) + tuple(repr(float(v)) for v in row))
            written += 1
    _write_manifest(
        outdir,
        {"neuro": neuro.__dict__, "normalization": bounds or "per-series min/max",
         "source": str(indir)},
    )
    print(f"wrote {written} feature CSVs to {outdir}")
    return 0


def _cmd_train(args) -> int:
    neuro = _neuro_from_mapping(_load_json(args.config))
    masters, slaves, _ = _read_trials_dir(args.train)
    instances, labels = _stacked_instances(masters, slaves)
    model = fit(instances, labels, neuro)
    save_model(model, args.model)
    print(f"fitted prototypes on {labels.size} instances -> {args.model}")
    return 0


def _report_rows(report) -> list:
    rows = []
    for k in range(len(report.f1)):
        rows.append(
            {
                "class": str(k),
                "precision": report.precision[k],
                "recall": report.recall[k],
                "f1": report.f1[k],
            }
        )
    rows.append(
        {"class": "macro", "precision": "", "recall": "", "f1": report.macro_f1}
    )
    return rows


def _cmd_evaluate(args) -> int:
    model = load_model(args.model)
    masters, slaves, _ = _read_trials_dir(args.test)
    instances, labels = _stacked_instances(masters, slaves)
    report = evaluate(model, instances, labels)
    export_results(
        _report_rows(report), args.report, manifest={"model": str(args.model)}
    )
    print(f"macro F1 = {report.macro_f1:.4f} on {labels.size} instances")
    return 0


def _cmd_mlp_train(args) -> int:
    cfg = _load_json(args.config) if args.config else {}
    mlp_config = _mlp_from_mapping(cfg)
    masters, slaves, _ = _read_trials_dir(args.train)
    instances, labels = _stacked_instances(masters, slaves)
    if instances.shape[1] != mlp_config.layer_sizes[0]:
        mlp_config = replace(
            mlp_config,
            layer_sizes=(instances.shape[1],) + tuple(mlp_config.layer_sizes[1:]),
        )
    model = train_mlp(normalize_instances(instances), labels, mlp_config)
    save_mlp(args.model, model)
    print(
        f"trained mlp on {labels.size} instances, "
        f"final loss {model.loss_curve[-1]:.4f} -> {args.model}"
    )
    return 0


def _cmd_mlp_eval(args) -> int:
    model = load_mlp(args.model)
    masters, slaves, _ = _read_trials_dir(args.test)
    instances, labels = _stacked_instances(masters, slaves)
    report = evaluate_mlp(model, normalize_instances(instances), labels)
    export_results(
        _report_rows(report), args.report, manifest={"model": str(args.model)}
    )
    print(f"macro F1 = {report.macro_f1:.4f} on {labels.size} instances")
    return 0


def _cmd_mlp_activations(args) -> int:
    model = load_mlp(args.model)
    masters, slaves, paths = _read_trials_dir(getattr(args, "in"))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for path, series_name, block in (
        *((p, "master", m) for p, m in zip(paths, masters)),
        *((p, "slave", s) for p, s in zip(paths, slaves)),
    ):
        acts = hidden_activations(
            model, normalize_instances(block[None, :]), layer=args.layer
        )[0]
        out = outdir / f"{path.stem}_{series_name}.csv"
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("idx", "activation"))
            for idx, v in enumerate(acts):
                writer.writerow((idx, repr(float(v))))
    _write_manifest(outdir, {"model": str(args.model), "layer": args.layer})
    print(f"wrote activations for {2 * len(paths)} series to {outdir}")
    return 0


def _series_for_causality(args, masters, slaves):
    if args.feature == "raw":
        return masters, slaves
    neuro = NeurochaosConfig(q=args.q, b=args.b, epsilon=args.epsilon)
    from .harness import _firing_time_series

    return (
        _firing_time_series(masters, neuro),
        _firing_time_series(slaves, neuro),
    )


def _cmd_gc(args) -> int:
    masters, slaves, _ = _read_trials_dir(args.dir)
    eta = _dir_eta(args.dir)
    m_feat, s_feat = _series_for_causality(args, masters, slaves)
    gc_config = GcConfig(max_order=args.max_order)
    rows = []
    for trial in range(masters.shape[0]):
        for direction, x, y in (
            ("master->slave", m_feat[trial], s_feat[trial]),
            ("slave->master", s_feat[trial], m_feat[trial]),
        ):
            res = granger_f_statistic(x, y, gc_config)
            rows.append(
                {
                    "trial": trial,
                    "eta": eta,
                    "direction": direction,
                    "statistic": res.f_stat,
                    "log_ratio": res.log_ratio,
                    "p_value": res.p_value,
                    "order": res.order,
                }
            )
    export_results(
        rows,
        args.out,
        manifest={"dir": str(args.dir), "feature": args.feature,
                  "max_order": args.max_order},
    )
    print(f"wrote {len(rows)} GC rows to {args.out}")
    return 0


def _cmd_ccc(args) -> int:
    masters, slaves, _ = _read_trials_dir(args.dir)
    eta = _dir_eta(args.dir)
    m_feat, s_feat = _series_for_causality(args, masters, slaves)
    config = CccConfig(
        past_len=args.L, step=args.w, future_len=args.delta, n_bins=args.B
    )
    rows = []
    for trial in range(masters.shape[0]):
        for direction, x, y in (
            ("master->slave", m_feat[trial], s_feat[trial]),
            ("slave->master", s_feat[trial], m_feat[trial]),
        ):
            rows.append(
                {
                    "trial": trial,
                    "eta": eta,
                    "direction": direction,
                    "statistic": ccc(x, y, config),
                }
            )
    export_results(
        rows,
        args.out,
        manifest={"dir": str(args.dir), "feature": args.feature,
                  "ccc": config.__dict__},
    )
    print(f"wrote {len(rows)} CCC rows to {args.out}")
    return 0


def _experiment_config(args) -> ExperimentConfig:
    return ExperimentConfig(
        system=_system_from_args(args, args.etas[0]),
        etas=args.etas,
        n_trials=args.trials,
        neuro=NeurochaosConfig(q=args.q, b=args.b, epsilon=args.epsilon),
        base_seed=args.seed,
    )


def _cmd_sweep(args) -> int:
    config = _experiment_config(args)
    rows = run_eta_sweep(args.method, config)
    export_results(rows, args.out, manifest=config.manifest())
    for row in rows:
        print(f"eta={row.eta:.2f} {row.method} macro_f1={row.macro_f1:.4f}")
    return 0


def _cmd_transfer(args) -> int:
    args.system = "tent"
    config = _experiment_config(args)
    cases = [c.strip().upper() for c in args.cases.split(",") if c.strip()]
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    rows = run_transfer_case(cases, methods, config)
    export_results(rows, args.out, manifest=config.manifest())
    for row in rows:
        print(
            f"case={row.case} eta={row.eta:.2f} {row.method} "
            f"macro_f1={row.macro_f1:.4f}"
        )
    return 0


def _cmd_prey_predator(args) -> int:
    pair = load_prey_predator(args.csv)
    predator, prey = pair.master, pair.slave
    raw_cfg = CccConfig(past_len=args.L, step=args.w, future_len=args.delta,
                        n_bins=args.raw_bins)
    rows = [
        {
            "source": "raw",
            "direction": "predator->prey",
            "ccc": ccc(predator, prey, raw_cfg),
        },
        {
            "source": "raw",
            "direction": "prey->predator",
            "ccc": ccc(prey, predator, raw_cfg),
        },
    ]
    neuro = NeurochaosConfig(q=args.q, b=args.b, epsilon=args.epsilon)
    series = {}
    for name, raw in (("predator", predator), ("prey", prey)):
        scaled = normalize_series(raw, raw.min(), raw.max())
        series[name] = transform_instance(scaled, neuro).values[:, 0]
    ft_cfg = CccConfig(past_len=args.L, step=args.w, future_len=args.delta,
                       n_bins=args.feature_bins)
    rows.append(
        {
            "source": "firing_time",
            "direction": "predator->prey",
            "ccc": ccc(series["predator"], series["prey"], ft_cfg),
        }
    )
    rows.append(
        {
            "source": "firing_time",
            "direction": "prey->predator",
            "ccc": ccc(series["prey"], series["predator"], ft_cfg),
        }
    )
    export_results(
        rows,
        args.out,
        manifest={
            "csv": str(args.csv),
            "raw_ccc": raw_cfg.__dict__,
            "feature_ccc": ft_cfg.__dict__,
            "neuro": neuro.__dict__,
        },
    )
    for row in rows:
        print(f"{row['source']:12s} {row['direction']:16s} ccc={row['ccc']:+.4f}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_neuro_flags(p, default_epsilon=0.171):
    p.add_argument("--q", type=float, default=0.56, help="neuron initial activity")
    p.add_argument("--b", type=float, default=0.499, help="neuron skewness")
    p.add_argument("--epsilon", type=float, default=default_epsilon,
                   help="recognition half-width")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neurochaos",
        description="Chaotic-neuron features, prototype classification and "
        "causality experiments on coupled dynamical systems.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate coupled-system trials")
    p.add_argument("--system", choices=("tent", "logistic", "ar"), required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--length", type=int, default=2000)
    p.add_argument("--transient", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("features", help="extract neuron features from trials")
    p.add_argument("--config", required=True, help="JSON with q/b/epsilon")
    p.add_argument("--in", required=True, help="directory of trial CSVs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("train", help="fit the prototype classifier")
    p.add_argument("--config", required=True)
    p.add_argument("--train", required=True, help="directory of trial CSVs")
    p.add_argument("--model", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a saved prototype model")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("mlp-train", help="train the network baseline")
    p.add_argument("--config", help="JSON overriding architecture/optimizer")
    p.add_argument("--train", required=True)
    p.add_argument("--model", required=True)
    p.set_defaults(func=_cmd_mlp_train)

    p = sub.add_parser("mlp-eval", help="score a saved network")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_mlp_eval)

    p = sub.add_parser("mlp-activations", help="dump hidden-layer activations")
    p.add_argument("--model", required=True)
    p.add_argument("--in", required=True)
    p.add_argument("--layer", type=int, default=-2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mlp_activations)

    p = sub.add_parser("gc", help="Granger F-test per trial, both directions")
    p.add_argument("--dir", required=True, help="directory of trial CSVs")
    p.add_argument("--max-order", type=int, default=30, dest="max_order")
    p.add_argument("--feature", choices=("raw", "chaosfex_firing_time"),
                   default="raw")
    _add_neuro_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gc)

    p = sub.add_parser("ccc", help="compression-complexity causality per trial")
    p.add_argument("--dir", required=True)
    p.add_argument("--L", type=int, default=100, help="past window length")
    p.add_argument("--w", type=int, default=15, help="window stride")
    p.add_argument("--delta", type=int, default=50, help="future window length")
    p.add_argument("--B", type=int, default=4, help="symbol bins")
    p.add_argument("--feature", choices=("raw", "chaosfex_firing_time"),
                   default="raw")
    _add_neuro_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ccc)

    p = sub.add_parser("sweep", help="macro F1 vs coupling for one method")
    p.add_argument("--method", choices=("chaosnet", "mlp"), required=True)
    p.add_argument("--system", choices=("tent", "logistic", "ar"), required=True)
    p.add_argument("--etas", type=_etas, required=True,
                   help="comma-separated coupling values")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--length", type=int, default=2000)
    p.add_argument("--transient", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    _add_neuro_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("transfer", help="train on the stock tent pair, "
                       "test on other systems")
    p.add_argument("--cases", default="I,II,III,IV")
    p.add_argument("--methods", default="chaosnet,mlp")
    p.add_argument("--etas", type=_etas, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--length", type=int, default=2000)
    p.add_argument("--transient", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    _add_neuro_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_transfer)

    p = sub.add_parser("prey-predator", help="CCC analysis of the field data")
    p.add_argument("--csv", required=True, help="time,prey,predator CSV")
    p.add_argument("--L", type=int, default=40)
    p.add_argument("--w", type=int, default=15)
    p.add_argument("--delta", type=int, default=4)
    p.add_argument("--raw-bins", type=int, default=8, dest="raw_bins")
    p.add_argument("--feature-bins", type=int, default=4, dest="feature_bins")
    _add_neuro_flags(p, default_epsilon=0.1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_prey_predator)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

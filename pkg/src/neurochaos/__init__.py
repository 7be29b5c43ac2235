"""Chaotic-neuron feature extraction, prototype classification, and
causality analysis for coupled dynamical systems.

The pipeline: simulate master-slave coupled systems (dynamics), map each
series through a chaotic neuron into firing-time/rate/energy/entropy
features (chaosfex), classify cause vs effect with cosine-similarity
prototypes (chaosnet) or a dense network baseline (mlp_baseline), and
quantify directional influence with Granger and compression-complexity
causality (causality). The harness module orchestrates the experiments.
"""

from .causality import (
    CausalityReport,
    CccConfig,
    GcConfig,
    GrangerResult,
    ccc,
    etc,
    etc_joint,
    etc_joint_normalized,
    etc_normalized,
    granger_f_statistic,
    symbolize,
)
from .chaosfex import (
    FeatureMatrix,
    FeatureVector,
    NeurochaosConfig,
    NeuralTrace,
    chaotic_orbit,
    extract_features,
    fire_trace,
    first_passage_times,
    normalize_instances,
    normalize_series,
    transform_instance,
    transform_instances,
)
from .chaosnet import (
    ChaosNetModel,
    EvaluationReport,
    QSearchResult,
    classification_report,
    cosine_similarity,
    default_q_grid,
    evaluate,
    fit,
    load_model,
    macro_f1_score,
    predict,
    predict_batch,
    save_model,
    tune_q,
)
from .dynamics import (
    CoupledArConfig,
    CoupledMapConfig,
    MapSpec,
    TimeSeriesPair,
    generate_coupled_ar_pair,
    generate_coupled_ar_trials,
    generate_coupled_map_pair,
    generate_coupled_map_trials,
    lag_synchronization_error,
    logistic_step,
    skew_tent_step,
    synchronization_error,
)
from .harness import (
    DatasetSplit,
    ExperimentConfig,
    ResultRow,
    CausalitySweep,
    TRANSFER_CASES,
    ar_system,
    export_results,
    generate_trials,
    load_prey_predator,
    logistic_system,
    run_ccc_experiment,
    run_eta_sweep,
    run_gc_experiment,
    run_transfer_case,
    split_train_test,
    tent_system,
)
from .mlp_baseline import (
    MlpConfig,
    MlpModel,
    evaluate_mlp,
    gradient_check,
    hidden_activations,
    init_mlp,
    load_mlp,
    predict_mlp,
    predict_proba,
    save_mlp,
    train_mlp,
)

__version__ = "0.1.0"

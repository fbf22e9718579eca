"""Neural-network ordinal regression with cumulative targets (NNRank) and a softmax baseline (NNClass)."""

__version__ = "0.1.0"

from .data import (
    DataError,
    NormStats,
    OrdinalDataset,
    RawDataset,
    SplitPlan,
    discretize_equal_interval,
    load_csv,
    make_splits,
    normalize,
)
from .evaluation import EvalReport, evaluate_model, mean_abs_error, run_benchmark, zero_one_error
from .network import (
    NetworkModel,
    backward,
    encode_target,
    forward,
    load_model,
    load_models,
    loss,
    output_delta,
    predict_category,
    save_model,
)
from .training import (
    Ensemble,
    GridSpec,
    TrainingConfig,
    TrainLog,
    ensemble_outputs,
    grid_search,
    init_weights,
    lr_schedule_step,
    train,
    train_ensemble,
)

"""sleepopt: survey-driven sleep quality prediction and minimal-change
intervention recommendation.

The package trains a regularized gradient-boosted tree classifier on
encoded survey features, derives per-feature importance weights from exact
Shapley attributions, and solves a per-individual integer program that
trades expected benefit against behavioral disruption. Batch experiments
and figures are exposed through the CLI (`sleepopt ...`), interactive
what-if queries through the HTTP service (`sleepopt serve`).
"""

__version__ = "0.1.0"

from .schema import SurveySchema, FieldSpec, default_schema, load_schema, save_schema  # noqa: F401
from .preprocess import (  # noqa: F401
    FeatureVector,
    DatasetSplit,
    SurveyRecord,
    augment_dataset,
    cap_outliers_iqr,
    encode_record,
    engineer_features,
    parse_survey_csv,
    preprocess_survey,
    split_dataset,
)
from .psqi import PsqiResponse, score_psqi  # noqa: F401
from .synthetic import generate_synthetic  # noqa: F401
from .gbm import (  # noqa: F401
    Metrics,
    TrainConfig,
    TreeEnsemble,
    TreeNode,
    best_split,
    evaluate,
    grid_search,
    leaf_weight,
    load_model,
    logistic_grad_hess,
    predict_margin,
    predict_proba,
    save_model,
    train_ensemble,
)
from .shap_values import (  # noqa: F401
    AttributionReport,
    WeightVector,
    actionable_weights,
    brute_force_shapley,
    explain_dataset,
    mean_abs_weights,
    tree_shap,
)
from .milp import (  # noqa: F401
    InterventionPlan,
    InterventionProblem,
    ablate,
    build_problem,
    solve,
    solve_enumerate,
    solve_with_cardinality,
)
from .experiments import (  # noqa: F401
    AblationRow,
    BatchResult,
    ParetoResult,
    SweepResult,
    ablation_suite,
    batch_recommend,
    emit_report,
    lambda_sweep,
    pareto_frontier,
)

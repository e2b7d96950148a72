"""Indirect detection of rhEPO blood doping from haematological profiles.

The pipeline: parse or simulate a labelled longitudinal cohort, impute
missing blood parameters, screen parameters with a two-sample
Kolmogorov-Smirnov test, train kernel-SVC / random-forest / boosted-tree
classifiers on the selected features, and report metrics against the
prior-art baseline.
"""

from .evaluation import (
    SOTA_BASELINE,
    ConfusionMatrix,
    CrossValidation,
    EvaluationResult,
    FoldAssignment,
    LearnerSpec,
    MetricsReport,
    Normalizer,
    RocCurve,
    cross_validate,
    evaluate_scores,
    kfold,
    metrics,
    roc_curve,
    train_test_split,
)
from .hpo import (
    Choice,
    IntRange,
    LogUniform,
    SearchResult,
    TrialRecord,
    Uniform,
    cv_auc_objective,
    default_search_space,
    hpo_search,
)
from .learners import (
    BoostedModel,
    FeatureMatrix,
    ForestModel,
    KernelSpec,
    SvcModel,
    fit_boosted,
    fit_forest,
    fit_model,
    fit_svc,
    kernel_eval,
    load_model,
    logistic_grad_hess,
    save_model,
)
from .profiles import (
    Altitude,
    Cohort,
    CohortIntegrityError,
    CohortParseError,
    HaematologicalProfile,
    ImputationError,
    Label,
    MEASURED_PARAMETERS,
    PARAMETERS,
    PARAMETER_NAMES,
    Period,
    Sample,
    compute_off_hr,
    derive_period,
    impute_missing,
    read_cohort_csv,
    write_cohort_csv,
)
from .screening import (
    EmpiricalCdf,
    KsResult,
    ParameterScreen,
    SummaryStats,
    apply_correlation_filter,
    correlation_filter,
    ks_critical,
    ks_permutation_pvalue,
    ks_pvalue,
    ks_statistic,
    screen_parameters,
    summarize,
)
from .synth import (
    CohortSpec,
    ParameterDistSpec,
    TruncatedNormal,
    builtin_table_spec,
    generate_cohort,
    inject_missingness,
)

__version__ = "0.1.0"

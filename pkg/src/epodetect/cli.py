"""Command-line pipeline: ingest, screen, simulate and train-eval.

Every command is deterministic given its flags; randomized stages take an
explicit --seed (default 42) and the seed is recorded in every JSON output.
Errors go to stderr with a stable error-code prefix and a nonzero exit.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .evaluation import (
    LearnerSpec,
    Normalizer,
    cross_validate,
    evaluate_scores,
    train_test_split,
)
from .hpo import cv_auc_objective, default_search_space, hpo_search
from .learners import MODEL_KINDS, FeatureMatrix, fit_model, model_to_dict
from .profiles import (
    Altitude,
    Cohort,
    CohortIntegrityError,
    CohortParseError,
    ImputationError,
    cohort_to_csv_text,
    impute_missing,
    parameter,
    quality_issues,
    read_cohort_csv,
)
from .reports import (
    counts_by_group,
    evaluation_report,
    render_counts_table,
    render_evaluation_table,
    roc_csv,
    screen_report,
    screen_table_csv,
    write_json_atomic,
    write_text_atomic,
)
from .screening import apply_correlation_filter, screen_parameters
from .synth import CohortSpec, generate_cohort

DEFAULT_SEED = 42


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved command configuration; exactly one cohort source is set."""

    input_path: Path | None
    simulate_spec: CohortSpec | None
    altitude: Altitude
    alpha: float
    top_k: int
    corr_threshold: float
    features: tuple[str, ...] | None
    model: str
    split: float
    k_folds: int
    hpo_trials: int
    seed: int
    output_dir: Path

    def __post_init__(self) -> None:
        if (self.input_path is None) == (self.simulate_spec is None):
            raise ValueError("exactly one of --input and --simulate must be given")


def _altitude(token: str) -> Altitude:
    return Altitude(token)


def _add_source_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="cohort CSV to analyse")
    parser.add_argument(
        "--simulate",
        action="store_true",
        help="generate the cohort on the fly instead of reading --input",
    )
    parser.add_argument("--participants", type=int, help="simulated participant count")
    parser.add_argument("--rhepo-fraction", type=float, help="simulated treated-arm fraction")
    parser.add_argument("--missing-rate", type=float, default=0.0, help="simulated missing-cell rate")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output-dir", default="out", help="directory for report files")
    parser.add_argument("--altitude", type=_altitude, choices=list(Altitude), default=Altitude.SEA_LEVEL)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _simulate_spec(args: argparse.Namespace) -> CohortSpec | None:
    if not getattr(args, "simulate", False):
        return None
    spec = CohortSpec.default(args.altitude, seed=args.seed, missing_rate=args.missing_rate)
    if args.participants is not None or args.rhepo_fraction is not None:
        spec = CohortSpec(
            n_participants=args.participants if args.participants is not None else spec.n_participants,
            rhepo_fraction=args.rhepo_fraction if args.rhepo_fraction is not None else spec.rhepo_fraction,
            altitude=args.altitude,
            missing_rate=args.missing_rate,
            seed=args.seed,
        )
    return spec


def _config(args: argparse.Namespace) -> PipelineConfig:
    features = None
    if getattr(args, "features", None):
        features = tuple(name.strip() for name in args.features.split(",") if name.strip())
        for name in features:
            parameter(name)
        if not features:
            raise ValueError("--features given but empty")
    return PipelineConfig(
        input_path=Path(args.input) if args.input else None,
        simulate_spec=_simulate_spec(args),
        altitude=args.altitude,
        alpha=getattr(args, "alpha", 0.001),
        top_k=getattr(args, "top_k", 8),
        corr_threshold=getattr(args, "corr_threshold", 0.9),
        features=features,
        model=getattr(args, "model", "all"),
        split=getattr(args, "split", 0.8),
        k_folds=getattr(args, "k_folds", 5),
        hpo_trials=getattr(args, "hpo_trials", 0),
        seed=args.seed,
        output_dir=Path(args.output_dir),
    )


def _load_cohort(config: PipelineConfig) -> Cohort:
    if config.input_path is not None:
        return read_cohort_csv(config.input_path)
    return generate_cohort(config.simulate_spec)


def _config_dict(config: PipelineConfig) -> dict:
    return {
        "input": str(config.input_path) if config.input_path else None,
        "simulate": config.simulate_spec is not None,
        "altitude": config.altitude.value,
        "alpha": config.alpha,
        "top_k": config.top_k,
        "corr_threshold": config.corr_threshold,
        "features": list(config.features) if config.features else None,
        "model": config.model,
        "split": config.split,
        "k_folds": config.k_folds,
        "hpo_trials": config.hpo_trials,
        "seed": config.seed,
    }


def cmd_ingest(args: argparse.Namespace) -> int:
    config = _config(args)
    cohort = impute_missing(_load_cohort(config))
    counts = counts_by_group(cohort)
    write_text_atomic(config.output_dir / "cohort_imputed.csv", cohort_to_csv_text(cohort))
    write_json_atomic(
        config.output_dir / "ingest_summary.json",
        {"counts": counts, "provenance": cohort.provenance, "seed": config.seed},
    )
    print(render_counts_table(counts))
    for issue in quality_issues(cohort):
        print(f"warning: {issue}", file=sys.stderr)
    print(f"wrote {config.output_dir / 'cohort_imputed.csv'}")
    return 0


def _run_screen(config: PipelineConfig, cohort: Cohort):
    screen = screen_parameters(cohort, config.altitude, config.alpha)
    screen = apply_correlation_filter(screen, cohort, config.corr_threshold)
    if config.top_k > 0:
        screen = type(screen)(
            results=screen.results,
            selected=screen.selected[: config.top_k],
            alpha=screen.alpha,
            altitude=screen.altitude,
        )
    return screen


def cmd_screen(args: argparse.Namespace) -> int:
    config = _config(args)
    cohort = impute_missing(_load_cohort(config))
    screen = _run_screen(config, cohort)
    write_json_atomic(config.output_dir / "screen.json", screen_report(screen, config.seed))
    write_text_atomic(config.output_dir / "screen_table.csv", screen_table_csv(screen, cohort))
    if screen.selected:
        print("selected parameters (ascending p-value):")
        for name in screen.selected:
            result = screen.results[name]
            print(f"  {name:7s} d={result.d_statistic:.4f} p={result.p_value:.3e}")
    else:
        print(f"no parameter rejects at alpha={config.alpha}")
    print(f"wrote {config.output_dir / 'screen.json'}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    args.simulate = True
    config = _config(args)
    cohort = generate_cohort(config.simulate_spec)
    spec = config.simulate_spec
    write_text_atomic(config.output_dir / "cohort.csv", cohort_to_csv_text(cohort))
    write_json_atomic(
        config.output_dir / "cohort_spec.json",
        {
            "n_participants": spec.n_participants,
            "rhepo_fraction": spec.rhepo_fraction,
            "altitude": spec.altitude.value,
            "weeks": list(spec.weeks),
            "missing_rate": spec.missing_rate,
            "seed": spec.seed,
        },
    )
    print(render_counts_table(counts_by_group(cohort)))
    print(f"wrote {config.output_dir / 'cohort.csv'}")
    return 0


def cmd_train_eval(args: argparse.Namespace) -> int:
    config = _config(args)
    cohort = impute_missing(_load_cohort(config))
    if config.features is not None:
        selected = config.features
    else:
        screen = _run_screen(config, cohort)
        write_json_atomic(config.output_dir / "screen.json", screen_report(screen, config.seed))
        selected = screen.selected
    if not selected:
        raise ValueError(
            f"no features to train on: nothing rejects at alpha={config.alpha} "
            "(pass --features to override)"
        )
    data = FeatureMatrix.from_cohort(cohort.at_altitude(config.altitude), selected)
    train, test = train_test_split(data, config.split, seed=config.seed, stratified=True)

    kinds = list(MODEL_KINDS) if config.model == "all" else [config.model]
    test_results = {}
    cv_results = {}
    searched_params: dict[str, dict] = {}
    for kind in kinds:
        params: dict = {}
        if config.hpo_trials > 0:
            search = hpo_search(
                default_search_space(kind),
                cv_auc_objective(train, kind, k=config.k_folds, seed=config.seed),
                n_trials=config.hpo_trials,
                pruning=True,
                seed=config.seed,
            )
            if search.best is None:
                raise ValueError(f"hyperparameter search produced no usable trial for {kind}")
            params = dict(search.best.params)
        searched_params[kind] = params
        cv_results[kind] = cross_validate(
            train, LearnerSpec(kind, params), k=config.k_folds, seed=config.seed
        )
        normalizer = Normalizer.fit(train.x)
        model = fit_model(kind, normalizer.transform_data(train), params, seed=config.seed)
        scores = model.scores(normalizer.transform(test.x))
        test_results[kind] = evaluate_scores(test.y, scores, model.decision_threshold)
        write_json_atomic(config.output_dir / f"model_{kind}.json", model_to_dict(model))
        write_text_atomic(config.output_dir / f"roc_{kind}.csv", roc_csv(test_results[kind].roc))

    report = evaluation_report(test_results, cv_results, _config_dict(config))
    report["features"] = list(selected)
    report["hpo_params"] = searched_params
    write_json_atomic(config.output_dir / "report.json", report)
    print(f"features: {', '.join(selected)}")
    print(render_evaluation_table(report))
    print(f"wrote {config.output_dir / 'report.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epodetect",
        description="Indirect blood-doping detection pipeline over haematological profiles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate, impute and summarize a cohort")
    _add_source_flags(p_ingest)
    _add_common_flags(p_ingest)
    p_ingest.set_defaults(func=cmd_ingest)

    p_screen = sub.add_parser("screen", help="rank parameters by two-sample significance")
    _add_source_flags(p_screen)
    _add_common_flags(p_screen)
    p_screen.add_argument("--alpha", type=float, default=0.001)
    p_screen.add_argument("--top-k", dest="top_k", type=int, default=8)
    p_screen.add_argument("--corr-threshold", dest="corr_threshold", type=float, default=0.9)
    p_screen.set_defaults(func=cmd_screen)

    p_sim = sub.add_parser("simulate", help="write a calibrated synthetic cohort CSV")
    p_sim.add_argument("--participants", type=int)
    p_sim.add_argument("--rhepo-fraction", type=float)
    p_sim.add_argument("--missing-rate", type=float, default=0.0)
    _add_common_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate, input=None)

    p_train = sub.add_parser("train-eval", help="screen, split, fit and report all models")
    _add_source_flags(p_train)
    _add_common_flags(p_train)
    p_train.add_argument("--alpha", type=float, default=0.001)
    p_train.add_argument("--top-k", dest="top_k", type=int, default=8)
    p_train.add_argument("--corr-threshold", dest="corr_threshold", type=float, default=0.9)
    p_train.add_argument("--features", help="comma-separated parameter names, bypassing the screen")
    p_train.add_argument("--model", choices=list(MODEL_KINDS) + ["all"], default="all")
    p_train.add_argument("--split", type=float, default=0.8)
    p_train.add_argument("--k-folds", dest="k_folds", type=int, default=5)
    p_train.add_argument("--hpo-trials", dest="hpo_trials", type=int, default=0)
    p_train.set_defaults(func=cmd_train_eval)

    return parser


_ERROR_CODES = (
    (CohortParseError, "EPD-PARSE"),
    (CohortIntegrityError, "EPD-INTEGRITY"),
    (ImputationError, "EPD-IMPUTE"),
    (ValueError, "EPD-DOMAIN"),
    (OSError, "EPD-IO"),
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except tuple(exc for exc, _ in _ERROR_CODES) as error:
        for exc_type, code in _ERROR_CODES:
            if isinstance(error, exc_type):
                print(f"error[{code}]: {error}", file=sys.stderr)
                break
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

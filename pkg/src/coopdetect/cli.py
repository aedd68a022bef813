"""Command-line entry point: ``coopdetect <subcommand> ...``.

Exit codes: 0 success, 2 parameter/contract error, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .baselines import l1_support_of_size, mi_ranking, mrmr_select
from .detector import detect, detect_extended
from .errors import ContractError, ParameterError, ResourceError
from .harness import ExperimentConfig, fit_complexity_curve, read_results, run_experiment, write_results
from .influence import EXTENDED_ESTIMATORS, exact_weights, extended_exact_weights
from .model import Dataset, ModelSpec, random_acyclic_model, sample_dataset

EXIT_PARAM = 2
EXIT_RESOURCE = 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> None:
    if args.model:
        model = ModelSpec.load(args.model)
    else:
        model = random_acyclic_model(args.d, args.k_individual, args.k_pairs, args.lam, args.mu, args.seed)
    if args.model_out:
        model.save(args.model_out)
    elif args.data_out is None:
        print(json.dumps(model.to_json(), indent=2))
    if args.data_out:
        if args.n is None:
            raise ParameterError("--n is required with --data-out")
        sample_dataset(model, args.n, args.data_seed).to_csv(args.data_out)


def cmd_exact_weights(args) -> None:
    model = ModelSpec.load(args.model)
    if args.extended or not model.is_pure_interaction:
        if not args.extended:
            raise ContractError("model has individual effects; pass --extended")
        w = extended_exact_weights(model)
    else:
        w = exact_weights(model)
    w.to_csv(args.out or sys.stdout)


def cmd_detect(args) -> None:
    data = Dataset.from_csv(args.data)
    if args.extended:
        res = detect_extended(data, args.lam, args.mu, args.estimator)
    else:
        res = detect(data, args.lam, args.mu)
    _emit(res.dumps() + "\n", args.out)


def cmd_baseline(args) -> None:
    data = Dataset.from_csv(args.data)
    select = {"mi": mi_ranking, "mrmr": mrmr_select, "l1": l1_support_of_size}[args.method]
    select(data, args.k).to_csv(args.out or sys.stdout)


def cmd_experiment(args) -> None:
    config = ExperimentConfig.load(args.config)
    rows = run_experiment(config, workers=args.workers)
    failed = sum(r.n_failed for r in rows)
    if failed:
        logging.warning("%d trials failed; see n_models per cell", failed)
    write_results(rows, args.out or sys.stdout)


def cmd_fit_curve(args) -> None:
    rows = [r for r in read_results(args.results) if r["method"] == args.method]
    if not rows:
        raise ParameterError(f"no rows for method {args.method!r}")
    fit = fit_complexity_curve([(r["n"], r["detection_rate"]) for r in rows])
    _emit(json.dumps({"method": args.method, "B": fit.B, "c": fit.c, "residual": fit.residual}) + "\n", args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coopdetect", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="random acyclic model JSON and/or sampled dataset CSV")
    g.add_argument("--model", help="existing model JSON to sample from")
    g.add_argument("--d", type=int, default=10)
    g.add_argument("--k-individual", type=int, default=5)
    g.add_argument("--k-pairs", type=int, default=5)
    g.add_argument("--lambda", dest="lam", type=float, default=1.0)
    g.add_argument("--mu", type=float, default=2.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--model-out")
    g.add_argument("--n", type=int)
    g.add_argument("--data-seed", type=int, default=1)
    g.add_argument("--data-out")
    g.set_defaults(func=cmd_generate)

    w = sub.add_parser("exact-weights", help="model JSON -> exact influence CSV")
    w.add_argument("model")
    w.add_argument("--extended", action="store_true", help="weights over {0..d} for models with individual effects")
    w.add_argument("--out")
    w.set_defaults(func=cmd_exact_weights)

    d = sub.add_parser("detect", help="dataset CSV -> detection result JSON")
    d.add_argument("data")
    d.add_argument("--lambda", dest="lam", type=float, required=True)
    d.add_argument("--mu", type=float, required=True)
    d.add_argument("--extended", action="store_true")
    d.add_argument("--estimator", choices=EXTENDED_ESTIMATORS, default="contrast")
    d.add_argument("--out")
    d.set_defaults(func=cmd_detect)

    b = sub.add_parser("baseline", help="dataset CSV -> selected features CSV")
    b.add_argument("data")
    b.add_argument("--method", choices=("mi", "mrmr", "l1"), required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_baseline)

    e = sub.add_parser("experiment", help="config JSON -> aggregated results CSV")
    e.add_argument("--config", required=True)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)

    f = sub.add_parser("fit-curve", help="results CSV -> fitted detection-rate curve")
    f.add_argument("results")
    f.add_argument("--method", default="algorithm1")
    f.add_argument("--out")
    f.set_defaults(func=cmd_fit_curve)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParameterError, ContractError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    return 0


if __name__ == "__main__":
    sys.exit(main())

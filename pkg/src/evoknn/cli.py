"""Command-line front end: synth, select, eval, project, oracle.

Every artefact-producing command writes a flat key-value manifest echoing its
effective parameters (seed included), and all CSV artefacts replay
byte-identically from the manifest's parameters.  Exit codes: 0 success,
2 usage errors, 1 data errors.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .dataset import (
    Dataset,
    DatasetError,
    load_csv,
    normalize_minmax,
    split_random,
    unify_vocabulary,
    write_csv,
)
from .ga import GaConfig, evolve, exhaustive_best, write_trace
from .knn import REJECT, FeatureMask, recognition_rate
from .pca import fit_pca2, project_rows
from .plot import write_svg_scatter
from .synth import SynthSpec, generate, generate_pool

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2

# default pool: 14 class sizes summing to 237, split 187/50 by --test-count
DEFAULT_CLASS_SIZES = (20, 20, 8, 4, 20, 20, 20, 20, 20, 15, 20, 10, 20, 20)


class UsageError(Exception):
    """Bad flag combination or value; maps to exit code 2."""


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    return str(value)


def _write_manifest(pairs: list[tuple[str, object]], path) -> None:
    text = "".join(f"{key} = {_fmt(value)}\n" for key, value in pairs)
    Path(path).write_text(text, encoding="utf-8")


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of integers: {text!r}")


def _load(path, args) -> Dataset:
    return load_csv(path, label_column=args.label_column, has_header=not args.no_header)


def _parse_mask(value: str, feature_count: int) -> FeatureMask:
    source = value
    p = Path(value)
    if p.is_file():
        lines = [ln.strip() for ln in p.read_text(encoding="utf-8").splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise UsageError(f"mask file {value} is empty")
        source = lines[0]
    source = source.strip()
    try:
        if set(source) <= {"0", "1"} and len(source) == feature_count:
            return FeatureMask.from_string(source)
        return FeatureMask.from_indices(
            [int(tok) for tok in source.split(",") if tok.strip()], feature_count
        )
    except ValueError as exc:
        raise UsageError(f"cannot parse mask {value!r}: {exc}")


def _dataset_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--label-column", default="label",
                     help="label column name or 0-based index (default: label)")
    sub.add_argument("--no-header", action="store_true",
                     help="files have no header row")


# ---------------------------------------------------------------- synth

def cmd_synth(args) -> int:
    informative = tuple(_parse_int_list(args.informative, "--informative"))
    if any(not 0 <= i < args.features for i in informative):
        raise UsageError(
            f"informative indices {informative} must lie in 0..{args.features - 1}"
        )
    uniform = args.train_per_class is not None or args.test_per_class is not None
    if uniform and (args.train_per_class is None or args.test_per_class is None):
        raise UsageError("--train-per-class and --test-per-class go together")

    try:
        spec = SynthSpec(
            n_classes=args.classes,
            n_features=args.features,
            informative=informative,
            class_separation=args.separation,
            noise_sd=args.noise_sd,
            train_per_class=args.train_per_class if uniform else 1,
            test_per_class=args.test_per_class if uniform else 1,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc))

    manifest: list[tuple[str, object]] = [
        ("command", "synth"),
        ("n_classes", spec.n_classes),
        ("n_features", spec.n_features),
        ("informative_features", informative),
        ("class_separation", float(spec.class_separation)),
        ("noise_sd", float(spec.noise_sd)),
        ("seed", spec.seed),
    ]
    if uniform:
        train, test = generate(spec)
        manifest += [
            ("mode", "per_class"),
            ("train_per_class", spec.train_per_class),
            ("test_per_class", spec.test_per_class),
        ]
    else:
        sizes = tuple(_parse_int_list(args.class_sizes, "--class-sizes"))
        if len(sizes) != spec.n_classes:
            raise UsageError(
                f"--class-sizes lists {len(sizes)} counts for {spec.n_classes} classes"
            )
        total = sum(sizes)
        if not 0 < args.test_count < total:
            raise UsageError(f"--test-count must be in 1..{total - 1}")
        pool = generate_pool(spec, sizes)
        train, test = split_random(pool, args.test_count, spec.seed,
                                   stratified=args.stratified)
        manifest += [
            ("mode", "pool_split"),
            ("class_sizes", sizes),
            ("pool_size", total),
            ("test_count", args.test_count),
            ("stratified", args.stratified),
        ]

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_path = out_dir / "train.csv"
    test_path = out_dir / "test.csv"
    write_csv(train, train_path)
    write_csv(test, test_path)
    manifest += [
        ("train_rows", train.n_samples),
        ("test_rows", test.n_samples),
        ("train_file", train_path),
        ("test_file", test_path),
    ]
    _write_manifest(manifest, out_dir / "manifest.txt")
    print(f"wrote {train_path} ({train.n_samples} rows) and "
          f"{test_path} ({test.n_samples} rows)")
    return EXIT_OK


# ---------------------------------------------------------------- select

def _ga_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--k", type=int, default=1, help="neighbours in the vote (default 1)")
    sub.add_argument("--alpha", type=float, default=0.6, help="weight per hit (default 0.6)")
    sub.add_argument("--beta", type=float, default=0.6,
                     help="penalty per active feature (default 0.6)")


def cmd_select(args) -> int:
    train = _load(args.train, args)
    eval_set = _load(args.eval, args)
    train, eval_set = unify_vocabulary(train, eval_set)
    holdout = None
    if args.holdout:
        holdout = _load(args.holdout, args)
        train, holdout = unify_vocabulary(train, holdout)
        _, eval_set = unify_vocabulary(train, eval_set)
    if args.normalize:
        others = [eval_set] + ([holdout] if holdout is not None else [])
        train, scaled, _ = normalize_minmax(train, others)
        eval_set = scaled[0]
        if holdout is not None:
            holdout = scaled[1]

    caught: list[str] = []
    with warnings.catch_warnings(record=True) as records:
        warnings.simplefilter("always")
        cfg = GaConfig(
            population_size=args.pop,
            max_generations=args.generations,
            crossover_prob=args.crossover_prob,
            mutation_prob=args.mutation_prob,
            per_bit_flip_rate=args.bit_flip_rate,
            alpha=args.alpha,
            beta=args.beta,
            k=args.k,
            seed=args.seed,
            elite_count=args.elite,
            tournament_size=args.tournament,
            stop_on_fitness=args.stop_on_fitness,
            stall_generations=args.stall_generations,
        )
        caught = [str(r.message) for r in records]
    for message in caught:
        print(f"warning: {message}", file=sys.stderr)

    started = time.perf_counter()
    best, trace = evolve(train, eval_set, cfg, parallel=args.parallel)
    wall = time.perf_counter() - started

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trace(trace, out_dir / "trace.csv")
    mask = best.chromosome.decode()
    (out_dir / "best_mask.txt").write_text(mask.to_string() + "\n", encoding="utf-8")

    length = train.feature_count
    eval_n = eval_set.n_samples
    last = trace[-1]
    if cfg.stop_on_fitness is not None and last.best_fitness >= cfg.stop_on_fitness:
        stopped = "target_fitness"
    elif len(trace) - 1 == cfg.max_generations:
        stopped = "generation_budget"
    else:
        stopped = "stalled"

    manifest: list[tuple[str, object]] = [
        ("command", "select"),
        ("train_file", args.train),
        ("eval_file", args.eval),
        ("train_samples", train.n_samples),
        ("eval_samples", eval_n),
        ("n_classes", len(train.classes)),
        ("original_features", length),
        ("population_size", cfg.population_size),
        ("generation_budget", cfg.max_generations),
        ("generations_run", len(trace) - 1),
        ("stopped_by", stopped),
        ("crossover_prob", cfg.crossover_prob),
        ("mutation_prob", cfg.mutation_prob),
        ("per_bit_flip_rate", cfg.flip_rate(length)),
        ("alpha", cfg.alpha),
        ("beta", cfg.beta),
        ("k", cfg.k),
        ("seed", cfg.seed),
        ("elite_count", cfg.elite_count),
        ("tournament_size", cfg.tournament_size),
        ("stop_on_fitness", cfg.stop_on_fitness),
        ("stall_generations", cfg.stall_generations),
        ("normalize", args.normalize),
        ("parallel", args.parallel),
        ("best_fitness", best.fitness),
        ("final_recognition_hits", best.hits),
        ("final_recognition_rate_percent", f"{100.0 * best.hits / eval_n:.2f}"),
        ("final_feature_count", best.nf),
        ("selected_features", mask.to_index_string()),
        ("reduction_rate_percent", f"{100.0 * (length - best.nf) / length:.2f}"),
    ]
    for message in caught:
        manifest.append(("warnings", message))
    if holdout is not None:
        h_hits, h_rate, _ = recognition_rate(train, holdout, cfg.k, mask)
        manifest += [
            ("holdout_file", args.holdout),
            ("holdout_samples", holdout.n_samples),
            ("holdout_hits", h_hits),
            ("holdout_rate_percent", f"{100.0 * h_rate:.2f}"),
        ]
    _write_manifest(manifest, out_dir / "summary.txt")

    print(f"generations_run = {len(trace) - 1}")
    print(f"best_fitness = {best.fitness!r}")
    print(f"hits = {best.hits} / {eval_n}")
    print(f"selected_features = {mask.to_index_string()}")
    print(f"wall_time_seconds = {wall:.3f}")
    print(f"artefacts in {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------- eval

def cmd_eval(args) -> int:
    train = _load(args.train, args)
    test = _load(args.test, args)
    train, test = unify_vocabulary(train, test)
    if args.normalize:
        train, scaled, _ = normalize_minmax(train, [test])
        test = scaled[0]
    mask = _parse_mask(args.mask, train.feature_count)
    hits, rate, per_sample = recognition_rate(
        train, test, args.k, mask, reject_ties=args.reject_ties
    )
    print(f"command = eval")
    print(f"k = {args.k}")
    print(f"mask = {mask.to_string()}")
    print(f"active_features = {mask.to_index_string()}")
    print(f"hits = {hits}")
    print(f"rate = {rate!r}")
    names = [c.name for c in train.classes]
    for idx, (predicted, actual) in enumerate(per_sample):
        pred_name = "REJECT" if predicted == REJECT else names[predicted]
        marker = "" if predicted == actual else "\tMISS"
        print(f"{idx}\t{pred_name}\t{names[actual]}{marker}")
    return EXIT_OK


# ---------------------------------------------------------------- project

def _write_coords(path, header: list[str], rows, names, labels) -> None:
    lines = [",".join(header)]
    for idx, (row, lab) in enumerate(zip(rows, labels)):
        lines.append(",".join([str(idx), names[lab]] + [repr(float(v)) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _expand_pairs(pair_args: list[str], mask: Optional[FeatureMask],
                  feature_count: int) -> list[tuple[int, int]]:
    pairs: list[tuple[int, int]] = []
    for value in pair_args:
        if value == "all":
            if mask is None:
                raise UsageError("--pair all needs --mask to supply the feature set")
            active = [int(i) for i in mask.active_indices()]
            pairs += [(a, b) for n, a in enumerate(active) for b in active[n + 1:]]
            continue
        ints = _parse_int_list(value, "--pair")
        if len(ints) != 2 or ints[0] == ints[1]:
            raise UsageError(f"--pair wants two distinct indices, got {value!r}")
        pairs.append((ints[0], ints[1]))
    for a, b in pairs:
        if not (0 <= a < feature_count and 0 <= b < feature_count):
            raise UsageError(f"--pair ({a},{b}) out of range 0..{feature_count - 1}")
    return pairs


def cmd_project(args) -> int:
    data = _load(args.dataset, args)
    mask = _parse_mask(args.mask, data.feature_count) if args.mask else None
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    names = [c.name for c in data.classes]

    manifest: list[tuple[str, object]] = [
        ("command", "project"),
        ("dataset_file", args.dataset),
        ("samples", data.n_samples),
        ("features", data.feature_count),
        ("mask", mask.to_string() if mask else None),
    ]
    outputs: list[str] = []

    if args.pair:
        pairs = _expand_pairs(args.pair, mask, data.feature_count)
        for a, b in pairs:
            coords = data.features[:, [a, b]]
            pair_out = out.with_name(f"{out.stem}_pair_{a}_{b}{out.suffix or '.csv'}")
            _write_coords(pair_out, ["sample_index", "label_name", f"f{a}", f"f{b}"],
                          coords, names, data.labels)
            outputs.append(str(pair_out))
            if args.svg:
                svg = Path(args.svg)
                svg_out = svg.with_name(f"{svg.stem}_pair_{a}_{b}{svg.suffix or '.svg'}")
                write_svg_scatter(svg_out, coords, data.labels, names,
                                  x_label=f"feature {a}", y_label=f"feature {b}")
                outputs.append(str(svg_out))
        manifest.append(("pairs", ";".join(f"{a},{b}" for a, b in pairs)))
    else:
        model = fit_pca2(data, mask)
        coords = project_rows(model, data.features)
        _write_coords(out, ["sample_index", "label_name", "pc1", "pc2"],
                      coords, names, data.labels)
        outputs.append(str(out))
        if args.svg:
            write_svg_scatter(args.svg, coords, data.labels, names,
                              x_label="pc1", y_label="pc2")
            outputs.append(str(args.svg))
        manifest += [
            ("eigenvalue1", model.eigenvalue1),
            ("eigenvalue2", model.eigenvalue2),
        ]

    manifest.append(("outputs", ";".join(outputs)))
    _write_manifest(manifest, out.with_suffix(".manifest.txt"))
    for artefact in outputs:
        print(f"wrote {artefact}")
    return EXIT_OK


# ---------------------------------------------------------------- oracle

def cmd_oracle(args) -> int:
    train = _load(args.train, args)
    eval_set = _load(args.eval, args)
    train, eval_set = unify_vocabulary(train, eval_set)
    with warnings.catch_warnings(record=True) as records:
        warnings.simplefilter("always")
        cfg = GaConfig(alpha=args.alpha, beta=args.beta, k=args.k, seed=0)
    for r in records:
        print(f"warning: {r.message}", file=sys.stderr)
    mask, fitness_value, hits, nf = exhaustive_best(
        train, eval_set, cfg, max_length=args.max_features
    )
    print("command = oracle")
    print(f"alpha = {cfg.alpha!r}")
    print(f"beta = {cfg.beta!r}")
    print(f"k = {cfg.k}")
    print(f"subsets_evaluated = {(1 << train.feature_count) - 1}")
    print(f"best_mask = {mask.to_string()}")
    print(f"best_features = {mask.to_index_string()}")
    print(f"best_fitness = {fitness_value!r}")
    print(f"hits = {hits}")
    print(f"nf = {nf}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evoknn",
        description="Genetic search over feature subsets for nearest-neighbour "
                    "classifiers: dataset synthesis, GA selection, evaluation, "
                    "2D projection, and an exhaustive oracle.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("synth", help="generate a planted-feature dataset pair")
    p.add_argument("--out-dir", default="synth_out", help="output directory")
    p.add_argument("--classes", type=int, default=14)
    p.add_argument("--features", type=int, default=117)
    p.add_argument("--informative", default="70,101,112",
                   help="comma-separated informative feature indices")
    p.add_argument("--separation", type=float, default=10.0,
                   help="gap between adjacent class means on informative features")
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-per-class", type=int, default=None)
    p.add_argument("--test-per-class", type=int, default=None)
    p.add_argument("--class-sizes", default=",".join(str(n) for n in DEFAULT_CLASS_SIZES),
                   help="per-class pool sizes; the pool is split by --test-count")
    p.add_argument("--test-count", type=int, default=50,
                   help="random test samples drawn from the pool (default 50)")
    p.add_argument("--stratified", action="store_true",
                   help="stratify the pool split per class")
    p.set_defaults(func=cmd_synth)

    p = subs.add_parser("select", help="run the genetic feature search")
    p.add_argument("train", help="training CSV")
    p.add_argument("eval", help="evaluation CSV scored inside the fitness")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--pop", type=int, default=50, help="population size (default 50)")
    p.add_argument("--generations", type=int, default=814,
                   help="generation budget (default 814)")
    p.add_argument("--crossover-prob", type=float, default=1.0)
    p.add_argument("--mutation-prob", type=float, default=0.9,
                   help="per-chromosome mutation probability (default 0.9)")
    p.add_argument("--bit-flip-rate", type=float, default=None,
                   help="per-bit flip rate inside a mutation (default 1/L)")
    _ga_flags(p)
    p.add_argument("--seed", type=int, default=12957)
    p.add_argument("--elite", type=int, default=1)
    p.add_argument("--tournament", type=int, default=2)
    p.add_argument("--stop-on-fitness", type=float, default=None)
    p.add_argument("--stall-generations", type=int, default=None)
    p.add_argument("--normalize", action="store_true",
                   help="min-max scale features using training bounds")
    p.add_argument("--parallel", action="store_true",
                   help="evaluate fitness in parallel (identical results)")
    p.add_argument("--holdout", default=None,
                   help="third dataset never seen by the GA, reported in the summary")
    _dataset_flags(p)
    p.set_defaults(func=cmd_select)

    p = subs.add_parser("eval", help="evaluate one mask on a train/test pair")
    p.add_argument("train")
    p.add_argument("test")
    p.add_argument("--mask", required=True,
                   help="bit string, comma-separated indices, or a mask file")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--reject-ties", action="store_true",
                   help="report REJECT instead of breaking vote ties")
    p.add_argument("--normalize", action="store_true")
    _dataset_flags(p)
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser("project", help="2D projection scatter data (PCA or raw pairs)")
    p.add_argument("dataset")
    p.add_argument("--mask", default=None)
    p.add_argument("--out", required=True, help="coordinates CSV path")
    p.add_argument("--svg", default=None, help="optional SVG scatterplot path")
    p.add_argument("--pair", action="append", default=None,
                   help="plot raw features i,j instead of PCA; repeatable; "
                        "'all' expands to every pair of --mask's active features")
    _dataset_flags(p)
    p.set_defaults(func=cmd_project)

    p = subs.add_parser("oracle", help="exhaustive subset search (small feature counts)")
    p.add_argument("train")
    p.add_argument("eval")
    _ga_flags(p)
    p.add_argument("--max-features", type=int, default=15,
                   help="refuse feature counts above this guard (default 15)")
    _dataset_flags(p)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

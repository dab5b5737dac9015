"""Command-line front end: gen | select | loop | purity | bench | sweep.

Every subcommand accepts ``--config FILE`` holding flat ``key=value`` lines
whose keys are the long flag names without dashes; explicit flags override
the file. The resolved configuration is echoed as ``# key=value`` header
lines for provenance. Data outputs are written atomically (temp file then
rename), and report subcommands render a PNG figure next to the delimited
output unless ``--no-figures`` is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from .clustering import kmeans
from .coverage import min_cross_sq_dists
from .errors import ConfigError, CovselectError
from .evalloop import METHODS, LoopConfig, run_loop, run_selector, split_store
from .features import (
    ImbalanceSpec,
    MixtureSpec,
    generate_mixture,
    load_features,
    load_labels,
    make_longtail,
    normalize_rows,
    save_features,
    save_labels,
)
from .kernels import FAMILIES
from .purity import blob_purity, choose_delta, choose_lengthscale, smooth_purity_rates
from .selectors import LabeledPool, ProbMatrix, select_uncertain


# ---------------------------------------------------------------------------
# option plumbing


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean value {text!r}")


def _parse_int_list(text):
    try:
        return [int(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse integer list {text!r}") from None


def _parse_float_list(text):
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse float list {text!r}") from None


def _parse_str_list(text):
    return [tok.strip() for tok in str(text).split(",") if tok.strip()]


class Opt:
    """One CLI option: argparse wiring plus config-file parsing."""

    def __init__(self, flag, default, type=str, help="", choices=None, is_flag=False):
        self.flag = flag
        self.dest = flag.lstrip("-").replace("-", "_")
        self.key = flag.lstrip("-").replace("-", "")
        self.default = default
        self.type = type
        self.help = help
        self.choices = choices
        self.is_flag = is_flag

    def add_to(self, parser):
        if self.is_flag:
            parser.add_argument(self.flag, dest=self.dest, action="store_true",
                                default=argparse.SUPPRESS, help=self.help)
        else:
            parser.add_argument(self.flag, dest=self.dest, type=self.type,
                                choices=self.choices, default=argparse.SUPPRESS,
                                help=self.help)

    def parse_config_value(self, text):
        if self.is_flag:
            return _parse_bool(text)
        value = self.type(text)
        if self.choices is not None and value not in self.choices:
            raise ConfigError(f"{self.flag}: {value!r} not in {tuple(self.choices)}")
        return value


_KERNEL_OPTS = [
    Opt("--kernel", "gaussian", choices=FAMILIES, help="kernel family"),
    Opt("--lengthscale", 1.0, type=float, help="kernel lengthscale (delta/sigma)"),
    Opt("--nu", 1.0, type=float, help="student-t degrees of freedom"),
]

_INPUT_OPTS = [
    Opt("--format", None, choices=("binary", "csv"), help="feature file format (default: by extension)"),
    Opt("--normalize", False, is_flag=True, help="row-normalize features after loading"),
]

_METHOD_OPTS = [
    Opt("--delta", 1.0, type=float, help="hard coverage radius (probcover)"),
    Opt("--typicality-m", 20, type=int, help="neighbors for typicality scores"),
    Opt("--cluster-cap", 500, type=int, help="cluster count cap for typiclust"),
    Opt("--warm-start", False, is_flag=True, help="initialize medoids from the greedy batch"),
    Opt("--max-swaps", -1, type=int, help="medoid swap cap (-1 for the 100*budget default)"),
    Opt("--restarts", 1, type=int, help="medoid random restarts"),
    Opt("--herding-ignore-pool", False, is_flag=True,
        help="exclude pool contents from the herding penalty"),
    Opt("--temperature", 0.1, type=float, help="softmax temperature of the probability surrogate"),
]

SUBCOMMANDS = {}


def _register(name, options, runner, help_text):
    SUBCOMMANDS[name] = {"options": options, "run": runner, "help": help_text}


def _resolve(name, namespace):
    """Defaults < config file < explicit flags, with unknown file keys rejected."""
    spec = SUBCOMMANDS[name]
    by_key = {opt.key: opt for opt in spec["options"]}
    resolved = {opt.dest: opt.default for opt in spec["options"]}
    config_path = namespace.pop("config", None)
    if config_path:
        for key, raw in _read_config_file(config_path):
            norm = key.replace("-", "").replace("_", "").lower()
            if norm not in by_key:
                raise ConfigError(f"{config_path}: unknown config key {key!r}")
            opt = by_key[norm]
            resolved[opt.dest] = opt.parse_config_value(raw)
    resolved.update(namespace)
    return resolved


def _read_config_file(path):
    pairs = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        pairs.append((key.strip(), value.strip()))
    return pairs


def _echo_config(name, resolved, stream=None):
    stream = stream or sys.stdout
    print(f"# subcommand={name}", file=stream)
    for key in sorted(resolved):
        print(f"# {key}={resolved[key]}", file=stream)


def config_header_lines(name, resolved):
    lines = [f"# subcommand={name}"]
    lines += [f"# {key}={resolved[key]}" for key in sorted(resolved)]
    return lines


# ---------------------------------------------------------------------------
# i/o helpers


def atomic_write_text(path, text):
    """Write via a temp file in the same directory, then atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_store(path, fmt, normalize, label_column=None, labels_path=None):
    if fmt is None:
        fmt = "csv" if str(path).endswith(".csv") else "binary"
    store = load_features(path, format=fmt, label_column=label_column)
    if labels_path:
        store = store.with_labels(load_labels(labels_path))
    if normalize:
        store = normalize_rows(store)
    return store


def _load_pool(path):
    if not path:
        return LabeledPool.empty()
    indices = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            indices.append(int(line))
    return LabeledPool(np.asarray(indices, dtype=np.int64))


def _maybe_figure(resolved, out_path, render):
    if resolved.get("no_figures") or not out_path:
        return None
    from . import report

    fig_path = report.figure_path_for(out_path)
    render(report, fig_path)
    return fig_path


# ---------------------------------------------------------------------------
# gen


def _auto_means(n_classes, dim, separation):
    if dim == 2:
        radius = separation / (2.0 * np.sin(np.pi / n_classes)) if n_classes > 1 else 0.0
        angles = 2.0 * np.pi * np.arange(n_classes) / n_classes
        return np.stack([radius * np.cos(angles), radius * np.sin(angles)], axis=1)
    if n_classes > dim:
        raise ConfigError(
            f"auto layout needs dim >= classes ({n_classes} > {dim}); use --mixture-json"
        )
    means = np.zeros((n_classes, dim))
    for c in range(n_classes):
        means[c, c] = separation / np.sqrt(2.0)
    return means


def _run_gen(resolved):
    if resolved["mixture_json"]:
        payload = json.loads(Path(resolved["mixture_json"]).read_text(encoding="utf-8"))
        spec = MixtureSpec(
            components=tuple(
                (tuple(c["mean"]), float(c["stddev"]), float(c["weight"]))
                for c in payload["components"]
            ),
            n_samples=int(payload.get("n_samples", resolved["n"])),
            seed=int(payload.get("seed", resolved["seed"])),
        )
    else:
        means = _auto_means(resolved["classes"], resolved["dim"], resolved["separation"])
        weights = resolved["weights"]
        if weights is None:
            weights = [1.0 / resolved["classes"]] * resolved["classes"]
        if len(weights) != resolved["classes"]:
            raise ConfigError(f"need {resolved['classes']} weights, got {len(weights)}")
        total = sum(weights)
        spec = MixtureSpec(
            components=tuple(
                (tuple(means[c]), resolved["spread"], weights[c] / total)
                for c in range(resolved["classes"])
            ),
            n_samples=resolved["n"],
            seed=resolved["seed"],
        )
    store = generate_mixture(spec)
    if resolved["rho"] is not None:
        store = make_longtail(store, ImbalanceSpec(rho=resolved["rho"], seed=spec.seed))
    if resolved["normalize"]:
        store = normalize_rows(store)
    save_features(store, resolved["out"])
    if resolved["labels_out"]:
        save_labels(store.labels, resolved["labels_out"])
    print(f"wrote {store.n_samples} x {store.dim} features to {resolved['out']}")
    return 0


_register(
    "gen",
    [
        Opt("--out", None, help="output feature file (binary)"),
        Opt("--labels-out", None, help="output label file"),
        Opt("--mixture-json", None, help="JSON mixture description (components/n_samples/seed)"),
        Opt("--classes", 2, type=int, help="number of mixture components (auto layout)"),
        Opt("--dim", 2, type=int, help="feature dimensionality (auto layout)"),
        Opt("--n", 1000, type=int, help="total sample count"),
        Opt("--spread", 1.0, type=float, help="component standard deviation"),
        Opt("--separation", 6.0, type=float, help="distance between adjacent component means"),
        Opt("--weights", None, type=_parse_float_list, help="comma-separated component weights"),
        Opt("--rho", None, type=float, help="long-tail imbalance ratio in (0,1]"),
        Opt("--seed", 0, type=int, help="generator seed"),
        Opt("--normalize", False, is_flag=True, help="row-normalize generated features"),
    ],
    _run_gen,
    "generate a synthetic Gaussian-mixture dataset",
)


# ---------------------------------------------------------------------------
# select


def _run_select(resolved):
    if not resolved["out"]:
        raise ConfigError("select needs --out")
    store = _load_store(resolved["features"], resolved["format"], resolved["normalize"])
    pool = _load_pool(resolved["labeled"])
    method = resolved["method"]
    config = LoopConfig(
        method=method,
        budget=max(resolved["budget"], 1),
        iterations=1,
        seed=resolved["seed"],
        kernel_family=resolved["kernel"],
        lengthscale=resolved["lengthscale"],
        nu=resolved["nu"],
        delta=resolved["delta"],
        typicality_m=resolved["typicality_m"],
        cluster_cap=resolved["cluster_cap"],
        temperature=resolved["temperature"],
        herding_ignore_pool=resolved["herding_ignore_pool"],
        warm_start=resolved["warm_start"],
        max_swaps=None if resolved["max_swaps"] < 0 else resolved["max_swaps"],
        restarts=resolved["restarts"],
    )
    if method in ("uncertainty", "entropy", "margin"):
        if not resolved["probs"]:
            raise ConfigError(f"method {method} needs --probs")
        probs = ProbMatrix(np.loadtxt(resolved["probs"], delimiter=",", ndmin=2))
        mode = {"uncertainty": "least_confident", "entropy": "entropy", "margin": "margin"}[method]
        batch = select_uncertain(probs, pool, resolved["budget"], mode)
    else:
        batch = run_selector(method, store, pool, resolved["budget"], config, resolved["seed"])
    atomic_write_text(resolved["out"], "".join(f"{i}\n" for i in batch.indices))
    print(f"picked {len(batch.indices)} indices -> {resolved['out']}")
    return 0


_register(
    "select",
    [
        Opt("--features", None, help="feature file"),
        Opt("--method", "maxherding", choices=METHODS, help="selection strategy"),
        Opt("--budget", 10, type=int, help="batch size B"),
        Opt("--labeled", None, help="file of already-labeled indices, one per line"),
        Opt("--probs", None, help="csv of class probabilities (uncertainty methods)"),
        Opt("--seed", 0, type=int, help="selector seed"),
        Opt("--out", None, help="output file of selected indices, one per line"),
        *_INPUT_OPTS,
        *_KERNEL_OPTS,
        *_METHOD_OPTS,
    ],
    _run_select,
    "select a batch of indices with one strategy",
)


# ---------------------------------------------------------------------------
# loop


def _loop_config_for_seed(resolved, seed):
    return LoopConfig(
        method=resolved["method"],
        budget=resolved["budget"],
        iterations=resolved["iters"],
        seed=seed,
        kernel_family=resolved["kernel"],
        lengthscale=resolved["lengthscale"],
        nu=resolved["nu"],
        delta=resolved["delta"],
        typicality_m=resolved["typicality_m"],
        cluster_cap=resolved["cluster_cap"],
        temperature=resolved["temperature"],
        herding_ignore_pool=resolved["herding_ignore_pool"],
        warm_start=resolved["warm_start"],
        max_swaps=None if resolved["max_swaps"] < 0 else resolved["max_swaps"],
        restarts=resolved["restarts"],
        normalize=resolved["normalize"],
        test_fraction=resolved["test_fraction"],
    )


def _run_one_loop(args):
    train, test, config = args
    return run_loop(train, test, config)


def _run_loop_cmd(resolved):
    if not resolved["out"]:
        raise ConfigError("loop needs --out")
    train = _load_store(
        resolved["train_features"], resolved["format"], resolved["normalize"],
        labels_path=resolved["train_labels"],
    )
    if resolved["test_features"]:
        test = _load_store(
            resolved["test_features"], resolved["format"], resolved["normalize"],
            labels_path=resolved["test_labels"],
        )
    else:
        train, test = split_store(train, resolved["test_fraction"], resolved["seed"])
    seeds = resolved["seeds"]
    jobs = max(1, resolved["jobs"])
    tasks = [(train, test, _loop_config_for_seed(resolved, seed)) for seed in seeds]
    if jobs == 1 or len(tasks) == 1:
        results = [_run_one_loop(t) for t in tasks]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool_exec:
            results = list(pool_exec.map(_run_one_loop, tasks))
    records = [rec for run in results for rec in run]
    lines = [json.dumps(rec.to_json_dict()) for rec in records]
    atomic_write_text(resolved["out"], "".join(line + "\n" for line in lines))
    _maybe_figure(
        resolved,
        resolved["out"],
        lambda report, p: report.save_loop_figure([r.to_json_dict() for r in records], p),
    )
    print(f"wrote {len(records)} records -> {resolved['out']}")
    return 0


_register(
    "loop",
    [
        Opt("--train-features", None, help="training feature file"),
        Opt("--train-labels", None, help="training label file"),
        Opt("--test-features", None, help="test feature file (else --test-fraction split)"),
        Opt("--test-labels", None, help="test label file"),
        Opt("--test-fraction", 0.25, type=float, help="held-out fraction when no test files"),
        Opt("--method", "maxherding", choices=METHODS, help="selection strategy"),
        Opt("--budget", 10, type=int, help="labels per iteration"),
        Opt("--iters", 10, type=int, help="number of iterations T"),
        Opt("--seeds", [0], type=_parse_int_list, help="comma-separated run seeds"),
        Opt("--seed", 0, type=int, help="split seed when using --test-fraction"),
        Opt("--jobs", 1, type=int, help="parallel runs"),
        Opt("--out", None, help="output records JSONL"),
        Opt("--no-figures", False, is_flag=True, help="skip figure rendering"),
        *_INPUT_OPTS,
        *_KERNEL_OPTS,
        *_METHOD_OPTS,
    ],
    _run_loop_cmd,
    "run the full active-learning simulation loop",
)


# ---------------------------------------------------------------------------
# purity


def _run_purity(resolved):
    store = _load_store(resolved["features"], resolved["format"], False)
    grid = np.linspace(resolved["grid_min"], resolved["grid_max"], resolved["grid_steps"])
    if resolved["kernel"] == "tophat":
        sweep = choose_delta(store, resolved["classes"], grid=grid, target=resolved["target"],
                             seed=resolved["seed"], normalize=not resolved["no_normalize"])
    else:
        sweep = choose_lengthscale(store, resolved["classes"], kernel_family=resolved["kernel"],
                                   grid=grid, target=resolved["target"], seed=resolved["seed"],
                                   nu=resolved["nu"], normalize=not resolved["no_normalize"])
    lines = ["value,purity_rate"]
    lines += [f"{v:.10g},{r:.10g}" for v, r in zip(sweep.grid, sweep.purity_rates)]
    print("\n".join(lines))
    print(f"chosen={sweep.chosen:.10g}")
    if sweep.started_below_target:
        print("# warning: purity below target at the smallest grid value", file=sys.stderr)
    if resolved["out"]:
        header = config_header_lines("purity", resolved)
        atomic_write_text(resolved["out"], "\n".join(header + lines) + "\n")
        _maybe_figure(resolved, resolved["out"],
                      lambda report, p: report.save_purity_figure(sweep, p))
    return 0


_register(
    "purity",
    [
        Opt("--features", None, help="feature file"),
        Opt("--classes", 10, type=int, help="pseudo-label cluster count"),
        Opt("--grid-min", 0.05, type=float, help="smallest grid value"),
        Opt("--grid-max", 1.0, type=float, help="largest grid value"),
        Opt("--grid-steps", 20, type=int, help="grid size"),
        Opt("--target", 0.95, type=float, help="purity threshold"),
        Opt("--seed", 0, type=int, help="pseudo-label seed"),
        Opt("--out", None, help="optional output CSV"),
        Opt("--no-normalize", False, is_flag=True, help="skip row normalization"),
        Opt("--no-figures", False, is_flag=True, help="skip figure rendering"),
        *_INPUT_OPTS,
        *_KERNEL_OPTS,
    ],
    _run_purity,
    "sweep purity against radius/lengthscale and pick a value",
)


# ---------------------------------------------------------------------------
# bench


def bench_rows(store, methods, budget, iters, seed, config_builder):
    """Per-(method, iteration) wall time of the selection call alone."""
    from .kmedoids import derive_seed

    rows = []
    for method in methods:
        pool = LabeledPool.empty()
        config = config_builder(method)
        for t in range(1, iters + 1):
            seed_t = derive_seed(seed, t)
            tic = time.perf_counter()
            batch = run_selector(method, store, pool, budget, config, seed_t)
            wall_ms = (time.perf_counter() - tic) * 1e3
            pool = pool.extended(batch.indices, t)
            rows.append(
                {"method": method, "iteration": t, "ms_per_selection": wall_ms / budget}
            )
    return rows


def _run_bench(resolved):
    store = _load_store(resolved["features"], resolved["format"], resolved["normalize"])
    methods = resolved["methods"]
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}")

    def builder(method):
        return LoopConfig(
            method=method,
            budget=resolved["budget"],
            iterations=resolved["iters"],
            seed=resolved["seed"],
            kernel_family=resolved["kernel"],
            lengthscale=resolved["lengthscale"],
            nu=resolved["nu"],
            delta=resolved["delta"],
            warm_start=resolved["warm_start"],
            max_swaps=None if resolved["max_swaps"] < 0 else resolved["max_swaps"],
            restarts=resolved["restarts"],
            typicality_m=resolved["typicality_m"],
            cluster_cap=resolved["cluster_cap"],
            temperature=resolved["temperature"],
            herding_ignore_pool=resolved["herding_ignore_pool"],
        )

    rows = bench_rows(store, methods, resolved["budget"], resolved["iters"],
                      resolved["seed"], builder)
    lines = ["method,iteration,ms_per_selection"]
    lines += [f"{r['method']},{r['iteration']},{r['ms_per_selection']:.6f}" for r in rows]
    if resolved["out"]:
        header = config_header_lines("bench", resolved)
        atomic_write_text(resolved["out"], "\n".join(header + lines) + "\n")
        _maybe_figure(resolved, resolved["out"],
                      lambda report, p: report.save_bench_figure(rows, p))
    else:
        print("\n".join(lines))
    for method in methods:
        per = [r["ms_per_selection"] for r in rows if r["method"] == method]
        print(f"# {method}: mean={np.mean(per):.3f} ms median={np.median(per):.3f} ms per selection")
    return 0


_register(
    "bench",
    [
        Opt("--features", None, help="feature file"),
        Opt("--methods", ["maxherding"], type=_parse_str_list, help="comma-separated methods"),
        Opt("--budget", 10, type=int, help="selections per iteration"),
        Opt("--iters", 10, type=int, help="iterations"),
        Opt("--seed", 0, type=int, help="seed"),
        Opt("--out", None, help="output CSV"),
        Opt("--no-figures", False, is_flag=True, help="skip figure rendering"),
        *_INPUT_OPTS,
        *_KERNEL_OPTS,
        *_METHOD_OPTS,
    ],
    _run_bench,
    "time per-selection cost of methods across loop iterations",
)


# ---------------------------------------------------------------------------
# sweep


def _sweep_purity_rate(store, method, value, classes, nu, seed):
    assignments = kmeans(store.values, classes, seed=seed).assignments
    if method == "probcover":
        return blob_purity(store, assignments, value)
    min_sq = min_cross_sq_dists(store.values, assignments)
    family = "gaussian"
    return float(smooth_purity_rates(min_sq, family, [value], nu=nu)[0])


def _run_sweep(resolved):
    if not resolved["out"]:
        raise ConfigError("sweep needs --out")
    store = _load_store(
        resolved["features"], resolved["format"], resolved["normalize"],
        labels_path=resolved["labels"],
    )
    classes = resolved["classes"] or store.n_classes
    rows = []
    for value in resolved["values"]:
        purity_rate = _sweep_purity_rate(store, resolved["method"], value, classes,
                                         resolved["nu"], resolved["seed"])
        for seed in resolved["seeds"]:
            overrides = dict(resolved)
            if resolved["method"] == "probcover":
                overrides["delta"] = value
            else:
                overrides["lengthscale"] = value
            train, test = split_store(store, resolved["test_fraction"], resolved["seed"])
            records = run_loop(train, test, _loop_config_for_seed(overrides, seed))
            for rec in records:
                rows.append(
                    {
                        "value": value,
                        "purity_rate": purity_rate,
                        "seed": seed,
                        "iteration": rec.iteration,
                        "labeled_size": rec.labeled_size,
                        "accuracy": rec.accuracy,
                    }
                )
    lines = ["value,purity_rate,seed,iteration,labeled_size,accuracy"]
    lines += [
        f"{r['value']:.10g},{r['purity_rate']:.10g},{r['seed']},{r['iteration']},"
        f"{r['labeled_size']},{r['accuracy']:.10g}"
        for r in rows
    ]
    header = config_header_lines("sweep", resolved)
    atomic_write_text(resolved["out"], "\n".join(header + lines) + "\n")
    _maybe_figure(resolved, resolved["out"],
                  lambda report, p: report.save_sweep_figure(rows, p))
    spread = final_accuracy_spread(rows)
    print(f"# final-accuracy spread across values: {spread:.6f}")
    return 0


def final_accuracy_spread(rows):
    """Max minus min, over swept values, of the seed-averaged final accuracy."""
    last_per_run = {}
    for r in rows:
        key = (r["value"], r["seed"])
        if key not in last_per_run or r["iteration"] > last_per_run[key][0]:
            last_per_run[key] = (r["iteration"], r["accuracy"])
    per_value = {}
    for (value, _), (_, acc) in last_per_run.items():
        per_value.setdefault(value, []).append(acc)
    means = [float(np.mean(accs)) for accs in per_value.values()]
    return max(means) - min(means)


_register(
    "sweep",
    [
        Opt("--features", None, help="feature file"),
        Opt("--labels", None, help="label file"),
        Opt("--method", "maxherding", choices=METHODS, help="method to sweep"),
        Opt("--values", [1.0], type=_parse_float_list, help="comma-separated parameter values"),
        Opt("--classes", 0, type=int, help="pseudo-label cluster count (0: from labels)"),
        Opt("--budget", 10, type=int, help="labels per iteration"),
        Opt("--iters", 10, type=int, help="iterations"),
        Opt("--seeds", [0], type=_parse_int_list, help="comma-separated run seeds"),
        Opt("--seed", 0, type=int, help="split / pseudo-label seed"),
        Opt("--test-fraction", 0.25, type=float, help="held-out fraction"),
        Opt("--out", None, help="output CSV"),
        Opt("--no-figures", False, is_flag=True, help="skip figure rendering"),
        *_INPUT_OPTS,
        *_KERNEL_OPTS,
        *_METHOD_OPTS,
    ],
    _run_sweep,
    "run the loop across a parameter grid (radius/lengthscale sensitivity)",
)


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    parser = argparse.ArgumentParser(
        prog="covselect",
        description="coverage-maximizing subset selection for low-budget active learning",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, spec in SUBCOMMANDS.items():
        sub = subparsers.add_parser(name, help=spec["help"])
        sub.add_argument("--config", default=None, help="key=value config file")
        for opt in spec["options"]:
            opt.add_to(sub)
    return parser


def main(argv=None):
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    name = args.pop("subcommand")
    try:
        resolved = _resolve(name, args)
        _echo_config(name, resolved)
        return SUBCOMMANDS[name]["run"](resolved)
    except (CovselectError, IndexError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

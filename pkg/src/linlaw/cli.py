"""Command-line entry point: ``linlaw {run,synth,transform,eval}``.

Every run writes its artifacts under ``--out``:

    <SYMBOL>/instances.lltw      balanced instance windows
    <SYMBOL>/lawbank.lltb        training law bank
    <SYMBOL>/transformed.csv     transformed test set
    <SYMBOL>/reports/<cond>_<classifier>.json
    summary.txt, summary.json    accuracy tables (raw baseline and LLT)
    manifest.json                resolved config and sha256 of every input/output

Exit codes: 0 success, 1 internal error, 2 usage or input error. Errors are
reported on stderr as one JSON object ``{"error": kind, "message": ...}``.
"""

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from ._validation import check_int
from .classifiers import KINDS, ClassifierSpec, Dataset, cross_validate, render_table, tune
from .classifiers.model_selection import DEFAULT_PARAMS
from .classifiers.report import report_json
from .exceptions import LinlawError
from .llt import SELECT_RULES, EmbeddingConfig, TransformedDataset, build_law_bank, dump_law_bank, transform_set
from .market_data import audit_continuity, read_candle_csv
from .synth import SynthSpec, generate_synthetic
from .windowing import SamplingConfig, balance_classes, dump_instances, make_instances, select, split_train_test

log = logging.getLogger("linlaw")

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2
SAMPLE_DATA = "sample_BTCUSDT_1m.csv.gz"


class UsageError(LinlawError):
    kind = "usage"


class InputIOError(LinlawError):
    kind = "io"


@dataclass
class RunConfig:
    """Fully resolved settings of one invocation."""

    inputs: list = field(default_factory=list)  # [(symbol, path)]
    synth: str | None = None
    dim: int = 10
    lag: int = 11
    select: str = "var"
    test_ratio: float = 0.25
    folds: int = 10
    budget: int = 60
    classifiers: list = field(default_factory=lambda: list(KINDS))
    seed: int = 12345
    out: str = "llt_out"
    tune: bool = True

    def validate(self):
        EmbeddingConfig(self.dim, self.lag)
        SamplingConfig(test_ratio=self.test_ratio, seed=self.seed)
        if self.select not in SELECT_RULES:
            raise UsageError(f"--select must be one of {SELECT_RULES}")
        check_int(self.folds, "folds", min_value=2)
        check_int(self.budget, "budget", min_value=1)
        check_int(self.seed, "seed", min_value=0)
        bad = [c for c in self.classifiers if c not in KINDS]
        if bad or not self.classifiers:
            raise UsageError(f"unknown classifiers {bad}; choose from {','.join(KINDS)}")
        for _, path in self.inputs:
            if not Path(path).is_file():
                raise InputIOError(f"input file not found: {path}")
        if self.synth is not None and not Path(self.synth).is_file():
            raise InputIOError(f"synth spec not found: {self.synth}")
        return self

    def echo(self):
        data = asdict(self)
        data["inputs"] = [f"{s}={p}" for s, p in self.inputs]
        return data


_CAST = {
    "dim": int, "lag": int, "folds": int, "budget": int, "seed": int,
    "test_ratio": float, "select": str, "out": str, "synth": str,
    "classifiers": lambda v: [c.strip() for c in v.split(",") if c.strip()],
    "input": None,
}


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment. Keys use flag names."""
    values = {}
    inputs = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CAST:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        if key == "input":
            inputs.append(value)
            continue
        try:
            values[key] = _CAST[key](value)
        except ValueError:
            raise UsageError(f"{path}:{n}: bad value for {key}: {value!r}") from None
    if inputs:
        values["inputs"] = inputs
    return values


def _parse_input(spec):
    if "=" in spec:
        symbol, path = spec.split("=", 1)
    else:
        path, symbol = spec, Path(spec).name.split(".")[0]
    if not symbol or not path:
        raise UsageError(f"--input expects SYMBOL=path, got {spec!r}")
    return symbol.upper(), path


def resolve_config(args):
    """CLI flags > config file > built-in defaults."""
    merged = {}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    for key in ("dim", "lag", "select", "test_ratio", "folds", "budget", "seed", "out", "synth"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if getattr(args, "classifiers", None):
        merged["classifiers"] = _CAST["classifiers"](args.classifiers)
    if getattr(args, "input", None):
        merged["inputs"] = args.input
    if getattr(args, "sample", False):
        merged.setdefault("inputs", [])
        merged["inputs"] = list(merged["inputs"]) + [f"BTCUSDT={sample_data_path()}"]
    if getattr(args, "no_tune", False):
        merged["tune"] = False
    merged["inputs"] = [_parse_input(s) for s in merged.get("inputs", [])]
    return RunConfig(**merged).validate()


def sample_data_path():
    return str(resources.files("linlaw") / "data" / SAMPLE_DATA)


def _sha256(data):
    return hashlib.sha256(data).hexdigest()


class ArtifactWriter:
    """Writes files under ``root`` and remembers their content digests."""

    def __init__(self, root):
        self.root = Path(root)
        self.digests = {}

    def write(self, rel, data, digest_of=None):
        path = self.root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(data, str):
            data = data.encode("utf-8")
        path.write_bytes(data)
        if isinstance(digest_of, str):
            digest_of = digest_of.encode("utf-8")
        self.digests[str(rel)] = _sha256(digest_of if digest_of is not None else data)
        return path


def _evaluate(ds, kind, cfg, label):
    if cfg.tune:
        spec, report, _ = tune(ds, kind, cfg.budget, cfg.folds, cfg.seed)
    else:
        spec = ClassifierSpec(kind, DEFAULT_PARAMS[kind])
        report = cross_validate(ds, spec, cfg.folds, cfg.seed)
    log.info("%s %-10s instance acc %.3f (row %.3f) params %s", label, kind,
             report.instance_accuracy, report.row_accuracy, spec.params)
    return report


def _write_report(writer, rel, report):
    writer.write(rel, report_json(report), digest_of=report_json(report, timing=False))


def load_symbol_instances(symbol, path, cfg):
    series = read_candle_csv(path, symbol)
    gaps = audit_continuity(series)
    log.info("%s: %d bars, %d rejected rows, %d missing minutes (coverage %.4f)",
             symbol, len(series), series.rejected_rows, gaps.total_missing,
             gaps.coverage_fraction)
    instances = make_instances(series, SamplingConfig(test_ratio=cfg.test_ratio, seed=cfg.seed))
    return balance_classes(instances, cfg.seed)


def llt_stage(symbol, instances, cfg, writer):
    """Split, build the law bank and transform the test set; writes artifacts."""
    sampling = SamplingConfig(test_ratio=cfg.test_ratio, seed=cfg.seed)
    split = split_train_test(instances, sampling)
    train = select(instances, split.train_ids)
    test = select(instances, split.test_ids)
    bank = build_law_bank(train, EmbeddingConfig(cfg.dim, cfg.lag))
    td = transform_set(test, bank, cfg.select)
    log.info("%s: %d instances (%d train / %d test), transformed %d x %d",
             symbol, len(instances), len(train), len(test), *td.shape)
    writer.write(f"{symbol}/instances.lltw", dump_instances(instances))
    writer.write(f"{symbol}/lawbank.lltb", dump_law_bank(bank))
    writer.write(f"{symbol}/transformed.csv", td.to_csv())
    return td


def evaluate_symbol(symbol, instances, td, cfg, writer, accuracies):
    llt_ds = Dataset.from_transformed(td)
    raw_ds = Dataset.from_instances(instances)
    for kind in cfg.classifiers:
        for cond, ds in (("raw", raw_ds), ("llt", llt_ds)):
            report = _evaluate(ds, kind, cfg, f"{symbol} {cond}")
            _write_report(writer, f"{symbol}/reports/{cond}_{kind}.json", report)
            accuracies[cond].setdefault(symbol, {})[kind] = report.instance_accuracy


def finish(cfg, writer, symbols, accuracies, input_digests):
    table = render_table(accuracies, symbols, cfg.classifiers)
    writer.write("summary.txt", table)
    summary = {"config": cfg.echo(), "instance_accuracy": accuracies}
    writer.write("summary.json", json.dumps(summary, indent=2) + "\n")
    manifest = {
        "config": cfg.echo(),
        "inputs": input_digests,
        "artifacts": dict(sorted(writer.digests.items())),
    }
    (writer.root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(table)


def _input_digests(cfg):
    out = {}
    for _, path in cfg.inputs:
        out[path] = _sha256(Path(path).read_bytes())
    if cfg.synth:
        out[cfg.synth] = _sha256(Path(cfg.synth).read_bytes())
    return out


def run_experiment(cfg):
    if not cfg.inputs:
        raise UsageError("run needs at least one --input SYMBOL=path (or --sample)")
    writer = ArtifactWriter(cfg.out)
    accuracies = {"raw": {}, "llt": {}}
    symbols = []
    for symbol, path in cfg.inputs:
        instances = load_symbol_instances(symbol, path, cfg)
        td = llt_stage(symbol, instances, cfg, writer)
        evaluate_symbol(symbol, instances, td, cfg, writer, accuracies)
        symbols.append(symbol)
    finish(cfg, writer, symbols, accuracies, _input_digests(cfg))
    return EXIT_OK


def synth_spec_for(cfg):
    if cfg.synth:
        spec = SynthSpec.from_json(Path(cfg.synth).read_text(encoding="utf-8"))
    else:
        spec = SynthSpec(noise_sigma=0.01, noise_relative=True, seed=cfg.seed)
    spec.check_embedding(cfg.dim)
    return spec


def run_synth(cfg):
    spec = synth_spec_for(cfg)
    instances = generate_synthetic(spec)
    writer = ArtifactWriter(cfg.out)
    writer.write("SYNTH/synth_spec.json", spec.to_json() + "\n")
    accuracies = {"raw": {}, "llt": {}}
    td = llt_stage("SYNTH", instances, cfg, writer)
    evaluate_symbol("SYNTH", instances, td, cfg, writer, accuracies)
    finish(cfg, writer, ["SYNTH"], accuracies, _input_digests(cfg))
    return EXIT_OK


def run_transform(cfg):
    if not cfg.inputs and not cfg.synth:
        raise UsageError("transform needs --input SYMBOL=path or --synth SPECFILE")
    writer = ArtifactWriter(cfg.out)
    for symbol, path in cfg.inputs:
        llt_stage(symbol, load_symbol_instances(symbol, path, cfg), cfg, writer)
    if cfg.synth:
        llt_stage("SYNTH", generate_synthetic(synth_spec_for(cfg)), cfg, writer)
    manifest = {"config": cfg.echo(), "inputs": _input_digests(cfg),
                "artifacts": dict(sorted(writer.digests.items()))}
    (writer.root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


def run_eval(cfg, transformed):
    path = Path(transformed)
    if not path.is_file():
        raise InputIOError(f"transformed CSV not found: {transformed}")
    td = TransformedDataset.from_csv(path.read_text(encoding="utf-8"))
    ds = Dataset.from_transformed(td)
    writer = ArtifactWriter(cfg.out)
    symbol = path.parent.name or "DATA"
    accuracies = {"llt": {symbol: {}}}
    for kind in cfg.classifiers:
        report = _evaluate(ds, kind, cfg, f"{symbol} llt")
        _write_report(writer, f"reports/llt_{kind}.json", report)
        accuracies["llt"][symbol][kind] = report.instance_accuracy
    digests = {str(path): _sha256(path.read_bytes())}
    finish(cfg, writer, [symbol], accuracies, digests)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="plain-text key = value settings file")
    common.add_argument("--input", action="append", metavar="SYMBOL=PATH",
                        help="candle CSV (plain or .gz); repeatable")
    common.add_argument("--synth", metavar="SPECFILE", help="synthetic data spec (JSON)")
    common.add_argument("--dim", type=int, help="embedding order l (default 10)")
    common.add_argument("--lag", type=int, help="embedding row stride (default 11)")
    common.add_argument("--select", choices=SELECT_RULES, help="column selection rule")
    common.add_argument("--test-ratio", dest="test_ratio", type=float)
    common.add_argument("--folds", type=int, help="cross-validation folds (default 10)")
    common.add_argument("--budget", type=int, help="random-search draws per classifier")
    common.add_argument("--no-tune", dest="no_tune", action="store_true",
                        help="evaluate default hyperparameters instead of searching")
    common.add_argument("--classifiers", help=f"comma list from {','.join(KINDS)}")
    common.add_argument("--seed", type=int, help="root seed (default 12345)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--sample", action="store_true",
                        help="add the bundled sample BTCUSDT file as an input")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="linlaw", description="Linear law-based feature space transformation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("run", parents=[common], help="full experiment on candle CSVs")
    sub.add_parser("synth", parents=[common], help="full experiment on synthetic data")
    sub.add_parser("transform", parents=[common], help="stop after the transform")
    ev = sub.add_parser("eval", parents=[common], help="classify a transformed CSV")
    ev.add_argument("transformed", help="CSV written by the transform stage")
    return parser


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(message)s", stream=sys.stderr)
        cfg = resolve_config(args)
        if args.command == "run":
            return run_experiment(cfg)
        if args.command == "synth":
            return run_synth(cfg)
        if args.command == "transform":
            return run_transform(cfg)
        return run_eval(cfg, args.transformed)
    except OSError as exc:
        return _fail("io", str(exc), EXIT_USAGE)
    except LinlawError as exc:
        return _fail(exc.kind, str(exc), EXIT_USAGE)
    except Exception as exc:  # noqa: BLE001 - reported as machine-readable JSON
        return _fail("internal", f"{type(exc).__name__}: {exc}", EXIT_INTERNAL)


if __name__ == "__main__":
    sys.exit(main())

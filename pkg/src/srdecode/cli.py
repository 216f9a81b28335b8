"""Command-line interface: ``srdecode <subcommand> [options]``.

Every option may also come from a JSON config file given with ``--config``;
keys are option names with dashes or underscores.  Options on the command
line win over the config file, which wins over built-in defaults.

Exit codes: 0 success, 2 usage or configuration error, 3 malformed input
data, 4 internal error.  Logs and timings go to standard error, data to
files or standard output.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Sequence

from srdecode.core import ScoreTableError, TagSet
from srdecode.corpus import (
    CorpusFormatError,
    read_chunk_sentences,
    read_conll_chunks,
    read_conll_dep,
    read_dep_sentences,
    write_conll_chunks,
    write_conll_dep,
)
from srdecode.dep.dual import sr_dual_decode
from srdecode.dep.perceptron import (
    load_dep_model,
    save_dep_model,
    train_dep_perceptron,
)
from srdecode.dep.perceptron import ModelFormatError as DepModelError
from srdecode.dep.trees import DepInstance
from srdecode.metrics import span_f1, uas
from srdecode.reg import BoundParams, SplitConfig, alpha_sweep, split_corpus
from srdecode.scorefiles import ScoreFileError, read_arc_scores, read_score_tables
from srdecode.seq.decode import PruneConfig, SearchSpaceExhausted, sr_viterbi
from srdecode.seq.ngrams import MAX_ORDER, harvest_dictionary
from srdecode.seq.perceptron import (
    ModelFormatError as ChainModelError,
    load_chain_model,
    models_bundle,
    models_dictionary,
    save_chain_model,
    train_chain_perceptron,
)

log = logging.getLogger("srdecode")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4
DATA_ERRORS = (
    CorpusFormatError,
    ScoreFileError,
    ScoreTableError,
    ChainModelError,
    DepModelError,
    SearchSpaceExhausted,
)


class UsageError(Exception):
    pass


def sub_seed(seed: int, stage: str) -> int:
    """Independent, reproducible seed for one named stage of a run."""
    digest = hashlib.sha256(f"{seed}/{stage}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class RunConfig:
    command: str = ""
    train: str | None = None
    input: str | None = None
    output: str | None = None
    out_dir: str | None = None
    models: list[str] = field(default_factory=list)
    score_tables: str | None = None
    simple: str | None = None
    complex: str | None = None
    simple_scores: str | None = None
    complex_scores: str | None = None
    report: str | None = None
    dictionary_corpus: str | None = None
    task: str | None = None
    gold: str | None = None
    pred: str | None = None
    tsv: str | None = None
    order: int = 3
    orders: list[int] = field(default_factory=lambda: [1, 2])
    top_k: int = 5
    dictionary: bool = True
    order_weights: list[float] | None = None
    lam: float = 0.5
    max_iter: int = 500
    eta0: float | None = None
    epochs: int = 10
    seed: int = 0
    alpha: int = 1
    jobs: int = 1
    d: float = 1.0
    tau: float = 1.0
    rho: float = 1.0
    v: float = 1.0
    n: float = 2.0
    m: float = 1.0
    lambda_w: float = 1.0
    gamma: float = 1.0
    delta: float = math.exp(-1.0)
    empirical_risk: float = 0.0
    alphas: list[float] | None = None


_FIELDS = {f.name for f in fields(RunConfig)}


def _need_file(cfg: RunConfig, name: str) -> Path:
    value = getattr(cfg, name)
    if value is None:
        raise UsageError(f"--{name.replace('_', '-')} is required")
    p = Path(value)
    if not p.is_file():
        raise UsageError(f"--{name.replace('_', '-')}: no such file: {value}")
    return p


def _need_out(cfg: RunConfig, name: str) -> Path:
    value = getattr(cfg, name)
    if value is None:
        raise UsageError(f"--{name.replace('_', '-')} is required")
    return Path(value)


def validate(cfg: RunConfig) -> None:
    """Check every value the chosen subcommand uses before any work starts."""
    c = cfg.command
    if cfg.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if c in ("train-seq", "train-dep"):
        _need_file(cfg, "train")
        _need_out(cfg, "out_dir")
        if cfg.epochs < 0:
            raise UsageError("--epochs must be >= 0")
    if c == "train-seq":
        if not 1 <= cfg.order <= MAX_ORDER:
            raise UsageError(f"--order must lie in 1..{MAX_ORDER}")
        if cfg.alpha < 1:
            raise UsageError("--alpha must be >= 1")
    if c == "train-dep":
        if not cfg.orders or any(o not in (1, 2) for o in cfg.orders):
            raise UsageError("--orders must be a subset of {1, 2}")
    if c == "decode-seq":
        _need_out(cfg, "output")
        if bool(cfg.models) == bool(cfg.score_tables):
            raise UsageError("give either --models or --score-tables")
        if cfg.models:
            _need_file(cfg, "input")
            for m in cfg.models:
                if not Path(m).is_file():
                    raise UsageError(f"--models: no such file: {m}")
        else:
            _need_file(cfg, "score_tables")
            if cfg.dictionary and cfg.dictionary_corpus is None:
                raise UsageError("score tables carry no dictionary: give --dictionary-corpus or --no-dictionary")
        if cfg.dictionary_corpus is not None:
            _need_file(cfg, "dictionary_corpus")
        if cfg.top_k < 1:
            raise UsageError("--top-k must be >= 1")
        if cfg.order_weights is not None and any(
            not math.isfinite(w) or w < 0 for w in cfg.order_weights
        ):
            raise UsageError("--order-weights must be finite and non-negative")
    if c == "decode-dep":
        _need_out(cfg, "output")
        if cfg.simple and cfg.complex:
            _need_file(cfg, "input")
            _need_file(cfg, "simple")
            _need_file(cfg, "complex")
        elif cfg.simple_scores and cfg.complex_scores:
            _need_file(cfg, "simple_scores")
            _need_file(cfg, "complex_scores")
        else:
            raise UsageError("give --simple and --complex models, or --simple-scores and --complex-scores")
        if not 0.0 <= cfg.lam <= 1.0:
            raise UsageError("--lam must lie in [0, 1]")
        if cfg.max_iter < 0:
            raise UsageError("--max-iter must be >= 0")
        if cfg.eta0 is not None and not cfg.eta0 > 0:
            raise UsageError("--eta0 must be positive")
    if c == "eval":
        if cfg.task not in ("chunk", "dep"):
            raise UsageError("--task must be 'chunk' or 'dep'")
        _need_file(cfg, "gold")
        _need_file(cfg, "pred")
    if c == "bound":
        try:
            bound_params(cfg)
            for a in cfg.alphas or ():
                bound_params(cfg, a)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


# -- subcommands --------------------------------------------------------------


def cmd_train_seq(cfg: RunConfig) -> None:
    corpus = read_conll_chunks(cfg.train)
    if not corpus:
        raise CorpusFormatError(cfg.train, 0, "empty corpus")
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train = corpus
    if cfg.alpha > 1:
        train = split_corpus(corpus, SplitConfig(cfg.alpha))
    lines = [
        f"# sentences\t{len(corpus)}",
        f"# alpha\t{cfg.alpha}",
        f"# training samples\t{len(train)}",
        "order\tepoch\tmistakes",
    ]
    for order in range(1, cfg.order + 1):
        t0 = time.perf_counter()
        model = train_chain_perceptron(train, order, cfg.epochs, sub_seed(cfg.seed, f"train-seq/{order}"))
        log.info("trained order-%d chain model in %.2fs", order, time.perf_counter() - t0)
        save_chain_model(model, out_dir / f"chain-order{order}.json")
        lines += [f"{order}\t{e}\t{k}" for e, k in enumerate(model.epoch_mistakes, start=1)]
    (out_dir / "train-log.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _decode_one(job):
    bundle, prune = job
    return sr_viterbi(bundle, prune)


def _run(fn: Callable, jobs: Sequence, workers: int) -> list:
    """Map ``fn`` over ``jobs`` keeping input order."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def cmd_decode_seq(cfg: RunConfig) -> None:
    t0 = time.perf_counter()
    if cfg.models:
        models = [load_chain_model(p) for p in cfg.models]
        sentences = read_chunk_sentences(cfg.input)
        try:
            bundles = [models_bundle(models, s, cfg.order_weights) for s in sentences]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        tagset = models[0].tagset
        dictionary = models_dictionary(models)
    else:
        records = read_score_tables(cfg.score_tables)
        try:
            bundles = [r.bundle(cfg.order_weights) for r in records]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        tagset = records[0].tags if records else TagSet(("O",))
        dictionary = frozenset()
    if cfg.dictionary_corpus is not None:
        max_order = max((b.max_order for b in bundles), default=1)
        gold = read_conll_chunks(cfg.dictionary_corpus, tagset)
        dictionary = harvest_dictionary(gold, max_order)
    prune = PruneConfig(
        top_k=min(cfg.top_k, len(tagset)),
        dictionary=dictionary,
        dictionary_enabled=cfg.dictionary,
    )
    t1 = time.perf_counter()
    predictions = _run(_decode_one, [(b, prune) for b in bundles], cfg.jobs)
    t2 = time.perf_counter()
    write_conll_chunks(cfg.output, predictions)
    t3 = time.perf_counter()
    log.info("timing: load %.3fs, decode %.3fs, write %.3fs", t1 - t0, t2 - t1, t3 - t2)


def _parse_one(job):
    f, g, lam, max_iter, eta0 = job
    tree, state = sr_dual_decode(f, g, lam, max_iter, eta0)
    return tree, state.agreed, state.iterations


def cmd_decode_dep(cfg: RunConfig) -> None:
    t0 = time.perf_counter()
    if cfg.simple:
        simple, complex_ = load_dep_model(cfg.simple), load_dep_model(cfg.complex)
        if simple.order != 1 or complex_.order != 2:
            raise UsageError("--simple must be a first-order model and --complex a sibling model")
        sentences = read_dep_sentences(cfg.input)
        fs = [simple.part_scores(x) for x in sentences]
        gs = [complex_.part_scores(x) for x in sentences]
    else:
        fs = read_arc_scores(cfg.simple_scores, second_order=False)
        gs = read_arc_scores(cfg.complex_scores, second_order=True)
        if len(fs) != len(gs) or any(f.n != g.n for f, g in zip(fs, gs)):
            raise CorpusFormatError(cfg.complex_scores, 0, "score files describe different sentences")
        sentences = [
            DepInstance(tuple(f"w{i}" for i in range(1, f.n + 1)), ("_",) * f.n) for f in fs
        ]
    t1 = time.perf_counter()
    jobs = [(f, g, cfg.lam, cfg.max_iter, cfg.eta0) for f, g in zip(fs, gs)]
    results = _run(_parse_one, jobs, cfg.jobs)
    t2 = time.perf_counter()
    trees = [r[0] for r in results]
    write_conll_dep(cfg.output, sentences, trees)
    agreed = sum(r[1] for r in results)
    rate = 100.0 * agreed / len(results) if results else 0.0
    report = ["sentence\tagreed\titerations"]
    report += [f"{i}\t{int(a)}\t{k}" for i, (_, a, k) in enumerate(results, start=1)]
    report.append(f"# certificate rate\t{rate:.2f}")
    if cfg.report:
        Path(cfg.report).write_text("\n".join(report) + "\n", encoding="utf-8")
    t3 = time.perf_counter()
    log.info("certificates: %d/%d (%.2f%%)", agreed, len(results), rate)
    log.info("timing: load %.3fs, decode %.3fs, write %.3fs", t1 - t0, t2 - t1, t3 - t2)


def cmd_eval(cfg: RunConfig, out=None) -> None:
    out = out or sys.stdout
    if cfg.task == "chunk":
        gold = read_conll_chunks(cfg.gold)
        pred = read_conll_chunks(cfg.pred)
        try:
            rep = span_f1([g.labels for g in gold], [p.labels for p in pred])
        except ValueError as exc:
            raise CorpusFormatError(cfg.pred, 0, str(exc)) from None
        tsv = ["label\tgold\tpredicted\tcorrect\tprecision\trecall\tf1"]
        tsv += ["\t".join(str(c) for c in row) for row in rep.rows()]
        out.write(
            f"spans: gold {rep.gold}, predicted {rep.predicted}, correct {rep.correct}\n"
            f"precision {rep.precision:.2f}  recall {rep.recall:.2f}  F1 {rep.f1:.2f}\n"
        )
    else:
        gold = read_conll_dep(cfg.gold)
        pred = read_conll_dep(cfg.pred)
        try:
            rep = uas([t for _, t in gold], [t for _, t in pred])
        except ValueError as exc:
            raise CorpusFormatError(cfg.pred, 0, str(exc)) from None
        tsv = ["correct\ttotal\tuas", f"{rep.correct}\t{rep.total}\t{rep.uas:.2f}"]
        out.write(f"UAS {rep.uas:.2f} ({rep.correct}/{rep.total})\n")
    if cfg.tsv:
        Path(cfg.tsv).write_text("\n".join(tsv) + "\n", encoding="utf-8")


def bound_params(cfg: RunConfig, alpha: float = 1.0) -> BoundParams:
    return BoundParams(
        d=cfg.d, tau=cfg.tau, rho=cfg.rho, v=cfg.v, n=cfg.n, m=cfg.m,
        lambda_w=cfg.lambda_w, reg_strength=alpha, gamma=cfg.gamma,
        delta=cfg.delta, empirical_risk=cfg.empirical_risk,
    )


def cmd_bound(cfg: RunConfig, out=None) -> None:
    out = out or sys.stdout
    alphas = cfg.alphas or [float(a) for a in range(1, int(cfg.n) + 1)]
    lines = ["alpha\toverfit_term\tbound\tmagnitude"]
    for a, b in alpha_sweep(bound_params(cfg), alphas):
        lines.append(f"{a!r}\t{b.overfit_term!r}\t{b.bound!r}\t{b.magnitude!r}")
    text = "\n".join(lines) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)


def cmd_train_dep(cfg: RunConfig) -> None:
    corpus = read_conll_dep(cfg.train)
    if not corpus:
        raise CorpusFormatError(cfg.train, 0, "empty corpus")
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    skipped = sum(not t.projective for _, t in corpus)
    lines = [f"# sentences\t{len(corpus)}", f"# non-projective skipped\t{skipped}", "order\tepoch\tmistakes"]
    for order in sorted(set(cfg.orders)):
        t0 = time.perf_counter()
        try:
            model = train_dep_perceptron(corpus, order, cfg.epochs, sub_seed(cfg.seed, f"train-dep/{order}"))
        except ValueError as exc:
            raise CorpusFormatError(cfg.train, 0, str(exc)) from None
        log.info("trained order-%d dependency model in %.2fs", order, time.perf_counter() - t0)
        save_dep_model(model, out_dir / f"dep-order{order}.json")
        lines += [f"{order}\t{e}\t{k}" for e, k in enumerate(model.epoch_mistakes, start=1)]
    (out_dir / "train-log.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


COMMANDS = {
    "train-seq": cmd_train_seq,
    "decode-seq": cmd_decode_seq,
    "train-dep": cmd_train_dep,
    "decode-dep": cmd_decode_dep,
    "eval": cmd_eval,
    "bound": cmd_bound,
}


# -- argument parsing ---------------------------------------------------------


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srdecode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def command(name, help):
        p = sub.add_parser(name, help=help, argument_default=S)
        p.add_argument("--config", help="JSON file of option values")
        p.add_argument("-v", "--verbose", action="count", help="more logging (repeatable)")
        return p

    p = command("train-seq", "train order-1..n chain models")
    p.add_argument("--train", help="CoNLL chunk corpus")
    p.add_argument("--out-dir")
    p.add_argument("--order", type=int, help="highest order to train (default 3)")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=int, help="split each sentence into this many mini-samples")

    p = command("decode-seq", "SR-decode chunk tags from models or score tables")
    p.add_argument("--models", nargs="+", help="one chain model file per order")
    p.add_argument("--input", help="sentences to tag (token and POS columns)")
    p.add_argument("--score-tables", help="JSON Lines score-table file")
    p.add_argument("--output")
    p.add_argument("--top-k", type=int)
    p.add_argument("--dictionary", action="store_true")
    p.add_argument("--no-dictionary", dest="dictionary", action="store_false")
    p.add_argument("--dictionary-corpus", help="harvest the n-gram dictionary from this corpus")
    p.add_argument("--order-weights", type=_floats, help="comma-separated weight per order")
    p.add_argument("--jobs", type=int)

    p = command("train-dep", "train first-order and sibling dependency models")
    p.add_argument("--train", help="CoNLL dependency corpus")
    p.add_argument("--out-dir")
    p.add_argument("--orders", type=_ints, help="comma-separated subset of 1,2")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)

    p = command("decode-dep", "SR-decode dependency trees by dual decomposition")
    p.add_argument("--simple", help="first-order model file")
    p.add_argument("--complex", help="sibling model file")
    p.add_argument("--input", help="sentences to parse (CoNLL dependency columns)")
    p.add_argument("--simple-scores", help="first-order arc-score file")
    p.add_argument("--complex-scores", help="sibling arc-score file")
    p.add_argument("--output")
    p.add_argument("--report", help="per-sentence agreement and iteration TSV")
    p.add_argument("--lam", type=float, help="weight of the simple model")
    p.add_argument("--max-iter", type=int, help="last iteration index K")
    p.add_argument("--eta0", type=float, help="initial step size")
    p.add_argument("--jobs", type=int)

    p = command("eval", "span F1 or UAS of predictions against gold")
    p.add_argument("--task", choices=("chunk", "dep"))
    p.add_argument("--gold")
    p.add_argument("--pred")
    p.add_argument("--tsv", help="also write the scores as TSV")

    p = command("bound", "generalization bound over a sweep of alpha")
    for name in ("d", "tau", "rho", "v", "n", "m", "gamma", "delta"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--lambda-w", type=float)
    p.add_argument("--empirical-risk", type=float)
    p.add_argument("--alphas", type=_floats, help="comma-separated alpha values (default 1..n)")
    p.add_argument("--output")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    given = dict(vars(args))
    given.pop("verbose", None)
    config_path = given.pop("config", None)
    if config_path is not None:
        try:
            doc = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {config_path}: {exc}") from None
        if not isinstance(doc, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in doc.items():
            name = key.replace("-", "_")
            if name not in _FIELDS or name == "command":
                raise UsageError(f"unknown config key {key!r}")
            values[name] = value
    values.update(given)
    defaults = RunConfig()
    for name, value in values.items():
        default = getattr(defaults, name)
        try:
            if isinstance(default, bool):
                if not isinstance(value, bool):
                    raise ValueError("expected true or false")
            elif isinstance(default, int) and not isinstance(value, int):
                raise ValueError("expected an integer")
            elif isinstance(default, float) and value is not None:
                values[name] = float(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{name}: {exc}") from None
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.WARNING - 10 * min(getattr(args, "verbose", 0), 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = resolve_config(args)
        validate(cfg)
        COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

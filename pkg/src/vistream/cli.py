"""Command-line entry point: ``vistream <command> [flags]``.

Failures print one JSON line ``{"error": <type>, "message": <text>}`` on
stderr and exit with status 1 (2 for usage errors).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import signal
import sys
import threading

from .classify import MODEL_KINDS, ShapeError, load_model, make_model, save_model
from .eval import confusion_matrix, evaluate, grid_search, iter_grid
from .features import Vocabulary, VectorizerConfig, fit_vocabulary, to_csr, transform
from .ingest import EmptyDatasetError, Label, SplitSpec, balance_labels, load_dataset, save_dataset, split
from .textprep import default_config, preprocess

log = logging.getLogger("vistream")

DEFAULT_BROKER = "127.0.0.1:9092"
DEFAULT_TOPIC = "comments"

_TRAIN_OUTPUTS = """\
outputs (in --out):
  model.json     trained model (or --model); versioned JSON, deterministic bytes
  vocab.json     vocabulary fitted on the train split (or --vocab)
  split.json     {"seed", "fractions", "balanced", "train", "val", "test"}; id lists
  train.csv, val.csv, test.csv    split records in ingest schema
  val_report.json                 validation EvalReport
"""
_EVAL_OUTPUTS = """\
outputs (in --out):
  report.json    {"accuracy", "macro_f1", "n_samples", "per_class", "confusion"}
  report.txt     the same as a text table (also printed)
  confusion.csv  header "true\\pred,other,discrimination,supportive"; rows are true labels
  errors.csv     id,text,true,predicted for every misclassified record
"""
_GRID_OUTPUTS = """\
grid file: JSON object mapping a parameter name to a non-empty list of values,
e.g. {"alpha": [0.5, 1.0]}. Points are trained on the train split and scored by
validation macro-F1; the earliest point wins ties.

outputs (in --out):
  scores.csv     one row per grid point: the parameters, macro_f1, error
  best.json      {"kind", "params", "macro_f1"}
"""
_REPORT_OUTPUTS = """\
outputs (in --out):
  report.html             self-contained static page
  label_distribution.csv  label,count
  top_terms.csv           label,rank,term,count
  length_histogram.csv    low,high,count (token counts, inclusive bounds)
  confusion.csv           only when true labels are available
"""


class CliError(Exception):
    pass


def _configure_logging() -> None:
    level = os.environ.get("VISTREAM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _need_file(path: str, flag: str) -> str:
    if not path:
        raise CliError(f"{flag} is required")
    if not os.path.isfile(path):
        raise CliError(f"{flag}: no such file: {path}")
    return path


def _need_out_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise CliError(f"--out: directory not writable: {path}")
    return path


def _need_parent(path: str, flag: str) -> str:
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise CliError(f"{flag}: directory does not exist: {parent}")
    return path


def _vocab_path(args) -> str:
    if args.vocab:
        return args.vocab
    return os.path.join(os.path.dirname(os.path.abspath(args.model)), "vocab.json")


def _featurize(texts, vocab, config):
    return to_csr([transform(preprocess(t, config), vocab) for t in texts], len(vocab))


def _model_params(args) -> dict:
    kind = args.kind
    if kind == "nb":
        return {"alpha": args.alpha, "n_classes": 3}
    if kind == "lr":
        return {"l2": args.l2, "max_iter": args.max_iter, "tol": args.tol, "n_classes": 3}
    mf = args.tree_max_features
    if mf == "all":
        mf = None
    elif mf not in ("sqrt", "log2"):
        mf = int(mf)
    return {
        "n_estimators": args.n_estimators,
        "criterion": "entropy",
        "random_state": args.seed,
        "max_features": mf,
        "min_samples_split": args.min_samples_split,
        "n_classes": 3,
    }


def _prepare_splits(args):
    data = load_dataset(args.data)
    if not args.no_balance:
        data = balance_labels(data, args.seed)
    spec = SplitSpec(args.train_frac, args.val_frac, args.test_frac, seed=args.seed)
    return data, spec, split(data, spec)


def _json_dump(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def cmd_train(args) -> int:
    _need_file(args.data, "--data")
    out = _need_out_dir(args.out)
    model_path = args.model or os.path.join(out, "model.json")
    vocab_path = args.vocab or os.path.join(out, "vocab.json")
    _need_parent(model_path, "--model")
    _need_parent(vocab_path, "--vocab")

    data, spec, (train, val, test) = _prepare_splits(args)
    config = default_config()
    train_docs = [preprocess(t, config) for t in train.texts]
    vocab = fit_vocabulary(train_docs, VectorizerConfig(args.min_df, args.vocab_max_features))
    X_train = to_csr([transform(d, vocab) for d in train_docs], len(vocab))
    model = make_model(args.kind, **_model_params(args)).fit(X_train, train.labels)
    report = evaluate(val.labels, model.predict(_featurize(val.texts, vocab, config)), n_classes=3)

    save_model(model, model_path)
    vocab.save(vocab_path)
    for name, part in (("train", train), ("val", val), ("test", test)):
        save_dataset(part, os.path.join(out, f"{name}.csv"))
    manifest = {
        "seed": args.seed,
        "fractions": [spec.train_fraction, spec.val_fraction, spec.test_fraction],
        "balanced": not args.no_balance,
        "train": train.ids,
        "val": val.ids,
        "test": test.ids,
    }
    _json_dump(manifest, os.path.join(out, "split.json"))
    _json_dump(report.to_dict(), os.path.join(out, "val_report.json"))
    print(report.to_json())
    return 0


def cmd_evaluate(args) -> int:
    _need_file(args.model, "--model")
    vocab_path = _need_file(_vocab_path(args), "--vocab")
    _need_file(args.data, "--data")
    out = _need_out_dir(args.out)

    model = load_model(args.model)
    vocab = Vocabulary.load(vocab_path)
    if model.n_features_in_ != len(vocab):
        raise ShapeError(f"model expects {model.n_features_in_} features, vocabulary has {len(vocab)}")
    data = load_dataset(args.data)
    X = _featurize(data.texts, vocab, default_config())
    pred = model.predict(X)
    report = evaluate(data.labels, pred, n_classes=model.n_classes_)

    _json_dump(report.to_dict(), os.path.join(out, "report.json"))
    with open(os.path.join(out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(report.to_text() + "\n")
    with open(os.path.join(out, "confusion.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(report.confusion.to_csv())
    with open(os.path.join(out, "errors.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("id", "text", "true", "predicted"))
        for r, p in zip(data.records, pred):
            if int(p) != int(r.label):
                w.writerow((r.id, r.text, r.label.to_csv(), Label(int(p)).to_csv()))
    print(report.to_text())
    return 0


def cmd_grid(args) -> int:
    _need_file(args.data, "--data")
    _need_file(args.grid, "--grid")
    out = _need_out_dir(args.out)
    with open(args.grid, encoding="utf-8") as fh:
        grid = json.load(fh)
    if not isinstance(grid, dict) or not grid:
        raise CliError("--grid: expected a non-empty JSON object of parameter lists")
    points = list(iter_grid(grid))

    _, _, (train, val, _) = _prepare_splits(args)
    config = default_config()
    train_docs = [preprocess(t, config) for t in train.texts]
    vocab = fit_vocabulary(train_docs, VectorizerConfig(args.min_df, args.vocab_max_features))
    X_train = to_csr([transform(d, vocab) for d in train_docs], len(vocab))
    X_val = _featurize(val.texts, vocab, config)
    base = _model_params(args)

    def factory(**params):
        return make_model(args.kind, **{**base, **params})

    best, results = grid_search(grid, (X_train, train.labels), (X_val, val.labels), factory)
    names = list(grid)
    with open(os.path.join(out, "scores.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow((*names, "macro_f1", "error"))
        for res in results:
            score = "" if res.macro_f1 is None else repr(res.macro_f1)
            w.writerow((*(json.dumps(res.params[n]) for n in names), score, res.error or ""))
    best_score = next(r.macro_f1 for r in results if r.params == best)
    summary = {"kind": args.kind, "params": best, "macro_f1": best_score, "n_points": len(points)}
    _json_dump(summary, os.path.join(out, "best.json"))
    print(json.dumps(summary, ensure_ascii=False))
    return 0


def _stop_on_signals(stop: threading.Event) -> None:
    def handler(signum, frame):
        log.info("signal %d received, stopping", signum)
        stop.set()

    signal.signal(signal.SIGINT, handler)
    signal.signal(signal.SIGTERM, handler)


def cmd_broker(args) -> int:
    from .stream import Broker, parse_address

    host, port = parse_address(args.broker)
    if args.journal:
        _need_parent(args.journal, "--journal")
    broker = Broker(host, port, journal=args.journal).start()
    stop = threading.Event()
    _stop_on_signals(stop)
    print(f"listening {broker.address[0]}:{broker.address[1]}", flush=True)
    try:
        while not stop.wait(0.2):
            pass
    finally:
        broker.stop()
    return 0


def cmd_produce(args) -> int:
    from .stream import BrokerClient, parse_address, replay_csv_as_stream

    _need_file(args.data, "--data")
    if args.rate < 0:
        raise CliError("--rate must be >= 0")
    with BrokerClient(parse_address(args.broker), retries=args.retries) as client:
        stats = replay_csv_as_stream(args.data, args.topic, args.rate, client=client)
    print(json.dumps({"produced": stats.produced, "skipped": stats.skipped}))
    return 0


def cmd_consume(args) -> int:
    from .stream import BrokerClient, parse_address, run_pipeline

    _need_file(args.model, "--model")
    vocab_path = _need_file(_vocab_path(args), "--vocab")
    if not args.sink:
        raise CliError("--sink is required")
    _need_parent(args.sink, "--sink")
    model = load_model(args.model)
    vocab = Vocabulary.load(vocab_path)
    stop = threading.Event()
    _stop_on_signals(stop)
    with BrokerClient(parse_address(args.broker), retries=args.retries) as client:
        stats = run_pipeline(
            client.address,
            args.topic,
            model,
            vocab,
            default_config(),
            args.sink,
            batch_size=args.batch_size,
            stop_event=stop,
            idle_timeout=args.idle_timeout,
            offset_path=args.offset_file,
            dead_letter_path=args.dead_letter,
            client=client,
        )
    print(json.dumps(stats.__dict__))
    return 0


def cmd_report(args) -> int:
    from .report import build_report, sink_as_dataset, write_report
    from .stream import read_sink

    if not args.sink and not args.data:
        raise CliError("give --sink or --data")
    out = _need_out_dir(args.out)
    config = default_config()
    truth = None
    if args.data:
        _need_file(args.data, "--data")
        try:
            truth = load_dataset(args.data)
        except EmptyDatasetError:
            truth = None
    confusion = None
    if args.sink:
        _need_file(args.sink, "--sink")
        d = sink_as_dataset(read_sink(args.sink))
        if d is not None and truth is not None and truth.all_labeled:
            gold = {r.id: r.label for r in truth.records}
            pairs = [(gold[r.id], r.label) for r in d.records if r.id in gold]
            if pairs:
                confusion = confusion_matrix(*zip(*pairs), n_classes=3)
        title = f"Stream report: {os.path.basename(args.sink)}"
    else:
        d = truth
        if d is not None and args.model and d.all_labeled:
            _need_file(args.model, "--model")
            model = load_model(args.model)
            vocab = Vocabulary.load(_need_file(_vocab_path(args), "--vocab"))
            pred = model.predict(_featurize(d.texts, vocab, config))
            confusion = confusion_matrix(d.labels, pred, n_classes=3)
        if d is not None and not d.all_labeled:
            raise CliError("--data: report needs a label on every row")
        title = f"Dataset report: {os.path.basename(args.data)}"
    data = build_report(d, config, top_k=args.top_k, bins=args.bins, confusion=confusion)
    paths = write_report(data, out, title)
    summary = {"rows": data.n_rows, "distribution": {k.name.lower(): v for k, v in data.distribution.items()}}
    summary["files"] = paths
    print(json.dumps(summary, ensure_ascii=False))
    return 0


def _add_common(p, *, data=False, model=False, vocab=False, out=None, seed=False, broker=False, topic=False):
    if data:
        p.add_argument("--data", help="CSV in ingest schema (id,text,label,source)")
    if model:
        p.add_argument("--model", help="model JSON path")
    if vocab:
        p.add_argument("--vocab", help="vocabulary JSON path (default: vocab.json beside --model)")
    if out is not None:
        p.add_argument("--out", default=out, help=f"output directory (default: {out})")
    if seed:
        p.add_argument("--seed", type=int, default=42, help="seed for balancing, splitting and the forest (default: 42)")
    if broker:
        p.add_argument("--broker", default=DEFAULT_BROKER, help=f"HOST:PORT (default: {DEFAULT_BROKER})")
    if topic:
        p.add_argument("--topic", default=DEFAULT_TOPIC, help=f"topic name (default: {DEFAULT_TOPIC})")


def _add_training(p) -> None:
    p.add_argument("--kind", choices=sorted(MODEL_KINDS), default="rf", help="model kind (default: rf)")
    p.add_argument("--no-balance", action="store_true", help="skip undersampling to the minority class")
    p.add_argument("--train-frac", type=float, default=0.70)
    p.add_argument("--val-frac", type=float, default=0.15)
    p.add_argument("--test-frac", type=float, default=0.15)
    p.add_argument("--min-df", type=int, default=1, help="drop terms in fewer documents")
    p.add_argument("--vocab-max-features", type=int, default=None, help="keep the most frequent terms")
    g = p.add_argument_group("naive Bayes")
    g.add_argument("--alpha", type=float, default=1.0)
    g = p.add_argument_group("logistic regression")
    g.add_argument("--l2", type=float, default=None, help="L2 strength (default: 1/n_train)")
    g.add_argument("--max-iter", type=int, default=1000)
    g.add_argument("--tol", type=float, default=1e-5)
    g = p.add_argument_group("random forest")
    g.add_argument("--n-estimators", type=int, default=400)
    g.add_argument("--tree-max-features", default="sqrt", help="sqrt, log2, all or an int")
    g.add_argument("--min-samples-split", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vistream",
        description="Vietnamese regional-discrimination comment classifier, offline and streaming.",
        epilog="Set VISTREAM_LOG=DEBUG|INFO|WARNING|ERROR to choose the log level.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    raw = argparse.RawDescriptionHelpFormatter

    p = sub.add_parser("train", help="balance, split, fit vocabulary and model", epilog=_TRAIN_OUTPUTS, formatter_class=raw)
    _add_common(p, data=True, model=True, vocab=True, out="model_out", seed=True)
    _add_training(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a saved model on a labelled CSV", epilog=_EVAL_OUTPUTS, formatter_class=raw)
    _add_common(p, data=True, model=True, vocab=True, out="eval_out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("grid", help="grid search on the validation split", epilog=_GRID_OUTPUTS, formatter_class=raw)
    _add_common(p, data=True, out="grid_out", seed=True)
    p.add_argument("--grid", help="JSON parameter grid")
    _add_training(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("broker", help="run a message broker until interrupted")
    _add_common(p, broker=True)
    p.add_argument("--journal", help="append-only journal file; replayed on start")
    p.set_defaults(func=cmd_broker)

    p = sub.add_parser("produce", help="replay a CSV into a topic")
    _add_common(p, data=True, broker=True, topic=True)
    p.add_argument("--rate", type=float, default=0.0, help="messages per second; 0 means unthrottled")
    p.add_argument("--retries", type=int, default=5)
    p.set_defaults(func=cmd_produce)

    p = sub.add_parser(
        "consume",
        help="classify a topic into a CSV sink",
        epilog="sink columns: id,ts,source,text,label,p_other,p_discrimination,p_supportive,"
        "empty_after_preprocess,processed_at\ndead-letter columns: raw_frame_base64,reason,received_at",
        formatter_class=raw,
    )
    _add_common(p, model=True, vocab=True, broker=True, topic=True)
    p.add_argument("--sink", help="output CSV")
    p.add_argument("--offset-file", help="committed offset (default: SINK.offset)")
    p.add_argument("--dead-letter", help="dead-letter CSV (default: SINK.deadletter.csv)")
    p.add_argument("--batch-size", type=int, default=100)
    p.add_argument("--idle-timeout", type=float, default=None, help="exit after this many idle seconds")
    p.add_argument("--retries", type=int, default=5)
    p.set_defaults(func=cmd_consume)

    p = sub.add_parser("report", help="static HTML report from a sink or dataset", epilog=_REPORT_OUTPUTS, formatter_class=raw)
    _add_common(p, data=True, model=True, vocab=True, out="report_out")
    p.add_argument("--sink", help="sink CSV written by consume")
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--bins", type=int, default=10)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # noqa: BLE001 - every failure becomes one parseable line
        log.debug("command failed", exc_info=True)
        err = type(exc).__name__
        print(json.dumps({"error": err, "message": str(exc)}, ensure_ascii=False), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

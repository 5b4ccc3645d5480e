"""Command-line driver.

Exit status: 0 on success, 1 on validation/processing errors, 2 on usage
errors. Diagnostics go to stderr; data goes to files (``eval`` prints its
report on stdout).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .conllu import read_conllu, write_conllu
from .errors import EUDError
from .merge import MergeOptions
from .metrics import Metric, evaluate, format_report
from .pipeline import (
    RULE_NAMES,
    collapse_document,
    expand_document,
    merge_documents,
    postprocess_document,
)
from .rules import rule_config

logger = logging.getLogger("eudkit")


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise EUDError("BAD_CONFIG", "config must be a JSON object")
    return data


def _csv(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def cmd_collapse(args) -> int:
    write_conllu(args.output, collapse_document(read_conllu(args.input)))
    return 0


def cmd_expand(args) -> int:
    write_conllu(args.output, expand_document(read_conllu(args.input)))
    return 0


def cmd_merge(args) -> int:
    options = MergeOptions(acl_relcl_label=args.acl_relcl_label, prefer_graph_label=args.prefer_graph_label)
    merged = merge_documents(read_conllu(args.tree), read_conllu(args.graph), options)
    write_conllu(args.out, merged)
    return 0


def cmd_postprocess(args) -> int:
    config = _load_config(args.config)
    cfg = rule_config(args.lang, config.get("rules", {}))
    rules = _csv(args.rules)
    unknown = set(rules) - set(RULE_NAMES)
    if unknown:
        raise _Usage(f"unknown rules: {', '.join(sorted(unknown))}")
    doc = postprocess_document(read_conllu(args.input), cfg, rules, expand_first=args.expand_first)
    write_conllu(args.output, doc)
    return 0


def cmd_eval(args) -> int:
    try:
        metrics = [Metric.parse(m) for m in _csv(args.metrics)]
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    gold, system = read_conllu(args.gold), read_conllu(args.system)
    sys.stdout.write(format_report((m, evaluate(gold, system, m)) for m in metrics))
    return 0


def _hyper(args):
    from .predictor.train import Hyper

    config = _load_config(args.config)
    hyper = Hyper.from_mapping(config.get("hyper", {}))
    overrides = {k: getattr(args, k) for k in ("seed", "epochs", "lr") if getattr(args, k) is not None}
    return replace(hyper, **overrides)


def cmd_train_toy(args) -> int:
    from .predictor.checkpoint import save_params
    from .predictor.train import evaluate_toy, train_toy

    hyper = _hyper(args)
    result = train_toy(read_conllu(args.corpus), hyper)
    save_params(args.out, result.params)
    print(f"epochs {len(result.losses)} final loss {result.losses[-1]:.6g}", file=sys.stderr)
    if args.heldout:
        report = evaluate_toy(result.params, read_conllu(args.heldout), hyper.threshold)
        print(
            f"heldout arc F1 {report.arc_f1:.4f} labeled F1 {report.labeled_f1:.4f} "
            f"label acc (gold arcs) {report.label_accuracy_gold:.4f} "
            f"label acc (predicted arcs) {report.label_accuracy_predicted:.4f}",
            file=sys.stderr,
        )
    if args.loss_log:
        with open(args.loss_log, "w", encoding="utf-8") as f:
            f.writelines(f"{k}\t{v:.12g}\n" for k, v in enumerate(result.losses, start=1))
    return 0


def cmd_predict(args) -> int:
    from .predictor.checkpoint import load_params
    from .predictor.train import predict_document

    params = load_params(args.model)
    write_conllu(args.output, predict_document(params, read_conllu(args.input), args.threshold))
    return 0


def cmd_toy_corpus(args) -> int:
    from .predictor.synthetic import toy_corpora

    train, heldout = toy_corpora(args.train_size, args.heldout_size, args.seed)
    write_conllu(args.train, train)
    write_conllu(args.heldout, heldout)
    return 0


def cmd_validate(args) -> int:
    doc = read_conllu(args.input)
    print(f"{len(doc.sentences)} sentences OK", file=sys.stderr)
    return 0


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eudkit", description="Enhanced UD graph tools")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("collapse", help="collapse empty nodes into A>B labels")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("expand", help="expand A>B labels into empty nodes at sentence end")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("merge", help="merge a predicted tree with a predicted enhanced graph")
    p.add_argument("--tree", required=True, help="CoNLL-U whose HEAD/DEPREL hold the tree")
    p.add_argument("--graph", required=True, help="CoNLL-U whose DEPS hold the graph")
    p.add_argument("--out", required=True)
    p.add_argument("--prefer-graph-label", action="store_true")
    p.add_argument("--acl-relcl-label", default="acl:relcl")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("postprocess", help="apply case sublabels (Rule 1) and function-word pruning (Rule 2)")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--lang", required=True)
    p.add_argument("--rules", default=",".join(RULE_NAMES))
    p.add_argument("--config")
    p.add_argument("--expand-first", action="store_true", help="expand empty nodes before the rules")
    p.set_defaults(func=cmd_postprocess)

    p = sub.add_parser("eval", help="LAS / EULAS / ELAS report")
    p.add_argument("--gold", required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--metrics", default="las,eulas,elas")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("train-toy", help="train the toy enhanced-arc predictor")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--config")
    p.add_argument("--heldout", help="report held-out scores after training")
    p.add_argument("--loss-log", help="write per-epoch losses here")
    p.set_defaults(func=cmd_train_toy)

    p = sub.add_parser("predict", help="predict enhanced graphs with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("toy-corpus", help="write the synthetic conjunct-propagation corpus")
    p.add_argument("--train", required=True)
    p.add_argument("--heldout", required=True)
    p.add_argument("--train-size", type=int, default=200)
    p.add_argument("--heldout-size", type=int, default=50)
    p.add_argument("--seed", type=int, default=13)
    p.set_defaults(func=cmd_toy_corpus)

    p = sub.add_parser("validate", help="parse and validate a CoNLL-U file")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)
    return parser


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"eudkit: error: {exc}", file=sys.stderr)
        return 2
    except EUDError as exc:
        print(f"eudkit: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"eudkit: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line interface: one executable, one subcommand per pipeline stage.

Option resolution order is command-line flag, then environment variable
(``PHRASENLI_<OPTION>``), then the JSON config file given via ``--config``,
then the built-in default.  Every artifact written embeds the tool version
and the resolved configuration, and goes to disk atomically (temp file
plus rename).  Exit codes: 0 success, 1 validation or data errors, 2
usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from . import __version__
from .alignment import AlignMode
from .chunking import ChunkerConfig, ChunkerMode
from .classifier import FeatureConfig, FeatureVariant, load_checkpoint, save_checkpoint
from .corpus import (
    ParseError,
    Phrase,
    Side,
    ValidationError,
    atomic_write_text,
    phrase_from_obj,
    read_annotations,
    read_corpus,
    read_predictions,
    validate_annotations,
    write_annotations,
    write_corpus,
    write_predictions,
    write_report,
)
from .embeddings import (
    AlignConfig,
    EmbeddingLookupError,
    ProviderConfig,
    ProviderKind,
    make_provider,
    write_embeddings,
)
from .evaluation import agreement as compute_agreement
from .evaluation import count_sample, evaluate, category_f, sum_counts
from .induction import InductionConfig, InductionMode
from .pipeline import PipelineConfig, align_sample, chunk_sample, predict_corpus
from .synth import GenerationError, default_lexicon, generate
from .training import TrainConfig, TrainMode, gradcheck, train

ENV_PREFIX = "PHRASENLI_"


@dataclass(frozen=True)
class Opt:
    name: str                      # snake_case, doubles as config key
    type: Callable[[str], Any]
    default: Any = None
    help: str = ""
    required: bool = False

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")

    @property
    def env(self) -> str:
        return ENV_PREFIX + self.name.upper()


def _bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


PROVIDER_OPTS = [
    Opt("embeddings", str, help="embedding file; omit to use the hash-based toy provider"),
    Opt("toy_dim", int, 16, "embedding dimension of the toy provider"),
    Opt("toy_seed", int, 0, "seed of the toy provider"),
]

PIPELINE_OPTS = [
    Opt("chunker", str, "rules", "phrase detection mode: rules | random"),
    Opt("aligner", str, "mutual", "alignment mode: mutual | random"),
    Opt("gamma", float, 0.6, "weight of the global cosine in phrase similarity"),
    Opt("features", str, "concat", "phrase representation: local | global | concat"),
    Opt("induction", str, "fuzzy", "sentence induction mode: fuzzy | mean"),
]

TRAIN_OPTS = [
    Opt("mode", str, "epr", "training mode: epr | stp"),
    Opt("learning_rate", float, 5e-5, "peak Adam learning rate"),
    Opt("batch_size", int, 32, "samples per optimizer step"),
    Opt("epochs", int, 3, "training epochs"),
    Opt("warmup_fraction", float, 0.1, "fraction of steps spent ramping up"),
]

COMMANDS: dict[str, dict] = {
    "synth": {
        "help": "generate a synthetic corpus with planted phrasal relations",
        "opts": [
            Opt("n", int, 300, "number of samples"),
            Opt("seed", int, 0, "generation seed"),
            Opt("dim", int, 16, "embedding dimension (>= 15)"),
            Opt("out_corpus", str, required=True, help="corpus output path"),
            Opt("out_annotations", str, required=True, help="gold annotation output path"),
            Opt("out_embeddings", str, required=True, help="embedding file output path"),
            Opt("split", int, help="write the first SPLIT samples to out-corpus and "
                                   "the rest to out-test-corpus"),
            Opt("out_test_corpus", str, help="held-out corpus path (with --split)"),
        ],
    },
    "chunk": {
        "help": "extract phrases from every sentence of a corpus",
        "opts": [
            Opt("corpus", str, required=True, help="corpus file"),
            Opt("out", str, required=True, help="phrase record output path"),
            Opt("chunker", str, "rules", "rules | random"),
            Opt("seed", int, 0, "seed for the random chunker"),
        ],
    },
    "align": {
        "help": "chunk and align the phrases of every sample",
        "opts": [
            Opt("corpus", str, required=True, help="corpus file"),
            Opt("out", str, required=True, help="alignment output path"),
            Opt("seed", int, 0, "seed for random modes"),
            *PROVIDER_OPTS,
            *[o for o in PIPELINE_OPTS if o.name in ("chunker", "aligner", "gamma")],
        ],
    },
    "train": {
        "help": "train the phrasal classifier from sentence labels",
        "opts": [
            Opt("corpus", str, required=True, help="labeled training corpus"),
            Opt("val_corpus", str, help="labeled validation corpus (default: 10% split)"),
            Opt("out_model", str, required=True, help="checkpoint output path"),
            Opt("log", str, help="training log output path (line-delimited)"),
            Opt("seed", int, 0, "training seed"),
            Opt("threads", int, 1, "worker threads for per-sample preparation"),
            *PROVIDER_OPTS, *PIPELINE_OPTS, *TRAIN_OPTS,
        ],
    },
    "predict": {
        "help": "run a trained model over a corpus",
        "opts": [
            Opt("model", str, required=True, help="checkpoint path"),
            Opt("corpus", str, required=True, help="corpus file"),
            Opt("out", str, required=True, help="prediction output path"),
            Opt("threads", int, 1, "worker threads"),
            *PROVIDER_OPTS,
            *[Opt(o.name, o.type, None, o.help) for o in PIPELINE_OPTS],
            Opt("seed", int, None, "seed for random modes (default: from checkpoint)"),
        ],
    },
    "eval": {
        "help": "score predictions against annotations",
        "opts": [
            Opt("pred", str, required=True, help="prediction file"),
            Opt("annotations", str, required=True, help="annotation file"),
            Opt("report", str, required=True, help="report output path"),
            Opt("corpus", str, help="corpus file (enables sentence accuracy)"),
            Opt("diagnostics", str, help="per-sample diagnostics output path"),
        ],
    },
    "agreement": {
        "help": "inter-annotator agreement report",
        "opts": [
            Opt("annotations", str, required=True, help="annotation file"),
            Opt("report", str, required=True, help="report output path"),
            Opt("corpus", str, help="corpus file (validates span bounds)"),
        ],
    },
    "gradcheck": {
        "help": "compare analytic gradients against central finite differences",
        "opts": [
            Opt("seed", int, 0, "fixture seed"),
            Opt("mode", str, "epr", "epr | stp"),
            Opt("induction", str, "fuzzy", "fuzzy | mean"),
            Opt("features", str, "concat", "local | global | concat"),
            Opt("threshold", float, 1e-3, "maximum tolerated relative error"),
        ],
    },
    "sweep": {
        "help": "train, predict, and evaluate once per gamma value",
        "opts": [
            Opt("gammas", str, "0.0,0.2,0.4,0.6,0.8,1.0", "comma-separated gamma values"),
            Opt("corpus", str, required=True, help="labeled training corpus"),
            Opt("test_corpus", str, required=True, help="labeled evaluation corpus"),
            Opt("annotations", str, required=True, help="annotation file for the test corpus"),
            Opt("out_dir", str, required=True, help="directory for per-gamma artifacts"),
            Opt("seed", int, 0, "training seed"),
            Opt("threads", int, 1, "worker threads"),
            *PROVIDER_OPTS,
            *[o for o in PIPELINE_OPTS if o.name != "gamma"], *TRAIN_OPTS,
        ],
    },
    "explain": {
        "help": "render predictions as human-readable phrasal reasoning",
        "opts": [
            Opt("pred", str, required=True, help="prediction file"),
            Opt("corpus", str, required=True, help="corpus file"),
            Opt("out", str, required=True, help="text report output path"),
            Opt("json_out", str, help="machine-readable companion output path"),
        ],
    },
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phrasenli",
        description="phrase-level natural language inference pipeline")
    parser.add_argument("--version", action="version", version=f"phrasenli {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, spec in COMMANDS.items():
        p = sub.add_parser(name, help=spec["help"])
        p.add_argument("--config", help="JSON config file with option defaults")
        p.add_argument("--verbose", action="store_true")
        for opt in spec["opts"]:
            p.add_argument(opt.flag, dest=opt.name, type=opt.type, default=None,
                           help=opt.help)
    return parser


def resolve_options(command: str, args: argparse.Namespace) -> dict[str, Any]:
    """Flag > environment > config file > default, checked per option."""
    config_doc: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config_doc = json.load(fh)
        if not isinstance(config_doc, dict):
            raise ValidationError("config file must hold a JSON object")
    resolved: dict[str, Any] = {}
    for opt in COMMANDS[command]["opts"]:
        value = getattr(args, opt.name)
        if value is None and opt.env in os.environ:
            value = opt.type(os.environ[opt.env])
        if value is None and opt.name in config_doc:
            raw = config_doc[opt.name]
            value = opt.type(raw) if isinstance(raw, str) else raw
        if value is None:
            value = opt.default
        if value is None and opt.required:
            raise UsageError(f"missing required option {opt.flag}")
        resolved[opt.name] = value
    return resolved


class UsageError(Exception):
    pass


def artifact_meta(command: str, opts: dict[str, Any]) -> dict:
    return {
        "tool": "phrasenli",
        "version": __version__,
        "command": command,
        "config": {k: v for k, v in sorted(opts.items()) if v is not None},
    }


def make_provider_from_opts(opts: dict[str, Any]):
    if opts.get("embeddings"):
        return make_provider(ProviderConfig(kind=ProviderKind.FILE,
                                            source=opts["embeddings"]))
    return make_provider(ProviderConfig(kind=ProviderKind.TOY,
                                        dim=opts["toy_dim"], seed=opts["toy_seed"]))


def pipeline_from_opts(opts: dict[str, Any], seed: int) -> PipelineConfig:
    return PipelineConfig(
        chunker_mode=ChunkerMode(opts["chunker"]),
        align_mode=AlignMode(opts["aligner"]),
        align=AlignConfig(gamma=opts["gamma"]),
        features=FeatureConfig(FeatureVariant(opts["features"])),
        induction=InductionConfig(mode=InductionMode(opts["induction"])),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_synth(opts, meta) -> int:
    if opts["split"] is not None and not opts["out_test_corpus"]:
        raise UsageError("--split requires --out-test-corpus")
    synth_samples, annotations, embedding_records, dim = generate(
        default_lexicon(), opts["n"], opts["seed"], dim=opts["dim"])
    samples = [ss.sample for ss in synth_samples]
    if opts["split"] is not None:
        k = opts["split"]
        if not 0 < k < len(samples):
            raise UsageError(f"--split must lie strictly between 0 and {len(samples)}")
        write_corpus(samples[:k], opts["out_corpus"], meta=meta)
        write_corpus(samples[k:], opts["out_test_corpus"], meta=meta)
    else:
        write_corpus(samples, opts["out_corpus"], meta=meta)
    write_annotations(annotations, opts["out_annotations"], meta=meta)
    write_embeddings(embedding_records, dim, opts["out_embeddings"], meta=meta)
    print(f"wrote {len(samples)} samples, {len(annotations)} annotation records, "
          f"{len(embedding_records)} embedding records")
    return 0


def _sorted_by_sample(samples):
    return sorted(samples, key=lambda s: s.id)


def cmd_chunk(opts, meta) -> int:
    samples = read_corpus(opts["corpus"])
    mode = ChunkerMode(opts["chunker"])
    lines = [json.dumps({"_meta": meta}, ensure_ascii=False)]
    for sample in _sorted_by_sample(samples):
        pcfg = PipelineConfig(chunker_mode=mode, seed=opts["seed"])
        premise, hypothesis = chunk_sample(sample, pcfg)
        for phrase in premise + hypothesis:
            lines.append(json.dumps({
                "sample_id": sample.id,
                "side": phrase.side.value,
                "span": list(phrase.span),
                "kind": phrase.kind.value,
            }, ensure_ascii=False))
    atomic_write_text(opts["out"], "\n".join(lines) + "\n")
    print(f"chunked {len(samples)} samples -> {opts['out']}")
    return 0


def cmd_align(opts, meta) -> int:
    samples = read_corpus(opts["corpus"])
    provider = make_provider_from_opts(opts)
    pcfg = PipelineConfig(
        chunker_mode=ChunkerMode(opts["chunker"]),
        align_mode=AlignMode(opts["aligner"]),
        align=AlignConfig(gamma=opts["gamma"]),
        seed=opts["seed"],
    )
    lines = [json.dumps({"_meta": meta}, ensure_ascii=False)]
    for sample in _sorted_by_sample(samples):
        result = align_sample(sample, provider, pcfg)
        pairs = []
        for pair in result.pairs:
            pairs.append({
                "premise_phrase": None if pair.premise_phrase is None else {
                    "side": "premise", "span": list(pair.premise_phrase.span),
                    "kind": pair.premise_phrase.kind.value},
                "hypothesis_phrase": None if pair.hypothesis_phrase is None else {
                    "side": "hypothesis", "span": list(pair.hypothesis_phrase.span),
                    "kind": pair.hypothesis_phrase.kind.value},
                "aligned": pair.aligned,
            })
        lines.append(json.dumps({
            "sample_id": sample.id,
            "k_aligned": result.k_aligned,
            "k_total": result.k_total,
            "pairs": pairs,
        }, ensure_ascii=False))
    atomic_write_text(opts["out"], "\n".join(lines) + "\n")
    print(f"aligned {len(samples)} samples -> {opts['out']}")
    return 0


def cmd_train(opts, meta) -> int:
    samples = read_corpus(opts["corpus"])
    val_samples = read_corpus(opts["val_corpus"]) if opts["val_corpus"] else None
    provider = make_provider_from_opts(opts)
    icfg = InductionConfig(mode=InductionMode(opts["induction"]))
    cfg = TrainConfig(
        mode=TrainMode(opts["mode"]),
        induction=icfg,
        features=FeatureConfig(FeatureVariant(opts["features"])),
        learning_rate=opts["learning_rate"],
        batch_size=opts["batch_size"],
        epochs=opts["epochs"],
        warmup_fraction=opts["warmup_fraction"],
        seed=opts["seed"],
    )
    pcfg = pipeline_from_opts(opts, seed=opts["seed"])
    result = train(samples, provider, cfg, pcfg, val_samples=val_samples,
                   threads=opts["threads"])
    save_checkpoint(result.state.params, opts["out_model"],
                    variant=cfg.features.variant, embedding_dim=provider.dim,
                    seed=cfg.seed,
                    extra={"_meta": meta,
                           "pipeline": {"chunker": opts["chunker"],
                                        "aligner": opts["aligner"],
                                        "gamma": opts["gamma"],
                                        "features": opts["features"],
                                        "induction": opts["induction"]}})
    if opts["log"]:
        lines = [json.dumps({"_meta": meta}, ensure_ascii=False)]
        for i, step_loss in enumerate(result.step_losses, start=1):
            lines.append(json.dumps({"step": i, "loss": step_loss}))
        for em in result.epoch_metrics:
            lines.append(json.dumps({
                "epoch": em.epoch, "mean_loss": em.mean_loss,
                "heldout_accuracy": em.heldout_accuracy,
            }))
        atomic_write_text(opts["log"], "\n".join(lines) + "\n")
    final = result.epoch_metrics[-1]
    acc = "n/a" if final.heldout_accuracy is None else f"{final.heldout_accuracy:.4f}"
    print(f"trained {cfg.epochs} epochs, final mean loss {final.mean_loss:.4f}, "
          f"held-out accuracy {acc} -> {opts['out_model']}")
    return 0


def cmd_predict(opts, meta) -> int:
    params, info = load_checkpoint(opts["model"])
    stored = info.get("pipeline", {})
    merged = {
        "chunker": opts["chunker"] or stored.get("chunker", "rules"),
        "aligner": opts["aligner"] or stored.get("aligner", "mutual"),
        "gamma": opts["gamma"] if opts["gamma"] is not None else stored.get("gamma", 0.6),
        "features": opts["features"] or stored.get("features", info["config"]["variant"]),
        "induction": opts["induction"] or stored.get("induction", "fuzzy"),
    }
    if merged["features"] != info["config"]["variant"]:
        raise ValidationError(
            f"feature variant {merged['features']!r} does not match the checkpoint's "
            f"{info['config']['variant']!r}")
    seed = opts["seed"] if opts["seed"] is not None else info["config"]["seed"]
    samples = read_corpus(opts["corpus"])
    provider = make_provider_from_opts(opts)
    pcfg = pipeline_from_opts(merged, seed=seed)
    records = predict_corpus(samples, provider, params, pcfg, threads=opts["threads"])
    write_predictions(records, opts["out"], meta=meta)
    print(f"predicted {len(records)} samples -> {opts['out']}")
    return 0


def cmd_eval(opts, meta) -> int:
    predictions = read_predictions(opts["pred"])
    predicted_ids = {p.sample_id for p in predictions}
    annotations = [a for a in read_annotations(opts["annotations"])
                   if a.sample_id in predicted_ids]
    samples = None
    if opts["corpus"]:
        samples = read_corpus(opts["corpus"])
        validate_annotations(annotations, samples)
    report = evaluate(predictions, annotations, samples)
    write_report(report, opts["report"], meta=meta)
    if opts["diagnostics"]:
        pred_by_id = {p.sample_id: p for p in predictions}
        lines = [json.dumps({"_meta": meta}, ensure_ascii=False)]
        for ann in sorted(annotations, key=lambda a: (a.sample_id, a.annotator_id)):
            counts = count_sample(pred_by_id[ann.sample_id], ann)
            lines.append(json.dumps({
                "sample_id": ann.sample_id,
                "annotator_id": ann.annotator_id,
                "f": {c.category.value: category_f(c) for c in counts},
            }, ensure_ascii=False))
        atomic_write_text(opts["diagnostics"], "\n".join(lines) + "\n")
    acc = "" if report.sentence_accuracy is None else \
        f"  sentence accuracy {report.sentence_accuracy:.4f}"
    print(f"F_E {report.f_e:.4f}  F_C {report.f_c:.4f}  F_N {report.f_n:.4f}  "
          f"F_UP {report.f_up:.4f}  F_UH {report.f_uh:.4f}  "
          f"GM {report.gm:.4f}  AM {report.am:.4f}{acc}")
    print(f"report -> {opts['report']}")
    return 0


def cmd_agreement(opts, meta) -> int:
    annotations = read_annotations(opts["annotations"])
    if opts["corpus"]:
        validate_annotations(annotations, read_corpus(opts["corpus"]))
    report = compute_agreement(annotations)
    write_report(report, opts["report"], meta=meta)
    print(f"agreement: F_E {report.f_e:.4f}  F_C {report.f_c:.4f}  F_N {report.f_n:.4f}  "
          f"F_UP {report.f_up:.4f}  F_UH {report.f_uh:.4f}  GM {report.gm:.4f}  "
          f"AM {report.am:.4f}")
    return 0


def cmd_gradcheck(opts, meta) -> int:
    cfg = TrainConfig(
        mode=TrainMode(opts["mode"]),
        induction=InductionConfig(mode=InductionMode(opts["induction"])),
        features=FeatureConfig(FeatureVariant(opts["features"])),
    )
    report = gradcheck(cfg, opts["seed"], threshold=opts["threshold"])
    print(report.format_table())
    return 0 if report.passed else 1


def cmd_sweep(opts, meta) -> int:
    try:
        gammas = [float(g) for g in opts["gammas"].split(",") if g.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad --gammas value: {exc}") from exc
    if not gammas:
        raise UsageError("--gammas must name at least one value")
    os.makedirs(opts["out_dir"], exist_ok=True)
    train_samples = read_corpus(opts["corpus"])
    test_samples = read_corpus(opts["test_corpus"])
    annotations = read_annotations(opts["annotations"])
    provider = make_provider_from_opts(opts)
    summary = [json.dumps({"_meta": meta}, ensure_ascii=False)]
    for gamma in gammas:
        gamma_opts = dict(opts, gamma=gamma)
        icfg = InductionConfig(mode=InductionMode(opts["induction"]))
        cfg = TrainConfig(
            mode=TrainMode(opts["mode"]), induction=icfg,
            features=FeatureConfig(FeatureVariant(opts["features"])),
            learning_rate=opts["learning_rate"], batch_size=opts["batch_size"],
            epochs=opts["epochs"], warmup_fraction=opts["warmup_fraction"],
            seed=opts["seed"])
        pcfg = pipeline_from_opts(gamma_opts, seed=opts["seed"])
        result = train(train_samples, provider, cfg, pcfg, threads=opts["threads"])
        records = predict_corpus(test_samples, provider, result.state.params, pcfg,
                                 threads=opts["threads"])
        report = evaluate(records, annotations, test_samples)
        tag = f"{gamma:.1f}"
        write_report(report, os.path.join(opts["out_dir"], f"report-gamma-{tag}.json"),
                     meta=dict(meta, gamma=gamma))
        summary.append(json.dumps({
            "gamma": gamma, "sentence_accuracy": report.sentence_accuracy,
            "gm": report.gm, "am": report.am,
        }))
        print(f"gamma {tag}: accuracy "
              f"{report.sentence_accuracy:.4f}  GM {report.gm:.4f}  AM {report.am:.4f}")
    atomic_write_text(os.path.join(opts["out_dir"], "summary.jsonl"),
                      "\n".join(summary) + "\n")
    return 0


def _format_pair(pp, sample) -> str:
    def text(phrase: Phrase | None) -> str:
        if phrase is None:
            return "⟨EMPTY⟩"
        return "[" + sample.sentence(phrase.side).text(phrase.span) + "]"

    probs = pp.prediction.probs
    return (f"  {text(pp.pair.premise_phrase)} ↔ {text(pp.pair.hypothesis_phrase)}  "
            f"{pp.label.value} (E {probs[0]:.2f} C {probs[1]:.2f} N {probs[2]:.2f})")


def cmd_explain(opts, meta) -> int:
    predictions = read_predictions(opts["pred"])
    samples = {s.id: s for s in read_corpus(opts["corpus"])}
    blocks = []
    machine = [json.dumps({"_meta": meta}, ensure_ascii=False)]
    for record in sorted(predictions, key=lambda r: r.sample_id):
        if record.sample_id not in samples:
            raise ValidationError(f"prediction for unknown sample {record.sample_id!r}")
        sample = samples[record.sample_id]
        scores = record.sentence_scores.probs
        lines = [
            f"sample {record.sample_id}"
            + (f"  gold={sample.label.value}" if sample.label else ""),
            f"premise:    {sample.premise.text()}",
            f"hypothesis: {sample.hypothesis.text()}",
        ]
        lines.extend(_format_pair(pp, sample) for pp in record.pairs)
        lines.append(f"scores: E: {scores[0]:.2f} C: {scores[1]:.2f} N: {scores[2]:.2f} "
                     f"→ predicted {record.sentence_label.value}")
        blocks.append("\n".join(lines))
        machine.append(json.dumps({
            "sample_id": record.sample_id,
            "sentence_label": record.sentence_label.value,
            "sentence_probs": list(scores),
            "pairs": [{
                "premise": None if pp.pair.premise_phrase is None
                else sample.premise.text(pp.pair.premise_phrase.span),
                "hypothesis": None if pp.pair.hypothesis_phrase is None
                else sample.hypothesis.text(pp.pair.hypothesis_phrase.span),
                "aligned": pp.pair.aligned,
                "label": pp.label.value,
                "probs": list(pp.prediction.probs),
            } for pp in record.pairs],
        }, ensure_ascii=False))
    atomic_write_text(opts["out"], "\n\n".join(blocks) + ("\n" if blocks else ""))
    if opts["json_out"]:
        atomic_write_text(opts["json_out"], "\n".join(machine) + "\n")
    print(f"explained {len(predictions)} samples -> {opts['out']}")
    return 0


HANDLERS = {
    "synth": cmd_synth,
    "chunk": cmd_chunk,
    "align": cmd_align,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "agreement": cmd_agreement,
    "gradcheck": cmd_gradcheck,
    "sweep": cmd_sweep,
    "explain": cmd_explain,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args.command, args)
        meta = artifact_meta(args.command, opts)
        return HANDLERS[args.command](opts, meta)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ParseError, GenerationError, EmbeddingLookupError,
            FloatingPointError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

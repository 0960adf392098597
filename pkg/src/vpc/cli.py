"""Command-line front end: synth, memorize, score, eval.

Exit codes: 0 success, 2 invalid parameters or data, 3 unreadable or
corrupt files, 4 config drift between banks and the scoring config.
All outputs are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import evaluation, feature_io, memory, pipeline, scoring, synthetic
from .config import PipelineConfig, load_config, load_preset, preset_names, save_config
from .errors import ConfigDriftError, FormatError, ValidationError, VpcError
from .partition import KINDS

BANK_FILES = {kind: f"{kind}.vpcb" for kind in KINDS}


def _atomic_write(path, writer, mode="w"):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".vpc-tmp-")
    try:
        kwargs = {} if "b" in mode else {"encoding": "utf-8", "newline": ""}
        with os.fdopen(fd, mode, **kwargs) as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _resolve_config(args, banks_dir=None) -> PipelineConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    if getattr(args, "preset", None):
        return load_preset(args.preset)
    if banks_dir:
        candidate = os.path.join(banks_dir, "config.json")
        if os.path.exists(candidate):
            return load_config(candidate)
    raise ValidationError("no config given: pass --config or --preset"
                          + (" (and none stored next to the banks)" if banks_dir else ""))


def _parse_ratios(raw):
    ratios = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            ratios.append(float(part))
        except ValueError:
            raise ValidationError(f"bad ratio {part!r} in --ratios") from None
    if not ratios:
        raise ValidationError("--ratios lists no values")
    return ratios


def _ratio_label(ratio: float) -> str:
    return format(ratio, "g")


def cmd_synth(args) -> int:
    spec = synthetic.load_spec(args.spec)
    result = synthetic.generate(spec)
    os.makedirs(args.out, exist_ok=True)
    train_path = os.path.join(args.out, "train.vpcf")
    test_path = os.path.join(args.out, "test.vpcf")
    labels_path = os.path.join(args.out, "labels.json")
    _atomic_write(train_path, lambda fh: feature_io.write_clips(result.train_clips, fh), "wb")
    _atomic_write(test_path, lambda fh: feature_io.write_clips(result.test_clips, fh), "wb")
    _atomic_write(labels_path, lambda fh: evaluation.save_labels(result.labels, fh))
    print(f"wrote {len(result.train_clips)} train clips to {train_path}")
    print(f"wrote {len(result.test_clips)} test clips to {test_path}")
    print(f"wrote labels for {len(result.labels)} test videos to {labels_path}")
    return 0


def _memorize_into(clips, config: PipelineConfig, out_dir) -> dict:
    report = pipeline.memorize(clips, config)
    os.makedirs(out_dir, exist_ok=True)
    for kind, bank in report.banks.items():
        path = os.path.join(out_dir, BANK_FILES[kind])
        _atomic_write(path, lambda fh, b=bank: memory.save_bank(b, fh), "wb")
    save_config(config, os.path.join(out_dir, "config.json"))
    manifest = {
        "fingerprint": config.fingerprint(),
        "strategy": config.strategy,
        "seed": config.seed,
        "clips": len(clips),
        "banks": {
            kind: {
                "file": BANK_FILES[kind],
                "patches": report.patch_counts[kind],
                "kept": report.bank_sizes[kind],
                "ratio": config.ratio_for(kind),
            }
            for kind in KINDS
        },
        "seconds": report.seconds,
    }
    _atomic_write(os.path.join(out_dir, "manifest.json"),
                  lambda fh: json.dump(manifest, fh, indent=2, sort_keys=True))
    return manifest


def cmd_memorize(args) -> int:
    config = _resolve_config(args).validate()
    clips = feature_io.read_clips_path(args.train)
    if args.ratios:
        sweep = {}
        for ratio in _parse_ratios(args.ratios):
            label = _ratio_label(ratio)
            sub = config.with_overrides(ratio_spatial=ratio, ratio_temporal=ratio,
                                        ratio_highlevel=ratio)
            manifest = _memorize_into(clips, sub, os.path.join(args.out, f"ratio_{label}"))
            sweep[label] = manifest
            sizes = {k: manifest["banks"][k]["kept"] for k in KINDS}
            print(f"ratio {label}: bank sizes {sizes} "
                  f"in {manifest['seconds']['total']:.3f}s")
        _atomic_write(os.path.join(args.out, "sweep.json"),
                      lambda fh: json.dump(sweep, fh, indent=2, sort_keys=True))
        print(f"sweep banks written under {args.out}")
        return 0
    manifest = _memorize_into(clips, config, args.out)
    for kind in KINDS:
        info = manifest["banks"][kind]
        print(f"{kind}: kept {info['kept']} of {info['patches']} patches (ratio {info['ratio']})")
    print(f"banks written to {args.out}")
    return 0


def _load_banks(banks_dir, fingerprint, ignore_fingerprint):
    banks = {}
    for kind in KINDS:
        path = os.path.join(banks_dir, BANK_FILES[kind])
        banks[kind] = memory.load_bank_path(path, expected_fingerprint=fingerprint,
                                            allow_mismatch=ignore_fingerprint)
    return banks


def _with_suffix(path, label):
    stem, ext = os.path.splitext(path)
    return f"{stem}.ratio_{label}{ext or '.csv'}"


def cmd_score(args) -> int:
    if args.ratios:
        sweep = {}
        for ratio in _parse_ratios(args.ratios):
            label = _ratio_label(ratio)
            banks_dir = os.path.join(args.banks, f"ratio_{label}")
            config = _resolve_config(args, banks_dir=banks_dir).validate()
            banks = _load_banks(banks_dir, config.fingerprint(), args.ignore_fingerprint)
            clips = feature_io.read_clips_path(args.test)
            report = pipeline.score(clips, banks, config)
            out_path = _with_suffix(args.out, label)
            _atomic_write(out_path, lambda fh: scoring.write_scores_csv(report.series, fh))
            sweep[label] = {
                "csv": out_path,
                "windows": len(report.windows),
                "bank_sizes": {kind: banks[kind].count for kind in KINDS},
                "seconds": report.seconds,
                "windows_per_second": len(report.windows) / report.seconds["query"]
                if report.seconds["query"] > 0 else None,
            }
            print(f"ratio {label}: {len(report.windows)} windows, "
                  f"query {report.seconds['query']:.3f}s -> {out_path}")
        _atomic_write(f"{args.out}.sweep.json",
                      lambda fh: json.dump(sweep, fh, indent=2, sort_keys=True))
        return 0
    config = _resolve_config(args, banks_dir=args.banks).validate()
    banks = _load_banks(args.banks, config.fingerprint(), args.ignore_fingerprint)
    clips = feature_io.read_clips_path(args.test)
    report = pipeline.score(clips, banks, config)
    _atomic_write(args.out, lambda fh: scoring.write_scores_csv(report.series, fh))
    if args.timings:
        _atomic_write(args.timings,
                      lambda fh: json.dump(report.seconds, fh, indent=2, sort_keys=True))
    frames = sum(s.frame_count for s in report.series)
    print(f"scored {len(report.windows)} windows over {frames} frames "
          f"in {report.seconds['total']:.3f}s; wrote {args.out}")
    return 0


def cmd_eval(args) -> int:
    series = scoring.read_scores_csv_path(args.scores)
    labels = evaluation.load_labels_path(args.labels)
    report = evaluation.ablation_report(series, labels)
    for name in evaluation.ABLATION_STREAMS:
        print(f"{name}: {report[name]:.6f}")
    if args.report:
        _atomic_write(args.report,
                      lambda fh: json.dump(report, fh, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vpc",
        description="Training-free video anomaly detection over pre-extracted features.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic feature corpus from a spec")
    p.add_argument("--spec", required=True, help="synth spec JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("memorize", help="build memory banks from a training feature file")
    p.add_argument("--train", required=True, help="training feature file (.vpcf)")
    p.add_argument("--out", required=True, help="output directory for banks")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--preset", choices=preset_names(), help="built-in config preset")
    p.add_argument("--ratios", help="comma list; build one bank set per ratio "
                                    "under OUT/ratio_<r>/ with all three ratios overridden")
    p.set_defaults(func=cmd_memorize)

    p = sub.add_parser("score", help="score a feature file against existing banks")
    p.add_argument("--test", required=True, help="feature file to score (.vpcf)")
    p.add_argument("--banks", required=True, help="directory holding the banks")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--config", help="pipeline config JSON (default: banks/config.json)")
    p.add_argument("--preset", choices=preset_names(), help="built-in config preset")
    p.add_argument("--ratios", help="comma list; score against OUT-sweep banks "
                                    "under BANKS/ratio_<r>/, one CSV per ratio")
    p.add_argument("--timings", help="optional JSON path for stage wall times")
    p.add_argument("--ignore-fingerprint", action="store_true",
                   help="score even if banks were built under a different geometry")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="micro AUROC report of a score CSV against labels")
    p.add_argument("--scores", required=True, help="score CSV from `vpc score`")
    p.add_argument("--labels", required=True, help="label JSON (video_id -> 0/1 per frame)")
    p.add_argument("--report", help="optional JSON path for the report")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigDriftError as exc:
        print(f"vpc: config drift: {exc}", file=sys.stderr)
        return 4
    except (FormatError, OSError) as exc:
        print(f"vpc: file error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, json.JSONDecodeError) as exc:
        print(f"vpc: invalid input: {exc}", file=sys.stderr)
        return 2
    except VpcError as exc:
        print(f"vpc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

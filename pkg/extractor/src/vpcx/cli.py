"""vpc-extract: one command, config in, feature file out."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import load_config, load_preset
from .errors import BackendUnavailable, ConfigError, SourceError
from .extract import extract


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vpc-extract",
        description="Extract per-window backbone features from videos into "
                    "a feature file the vpc pipeline can memorize or score.")
    parser.add_argument("--config", help="extraction config JSON")
    parser.add_argument("--preset", help="named preset instead of --config "
                                         "(avenue, shtech, corridor)")
    parser.add_argument("--out", required=True, help="output feature file")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            config = load_config(args.config)
        elif args.preset:
            config = load_preset(args.preset)
        else:
            raise ConfigError("no config given: pass --config or --preset")
        report = extract(config, args.out)
    except (ConfigError, BackendUnavailable, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SourceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {report.clips} clips from {report.videos} videos to {args.out}")
    for video_id, reason in report.skipped:
        print(f"skipped {video_id}: {reason}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

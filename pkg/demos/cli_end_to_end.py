"""
The vpc command line, end to end
================================

Everything the library does is reachable from four subcommands: synth
writes a feature corpus, memorize builds the banks, score writes a CSV
of per-frame scores, eval prints AUROC.  This walkthrough drives them
in-process and shows the exact shell equivalent for each call.
"""

import json
import os
import tempfile

import vpc
from vpc import cli

root = tempfile.mkdtemp(prefix="vpc-demo-")
print(f"working under {root}\n")


def run(args):
    print("$ vpc " + " ".join(args))
    code = cli.main(args)
    assert code == 0, f"exit code {code}"
    print()


# describe the corpus: one motion anomaly in the second half of video 0
spec = vpc.SynthSpec(seed=9, videos_train=4, videos_test=3,
                     frames_per_video=24, d=4,
                     anomalies=(vpc.AnomalyEvent(0, 12, 24, "motion", 5.0),))
spec_path = os.path.join(root, "spec.json")
vpc.save_spec(spec, spec_path)

config = vpc.PipelineConfig(d=4, c_prime=8, delta=(0.5, 0.5),
                            gamma=(0.5, 0.5), ratio_spatial=0.25,
                            ratio_temporal=0.25, ratio_highlevel=0.10,
                            smoothing_sigma=2.0)
config_path = os.path.join(root, "config.json")
vpc.save_config(config, config_path)

data = os.path.join(root, "data")
banks = os.path.join(root, "banks")
scores = os.path.join(root, "scores.csv")

run(["synth", "--spec", spec_path, "--out", data])
run(["memorize", "--train", os.path.join(data, "train.vpcf"),
     "--config", config_path, "--out", banks])
run(["score", "--test", os.path.join(data, "test.vpcf"),
     "--banks", banks, "--out", scores])
run(["eval", "--scores", scores,
     "--labels", os.path.join(data, "labels.json")])

# the memorize manifest records what went into each bank
with open(os.path.join(banks, "manifest.json"), encoding="utf-8") as fh:
    manifest = json.load(fh)
print("bank sizes from the manifest:")
for kind, entry in manifest["banks"].items():
    print(f"  {kind:10s} kept {entry['kept']:5d} of {entry['patches']}")

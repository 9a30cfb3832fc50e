"""
Batch runs over an image set: the command-line surface
======================================================

The `svmcert` command reads a model JSON plus an IDX image/label pair,
verifies every (sample, delta) combination, and writes:

    results.csv   one row per (sample, delta)        [verify]
    summary.json  resolved run config + per-delta aggregates
    curve.csv     certified fraction vs delta        [curve]

This script drives the same entry point the shell would, against the
shipped synthetic fixture (172 support vectors, RBF, 100 samples).
A small sample limit and iteration budget keep it quick; drop the
limits to reproduce the full robustness curve.
"""

import pathlib
import subprocess
import sys
import tempfile

fixture = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "rbf-blobs"
out = pathlib.Path(tempfile.mkdtemp(prefix="svmcert-demo-"))

argv = [
    sys.executable, "-m", "svmcert.cli", "curve",
    "--model", str(fixture / "model.json"),
    "--images", str(fixture / "images.idx"),
    "--labels", str(fixture / "labels.idx"),
    "--classes", "0,1",            # byte label 0 -> +1, byte label 1 -> -1
    "--label-mode", "true",        # defend the dataset label, not the prediction
    "--deltas", "0.005,0.02,0.03",
    "--limit", "12",
    "--lr-init", "0.02", "--lr-final", "1e-5", "--max-iters", "80",
    "--out-dir", str(out),
]
print("$", " ".join(argv[1:]), "\n", flush=True)
subprocess.run(argv, check=True)

print(f"\nartifacts in {out}:")
for path in sorted(out.iterdir()):
    print(f"  {path.name}")
print(f"\n{ (out / 'curve.csv').read_text() }")

"""
Generating benchmarks and driving the command line
==================================================

Write a small benchmark set to disk and run the closeness test through the
command-line entry point, producing rows shaped like a results table.
"""

import io
import json
import tempfile
from pathlib import Path

from pcdist.cli import main

out = Path(tempfile.mkdtemp())


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


code, _ = run("gen", out, "--vars", 14, "--count", 3, "--ratio", 3.0, "--target", "far=0.2", "--seed", 11)
manifest = json.loads((out / "manifest.json").read_text())
print(sorted(p.name for p in out.iterdir()))

# %%
# One CSV row per benchmark: benchmark, eps, eta, dtv, result, seconds.
for entry in manifest["pairs"]:
    if "weights2" not in entry:
        print(entry["benchmark"], "infeasible target")
        continue
    nnf = out / entry["nnf"]
    code, text = run(
        "teq", nnf, out / entry["weights1"], nnf, out / entry["weights2"],
        "-e", "0.01", "-n", "0.2", "-d", "0.01", "--dtv", "--format", "csv",
        "--benchmark", entry["benchmark"], "--seed", 1,
    )
    print(text.splitlines()[-1], "exit", code)

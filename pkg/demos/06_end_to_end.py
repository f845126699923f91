"""Whole pipeline on a generated corpus: two gameplay bundles of one game."""

import json
import sys
import tempfile
from pathlib import Path

from playtriage.cli import main
from playtriage.synthetic import make_fixture

root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
fx = make_fixture(root)
print("corpus written to", root)
print(fx.config_path.read_text())

# %% the same run the `playtriage report` command performs
out = root / "report.json"
main(["report", "--config", str(fx.config_path), "--out", str(out)])
report = json.loads(out.read_text())
for ctx in report["contexts"]:
    print(ctx["context_id"], ctx["game"])
    for ty in ctx["issue_types"]:
        for issue in ty["issues"]:
            for s in issue["segments"]:
                print("   ", issue["issue_id"], s["bundle_id"], s["start_ms"], s["end_ms"],
                      repr(s["transcript"]), round(s["confidence"], 2))

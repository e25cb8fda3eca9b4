# Drive the command-line runner from Python: a small sweep over network
# sizes, then read back the summary it wrote.
import csv
import tempfile
from pathlib import Path

from cellswitch.cli import main

out = Path(tempfile.mkdtemp()) / "sweep"
code = main(["sweep", "--scenario", "B", "--s", "4,8,16", "--rounds", "3", "--seed", "1",
             "--methods", "vfa,all_on,all_off,sorting,exhaustive", "--out", str(out)])
print("exit code", code)

with open(out / "summary.csv", newline="") as fh:
    rows = list(csv.DictReader(fh))
for r in rows:
    print(f"s={r['s']:>2} {r['method']:10s} gain {float(r['gain_pct']):6.2f}%"
          f"  infeasible {r['infeasible_slots']}")

# exhaustive search is skipped above its cap of 15 small cells
print(sorted({r["s"] for r in rows if r["method"] == "exhaustive"}))
print(sorted(p.name for p in out.iterdir()))

"""Off-diagonal norm scan over 3 <= k <= k' <= KMAX, written as JSON-lines and CSV.

    python3 scripts/full_scan.py --kmax 6 --outdir results

The (5,6) pair has dimension 15,552,000, so the dimension cap is raised to
2e7 here. Expect tens of minutes on one core and ~3 GB peak memory.
"""

import argparse
import json
import logging
import os

from cocyclegap.experiments import SpectralConfig, cmd_scan

p = argparse.ArgumentParser()
p.add_argument("--kmin", type=int, default=3)
p.add_argument("--kmax", type=int, default=6)
p.add_argument("--m", type=int, default=3)
p.add_argument("--cap", type=int, default=2 * 10**7)
p.add_argument("--outdir", default="results")
args = p.parse_args()

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
os.makedirs(args.outdir, exist_ok=True)
stem = os.path.join(args.outdir, f"scan_{args.kmin}_{args.kmax}_m{args.m}")
report = cmd_scan(
    args.kmin, args.kmax, args.m, SpectralConfig(), out_path=stem + ".jsonl", csv_path=stem + ".csv", cap=args.cap,
    command=["scripts/full_scan.py", "--kmin", str(args.kmin), "--kmax", str(args.kmax), "--m", str(args.m)],
)
for r in report["rows"]:
    n = r["norm"]
    print(f'{r["k"]} {r["kprime"]} dim={r["dim"]:>9} norm={n["value"]:.12f} res={n["residual"]:.1e} '
          f'its={n["iterations"]} verdict={r.get("tensor_cocycle", {}).get("verdict", "-")} {r["wall_ms"] / 1000:.0f}s')
print(json.dumps(report["summary"], indent=2))

#!/usr/bin/env python3
"""Regenerate data/demo_corpus.epd, data/demo_scores.csv and data/demo_judges.csv.

The corpus and computed scores come from the chessprob binary; the judge
table is synthetic (three judges, half points, no zeros) and seeded.
"""
import argparse
import json
import random
import subprocess
import tempfile
from pathlib import Path

ROWS = 145


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", default="build/chessprob")
    ap.add_argument("--data", default="data")
    ap.add_argument("--seed", type=int, default=145)
    args = ap.parse_args()
    data = Path(args.data)
    data.mkdir(exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([args.cli, "compose", "--attempts", "3000", "--seed", str(args.seed), "--out", tmp],
                       check=True, stdout=subprocess.DEVNULL)
        records = [json.loads(l) for l in Path(tmp, "records.jsonl").read_text().splitlines() if l]
    if len(records) < ROWS:
        raise SystemExit(f"only {len(records)} compositions; raise --attempts")

    ids = [f"p{i + 1:03d}" for i in range(ROWS)]
    fen4 = [" ".join(r["fen"].split()[:4]) for r in records[:ROWS]]
    (data / "demo_corpus.epd").write_text("".join(f'{f} id "{i}";\n' for f, i in zip(fen4, ids)))

    scores = subprocess.run([args.cli, "score", "--seed", str(args.seed), str(data / "demo_corpus.epd")],
                            check=True, capture_output=True, text=True).stdout
    (data / "demo_scores.csv").write_text(scores)

    rng = random.Random(args.seed)
    grid = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
    weights = [2, 4, 7, 9, 8, 5, 2]
    lines = ["id,j1,j2,j3,total"]
    for i in ids:
        js = rng.choices(grid, weights, k=3)
        lines.append(",".join([i] + [f"{j:g}" for j in js] + [f"{sum(js):g}"]))
    (data / "demo_judges.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()

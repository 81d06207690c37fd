"""Run every shipped scenario, write its report and re-validate it.

    python3 scripts/run_scenarios.py [--out runs/]
"""

import argparse
from pathlib import Path

from muband.pipelines import run_scenario
from muband.report import validate_report
from muband.scenario import load_scenario

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs")
    ap.add_argument("--scenarios", default=str(ROOT / "scenarios"))
    args = ap.parse_args()
    for path in sorted(Path(args.scenarios).glob("*.toml")):
        sc = load_scenario(path)
        report = run_scenario(sc)
        out = report.write(Path(args.out) / sc.name)
        problems = validate_report(out)
        status = "ok" if not problems else "; ".join(problems)
        print(f"{sc.name:28s} exit={report.exit_code}  {report.verdict}  [{status}]")


if __name__ == "__main__":
    main()

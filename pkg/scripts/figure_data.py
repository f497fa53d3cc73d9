"""Write CSV and SVG for the gain-vs-alpha, architecture and approximation-error figures."""

import argparse
from pathlib import Path

from squintfree import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="figures")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    s = cli.Scenario()
    jobs = {
        "gain-linear": cli.run_gain_linear(s.alphas, [0, 1, 2]),
        "arch-compare": cli.run_arch_compare(s.alpha, s.relative_chains),
        "arch-compare-16": cli.run_arch_compare(16.0, s.relative_chains),
        "approx-error": cli.run_approx_error([0.5 * k for k in range(1, 33)], s.n_values),
    }
    for name, rows in jobs.items():
        (out / f"{name}.csv").write_text(cli.rows_to_csv(rows))
        command = name if name in ("gain-linear", "approx-error") else "arch-compare"
        (out / f"{name}.svg").write_text(cli.chart_for(command, rows))
        print(f"{name}: {len(rows)} rows")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Potential energy curve workflow over a directory of FCIDUMP files.

Each file must be named ``<R>.fcidump`` with R the bondlength in Angstrom
(e.g. ``1.10.fcidump``). For every point the script runs CASCI (full
enumeration), SQD over uniform samples, and Ext-SQD, writes the curve table,
and fits the ground state (Morse well + power-law tail -> Re, omega, D0).

Pair it with the integrals-helper package to generate the FCIDUMP grid.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from sqdkit import (
    enumerate_sector,
    make_generators,
    parse_fcidump,
    reference_configuration,
    run_ext_sqd,
    run_sqd,
    sample_uniform_sector,
    solve_subspace,
)
from sqdkit.fits import CurveData, fit_report
from sqdkit.pipelines import SolveSettings


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("fcidump_dir", type=Path)
    parser.add_argument("--out", type=Path, default=Path("curve.tsv"))
    parser.add_argument("--shots", type=int, default=30_000)
    parser.add_argument("--batches", type=int, default=2)
    parser.add_argument("--batch-size", type=int, default=1600)
    parser.add_argument("--threshold", type=float, default=1e-3)
    parser.add_argument("--n-roots", type=int, default=3)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--mu", type=float, default=7.001537,
                        help="reduced mass in amu for the frequency")
    parser.add_argument("--morse-window", type=str, default="0.9:1.5")
    parser.add_argument("--power-window", type=str, default="2.0:")
    return parser.parse_args()


def window(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    return (float(lo) if lo else 0.0, float(hi) if hi else np.inf)


def main() -> None:
    args = parse_args()
    paths = sorted(args.fcidump_dir.glob("*.fcidump"), key=lambda p: float(p.stem))
    if not paths:
        raise SystemExit(f"no *.fcidump files under {args.fcidump_dir}")

    rows = []
    for path in paths:
        r = float(path.stem)
        with open(path) as handle:
            data = parse_fcidump(handle)
        hamiltonian, sector = data.hamiltonian, data.sector
        settings = SolveSettings(n_roots=args.n_roots)

        casci, _ = solve_subspace(
            hamiltonian, enumerate_sector(sector), sector, settings, method="fci"
        )
        samples = sample_uniform_sector(sector, args.shots, args.seed)
        sqd, _ = run_sqd(
            hamiltonian, samples, sector,
            k=args.batches, batch_size=args.batch_size, score_iters=1,
            n_roots=args.n_roots, seed=args.seed,
        )
        generators = make_generators(sector, reference_configuration(sector), (1, 2))
        ext, _ = run_ext_sqd(
            hamiltonian, sqd, generators, threshold=args.threshold,
            n_roots=args.n_roots,
        )
        rows.append((r, casci.energies[0], sqd.energies[0], ext.energies[0]))
        print(
            f"R={r:5.2f}  CASCI {casci.energies[0]:+.6f}  SQD {sqd.energies[0]:+.6f} "
            f"(D={sqd.dimension})  Ext-SQD {ext.energies[0]:+.6f} (D_E={ext.dimension})"
        )

    with open(args.out, "w") as handle:
        handle.write("r casci sqd ext_sqd\n")
        for row in rows:
            handle.write(" ".join(f"{v:.10f}" for v in row) + "\n")
    print(f"curve written to {args.out}")

    grid = np.array(rows)
    curve = CurveData(grid[:, 0], {"ext_sqd": grid[:, 3]})
    try:
        report = fit_report(
            curve, window(args.morse_window), window(args.power_window), args.mu
        )
    except Exception as exc:  # narrow grids: report the curve anyway
        print(f"fit skipped: {exc}")
        return
    print(
        f"Re = {report.morse.re:.6f} A, omega = {report.morse.omega:.2f} 1/cm, "
        f"D0 = {report.d0_kj_per_mol:.2f} +- {report.sigma_d0_kj_per_mol:.2f} kJ/mol"
    )


if __name__ == "__main__":
    main()

"""Command line for FCIDUMP fixture generation.

Single geometries come from ``--atoms "N 0 0 0; N 0 0 1.1"`` or the diatomic
shorthand ``--diatomic N --r 1.1``; ``--r-grid`` loops a diatomic over
bondlengths, writing ``<R>.fcidump`` files plus one summary JSON per point.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .generate import GeometrySpec, ToolkitUnavailableError, generate_fcidump


def _parse_atoms(text: str) -> tuple[tuple[str, tuple[float, float, float]], ...]:
    atoms = []
    for token in text.split(";"):
        fields = token.split()
        if len(fields) != 4:
            raise ValueError(f"atom entry needs 'Symbol x y z', got {token!r}")
        atoms.append((fields[0], (float(fields[1]), float(fields[2]), float(fields[3]))))
    return tuple(atoms)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="integrals-helper", description=__doc__)
    parser.add_argument("--atoms", help="semicolon-separated 'Symbol x y z' entries (Angstrom)")
    parser.add_argument("--diatomic", help="element symbol for a homonuclear diatomic")
    parser.add_argument("--r", type=float, help="diatomic bondlength in Angstrom")
    parser.add_argument("--r-grid", help="comma-separated bondlengths for a diatomic scan")
    parser.add_argument("--basis", default="cc-pvdz")
    parser.add_argument("--scheme", choices=["avas", "frozen-core"], default="avas")
    parser.add_argument(
        "--avas-labels",
        default="N 2s,N 2p",
        help="comma-separated AO labels selecting the valence space",
    )
    parser.add_argument("--charge", type=int, default=0)
    parser.add_argument("--spin", type=int, default=0, help="2S = N_alpha - N_beta")
    parser.add_argument("--ccsd", action="store_true", help="also run CCSD for the summary")
    parser.add_argument("--out", default="out.fcidump", help="FCIDUMP path (single geometry)")
    parser.add_argument("--out-dir", default="fcidumps", help="output directory for --r-grid")
    parser.add_argument("--summary", help="summary JSON path (default: alongside the dump)")
    return parser


def _spec_kwargs(args: argparse.Namespace) -> dict:
    return dict(
        basis=args.basis,
        scheme=args.scheme,
        avas_labels=tuple(label.strip() for label in args.avas_labels.split(",")),
        charge=args.charge,
        spin=args.spin,
    )


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.r_grid:
            if not args.diatomic:
                raise ValueError("--r-grid needs --diatomic")
            out_dir = Path(args.out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            for r in (float(x) for x in args.r_grid.split(",")):
                spec = GeometrySpec.diatomic(args.diatomic, r, **_spec_kwargs(args))
                path = out_dir / f"{r:.2f}.fcidump"
                summary = generate_fcidump(spec, path, with_ccsd=args.ccsd)
                summary.write_json(path.with_suffix(".json"))
                print(
                    f"R={r:.2f}: ({summary.active_electrons}e,"
                    f"{summary.active_orbitals}o), RHF {summary.rhf_energy:.8f}"
                )
            return 0
        if args.diatomic:
            if args.r is None:
                raise ValueError("--diatomic needs --r (or use --r-grid)")
            spec = GeometrySpec.diatomic(args.diatomic, args.r, **_spec_kwargs(args))
        elif args.atoms:
            spec = GeometrySpec(atoms=_parse_atoms(args.atoms), **_spec_kwargs(args))
        else:
            raise ValueError("provide --atoms or --diatomic")
        summary = generate_fcidump(spec, args.out, with_ccsd=args.ccsd)
        summary_path = Path(args.summary) if args.summary else Path(args.out).with_suffix(".json")
        summary.write_json(summary_path)
        print(json.dumps(
            {"fcidump": summary.fcidump_path,
             "active_space": f"({summary.active_electrons}e,{summary.active_orbitals}o)",
             "rhf_energy": summary.rhf_energy},
            indent=2,
        ))
        return 0
    except ToolkitUnavailableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver: subcommands, run configuration, JSON results.

Configuration files are flat ``key = value`` lines (INI-style, ``#``
comments, dotted prefixes for orbital groups); every key can be overridden
on the command line as ``--key value``. Each run writes a single JSON
document (schema shipped in docs/result_schema.json). Worker count is a
runtime knob (flag or SQDKIT_WORKERS) and is deliberately outside the
configuration echo: identical config + seed give byte-identical output
regardless of parallelism, apart from the timing block.

Exit codes: 0 success, 2 input error, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import struct
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .configurations import (
    Configuration,
    Sector,
    SubspaceBasis,
    enumerate_sector,
    reference_configuration,
)
from .eigensolver import OverlapError
from .fits import CurveData, FitReport, fit_report, morse_energy
from .hamiltonian import (
    Hamiltonian,
    hubbard_chain,
    parse_fcidump,
    write_fcidump,
)
from .observables import OrbitalGroup, classify_roots, occupancy_profile, spin_report
from .pipelines import (
    CIState,
    SolveSettings,
    make_generators,
    run_ext_sqd,
    run_qse,
    run_sqd,
    solve_subspace,
)
from .sampling import (
    SampleSet,
    particle_number_stats,
    read_samples,
    sample_state,
    sample_uniform_sector,
    write_samples,
)

SCHEMA_VERSION = 1
STATE_MAGIC = b"SQDKCIST"
STATE_VERSION = 1

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_NOT_CONVERGED = 3


class ConfigError(ValueError):
    """Bad run configuration."""


class StateFileError(ValueError):
    """Corrupt or incompatible persisted-state file."""


@dataclass
class RunConfig:
    """Every knob of the pipelines plus input/output paths."""

    sector: tuple[int, int, int] | None = None
    fcidump: str | None = None
    model: str | None = None
    samples: str | None = None
    curve: str | None = None
    state_in: str | None = None
    state_out: str | None = None
    samples_out: str | None = None
    fcidump_out: str | None = None
    output: str | None = None
    k: int = 10
    batch_size: int = 100
    score_iters: int = 0
    n_roots: int = 3
    root_buffer: int = 3
    threshold: float = 1e-3
    ranks: tuple[int, ...] = (1, 2)
    window: tuple[int, int] | None = None
    tau: float = 1e-8
    chunk: int = 4096
    seed: int = 0
    shots: int = 10_000
    noise_rate: float = 0.0
    augment: int | None = None
    weighted_batches: bool = True
    close_spin: bool = True
    enum_cap: int = 10_000_000
    materialize_cap: int = 20_000
    dense_cutoff: int = 2000
    tol: float = 1e-8
    max_iter: int = 200
    source: str = "uniform"
    groups: dict[str, tuple[int, ...]] = field(default_factory=dict)
    morse_window: tuple[float, float] = (0.9, 1.5)
    power_window: tuple[float, float] = (2.0, float("inf"))
    mu: float = 7.001537
    fit_state: str | None = None
    l: int | None = None
    t: float = 1.0
    u: float = 0.0
    periodic: bool = False

    def settings(self, workers: int) -> SolveSettings:
        return SolveSettings(
            n_roots=self.n_roots,
            root_buffer=self.root_buffer,
            tol=self.tol,
            max_iter=self.max_iter,
            dense_cutoff=self.dense_cutoff,
            materialize_threshold=self.materialize_cap,
            chunk=self.chunk,
            workers=workers,
        )

    def echo(self) -> dict[str, Any]:
        def jsonable(value: Any) -> Any:
            if isinstance(value, tuple):
                return [jsonable(v) for v in value]
            if isinstance(value, dict):
                return {k: jsonable(v) for k, v in value.items()}
            if isinstance(value, float) and not np.isfinite(value):
                return "inf" if value > 0 else "-inf"
            return value

        return {
            f.name: jsonable(getattr(self, f.name))
            for f in fields(self)
            if getattr(self, f.name) is not None
        }


def _parse_float_window(text: str) -> tuple[float, float]:
    """'lo:hi' with either side omissible: ':2.0' -> (0, 2.0), '2.0:' -> (2.0, inf)."""
    lo_raw, _, hi_raw = text.partition(":")
    lo = float(lo_raw) if lo_raw else 0.0
    hi = float(hi_raw) if hi_raw else float("inf")
    return lo, hi


_PARSERS = {
    "sector": lambda s: tuple(int(x) for x in s.split(",")),
    "ranks": lambda s: tuple(int(x) for x in s.split(",")),
    "window": lambda s: tuple(int(x) for x in s.split(":")),
    "morse_window": _parse_float_window,
    "power_window": _parse_float_window,
    "weighted_batches": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "close_spin": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "periodic": lambda s: s.lower() in ("1", "true", "yes", "on"),
}


def _coerce(name: str, raw: str) -> Any:
    if name in _PARSERS:
        return _PARSERS[name](raw)
    hint = {f.name: f.type for f in fields(RunConfig)}.get(name, "str")
    if "int" in str(hint):
        return int(raw)
    if "float" in str(hint):
        return float(raw)
    return raw


def load_config(path: str | Path) -> dict[str, Any]:
    """Parse a flat key = value configuration file; unknown keys are rejected."""
    known = {f.name for f in fields(RunConfig)}
    values: dict[str, Any] = {}
    groups: dict[str, tuple[int, ...]] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key.startswith("group."):
            name = key[len("group."):]
            groups[name] = tuple(int(x) for x in raw.split(","))
            continue
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown configuration key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None
    if groups:
        values["groups"] = groups
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(load_config(args.config))
    for f in fields(RunConfig):
        cli_value = getattr(args, f.name, None)
        if cli_value is not None:
            values[f.name] = _coerce(f.name, cli_value) if isinstance(cli_value, str) and f.name in _PARSERS else cli_value
    if getattr(args, "group", None):
        groups = dict(values.get("groups", {}))
        for item in args.group:
            if "=" not in item:
                raise ConfigError(f"--group needs name=indices, got {item!r}")
            name, raw = item.split("=", 1)
            groups[name.strip()] = tuple(int(x) for x in raw.split(","))
        values["groups"] = groups
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# Shared input assembly.
# ---------------------------------------------------------------------------


def _resolve_hamiltonian(config: RunConfig) -> tuple[Hamiltonian, Sector]:
    if config.fcidump:
        with open(config.fcidump) as handle:
            data = parse_fcidump(handle)
        hamiltonian, sector = data.hamiltonian, data.sector
    elif config.model:
        hamiltonian = _model_hamiltonian(config)
        if config.sector is None:
            raise ConfigError("model Hamiltonians need an explicit sector (m,n_alpha,n_beta)")
        sector = Sector(*config.sector)
    else:
        raise ConfigError("provide either an fcidump path or a model specification")
    if config.sector is not None:
        sector = Sector(*config.sector)
    if sector.m != hamiltonian.m:
        raise ConfigError(
            f"sector orbital count {sector.m} != Hamiltonian orbital count {hamiltonian.m}"
        )
    return hamiltonian, sector


def _model_hamiltonian(config: RunConfig) -> Hamiltonian:
    recipe = config.model or ""
    name, _, params = recipe.partition(":")
    if name.strip().lower() != "hubbard":
        raise ConfigError(f"unknown model {name!r}; supported: hubbard")
    kwargs: dict[str, str] = {}
    for token in filter(None, (t.strip() for t in params.split(","))):
        key, _, value = token.partition("=")
        kwargs[key.strip().lower()] = value.strip() or "true"
    try:
        l = int(kwargs.get("l", config.l if config.l is not None else 0))
        t = float(kwargs.get("t", config.t))
        u = float(kwargs.get("u", config.u))
        periodic = kwargs.get("periodic", str(config.periodic)).lower() in ("1", "true", "yes")
    except ValueError as exc:
        raise ConfigError(f"bad model parameter in {recipe!r}: {exc}") from None
    if l < 1:
        raise ConfigError("hubbard model needs l >= 1 (e.g. hubbard:l=6,t=1,u=4)")
    return hubbard_chain(l, t, u, periodic)


def _resolve_samples(config: RunConfig, sector: Sector) -> SampleSet:
    if config.samples:
        with open(config.samples) as handle:
            return read_samples(handle, sector.m)
    if config.source == "uniform":
        return sample_uniform_sector(sector, config.shots, config.seed)
    raise ConfigError("provide a samples file or source=uniform with a shot count")


def _workers(args: argparse.Namespace) -> int:
    if getattr(args, "workers", None) is not None:
        return max(1, int(args.workers))
    return max(1, int(os.environ.get("SQDKIT_WORKERS", "1")))


# ---------------------------------------------------------------------------
# State persistence.
# ---------------------------------------------------------------------------


def persist_state(state: CIState, path: str | Path) -> None:
    """Binary-stable CI state file: header, basis words, energies, coefficients.

    Everything is little-endian; a SHA-256 digest of the payload is appended
    and verified on load.
    """
    m = state.sector.m
    words = (m + 63) // 64
    method = state.method.encode()
    blob = bytearray()
    blob += struct.pack(
        "<8sIIIIQII",
        STATE_MAGIC,
        STATE_VERSION,
        m,
        state.sector.n_alpha,
        state.sector.n_beta,
        state.dimension,
        state.n_roots,
        len(method),
    )
    blob += method
    mask64 = (1 << 64) - 1
    for config in state.basis:
        for mask in (config.alpha, config.beta):
            for w in range(words):
                blob += struct.pack("<Q", (mask >> (64 * w)) & mask64)
    blob += np.ascontiguousarray(state.energies, dtype="<f8").tobytes()
    blob += np.ascontiguousarray(state.coefficients, dtype="<f8").tobytes()
    digest = hashlib.sha256(blob).digest()
    Path(path).write_bytes(bytes(blob) + digest)


def load_state(path: str | Path) -> CIState:
    raw = Path(path).read_bytes()
    if len(raw) < 40 + 32:
        raise StateFileError(f"{path}: truncated state file")
    blob, digest = raw[:-32], raw[-32:]
    if hashlib.sha256(blob).digest() != digest:
        raise StateFileError(f"{path}: checksum mismatch (file corrupt or truncated)")
    header = struct.unpack_from("<8sIIIIQII", blob, 0)
    magic, version, m, n_alpha, n_beta, n_basis, n_roots, method_len = header
    if magic != STATE_MAGIC:
        raise StateFileError(f"{path}: not a state file (bad magic {magic!r})")
    if version != STATE_VERSION:
        raise StateFileError(f"{path}: unsupported state version {version}")
    offset = struct.calcsize("<8sIIIIQII")
    method = blob[offset : offset + method_len].decode()
    offset += method_len
    words = (m + 63) // 64
    configs = []
    for _ in range(n_basis):
        masks = []
        for _ in range(2):
            mask = 0
            for w in range(words):
                (word,) = struct.unpack_from("<Q", blob, offset)
                mask |= word << (64 * w)
                offset += 8
            masks.append(mask)
        configs.append(Configuration(masks[0], masks[1]))
    energies = np.frombuffer(blob, dtype="<f8", count=n_roots, offset=offset).copy()
    offset += 8 * n_roots
    coefficients = (
        np.frombuffer(blob, dtype="<f8", count=n_basis * n_roots, offset=offset)
        .reshape(n_basis, n_roots)
        .copy()
    )
    return CIState(
        basis=SubspaceBasis._from_sorted(configs),
        coefficients=coefficients,
        energies=energies,
        sector=Sector(m, n_alpha, n_beta),
        method=method,
    )


# ---------------------------------------------------------------------------
# Result document.
# ---------------------------------------------------------------------------


def _per_root_block(state: CIState) -> dict[str, Any]:
    labels = classify_roots(state)
    return {
        "energies": [float(e) for e in state.energies],
        "s_squared": [l.s_squared for l in labels],
        "labels": [l.name for l in labels],
        "kinds": [l.kind for l in labels],
        "converged": state.converged,
    }


def _observables_block(state: CIState, config: RunConfig) -> dict[str, Any]:
    groups = [OrbitalGroup(name, orbitals) for name, orbitals in config.groups.items()]
    out: dict[str, Any] = {}
    for mu in range(state.n_roots):
        column = state.column_state(mu)
        occ_a, occ_b, occ = occupancy_profile(column)
        entry: dict[str, Any] = {
            "occupancies": occ.tolist(),
            "occupancies_alpha": occ_a.tolist(),
            "occupancies_beta": occ_b.tolist(),
        }
        if groups:
            report = spin_report(column, groups)
            entry["groups"] = {
                name: {
                    "n_up": report.charges[name][0],
                    "n_down": report.charges[name][1],
                    "spin": report.spins[name].tolist(),
                }
                for name in report.groups
            }
            entry["correlations"] = {
                f"{a}:{b}": {"raw": raw, "connected": connected}
                for (a, b), (raw, connected) in report.correlations.items()
            }
        out[f"root_{mu}"] = entry
    return out


def _write_result(document: dict[str, Any], config: RunConfig, started: float) -> None:
    document["schema_version"] = SCHEMA_VERSION
    document["config"] = config.echo()
    document["seed"] = config.seed
    document["timing"] = {"wall_s": time.perf_counter() - started}
    document["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    text = json.dumps(document, indent=2, sort_keys=True, allow_nan=False)
    if config.output:
        Path(config.output).write_text(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def _cmd_fci(config: RunConfig, workers: int) -> int:
    started = time.perf_counter()
    hamiltonian, sector = _resolve_hamiltonian(config)
    basis = enumerate_sector(sector, cap=config.enum_cap)
    state, _ = solve_subspace(
        hamiltonian, basis, sector, config.settings(workers), method="fci"
    )
    document = {
        "method": "fci",
        **_per_root_block(state),
        "dimensions": {"d": state.dimension},
        "observables": _observables_block(state, config),
    }
    if config.state_out:
        persist_state(state, config.state_out)
    _write_result(document, config, started)
    return EXIT_OK if state.converged else EXIT_NOT_CONVERGED


def _cmd_sqd(config: RunConfig, workers: int) -> int:
    started = time.perf_counter()
    hamiltonian, sector = _resolve_hamiltonian(config)
    samples = _resolve_samples(config, sector)
    state, diagnostics = run_sqd(
        hamiltonian,
        samples,
        sector,
        k=config.k,
        batch_size=config.batch_size,
        score_iters=config.score_iters,
        n_roots=config.n_roots,
        seed=config.seed,
        settings=config.settings(workers),
        augment=config.augment,
        weighted=config.weighted_batches,
        close_spin=config.close_spin,
    )
    document = {
        "method": "sqd",
        **_per_root_block(state),
        "dimensions": {"d": state.dimension},
        "traces": [
            {
                "iteration": t.iteration,
                "batch_energies": t.batch_energies,
                "batch_dimensions": t.batch_dimensions,
                "chosen_batch": t.chosen_batch,
                "recovered_total": t.recovered_total,
                "recovered_distinct": t.recovered_distinct,
            }
            for t in diagnostics.traces
        ],
        "observables": _observables_block(state, config),
    }
    if config.state_out:
        persist_state(state, config.state_out)
    _write_result(document, config, started)
    return EXIT_OK if diagnostics.unconverged_roots == 0 else EXIT_NOT_CONVERGED


def _cmd_ext_sqd(config: RunConfig, workers: int) -> int:
    started = time.perf_counter()
    hamiltonian, _ = _resolve_hamiltonian(config)
    if not config.state_in:
        raise ConfigError("ext-sqd consumes a persisted state (state_in)")
    sqd_state = load_state(config.state_in)
    generators = make_generators(
        sqd_state.sector,
        reference_configuration(sqd_state.sector),
        config.ranks,
        config.window,
    )
    state, tallies = run_ext_sqd(
        hamiltonian,
        sqd_state,
        generators,
        threshold=config.threshold,
        n_roots=config.n_roots,
        settings=config.settings(workers),
        close_spin=config.close_spin,
    )
    document = {
        "method": "ext-sqd",
        **_per_root_block(state),
        "dimensions": {
            "d": sqd_state.dimension,
            "d_extended": state.dimension,
            "product_bound": tallies.product_bound,
        },
        "generator_counts": {str(r): n for r, n in generators.counts.items()},
        "tallies": {
            "new_unique": tallies.new_unique,
            "annihilated": tallies.annihilated,
            "duplicate_new": tallies.duplicate_new,
            "already_present": tallies.already_present,
        },
        "observables": _observables_block(state, config),
    }
    if config.state_out:
        persist_state(state, config.state_out)
    _write_result(document, config, started)
    return EXIT_OK if state.converged else EXIT_NOT_CONVERGED


def _cmd_qse(config: RunConfig, workers: int) -> int:
    started = time.perf_counter()
    hamiltonian, _ = _resolve_hamiltonian(config)
    if not config.state_in:
        raise ConfigError("qse consumes a persisted state (state_in)")
    sqd_state = load_state(config.state_in)
    generators = make_generators(
        sqd_state.sector,
        reference_configuration(sqd_state.sector),
        config.ranks,
        config.window,
    )
    result = run_qse(
        hamiltonian,
        sqd_state,
        generators,
        tau=config.tau,
        n_roots=config.n_roots,
        settings=config.settings(workers),
    )
    document = {
        "method": "qse",
        "energies": [float(e) for e in result.energies],
        "dimensions": {
            "operator_basis": len(generators),
            "kept_dimension": result.kept_dimension,
        },
        "generator_counts": {str(r): n for r, n in generators.counts.items()},
    }
    _write_result(document, config, started)
    return EXIT_OK


def _cmd_sample(config: RunConfig, workers: int) -> int:
    started = time.perf_counter()
    if not config.samples_out:
        raise ConfigError("sample needs samples_out")
    if config.source == "uniform":
        if config.sector is None:
            raise ConfigError("uniform sampling needs a sector")
        sector = Sector(*config.sector)
        samples = sample_uniform_sector(sector, config.shots, config.seed)
    elif config.source == "state":
        if not config.state_in:
            raise ConfigError("state sampling needs state_in")
        state = load_state(config.state_in)
        samples = sample_state(
            state.column_state(0).normalized(), config.shots, config.noise_rate, config.seed
        )
    else:
        raise ConfigError(f"unknown sample source {config.source!r}")
    with open(config.samples_out, "w") as handle:
        write_samples(samples, handle)
    document = {
        "method": "sample",
        "shots": samples.total,
        "distinct": samples.n_distinct,
        "samples_out": config.samples_out,
    }
    _write_result(document, config, started)
    return EXIT_OK


def _cmd_observables(config: RunConfig, workers: int) -> int:
    started = time.perf_counter()
    if not config.state_in:
        raise ConfigError("observables consumes a persisted state (state_in)")
    state = load_state(config.state_in)
    document = {
        "method": "observables",
        **_per_root_block(state),
        "dimensions": {"d": state.dimension},
        "observables": _observables_block(state, config),
    }
    _write_result(document, config, started)
    return EXIT_OK


def _cmd_fit(config: RunConfig, workers: int) -> int:
    started = time.perf_counter()
    if not config.curve:
        raise ConfigError("fit consumes a curve file")
    with open(config.curve) as handle:
        curve = CurveData.from_text(handle)
    lo, hi = config.power_window
    print(
        f"power-law window: {lo} <= R <= {hi} "
        "(choose the complement via power_window if desired)",
        file=sys.stderr,
    )
    report = fit_report(
        curve,
        morse_window=config.morse_window,
        power_window=config.power_window,
        mu_amu=config.mu,
        state=config.fit_state,
    )
    document = {"method": "fit", "fit": _fit_block(report)}
    if config.output:
        table_path = Path(config.output).with_suffix(".table.tsv")
        _write_fit_table(curve, report, table_path, config.fit_state)
        document["fit_table"] = str(table_path)
    _write_result(document, config, started)
    return EXIT_OK


def _fit_block(report: FitReport) -> dict[str, Any]:
    morse, tail = report.morse, report.tail
    return {
        "re_angstrom": morse.re,
        "sigma_re": morse.sigma_re,
        "e_min_hartree": morse.e_min,
        "sigma_e_min": morse.sigma_e_min,
        "de_well_hartree": morse.de_well,
        "sigma_de_well": morse.sigma_de_well,
        "a_inv_angstrom": morse.a,
        "sigma_a": morse.sigma_a,
        "omega_cm": morse.omega,
        "sigma_omega": morse.sigma_omega,
        "morse_rms": morse.residual_rms,
        "morse_window": list(morse.window),
        "e_inf_hartree": tail.e_inf,
        "sigma_e_inf": tail.sigma_e_inf,
        "tail_amplitude": tail.amplitude,
        "tail_exponent": tail.exponent,
        "tail_rms": tail.residual_rms,
        "d0_kj_per_mol": report.d0_kj_per_mol,
        "sigma_d0_kj_per_mol": report.sigma_d0_kj_per_mol,
    }


def _write_fit_table(
    curve: CurveData, report: FitReport, path: Path, state: str | None
) -> None:
    e_data = curve.state(state)
    morse = report.morse
    e_fit = morse_energy(curve.r, morse.e_min, morse.de_well, morse.a, morse.re)
    with open(path, "w") as handle:
        handle.write("r_angstrom\te_data_hartree\te_fit_hartree\n")
        for r, e1, e2 in zip(curve.r, e_data, e_fit):
            handle.write(f"{r:.10g}\t{e1:.12g}\t{e2:.12g}\n")


def _cmd_model(config: RunConfig, workers: int) -> int:
    started = time.perf_counter()
    hamiltonian = _model_hamiltonian(config)
    if config.sector is None:
        raise ConfigError("model export needs a sector for the FCIDUMP header")
    sector = Sector(*config.sector)
    if not config.fcidump_out:
        raise ConfigError("model needs fcidump_out")
    with open(config.fcidump_out, "w") as handle:
        write_fcidump(hamiltonian, sector, handle)
    document = {
        "method": "model",
        "model": config.model,
        "orbitals": hamiltonian.m,
        "fcidump_out": config.fcidump_out,
    }
    _write_result(document, config, started)
    return EXIT_OK


def _cmd_stats(config: RunConfig, workers: int) -> int:
    started = time.perf_counter()
    if not config.samples:
        raise ConfigError("stats consumes a samples file")
    if config.sector is None:
        raise ConfigError("stats needs the target sector")
    sector = Sector(*config.sector)
    with open(config.samples) as handle:
        samples = read_samples(handle, sector.m)
    stats = particle_number_stats(samples, sector)
    document = {
        "method": "stats",
        "stats": {
            "total": samples.total,
            "distinct": samples.n_distinct,
            "p_hw": stats.p_hw,
            "ci95": list(stats.ci95),
            "p_unif": stats.p_unif,
        },
    }
    _write_result(document, config, started)
    return EXIT_OK


_COMMANDS = {
    "fci": _cmd_fci,
    "sqd": _cmd_sqd,
    "ext-sqd": _cmd_ext_sqd,
    "qse": _cmd_qse,
    "sample": _cmd_sample,
    "observables": _cmd_observables,
    "fit": _cmd_fit,
    "model": _cmd_model,
    "stats": _cmd_stats,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqdkit",
        description="Selected-CI engine over sampled configuration subspaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key=value configuration file")
        p.add_argument("--workers", type=int, help="worker count (default: SQDKIT_WORKERS or 1)")
        p.add_argument("--group", action="append", help="orbital group, name=i,j,k (repeatable)")
        for f in fields(RunConfig):
            if f.name == "groups":
                continue
            flag = "--" + f.name.replace("_", "-")
            if f.type in ("int", "int | None"):
                p.add_argument(flag, dest=f.name, type=int)
            elif f.type in ("float", "float | None"):
                p.add_argument(flag, dest=f.name, type=float)
            else:
                p.add_argument(flag, dest=f.name)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = build_config(args)
        workers = _workers(args)
        return _COMMANDS[args.command](config, workers)
    except (ConfigError, StateFileError, OverlapError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

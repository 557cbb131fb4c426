"""Active-space FCIDUMP generation through PySCF.

Two active-space rules are supported: atomic-valence selection (AVAS, by
target AO labels) and the frozen-core approximation (core count from the
periodic table). The emitted file follows the Molpro FCIDUMP convention with
chemist-notation two-electron integrals and the core energy folded into the
scalar offset.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path


class ToolkitUnavailableError(RuntimeError):
    """PySCF is not installed; this component is optional."""


def _require_pyscf():
    try:
        import pyscf  # noqa: F401
        from pyscf import ao2mo, gto, mcscf, scf  # noqa: F401
        from pyscf.tools import fcidump  # noqa: F401
    except ImportError as exc:
        raise ToolkitUnavailableError(
            "integrals-helper needs PySCF for integral generation; the component "
            "is optional and nothing else depends on it (pip install pyscf)"
        ) from exc
    return pyscf


@dataclass(frozen=True)
class GeometrySpec:
    """Molecular geometry plus basis and active-space rule.

    ``atoms`` is a sequence of (symbol, (x, y, z)) with coordinates in
    Angstrom; neutral singlet by default.
    """

    atoms: tuple[tuple[str, tuple[float, float, float]], ...]
    basis: str = "cc-pvdz"
    scheme: str = "avas"  # "avas" or "frozen-core"
    avas_labels: tuple[str, ...] = ("N 2s", "N 2p")
    charge: int = 0
    spin: int = 0  # 2S = N_alpha - N_beta

    def __post_init__(self) -> None:
        if self.scheme not in ("avas", "frozen-core"):
            raise ValueError(f"unknown active-space scheme {self.scheme!r}")
        if not self.atoms:
            raise ValueError("geometry needs at least one atom")

    @classmethod
    def diatomic(cls, element: str, bondlength: float, **kwargs) -> "GeometrySpec":
        atoms = (
            (element, (0.0, 0.0, 0.0)),
            (element, (0.0, 0.0, float(bondlength))),
        )
        return cls(atoms=atoms, **kwargs)


@dataclass
class GenerationSummary:
    rhf_energy: float
    active_electrons: int
    active_orbitals: int
    core_energy: float
    fcidump_path: str
    ccsd_energy: float | None = None

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def generate_fcidump(
    spec: GeometrySpec,
    out_path: str | Path,
    with_ccsd: bool = False,
) -> GenerationSummary:
    """RHF + active-space extraction + FCIDUMP emission.

    Returns the summary (RHF energy, active-space dimensions, core energy);
    raises ToolkitUnavailableError without PySCF and RuntimeError when the
    SCF does not converge.
    """
    _require_pyscf()
    from pyscf import ao2mo, gto, mcscf, scf
    from pyscf.data import elements
    from pyscf.tools import fcidump as fcidump_tools

    mol = gto.M(
        atom=[(symbol, xyz) for symbol, xyz in spec.atoms],
        basis=spec.basis,
        charge=spec.charge,
        spin=spec.spin,
        unit="Angstrom",
    )
    mf = scf.RHF(mol).run()
    if not mf.converged:
        raise RuntimeError(f"RHF did not converge for {spec}")

    if spec.scheme == "avas":
        from pyscf.mcscf import avas

        ncas, nelecas, mo = avas.avas(mf, list(spec.avas_labels))
        nelecas = int(round(nelecas))
    else:
        ncore = elements.chemcore(mol)
        ncas = mol.nao_nr() - ncore
        nelecas = mol.nelectron - 2 * ncore
        mo = mf.mo_coeff

    mc = mcscf.CASCI(mf, ncas, nelecas)
    h1, ecore = mc.get_h1eff(mo)
    h2 = ao2mo.restore(8, mc.get_h2eff(mo), ncas)
    fcidump_tools.from_integrals(
        str(out_path), h1, h2, ncas, nelecas, nuc=float(ecore), ms=spec.spin
    )

    ccsd_energy = None
    if with_ccsd:
        from pyscf import cc

        ccsd = cc.CCSD(mf).run()
        if ccsd.converged:
            ccsd_energy = float(ccsd.e_tot)

    return GenerationSummary(
        rhf_energy=float(mf.e_tot),
        active_electrons=int(nelecas),
        active_orbitals=int(ncas),
        core_energy=float(ecore),
        fcidump_path=str(out_path),
        ccsd_energy=ccsd_energy,
    )

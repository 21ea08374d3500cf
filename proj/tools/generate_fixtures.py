#!/usr/bin/env python3
"""Regenerate the bundled FCIDUMP fixtures and their manifests.

Requires PySCF. Integrals are RHF/STO-3G molecular-orbital integrals; the
reference energies recorded in each manifest come from PySCF FCI (full
space) or CASCI (active space) on the same orbitals.
"""
import hashlib
import json
import os
import sys

from pyscf import fci, gto, mcscf, scf
from pyscf.tools import fcidump

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")


def sha256(path):
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def run(atom, basis="sto-3g"):
    mol = gto.M(atom=atom, basis=basis, unit="Angstrom", symmetry=False, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    return mol, mf


def write_point(dirname, stem, mol, mf, distance, active=None):
    path = os.path.join(dirname, stem + ".fcidump")
    fcidump.from_scf(mf, path, tol=1e-15)
    point = {
        "path": stem + ".fcidump",
        "distance": distance,
        "sha256": sha256(path),
        "hf_energy": float(mf.e_tot),
    }
    if active is None:
        point["fci_energy"] = float(fci.FCI(mf).kernel()[0])
    else:
        point["fci_energy"] = float(fci.FCI(mf).kernel()[0]) if mol.nao <= 7 else None
        ncas, nelecas = active
        cas = mcscf.CASCI(mf, ncas, nelecas)
        cas.verbose = 0
        point["casci_energy"] = float(cas.kernel()[0])
    return point


def main():
    os.makedirs(OUT, exist_ok=True)

    h2_dir = os.path.join(OUT, "h2")
    os.makedirs(h2_dir, exist_ok=True)
    points = []
    for d in [0.5, 0.6, 0.7414, 0.9, 1.1, 1.5]:
        mol, mf = run(f"H 0 0 0; H 0 0 {d}")
        points.append(write_point(h2_dir, f"h2_{d:.4f}", mol, mf, d))
    with open(os.path.join(h2_dir, "manifest.json"), "w") as f:
        json.dump({"molecule": "H2", "basis": "sto-3g", "mapping": "bk",
                   "active_space": {"frozen": [], "dropped": []},
                   "points": points}, f, indent=2)

    lih_dir = os.path.join(OUT, "lih")
    os.makedirs(lih_dir, exist_ok=True)
    mol, mf = run("Li 0 0 0; H 0 0 1.55")
    p = write_point(lih_dir, "lih_1.5500", mol, mf, 1.55, active=(3, 2))
    with open(os.path.join(lih_dir, "manifest.json"), "w") as f:
        json.dump({"molecule": "LiH", "basis": "sto-3g", "mapping": "bk",
                   "active_space": {"frozen": [0], "dropped": [4, 5]},
                   "points": [p]}, f, indent=2)

    beh2_dir = os.path.join(OUT, "beh2")
    os.makedirs(beh2_dir, exist_ok=True)
    mol, mf = run("Be 0 0 0; H 0 0 1.33; H 0 0 -1.33")
    p = write_point(beh2_dir, "beh2_1.3300", mol, mf, 1.33, active=(4, 4))
    with open(os.path.join(beh2_dir, "manifest.json"), "w") as f:
        json.dump({"molecule": "BeH2", "basis": "sto-3g", "mapping": "bk",
                   "active_space": {"frozen": [0], "dropped": [5, 6]},
                   "points": [p]}, f, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())

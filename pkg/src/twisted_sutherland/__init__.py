"""Spectra of twisted spin Sutherland models checked three ways: representation
theory, brute-force oracles, and finite-difference diagonalization."""

from .fdspectra import FDProblem, SpectrumReport, compare, fd_eigenvalues, richardson, verify_variants
from .fockspin import dim_invariant, invariant_basis, spin_operator
from .hamassembly import (
    HamiltonianSpec,
    PotentialTerm,
    assemble_closed_form,
    assemble_generic,
    assemble_untwisted_scalar,
    compare_specs,
    evaluate_potential,
    standard_sutherland_spec,
)
from .repcalc import (
    DominantWeight,
    SpectrumPrediction,
    admissible_twisted,
    casimir,
    pieri_decompose,
    spectrum_standard,
    spectrum_twisted,
    spectrum_untwisted,
)
from .rootfold import Family, alcove, build_folded_roots, rho_theta_norm, trace_form
from .weylgrp import build_group, check_density_invariance

__all__ = [
    "FDProblem",
    "SpectrumReport",
    "compare",
    "fd_eigenvalues",
    "richardson",
    "verify_variants",
    "dim_invariant",
    "invariant_basis",
    "spin_operator",
    "HamiltonianSpec",
    "PotentialTerm",
    "assemble_closed_form",
    "assemble_generic",
    "assemble_untwisted_scalar",
    "compare_specs",
    "evaluate_potential",
    "standard_sutherland_spec",
    "DominantWeight",
    "SpectrumPrediction",
    "admissible_twisted",
    "casimir",
    "pieri_decompose",
    "spectrum_standard",
    "spectrum_twisted",
    "spectrum_untwisted",
    "Family",
    "alcove",
    "build_folded_roots",
    "rho_theta_norm",
    "trace_form",
    "build_group",
    "check_density_invariance",
]

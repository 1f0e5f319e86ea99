"""Quantum state transfer in XX spin chains with power-law on-site potentials."""

from ._core import (
    ChainSpec,
    EigenDecomposition,
    Hamiltonian,
    NumericalError,
    amplitude,
    build_chain,
    build_fields,
    chain_from_arrays,
    decompose,
    default_time_step,
    evolve,
    experimental_ratio,
    identify_dimer_modes,
    integrate_oracle,
    make_report,
    p_threshold,
    qst_drop,
    residual_norm,
    run_cli,
    t_star_estimate,
    to_single_excitation,
)

__all__ = [
    "ChainSpec",
    "EigenDecomposition",
    "Hamiltonian",
    "NumericalError",
    "amplitude",
    "build_chain",
    "build_fields",
    "chain_from_arrays",
    "decompose",
    "default_time_step",
    "evolve",
    "experimental_ratio",
    "identify_dimer_modes",
    "integrate_oracle",
    "make_report",
    "p_threshold",
    "qst_drop",
    "residual_norm",
    "run_cli",
    "t_star_estimate",
    "to_single_excitation",
]

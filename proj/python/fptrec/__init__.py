"""Recover hidden vertex centralities from passage-time observations on a subset."""

from fptrec._core import (
    FptTensor,
    Graph,
    NumericError,
    ValidationError,
    check_assumptions,
    exact_fpt,
    frne,
    harmonic_basis,
    l2rne,
    read_tensor_csv,
    reconstruct,
    simulate_fpt,
    write_tensor_csv,
)

__all__ = [
    "FptTensor",
    "Graph",
    "NumericError",
    "ValidationError",
    "check_assumptions",
    "exact_fpt",
    "frne",
    "harmonic_basis",
    "l2rne",
    "read_tensor_csv",
    "reconstruct",
    "simulate_fpt",
    "write_tensor_csv",
]

__version__ = "0.1.0"

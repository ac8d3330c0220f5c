"""Numerical verification of harmonic and biharmonic conditions for smooth
maps and Riemannian submersions with 1-dimensional fibers."""

from ._sublab import (
    bitension_at,
    check_model,
    eval_expr,
    expr_partial,
    fd_partial,
    run_config,
    self_validate,
    tension_at,
    zoo_ids,
    __version__,
)

__all__ = [
    "bitension_at",
    "check_model",
    "eval_expr",
    "expr_partial",
    "fd_partial",
    "run_config",
    "self_validate",
    "tension_at",
    "zoo_ids",
    "__version__",
]

"""C-system kernel: handles, the abstract interface, derived operations and checks."""
from .checks import (
    canonical_squares,
    check_all_pullbacks,
    check_c0_axioms,
    check_pullback_universal,
    check_s_axioms,
    check_sf_from_pullback,
)
from .handles import DomainError, Mor, Ob, Section, WindowOverflow, sort_key
from .ops import (
    as_section,
    ft_iter,
    ft_mor,
    level_offset,
    nested_projection_section,
    op_delta,
    op_ft,
    op_partial,
    op_pt,
    op_S,
    op_St,
    op_T,
    op_Tt,
    proj_iter,
    pullback_iter,
    q_iter,
    sect_pull,
    solve_pullback,
    star_iter,
)
from .report import FAIL, PASS, SKIPPED, CheckReport, Recorder
from .system import CSystem

__all__ = [name for name in dir() if not name.startswith("_")]

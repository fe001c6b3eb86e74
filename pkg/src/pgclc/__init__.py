"""Interpreter, denotational approximants and may/must semi-decision
procedures for a concurrent probabilistic guarded command language."""

__version__ = "0.1.0"

from .errors import (BackendError, BudgetExceeded, ParseError, PgclError,  # noqa: E402
                     SemanticsError, SourceSpan, UnsupportedFormula)
from .syntax import (Header, Source, parse_condition, parse_program,  # noqa: E402
                     parse_source, pretty_print)
from .valuation import BOTTOM, Halt, Resume, Valuation  # noqa: E402
from .backend import Backend, make_backend  # noqa: E402
from .classical import ClassicalBackend, Store  # noqa: E402
from .smallstep import Config, step  # noqa: E402
from .extension import (Engine, GenSet, conv_member, gen_set, order_leq,  # noqa: E402
                        prune_extreme, same_hull, threshold_feasible)
from .bigstep import (History, RandomizedScheduler, det_outcomes,  # noqa: E402
                      evaluate)
from .logic import (Holds, Unknown, check_fragment, parse_formula,  # noqa: E402
                    refines, sat_genset, semi_decide)

__all__ = [
    "__version__", "BackendError", "BudgetExceeded", "ParseError", "PgclError",
    "SemanticsError", "SourceSpan", "UnsupportedFormula", "Header", "Source",
    "parse_condition", "parse_program", "parse_source", "pretty_print", "BOTTOM",
    "Halt", "Resume", "Valuation", "Backend", "make_backend", "ClassicalBackend",
    "Store", "Config", "step", "Engine", "GenSet", "conv_member", "gen_set",
    "order_leq", "prune_extreme", "same_hull", "threshold_feasible", "History",
    "RandomizedScheduler", "det_outcomes", "evaluate", "Holds", "Unknown",
    "check_fragment", "parse_formula", "refines", "sat_genset", "semi_decide",
]

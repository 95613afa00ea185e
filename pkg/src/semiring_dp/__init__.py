"""Semiring measures of join/union expressions.

Build a join/union expression of a solution set once (connected dominating
sets from a k-expression, CSP solutions from a tree decomposition), then
evaluate it under any measure: decision, counting, costs, min-cost counting
via Delta-products, list constraints.
"""

from .algebra import (BOOL, DELTANAT, INF, NAT, TROP, Semiring, Value, delta, delta_pack,
                      dioid_compare, is_regular, parse_semiring, prod, value)
from .cds import (EdgeCreate, Oplus, Relabel, Vertex, eval_kexpr, parse_kexpr,
                  solve_semiring_cds, solve_semiring_ds)
from .csp import (CspInstance, SumProductInstance, TreeDecomposition, gaifman, make_nice,
                  solve_semiring_csp, solve_sum_product, validate_td)
from .errors import (BudgetError, CostOverflowError, LegalityError, ParseError,
                     SemiringDPError, UsageError)
from .expr import Expr, ExprStore, FunctionSet, Universe, evaluate, materialize
from .measures import (MeasureMatrix, count_min_cost, counting_measure, cost_measure,
                       decision_measure, delta_measure, list_measure, product_measure)

__version__ = "0.1.0"

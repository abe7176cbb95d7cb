"""In-memory representation of linear and mixed-integer programs.

Programs are always minimizations. Constraints are addressed by name or by
``(tag, key)`` so model builders never depend on row order.

Dual convention: ``Solution.duals[i]`` is the shadow price of row ``i``,
i.e. the derivative of the optimal objective with respect to its right-hand
side. For a minimization this is >= 0 on ``>=`` rows and <= 0 on ``<=``
rows (equivalently >= 0 once every row is written in ``>=`` orientation).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import ValidationError

# Centralized tolerances.
FEAS_TOL = 1e-7
GAP_TOL = 1e-6
INT_TOL = 1e-6

LE, GE, EQ = "<=", ">=", "="
SENSES = (LE, GE, EQ)


class Status(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    ERROR = "ERROR"


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float = 0.0
    upper: float = math.inf
    integer: bool = False
    tag: str | None = None
    key: tuple | None = None


@dataclass(frozen=True)
class Constraint:
    name: str
    indices: tuple[int, ...]
    coefs: tuple[float, ...]
    sense: str
    rhs: float
    tag: str | None = None
    key: tuple | None = None


class LinearProgram:
    """A minimization program ``min c.x  s.t.  rows, lower <= x <= upper``."""

    def __init__(self, name="lp"):
        self.name = name
        self.variables: list[Variable] = []
        self.cost: list[float] = []
        self.constraints: list[Constraint] = []
        self._var_index: dict[str, int] = {}
        self._row_index: dict[str, int] = {}
        self._var_tags: dict[str, dict[tuple, int]] = {}
        self._row_tags: dict[str, dict[tuple, int]] = {}

    # -- construction -----------------------------------------------------

    def add_variable(self, name, lower=0.0, upper=math.inf, cost=0.0,
                     integer=False, tag=None, key=None) -> int:
        if name in self._var_index:
            raise ValidationError(f"duplicate variable {name!r}")
        lower = -math.inf if lower is None else float(lower)
        upper = math.inf if upper is None else float(upper)
        if not math.isfinite(cost):
            raise ValidationError(f"non-finite cost on {name!r}")
        if lower > upper:
            raise ValidationError(f"variable {name!r} has lower {lower} > upper {upper}")
        idx = len(self.variables)
        self.variables.append(Variable(name, lower, upper, bool(integer), tag, key))
        self.cost.append(float(cost))
        self._var_index[name] = idx
        if tag is not None:
            self._var_tags.setdefault(tag, {})[key] = idx
        return idx

    def add_constraint(self, name, terms, sense, rhs, tag=None, key=None) -> int:
        """Add ``sum(coef * x[var]) sense rhs``; ``terms`` maps index -> coef."""
        if sense not in SENSES:
            raise ValidationError(f"unknown sense {sense!r}")
        if name in self._row_index:
            raise ValidationError(f"duplicate constraint {name!r}")
        if not math.isfinite(rhs):
            raise ValidationError(f"non-finite rhs on {name!r}")
        merged: dict[int, float] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for j, a in items:
            if not 0 <= j < len(self.variables):
                raise ValidationError(f"constraint {name!r} references undeclared variable {j}")
            if not math.isfinite(a):
                raise ValidationError(f"non-finite coefficient in {name!r}")
            merged[j] = merged.get(j, 0.0) + float(a)
        idx = sorted(j for j, a in merged.items() if a != 0.0)
        row = Constraint(name, tuple(idx), tuple(merged[j] for j in idx), sense,
                         float(rhs), tag, key)
        r = len(self.constraints)
        self.constraints.append(row)
        self._row_index[name] = r
        if tag is not None:
            self._row_tags.setdefault(tag, {})[key] = r
        return r

    def set_bounds(self, j, lower=None, upper=None):
        v = self.variables[j]
        lo = v.lower if lower is None else float(lower)
        hi = v.upper if upper is None else float(upper)
        self.variables[j] = Variable(v.name, lo, hi, v.integer, v.tag, v.key)

    def copy(self) -> "LinearProgram":
        other = LinearProgram(self.name)
        other.variables = list(self.variables)
        other.cost = list(self.cost)
        other.constraints = list(self.constraints)
        other._var_index = dict(self._var_index)
        other._row_index = dict(self._row_index)
        other._var_tags = {t: dict(m) for t, m in self._var_tags.items()}
        other._row_tags = {t: dict(m) for t, m in self._row_tags.items()}
        return other

    # -- lookup -----------------------------------------------------------

    @property
    def n_vars(self):
        return len(self.variables)

    @property
    def n_rows(self):
        return len(self.constraints)

    @property
    def is_mip(self):
        return any(v.integer for v in self.variables)

    def var(self, name) -> int:
        return self._var_index[name]

    def row(self, name) -> int:
        return self._row_index[name]

    def vars_tagged(self, tag) -> dict[tuple, int]:
        return dict(self._var_tags.get(tag, {}))

    def rows_tagged(self, tag) -> dict[tuple, int]:
        return dict(self._row_tags.get(tag, {}))

    def var_at(self, tag, key) -> int:
        return self._var_tags[tag][key]

    def row_at(self, tag, key) -> int:
        return self._row_tags[tag][key]

    # -- numeric views ----------------------------------------------------

    def c(self) -> np.ndarray:
        return np.asarray(self.cost, dtype=float)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([v.lower for v in self.variables], dtype=float)
        hi = np.array([v.upper for v in self.variables], dtype=float)
        return lo, hi

    def matrix(self) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for i, con in enumerate(self.constraints):
            rows.extend([i] * len(con.indices))
            cols.extend(con.indices)
            vals.extend(con.coefs)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n_rows, self.n_vars))

    def rhs(self) -> np.ndarray:
        return np.array([con.rhs for con in self.constraints], dtype=float)

    def senses(self) -> list[str]:
        return [con.sense for con in self.constraints]


@dataclass
class Solution:
    status: Status
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    objective: float | None = None
    lp: LinearProgram | None = field(default=None, repr=False)
    nodes: int = 0
    message: str = ""

    @property
    def optimal(self):
        return self.status == Status.OPTIMAL

    def value(self, name):
        return float(self.x[self.lp.var(name)])

    def dual(self, name):
        if self.duals is None:
            raise KeyError("solution carries no duals")
        return float(self.duals[self.lp.row(name)])

    def values_tagged(self, tag) -> dict:
        return {k: float(self.x[j]) for k, j in self.lp.vars_tagged(tag).items()}

    def duals_tagged(self, tag) -> dict:
        if self.duals is None:
            raise KeyError("solution carries no duals")
        return {k: float(self.duals[i]) for k, i in self.lp.rows_tagged(tag).items()}

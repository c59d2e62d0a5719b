"""Self-contained dense linear programming.

Implements a two-phase primal simplex on a dense tableau. All programs in
this package are small and dense, so a tableau method is both fast enough
and, more importantly, deterministic: identical inputs always produce the
identical vertex. Pivoting uses the largest-coefficient rule and falls back
to Bland's rule after a long degenerate streak, which guarantees
termination without cycling.

Tolerances: pivot 1e-10, feasibility 1e-8. A returned "optimal" point is
re-checked against the original constraints; anything that cannot be
certified comes back with status "numerical_failure", never as a wrong
optimum.

An external solver can be substituted behind the same contract by passing
``engine=`` to :func:`solve`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ValidationError

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-8

_RELATIONS = {"<=", "=", ">="}
_REL_ALIASES = {"==": "=", "<": "<=", ">": ">=", "le": "<=", "eq": "=", "ge": ">="}


@dataclass(frozen=True)
class Constraint:
    coeffs: np.ndarray
    relation: str
    rhs: float


@dataclass(frozen=True)
class LinearProgram:
    """maximize objective @ x subject to linear constraints and bounds.

    Variable lower bounds default to 0; upper bounds default to +inf.
    A lower bound of -inf makes the variable free.
    """

    objective: np.ndarray
    constraints: tuple[Constraint, ...]
    lower: np.ndarray
    upper: np.ndarray

    def __init__(self, objective, constraints=(), lower=None, upper=None):
        c = np.asarray(objective, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValidationError("objective must be a nonempty vector")
        n = c.size
        rows = []
        for k, item in enumerate(constraints):
            if isinstance(item, Constraint):
                coeffs, relation, rhs = item.coeffs, item.relation, item.rhs
            else:
                coeffs, relation, rhs = item
            a = np.asarray(coeffs, dtype=float)
            rel = _REL_ALIASES.get(relation, relation)
            if rel not in _RELATIONS:
                raise ValidationError(f"constraint {k}: unknown relation {relation!r}")
            if a.shape != (n,):
                raise ValidationError(
                    f"constraint {k}: expected {n} coefficients, got {a.shape}"
                )
            if not np.isfinite(rhs):
                raise ValidationError(f"constraint {k}: rhs must be finite")
            if not np.all(np.isfinite(a)):
                raise ValidationError(f"constraint {k}: coefficients must be finite")
            rows.append(Constraint(a, rel, float(rhs)))
        lo = np.zeros(n) if lower is None else np.asarray(lower, dtype=float) + 0.0
        hi = np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float) + 0.0
        if lo.shape != (n,) or hi.shape != (n,):
            raise ValidationError("bounds must match the objective dimension")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo == np.inf):
            raise ValidationError("lower bounds must be finite or -inf")
        if np.any(hi == -np.inf):
            raise ValidationError("upper bounds must be finite or +inf")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", tuple(rows))
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)


@dataclass(frozen=True)
class LpOutcome:
    """Result of a solve.

    status is one of "optimal", "infeasible", "unbounded",
    "numerical_failure". When optimal, ``point`` is a vertex and ``duals``
    holds one multiplier per constraint (None when the duality gap could
    not be certified). ``certificate`` carries a best-effort Farkas vector
    for infeasible programs.
    """

    status: str
    value: Optional[float] = None
    point: Optional[np.ndarray] = None
    duals: Optional[np.ndarray] = None
    certificate: Optional[np.ndarray] = None


Engine = Callable[[LinearProgram], LpOutcome]


def solve(lp: LinearProgram, engine: Optional[Engine] = None) -> LpOutcome:
    """Solve a linear program, returning a vertex optimum when one exists."""
    if engine is not None:
        return engine(lp)
    return _simplex(lp)


# ---------------------------------------------------------------------------
# standardization


class _Standardized:
    """max c @ u  s.t.  A u = b (b >= 0), u >= 0, plus bookkeeping to map back."""

    def __init__(self, lp: LinearProgram):
        n = lp.objective.size
        # Column layout per original variable: (col_plus, col_minus or -1).
        # Finite lower bound shifts x = lb + u; a free variable splits in two.
        col_of = []
        shift = np.zeros(n)
        ncols = 0
        for j in range(n):
            if lp.lower[j] == -np.inf:
                col_of.append((ncols, ncols + 1))
                ncols += 2
            else:
                shift[j] = lp.lower[j]
                col_of.append((ncols, -1))
                ncols += 1

        def expand(a: np.ndarray) -> np.ndarray:
            row = np.zeros(ncols)
            for j in range(n):
                p, q = col_of[j]
                row[p] = a[j]
                if q >= 0:
                    row[q] = -a[j]
            return row

        raw_rows = []
        raw_rhs = []
        raw_rel = []
        origin = []  # index into lp.constraints, or -1 for a bound row
        for k, con in enumerate(lp.constraints):
            raw_rows.append(expand(con.coeffs))
            raw_rhs.append(con.rhs - con.coeffs @ shift)
            raw_rel.append(con.relation)
            origin.append(k)
        for j in range(n):
            if lp.upper[j] < np.inf:
                e = np.zeros(n)
                e[j] = 1.0
                raw_rows.append(expand(e))
                raw_rhs.append(lp.upper[j] - shift[j])
                raw_rel.append("<=")
                origin.append(-1)

        m = len(raw_rows)
        sign = np.ones(m)
        A = np.array(raw_rows, dtype=float).reshape(m, ncols)
        b = np.array(raw_rhs, dtype=float)
        rel = list(raw_rel)
        for r in range(m):
            if b[r] < 0:
                A[r] *= -1.0
                b[r] *= -1.0
                sign[r] = -1.0
                rel[r] = {"<=": ">=", ">=": "<=", "=": "="}[rel[r]]

        self.c = expand(lp.objective)
        self.A = A
        self.b = b
        self.rel = rel
        self.sign = sign
        self.origin = origin
        self.col_of = col_of
        self.shift = shift
        self.nvars = n

    def recover(self, u: np.ndarray) -> np.ndarray:
        x = np.empty(self.nvars)
        for j, (p, q) in enumerate(self.col_of):
            x[j] = u[p] - (u[q] if q >= 0 else 0.0) + self.shift[j]
        return x


# ---------------------------------------------------------------------------
# tableau simplex

_DEGENERATE_SWITCH = 40  # consecutive degenerate pivots before Bland's rule


class _Tableau:
    def __init__(self, std: _Standardized):
        m, n = std.A.shape
        n_slack = sum(1 for r in std.rel if r != "=")
        total = n + n_slack + m  # structural + slack/surplus + artificial
        T = np.zeros((m, total + 1))
        T[:, :n] = std.A
        T[:, -1] = std.b
        basis = np.empty(m, dtype=int)
        art_row = {}
        s = n
        a = n + n_slack
        for r in range(m):
            if std.rel[r] == "<=":
                T[r, s] = 1.0
                basis[r] = s
                s += 1
            else:
                if std.rel[r] == ">=":
                    T[r, s] = -1.0
                    s += 1
                T[r, a] = 1.0
                basis[r] = a
                art_row[a] = r
                a += 1
        self.T = T
        self.basis = basis
        self.art_row = art_row
        self.n_struct = n
        self.first_art = n + n_slack
        self.m = m
        # Phase-1 objective: max -(sum of artificials), priced out over the
        # starting basis. Phase-2 reduced costs are carried along from the
        # start so no re-pricing is needed between phases.
        z1 = np.zeros(total + 1)
        for r in range(m):
            if basis[r] >= self.first_art:
                z1[: total + 1] += T[r]
        z1[self.first_art: total] = 0.0
        self.z1 = z1
        z2 = np.zeros(total + 1)
        z2[:n] = std.c
        self.z2 = z2
        self.iterations = 0

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        piv = T[row, col]
        T[row] /= piv
        colvals = T[:, col].copy()
        colvals[row] = 0.0
        T -= np.outer(colvals, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        for z in (self.z1, self.z2):
            if z[col] != 0.0:
                z -= z[col] * T[row]
                z[col] = 0.0
        self.basis[row] = col

    def run(self, z: np.ndarray, allowed_upto: int, max_iter: int) -> str:
        """Pivot until optimal/unbounded on objective row z (maximization)."""
        T = self.T
        bland = False
        degenerate_streak = 0
        while True:
            cols = z[:allowed_upto]
            if bland:
                candidates = np.nonzero(cols > PIVOT_TOL)[0]
                if candidates.size == 0:
                    return "optimal"
                enter = int(candidates[0])
            else:
                enter = int(np.argmax(cols))
                if cols[enter] <= PIVOT_TOL:
                    return "optimal"
            col = T[:, enter]
            pos = np.nonzero(col > PIVOT_TOL)[0]
            if pos.size == 0:
                return "unbounded"
            ratios = T[pos, -1] / col[pos]
            best = ratios.min()
            ties = pos[ratios <= best + PIVOT_TOL]
            # smallest basis index among ties keeps Bland's rule valid
            leave = int(ties[np.argmin(self.basis[ties])])
            if best <= PIVOT_TOL:
                degenerate_streak += 1
                if degenerate_streak >= _DEGENERATE_SWITCH:
                    bland = True
            else:
                degenerate_streak = 0
            self.pivot(leave, enter)
            self.iterations += 1
            if self.iterations > max_iter:
                return "iteration_limit"


def _simplex(lp: LinearProgram) -> LpOutcome:
    std = _Standardized(lp)
    tab = _Tableau(std)
    m, total = tab.m, tab.T.shape[1] - 1
    max_iter = 2000 + 50 * (m + total)

    if m > 0:
        status = tab.run(tab.z1, tab.first_art, max_iter)
        if status == "iteration_limit":
            return LpOutcome(status="numerical_failure")
        phase1 = -tab.z1[-1]
        infeasibility = -phase1  # sum of artificials left over
        if infeasibility > FEAS_TOL:
            return LpOutcome(status="infeasible", certificate=_farkas(std, tab))
        # Drive remaining artificial variables out of the basis; a row whose
        # artificial cannot leave is redundant and gets dropped.
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if tab.basis[r] >= tab.first_art:
                row = tab.T[r, : tab.first_art]
                nz = np.nonzero(np.abs(row) > PIVOT_TOL)[0]
                if nz.size:
                    tab.pivot(r, int(nz[0]))
                else:
                    keep[r] = False
        if not keep.all():
            tab.T = tab.T[keep]
            tab.basis = tab.basis[keep]
            tab.m = int(keep.sum())
        kept_rows = np.nonzero(keep)[0]
    else:
        kept_rows = np.zeros(0, dtype=int)

    status = tab.run(tab.z2, tab.first_art, max_iter)
    if status == "iteration_limit":
        return LpOutcome(status="numerical_failure")
    if status == "unbounded":
        return LpOutcome(status="unbounded")

    u = np.zeros(total)
    u[tab.basis] = tab.T[:, -1]
    if np.any(u[tab.basis] < -FEAS_TOL):
        return LpOutcome(status="numerical_failure")
    x = std.recover(u[: tab.n_struct])
    if not _feasible(lp, x):
        return LpOutcome(status="numerical_failure")
    value = float(lp.objective @ x)
    duals = _duals(lp, std, tab, kept_rows, u)
    return LpOutcome(status="optimal", value=value, point=x, duals=duals)


def _feasible(lp: LinearProgram, x: np.ndarray) -> bool:
    if np.any(x < lp.lower - FEAS_TOL) or np.any(x > lp.upper + FEAS_TOL):
        return False
    for con in lp.constraints:
        lhs = con.coeffs @ x
        if con.relation == "<=" and lhs > con.rhs + FEAS_TOL:
            return False
        if con.relation == ">=" and lhs < con.rhs - FEAS_TOL:
            return False
        if con.relation == "=" and abs(lhs - con.rhs) > FEAS_TOL:
            return False
    return True


def _basis_duals(std: _Standardized, tab: _Tableau, kept_rows: np.ndarray,
                 costs: np.ndarray) -> Optional[np.ndarray]:
    """Multipliers y with B^T y = c_B for the kept standardized rows."""
    if kept_rows.size == 0:
        return np.zeros(len(std.b))
    n = tab.n_struct
    n_slack = tab.first_art - n
    A_full = np.zeros((len(std.b), n + n_slack))
    A_full[:, :n] = std.A
    s = n
    for r, rel in enumerate(std.rel):
        if rel == "<=":
            A_full[r, s] = 1.0
            s += 1
        elif rel == ">=":
            A_full[r, s] = -1.0
            s += 1
    cols = np.zeros((kept_rows.size, tab.basis.size))
    row_pos = {int(r): i for i, r in enumerate(kept_rows)}
    for k, col in enumerate(tab.basis):
        if col < n + n_slack:
            cols[:, k] = A_full[kept_rows, col]
        else:
            r = tab.art_row[int(col)]
            if r in row_pos:
                cols[row_pos[r], k] = 1.0
    try:
        y = np.linalg.solve(cols.T, costs)
    except np.linalg.LinAlgError:
        return None
    full = np.zeros(len(std.b))
    full[kept_rows] = y
    return full


def _duals(lp: LinearProgram, std: _Standardized, tab: _Tableau,
           kept_rows: np.ndarray, u: np.ndarray) -> Optional[np.ndarray]:
    costs = np.zeros(tab.basis.size)
    for k, col in enumerate(tab.basis):
        if col < tab.n_struct:
            costs[k] = std.c[col]
    y = _basis_duals(std, tab, kept_rows, costs)
    if y is None:
        return None
    primal = std.c @ u[: tab.n_struct]
    gap = abs(primal - y @ std.b)
    if gap > 1e-7 * max(1.0, abs(primal)):
        return None
    out = np.zeros(len(lp.constraints))
    for r, k in enumerate(std.origin):
        if k >= 0:
            out[k] = std.sign[r] * y[r]
    return out


def _farkas(std: _Standardized, tab: _Tableau) -> Optional[np.ndarray]:
    """Best-effort infeasibility certificate from the phase-1 multipliers."""
    rows = np.arange(tab.m)
    costs = np.where(tab.basis >= tab.first_art, -1.0, 0.0)
    y = _basis_duals(std, tab, rows, costs)
    if y is None:
        return None
    n_user = sum(1 for o in std.origin if o >= 0)
    out = np.zeros(n_user)
    for r, k in enumerate(std.origin):
        if k >= 0 and r < y.size:
            out[k] = std.sign[r] * y[r]
    return out

"""Exact rational linear programming and branch-and-bound integer programming.

A dense two-phase simplex over exact rationals decides feasibility and
optimality; infeasible systems come with a Farkas certificate that can be
re-verified independently by dot products.  Branch-and-bound on the rational
relaxation yields globally optimal integer solutions for the small systems
used by the weightedness tests and covering heuristics.

Entering-variable rule: largest violation (Dantzig) with ties broken by
lowest index, switching permanently to Bland's rule after a run of
degenerate pivots so that cycling is impossible.  All tie-breaking is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .rationals import Rat, rat

__all__ = ["Constraint", "LinearSystem", "FeasibilityOutcome",
           "lp_feasible", "ilp_solve", "verify_farkas", "dump_lp_text"]

_RELS = ("<=", ">=", "==")
_DEGENERATE_SWITCH = 12


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    rel: str
    rhs: Rat

    def __post_init__(self):
        if self.rel not in _RELS:
            raise ValueError(f"unknown relation {self.rel!r}")
        object.__setattr__(self, "coeffs", tuple(rat(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", rat(self.rhs))


@dataclass
class LinearSystem:
    """num_vars variables with constraints, bounds, integrality and objective.

    Lower bounds default to 0 (None means free); upper bounds default to
    None (unbounded).  ``objective`` is (coeffs, sense) with sense 'min' or
    'max'.
    """

    num_vars: int
    constraints: list = field(default_factory=list)
    lower: list = None
    upper: list = None
    integer: list = None
    objective: tuple | None = None

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("negative variable count")
        if self.lower is None:
            self.lower = [rat(0)] * self.num_vars
        if self.upper is None:
            self.upper = [None] * self.num_vars
        if self.integer is None:
            self.integer = [False] * self.num_vars
        for name in ("lower", "upper", "integer"):
            if len(getattr(self, name)) != self.num_vars:
                raise ValueError(f"{name} has wrong length")
        for lo, up in zip(self.lower, self.upper):
            if lo is not None and up is not None and rat(lo) > rat(up):
                raise ValueError("inconsistent variable bounds")

    def add(self, coeffs, rel: str, rhs) -> None:
        coeffs = tuple(rat(c) for c in coeffs)
        if len(coeffs) != self.num_vars:
            raise ValueError("coefficient vector has wrong length")
        self.constraints.append(Constraint(coeffs, rel, rat(rhs)))

    def set_objective(self, coeffs, sense: str) -> None:
        coeffs = tuple(rat(c) for c in coeffs)
        if len(coeffs) != self.num_vars:
            raise ValueError("objective vector has wrong length")
        if sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        self.objective = (coeffs, sense)


@dataclass(frozen=True)
class FeasibilityOutcome:
    status: str                      # feasible | infeasible | unbounded | budget_exhausted
    point: tuple | None = None
    farkas: tuple | None = None      # multipliers for sys.constraints
    farkas_bounds: tuple | None = None   # multipliers for finite upper bounds
    objective_value: Rat | None = None
    nodes: int = 1


# ---------------------------------------------------------------------------
# canonical form:  rows (alpha, beta, kind) meaning alpha . x' >= beta
# ('ge') or == beta ('eq') over shifted variables x' >= 0.

class _Canonical:
    def __init__(self, sys: LinearSystem):
        self.sys = sys
        n = sys.num_vars
        # variable mapping: x_j = shift_j + sum of signed primed columns
        self.col_of_var = []     # per var: list of (column, sign)
        self.shift = []
        cols = 0
        for j in range(n):
            lo = sys.lower[j]
            if lo is None:
                self.col_of_var.append([(cols, 1), (cols + 1, -1)])
                self.shift.append(rat(0))
                cols += 2
            else:
                self.col_of_var.append([(cols, 1)])
                self.shift.append(rat(lo))
                cols += 1
        self.ncols = cols
        self.rows = []          # (alpha list, beta, kind, origin)
        for idx, c in enumerate(sys.constraints):
            self._add_row(c.coeffs, c.rel, c.rhs, ("c", idx))
        for j in range(n):
            if sys.upper[j] is not None:
                coeffs = [rat(0)] * n
                coeffs[j] = rat(1)
                self._add_row(coeffs, "<=", rat(sys.upper[j]), ("u", j))

    def _add_row(self, coeffs, rel, rhs, origin):
        alpha = [rat(0)] * self.ncols
        beta = rat(rhs)
        for j, cj in enumerate(coeffs):
            cj = rat(cj)
            if cj == 0:
                continue
            beta -= cj * self.shift[j]
            for col, sign in self.col_of_var[j]:
                alpha[col] += sign * cj
        if rel == "<=":
            alpha = [-a for a in alpha]
            beta = -beta
            kind = "ge"
        elif rel == ">=":
            kind = "ge"
        else:
            kind = "eq"
        self.rows.append((alpha, beta, kind, origin))

    def objective_row(self):
        if self.sys.objective is None:
            return [rat(0)] * self.ncols, rat(0), "min"
        coeffs, sense = self.sys.objective
        c = [rat(0)] * self.ncols
        const = rat(0)
        for j, cj in enumerate(coeffs):
            cj = rat(cj)
            if cj == 0:
                continue
            const += cj * self.shift[j]
            for col, sign in self.col_of_var[j]:
                c[col] += sign * cj
        if sense == "max":
            c = [-x for x in c]
            return c, const, "max"
        return c, const, "min"

    def point_from_cols(self, colvals):
        pt = []
        for j in range(self.sys.num_vars):
            v = self.shift[j]
            for col, sign in self.col_of_var[j]:
                v = v + sign * colvals[col]
            pt.append(v)
        return tuple(pt)


class _Simplex:
    """Dense exact tableau simplex for  min c.x  s.t. canonical rows, x >= 0."""

    def __init__(self, canon: _Canonical):
        self.canon = canon
        rows = canon.rows
        self.m = len(rows)
        self.n0 = canon.ncols
        self.flip = []
        # columns: structural | surplus(one per 'ge' row) | artificial(one per row)
        self.surplus_col = {}
        ncols = self.n0
        for i, (_, _, kind, _) in enumerate(rows):
            if kind == "ge":
                self.surplus_col[i] = ncols
                ncols += 1
        self.art_col = {}
        for i in range(self.m):
            self.art_col[i] = ncols
            ncols += 1
        self.ncols = ncols
        self.T = []
        self.b = []
        self.basis = []
        for i, (alpha, beta, kind, _) in enumerate(rows):
            row = list(alpha) + [rat(0)] * (self.ncols - self.n0)
            if kind == "ge":
                row[self.surplus_col[i]] = rat(-1)
            flip = beta < 0
            self.flip.append(flip)
            if flip:
                row = [-x for x in row]
                beta = -beta
            row[self.art_col[i]] = rat(1)
            self.T.append(row)
            self.b.append(beta)
            self.basis.append(self.art_col[i])
        self.bland = False
        self.degenerate_run = 0

    # -- pivoting ----------------------------------------------------------

    def _pivot(self, pr: int, pc: int):
        T, b = self.T, self.b
        prow = T[pr]
        piv = prow[pc]
        if piv != 1:
            inv = 1 / piv
            T[pr] = prow = [x * inv for x in prow]
            b[pr] = b[pr] * inv
        bpr = b[pr]
        for i in range(self.m):
            if i == pr:
                continue
            f = T[i][pc]
            if f == 0:
                continue
            row = T[i]
            T[i] = [x - f * y for x, y in zip(row, prow)]
            b[i] = b[i] - f * bpr
        f = self.obj[pc]
        if f != 0:
            self.obj = [x - f * y for x, y in zip(self.obj, prow)]
            self.objval = self.objval - f * bpr
        self.basis[pr] = pc

    def _ratio_row(self, pc: int):
        best = None
        T, b = self.T, self.b
        for i in range(self.m):
            a = T[i][pc]
            if a > 0:
                r = b[i] / a
                if best is None or r < best[0] or (r == best[0] and self.basis[i] < self.basis[best[1]]):
                    best = (r, i)
        return None if best is None else best[1]

    def _entering(self, allowed_cols):
        obj = self.obj
        if self.bland:
            for j in allowed_cols:
                if obj[j] < 0:
                    return j
            return None
        best = None
        for j in allowed_cols:
            v = obj[j]
            if v < 0 and (best is None or v < best[0]):
                best = (v, j)
        return None if best is None else best[1]

    def _optimize(self, allowed_cols, max_pivots=200000):
        for _ in range(max_pivots):
            pc = self._entering(allowed_cols)
            if pc is None:
                return "optimal"
            pr = self._ratio_row(pc)
            if pr is None:
                return "unbounded"
            if self.b[pr] == 0:
                self.degenerate_run += 1
                if self.degenerate_run >= _DEGENERATE_SWITCH:
                    self.bland = True
            else:
                self.degenerate_run = 0
            self._pivot(pr, pc)
        raise RuntimeError("simplex pivot limit exceeded")

    # -- phases --------------------------------------------------------------

    def phase1(self):
        cols_real = [j for j in range(self.ncols) if j not in set(self.art_col.values())]
        self.obj = [rat(0)] * self.ncols
        self.objval = rat(0)
        for i in range(self.m):
            # objective: minimize sum of artificials; express in nonbasic terms
            row = self.T[i]
            self.obj = [o - x for o, x in zip(self.obj, row)]
            self.objval -= self.b[i]
        for i in range(self.m):
            self.obj[self.art_col[i]] = rat(0)
        status = self._optimize(cols_real)
        assert status == "optimal"  # phase 1 is bounded below by 0
        if -self.objval > 0:         # objval tracks -(sum of artificials)
            return False
        # drive remaining zero-level artificials out of the basis; drop rows
        # that turn out redundant so no artificial can ever rise again
        art_set = set(self.art_col.values())
        drop = []
        for i in range(self.m):
            if self.basis[i] in art_set:
                prow = self.T[i]
                pc = next((j for j in cols_real if prow[j] != 0), None)
                if pc is not None:
                    self._pivot(i, pc)
                else:
                    drop.append(i)
        if drop:
            keep = [i for i in range(self.m) if i not in set(drop)]
            self.T = [self.T[i] for i in keep]
            self.b = [self.b[i] for i in keep]
            self.basis = [self.basis[i] for i in keep]
            self.m = len(keep)
        return True

    def farkas_multipliers(self):
        """Row multipliers proving infeasibility, in canonical row order.

        At the phase-1 optimum the objective row holds the true reduced
        costs, so the dual value of row i is 1 minus the reduced cost of its
        artificial column (whose cost is 1 and whose column is e_i).
        """
        y = []
        for i in range(self.m):
            yi = 1 - self.obj[self.art_col[i]]
            if self.flip[i]:
                yi = -yi
            y.append(yi)
        return y

    def phase2(self, c, allowed_cols=None):
        art_set = set(self.art_col.values())
        cols = [j for j in range(self.ncols) if j not in art_set]
        if allowed_cols is not None:
            cols = [j for j in cols if j in allowed_cols]
        self.obj = list(c) + [rat(0)] * (self.ncols - len(c))
        self.objval = rat(0)
        # price out basic variables
        for i in range(self.m):
            cb = self.obj[self.basis[i]]
            if cb != 0:
                row = self.T[i]
                self.obj = [o - cb * x for o, x in zip(self.obj, row)]
                self.objval -= cb * self.b[i]
        for j in art_set:
            self.obj[j] = rat(0)
        self.degenerate_run = 0
        return self._optimize(cols)

    def column_values(self):
        vals = [rat(0)] * self.ncols
        for i in range(self.m):
            vals[self.basis[i]] = self.b[i]
        return vals


def _solve_lp(sys: LinearSystem):
    """Exact LP solve honoring bounds and objective (integrality ignored).

    Returns FeasibilityOutcome; objective_value is in the user's sense.
    """
    canon = _Canonical(sys)
    if canon.ncols == 0 and not canon.rows:
        return FeasibilityOutcome("feasible", point=tuple(rat(0) for _ in range(sys.num_vars)),
                                  objective_value=rat(0) if sys.objective else None), canon
    spx = _Simplex(canon)
    if not spx.phase1():
        y = spx.farkas_multipliers()
        nc = len(sys.constraints)
        farkas = [rat(0)] * nc
        fbounds = {}
        for yi, (_, _, kind, origin) in zip(y, canon.rows):
            tag, idx = origin
            if tag == "c":
                farkas[idx] = yi
            else:
                fbounds[idx] = yi
        out = FeasibilityOutcome("infeasible", farkas=tuple(farkas),
                                 farkas_bounds=tuple(fbounds.get(j, rat(0))
                                                     for j in range(sys.num_vars)))
        if not verify_farkas(sys, out):
            raise RuntimeError("internal error: Farkas certificate failed verification")
        return out, canon
    c, const, sense = canon.objective_row()
    status = spx.phase2(c)
    if status == "unbounded":
        return FeasibilityOutcome("unbounded"), canon
    point = canon.point_from_cols(spx.column_values())
    objval = None
    if sys.objective is not None:
        objval = sum((rat(cj) * xj for cj, xj in zip(sys.objective[0], point)),
                     rat(0))
    return FeasibilityOutcome("feasible", point=point, objective_value=objval), canon


def lp_feasible(sys: LinearSystem) -> FeasibilityOutcome:
    """Exact feasibility of the linear relaxation (no integrality allowed).

    Feasible systems yield an exact rational point; infeasible ones a Farkas
    certificate verified before being returned.
    """
    if any(sys.integer):
        raise ValueError("lp_feasible expects no integrality flags; use ilp_solve")
    sys2 = replace_objective(sys, None)
    out, _ = _solve_lp(sys2)
    return out


def replace_objective(sys: LinearSystem, objective):
    new = LinearSystem(sys.num_vars, list(sys.constraints), list(sys.lower),
                       list(sys.upper), list(sys.integer), objective)
    return new


def verify_farkas(sys: LinearSystem, out: FeasibilityOutcome) -> bool:
    """Independent exact check that the Farkas certificate is a contradiction.

    The combination  sum_i y_i * (row_i)  +  sum_j z_j * (x_j <= u_j), with
    y_i >= 0 for inequality rows (free for equalities) and z_j >= 0, must be
    unsatisfiable over the variable lower bounds alone: the aggregated
    coefficient of every variable must point the wrong way, with a strictly
    positive aggregated right-hand side.
    """
    if out.farkas is None:
        return False
    y = [rat(v) for v in out.farkas]
    z = [rat(v) for v in (out.farkas_bounds or [0] * sys.num_vars)]
    n = sys.num_vars
    agg = [rat(0)] * n
    rhs = rat(0)
    for yi, c in zip(y, sys.constraints):
        if c.rel == "<=":
            if yi < 0:
                return False
            for j, a in enumerate(c.coeffs):
                agg[j] -= yi * a
            rhs -= yi * c.rhs
        elif c.rel == ">=":
            if yi < 0:
                return False
            for j, a in enumerate(c.coeffs):
                agg[j] += yi * a
            rhs += yi * c.rhs
        else:
            for j, a in enumerate(c.coeffs):
                agg[j] += yi * a
            rhs += yi * c.rhs
    for j, zj in enumerate(z):
        if zj != 0:
            if zj < 0 or sys.upper[j] is None:
                return False
            agg[j] -= zj
            rhs -= zj * rat(sys.upper[j])
    # need: agg . x >= rhs unsatisfiable for all x within lower bounds
    # maximize agg . x over the lower-bound domain: finite only if agg <= 0
    # on bounded-below vars and agg == 0 on free vars
    best = rat(0)
    for j in range(n):
        lo = sys.lower[j]
        if lo is None:
            if agg[j] != 0:
                return False
        else:
            if agg[j] > 0:
                return False
            best += agg[j] * rat(lo)
    return best < rhs


def _is_integral(v: Rat) -> bool:
    return rat(v).denominator == 1


def _floor(v: Rat) -> int:
    v = rat(v)
    return int(v.numerator) // int(v.denominator)


def ilp_solve(sys: LinearSystem, node_budget: int = 1_000_000) -> FeasibilityOutcome:
    """Branch-and-bound over the exact LP relaxation.

    Branches on the most fractional integer variable (ties by lowest index),
    exploring the floor branch first.  Integer variables must carry finite
    bounds.  On budget exhaustion the best incumbent is returned with status
    'budget_exhausted'.
    """
    for j, flag in enumerate(sys.integer):
        if flag and (sys.lower[j] is None or sys.upper[j] is None):
            raise ValueError("integrality-flagged variables must be bounded")
    sense = sys.objective[1] if sys.objective else "min"
    best_val = None
    best_point = None
    nodes = 0
    exhausted = False

    def better(a, b):
        if b is None:
            return True
        return a < b if sense == "min" else a > b

    stack = [(list(sys.lower), list(sys.upper))]
    unbounded_root = False
    while stack:
        if nodes >= node_budget:
            exhausted = True
            break
        lower, upper = stack.pop()
        nodes += 1
        node_sys = LinearSystem(sys.num_vars, list(sys.constraints),
                                list(lower), list(upper), [False] * sys.num_vars,
                                sys.objective)
        try:
            out, _ = _solve_lp(node_sys)
        except ValueError:
            continue   # inconsistent branch bounds
        if out.status == "infeasible":
            continue
        if out.status == "unbounded":
            if nodes == 1:
                unbounded_root = True
                break
            continue
        bound = out.objective_value
        if sys.objective is not None and best_val is not None and not better(bound, best_val):
            continue
        frac = None
        for j in range(sys.num_vars):
            if sys.integer[j] and not _is_integral(out.point[j]):
                v = rat(out.point[j])
                dist = abs(v - _floor(v) - rat(1, 2))
                if frac is None or dist < frac[0] or (dist == frac[0] and j < frac[1]):
                    frac = (dist, j, v)
        if frac is None:
            val = out.objective_value
            if sys.objective is None or better(val, best_val):
                best_val = val
                best_point = out.point
            if sys.objective is None:
                break    # pure feasibility: first integral point suffices
            continue
        _, j, v = frac
        f = _floor(v)
        if rat(f + 1) <= rat(upper[j]):
            lo3, up3 = list(lower), list(upper)
            lo3[j] = rat(f + 1)
            stack.append((lo3, up3))   # ceil branch explored second
        if rat(lower[j]) <= rat(f):
            lo2, up2 = list(lower), list(upper)
            up2[j] = rat(f)
            stack.append((lo2, up2))   # floor branch explored first (LIFO)
    if unbounded_root:
        return FeasibilityOutcome("unbounded", nodes=nodes)
    if best_point is not None:
        status = "budget_exhausted" if exhausted else "feasible"
        return FeasibilityOutcome(status, point=best_point,
                                  objective_value=best_val, nodes=nodes)
    if exhausted:
        return FeasibilityOutcome("budget_exhausted", nodes=nodes)
    return FeasibilityOutcome("infeasible", nodes=nodes)


def system_satisfied(sys: LinearSystem, point) -> bool:
    """Exact check that a point satisfies every constraint, bound and
    integrality flag of the system."""
    point = [rat(v) for v in point]
    if len(point) != sys.num_vars:
        return False
    for j, v in enumerate(point):
        if sys.lower[j] is not None and v < rat(sys.lower[j]):
            return False
        if sys.upper[j] is not None and v > rat(sys.upper[j]):
            return False
        if sys.integer[j] and rat(v).denominator != 1:
            return False
    for c in sys.constraints:
        lhs = sum((a * v for a, v in zip(c.coeffs, point)), rat(0))
        if c.rel == "<=" and not lhs <= c.rhs:
            return False
        if c.rel == ">=" and not lhs >= c.rhs:
            return False
        if c.rel == "==" and lhs != c.rhs:
            return False
    return True


def dump_lp_text(sys: LinearSystem) -> str:
    """Human-readable LP-format dump for cross-checking with other solvers."""
    from .rationals import format_rational as fr

    def term(c, j):
        return f"{'+' if rat(c) >= 0 else '-'} {fr(abs(rat(c)))} x{j + 1} "

    lines = []
    if sys.objective:
        coeffs, sense = sys.objective
        expr = "".join(term(c, j) for j, c in enumerate(coeffs) if rat(c) != 0)
        lines.append(("Minimize" if sense == "min" else "Maximize") + "\n obj: " + expr)
    else:
        lines.append("Minimize\n obj: 0 x1")
    lines.append("Subject To")
    for i, c in enumerate(sys.constraints):
        expr = "".join(term(a, j) for j, a in enumerate(c.coeffs) if rat(a) != 0) or "0 x1 "
        rel = {"<=": "<=", ">=": ">=", "==": "="}[c.rel]
        lines.append(f" c{i + 1}: {expr}{rel} {fr(c.rhs)}")
    lines.append("Bounds")
    for j in range(sys.num_vars):
        lo = "-inf" if sys.lower[j] is None else fr(rat(sys.lower[j]))
        up = "+inf" if sys.upper[j] is None else fr(rat(sys.upper[j]))
        lines.append(f" {lo} <= x{j + 1} <= {up}")
    if any(sys.integer):
        lines.append("General")
        lines.append(" " + " ".join(f"x{j + 1}" for j in range(sys.num_vars) if sys.integer[j]))
    lines.append("End")
    return "\n".join(lines) + "\n"

"""Exact rational linear and integer programming.

``solve_lp`` is a two-phase revised primal simplex method over Python integers
and :class:`fractions.Fraction`.  The basis is kept as a sparse exact LU
factorization plus a product-form eta file; Bland's rule picks the entering
and leaving variables, so the method terminates on degenerate problems.

Large problems may be warm-started from a floating-point basis produced by
HiGHS (``highspy``).  That basis is only a hint: it is re-factorized exactly,
its primal feasibility and dual feasibility are checked in rational
arithmetic, and the exact simplex continues from it if either check fails.

``solve_ilp`` is depth-first LP-based branch and bound on top of ``solve_lp``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Mapping, Sequence

from .errors import DimensionMismatch, NotOptimal
from .rational import div, fmt_rational, parse_rational, rationalize

log = logging.getLogger(__name__)

Number = int | Fraction

WARM_START_MIN_ROWS = 300
REFACTOR_EVERY = 64


def _exact(v) -> Number:
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, int):
        return v
    if isinstance(v, Rational):
        q = Fraction(v)
        return q.numerator if q.denominator == 1 else q
    q = rationalize(v)
    return q.numerator if q.denominator == 1 else q


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``min c·x  s.t.  A x = b,  lower <= x <= upper``.

    ``columns[j]`` maps row index to the nonzero entries of column ``j``.
    ``lower`` defaults to zero and ``upper`` to +infinity (``None``).
    Floats are rationalized on construction; everything else is kept exact.
    """

    n_rows: int
    columns: tuple[Mapping[int, Number], ...]
    b: tuple[Number, ...]
    c: tuple[Number, ...]
    lower: tuple[Number, ...] = ()
    upper: tuple[Number | None, ...] = ()

    def __post_init__(self):
        n = len(self.columns)
        if len(self.b) != self.n_rows or len(self.c) != n:
            raise DimensionMismatch(f"A has {self.n_rows}x{n}, b has {len(self.b)}, c has {len(self.c)}")
        cols = []
        for j, col in enumerate(self.columns):
            clean = {}
            for i, v in col.items():
                if not 0 <= i < self.n_rows:
                    raise DimensionMismatch(f"row index {i} of column {j} out of range")
                v = _exact(v)
                if v:
                    clean[int(i)] = v
            cols.append(clean)
        object.__setattr__(self, "columns", tuple(cols))
        object.__setattr__(self, "b", tuple(_exact(v) for v in self.b))
        object.__setattr__(self, "c", tuple(_exact(v) for v in self.c))
        lower = self.lower or (0,) * n
        upper = self.upper or (None,) * n
        if len(lower) != n or len(upper) != n:
            raise DimensionMismatch("bounds must have one entry per variable")
        object.__setattr__(self, "lower", tuple(_exact(v) for v in lower))
        object.__setattr__(self, "upper", tuple(None if v is None else _exact(v) for v in upper))

    @property
    def n_vars(self) -> int:
        return len(self.columns)

    @classmethod
    def from_dense(cls, A, b, c, lower=None, upper=None) -> "LinearProgram":
        A = [list(row) for row in A]
        m = len(A)
        n = len(c)
        cols = [{i: A[i][j] for i in range(m) if A[i][j] != 0} for j in range(n)]
        return cls(m, tuple(cols), tuple(b), tuple(c), tuple(lower or ()), tuple(upper or ()))

    def to_dense(self) -> list[list[Number]]:
        A = [[0] * self.n_vars for _ in range(self.n_rows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                A[i][j] = v
        return A

    def with_bounds(self, lower=None, upper=None) -> "LinearProgram":
        return replace(self, lower=tuple(lower if lower is not None else self.lower),
                       upper=tuple(upper if upper is not None else self.upper))

    def objective(self, x: Sequence[Number]) -> Number:
        return sum((cj * xj for cj, xj in zip(self.c, x)), 0)

    def is_feasible(self, x: Sequence[Number]) -> bool:
        """Exact feasibility test of a point."""
        if len(x) != self.n_vars:
            return False
        for xj, lo, hi in zip(x, self.lower, self.upper):
            if xj < lo or (hi is not None and xj > hi):
                return False
        r = list(self.b)
        for j, col in enumerate(self.columns):
            if x[j]:
                for i, v in col.items():
                    r[i] -= v * x[j]
        return not any(r)


@dataclass(frozen=True)
class LpSolution:
    status: Status
    values: tuple[Number, ...] = ()
    objective: Number | None = None
    basis: tuple[int, ...] = ()
    is_vertex: bool = False
    duals: tuple[Number, ...] = ()
    iterations: int = 0
    warm_started: bool = False
    ray: tuple[Number, ...] = field(default=(), repr=False)
    farkas: tuple[Number, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class IlpSolution:
    status: Status
    values: tuple[int, ...] = ()
    objective: Number | None = None
    node_count: int = 0
    proven_optimal: bool = False
    root_objective: Number | None = None


# ---------------------------------------------------------------------------
# sparse exact LU
# ---------------------------------------------------------------------------


class SingularBasis(ArithmeticError):
    pass


class SparseLU:
    """Exact LU factorization of a square sparse matrix given by columns.

    Pivots are chosen for sparsity only (singleton columns, then singleton
    rows, then the Markowitz count): every nonzero pivot is exact.
    """

    def __init__(self, n: int, columns: Sequence[Mapping[int, Number]]):
        self.n = n
        rows: list[dict[int, Number]] = [dict() for _ in range(n)]
        colsets: list[set[int]] = [set() for _ in range(n)]
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    rows[i][j] = v
                    colsets[j].add(i)
        active_rows = set(range(n))
        active_cols = set(range(n))
        col_single = [j for j in range(n) if len(colsets[j]) == 1]
        row_single = [i for i in range(n) if len(rows[i]) == 1]
        steps = []
        while active_cols:
            r = c = None
            while col_single:
                j = col_single.pop()
                if j in active_cols and len(colsets[j]) == 1:
                    c = j
                    r = next(iter(colsets[j]))
                    break
            if c is None:
                while row_single:
                    i = row_single.pop()
                    if i in active_rows and len(rows[i]) == 1:
                        r = i
                        c = next(iter(rows[i]))
                        break
            if c is None:
                best = None
                for i in active_rows:
                    li = len(rows[i])
                    if li == 0:
                        raise SingularBasis(f"row {i} is empty")
                    for j in rows[i]:
                        score = (li - 1) * (len(colsets[j]) - 1)
                        if best is None or score < best[0]:
                            best = (score, i, j)
                if best is None:
                    raise SingularBasis("no pivot available")
                _, r, c = best

            p = rows[r][c]
            urow = rows[r]
            rows[r] = {}
            active_rows.discard(r)
            active_cols.discard(c)
            for j in urow:
                colsets[j].discard(r)
            elims = []
            for i in list(colsets[c]):
                ri = rows[i]
                f = div(ri.pop(c), p)
                for j, v in urow.items():
                    if j == c:
                        continue
                    nv = ri.get(j, 0) - f * v
                    if nv:
                        if j not in ri:
                            colsets[j].add(i)
                        ri[j] = nv
                    elif j in ri:
                        del ri[j]
                        colsets[j].discard(i)
                elims.append((i, f))
                if len(ri) == 1:
                    row_single.append(i)
                elif not ri:
                    raise SingularBasis(f"row {i} vanished")
            colsets[c] = set()
            u_off = {}
            for j, v in urow.items():
                if j == c:
                    continue
                u_off[j] = v
                k = len(colsets[j])
                if k == 1:
                    col_single.append(j)
                elif k == 0:
                    raise SingularBasis(f"column {j} vanished")
            steps.append((r, c, p, u_off, elims))
        self.steps = steps

    def solve(self, rhs: Sequence[Number]) -> list[Number]:
        """Solve ``M z = rhs`` (rhs indexed by row, z by column)."""
        b = list(rhs)
        for r, _c, _p, _u, elims in self.steps:
            br = b[r]
            if br:
                for i, f in elims:
                    b[i] -= f * br
        z: list[Number] = [0] * self.n
        for r, c, p, u_off, _e in reversed(self.steps):
            s = b[r]
            for j, v in u_off.items():
                zj = z[j]
                if zj:
                    s -= v * zj
            z[c] = div(s, p) if s else 0
        return z

    def solve_transpose(self, rhs: Sequence[Number]) -> list[Number]:
        """Solve ``M^T u = rhs`` (rhs indexed by column, u by row)."""
        res = list(rhs)
        v: list[Number] = [0] * self.n
        for r, c, p, u_off, _e in self.steps:
            rc = res[c]
            if rc:
                vr = div(rc, p)
                v[r] = vr
                for j, val in u_off.items():
                    res[j] -= val * vr
        for r, _c, _p, _u, elims in reversed(self.steps):
            acc = v[r]
            for i, f in elims:
                vi = v[i]
                if vi:
                    acc -= f * vi
            v[r] = acc
        return v


# ---------------------------------------------------------------------------
# revised simplex
# ---------------------------------------------------------------------------


class _Simplex:
    """Revised primal simplex on ``A x = b, x >= 0`` with an exact factorized basis."""

    def __init__(self, cols, b, basis, n_structural, rule="bland"):
        self.cols = cols
        self.b = list(b)
        self.m = len(b)
        self.basis = list(basis)
        self.n_structural = n_structural
        self.rule = rule
        self.in_basis = [False] * len(cols)
        for j in self.basis:
            self.in_basis[j] = True
        self.iterations = 0
        self._factor()
        self.xB = self.ftran(self.b)

    def _factor(self):
        self.lu = SparseLU(self.m, [self.cols[j] for j in self.basis])
        self.etas: list[tuple[int, dict[int, Number]]] = []

    def ftran(self, vec) -> list[Number]:
        z = self.lu.solve(vec)
        for r, d in self.etas:
            zr = div(z[r], d[r]) if z[r] else 0
            z[r] = zr
            if zr:
                for i, di in d.items():
                    if i != r:
                        z[i] -= di * zr
        return z

    def btran(self, vec) -> list[Number]:
        v = list(vec)
        for r, d in reversed(self.etas):
            acc = v[r]
            for i, di in d.items():
                if i != r and v[i]:
                    acc -= di * v[i]
            v[r] = div(acc, d[r]) if acc else 0
        return self.lu.solve_transpose(v)

    def column_dense(self, j) -> list[Number]:
        a = [0] * self.m
        for i, v in self.cols[j].items():
            a[i] = v
        return a

    def reduced_cost(self, j, c, y) -> Number:
        rc = c[j]
        for i, v in self.cols[j].items():
            yi = y[i]
            if yi:
                rc -= yi * v
        return rc

    def duals(self, c) -> list[Number]:
        return self.btran([c[j] for j in self.basis])

    def price(self, c, y, allowed: int, use_bland: bool):
        if use_bland:
            for j in range(allowed):
                if not self.in_basis[j] and self.reduced_cost(j, c, y) < 0:
                    return j
            return None
        best, best_rc = None, 0
        for j in range(allowed):
            if not self.in_basis[j]:
                rc = self.reduced_cost(j, c, y)
                if rc < best_rc:
                    best, best_rc = j, rc
        return best

    def ratio(self, d, fix_artificials: bool):
        best_r, best_ratio = None, None
        for i, di in enumerate(d):
            if not di:
                continue
            j = self.basis[i]
            if fix_artificials and j >= self.n_structural:
                ratio = 0
            elif di > 0:
                ratio = div(self.xB[i], di)
            else:
                continue
            if (
                best_r is None
                or ratio < best_ratio
                or (ratio == best_ratio and j < self.basis[best_r])
            ):
                best_r, best_ratio = i, ratio
        return best_r, best_ratio

    def pivot(self, q, r, d, theta):
        if theta:
            for i, di in enumerate(d):
                if di:
                    self.xB[i] -= theta * di
        self.xB[r] = theta
        self.in_basis[self.basis[r]] = False
        self.in_basis[q] = True
        self.basis[r] = q
        self.etas.append((r, {i: di for i, di in enumerate(d) if di}))
        self.iterations += 1
        if len(self.etas) >= REFACTOR_EVERY:
            self._factor()

    def run(self, c, allowed: int, fix_artificials: bool):
        """Iterate to optimality.  Returns ``(status, y, ray)``."""
        degenerate = True
        while True:
            y = self.duals(c)
            use_bland = self.rule == "bland" or degenerate
            q = self.price(c, y, allowed, use_bland)
            if q is None:
                return Status.OPTIMAL, y, None
            d = self.ftran(self.column_dense(q))
            r, theta = self.ratio(d, fix_artificials)
            if r is None:
                return Status.UNBOUNDED, y, (q, d)
            degenerate = theta == 0
            self.pivot(q, r, d, theta)


# ---------------------------------------------------------------------------
# standard form, crash basis, warm start
# ---------------------------------------------------------------------------


@dataclass
class _StandardForm:
    cols: list[dict[int, Number]]
    b: list[Number]
    c: list[Number]
    n_orig: int
    shift: tuple[Number, ...]
    offset: Number
    infeasible: bool = False
    rows: tuple[int, ...] = ()  # original row (or upper-bound row) behind each standard-form row


def _standard_form(P: LinearProgram) -> _StandardForm:
    m, n = P.n_rows, P.n_vars
    b = list(P.b)
    cols = [dict(col) for col in P.columns]
    for j, col in enumerate(cols):
        lo = P.lower[j]
        if lo:
            for i, v in col.items():
                b[i] -= v * lo
    c = list(P.c)
    offset = sum((cj * lo for cj, lo in zip(P.c, P.lower)), 0)
    infeasible = False
    row = m
    for j in range(n):
        hi = P.upper[j]
        if hi is None:
            continue
        width = hi - P.lower[j]
        if width < 0:
            infeasible = True
        cols[j][row] = 1
        cols.append({row: 1})
        c.append(0)
        b.append(width)
        row += 1
    # empty rows: drop when consistent
    kept = tuple(range(row))
    used = [False] * row
    for col in cols:
        for i in col:
            used[i] = True
    if not all(used):
        for i in range(row):
            if not used[i] and b[i] != 0:
                infeasible = True
        remap = {}
        for i in range(row):
            if used[i]:
                remap[i] = len(remap)
        cols = [{remap[i]: v for i, v in col.items()} for col in cols]
        b = [b[i] for i in range(row) if used[i]]
        kept = tuple(i for i in range(row) if used[i])
    return _StandardForm(cols, b, c, n, P.lower, offset, infeasible, kept)


def _empty_row_certificate(P: LinearProgram) -> tuple[Number, ...]:
    """Unit Farkas vector on an all-zero row with nonzero right-hand side, if there is one."""
    used = set()
    for col in P.columns:
        used.update(col)
    for i, bi in enumerate(P.b):
        if i not in used and bi != 0:
            y = [0] * P.n_rows
            y[i] = -1 if bi > 0 else 1
            return tuple(y)
    return ()


def _original_duals(P: LinearProgram, std: _StandardForm, y) -> tuple[Number, ...]:
    """Duals of the rows of ``P``; rows dropped as empty get zero."""
    out = [0] * P.n_rows
    for k, i in enumerate(std.rows):
        if i < P.n_rows:
            out[i] = _norm(y[k])
    return tuple(out)


def _crash_columns(std: _StandardForm) -> dict[int, int]:
    """Row -> lowest-index singleton column usable as a feasible basic slack."""
    out: dict[int, int] = {}
    for j, col in enumerate(std.cols):
        if len(col) != 1:
            continue
        (i, v), = col.items()
        if i in out:
            continue
        if std.b[i] == 0 or (std.b[i] > 0) == (v > 0):
            out[i] = j
    return out


def _highs_basis(std: _StandardForm):
    """Ask HiGHS for an optimal basis of the float relaxation; ``None`` if unavailable."""
    try:
        import highspy
        import numpy as np
    except ImportError:  # pragma: no cover - optional accelerator
        return None
    m, n = len(std.b), len(std.cols)
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("solver", "simplex")
    h.setOptionValue("dual_feasibility_tolerance", 1e-10)
    h.setOptionValue("primal_feasibility_tolerance", 1e-10)
    lp = highspy.HighsLp()
    lp.num_col_ = n
    lp.num_row_ = m
    lp.col_cost_ = np.array([float(v) for v in std.c])
    lp.col_lower_ = np.zeros(n)
    lp.col_upper_ = np.full(n, highspy.kHighsInf)
    rhs = np.array([float(v) for v in std.b])
    lp.row_lower_ = rhs
    lp.row_upper_ = rhs
    start, index, value = [0], [], []
    for col in std.cols:
        for i in sorted(col):
            index.append(i)
            value.append(float(col[i]))
        start.append(len(index))
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = np.array(start, dtype=np.int32)
    lp.a_matrix_.index_ = np.array(index, dtype=np.int32)
    lp.a_matrix_.value_ = np.array(value)
    h.passModel(lp)
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        return None
    basis = h.getBasis()
    basic = highspy.HighsBasisStatus.kBasic
    cols = [j for j, st in enumerate(basis.col_status) if st == basic]
    rows = [i for i, st in enumerate(basis.row_status) if st == basic]
    return cols, rows


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def solve_lp(P: LinearProgram, *, rule: str = "bland", warm_start: str | bool = "auto") -> LpSolution:
    """Exact optimal vertex of ``P``, or an Infeasible / Unbounded status.

    ``rule="bland"`` uses Bland's smallest-index rule throughout;
    ``rule="dantzig"`` prices by most negative reduced cost and falls back
    to Bland's rule after every degenerate pivot.  ``warm_start`` is
    ``"auto"`` (HiGHS hint for problems with at least
    ``WARM_START_MIN_ROWS`` rows), ``True`` or ``False``.
    """
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    std = _standard_form(P)
    if std.infeasible:
        return LpSolution(Status.INFEASIBLE, farkas=_empty_row_certificate(P))
    m = len(std.b)
    n_std = len(std.cols)
    if m == 0:
        return _finish_trivial(P, std)

    crash = _crash_columns(std)
    use_hint = warm_start is True or (warm_start == "auto" and m >= WARM_START_MIN_ROWS)
    solver = None
    warm = False
    if use_hint:
        solver = _try_warm_start(std, rule)
        warm = solver is not None

    if solver is None:
        cols = list(std.cols)
        basis = []
        for i in range(m):
            if i in crash:
                basis.append(crash[i])
            else:
                basis.append(len(cols))
                cols.append({i: 1 if std.b[i] >= 0 else -1})
        n_art = len(cols) - n_std
        solver = _Simplex(cols, std.b, basis, n_std, rule)
        if n_art:
            c1 = [0] * n_std + [1] * n_art
            status, y, _ = solver.run(c1, len(cols), fix_artificials=False)
            phase1 = sum((solver.xB[i] for i, j in enumerate(solver.basis) if j >= n_std), 0)
            if phase1 > 0:
                return LpSolution(Status.INFEASIBLE, iterations=solver.iterations,
                                  farkas=tuple(-v for v in _original_duals(P, std, y)))
            _drive_out_artificials(solver, n_std)

    c2 = list(std.c) + [0] * (len(solver.cols) - n_std)
    status, y, ray = solver.run(c2, n_std, fix_artificials=True)
    if status is Status.UNBOUNDED:
        q, d = ray
        direction = [0] * n_std
        direction[q] = 1
        for i, di in enumerate(d):
            j = solver.basis[i]
            if di and j < n_std:
                direction[j] = -di
        return LpSolution(Status.UNBOUNDED, iterations=solver.iterations, warm_started=warm,
                          ray=tuple(direction[: std.n_orig]))

    x_std = [0] * n_std
    for i, j in enumerate(solver.basis):
        if j < n_std:
            x_std[j] = solver.xB[i]
    values = tuple(_norm(x_std[j] + std.shift[j]) for j in range(std.n_orig))
    objective = _norm(P.objective(values))
    _verify_optimality(solver, std, c2, y, x_std, objective)
    basis = tuple(sorted(j for j in solver.basis if j < n_std))
    return LpSolution(Status.OPTIMAL, values, objective, basis, True, _original_duals(P, std, y),
                      solver.iterations, warm)


def _norm(v: Number) -> Number:
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


def _finish_trivial(P: LinearProgram, std: _StandardForm) -> LpSolution:
    # no constraints left: x' = 0 unless some cost is negative
    for j, cj in enumerate(std.c):
        if cj < 0:
            ray = [0] * std.n_orig
            if j < std.n_orig:
                ray[j] = 1
            return LpSolution(Status.UNBOUNDED, ray=tuple(ray))
    values = tuple(_norm(v) for v in std.shift)
    return LpSolution(Status.OPTIMAL, values, _norm(P.objective(values)), (), True, (0,) * P.n_rows)


def _try_warm_start(std: _StandardForm, rule: str):
    hint = _highs_basis(std)
    if hint is None:
        return None
    cols_basic, rows_basic = hint
    m, n_std = len(std.b), len(std.cols)
    cols = list(std.cols)
    basis = list(cols_basic)
    # A basic row activity means a zero dual on that row; a zero-cost
    # artificial column reproduces exactly that.
    for i in rows_basic:
        basis.append(len(cols))
        cols.append({i: 1})
    if len(basis) != m:
        log.info("warm start: HiGHS basis has %d columns for %d rows", len(basis), m)
        return None
    try:
        solver = _Simplex(cols, std.b, basis, n_std, rule)
    except SingularBasis:
        log.info("warm start: HiGHS basis is singular in exact arithmetic")
        return None
    for i, j in enumerate(solver.basis):
        v = solver.xB[i]
        if v < 0 or (j >= n_std and v != 0):
            log.info("warm start: HiGHS basis is not primal feasible in exact arithmetic")
            return None
    return solver


def _drive_out_artificials(solver: _Simplex, n_std: int):
    """Pivot zero-valued artificials out of the basis where a structural column allows it."""
    for r in range(solver.m):
        if solver.basis[r] < n_std:
            continue
        e = [0] * solver.m
        e[r] = 1
        u = solver.btran(e)
        for j in range(n_std):
            if solver.in_basis[j]:
                continue
            alpha = sum((u[i] * v for i, v in solver.cols[j].items() if u[i]), 0)
            if alpha:
                d = solver.ftran(solver.column_dense(j))
                solver.pivot(j, r, d, 0)
                break
        # otherwise the row is redundant; the artificial stays basic at zero


def _verify_optimality(solver, std, c, y, x_std, objective):
    """Exact primal/dual certificate check; a failure is a bug, never a tolerance issue."""
    for j in range(len(std.cols)):
        if solver.reduced_cost(j, c, y) < 0:
            raise AssertionError(f"reduced cost of column {j} is negative at the returned optimum")
    if any(v < 0 for v in x_std):
        raise AssertionError("negative basic variable at the returned optimum")
    dual_obj = sum((yi * bi for yi, bi in zip(y, std.b)), 0) + std.offset
    if dual_obj != objective:
        raise AssertionError(f"duality gap {objective - dual_obj} at the returned optimum")


def is_integral(sol: LpSolution) -> bool:
    """True iff every value of an optimal solution is an integer (exact test)."""
    if sol.status is not Status.OPTIMAL:
        raise NotOptimal(f"solution status is {sol.status.value}")
    return all(Fraction(v).denominator == 1 for v in sol.values)


def solve_ilp(P: LinearProgram, *, node_limit: int = 20000, rule: str = "bland") -> IlpSolution:
    """Depth-first branch and bound with best-bound pruning.

    Branches on the most fractional variable (ties: lowest index) and
    explores the ``x <= floor`` child first.  When ``node_limit`` LPs have
    been solved the best incumbent is returned with ``proven_optimal=False``.
    """
    stack = [(P.lower, P.upper, None)]
    incumbent: LpSolution | None = None
    nodes = 0
    root_obj = None
    unbounded = False
    while stack:
        if nodes >= node_limit:
            break
        lower, upper, parent_bound = stack.pop()
        if incumbent is not None and parent_bound is not None and parent_bound >= incumbent.objective:
            continue
        sol = solve_lp(P.with_bounds(lower, upper), rule=rule)
        nodes += 1
        if nodes == 1:
            root_obj = sol.objective
            if sol.status is Status.UNBOUNDED:
                unbounded = True
                break
        if sol.status is not Status.OPTIMAL:
            continue
        if incumbent is not None and sol.objective >= incumbent.objective:
            continue
        j = _most_fractional(sol.values)
        if j is None:
            incumbent = sol
            continue
        v = Fraction(sol.values[j])
        lo_branch = list(upper)
        lo_branch[j] = math.floor(v)
        hi_branch = list(lower)
        hi_branch[j] = math.ceil(v)
        stack.append((tuple(hi_branch), upper, sol.objective))
        stack.append((lower, tuple(lo_branch), sol.objective))

    proven = not stack and not unbounded
    if unbounded:
        return IlpSolution(Status.UNBOUNDED, node_count=nodes, proven_optimal=False)
    if incumbent is None:
        status = Status.INFEASIBLE
        return IlpSolution(status, node_count=nodes, proven_optimal=proven, root_objective=root_obj)
    values = tuple(int(v) for v in incumbent.values)
    return IlpSolution(Status.OPTIMAL, values, incumbent.objective, nodes, proven, root_obj)


def _most_fractional(values) -> int | None:
    best, best_gap = None, None
    half = Fraction(1, 2)
    for j, v in enumerate(values):
        q = Fraction(v)
        if q.denominator == 1:
            continue
        gap = abs(q - math.floor(q) - half)
        if best is None or gap < best_gap:
            best, best_gap = j, gap
    return best


# ---------------------------------------------------------------------------
# plain-text dump
# ---------------------------------------------------------------------------


def dump_lp(P: LinearProgram, integer: bool = False) -> str:
    """Plain-text form: ``min`` cost line, one ``coeffs = rhs`` line per row, bound lines.

    ::

        # flatnorm lp: <rows> rows, <vars> variables
        min c_1 ... c_n
        a_11 ... a_1n = b_1
        ...
        lb l_1 ... l_n
        ub u_1 ... u_n          (inf for no bound)
        integer                 (only for integer programs)
    """
    A = P.to_dense()
    out = [f"# flatnorm lp: {P.n_rows} rows, {P.n_vars} variables", "min " + " ".join(map(fmt_rational, P.c))]
    for row, bi in zip(A, P.b):
        out.append(" ".join(map(fmt_rational, row)) + " = " + fmt_rational(bi))
    out.append("lb " + " ".join(map(fmt_rational, P.lower)))
    out.append("ub " + " ".join("inf" if u is None else fmt_rational(u) for u in P.upper))
    if integer:
        out.append("integer")
    return "\n".join(out) + "\n"


def load_lp(text: str) -> tuple[LinearProgram, bool]:
    """Inverse of :func:`dump_lp`; returns the program and its integrality flag."""
    c = lower = upper = None
    rows, b = [], []
    integer = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("min"):
            c = [parse_rational(t) for t in line.split()[1:]]
        elif line.startswith("lb"):
            lower = [parse_rational(t) for t in line.split()[1:]]
        elif line.startswith("ub"):
            upper = [None if t == "inf" else parse_rational(t) for t in line.split()[1:]]
        elif line == "integer":
            integer = True
        else:
            lhs, rhs = line.split("=")
            rows.append([parse_rational(t) for t in lhs.split()])
            b.append(parse_rational(rhs))
    return LinearProgram.from_dense(rows, b, c, lower, upper), integer

"""The multiscale simplicial flat norm as an exact linear/integer program.

Given an integer ``d``-chain ``t`` the flat norm at scale ``λ`` is

    min over integer (d+1)-chains s of   Σ w_i |x_i| + λ Σ v_j |s_j|,   x = t − ∂s.

Splitting ``x = x⁺ − x⁻`` and ``s = s⁺ − s⁻`` turns it into the program
``[I −I B −B] (x⁺, x⁻, s⁺, s⁻) = t`` with costs ``(w, w, λv, λv)``.  When the
relaxation's optimal vertex is integral it is the answer; otherwise branch
and bound takes over.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, DimensionOutOfRange, InfeasibleProblem, NegativeWeight, NodeBudgetExceeded
from .geometry import volumes
from .lp import LinearProgram, Status, is_integral, solve_ilp, solve_lp
from .rational import rationalize
from .simplicial import Chain, SimplicialComplex, apply_boundary, boundary_matrix, chain_mass

log = logging.getLogger(__name__)


class SolverPath(str, Enum):
    LP_ONLY = "LpOnly"
    BRANCH_AND_BOUND = "BranchAndBound"


def euclidean_weights(K: SimplicialComplex, dim: int) -> tuple[Fraction, ...]:
    """Volumes of the ``dim``-simplices, rationalized once."""
    return tuple(rationalize(float(v)) for v in volumes(K, dim))


def unit_weights(K: SimplicialComplex, dim: int) -> tuple[Fraction, ...]:
    return (Fraction(1),) * K.count(dim)


def _exact_weights(values, expected: int, what: str) -> tuple[Fraction, ...]:
    if len(values) != expected:
        raise DimensionMismatch(f"{len(values)} {what} weights for {expected} simplices")
    out = tuple(rationalize(v) for v in values)
    for i, q in enumerate(out):
        if q < 0:
            raise NegativeWeight(f"{what} weight {i} is negative ({q})")
    return out


@dataclass(frozen=True)
class MsfnProblem:
    """One flat-norm instance.  ``w``/``v`` default to Euclidean volumes."""

    K: SimplicialComplex
    d: int
    t: Chain
    lam: Fraction
    w: tuple[Fraction, ...] | None = None
    v: tuple[Fraction, ...] | None = None
    multiplicity_cap: bool = False

    def __post_init__(self):
        K, d = self.K, self.d
        if not 0 <= d < K.dim:
            raise DimensionOutOfRange(f"need 0 <= d < {K.dim} for the flat norm of d-chains, got d={d}")
        if self.t.dim != d or self.t.size != K.count(d):
            raise DimensionMismatch(f"t is a {self.t.dim}-chain of length {self.t.size}, expected a {d}-chain")
        lam = rationalize(self.lam)
        if lam < 0:
            raise NegativeWeight(f"scale λ must be nonnegative, got {lam}")
        object.__setattr__(self, "lam", lam)
        w = euclidean_weights(K, d) if self.w is None else self.w
        v = euclidean_weights(K, d + 1) if self.v is None else self.v
        object.__setattr__(self, "w", _exact_weights(w, K.count(d), "d-simplex"))
        object.__setattr__(self, "v", _exact_weights(v, K.count(d + 1), "(d+1)-simplex"))

    @property
    def m(self) -> int:
        return self.K.count(self.d)

    @property
    def n(self) -> int:
        return self.K.count(self.d + 1)

    def input_mass(self) -> Fraction:
        return Fraction(chain_mass(self.t, self.w))


@dataclass(frozen=True)
class MsfnResult:
    x: Chain
    s: Chain
    flat_norm: Fraction
    x_mass: Fraction
    s_mass: Fraction
    lam: Fraction
    lp_was_integral: bool
    solver_path: SolverPath
    proven_optimal: bool = True
    lp_objective: Fraction | None = None
    node_count: int = 0
    iterations: int = field(default=0, compare=False)


def formulate(P: MsfnProblem) -> LinearProgram:
    """Columns ``x⁺ (m), x⁻ (m), s⁺ (n), s⁻ (n)``; with the multiplicity cap,
    ``2m+2n`` slack columns ``y`` and rows ``x' + y = 1`` follow."""
    m, n = P.m, P.n
    B = boundary_matrix(P.K, P.d)
    cols: list[dict[int, int]] = []
    cols += [{i: 1} for i in range(m)]
    cols += [{i: -1} for i in range(m)]
    cols += [{i: sgn for i, sgn in col} for col in B.columns]
    cols += [{i: -sgn for i, sgn in col} for col in B.columns]
    cost = list(P.w) + list(P.w) + [P.lam * v for v in P.v] * 2
    b = [P.t[i] for i in range(m)]
    n_rows = m
    if P.multiplicity_cap:
        k = len(cols)
        for j in range(k):
            cols[j][m + j] = 1
        cols += [{m + j: 1} for j in range(k)]
        cost += [0] * k
        b += [1] * k
        n_rows = m + k
    return LinearProgram(n_rows, tuple(cols), tuple(b), tuple(cost))


def _decode(P: MsfnProblem, values: Sequence) -> tuple[Chain, Chain]:
    m, n = P.m, P.n
    x = Chain(P.d, m, {i: values[i] - values[m + i] for i in range(m)})
    s = Chain(P.d + 1, n, {j: values[2 * m + j] - values[2 * m + n + j] for j in range(n)})
    return x, s


def _result(P, values, path, lp_integral, proven, lp_obj, nodes, iters) -> MsfnResult:
    x, s = _decode(P, values)
    B = boundary_matrix(P.K, P.d)
    if x != P.t - apply_boundary(B, s):
        raise AssertionError("decomposition identity x = t - ∂s violated")
    xm = Fraction(chain_mass(x, P.w))
    sm = Fraction(chain_mass(s, P.v))
    return MsfnResult(x, s, xm + P.lam * sm, xm, sm, P.lam, lp_integral, path, proven,
                      None if lp_obj is None else Fraction(lp_obj), nodes, iters)


def compute_msfn(P: MsfnProblem, *, node_limit: int = 20000, warm_start="auto", rule: str = "bland") -> MsfnResult:
    """Solve the relaxation; fall back to branch and bound when its vertex is fractional."""
    lp = formulate(P)
    sol = solve_lp(lp, warm_start=warm_start, rule=rule)
    if sol.status is Status.INFEASIBLE:
        raise InfeasibleProblem("no decomposition satisfies the multiplicity cap")
    if sol.status is not Status.OPTIMAL:
        raise AssertionError(f"flat-norm relaxation reported {sol.status.value}")
    if is_integral(sol):
        res = _result(P, sol.values, SolverPath.LP_ONLY, True, True, sol.objective, 0, sol.iterations)
        if res.flat_norm != sol.objective:
            raise AssertionError("flat norm differs from the LP objective")
        return res
    log.info("relaxation is fractional (objective %s); branching", sol.objective)
    ilp = solve_ilp(lp, node_limit=node_limit, rule=rule)
    if ilp.status is Status.INFEASIBLE:
        if ilp.proven_optimal:
            raise InfeasibleProblem("no integral decomposition satisfies the multiplicity cap")
        raise NodeBudgetExceeded(f"no integral point found within {node_limit} nodes", incumbent=None)
    res = _result(P, ilp.values, SolverPath.BRANCH_AND_BOUND, False, ilp.proven_optimal,
                  sol.objective, ilp.node_count, sol.iterations)
    if not ilp.proven_optimal:
        raise NodeBudgetExceeded(f"branch and bound stopped after {ilp.node_count} nodes", incumbent=res)
    return res


@dataclass(frozen=True)
class Breakpoint:
    """The optimal mass pair changes between grid points ``lo`` and ``hi``.

    ``crossing`` is where the two optimal affine functions of ``λ`` meet
    (exact), or ``None`` when both have the same slope.
    """

    lo: Fraction
    hi: Fraction
    crossing: Fraction | None


@dataclass(frozen=True)
class SweepResult:
    results: tuple[tuple[Fraction, MsfnResult], ...]
    breakpoints: tuple[Breakpoint, ...]

    def __iter__(self):
        return iter(self.results)

    def __len__(self):
        return len(self.results)

    @property
    def lambdas(self) -> list[Fraction]:
        return [lam for lam, _ in self.results]

    @property
    def values(self) -> list[Fraction]:
        return [r.flat_norm for _, r in self.results]


def lambda_sweep(K: SimplicialComplex, d: int, t: Chain, lambdas, w=None, v=None, *,
                 multiplicity_cap: bool = False, **solver_opts) -> SweepResult:
    """Flat norm at every ``λ`` (in input order) plus the brackets where the optimum changes."""
    lambdas = [rationalize(lam) for lam in lambdas]
    if not lambdas:
        raise ValueError("empty λ grid")
    base = MsfnProblem(K, d, t, lambdas[0], w, v, multiplicity_cap)
    results = []
    for lam in lambdas:
        P = MsfnProblem(K, d, t, lam, base.w, base.v, multiplicity_cap)
        results.append((lam, compute_msfn(P, **solver_opts)))
    return SweepResult(tuple(results), tuple(find_breakpoints(results)))


def find_breakpoints(results) -> list[Breakpoint]:
    out = []
    for (l1, r1), (l2, r2) in zip(results, results[1:]):
        if (r1.x_mass, r1.s_mass) == (r2.x_mass, r2.s_mass):
            continue
        crossing = None
        if r1.s_mass != r2.s_mass:
            crossing = (r2.x_mass - r1.x_mass) / (r1.s_mass - r2.s_mass)
        out.append(Breakpoint(l1, l2, crossing))
    return out


def ohcp_mode(K: SimplicialComplex, d: int, t: Chain, **solver_opts) -> MsfnResult:
    """Smallest unit-weight 1-norm chain homologous to ``t`` (flat norm with λ = 0)."""
    P = MsfnProblem(K, d, t, Fraction(0), unit_weights(K, d), unit_weights(K, d + 1))
    return compute_msfn(P, **solver_opts)


def flat_distance(K: SimplicialComplex, d: int, t1: Chain, t2: Chain, lam, w=None, v=None, **solver_opts) -> MsfnResult:
    """Flat norm of ``t1 - t2``."""
    return compute_msfn(MsfnProblem(K, d, t1 - t2, lam, w, v), **solver_opts)

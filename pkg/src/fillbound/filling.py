"""Combinatorial filling of simplicial boundaries with certified bounds.

``fill_boundary`` solves the boundary system exactly and certifies the
coefficient growth against the binomial/Hadamard ceiling; ``min_mass_fill``
finds the exact minimum-mass 2-chain filling a 1-boundary by branch and
bound over the solution coset; ``hf1_profile`` turns a cycle census into a
lower envelope for the first homological filling function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .chains import Chain, SimplicialComplex, boundary_matrix, mass
from .errors import CapacityError, DomainError
from .intlin import (
    SmithDecomposition,
    _greedy_reduce_maxnorm,
    _maxnorm_coset_min,
    column_echelon_basis,
    rank,
    smith_decomposition,
)

KERNEL_REDUCTION_MAX_DIM = 8
GREEDY_REDUCTION_MAX_WORK = 200_000
MIN_MASS_MAX_KERNEL_DIM = 20
DEFAULT_REL_TOL = 1e-9
DEFAULT_NODE_BUDGET = 4 * 10 ** 6


def boundary_smith(complex: SimplicialComplex, k: int) -> SmithDecomposition:
    """Smith decomposition of the k-th boundary matrix, cached per complex."""
    key = ("snf", k)
    cached = complex._memo.get(key)
    if cached is None:
        cached = smith_decomposition(boundary_matrix(complex, k))
        complex._memo[key] = cached
    return cached


def h1_is_trivial(complex: SimplicialComplex) -> bool:
    """Every integer 1-cycle bounds: rank Z_1 = rank B_1 and no torsion."""
    if complex.dimension < 1:
        return True
    n1 = complex.n_simplices(1)
    rank_d1 = rank(boundary_matrix(complex, 1))
    cycle_rank = n1 - rank_d1
    if complex.dimension < 2:
        return cycle_rank == 0
    snf2 = boundary_smith(complex, 2)
    if snf2.rank != cycle_rank:
        return False
    return all(d in (0, 1) for d in snf2.diagonal)


@dataclass(frozen=True)
class FillCertificate:
    """Coefficient-growth certificate for one boundary-filling instance.

    ``bound_max`` is C(n0, k+1)^(C(n0, k+1)/2) * input_max_coeff and
    ``bound_l1`` is C(n0, k+2) times that; both are reported in binary64
    but verified exactly on squared integers by :meth:`bounds_hold`.
    """

    input_max_coeff: int
    output_max_coeff: int
    output_l1: int
    bound_max: float
    bound_l1: float
    rank_used: int
    n_vertices: int
    k: int

    def bounds_hold(self) -> bool:
        c1 = math.comb(self.n_vertices, self.k + 1)
        c2 = math.comb(self.n_vertices, self.k + 2)
        lhs_max = self.output_max_coeff ** 2
        rhs_max = c1 ** c1 * self.input_max_coeff ** 2
        if lhs_max > rhs_max:
            return False
        lhs_l1 = self.output_l1 ** 2
        rhs_l1 = c2 ** 2 * c1 ** c1 * self.input_max_coeff ** 2
        return lhs_l1 <= rhs_l1


def _binomial_bound(n0: int, k: int) -> float:
    c = math.comb(n0, k + 1)
    if c == 0:
        return 0.0
    try:
        return math.pow(c, c / 2.0)
    except OverflowError:
        # the exact integer comparison in bounds_hold is unaffected
        return math.inf


def _min_maxnorm_in_coset(x0: list[int], kernel: list[list[int]],
                          node_budget: int = DEFAULT_NODE_BUDGET) -> list[int]:
    """Exact minimal (max-norm, l1, lex) representative of x0 + lattice."""
    xr = _greedy_reduce_maxnorm(x0, kernel)
    box = max(map(abs, xr), default=0)
    best = _maxnorm_coset_min(x0, kernel, box, node_budget)
    assert best is not None  # xr itself is inside the box
    return best


def fill_boundary(complex: SimplicialComplex, c_k: Chain) -> tuple[Chain, FillCertificate]:
    """Fill a simplicial k-boundary by a (k+1)-chain with certified coefficients.

    Solvability is decided by the Smith form of the boundary matrix; the
    returned chain is the minimal max-norm solution of the system whenever
    the homogeneous lattice has dimension <= 8, otherwise the Smith solution
    after greedy lattice reduction.
    """
    k = c_k.dim
    if k < 1:
        raise DomainError("only k >= 1 boundaries are filled")
    if k + 1 > complex.dimension:
        raise DomainError(
            f"complex has no {k + 1}-simplices to fill a {k}-chain with"
        )
    n_k = complex.n_simplices(k)
    b = c_k.to_vector(n_k)
    snf = boundary_smith(complex, k + 1)
    x0, obstruction = snf.solve_with_obstruction(b)
    if x0 is None:
        raise DomainError(f"chain is not a boundary: {obstruction}")
    kernel = snf.kernel_basis()
    if kernel and len(kernel) <= KERNEL_REDUCTION_MAX_DIM:
        x = _min_maxnorm_in_coset(x0, kernel)
    elif kernel and len(kernel) * len(x0) <= GREEDY_REDUCTION_MAX_WORK:
        x = _greedy_reduce_maxnorm(x0, kernel)
    else:
        # huge homogeneous lattice: keep the Smith solution as-is
        x = x0
    filled = Chain.from_vector(k + 1, x)
    input_max = c_k.max_abs()
    cert = FillCertificate(
        input_max_coeff=input_max,
        output_max_coeff=filled.max_abs(),
        output_l1=filled.l1(),
        bound_max=_binomial_bound(complex.n_vertices, k) * input_max,
        bound_l1=math.comb(complex.n_vertices, k + 2)
        * _binomial_bound(complex.n_vertices, k)
        * input_max,
        rank_used=snf.rank,
        n_vertices=complex.n_vertices,
        k=k,
    )
    return filled, cert


def _cost(vec: Sequence[int], weights: Sequence[float]) -> float:
    return sum(abs(a) * weights[i] for i, a in enumerate(vec) if a)


def _greedy_reduce_weighted(x: list[int], cols: list[list[int]],
                            weights: Sequence[float]) -> list[int]:
    x = x[:]
    if not cols:
        return x
    best = _cost(x, weights)
    improved = True
    while improved:
        improved = False
        for col in cols:
            candidates = {0}
            for xi, ci in zip(x, col):
                if ci:
                    q = round(xi / ci)
                    candidates.update((q - 1, q, q + 1))
            best_q = 0
            for q in sorted(candidates):
                if q == 0:
                    continue
                trial_cost = _cost([xi - q * ci for xi, ci in zip(x, col)], weights)
                if trial_cost < best * (1 - 1e-12):
                    best = trial_cost
                    best_q = q
            if best_q:
                x = [xi - best_q * ci for xi, ci in zip(x, col)]
                improved = True
    return x


def _weighted_coset_min(
    x0: list[int],
    kernel: list[list[int]],
    weights: Sequence[float],
    rel_tol: float,
    node_budget: int,
) -> tuple[list[int], float]:
    """Exact minimum of sum_i w_i |x_i| over x0 + lattice; ties lexicographic.

    Raises CapacityError (carrying the incumbent) if the node budget runs out.
    """
    n = len(x0)
    xr = _greedy_reduce_weighted(x0, kernel, weights)
    best_vec = tuple(xr)
    best_cost = _cost(xr, weights)
    if not kernel:
        return list(best_vec), best_cost

    cols, pivots = column_echelon_basis(kernel, n)
    r = len(cols)
    next_pivot = pivots[1:] + [n]
    first_pivot = pivots[0]
    fixed_cost = sum(abs(xr[i]) * weights[i] for i in range(first_pivot))
    nodes = 0

    def tol(val: float) -> float:
        return rel_tol * (1.0 + abs(val))

    def dfs(j: int, cur: list[int], partial: float):
        nonlocal best_vec, best_cost, nodes
        if j == r:
            if partial < best_cost - tol(best_cost):
                best_cost = partial
                best_vec = tuple(cur)
            elif abs(partial - best_cost) <= tol(best_cost) and tuple(cur) < best_vec:
                best_vec = tuple(cur)
            return
        col = cols[j]
        p = pivots[j]
        hp = col[p]
        base = cur[p]
        stop = next_pivot[j]
        budget = best_cost + tol(best_cost) - partial
        if budget < 0:
            return
        # |x_p| may not exceed budget / w_p; enumerate t outward from the
        # value minimizing |x_p| so pruning bites early
        limit = budget / weights[p]
        t_center = round(-base / hp)
        for direction in (0, 1, -1):
            t = t_center + direction
            step = 0 if direction == 0 else direction
            while True:
                xp = base + t * hp
                if abs(xp) > limit + 1e-15:
                    break
                nodes += 1
                if nodes > node_budget:
                    raise CapacityError(
                        f"mass minimization exceeded node budget {node_budget}",
                        incumbent=list(best_vec),
                        incumbent_cost=best_cost,
                    )
                nxt = cur[:p] + [cur[i] + t * col[i] for i in range(p, n)]
                seg = partial + sum(
                    abs(nxt[i]) * weights[i] for i in range(p, stop)
                )
                if seg <= best_cost + tol(best_cost):
                    dfs(j + 1, nxt, seg)
                if step == 0:
                    break
                t += step

    dfs(0, xr, fixed_cost)
    return list(best_vec), best_cost


def min_mass_fill(
    complex: SimplicialComplex,
    weights: Mapping[int, Sequence[float]],
    z: Chain,
    rel_tol: float = DEFAULT_REL_TOL,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[Chain, float]:
    """Exact minimum-mass integer 2-chain E with boundary z.

    ``weights`` maps dimension -> per-simplex volumes (dimension 2 is the
    objective).  The optimum is certified by branch and bound over the
    solution coset; lexicographic tie-break on the coefficient vector.
    """
    if z.dim != 1:
        raise DomainError("min_mass_fill expects a 1-chain")
    if complex.dimension < 2:
        raise DomainError("complex has no 2-simplices")
    w2 = weights[2]
    n1 = complex.n_simplices(1)
    n2 = complex.n_simplices(2)
    if len(w2) < n2:
        raise DomainError("missing 2-simplex weights")
    snf = boundary_smith(complex, 2)
    x0, obstruction = snf.solve_with_obstruction(z.to_vector(n1))
    if x0 is None:
        raise DomainError(f"cycle does not bound: {obstruction}")
    kernel = snf.kernel_basis()
    if len(kernel) > MIN_MASS_MAX_KERNEL_DIM:
        xr = _greedy_reduce_weighted(x0, kernel, w2)
        raise CapacityError(
            f"homogeneous lattice dimension {len(kernel)} exceeds "
            f"{MIN_MASS_MAX_KERNEL_DIM}; incumbent is not certified optimal",
            incumbent=Chain.from_vector(2, xr),
            incumbent_cost=_cost(xr, w2),
        )
    best, cost = _weighted_coset_min(x0, kernel, w2, rel_tol, node_budget)
    return Chain.from_vector(2, best), cost


# ---------------------------------------------------------------------------
# HF1 profiling


@dataclass(frozen=True)
class Hf1Profile:
    """Lower envelope of the first homological filling function.

    ``samples`` holds (l, estimate) pairs where the estimate is the largest
    exact minimum filling mass among enumerated cycles of mass <= l; it is a
    LOWER estimate of HF1(l), as recorded in ``estimate_kind``.  The fitted
    line f1 * l + f2 dominates every sample.
    """

    samples: tuple[tuple[float, float], ...]
    fitted_f1: float
    fitted_f2: float
    cycle_census: tuple[tuple[float, int], ...]
    estimate_kind: str = "lower"

    def estimate_at(self, l: float) -> float:
        best = 0.0
        for li, ei in self.samples:
            if li <= l + 1e-12:
                best = max(best, ei)
        return best


def enumerate_simple_cycles(
    complex: SimplicialComplex, max_edges: int, limit: int
) -> list[list[int]]:
    """Simple cycles of the 1-skeleton as closed vertex loops.

    Canonical form: the loop starts at its smallest vertex and its second
    vertex is smaller than its last (one orientation per cycle).  Cycles
    are produced shortest first (iterative deepening on the edge count), so
    a tight ``limit`` keeps the short cycles that drive the filling profile
    at small lengths.  Hop-distance pruning keeps each sweep out of regions
    that cannot close in time.
    """
    n = complex.n_vertices
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for (u, v) in complex.simplices(1):
        nbrs[u].append(v)
        nbrs[v].append(u)
    for lst in nbrs:
        lst.sort()
    out: list[list[int]] = []

    def hop_distances(root: int) -> list[int]:
        dist = [-1] * n
        dist[root] = 0
        frontier = [root]
        while frontier:
            nxt_frontier = []
            for v in frontier:
                for w in nbrs[v]:
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        nxt_frontier.append(w)
            frontier = nxt_frontier
        return dist

    def dfs(root: int, hops: list[int], length: int, path: list[int], on_path: set):
        if len(out) >= limit:
            return
        tail = path[-1]
        for nxt in nbrs[tail]:
            if len(out) >= limit:
                return
            if nxt == root and len(path) == length and path[1] < path[-1]:
                out.append(path[:])
            elif (
                nxt > root
                and nxt not in on_path
                and len(path) < length
                and hops[nxt] <= length - len(path)
            ):
                path.append(nxt)
                on_path.add(nxt)
                dfs(root, hops, length, path, on_path)
                on_path.discard(nxt)
                path.pop()

    hops_cache = [hop_distances(root) for root in range(n)]
    for length in range(3, max_edges + 1):
        for root in range(n):
            if len(out) >= limit:
                return out
            dfs(root, hops_cache[root], length, [root], {root})
    return out


def loop_chain(complex: SimplicialComplex, loop: Sequence[int]) -> Chain:
    """Oriented 1-chain traversing the closed vertex loop."""
    acc: dict[int, int] = {}
    for i in range(len(loop)):
        u, v = loop[i], loop[(i + 1) % len(loop)]
        if u < v:
            idx, sgn = complex.index_of(1, (u, v)), 1
        else:
            idx, sgn = complex.index_of(1, (v, u)), -1
        acc[idx] = acc.get(idx, 0) + sgn
    return Chain(1, acc)


MAX_CYCLE_MULTIPLE = 3


DEFAULT_MAX_CYCLE_EDGES = 12


def hf1_profile(
    complex: SimplicialComplex,
    weights: Mapping[int, Sequence[float]],
    l_grid: Sequence[float],
    cycle_budget: int,
    rel_tol: float = DEFAULT_REL_TOL,
    max_cycle_edges: Optional[int] = None,
) -> Hf1Profile:
    """Lower estimate of HF1 on a grid of length thresholds.

    Requires trivial integer H1 (checked through the Smith forms of the two
    boundary operators).  The cycle family is every simple skeleton cycle up
    to an edge-count budget (derived from the grid, capped at
    DEFAULT_MAX_CYCLE_EDGES unless overridden), plus integer multiples up to
    mass l (capped at x3).  A smaller family only lowers the estimate, which
    keeps its direction honest.
    """
    if not h1_is_trivial(complex):
        raise DomainError("H1 is nontrivial: some 1-cycle does not bound")
    grid = sorted(set(float(l) for l in l_grid))
    if not grid:
        raise DomainError("empty length grid")
    w1 = weights[1]
    l_max = grid[-1]
    min_edge = min(w1) if len(w1) else 1.0
    if max_cycle_edges is None:
        derived = max(3, int(l_max / min_edge) + 1) if l_max > 0 else 3
        max_edges = min(derived, DEFAULT_MAX_CYCLE_EDGES)
    else:
        max_edges = max(3, max_cycle_edges)
    loops = enumerate_simple_cycles(complex, max_edges, cycle_budget)

    members: list[tuple[float, float]] = []  # (mass, exact fill mass)
    for loop in loops:
        z = loop_chain(complex, loop)
        if z.is_zero():
            continue
        m1 = mass(w1, z)
        if m1 > l_max + 1e-12:
            continue
        q = 1
        while q <= MAX_CYCLE_MULTIPLE and q * m1 <= l_max + 1e-12:
            _, fill_mass = min_mass_fill(
                complex, weights, z.scale(q), rel_tol=rel_tol
            )
            members.append((q * m1, fill_mass))
            q += 1

    samples = []
    census = []
    for l in grid:
        est = 0.0
        count = 0
        for m1, fm in members:
            if m1 <= l + 1e-12:
                count += 1
                est = max(est, fm)
        samples.append((l, est))
        census.append((l, count))

    f1, f2 = _fit_upper_line(samples)
    return Hf1Profile(
        samples=tuple(samples),
        fitted_f1=f1,
        fitted_f2=f2,
        cycle_census=tuple(census),
    )


def _fit_upper_line(samples: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least squares through the staircase corners, then shifted to dominate."""
    corners = []
    prev = None
    for l, e in samples:
        if prev is None or e > prev + 1e-15:
            corners.append((l, e))
        prev = e
    if len(corners) >= 2:
        xs = [c[0] for c in corners]
        ys = [c[1] for c in corners]
        n = len(xs)
        mx = sum(xs) / n
        my = sum(ys) / n
        sxx = sum((x - mx) ** 2 for x in xs)
        f1 = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx if sxx > 0 else 0.0
    else:
        f1 = 0.0
    f1 = max(f1, 0.0)
    f2 = max((e - f1 * l for l, e in samples), default=0.0)
    return f1, max(f2, 0.0)


def amin_upper_bound(hf1_at_2d: float, n: int) -> float:
    """Minimal stationary-varifold area bound ((n+1)!/2) * HF1(2D)."""
    if hf1_at_2d < 0:
        raise DomainError("filling estimate must be nonnegative")
    if n < 2:
        raise DomainError("ambient dimension must be at least 2")
    return (math.factorial(n + 1) / 2.0) * hf1_at_2d

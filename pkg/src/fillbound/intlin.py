"""Exact integer linear algebra.

Everything in this module works over arbitrary-precision Python integers:
rank and determinants by fraction-free (Bareiss) elimination, Smith normal
form with unimodular transforms, integer solvability of ``A x = b``, exact
minor enumeration, and the Borosh--Flahive--Rubin--Treybig / Hadamard
small-solution bound used to certify fillings.

Floating point appears only in ``bfrt_bound`` (a reporting convenience);
every certificate comparison has an exact integer path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import CapacityError, DomainError, StructuralError

DEFAULT_MINOR_BUDGET = 10 ** 6
DEFAULT_NODE_BUDGET = 2 * 10 ** 6


class IntMatrix:
    """Dense matrix of arbitrary-precision integers, row-major."""

    __slots__ = ("rows", "cols", "_m")

    def __init__(self, rows: int, cols: int, entries: Optional[Sequence[int]] = None):
        if rows <= 0 or cols <= 0:
            raise StructuralError(f"matrix dimensions must be positive, got {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        if entries is None:
            self._m = [[0] * cols for _ in range(rows)]
        else:
            entries = list(entries)
            if len(entries) != rows * cols:
                raise StructuralError(
                    f"expected {rows * cols} entries for a {rows}x{cols} matrix, got {len(entries)}"
                )
            for e in entries:
                if not isinstance(e, int):
                    raise StructuralError(f"matrix entries must be int, got {type(e).__name__}")
            self._m = [entries[i * cols:(i + 1) * cols] for i in range(rows)]

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]]) -> "IntMatrix":
        data = [list(r) for r in data]
        if not data or not data[0]:
            raise StructuralError("matrix needs at least one row and one column")
        cols = len(data[0])
        if any(len(r) != cols for r in data):
            raise StructuralError("ragged rows in matrix data")
        flat = [e for r in data for e in r]
        return cls(len(data), cols, flat)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        m = cls(n, n)
        for i in range(n):
            m._m[i][i] = 1
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def column(cls, vec: Sequence[int]) -> "IntMatrix":
        return cls.from_rows([[v] for v in vec])

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self._m[i][j]

    def to_rows(self) -> list[list[int]]:
        return [row[:] for row in self._m]

    def row(self, i: int) -> list[int]:
        return self._m[i][:]

    def copy(self) -> "IntMatrix":
        out = IntMatrix.__new__(IntMatrix)
        out.rows, out.cols = self.rows, self.cols
        out._m = [row[:] for row in self._m]
        return out

    def transpose(self) -> "IntMatrix":
        out = IntMatrix.__new__(IntMatrix)
        out.rows, out.cols = self.cols, self.rows
        out._m = [list(col) for col in zip(*self._m)]
        return out

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise StructuralError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        bt = list(zip(*other._m))
        out = IntMatrix.__new__(IntMatrix)
        out.rows, out.cols = self.rows, other.cols
        out._m = [
            [sum(a * b for a, b in zip(row, col) if a) for col in bt]
            for row in self._m
        ]
        return out

    def mul_vec(self, vec: Sequence[int]) -> list[int]:
        if len(vec) != self.cols:
            raise StructuralError(f"vector length {len(vec)} != column count {self.cols}")
        return [sum(a * b for a, b in zip(row, vec) if a) for row in self._m]

    def max_abs(self) -> int:
        return max((abs(e) for row in self._m for e in row), default=0)

    def is_zero(self) -> bool:
        return all(e == 0 for row in self._m for e in row)

    def det(self) -> int:
        """Exact determinant by Bareiss fraction-free elimination."""
        if self.rows != self.cols:
            raise StructuralError("determinant of a non-square matrix")
        n = self.rows
        m = [row[:] for row in self._m]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                pivot_row = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if pivot_row is None:
                    return 0
                m[k], m[pivot_row] = m[pivot_row], m[k]
                sign = -sign
            pkk = m[k][k]
            for i in range(k + 1, n):
                mik = m[i][k]
                row_i = m[i]
                row_k = m[k]
                for j in range(k + 1, n):
                    row_i[j] = (pkk * row_i[j] - mik * row_k[j]) // prev
                row_i[k] = 0
            prev = pkk
        return sign * m[n - 1][n - 1]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._m == other._m
        )

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols}, {self._m!r})"


def rank(a: IntMatrix) -> int:
    """Exact rank over the rationals, by fraction-free elimination."""
    m = [row[:] for row in a._m]
    nrows, ncols = a.rows, a.cols
    r = 0
    prev = 1
    for col in range(ncols):
        pivot = None
        best = None
        for i in range(r, nrows):
            v = m[i][col]
            if v != 0 and (best is None or abs(v) < best):
                best = abs(v)
                pivot = i
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        prc = m[r][col]
        for i in range(r + 1, nrows):
            mic = m[i][col]
            if mic == 0 and prev == 1:
                continue
            row_i = m[i]
            row_r = m[r]
            for j in range(col + 1, ncols):
                row_i[j] = (prc * row_i[j] - mic * row_r[j]) // prev
            row_i[col] = 0
        prev = prc
        r += 1
        if r == nrows:
            break
    return r


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V = D with U, V unimodular and D diagonal, d_i | d_{i+1}."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        k = min(self.d.rows, self.d.cols)
        return tuple(self.d[i, i] for i in range(k))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)

    def solve(self, b: Sequence[int]) -> Optional[list[int]]:
        x, _ = self.solve_with_obstruction(b)
        return x

    def solve_with_obstruction(self, b: Sequence[int]):
        """Solve A x = b; on failure return (None, reason string)."""
        lrows = self.u.rows
        ncols = self.v.rows
        if len(b) != lrows:
            raise StructuralError(f"rhs length {len(b)} != row count {lrows}")
        c = self.u.mul_vec(list(b))
        y = [0] * ncols
        k = min(lrows, ncols)
        for i in range(k):
            di = self.d[i, i]
            if di != 0:
                if c[i] % di != 0:
                    return None, f"invariant factor d[{i}]={di} does not divide transformed rhs {c[i]}"
                y[i] = c[i] // di
            elif c[i] != 0:
                return None, f"transformed rhs is {c[i]} on zero diagonal row {i}"
        for i in range(k, lrows):
            if c[i] != 0:
                return None, f"transformed rhs is {c[i]} on row {i} beyond the diagonal"
        return self.v.mul_vec(y), None

    def kernel_basis(self) -> list[list[int]]:
        """Columns of V spanning ker(A) over the integers (cached)."""
        cached = getattr(self, "_kernel", None)
        if cached is None:
            r = self.rank
            n = self.v.rows
            cached = [[self.v[i, j] for i in range(n)] for j in range(r, n)]
            object.__setattr__(self, "_kernel", cached)
        return cached


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _negate_row(m, i):
    m[i] = [-x for x in m[i]]


def _add_row(m, dst, src, q):
    if q == 0:
        return
    row_s = m[src]
    m[dst] = [a + q * b for a, b in zip(m[dst], row_s)]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _negate_col(m, j):
    for row in m:
        row[j] = -row[j]


def _add_col(m, dst, src, q):
    if q == 0:
        return
    for row in m:
        row[dst] += q * row[src]


def smith_decomposition(a: IntMatrix) -> SmithDecomposition:
    """Smith normal form with transforms, pivoting on minimal |entry|.

    Fraction-free throughout; the minimal-pivot rule keeps intermediate
    entries small on incidence-like matrices.
    """
    lrows, ncols = a.rows, a.cols
    d = [row[:] for row in a._m]
    u = [[1 if i == j else 0 for j in range(lrows)] for i in range(lrows)]
    v = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]

    t = 0
    limit = min(lrows, ncols)
    while t < limit:
        # locate the minimal nonzero entry of the trailing block
        pivot = None
        best = None
        for i in range(t, lrows):
            row = d[i]
            for j in range(t, ncols):
                vij = row[j]
                if vij != 0 and (best is None or abs(vij) < best):
                    best = abs(vij)
                    pivot = (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            _swap_rows(d, pi, t)
            _swap_rows(u, pi, t)
        if pj != t:
            _swap_cols(d, pj, t)
            _swap_cols(v, pj, t)
        if d[t][t] < 0:
            _negate_row(d, t)
            _negate_row(u, t)

        while True:
            # clear the pivot column; a nonzero remainder becomes the new pivot
            restart = False
            for i in range(t + 1, lrows):
                if d[i][t] == 0:
                    continue
                q = d[i][t] // d[t][t]
                _add_row(d, i, t, -q)
                _add_row(u, i, t, -q)
                if d[i][t] != 0:
                    _swap_rows(d, i, t)
                    _swap_rows(u, i, t)
                    restart = True
                    break
            if restart:
                continue
            for j in range(t + 1, ncols):
                if d[t][j] == 0:
                    continue
                q = d[t][j] // d[t][t]
                _add_col(d, j, t, -q)
                _add_col(v, j, t, -q)
                if d[t][j] != 0:
                    _swap_cols(d, j, t)
                    _swap_cols(v, j, t)
                    restart = True
                    break
            if restart:
                continue
            # divisibility cleanup: pivot must divide the trailing block
            offender = None
            for i in range(t + 1, lrows):
                row = d[i]
                for j in range(t + 1, ncols):
                    if row[j] % d[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            _add_row(d, t, offender, 1)
            _add_row(u, t, offender, 1)
        t += 1

    um = IntMatrix.from_rows(u)
    dm = IntMatrix.from_rows(d)
    vm = IntMatrix.from_rows(v)
    return SmithDecomposition(um, dm, vm)


def smith_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, D, V) with U @ A @ V = D in Smith normal form."""
    snf = smith_decomposition(a)
    return snf.u, snf.d, snf.v


def solve_integer(a: IntMatrix, b: Sequence[int]) -> Optional[list[int]]:
    """Some integer x with A x = b, or None when no integer solution exists."""
    return smith_decomposition(a).solve(b)


def max_minor_abs(a: IntMatrix, m: int, budget: int = DEFAULT_MINOR_BUDGET) -> int:
    """Exact max |det S| over all m x m submatrices S of ``a``.

    Raises CapacityError when the number of submatrices exceeds ``budget``;
    callers should then fall back to the Hadamard estimate.
    """
    if m < 0 or m > min(a.rows, a.cols):
        raise DomainError(f"minor order {m} out of range for {a.rows}x{a.cols} matrix")
    if m == 0:
        return 1  # empty determinant
    count = math.comb(a.rows, m) * math.comb(a.cols, m)
    if count > budget:
        raise CapacityError(
            f"minor enumeration needs {count} determinants (budget {budget}); "
            "use the Hadamard estimate instead"
        )
    if m == 1:
        return a.max_abs()
    best = 0
    rows = a._m
    for ris in itertools.combinations(range(a.rows), m):
        picked = [rows[i] for i in ris]
        for cjs in itertools.combinations(range(a.cols), m):
            sub = IntMatrix.from_rows([[r[j] for j in cjs] for r in picked])
            val = abs(sub.det())
            if val > best:
                best = val
    return best


def bfrt_bound(m: int, max_a: int, max_b: int) -> float:
    """The small-solution bound m^{m/2} * M_A^{m-1} * max(M_A, M_b).

    Evaluated in binary64 for reporting; use ``bfrt_bound_ceiling`` for the
    exact integer comparison target.  By convention m = 0 (zero matrix)
    yields max(M_A, M_b).
    """
    if m < 0:
        raise DomainError("rank must be nonnegative")
    if m == 0:
        return float(max(max_a, max_b))
    if max_a < 1 or max_b < 0:
        raise DomainError("need M_A >= 1 and M_b >= 0")
    return math.pow(m, m / 2.0) * max_a ** (m - 1) * max(max_a, max_b)


def bfrt_bound_ceiling(m: int, max_a: int, max_b: int) -> int:
    """Exact ceil of the small-solution bound, via integer square root."""
    if m < 0:
        raise DomainError("rank must be nonnegative")
    if m == 0:
        return max(max_a, max_b)
    if max_a < 1 or max_b < 0:
        raise DomainError("need M_A >= 1 and M_b >= 0")
    k = max_a ** (m - 1) * max(max_a, max_b)
    squared = m ** m * k * k
    r = math.isqrt(squared)
    return r if r * r == squared else r + 1


@dataclass(frozen=True)
class BoundCertificate:
    """Record of the small-solution guarantee for one system A x = b.

    ``minor_max`` is the exact maximum |m x m minor| of (A | b) when minor
    enumeration fit in budget, else None.  ``solution`` is a minimal
    max-norm integer solution when the bounded search succeeded.
    ``hadamard_case`` records which side of max(M_A, M_b) attained the bound.
    """

    m: int
    max_a: int
    max_b: int
    hadamard_bound: float
    hadamard_bound_ceiling: int
    minor_max: Optional[int] = None
    solution: Optional[tuple[int, ...]] = None
    hadamard_case: str = "A_columns"
    degenerate_rank: bool = False

    def check(self) -> bool:
        """Exact verification of max|x_i| <= Y <= ceil(bound) where present."""
        if self.minor_max is not None and self.minor_max > self.hadamard_bound_ceiling:
            return False
        if self.solution is not None and self.minor_max is not None:
            sol_max = max((abs(x) for x in self.solution), default=0)
            if sol_max > self.minor_max:
                return False
        return True


def certify_small_solution(
    a: IntMatrix,
    b: Sequence[int],
    minor_budget: int = DEFAULT_MINOR_BUDGET,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Optional[BoundCertificate]:
    """Build a BoundCertificate for a solvable system; None if unsolvable."""
    m = rank(a)
    max_a = a.max_abs()
    max_b = max((abs(x) for x in b), default=0)
    if max_a == 0:
        # zero matrix: solvable iff b = 0
        if any(b):
            return None
        return BoundCertificate(
            m=0, max_a=0, max_b=max_b,
            hadamard_bound=float(max_b), hadamard_bound_ceiling=max_b,
            minor_max=None, solution=tuple([0] * a.cols),
            hadamard_case="b_column", degenerate_rank=True,
        )
    if smith_decomposition(a).solve(list(b)) is None:
        return None
    bound = bfrt_bound(m, max_a, max_b)
    bound_ceiling = bfrt_bound_ceiling(m, max_a, max_b)
    aug = IntMatrix.from_rows([row + [bi] for row, bi in zip(a.to_rows(), b)])
    try:
        minor_max: Optional[int] = max_minor_abs(aug, m, budget=minor_budget)
    except CapacityError:
        minor_max = None
    box = minor_max if minor_max is not None else bound_ceiling
    solution = solve_integer_small(a, b, box, node_budget=node_budget)
    return BoundCertificate(
        m=m,
        max_a=max_a,
        max_b=max_b,
        hadamard_bound=bound,
        hadamard_bound_ceiling=bound_ceiling,
        minor_max=minor_max,
        solution=None if solution is None else tuple(solution),
        hadamard_case="A_columns" if max_a >= max_b else "b_column",
        degenerate_rank=(m == 0),
    )


# ---------------------------------------------------------------------------
# Coset search: minimal max-norm representatives of x0 + ker(A)


def column_echelon_basis(cols: list[list[int]], n: int) -> tuple[list[list[int]], list[int]]:
    """Column-echelon form of a lattice basis via unimodular column ops.

    Returns (columns, pivot_rows); column j has its first nonzero (positive)
    entry at pivot_rows[j], strictly increasing.  The span is unchanged.
    """
    work = [c[:] for c in cols]
    t = 0
    for row in range(n):
        if t == len(work):
            break
        live = [j for j in range(t, len(work)) if work[j][row] != 0]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda j: (abs(work[j][row]), j))
            j0 = live[0]
            base = work[j0]
            pivot_val = base[row]
            for j in live[1:]:
                q = work[j][row] // pivot_val
                if q:
                    work[j] = [a - q * b for a, b in zip(work[j], base)]
            live = [j for j in live if work[j][row] != 0]
        j0 = live[0]
        work[t], work[j0] = work[j0], work[t]
        if work[t][row] < 0:
            work[t] = [-x for x in work[t]]
        t += 1
    pivots = []
    for col in work:
        p = next(i for i, x in enumerate(col) if x != 0)
        pivots.append(p)
    return work, pivots


def _greedy_reduce_maxnorm(x: list[int], cols: list[list[int]]) -> list[int]:
    """Shrink max-norm of x by integer shifts along kernel basis vectors."""
    x = x[:]
    if not cols:
        return x

    def score(v):
        return (max(abs(c) for c in v), sum(abs(c) for c in v))

    best = score(x)
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
            best_s = best
            for q in sorted(candidates):
                if q == 0:
                    continue
                trial = [xi - q * ci for xi, ci in zip(x, col)]
                s = score(trial)
                if s < best_s:
                    best_s = s
                    best_q = q
            if best_q:
                x = [xi - best_q * ci for xi, ci in zip(x, col)]
                best = best_s
                improved = True
    return x


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _maxnorm_coset_min(
    x0: list[int],
    kernel_cols: list[list[int]],
    box: int,
    node_budget: int,
) -> Optional[list[int]]:
    """Minimal (max-norm, l1, lexicographic) element of x0 + lattice, if any
    lies in the box [-box, box]^n.  Exact by iterative deepening."""
    n = len(x0)
    xr = _greedy_reduce_maxnorm(x0, kernel_cols)
    if not kernel_cols:
        return xr if max(map(abs, xr), default=0) <= box else None
    cols, pivots = column_echelon_basis(kernel_cols, n)
    r = len(cols)
    first_pivot = pivots[0]
    # rows above the first pivot cannot be changed by any lattice shift
    fixed_norm = max((abs(xr[i]) for i in range(first_pivot)), default=0)
    b_hi = min(box, max(map(abs, xr), default=0))
    if fixed_norm > box:
        return None

    nodes = 0
    next_pivot = pivots[1:] + [n]

    def search(bound: int) -> Optional[tuple[int, tuple[int, ...]]]:
        nonlocal nodes
        best: Optional[tuple[int, tuple[int, ...]]] = None

        def dfs(j: int, cur: list[int]):
            nonlocal best, nodes
            if j == r:
                cand = (sum(map(abs, cur)), tuple(cur))
                if best is None or cand < best:
                    best = cand
                return
            col = cols[j]
            p = pivots[j]
            hp = col[p]
            base = cur[p]
            t_lo = _ceil_div(-bound - base, hp)
            t_hi = (bound - base) // hp
            stop = next_pivot[j]
            for t in range(t_lo, t_hi + 1):
                nodes += 1
                if nodes > node_budget:
                    raise CapacityError(
                        f"coset search exceeded node budget {node_budget}"
                    )
                if t == 0:
                    nxt = cur
                else:
                    nxt = cur[:p] + [cur[i] + t * col[i] for i in range(p, len(cur))]
                if any(abs(nxt[i]) > bound for i in range(p, stop)):
                    continue
                dfs(j + 1, nxt)

        dfs(0, xr)
        return best

    for bound in range(fixed_norm, b_hi + 1):
        found = search(bound)
        if found is not None:
            return list(found[1])
    return None


def solve_integer_small(
    a: IntMatrix,
    b: Sequence[int],
    budget_box: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Optional[list[int]]:
    """Integer solution of A x = b minimizing max-norm, then l1, then
    lexicographic order; None iff no solution lies in [-budget_box, budget_box]^n.
    """
    if budget_box < 0:
        raise DomainError("budget_box must be nonnegative")
    snf = smith_decomposition(a)
    x0 = snf.solve(list(b))
    if x0 is None:
        return None
    kernel = snf.kernel_basis()
    if len(kernel) > 8:
        # fall back to direct box enumeration when it fits the budget
        width = 2 * budget_box + 1
        if width ** a.cols > node_budget:
            raise CapacityError(
                f"kernel dimension {len(kernel)} > 8 and box of size "
                f"{width}^{a.cols} exceeds the enumeration budget"
            )
        return _box_enumerate(a, list(b), budget_box)
    return _maxnorm_coset_min(x0, kernel, budget_box, node_budget)


def _box_enumerate(a: IntMatrix, b: list[int], box: int) -> Optional[list[int]]:
    best = None
    rng = range(-box, box + 1)
    for xs in itertools.product(rng, repeat=a.cols):
        if a.mul_vec(list(xs)) == b:
            cand = (max(map(abs, xs), default=0), sum(map(abs, xs)), xs)
            if best is None or cand < best:
                best = cand
    return None if best is None else list(best[2])

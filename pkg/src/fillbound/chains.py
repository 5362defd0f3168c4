"""Abstract simplicial complexes, integer chains, boundaries, and mass.

Vertices are contiguous integers 0..n0-1.  A k-simplex is stored as a
strictly increasing (k+1)-tuple; the lexicographic position of that tuple
within its dimension is the simplex index.  This fixes the orientation
convention and makes boundary matrices deterministic.

Chain coefficients are arbitrary-precision integers.  Simplex volumes
(weights) are binary64 floats and only ever enter mass computations, never
the integer algebra.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Optional, Sequence

from .errors import DomainError, StructuralError
from .intlin import IntMatrix


def sort_with_sign(vertices: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Sort a vertex tuple, returning (sorted tuple, permutation sign).

    Raises StructuralError on repeated vertices (not a simplex).
    """
    verts = list(vertices)
    if len(set(verts)) != len(verts):
        raise StructuralError(f"repeated vertex in simplex {tuple(vertices)}")
    sign = 1
    # insertion sort; counts inversions exactly
    for i in range(1, len(verts)):
        j = i
        while j > 0 and verts[j - 1] > verts[j]:
            verts[j - 1], verts[j] = verts[j], verts[j - 1]
            sign = -sign
            j -= 1
    return tuple(verts), sign


class SimplicialComplex:
    """Finite abstract simplicial complex, closed under faces.

    Use :meth:`from_simplices` for construction from arbitrary simplex
    iterables; the direct constructor expects canonical data and validates
    it strictly.
    """

    __slots__ = ("n_vertices", "_by_dim", "_index", "_memo")

    def __init__(self, n_vertices: int, simplices_by_dim: Mapping[int, Sequence[tuple[int, ...]]]):
        if n_vertices <= 0:
            raise StructuralError("complex needs at least one vertex")
        self.n_vertices = n_vertices
        by_dim: dict[int, tuple[tuple[int, ...], ...]] = {}
        for k in sorted(simplices_by_dim):
            if k < 1:
                raise StructuralError("simplices_by_dim keys start at dimension 1")
            simps = [tuple(s) for s in simplices_by_dim[k]]
            for s in simps:
                if len(s) != k + 1:
                    raise StructuralError(f"{s} is not a {k}-simplex")
                if any(not (0 <= v < n_vertices) for v in s):
                    raise StructuralError(f"vertex out of range in {s}")
                if any(s[i] >= s[i + 1] for i in range(len(s) - 1)):
                    raise StructuralError(f"simplex {s} is not strictly increasing")
            if len(set(simps)) != len(simps):
                raise StructuralError(f"duplicate {k}-simplices")
            if sorted(simps) != simps:
                raise StructuralError(f"{k}-simplices are not in lexicographic order")
            by_dim[k] = tuple(simps)
        self._by_dim = by_dim
        self._index = {
            k: {s: i for i, s in enumerate(simps)} for k, simps in by_dim.items()
        }
        self._memo: dict = {}
        self._check_closure()

    def _check_closure(self):
        for k in sorted(self._by_dim, reverse=True):
            if k == 1:
                continue
            lower = self._index.get(k - 1, {})
            for s in self._by_dim[k]:
                for j in range(len(s)):
                    face = s[:j] + s[j + 1:]
                    if face not in lower:
                        raise StructuralError(f"face {face} of {s} is missing")

    @classmethod
    def from_simplices(
        cls,
        simplices: Iterable[Sequence[int]],
        n_vertices: Optional[int] = None,
    ) -> "SimplicialComplex":
        """Build a complex from arbitrary simplices, closing under faces.

        Vertex order within the input tuples is ignored here; orientation
        matters only for chains.
        """
        collected: dict[int, set[tuple[int, ...]]] = {}
        max_vertex = -1
        for s in simplices:
            verts = tuple(sorted(set(s)))
            if len(verts) != len(tuple(s)):
                raise StructuralError(f"repeated vertex in simplex {tuple(s)}")
            if not verts:
                raise StructuralError("empty simplex")
            if verts[0] < 0:
                raise StructuralError(f"negative vertex id in {tuple(s)}")
            max_vertex = max(max_vertex, verts[-1])
            k = len(verts) - 1
            if k >= 1:
                collected.setdefault(k, set()).add(verts)
        if n_vertices is None:
            n_vertices = max_vertex + 1
        elif max_vertex >= n_vertices:
            raise StructuralError(
                f"vertex {max_vertex} out of range for n_vertices={n_vertices}"
            )
        if n_vertices <= 0:
            raise StructuralError("complex needs at least one vertex")
        # close under faces, top dimension downward
        for k in range(max(collected, default=0), 1, -1):
            lower = collected.setdefault(k - 1, set())
            for s in collected.get(k, ()):
                for j in range(len(s)):
                    lower.add(s[:j] + s[j + 1:])
        by_dim = {k: tuple(sorted(v)) for k, v in collected.items() if v}
        return cls(n_vertices, by_dim)

    @property
    def dimension(self) -> int:
        return max(self._by_dim, default=0)

    def simplices(self, k: int) -> tuple[tuple[int, ...], ...]:
        if k == 0:
            return tuple((v,) for v in range(self.n_vertices))
        return self._by_dim.get(k, ())

    def n_simplices(self, k: int) -> int:
        if k == 0:
            return self.n_vertices
        return len(self._by_dim.get(k, ()))

    def index_of(self, k: int, simplex: Sequence[int]) -> int:
        s = tuple(simplex)
        if k == 0:
            if len(s) == 1 and 0 <= s[0] < self.n_vertices:
                return s[0]
            raise StructuralError(f"{s} is not a vertex of the complex")
        try:
            return self._index[k][s]
        except KeyError:
            raise StructuralError(f"{s} is not a {k}-simplex of the complex") from None

    def has_simplex(self, k: int, simplex: Sequence[int]) -> bool:
        s = tuple(simplex)
        if k == 0:
            return len(s) == 1 and 0 <= s[0] < self.n_vertices
        return s in self._index.get(k, {})

    def __repr__(self) -> str:
        counts = ", ".join(f"n{k}={self.n_simplices(k)}" for k in sorted(self._by_dim))
        return f"SimplicialComplex(n0={self.n_vertices}, {counts})"


class Chain:
    """Sparse integer chain of a single dimension.

    Keys of ``coeffs`` are simplex indices within the ambient complex;
    values are nonzero integers.  Chains are value objects: arithmetic
    returns new instances.
    """

    __slots__ = ("dim", "_c")

    def __init__(self, dim: int, coeffs: Optional[Mapping[int, int]] = None):
        if dim < 0:
            raise StructuralError("chain dimension must be nonnegative")
        self.dim = dim
        clean: dict[int, int] = {}
        if coeffs:
            for idx, a in coeffs.items():
                if not isinstance(idx, int) or idx < 0:
                    raise StructuralError(f"bad simplex index {idx!r}")
                if not isinstance(a, int):
                    raise StructuralError(f"coefficient {a!r} is not an integer")
                if a != 0:
                    clean[idx] = a
        self._c = clean

    @classmethod
    def zero(cls, dim: int) -> "Chain":
        return cls(dim)

    def items(self):
        return self._c.items()

    def get(self, idx: int) -> int:
        return self._c.get(idx, 0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._c))

    def is_zero(self) -> bool:
        return not self._c

    def __add__(self, other: "Chain") -> "Chain":
        if self.dim != other.dim:
            raise StructuralError("cannot add chains of different dimensions")
        out = dict(self._c)
        for idx, a in other._c.items():
            s = out.get(idx, 0) + a
            if s:
                out[idx] = s
            else:
                out.pop(idx, None)
        res = Chain.__new__(Chain)
        res.dim = self.dim
        res._c = out
        return res

    def __neg__(self) -> "Chain":
        res = Chain.__new__(Chain)
        res.dim = self.dim
        res._c = {i: -a for i, a in self._c.items()}
        return res

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, n: int) -> "Chain":
        if not isinstance(n, int):
            raise StructuralError("scale factor must be an integer")
        if n == 0:
            return Chain(self.dim)
        res = Chain.__new__(Chain)
        res.dim = self.dim
        res._c = {i: n * a for i, a in self._c.items()}
        return res

    def __mul__(self, n: int) -> "Chain":
        return self.scale(n)

    __rmul__ = __mul__

    def max_abs(self) -> int:
        return max((abs(a) for a in self._c.values()), default=0)

    def l1(self) -> int:
        return sum(abs(a) for a in self._c.values())

    def to_vector(self, n: int) -> list[int]:
        vec = [0] * n
        for idx, a in self._c.items():
            if idx >= n:
                raise StructuralError(f"chain index {idx} out of range {n}")
            vec[idx] = a
        return vec

    @classmethod
    def from_vector(cls, dim: int, vec: Sequence[int]) -> "Chain":
        return cls(dim, {i: a for i, a in enumerate(vec) if a})

    def __eq__(self, other) -> bool:
        return isinstance(other, Chain) and self.dim == other.dim and self._c == other._c

    def __repr__(self) -> str:
        terms = ", ".join(f"{a}*s{i}" for i, a in sorted(self._c.items()))
        return f"Chain(dim={self.dim}, {terms or '0'})"


def chain_from_simplices(
    complex: SimplicialComplex,
    dim: int,
    terms: Iterable[tuple[Sequence[int], int]],
) -> Chain:
    """Build a chain from (vertex tuple, coefficient) pairs.

    Tuples given in non-increasing order are normalized; the coefficient is
    multiplied by the permutation sign.
    """
    acc: dict[int, int] = {}
    for verts, coeff in terms:
        if not isinstance(coeff, int):
            raise StructuralError(f"coefficient {coeff!r} is not an integer")
        if len(tuple(verts)) != dim + 1:
            raise StructuralError(f"{tuple(verts)} is not a {dim}-simplex")
        canon, sign = sort_with_sign(verts)
        idx = complex.index_of(dim, canon)
        acc[idx] = acc.get(idx, 0) + sign * coeff
    return Chain(dim, acc)


def _check_chain(complex: SimplicialComplex, c: Chain):
    n = complex.n_simplices(c.dim)
    for idx in c._c:
        if idx >= n:
            raise StructuralError(
                f"chain references {c.dim}-simplex {idx}, complex has {n}"
            )


def boundary(complex: SimplicialComplex, c: Chain) -> Chain:
    """Boundary with the alternating-sign convention.

    d[v0..vk] = sum_j (-1)^j [v0..v̂j..vk]; requires c.dim >= 1.
    """
    if c.dim < 1:
        raise DomainError("boundary of a 0-chain is undefined")
    _check_chain(complex, c)
    k = c.dim
    simps = complex.simplices(k)
    acc: dict[int, int] = {}
    for idx, a in c.items():
        s = simps[idx]
        sign = 1
        for j in range(len(s)):
            face = s[:j] + s[j + 1:]
            fidx = complex.index_of(k - 1, face)
            val = acc.get(fidx, 0) + sign * a
            if val:
                acc[fidx] = val
            else:
                acc.pop(fidx, None)
            sign = -sign
    return Chain(k - 1, acc)


def boundary_matrix(complex: SimplicialComplex, k: int) -> IntMatrix:
    """Matrix of the boundary operator from k-chains to (k-1)-chains.

    Shape n_{k-1} x n_k, entries in {0, +-1}; column j is the boundary of
    the j-th k-simplex in the canonical (lexicographic) bases.
    """
    if k < 1 or k > complex.dimension:
        raise DomainError(f"boundary matrix order {k} out of range")
    key = ("bmat", k)
    cached = complex._memo.get(key)
    if cached is not None:
        return cached
    n_rows = complex.n_simplices(k - 1)
    n_cols = complex.n_simplices(k)
    mat = IntMatrix.zeros(n_rows, n_cols)
    for j, s in enumerate(complex.simplices(k)):
        sign = 1
        for drop in range(len(s)):
            face = s[:drop] + s[drop + 1:]
            i = complex.index_of(k - 1, face)
            mat._m[i][j] = sign
            sign = -sign
    complex._memo[key] = mat
    return mat


def mass(weights: Sequence[float], c: Chain) -> float:
    """Weighted l1 norm: sum_i |a_i| * vol(sigma_i).

    ``weights`` are the volumes of all simplices of dimension c.dim, indexed
    like the canonical simplex order.  Zero iff the chain is zero.
    """
    total = 0.0
    for idx, a in c.items():
        if idx >= len(weights):
            raise StructuralError(f"no weight for simplex index {idx}")
        w = weights[idx]
        if not w > 0:
            raise DomainError(f"nonpositive weight {w} for simplex {idx}")
        total += abs(a) * w
    return total


def is_cycle(complex: SimplicialComplex, c: Chain) -> bool:
    """True iff the boundary of c vanishes; requires c.dim >= 1."""
    return boundary(complex, c).is_zero()


def complete_complex(n_vertices: int, dim: int) -> SimplicialComplex:
    """All simplices on n_vertices up to the given dimension."""
    simps = []
    for k in range(1, dim + 1):
        simps.extend(itertools.combinations(range(n_vertices), k + 1))
    return SimplicialComplex.from_simplices(simps, n_vertices=n_vertices)

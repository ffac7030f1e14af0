"""Linear algebra in the local ring at the origin via jet truncation.

A submodule N of O^r is probed through its images W_d in the jet spaces
O^r / m^(d+1) O^r. If m^d O^r lies in N + m^(d+1) O^r then Nakayama's lemma
gives m^d O^r in N, and the colength of N is the colength of W_(d-1). One
echelon form of W_D, with pivots taken at the lowest-degree column, yields the
ranks of every projection W_d (d <= D) at once.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

from .groebner import FreeModuleElement, as_elements, buchberger, ideal_intersection, syzygy_module
from .polyring import Polynomial, degrevlex_key

DEFAULT_MAX_JET = 32


class ContainmentCheckFailed(ValueError):
    """The smaller module of a subquotient is not contained in the larger one."""


@dataclass(frozen=True)
class ColengthResult:
    """Either a certified finite dimension or an undetermined verdict.

    ``value`` and ``degree`` (the Nakayama certificate degree) are set for
    finite verdicts; ``bound`` is the largest jet degree examined.
    """

    value: int | None
    degree: int | None
    bound: int

    @classmethod
    def undetermined(cls, bound: int) -> "ColengthResult":
        return cls(None, None, bound)

    @property
    def finite(self) -> bool:
        return self.value is not None

    def __int__(self):
        if self.value is None:
            raise ValueError("colength is undetermined")
        return self.value

    def __str__(self):
        if self.finite:
            return f"{self.value} (certificate degree {self.degree})"
        return f"undetermined up to jet degree {self.bound}"

    def to_json(self):
        return self.value if self.finite else "undetermined"


# ------------------------------------------------------------ jet spaces


@lru_cache(maxsize=None)
def monomials_by_degree(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponents of degree exactly d in n variables, degrevlex ascending."""
    if n == 0:
        return ((),) if d == 0 else ()
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + (left,))
            return
        for a in range(left, -1, -1):
            rec(prefix + (a,), left - a, slots - 1)

    rec((), d, n)
    return tuple(sorted(out, key=degrevlex_key))


def jet_dimension(n: int, d: int, rank: int = 1) -> int:
    return rank * comb(n + d, n)


class JetSpace:
    """Coordinates on O^rank / m^(D+1) O^rank.

    ``descending=False`` numbers columns low degree first (certificates);
    ``descending=True`` numbers the degrevlex-largest (monomial, position)
    first, so pivots are leading terms and non-pivots are standard monomials.
    """

    def __init__(self, n: int, rank: int, D: int, descending: bool = False):
        self.n, self.rank, self.D = n, rank, D
        cols = []
        for d in range(D + 1):
            for e in monomials_by_degree(n, d):
                for pos in range(rank):
                    cols.append((pos, e))
        if descending:
            cols.sort(key=lambda t: (sum(t[1]), degrevlex_key(t[1]), -t[0]), reverse=True)
        self.columns = cols
        self.index = {t: i for i, t in enumerate(cols)}
        self.degree = [sum(e) for _, e in cols]

    def __len__(self):
        return len(self.columns)

    def vector(self, terms: dict) -> dict[int, Fraction]:
        """Truncate a term map ``(pos, exp) -> coeff`` into coordinates."""
        idx = self.index
        D = self.D
        return {idx[t]: c for t, c in terms.items() if sum(t[1]) <= D}

    def shift(self, vec: dict[int, Fraction], j: int) -> dict[int, Fraction]:
        """Multiply by x_j and truncate."""
        out = {}
        cols, idx, D = self.columns, self.index, self.D
        for i, c in vec.items():
            pos, e = cols[i]
            if sum(e) >= D:
                continue
            m = list(e)
            m[j] += 1
            out[idx[(pos, tuple(m))]] = c
        return out


class Echelon:
    """Row echelon form over Q; the pivot of a row is its smallest column."""

    def __init__(self):
        self.rows: dict[int, dict[int, Fraction]] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict[int, Fraction], stop_at_free: bool = False) -> dict[int, Fraction]:
        """Eliminate pivot columns from ``vec`` in ascending column order.

        With ``stop_at_free`` the loop ends at the first column that carries
        no pivot, leaving higher columns unreduced.
        """
        v = dict(vec)
        heap = list(v)
        heapq.heapify(heap)
        queued = set(heap)
        rows = self.rows
        while heap:
            c = heapq.heappop(heap)
            queued.discard(c)
            a = v.get(c)
            if not a:
                continue
            row = rows.get(c)
            if row is None:
                if stop_at_free:
                    return v
                continue
            for j, b in row.items():
                s = v.get(j, 0) - a * b
                if s:
                    v[j] = s
                    if j not in queued:
                        queued.add(j)
                        heapq.heappush(heap, j)
                else:
                    v.pop(j, None)
        return v

    def insert(self, vec: dict[int, Fraction]) -> dict[int, Fraction] | None:
        """Add ``vec`` to the span; return the new normalised row or None if dependent."""
        v = self.reduce(vec, stop_at_free=True)
        if not v:
            return None
        p = min(v)
        inv = 1 / v[p]
        row = {j: c * inv for j, c in v.items()}
        self.rows[p] = row
        return row

    def pivots(self):
        return self.rows.keys()


def _vector_rank(vectors) -> int:
    ech = Echelon()
    for v in vectors:
        if v:
            ech.insert(v)
    return len(ech)


def _element_terms(gens) -> tuple[list[dict], int, int]:
    elems = as_elements(gens)
    rank = elems[0].rank
    n = len(elems[0].variables)
    return [g.to_terms() for g in elems if not g.is_zero()], rank, n


def jet_image(terms: list[dict], space: JetSpace) -> Echelon:
    """Echelon basis of the image of the generated submodule in ``space``.

    The image is the smallest subspace containing the truncated generators
    and closed under truncated multiplication by each variable.
    """
    ech = Echelon()
    queue = [space.vector(t) for t in terms]
    while queue:
        v = queue.pop()
        if not v:
            continue
        row = ech.insert(v)
        if row is None:
            continue
        for j in range(space.n):
            w = space.shift(row, j)
            if w:
                queue.append(w)
    return ech


def _levels(D_max: int):
    D = min(4, D_max)
    while True:
        yield D
        if D >= D_max:
            return
        D = min(2 * D, D_max)


def local_colength(gens: Sequence, D_max: int = DEFAULT_MAX_JET, rank: int | None = None) -> ColengthResult:
    """Dimension of O^r / N at the origin with a Nakayama certificate.

    Scans d = 1, 2, ... and returns ``Finite(c_(d-1), d)`` for the first d
    with m^d O^r in N + m^(d+1) O^r, where c_d is the colength of the image
    of N in O^r / m^(d+1) O^r.
    """
    if D_max < 1:
        raise ValueError("D_max must be >= 1")
    elems = as_elements(gens)
    if not elems:
        if rank is None:
            raise ValueError("rank required for an empty generator list")
        return ColengthResult.undetermined(D_max)
    terms, r, n = _element_terms(elems)
    if not terms:
        return ColengthResult.undetermined(D_max)
    for D in _levels(D_max):
        space = JetSpace(n, r, D)
        ech = jet_image(terms, space)
        per_degree = [0] * (D + 1)
        for p in ech.pivots():
            per_degree[space.degree[p]] += 1
        rank_d = 0
        prev = None
        for d in range(D + 1):
            rank_d += per_degree[d]
            c = jet_dimension(n, d, r) - rank_d
            if d >= 1 and c == prev:
                return ColengthResult(prev, d, D)
            prev = c
    return ColengthResult.undetermined(D_max)


def jet_nonmembership_degree(v, gens: Sequence, D_max: int = DEFAULT_MAX_JET) -> int | None:
    """Smallest d <= D_max with v not in N + m^(d+1) O^r, or None.

    A returned degree certifies v is not in N locally.
    """
    v = as_elements([v])[0]
    elems = as_elements(gens)
    terms = [g.to_terms() for g in elems if not g.is_zero()]
    r, n = v.rank, len(v.variables)
    target = v.to_terms()
    if not target:
        return None
    for D in _levels(D_max):
        space = JetSpace(n, r, D)
        ech = jet_image(terms, space)
        rest = ech.reduce(space.vector(target), stop_at_free=True)
        if rest:
            return space.degree[min(rest)]
    return None


# ---------------------------------------------------- quotient algebras


class QuotientAlgebraTable:
    """Monomial basis and reduction map of a finite quotient O^r / N.

    Because m^d O^r lies in N for the certificate degree d, every jet is
    reduced by truncating at degree d - 1 and eliminating against the image
    of N there.
    """

    def __init__(self, gens: Sequence, cert: ColengthResult):
        if not cert.finite:
            raise ValueError("quotient_basis needs a finite colength certificate")
        terms, r, n = _element_terms(gens)
        elems = as_elements(gens)
        self.variables = elems[0].variables
        self.rank = r
        self.certificate = cert
        L = cert.degree - 1
        self.space = JetSpace(n, r, L, descending=True)
        self.echelon = jet_image(terms, self.space)
        piv = self.echelon.pivots()
        free = [i for i in range(len(self.space)) if i not in piv]
        free.sort(reverse=True)  # ascending in degrevlex
        if len(free) != cert.value:
            raise ValueError(f"mismatched certificate: {len(free)} standard monomials, colength {cert.value}")
        self.basis = [self.space.columns[i] for i in free]
        self._slot = {i: k for k, i in enumerate(free)}

    def __len__(self):
        return len(self.basis)

    def basis_elements(self) -> list[FreeModuleElement]:
        out = []
        for pos, e in self.basis:
            comps = [Polynomial.zero(self.variables)] * self.rank
            comps[pos] = Polynomial.monomial(self.variables, e)
            out.append(FreeModuleElement(comps))
        return out

    def coordinates(self, v) -> tuple[Fraction, ...]:
        """Coordinates over the basis of the class of ``v``."""
        v = as_elements([v])[0]
        rest = self.echelon.reduce(self.space.vector(v.to_terms()))
        coords = [Fraction(0)] * len(self.basis)
        for i, c in rest.items():
            coords[self._slot[i]] = c
        return tuple(coords)

    def reduce(self, v) -> FreeModuleElement:
        """Canonical representative supported on the basis."""
        coords = self.coordinates(v)
        comps = [dict() for _ in range(self.rank)]
        for (pos, e), c in zip(self.basis, coords):
            if c:
                comps[pos][e] = c
        return FreeModuleElement([Polynomial(self.variables, t) for t in comps])


def quotient_basis(gens: Sequence, cert: ColengthResult) -> QuotientAlgebraTable:
    return QuotientAlgebraTable(gens, cert)


# -------------------------------------------------------- subquotients


def subquotient_dimension(U: Sequence, V: Sequence, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """dim_C (module generated by U) / (module generated by V) at the origin.

    Presents U/V as O^s / K with K = {a : sum a_i U_i in V}.
    """
    U = [u for u in as_elements(U) if not u.is_zero()]
    V = [v for v in as_elements(V) if not v.is_zero()]
    if not U:
        if V:
            raise ContainmentCheckFailed("nonzero V in the zero module")
        return ColengthResult(0, 0, 0)
    G = buchberger(U)
    for v in V:
        if not G.contains(v):
            raise ContainmentCheckFailed(f"{v!r} is not in the larger module")
    s = len(U)
    K = [FreeModuleElement(a.components[:s]) for a in syzygy_module(U + V)]
    K = [a for a in K if not a.is_zero()]
    if not K:
        return ColengthResult.undetermined(D_max)
    return local_colength(K, D_max)


# ------------------------------------------------------------------ Tor


def _matrix_rank(columns: list[list[Fraction]]) -> int:
    return _vector_rank({i: c for i, c in enumerate(col) if c} for col in columns)


def tor1_koszul(phi: Sequence[Polynomial], omega: Sequence[Polynomial], D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """dim Tor_1(O/<phi>, O/<omega>) from the Koszul complex of phi over A = O/<omega>."""
    k = len(phi)
    if k == 0:
        return ColengthResult(0, 0, 0)
    cert = local_colength(omega, D_max)
    if not cert.finite:
        return cert
    A = quotient_basis(omega, cert)
    B = [b[0] for b in A.basis_elements()]
    m = len(B)
    # d1: A^k -> A, columns indexed by (i, b)
    d1 = []
    for f in phi:
        for b in B:
            d1.append(list(A.coordinates(f * b)))
    rank1 = _matrix_rank(d1)
    # d2: A^C(k,2) -> A^k, e_ij -> phi_i e_j - phi_j e_i
    d2 = []
    for i, j in combinations(range(k), 2):
        for b in B:
            col = [Fraction(0)] * (k * m)
            for t, c in enumerate(A.coordinates(phi[i] * b)):
                col[j * m + t] += c
            for t, c in enumerate(A.coordinates(phi[j] * b)):
                col[i * m + t] -= c
            d2.append(col)
    rank2 = _matrix_rank(d2)
    return ColengthResult(k * m - rank1 - rank2, cert.degree, cert.bound)


def tor1_intersection(I: Sequence[Polynomial], J: Sequence[Polynomial], D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """dim (I ∩ J) / (I J) at the origin."""
    I = [f for f in I if not f.is_zero()]
    J = [g for g in J if not g.is_zero()]
    if not I or not J:
        return ColengthResult(0, 0, 0)
    products = [f * g for f in I for g in J]
    return subquotient_dimension(ideal_intersection(I, J), products, D_max)

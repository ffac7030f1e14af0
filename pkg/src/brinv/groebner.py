"""Buchberger's algorithm for ideals and submodules of free modules over Q[x].

Module elements are handled internally as sparse maps ``(position, exponent)
-> Fraction``. All orders here are global; localisation at the origin is left
to :mod:`brinv.local_algebra`, which is sound because syzygies, intersections
and kernels commute with localisation.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .polyring import DEGREVLEX, POT, MonomialOrder, PolyMatrix, Polynomial

Term = tuple[int, tuple[int, ...]]


class FreeModuleElement:
    """Element of a free module O^rank, stored as a tuple of polynomials."""

    __slots__ = ("components", "variables")

    def __init__(self, components: Sequence[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("free module element needs rank >= 1")
        variables = comps[0].variables
        if any(c.variables != variables for c in comps):
            raise ValueError("components live in different rings")
        self.components = comps
        self.variables = variables

    @property
    def rank(self) -> int:
        return len(self.components)

    @classmethod
    def unit(cls, variables, rank: int, i: int) -> "FreeModuleElement":
        comps = [Polynomial.zero(variables)] * rank
        comps[i] = Polynomial.constant(variables, 1)
        return cls(comps)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __add__(self, other: "FreeModuleElement"):
        return FreeModuleElement([a + b for a, b in zip(self.components, other.components, strict=True)])

    def __sub__(self, other: "FreeModuleElement"):
        return FreeModuleElement([a - b for a, b in zip(self.components, other.components, strict=True)])

    def scale(self, f) -> "FreeModuleElement":
        return FreeModuleElement([f * c for c in self.components])

    def __eq__(self, other):
        return isinstance(other, FreeModuleElement) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"

    def to_terms(self) -> dict[Term, Fraction]:
        out = {}
        for pos, comp in enumerate(self.components):
            for e, c in comp.items():
                out[(pos, e)] = c
        return out

    @classmethod
    def from_terms(cls, variables, rank: int, terms: dict) -> "FreeModuleElement":
        buckets: list[dict] = [{} for _ in range(rank)]
        for (pos, e), c in terms.items():
            buckets[pos][e] = c
        return cls([Polynomial._raw(tuple(variables), b) for b in buckets])


def as_elements(gens: Iterable) -> list[FreeModuleElement]:
    """Accept polynomials (rank 1) or free module elements."""
    out = []
    for g in gens:
        out.append(FreeModuleElement([g]) if isinstance(g, Polynomial) else g)
    return out


# ------------------------------------------------------------ internals


def _flat_key(order: MonomialOrder):
    """Flat integer key on (pos, exponent); larger means larger term."""
    if order.kind == "pot":
        def key(t):
            pos, e = t
            return (-pos, sum(e), *(-a for a in reversed(e)))
    elif order.kind == "elimination":
        m = order.block

        def key(t):
            pos, e = t
            a, b = e[:m], e[m:]
            return (sum(a), *(-x for x in reversed(a)), sum(b), *(-x for x in reversed(b)), -pos)
    else:
        def key(t):
            pos, e = t
            return (sum(e), *(-a for a in reversed(e)), -pos)
    return key


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _quot(big, small):
    return tuple(x - y for x, y in zip(big, small))


class _Elem:
    __slots__ = ("terms", "lt", "lc")

    def __init__(self, terms: dict, key):
        self.terms = terms
        self.lt = max(terms, key=key)
        self.lc = terms[self.lt]


def _shift_scale(terms: dict, e, c) -> dict:
    return {(pos, tuple(a + b for a, b in zip(m, e))): v * c for (pos, m), v in terms.items()}


def _reduce(terms: dict, basis: list[_Elem], key, full: bool = True) -> dict:
    """Normal form of ``terms`` modulo ``basis``; top-reduction only if ``full`` is False."""
    p = dict(terms)
    if not p:
        return p
    rem: dict = {}
    heap = [tuple(-k for k in key(t)) + (i,) for i, t in enumerate(p)]
    ids = {t: h[-1] for t, h in zip(p, heap)}
    by_id = {i: t for t, i in ids.items()}
    heapq.heapify(heap)
    next_id = len(ids)
    while heap:
        item = heapq.heappop(heap)
        t = by_id.pop(item[-1])
        del ids[t]
        c = p.pop(t, None)
        if not c:
            continue
        pos, e = t
        red = None
        for g in basis:
            gp, ge = g.lt
            if gp == pos and _divides(ge, e):
                red = g
                break
        if red is None:
            if not full:
                rem[t] = c
                rem.update(p)
                return rem
            rem[t] = c
            continue
        q = _quot(e, red.lt[1])
        f = c / red.lc
        for (gp, ge), gc in red.terms.items():
            if (gp, ge) == red.lt:
                continue
            nt = (gp, tuple(a + b for a, b in zip(ge, q)))
            v = p.get(nt, 0) - f * gc
            if v:
                p[nt] = v
                if nt not in ids:
                    ids[nt] = next_id
                    by_id[next_id] = nt
                    heapq.heappush(heap, tuple(-k for k in key(nt)) + (next_id,))
                    next_id += 1
            else:
                p.pop(nt, None)
    return rem


def _s_vector(f: _Elem, g: _Elem) -> dict:
    lcm = _lcm(f.lt[1], g.lt[1])
    a = _shift_scale(f.terms, _quot(lcm, f.lt[1]), 1 / f.lc)
    b = _shift_scale(g.terms, _quot(lcm, g.lt[1]), 1 / g.lc)
    for t, v in b.items():
        s = a.get(t, 0) - v
        if s:
            a[t] = s
        else:
            a.pop(t, None)
    return a


def _buchberger_terms(gens: list[dict], key, rank_one: bool) -> list[_Elem]:
    basis: list[_Elem] = []
    pairs: list = []
    live: set = set()

    def add(terms):
        g = _Elem(terms, key)
        j = len(basis)
        basis.append(g)
        for i in range(j):
            h = basis[i]
            if h is None or h.lt[0] != g.lt[0]:
                continue
            lcm = _lcm(h.lt[1], g.lt[1])
            heapq.heappush(pairs, (sum(lcm), i, j))
            live.add((i, j))

    for t in gens:
        r = _reduce(t, [b for b in basis if b is not None], key)
        if r:
            add(r)

    while pairs:
        _, i, j = heapq.heappop(pairs)
        if (i, j) not in live:
            continue
        live.discard((i, j))
        f, g = basis[i], basis[j]
        lcm = _lcm(f.lt[1], g.lt[1])
        if rank_one and all(min(a, b) == 0 for a, b in zip(f.lt[1], g.lt[1])):
            continue
        # chain criterion
        skip = False
        for k, h in enumerate(basis):
            if k in (i, j) or h.lt[0] != f.lt[0] or not _divides(h.lt[1], lcm):
                continue
            if (min(i, k), max(i, k)) not in live and (min(j, k), max(j, k)) not in live:
                skip = True
                break
        if skip:
            continue
        r = _reduce(_s_vector(f, g), basis, key)
        if r:
            add(r)
    return basis


def _reduced(basis: list[_Elem], key) -> list[_Elem]:
    basis = sorted(basis, key=lambda g: key(g.lt))
    minimal: list[_Elem] = []
    for idx, g in enumerate(basis):
        redundant = False
        for h in basis[:idx]:
            if h.lt[0] == g.lt[0] and _divides(h.lt[1], g.lt[1]):
                redundant = True
                break
        if not redundant:
            minimal.append(g)
    out = []
    for g in minimal:
        others = [h for h in minimal if h is not g]
        head = {g.lt: g.lc}
        tail = {t: c for t, c in g.terms.items() if t != g.lt}
        tail = _reduce(tail, others, key)
        terms = {t: c / g.lc for t, c in {**head, **tail}.items()}
        out.append(_Elem(terms, key))
    return out


# -------------------------------------------------------------- public


@dataclass
class GroebnerBasis:
    """Reduced Gröbner basis of a submodule of O^rank (rank 1 for ideals)."""

    generators: list[FreeModuleElement]
    order: MonomialOrder
    rank: int
    variables: tuple
    reduced: bool = True
    _elems: list = field(default=None, repr=False)

    def polynomials(self) -> list[Polynomial]:
        if self.rank != 1:
            raise ValueError("not an ideal basis")
        return [g[0] for g in self.generators]

    def leading_terms(self) -> list[Term]:
        return [g.lt for g in self._elems]

    def normal_form(self, v) -> FreeModuleElement:
        return normal_form(v, self)

    def contains(self, v) -> bool:
        return normal_form(v, self).is_zero()

    def is_unit(self) -> bool:
        return any(lt[1] == (0,) * len(self.variables) for lt in self.leading_terms())


def buchberger(gens: Sequence, order: MonomialOrder | None = None) -> GroebnerBasis:
    """Reduced Gröbner basis of the submodule generated by ``gens``.

    ``gens`` may be polynomials (ideal case) or :class:`FreeModuleElement`
    of a common rank. Pairs are processed lowest lcm degree first, ties by
    index. Ideals default to degrevlex, modules to position-over-term.
    """
    elems = as_elements(gens)
    if not elems:
        raise ValueError("buchberger needs at least one generator")
    rank = elems[0].rank
    variables = elems[0].variables
    if any(g.rank != rank or g.variables != variables for g in elems):
        raise ValueError("generators have different rank or ring")
    if order is None:
        order = DEGREVLEX if rank == 1 else POT
    key = _flat_key(order)
    raw = _buchberger_terms([g.to_terms() for g in elems], key, rank == 1)
    red = _reduced(raw, key)
    # ascending degree, then descending in the order
    red.sort(key=lambda g: (sum(g.lt[1]), tuple(-k for k in key(g.lt))))
    out = [FreeModuleElement.from_terms(variables, rank, g.terms) for g in red]
    return GroebnerBasis(out, order, rank, variables, True, red)


def normal_form(v, G: GroebnerBasis) -> FreeModuleElement:
    """Fully reduced remainder of ``v`` modulo ``G``."""
    if isinstance(v, Polynomial):
        v = FreeModuleElement([v])
    if v.rank != G.rank or v.variables != G.variables:
        raise ValueError("element incompatible with basis")
    key = _flat_key(G.order)
    r = _reduce(v.to_terms(), G._elems, key)
    return FreeModuleElement.from_terms(G.variables, G.rank, r)


def s_vectors_reduce_to_zero(G: GroebnerBasis) -> bool:
    """Buchberger's criterion checked over every pair of the basis."""
    key = _flat_key(G.order)
    els = G._elems
    for i in range(len(els)):
        for j in range(i + 1, len(els)):
            if els[i].lt[0] != els[j].lt[0]:
                continue
            if _reduce(_s_vector(els[i], els[j]), els, key):
                return False
    return True


def _dedupe(elems: Iterable[FreeModuleElement]) -> list[FreeModuleElement]:
    seen = set()
    out = []
    for e in elems:
        if e.is_zero() or e in seen:
            continue
        seen.add(e)
        out.append(e)
    return out


def syzygy_module(gens: Sequence) -> list[FreeModuleElement]:
    """Generators of the relations among ``gens``.

    Runs Buchberger on the tagged elements (g_i, e_i) in O^r + O^s with a
    position-over-term order that eliminates the first r positions, and
    keeps the tag parts of basis elements whose first block vanishes.
    """
    elems = as_elements(gens)
    if not elems:
        raise ValueError("syzygy_module needs at least one generator")
    r = elems[0].rank
    s = len(elems)
    variables = elems[0].variables
    tagged = []
    for i, g in enumerate(elems):
        t = g.to_terms()
        t[(r + i, (0,) * len(variables))] = Fraction(1)
        tagged.append(t)
    key = _flat_key(POT)
    basis = _reduced(_buchberger_terms(tagged, key, False), key)
    basis.sort(key=lambda g: (sum(g.lt[1]), tuple(-k for k in key(g.lt))))
    out = []
    for g in basis:
        if g.lt[0] < r:
            continue
        tag = {(pos - r, e): c for (pos, e), c in g.terms.items()}
        out.append(FreeModuleElement.from_terms(variables, s, tag))
    return out


def combine(coeffs: FreeModuleElement | Sequence[Polynomial], gens: Sequence) -> FreeModuleElement:
    """Sum of coeffs[i] * gens[i]."""
    elems = as_elements(gens)
    acc = [Polynomial.zero(elems[0].variables)] * elems[0].rank
    for a, g in zip(coeffs, elems, strict=True):
        if a.is_zero():
            continue
        acc = [x + a * y for x, y in zip(acc, g.components)]
    return FreeModuleElement(acc)


def ideal_intersection(I: Sequence[Polynomial], J: Sequence[Polynomial]) -> list[Polynomial]:
    """Generators of I ∩ J from the syzygies of the concatenated list."""
    if not I or not J:
        raise ValueError("ideal_intersection needs two nonempty generator lists")
    syz = syzygy_module(list(I) + list(J))
    out = []
    for a in syz:
        v = combine(a.components[: len(I)], I)[0]
        if not v.is_zero():
            out.append(v)
    return [e[0] for e in _dedupe(FreeModuleElement([p]) for p in out)]


def kernel_mod_ideal(M: PolyMatrix, I: Sequence[Polynomial]) -> list[FreeModuleElement]:
    """Generators of {v in O^m : M v in I O^k}."""
    k, m = M.nrows, M.ncols
    variables = M.variables
    if k == 0:
        return [FreeModuleElement.unit(variables, m, j) for j in range(m)]
    gens = [FreeModuleElement(M.column(j)) for j in range(m)]
    zero = Polynomial.zero(variables)
    for f in I:
        if f.is_zero():
            continue
        for l in range(k):
            comps = [zero] * k
            comps[l] = f
            gens.append(FreeModuleElement(comps))
    syz = syzygy_module(gens)
    return _dedupe(FreeModuleElement(a.components[:m]) for a in syz)


def module_product(M: PolyMatrix, v: FreeModuleElement) -> FreeModuleElement:
    """Matrix-vector product M v."""
    return FreeModuleElement(
        [sum((a * b for a, b in zip(row, v.components)), Polynomial.zero(M.variables)) for row in M.rows]
    )

"""Exact multivariate polynomials over Q, monomial orders, Jacobians and minors."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]


# ---------------------------------------------------------------- orders


def degrevlex_key(e: Exponent) -> tuple:
    """Sort key: larger key means larger monomial in degree reverse lex."""
    return (sum(e), tuple(-a for a in reversed(e)))


def elimination_key(m: int):
    """Block order: degrevlex on the first ``m`` variables, ties by degrevlex on the rest."""

    def key(e: Exponent) -> tuple:
        return degrevlex_key(e[:m]) + degrevlex_key(e[m:])

    return key


def pot_key(pos: int, e: Exponent) -> tuple:
    """Position-over-term on free modules; lower positions are larger."""
    return (-pos, degrevlex_key(e))


class MonomialOrder:
    """A named global monomial order.

    ``kind`` is one of ``"degrevlex"``, ``"elimination"`` (with ``block``
    set to the number of eliminated leading variables) or ``"pot"``.
    """

    __slots__ = ("kind", "block")

    def __init__(self, kind: str = "degrevlex", block: int = 0):
        if kind not in ("degrevlex", "elimination", "pot"):
            raise ValueError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.block = block

    def key(self, e: Exponent) -> tuple:
        if self.kind == "elimination":
            return elimination_key(self.block)(e)
        return degrevlex_key(e)

    def module_key(self, pos: int, e: Exponent) -> tuple:
        if self.kind == "pot":
            return pot_key(pos, e)
        # term-over-position for the scalar orders
        return (self.key(e), -pos)

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.kind, self.block) == (other.kind, other.block)

    def __hash__(self):
        return hash((self.kind, self.block))

    def __repr__(self):
        if self.kind == "elimination":
            return f"MonomialOrder('elimination', block={self.block})"
        return f"MonomialOrder({self.kind!r})"


DEGREVLEX = MonomialOrder("degrevlex")
POT = MonomialOrder("pot")


# ----------------------------------------------------------- polynomials


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


class Polynomial:
    """Immutable polynomial with rational coefficients in a fixed variable list.

    Terms map exponent tuples to nonzero :class:`~fractions.Fraction`
    coefficients. Two polynomials are equal when they share the variable
    list and have identical term maps.
    """

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, object] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n or any(a < 0 for a in e):
                    raise ValueError(f"bad exponent {e} for {n} variables")
                c = _coerce(c)
                if c:
                    clean[e] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, variables: tuple, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        p.variables = variables
        p._terms = terms
        p._hash = None
        return p

    # construction helpers

    @classmethod
    def zero(cls, variables):
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, variables, c):
        variables = tuple(variables)
        c = _coerce(c)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def monomial(cls, variables, e: Exponent, c=1):
        variables = tuple(variables)
        c = _coerce(c)
        return cls._raw(variables, {tuple(e): c} if c else {})

    @classmethod
    def var(cls, variables, i: int):
        variables = tuple(variables)
        e = [0] * len(variables)
        e[i] = 1
        return cls._raw(variables, {tuple(e): Fraction(1)})

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        """A copy of the term map."""
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def order(self) -> int:
        """Lowest total degree of a term; -1 for zero."""
        return min((sum(e) for e in self._terms), default=-1)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def sorted_terms(self, order: MonomialOrder = DEGREVLEX):
        """Terms in descending order."""
        return sorted(self._terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = DEGREVLEX):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self._terms.items(), key=lambda t: order.key(t[0]))

    def truncate(self, d: int) -> "Polynomial":
        """Drop every term of total degree > d."""
        return Polynomial._raw(self.variables, {e: c for e, c in self._terms.items() if sum(e) <= d})

    # arithmetic

    def _check(self, other: "Polynomial"):
        if self.variables != other.variables:
            raise ValueError(f"ring mismatch: {self.variables} vs {other.variables}")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.variables, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Polynomial.zero(self.variables)
            return Polynomial._raw(self.variables, {e: c * other for e, c in self._terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_monomial(self, e: Exponent, c=1) -> "Polynomial":
        c = _coerce(c)
        if not c:
            return Polynomial.zero(self.variables)
        return Polynomial._raw(
            self.variables,
            {tuple(a + b for a, b in zip(m, e)): v * c for m, v in self._terms.items()},
        )

    def diff(self, i: int) -> "Polynomial":
        """Formal partial derivative with respect to variable ``i``."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                m = list(e)
                m[i] -= 1
                out[tuple(m)] = c * e[i]
        return Polynomial._raw(self.variables, out)

    def __call__(self, *point):
        """Evaluate at a point of rationals."""
        if len(point) != self.nvars:
            raise ValueError("wrong number of coordinates")
        total = Fraction(0)
        for e, c in self._terms.items():
            v = c
            for x, a in zip(point, e):
                if a:
                    v *= Fraction(x) ** a
            total += v
        return total

    # comparison and printing

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.variables, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.variables == other.variables and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r}, {list(self.variables)})"


def _format_monomial(e: Exponent, variables) -> str:
    parts = []
    for name, a in zip(variables, e):
        if a == 1:
            parts.append(name)
        elif a > 1:
            parts.append(f"{name}^{a}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    """Canonical text, terms in degrevlex-descending order; parses back to ``p``."""
    if p.is_zero():
        return "0"
    out = []
    for idx, (e, c) in enumerate(p.sorted_terms()):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        mono = _format_monomial(e, p.variables)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if idx == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# ----------------------------------------------------------------- parser


class ParseError(ValueError):
    """Syntax error or unknown variable in polynomial text."""

    def __init__(self, message: str, pos: int, src: str = ""):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.src = src


class _Parser:
    # expr := ['+'|'-'] term (('+'|'-') term)*
    # term := factor ('*' factor)*
    # factor := base ('^' nat)?
    # base := rational | var | '(' expr ')'

    def __init__(self, src: str, variables: Sequence[str]):
        self.src = src
        self.variables = tuple(variables)
        self.index = {v: i for i, v in enumerate(self.variables)}
        self.tokens = self._tokenize(src)
        self.k = 0

    def _tokenize(self, src):
        toks = []
        i = 0
        while i < len(src):
            ch = src[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit():
                j = i
                while j < len(src) and src[j].isdigit():
                    j += 1
                toks.append(("int", int(src[i:j]), i))
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                    j += 1
                toks.append(("name", src[i:j], i))
                i = j
            elif ch in "+-*/^()":
                toks.append((ch, ch, i))
                i += 1
            else:
                raise ParseError(f"unexpected character {ch!r}", i, src)
        toks.append(("end", None, len(src)))
        return toks

    def peek(self):
        return self.tokens[self.k]

    def take(self, kind=None):
        tok = self.tokens[self.k]
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "end" else repr(kind)
            raise ParseError(f"expected {want}, found {tok[1]!r}", tok[2], self.src)
        self.k += 1
        return tok

    def parse(self) -> Polynomial:
        p = self.expr()
        self.take("end")
        return p

    def expr(self):
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term() * sign
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self):
        b = self.base()
        if self.peek()[0] == "^":
            self.take()
            b = b ** self.take("int")[1]
        return b

    def base(self):
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            num = val
            if self.peek()[0] == "/":
                self.take()
                den_tok = self.take("int")
                if den_tok[1] == 0:
                    raise ParseError("zero denominator", den_tok[2], self.src)
                return Polynomial.constant(self.variables, Fraction(num, den_tok[1]))
            return Polynomial.constant(self.variables, num)
        if kind == "name":
            self.take()
            if val not in self.index:
                raise ParseError(f"unknown variable {val!r}", pos, self.src)
            return Polynomial.var(self.variables, self.index[val])
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"expected number, variable or '(', found {found}", pos, self.src)


def parse_polynomial(src: str, variables: Sequence[str]) -> Polynomial:
    """Parse polynomial text such as ``"x^3 - 2/3*y^2"``.

    Implicit multiplication is rejected; a leading sign is accepted so that
    canonical printed output parses back.
    """
    return _Parser(src, variables).parse()


def parse_polynomials(src: str, variables: Sequence[str]) -> list[Polynomial]:
    """Parse a comma-separated list of polynomials."""
    out = []
    offset = 0
    for chunk in src.split(","):
        try:
            out.append(parse_polynomial(chunk, variables))
        except ParseError as exc:
            raise ParseError(str(exc).rsplit(" at position", 1)[0], exc.pos + offset, src) from None
        offset += len(chunk) + 1
    return out


# ----------------------------------------------------------- derivatives


def partial_derivative(f: Polynomial, i: int) -> Polynomial:
    return f.diff(i)


class PolyMatrix:
    """Rectangular matrix of polynomials sharing one variable list."""

    __slots__ = ("variables", "rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[Polynomial]], ncols: int | None = None, variables=None):
        rows = [tuple(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix without rows")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("matrix rows have unequal length")
        if variables is None:
            if not rows or not ncols:
                raise ValueError("variables required for an empty matrix")
            variables = rows[0][0].variables
        variables = tuple(variables)
        for r in rows:
            for p in r:
                if p.variables != variables:
                    raise ValueError("matrix entries live in different rings")
        self.variables = variables
        self.rows = tuple(rows)
        self.nrows = len(rows)
        self.ncols = ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> list[Polynomial]:
        return [r[j] for r in self.rows]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.rows == other.rows and self.ncols == other.ncols

    def __repr__(self):
        body = "; ".join(", ".join(str(p) for p in r) for r in self.rows)
        return f"PolyMatrix({self.nrows}x{self.ncols}: [{body}])"


def jacobian_matrix(phi: Sequence[Polynomial], variables: Sequence[str] | None = None) -> PolyMatrix:
    """k x n matrix of partials d(phi_i)/d(x_j)."""
    if variables is None:
        if not phi:
            raise ValueError("variables required when phi is empty")
        variables = phi[0].variables
    variables = tuple(variables)
    if not variables:
        raise ValueError("empty variable list")
    n = len(variables)
    return PolyMatrix([[f.diff(j) for j in range(n)] for f in phi], ncols=n, variables=variables)


def bordered_matrix(omega: Sequence[Polynomial], dphi: PolyMatrix) -> PolyMatrix:
    """Stack the row ``omega`` on top of ``dphi``."""
    if len(omega) != dphi.ncols:
        raise ValueError(f"1-form has {len(omega)} components, matrix has {dphi.ncols} columns")
    return PolyMatrix([tuple(omega), *dphi.rows], ncols=dphi.ncols, variables=dphi.variables)


def determinant(rows: Sequence[Sequence[Polynomial]], variables) -> Polynomial:
    """Laplace expansion along the first row, sign (-1)^(1+j)."""
    size = len(rows)
    if size == 0:
        return Polynomial.constant(variables, 1)
    cache: dict[tuple, Polynomial] = {}

    def det(r0: int, cols: tuple) -> Polynomial:
        if r0 == size - 1:
            return rows[r0][cols[0]]
        key = (r0, cols)
        if key in cache:
            return cache[key]
        acc = Polynomial.zero(variables)
        for pos, c in enumerate(cols):
            entry = rows[r0][c]
            if entry.is_zero():
                continue
            sub = det(r0 + 1, cols[:pos] + cols[pos + 1:])
            term = entry * sub
            acc = acc - term if pos % 2 else acc + term
        cache[key] = acc
        return acc

    return det(0, tuple(range(size)))


def minors_ideal(M: PolyMatrix, r: int) -> list[Polynomial]:
    """All r x r minors, ordered by (row set, column set) lexicographically."""
    if r < 0 or r > min(M.nrows, M.ncols):
        raise ValueError(f"minor size {r} exceeds matrix dimensions {M.nrows}x{M.ncols}")
    out = []
    for rs in combinations(range(M.nrows), r):
        for cs in combinations(range(M.ncols), r):
            sub = [[M.rows[i][j] for j in cs] for i in rs]
            out.append(determinant(sub, M.variables))
    return out

import random
from itertools import product

import pytest
import sympy

from brinv.groebner import FreeModuleElement
from brinv.local_algebra import (
    ColengthResult,
    ContainmentCheckFailed,
    jet_nonmembership_degree,
    local_colength,
    quotient_basis,
    subquotient_dimension,
    tor1_intersection,
    tor1_koszul,
)
from brinv.polyring import Polynomial, format_polynomial, parse_polynomial

XY = ["x", "y"]
XYZ = ["x", "y", "z"]


def P(s, v=XY):
    return parse_polynomial(s, v)


def Ps(s, v=XY):
    return [P(t, v) for t in s.split(",")]


class TestColength:
    def test_maximal_ideal(self):
        assert local_colength(Ps("x, y")) == ColengthResult(1, 1, 4)

    def test_unit_factor_is_local(self):
        # 1 + x is a unit at the origin; a global count would give 3
        res = local_colength([parse_polynomial("x^2 + x^3", ["x"])])
        assert res.value == 2

    def test_cusp_pair(self):
        assert local_colength(Ps("x^3 - y^2, x*y, y^3")).value == 5

    def test_not_zero_dimensional(self):
        res = local_colength(Ps("x, x"), D_max=10)
        assert not res.finite and res.bound == 10

    def test_unit_ideal(self):
        assert local_colength(Ps("1 + x")).value == 0

    def test_local_point_only(self):
        # V(x(1-x), y) has a point away from the origin; only the origin counts
        assert local_colength(Ps("x - x^2, y")).value == 1

    def test_module(self):
        gens = [FreeModuleElement([P("x"), P("0")]), FreeModuleElement([P("y"), P("0")]),
                FreeModuleElement([P("0"), P("x^2")]), FreeModuleElement([P("0"), P("y")])]
        assert local_colength(gens).value == 3

    def test_certificate_stability(self):
        gens = Ps("x^3 - y^2, x*y")
        res = local_colength(gens)
        again = local_colength(gens, D_max=res.degree + 1)
        assert again.value == res.value and again.degree == res.degree


def staircase_count(gens_exps, n):
    bound = max(max(e) for e in gens_exps) + 1
    count = 0
    for e in product(range(bound), repeat=n):
        if not any(all(a >= b for a, b in zip(e, g)) for g in gens_exps):
            count += 1
    return count


def random_monomial_ideal(rng):
    n = rng.randint(1, 3)
    exps = []
    for i in range(n):
        e = [0] * n
        e[i] = rng.randint(1, 5)
        exps.append(tuple(e))
    for _ in range(rng.randint(0, 4)):
        exps.append(tuple(rng.randint(0, 4) for _ in range(n)))
    exps = [e for e in exps if any(e)]
    return n, exps


def test_monomial_ideals_match_staircase():
    rng = random.Random(20261016)
    names = ["x", "y", "z"]
    for _ in range(50):
        n, exps = random_monomial_ideal(rng)
        variables = names[:n]
        gens = [Polynomial.monomial(variables, e) for e in exps]
        assert local_colength(gens).value == staircase_count(exps, n), exps


def standard_monomial_count(gens, variables):
    """Global count via sympy's Gröbner basis (independent engine)."""
    syms = sympy.symbols(variables)
    exprs = [sympy.sympify(format_polynomial(g).replace("^", "**")) for g in gens]
    G = sympy.groebner(exprs, *syms, order="grevlex")
    lead = [sympy.Poly(g, *syms).monoms(order="grevlex")[0] for g in G.exprs]
    bound = max(max(m) for m in lead) + 1
    return sum(
        1 for e in product(range(bound), repeat=len(syms))
        if not any(all(a >= b for a, b in zip(e, m)) for m in lead)
    )


@pytest.mark.parametrize(
    "gens,variables",
    [
        ("x^2 + y^2, x*y", XY),
        ("x^3 - y^3, x^2*y", XY),
        ("3*x^2 + 2*x*y, y^3 - x^2*y", XY),
        ("x^2 + y*z, y^2 + x*z, z^2 + x*y", XYZ),
        ("x*y, y*z, x*z, x^2 + y^2 + z^2", XYZ),
    ],
)
def test_homogeneous_local_equals_global(gens, variables):
    polys = Ps(gens, variables)
    assert local_colength(polys).value == standard_monomial_count(polys, variables)


class TestQuotientBasis:
    def test_maximal_ideal(self):
        gens = Ps("x, y")
        A = quotient_basis(gens, local_colength(gens))
        assert A.basis == [(0, (0, 0))]
        assert A.coordinates(P("3 + x - y^2")) == (3,)

    def test_staircase(self):
        gens = Ps("x, y^2")
        A = quotient_basis(gens, local_colength(gens))
        assert A.basis == [(0, (0, 0)), (0, (0, 1))]
        y = P("y")
        assert A.reduce(y * y).is_zero()

    def test_reduction_linear_and_idempotent(self):
        gens = Ps("x^3 - y^2, x*y")
        A = quotient_basis(gens, local_colength(gens))
        assert len(A) == 5
        for g in gens:
            assert all(c == 0 for c in A.coordinates(g))
        f, g = P("x^2 + 2*y + x^4*y"), P("1 - x*y^2 + y^2")
        assert A.coordinates(f + g) == tuple(a + b for a, b in zip(A.coordinates(f), A.coordinates(g)))
        r = A.reduce(f)
        assert A.reduce(r[0]) == r

    def test_mismatched_certificate(self):
        gens = Ps("x, y^2")
        with pytest.raises(ValueError):
            quotient_basis(gens, ColengthResult(3, 2, 2))


class TestSubquotient:
    def test_principal_by_maximal(self):
        phi = P("x^3 - y^2")
        assert subquotient_dimension([phi], [P("x") * phi, P("y") * phi]).value == 1

    def test_equal_modules(self):
        U = Ps("x^2, y")
        assert subquotient_dimension(U, U).value == 0

    def test_x_over_xm(self):
        assert subquotient_dimension(Ps("x"), Ps("x^2, x*y")).value == 1

    def test_containment_failure(self):
        with pytest.raises(ContainmentCheckFailed):
            subquotient_dimension(Ps("x"), Ps("y"))


class TestTor:
    def test_koszul_annihilator(self):
        x = parse_polynomial("x", ["x"])
        assert tor1_koszul([x], [x]).value == 1

    def test_cusp_both_routes(self):
        phi, omega = Ps("x^3 - y^2"), Ps("y, x")
        assert tor1_koszul(phi, omega).value == 1
        assert tor1_intersection(phi, omega).value == 1

    def test_k0(self):
        assert tor1_koszul([], Ps("y, x")).value == 0

    def test_intersection_examples(self):
        assert tor1_intersection(Ps("x^3 - y^2"), Ps("x, y")).value == 1
        assert tor1_intersection(Ps("x"), Ps("y")).value == 0
        assert tor1_intersection(Ps("x"), Ps("x, y")).value == 1

    @pytest.mark.parametrize(
        "phi,omega,variables",
        [
            ("x^2 + y^2+z^2, x*y", "x, 2*y, 3*z", XYZ),
            ("x, y", "y, x, z^2", XYZ),
            ("x^4 + y^2", "2*x, 3*y^2", XY),
        ],
    )
    def test_routes_agree(self, phi, omega, variables):
        a = tor1_koszul(Ps(phi, variables), Ps(omega, variables))
        b = tor1_intersection(Ps(phi, variables), Ps(omega, variables))
        assert a.value == b.value


class TestJetMembership:
    def test_nonmember_detected_at_lowest_degree(self):
        phi = P("x^3 - y^2")
        N = [phi * P("3*x^2"), phi * P("-2*y")]
        assert jet_nonmembership_degree(phi * 6, N) == 2

    def test_member(self):
        assert jet_nonmembership_degree(P("x*y + y^3"), Ps("x, y^2"), D_max=8) is None

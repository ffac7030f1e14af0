"""Bruce-Roberts numbers of 1-forms on an ICIS and the invariants they relate to.

Every colength is computed at the origin by :func:`local_colength`; module
generators (logarithmic vector fields, intersections, syzygies) come from
global Gröbner computations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .groebner import (
    FreeModuleElement,
    buchberger,
    kernel_mod_ideal,
    module_product,
)
from .local_algebra import (
    DEFAULT_MAX_JET,
    ColengthResult,
    jet_nonmembership_degree,
    local_colength,
    subquotient_dimension,
    tor1_intersection,
    tor1_koszul,
)
from .polyring import PolyMatrix, Polynomial, bordered_matrix, determinant, jacobian_matrix, minors_ideal


class GermError(ValueError):
    """Base class for invalid germ or form input."""


class NotAGermAtOrigin(GermError):
    pass


class SingularLocusNotIsolated(GermError):
    pass


class KExceedsN(GermError):
    pass


class ChainNotGeneric(GermError):
    pass


class NotInThetaX(GermError):
    pass


class CrossCheckMismatch(RuntimeError):
    """Two independent routes to one invariant disagree."""


# ------------------------------------------------------------------ types


@dataclass(frozen=True)
class Validation:
    certificate_degree: int
    singular_colength: int
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class ICISGerm:
    """(X, 0) = phi^{-1}(0) for phi = (phi_1, ..., phi_k)."""

    variables: tuple[str, ...]
    phi: tuple[Polynomial, ...]
    validation: Validation | None = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "phi", tuple(self.phi))
        for f in self.phi:
            if f.variables != self.variables:
                raise GermError("phi components must live in the germ's ring")

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def k(self) -> int:
        return len(self.phi)

    def jacobian(self) -> PolyMatrix:
        return jacobian_matrix(self.phi, self.variables)

    def zero(self) -> Polynomial:
        return Polynomial.zero(self.variables)


@dataclass(frozen=True)
class OneForm:
    """omega = sum omega_i dx_i."""

    components: tuple[Polynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise GermError("a 1-form needs at least one component")

    @property
    def variables(self):
        return self.components[0].variables

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __call__(self, xi: FreeModuleElement) -> Polynomial:
        """Contraction omega(xi) = sum omega_i xi_i."""
        acc = Polynomial.zero(self.variables)
        for w, c in zip(self.components, xi.components, strict=True):
            acc = acc + w * c
        return acc

    def is_closed(self) -> bool:
        """Symmetric cross-derivatives, i.e. omega = df for a polynomial f."""
        w = self.components
        return all(w[i].diff(j) == w[j].diff(i) for i in range(len(w)) for j in range(i + 1, len(w)))

    def potential(self) -> Polynomial:
        """The f with df = omega and f(0) = 0, by integrating along rays."""
        if not self.is_closed():
            raise ValueError("1-form is not closed")
        terms: dict = {}
        for i, w in enumerate(self.components):
            for e, c in w.items():
                m = list(e)
                m[i] += 1
                m = tuple(m)
                terms[m] = terms.get(m, 0) + c / (sum(e) + 1)
        return Polynomial(self.variables, terms)


@dataclass(frozen=True)
class VectorFieldSet:
    elements: tuple[FreeModuleElement, ...]
    tag: str  # "trivial" or "full"

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def _check_pair(germ: ICISGerm, omega: OneForm):
    if len(omega) != germ.n or omega.variables != germ.variables:
        raise GermError(f"1-form has {len(omega)} components, germ has {germ.n} variables")


def _unit_fields(germ: ICISGerm) -> tuple[FreeModuleElement, ...]:
    return tuple(FreeModuleElement.unit(germ.variables, germ.n, j) for j in range(germ.n))


# ------------------------------------------------------------ validation


def validate_icis(germ: ICISGerm, D_max: int = DEFAULT_MAX_JET) -> ICISGerm:
    """Check k <= n, phi(0) = 0 and isolatedness of the singular locus."""
    if germ.k > germ.n:
        raise KExceedsN(f"k = {germ.k} exceeds n = {germ.n}")
    for i, f in enumerate(germ.phi):
        if f.constant_term() != 0:
            raise NotAGermAtOrigin(f"phi_{i + 1}(0) = {f.constant_term()} != 0")
    if germ.k == 0:
        return ICISGerm(germ.variables, germ.phi, Validation(0, 0))
    gens = list(germ.phi) + minors_ideal(germ.jacobian(), germ.k)
    res = _colength(tuple(g for g in gens if g), D_max)
    if not res.finite:
        raise SingularLocusNotIsolated(
            f"I_X + I_k(dphi) has no finite colength certificate up to degree {res.bound}"
        )
    return ICISGerm(germ.variables, germ.phi, Validation(res.degree, res.value))


@lru_cache(maxsize=4096)
def _colength(gens: tuple, D_max: int) -> ColengthResult:
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return ColengthResult.undetermined(D_max)
    return local_colength(list(gens), D_max)


# ------------------------------------------------------ vector field sets


def theta_trivial_generators(germ: ICISGerm) -> VectorFieldSet:
    """Minor fields of the matrix (d/dx; dphi) plus every phi_i d/dx_j."""
    n, k = germ.n, germ.k
    if k == 0:
        return VectorFieldSet(_unit_fields(germ), "trivial")
    J = germ.jacobian()
    zero = germ.zero()
    out = []
    for cols in combinations(range(n), k + 1):
        comps = [zero] * n
        for pos, j in enumerate(cols):
            rest = [c for c in cols if c != j]
            d = determinant([[J[i, c] for c in rest] for i in range(k)], germ.variables)
            comps[j] = -d if pos % 2 else d
        out.append(FreeModuleElement(comps))
    for i in range(k):
        for j in range(n):
            comps = [zero] * n
            comps[j] = germ.phi[i]
            out.append(FreeModuleElement(comps))
    return VectorFieldSet(tuple(out), "trivial")


@lru_cache(maxsize=256)
def theta_x_generators(germ: ICISGerm) -> VectorFieldSet:
    """Generators of Theta_X = {xi : dphi . xi in I_X O^k}."""
    if germ.k == 0:
        return VectorFieldSet(_unit_fields(germ), "full")
    gens = kernel_mod_ideal(germ.jacobian(), list(germ.phi))
    return VectorFieldSet(tuple(gens), "full")


def omega_theta_trivial_ideal(germ: ICISGerm, omega: OneForm) -> list[Polynomial]:
    """Maximal minors of (omega; dphi) followed by the products phi_j omega_i."""
    _check_pair(germ, omega)
    M = bordered_matrix(list(omega), jacobian_matrix(germ.phi, germ.variables))
    out = minors_ideal(M, germ.k + 1)
    for w in omega:
        for f in germ.phi:
            out.append(f * w)
    return out


def omega_theta_x(germ: ICISGerm, omega: OneForm) -> list[Polynomial]:
    """omega(xi) for every generator xi of Theta_X."""
    _check_pair(germ, omega)
    return [omega(xi) for xi in theta_x_generators(germ)]


def _nonzero(polys):
    return tuple(p for p in polys if not p.is_zero())


# -------------------------------------------------------------- numbers


def mu_form(omega: OneForm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """Milnor number of a 1-form, dim O / <omega_1, ..., omega_n>."""
    return _colength(_nonzero(omega), D_max)


def mu_br_trivial_colength(germ: ICISGerm, omega: OneForm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """dim O / omega(Theta_X^T); finite exactly when mu_BR is."""
    return _colength(_nonzero(omega_theta_trivial_ideal(germ, omega)), D_max)


def mu_br(germ: ICISGerm, omega: OneForm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """Bruce-Roberts number dim O / omega(Theta_X)."""
    return _colength(_nonzero(omega_theta_x(germ, omega)), D_max)


def mu_br_minus(germ: ICISGerm, omega: OneForm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """Relative Bruce-Roberts number dim O / (omega(Theta_X) + I_X)."""
    return _colength(_nonzero(omega_theta_x(germ, omega) + list(germ.phi)), D_max)


def gsv_index(germ: ICISGerm, omega: OneForm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """GSV index as dim O / (I_X + I_{k+1}(omega; dphi))."""
    _check_pair(germ, omega)
    M = bordered_matrix(list(omega), jacobian_matrix(germ.phi, germ.variables))
    return _colength(_nonzero(list(germ.phi) + minors_ideal(M, germ.k + 1)), D_max)


def colength_ix_plus_omega(germ: ICISGerm, omega: OneForm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """dim O / (I_X + <omega_i>)."""
    return _colength(_nonzero(list(germ.phi) + list(omega)), D_max)


def _rank_k_vector(germ, entries: dict[int, Polynomial]) -> FreeModuleElement:
    comps = [germ.zero()] * germ.k
    for i, p in entries.items():
        comps[i] = p
    return FreeModuleElement(comps)


def tjurina_t1(germ: ICISGerm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """Tjurina number as dim O^k / (columns of dphi + I_X O^k)."""
    k, n = germ.k, germ.n
    if k == 0:
        return ColengthResult(0, 0, 0)
    J = germ.jacobian()
    gens = [FreeModuleElement(J.column(j)) for j in range(n)]
    for f in germ.phi:
        for l in range(k):
            gens.append(_rank_k_vector(germ, {l: f}))
    gens = [g for g in gens if not g.is_zero()]
    return local_colength(gens, D_max)


def tjurina_via_theta(germ: ICISGerm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """Tjurina number as dim Theta_X / Theta_X^T."""
    if germ.k == 0:
        return ColengthResult(0, 0, 0)
    return subquotient_dimension(
        list(theta_x_generators(germ)), list(theta_trivial_generators(germ)), D_max
    )


def omega_theta_quotient(germ: ICISGerm, omega: OneForm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """dim omega(Theta_X) / omega(Theta_X^T)."""
    U = list(_nonzero(omega_theta_x(germ, omega)))
    V = list(_nonzero(omega_theta_trivial_ideal(germ, omega)))
    return subquotient_dimension(U, V, D_max)


def ix_mod_omega_ix(germ: ICISGerm, omega: OneForm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """dim I_X / <omega_i> I_X."""
    _check_pair(germ, omega)
    if germ.k == 0:
        return ColengthResult(0, 0, 0)
    V = [w * f for w in omega for f in germ.phi]
    return subquotient_dimension(list(germ.phi), V, D_max)


def first_decomposition_term(germ: ICISGerm, omega: OneForm, D_max: int = DEFAULT_MAX_JET) -> ColengthResult:
    """dim O^k / (<omega_i> O^k + Koszul relations phi_i e_j - phi_j e_i)."""
    _check_pair(germ, omega)
    k = germ.k
    if k == 0:
        return ColengthResult(0, 0, 0)
    gens = []
    for w in _nonzero(omega):
        for m in range(k):
            gens.append(_rank_k_vector(germ, {m: w}))
    for i, j in combinations(range(k), 2):
        gens.append(_rank_k_vector(germ, {j: germ.phi[i], i: -germ.phi[j]}))
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return ColengthResult.undetermined(D_max)
    return local_colength(gens, D_max)


def tor_term(germ: ICISGerm, omega: OneForm, D_max: int = DEFAULT_MAX_JET, check: bool = True) -> ColengthResult:
    """dim (I_X ∩ <omega_i>) / (I_X <omega_i>), cross-checked by Koszul homology."""
    _check_pair(germ, omega)
    if germ.k == 0:
        return ColengthResult(0, 0, 0)
    via_int = tor1_intersection(list(germ.phi), list(_nonzero(omega)), D_max)
    if check:
        via_kos = tor1_koszul(list(germ.phi), list(_nonzero(omega)), D_max)
        if via_int.finite and via_kos.finite and via_int.value != via_kos.value:
            raise CrossCheckMismatch(f"Tor_1: intersection route {via_int.value}, Koszul route {via_kos.value}")
    return via_int


# ------------------------------------------------------- trivial fields


@dataclass(frozen=True)
class TrivialityVerdict:
    kind: str  # "trivial", "not_trivial", "undetermined"
    degree: int | None = None


def is_trivial_field(germ: ICISGerm, xi: FreeModuleElement, D_max: int = DEFAULT_MAX_JET) -> TrivialityVerdict:
    """Decide xi in Theta_X^T through t phi(xi) in I_X t phi(Theta_n)."""
    if xi.rank != germ.n:
        raise GermError("vector field has the wrong rank")
    if germ.k == 0:
        return TrivialityVerdict("trivial")
    J = germ.jacobian()
    image = module_product(J, xi)
    G = buchberger(list(germ.phi))
    if not all(G.contains(c) for c in image):
        raise NotInThetaX(f"dphi(xi) is not in I_X O^k for xi = {xi!r}")
    N = []
    for f in germ.phi:
        for j in range(germ.n):
            v = FreeModuleElement([f * p for p in J.column(j)])
            if not v.is_zero():
                N.append(v)
    if image.is_zero() or (N and buchberger(N).contains(image)):
        return TrivialityVerdict("trivial")
    d = jet_nonmembership_degree(image, N, D_max)
    if d is not None:
        return TrivialityVerdict("not_trivial", d)
    return TrivialityVerdict("undetermined")


# ------------------------------------------------------------- Lê-Greuel


def le_greuel_milnor(germ: ICISGerm, D_max: int = DEFAULT_MAX_JET) -> list[ColengthResult]:
    """Milnor numbers of X_1, ..., X_k with X_i = V(phi_1, ..., phi_i).

    mu(X_{i-1}) + mu(X_i) = dim O / (<phi_1..phi_{i-1}> + I_i(d(phi_1..phi_i))).
    """
    out = []
    prev = 0
    degree = 0
    for i in range(1, germ.k + 1):
        prefix = ICISGerm(germ.variables, germ.phi[:i])
        try:
            validate_icis(prefix, D_max)
        except GermError as exc:
            raise ChainNotGeneric(f"X_{i} is not an ICIS: {exc}") from None
        gens = list(germ.phi[: i - 1]) + minors_ideal(prefix.jacobian(), i)
        res = _colength(_nonzero(gens), D_max)
        if not res.finite:
            raise ChainNotGeneric(f"Lê-Greuel colength for X_{i} undetermined")
        value = res.value - prev
        degree = max(degree, res.degree)
        out.append(ColengthResult(value, res.degree, res.bound))
        prev = value
    return out


# ---------------------------------------------------------------- report


IDENTITIES = {
    "R1": "mu_BR^- + tau - Ind_GSV",
    "R2": "mu_BR - (dim I_X/<w>I_X + Ind_GSV - tau)",
    "R3": "mu_BR - (mu(w) + Ind_GSV - tau - dim O/(<w>+I_X) + tor)",
    "R4": "mu_BR - (mu(w) + mu_BR^- - dim O/(<w>+I_X) + tor)",
    "R5": "tor - dim O/(I_X+<w>)  [k = 1]",
    "R6": "tor - 2 dim O/(I_X+<w>)  [k = 2, report only]",
    "R7": "mu_BR^- - (mu(X cap f^-1(0)) + mu(X) - tau)  [w = df]",
}

PRINTED_R1 = "(Ind_GSV + tau) - mu_BR^-"


@dataclass
class InvariantReport:
    label: str
    n: int
    k: int
    values: dict[str, ColengthResult]
    residuals: dict[str, int | None]
    cross_checks: dict[str, tuple]
    flags: dict[str, object]
    relation_sign: str = "resolved"

    @property
    def undetermined(self) -> list[str]:
        return [name for name, v in self.values.items() if not v.finite]

    def failures(self) -> list[str]:
        """Names of checked identities or cross-checks that failed (R6 excluded)."""
        bad = [r for r, v in self.residuals.items() if r != "R6" and v not in (None, 0)]
        bad += [name for name, (_, _, ok) in self.cross_checks.items() if ok is False]
        return bad

    @property
    def passed(self) -> bool:
        return not self.undetermined and not self.failures()

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "k": self.k,
            "invariants": {name: v.to_json() for name, v in self.values.items()},
            "certificate_degrees": {name: v.degree for name, v in self.values.items()},
            "residuals": dict(self.residuals),
            "relation_sign": self.relation_sign,
            "cross_checks": {
                name: {"first": _js(a), "second": _js(b), "agree": ok}
                for name, (a, b, ok) in self.cross_checks.items()
            },
            "flags": dict(self.flags),
            "passed": self.passed,
        }


def _js(v):
    if isinstance(v, ColengthResult):
        return v.to_json()
    return v


def _agree(a, b):
    av = a.value if isinstance(a, ColengthResult) else a
    bv = b.value if isinstance(b, ColengthResult) else b
    if av is None or bv is None:
        return None
    return av == bv


def check_identities(
    germ: ICISGerm,
    omega: OneForm,
    D_max: int = DEFAULT_MAX_JET,
    label: str = "",
    relation_sign: str = "resolved",
) -> InvariantReport:
    """Compute every invariant of (X, omega) and the residuals R1-R7.

    ``relation_sign="printed"`` evaluates R1 with +tau as the predicted
    value, (Ind_GSV + tau) - mu_BR^-, which leaves a residual of 2 tau.
    """
    if relation_sign not in ("resolved", "printed"):
        raise ValueError("relation_sign must be 'resolved' or 'printed'")
    _check_pair(germ, omega)
    if germ.validation is None:
        germ = validate_icis(germ, D_max)
    k = germ.k
    values = {
        "mu_omega": mu_form(omega, D_max),
        "tjurina": tjurina_t1(germ, D_max),
        "gsv": gsv_index(germ, omega, D_max),
        "mu_br": mu_br(germ, omega, D_max),
        "mu_br_minus": mu_br_minus(germ, omega, D_max),
        "mu_br_trivial": mu_br_trivial_colength(germ, omega, D_max),
        "colength_ix_plus_omega": colength_ix_plus_omega(germ, omega, D_max),
    }
    flags: dict[str, object] = {
        "mu_br_finite": values["mu_br"].finite,
        "mu_br_minus_finite": values["mu_br_minus"].finite,
        "gsv_finite": values["gsv"].finite,
        "mu_br_trivial_finite": values["mu_br_trivial"].finite,
        "exact_form": omega.is_closed(),
    }
    flags["finiteness_consistent"] = (
        (not flags["mu_br_finite"] or flags["gsv_finite"])
        and flags["mu_br_minus_finite"] == flags["gsv_finite"]
        and flags["mu_br_finite"] == flags["mu_br_trivial_finite"]
    )
    cross: dict[str, tuple] = {}
    residuals: dict[str, int | None] = {name: None for name in IDENTITIES}

    all_finite = all(v.finite for v in values.values())
    if all_finite:
        values["tjurina_theta"] = tjurina_via_theta(germ, D_max)
        values["ix_mod_omega_ix"] = ix_mod_omega_ix(germ, omega, D_max)
        values["first_term"] = first_decomposition_term(germ, omega, D_max)
        phi, w = list(germ.phi), list(_nonzero(omega))
        if k == 0:
            tor_i = tor_k = ColengthResult(0, 0, 0)
        else:
            tor_i = tor1_intersection(phi, w, D_max)
            tor_k = tor1_koszul(phi, w, D_max)
        values["tor"] = tor_i
        values["omega_theta_quotient"] = omega_theta_quotient(germ, omega, D_max)
        cross["tjurina_t1=tjurina_via_theta"] = (values["tjurina"], values["tjurina_theta"], _agree(values["tjurina"], values["tjurina_theta"]))
        cross["tor1_koszul=tor1_intersection"] = (tor_k, tor_i, _agree(tor_k, tor_i))
        cross["first_term=ix_mod_omega_ix"] = (values["first_term"], values["ix_mod_omega_ix"], _agree(values["first_term"], values["ix_mod_omega_ix"]))
        cross["omega_theta_quotient=tjurina"] = (values["omega_theta_quotient"], values["tjurina"], _agree(values["omega_theta_quotient"], values["tjurina"]))

    if all(v.finite for v in values.values()):
        v = {name: r.value for name, r in values.items()}
        formula = v["gsv"] - v["tjurina"]
        cross["mu_br_minus=gsv-tjurina"] = (v["mu_br_minus"], formula, v["mu_br_minus"] == formula)
        if relation_sign == "resolved":
            residuals["R1"] = v["mu_br_minus"] + v["tjurina"] - v["gsv"]
        else:
            residuals["R1"] = v["gsv"] + v["tjurina"] - v["mu_br_minus"]
        residuals["R2"] = v["mu_br"] - (v["ix_mod_omega_ix"] + v["gsv"] - v["tjurina"])
        residuals["R3"] = v["mu_br"] - (
            v["mu_omega"] + v["gsv"] - v["tjurina"] - v["colength_ix_plus_omega"] + v["tor"]
        )
        residuals["R4"] = v["mu_br"] - (
            v["mu_omega"] + v["mu_br_minus"] - v["colength_ix_plus_omega"] + v["tor"]
        )
        if k == 1:
            residuals["R5"] = v["tor"] - v["colength_ix_plus_omega"]
        if k == 2:
            residuals["R6"] = v["tor"] - 2 * v["colength_ix_plus_omega"]
            flags["R6_holds"] = residuals["R6"] == 0
        if omega.is_closed():
            f = omega.potential()
            try:
                chain = le_greuel_milnor(ICISGerm(germ.variables, germ.phi + (f,)), D_max)
            except ChainNotGeneric as exc:
                flags["R7_skipped"] = str(exc)
            else:
                mu_section = chain[-1].value
                mu_x = chain[-2].value if k else 0
                values["mu_section"] = chain[-1]
                flags["potential"] = str(f)
                flags["mu_X"] = mu_x
                residuals["R7"] = v["mu_br_minus"] - (mu_section + mu_x - v["tjurina"])
    return InvariantReport(
        label=label,
        n=germ.n,
        k=k,
        values=values,
        residuals=residuals,
        cross_checks=cross,
        flags=flags,
        relation_sign=relation_sign,
    )

"""Acceptance criteria, one printed PASS/FAIL line each.

All comparisons are exact integer equalities; the only tolerances are the
wall-clock budgets pinned below.  Run ``pytest tests/test_acceptance.py -v``
to see the verdict lines interleaved with pytest's own output.
"""

import json
import random
import time
from itertools import product

import pytest

from brinv import invariants as inv
from brinv.catalog import BUILTIN, DEGENERATE, GermSpecFile
from brinv.cli import main
from brinv.invariants import check_identities, validate_icis
from brinv.local_algebra import local_colength
from brinv.polyring import Polynomial, parse_polynomial

CUSP_BUDGET_S = 10.0
CATALOG_BUDGET_S = 300.0
STAIRCASE_SEED = 20261016
STAIRCASE_COUNT = 50


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line for the criterion, then assert it."""

    def emit(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
        assert ok, f"{name}: {detail}"

    return emit


def evaluate(spec, D_max=None, sign="resolved"):
    germ, omega = spec.build()
    germ = validate_icis(germ, D_max or spec.jet_bound)
    return germ, omega, check_identities(germ, omega, D_max or spec.jet_bound, spec.label, sign)


def value(report, name):
    return report.values[name].value


def fresh_caches():
    inv._colength.cache_clear()
    inv.theta_x_generators.cache_clear()


def test_cusp_suite(verdict):
    fresh_caches()
    spec = GermSpecFile(("x", "y"), ("x^3 - y^2",), ("y", "x"), "cusp")
    start = time.perf_counter()
    _, _, r = evaluate(spec)
    elapsed = time.perf_counter() - start
    expected = {
        "mu_omega": 1,
        "tjurina": 2,
        "tjurina_theta": 2,
        "gsv": 6,
        "mu_br": 5,
        "mu_br_minus": 4,
        "tor": 1,
        "colength_ix_plus_omega": 1,
        "ix_mod_omega_ix": 1,
    }
    got = {k: value(r, k) for k in expected}
    tor_routes = tuple(c.value for c in r.cross_checks["tor1_koszul=tor1_intersection"][:2])
    ok = got == expected and tor_routes == (1, 1) and elapsed < CUSP_BUDGET_S
    verdict("cusp suite", ok, f"{got}, tor routes {tor_routes}, {elapsed:.2f}s < {CUSP_BUDGET_S}s")


def test_smooth_line_suite(verdict):
    spec = GermSpecFile(("x", "y"), ("x",), ("x", "y"), "smooth-line")
    _, _, r = evaluate(spec)
    expected = {"mu_br": 2, "mu_br_minus": 1, "gsv": 1, "tjurina": 0, "tor": 1}
    got = {k: value(r, k) for k in expected}
    residuals = {k: r.residuals[k] for k in ("R1", "R2", "R3", "R4", "R5")}
    ok = got == expected and all(v == 0 for v in residuals.values())
    verdict("smooth-line suite", ok, f"{got}, residuals {residuals}")


@pytest.fixture(scope="module")
def catalog():
    fresh_caches()
    start = time.perf_counter()
    reports = {s.label: evaluate(s) for s in BUILTIN}
    return reports, time.perf_counter() - start


def test_identity_suite(verdict, catalog):
    reports, elapsed = catalog
    ks = {r.k for (_, _, r) in reports.values()}
    bad = []
    for label, (_, _, r) in reports.items():
        if r.undetermined:
            bad.append((label, "undetermined", r.undetermined))
        for name in ("R1", "R2", "R3", "R4"):
            if r.residuals[name] != 0:
                bad.append((label, name, r.residuals[name]))
        if r.k == 1 and r.residuals["R5"] != 0:
            bad.append((label, "R5", r.residuals["R5"]))
        if r.flags["exact_form"] and r.residuals["R7"] != 0:
            bad.append((label, "R7", r.residuals["R7"]))
    exact = sum(r.flags["exact_form"] for (_, _, r) in reports.values())
    ok = len(reports) >= 8 and ks >= {0, 1, 2} and not bad and elapsed < CATALOG_BUDGET_S
    verdict(
        "identity suite",
        ok,
        f"{len(reports)} entries, k in {sorted(ks)}, {exact} exact forms, "
        f"violations {bad}, {elapsed:.2f}s < {CATALOG_BUDGET_S:.0f}s",
    )


def test_dual_method_agreement(verdict, catalog):
    reports, _ = catalog
    required = (
        "tjurina_t1=tjurina_via_theta",
        "tor1_koszul=tor1_intersection",
        "first_term=ix_mod_omega_ix",
        "mu_br_minus=gsv-tjurina",
    )
    bad = [
        (label, name, [c.value for c in r.cross_checks[name][:2]])
        for label, (_, _, r) in reports.items()
        for name in required
        if not r.cross_checks[name][2]
    ]
    verdict("dual-method agreement", not bad, f"{len(reports)} entries x {len(required)} pairs, mismatches {bad}")


def test_sign_discrepancy(verdict, catalog):
    reports, _ = catalog
    bad, positive, cusp = [], 0, None
    for spec in BUILTIN:
        _, _, r = evaluate(spec, sign="printed")
        tau = value(r, "tjurina")
        positive += tau > 0
        if r.residuals["R1"] != 2 * tau:
            bad.append((spec.label, r.residuals["R1"], tau))
        if spec.label == "cusp-exact":
            cusp = r.residuals["R1"]
    ok = not bad and cusp == 4 and positive > 0
    verdict("sign discrepancy", ok, f"printed R1 = 2*tau on all entries ({positive} with tau > 0), cusp {cusp}")


def staircase_count(exps, n):
    bound = max(max(e) for e in exps) + 1
    return sum(
        1 for e in product(range(bound), repeat=n) if not any(all(a >= b for a, b in zip(e, g)) for g in exps)
    )


def random_monomial_ideal(rng):
    n = rng.randint(1, 3)
    exps = [tuple(rng.randint(1, 5) if j == i else 0 for j in range(n)) for i in range(n)]
    exps += [tuple(rng.randint(0, 4) for _ in range(n)) for _ in range(rng.randint(0, 4))]
    return n, [e for e in exps if any(e)]


def _certificate_recomputations(germ, omega):
    return {
        "mu_omega": lambda D: inv.mu_form(omega, D),
        "tjurina": lambda D: inv.tjurina_t1(germ, D),
        "gsv": lambda D: inv.gsv_index(germ, omega, D),
        "mu_br": lambda D: inv.mu_br(germ, omega, D),
        "mu_br_minus": lambda D: inv.mu_br_minus(germ, omega, D),
        "mu_br_trivial": lambda D: inv.mu_br_trivial_colength(germ, omega, D),
        "colength_ix_plus_omega": lambda D: inv.colength_ix_plus_omega(germ, omega, D),
    }


def test_engine_oracles(verdict, catalog):
    reports, _ = catalog
    local = local_colength([parse_polynomial("x^2 + x^3", ["x"])]).value

    rng = random.Random(STAIRCASE_SEED)
    names = ["x", "y", "z"]
    mismatches = []
    for _ in range(STAIRCASE_COUNT):
        n, exps = random_monomial_ideal(rng)
        gens = [Polynomial.monomial(names[:n], e) for e in exps]
        got, want = local_colength(gens).value, staircase_count(exps, n)
        if got != want:
            mismatches.append((exps, got, want))

    unstable, checked = [], 0
    for label, (germ, omega, r) in reports.items():
        for name, fn in _certificate_recomputations(germ, omega).items():
            d = r.values[name].degree
            at_d, at_next = fn(d), fn(d + 1)
            checked += 1
            if not (at_d.value == at_next.value == r.values[name].value):
                unstable.append((label, name, d, at_d.value, at_next.value))

    ok = local == 2 and not mismatches and not unstable
    verdict(
        "engine oracles",
        ok,
        f"<x^2+x^3> local colength {local}; staircase mismatches {len(mismatches)}/{STAIRCASE_COUNT}; "
        f"certificate instability {len(unstable)}/{checked}",
    )


def test_finiteness_propagation(verdict, catalog):
    reports, _ = catalog
    degenerate = {s.label: evaluate(s, 16)[2] for s in DEGENERATE}
    all_reports = list(degenerate.values()) + [r for (_, _, r) in reports.values()]
    bad = []
    for r in all_reports:
        f = r.flags
        if f["mu_br_finite"] and not f["gsv_finite"]:
            bad.append((r.label, "finite mu_BR with infinite GSV"))
        if f["mu_br_minus_finite"] != f["gsv_finite"]:
            bad.append((r.label, "mu_BR- finiteness differs from GSV"))
        if f["mu_br_finite"] != f["mu_br_trivial_finite"]:
            bad.append((r.label, "mu_BR finiteness differs from the trivial-field colength"))
    pattern = {
        label: (r.flags["mu_br_finite"], r.flags["mu_br_minus_finite"], r.flags["gsv_finite"])
        for label, r in degenerate.items()
    }
    expected = {
        "k0-repeated-component": (False, False, False),
        "cusp-omega-dphi": (False, False, False),
        "smooth-line-tangent-zero": (False, False, False),
        "A1-surface-cyclic": (False, False, False),
        "A1-surface-mu-infinite": (False, True, True),
    }
    ok = not bad and pattern == expected
    verdict("finiteness propagation", ok, f"{len(all_reports)} reports, violations {bad}, degenerate {pattern}")


def test_r6_reported(verdict, capsys):
    code = main(["verify", "--catalog", "builtin", "--format", "json"])
    out = json.loads(capsys.readouterr().out)
    k2 = {e["label"] for e in out["entries"] if e["report"]["k"] == 2}
    r6 = out["summary"]["R6"]
    ok = code == 0 and set(r6) == k2 and len(k2) > 0 and all(v in ("pass", "fail") for v in r6.values())
    verdict("R6 reported per k=2 entry", ok, f"exit {code}, {r6}")

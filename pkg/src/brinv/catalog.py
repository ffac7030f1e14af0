"""Germ specification files and the bundled example catalog."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .invariants import ICISGerm, OneForm
from .local_algebra import DEFAULT_MAX_JET
from .polyring import ParseError, parse_polynomial

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class SpecError(ValueError):
    """Malformed germ specification."""


@dataclass(frozen=True)
class GermSpecFile:
    variables: tuple[str, ...]
    phi: tuple[str, ...]
    omega: tuple[str, ...]
    label: str = ""
    max_jet_degree: int | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "GermSpecFile":
        if not isinstance(data, dict):
            raise SpecError("spec must be a JSON object")
        missing = [f for f in ("variables", "phi", "omega") if f not in data]
        if missing:
            raise SpecError(f"missing field(s): {', '.join(missing)}")
        variables = data["variables"]
        if not isinstance(variables, list) or not variables:
            raise SpecError("'variables' must be a nonempty list")
        for v in variables:
            if not isinstance(v, str) or not _IDENT.match(v) or not v.isascii():
                raise SpecError(f"bad variable name {v!r}")
        if len(set(variables)) != len(variables):
            raise SpecError("variable names must be distinct")
        for name in ("phi", "omega"):
            if not isinstance(data[name], list) or not all(isinstance(s, str) for s in data[name]):
                raise SpecError(f"'{name}' must be a list of strings")
        if len(data["omega"]) != len(variables):
            raise SpecError(f"omega has {len(data['omega'])} components for {len(variables)} variables")
        mjd = data.get("maxJetDegree")
        if mjd is not None and (not isinstance(mjd, int) or isinstance(mjd, bool) or mjd < 1):
            raise SpecError("'maxJetDegree' must be a positive integer")
        return cls(
            tuple(variables),
            tuple(data["phi"]),
            tuple(data["omega"]),
            str(data.get("label", "")),
            mjd,
        )

    @classmethod
    def load(cls, path) -> "GermSpecFile":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        spec = cls.from_dict(data)
        if not spec.label:
            spec = cls(spec.variables, spec.phi, spec.omega, path.stem, spec.max_jet_degree)
        return spec

    def to_dict(self) -> dict:
        out = {"variables": list(self.variables), "phi": list(self.phi), "omega": list(self.omega), "label": self.label}
        if self.max_jet_degree is not None:
            out["maxJetDegree"] = self.max_jet_degree
        return out

    def build(self) -> tuple[ICISGerm, OneForm]:
        """Parse the polynomial texts into a germ and a 1-form."""

        def parse(field, i, src):
            try:
                return parse_polynomial(src, self.variables)
            except ParseError as exc:
                raise SpecError(f"{field}[{i}]: {exc}") from None

        phi = [parse("phi", i, s) for i, s in enumerate(self.phi)]
        omega = [parse("omega", i, s) for i, s in enumerate(self.omega)]
        return ICISGerm(self.variables, phi), OneForm(omega)

    @property
    def jet_bound(self) -> int:
        return self.max_jet_degree or DEFAULT_MAX_JET


def _entry(label, variables, phi, omega):
    return GermSpecFile(tuple(variables), tuple(phi), tuple(omega), label)


XY = ("x", "y")
XYZ = ("x", "y", "z")

BUILTIN = [
    _entry("plane-k0-exact", XY, [], ["2*x", "3*y^2"]),
    _entry("plane-k0-nonexact", XY, [], ["x + y^2", "y^3"]),
    _entry("A1-curve-exact", XY, ["x^2 + y^2"], ["y", "x"]),
    _entry("A1-curve-nonexact", XY, ["x^2 + y^2"], ["y", "2*x"]),
    _entry("cusp-exact", XY, ["x^3 - y^2"], ["y", "x"]),
    _entry("cusp-exact-2", XY, ["x^3 - y^2"], ["2*x", "3*y^2"]),
    _entry("cusp-nonexact", XY, ["x^3 - y^2"], ["y", "2*x"]),
    _entry("A3-curve-exact", XY, ["x^4 + y^2"], ["y", "x"]),
    _entry("A3-curve-nonexact", XY, ["x^4 + y^2"], ["x + y^2", "y"]),
    _entry("A1-surface-exact", XYZ, ["x^2 + y^2 + z^2"], ["y", "x", "2*z"]),
    _entry("A1-surface-nonexact", XYZ, ["x^2 + y^2 + z^2"], ["y", "2*x", "z"]),
    _entry("smooth-line-exact", XY, ["x"], ["x", "y"]),
    _entry("smooth-line-nonexact", XY, ["x"], ["x + y^2", "y"]),
    _entry("smooth-ci-exact", XYZ, ["x", "y"], ["x", "y", "z"]),
    _entry("smooth-ci-nonexact", XYZ, ["x", "y"], ["y", "2*x", "z"]),
    _entry("space-curve-exact", XYZ, ["x^2 + y^2 + z^2", "x*y"], ["x", "2*y", "3*z"]),
    _entry("space-curve-nonexact", XYZ, ["x^2 + y^2 + z^2", "x*y"], ["z", "x", "y"]),
]

# Inputs violating some finiteness hypothesis; used to exercise the
# finiteness implications, never part of `verify --catalog builtin`.
DEGENERATE = [
    _entry("k0-repeated-component", XY, [], ["x", "x"]),
    _entry("cusp-omega-dphi", XY, ["x^3 - y^2"], ["3*x^2", "-2*y"]),
    _entry("smooth-line-tangent-zero", XY, ["x"], ["y", "2*x"]),
    _entry("A1-surface-cyclic", XYZ, ["x^2 + y^2 + z^2"], ["y", "z", "x"]),
    _entry("A1-surface-mu-infinite", XYZ, ["x^2 + y^2 + z^2"], ["y + z", "x", "x"]),
]


def load_catalog(selector: str) -> list[GermSpecFile]:
    """``"builtin"`` or a directory of ``*.json`` spec files (sorted by name)."""
    if selector == "builtin":
        return list(BUILTIN)
    path = Path(selector)
    if not path.is_dir():
        raise SpecError(f"catalog {selector!r} is neither 'builtin' nor a directory")
    return [GermSpecFile.load(p) for p in sorted(path.glob("*.json"))]

"""JSON scenario and report documents."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import FoliationLabError, OrbitNotClosed, ParseError, ValidationError
from .leafwise import EquivariantFamily
from .manifold import MappingTorusScenario, SpeedProfile, Tolerances, check_divisor_periodicity
from .projective import MoebiusMap, PointCP1, RationalFunction, invariance_multiplier

REPORT_VERSION = "1"
_TOLERANCE_KEYS = ("winding_snap", "residual", "quadrature", "periodicity")


def _line_of(text: str, key: str) -> int | None:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


class _Reader:
    """Typed access into a decoded document, raising ParseError with field paths."""

    def __init__(self, text: str):
        self.text = text

    def fail(self, path: str, message: str):
        key = path.split(".")[-1].split("[")[0]
        raise ParseError(_line_of(self.text, key), path, message)

    def get(self, obj, key, path, required=True, default=None):
        if not isinstance(obj, dict):
            self.fail(path, "expected an object")
        if key not in obj:
            if required:
                self.fail(f"{path}.{key}".lstrip("."), "missing")
            return default
        return obj[key]

    def real(self, value, path) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, "expected a number")
        return float(value)

    def integer(self, value, path) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(path, "expected an integer")
        return value

    def complex_(self, value, path) -> complex:
        if not (isinstance(value, list) and len(value) == 2):
            self.fail(path, "expected a complex number [re, im]")
        return complex(self.real(value[0], path + "[0]"), self.real(value[1], path + "[1]"))

    def complex_list(self, value, path) -> list[complex]:
        if not isinstance(value, list) or not value:
            self.fail(path, "expected a non-empty list of [re, im]")
        return [self.complex_(v, f"{path}[{i}]") for i, v in enumerate(value)]

    def list_(self, value, path) -> list:
        if not isinstance(value, list):
            self.fail(path, "expected a list")
        return value


def scenario_from_document(doc, text: str = "") -> MappingTorusScenario:
    r = _Reader(text)
    if not isinstance(doc, dict):
        r.fail("<document>", "expected a JSON object")

    phi_doc = r.get(doc, "phi", "")
    a, b, c, d = (r.complex_(r.get(phi_doc, k, "phi"), f"phi.{k}") for k in "abcd")

    speed_doc = r.get(doc, "speed", "")
    a0 = r.real(r.get(speed_doc, "a0", "speed"), "speed.a0")
    terms = []
    for i, t in enumerate(r.list_(r.get(speed_doc, "terms", "speed", False, []), "speed.terms")):
        p = f"speed.terms[{i}]"
        terms.append((
            r.integer(r.get(t, "k", p), p + ".k"),
            r.real(r.get(t, "cos", p, False, 0.0), p + ".cos"),
            r.real(r.get(t, "sin", p, False, 0.0), p + ".sin"),
        ))

    fam = r.get(doc, "family", "")
    g_num = r.complex_list(r.get(fam, "g_num", "family"), "family.g_num")
    g_den = r.complex_list(r.get(fam, "g_den", "family", False, [[1.0, 0.0]]), "family.g_den")
    mu_doc = r.get(fam, "mu", "family", False, "auto")
    mu = None if mu_doc == "auto" else r.complex_(mu_doc, "family.mu")
    twist = []
    for i, t in enumerate(r.list_(r.get(fam, "twist", "family", False, []), "family.twist")):
        p = f"family.twist[{i}]"
        twist.append((r.integer(r.get(t, "k", p), p + ".k"), r.complex_(r.get(t, "coeff", p), p + ".coeff")))

    n_max = r.integer(doc.get("n_max", 64), "n_max")
    tol_doc = doc.get("tolerances", {})
    if not isinstance(tol_doc, dict):
        r.fail("tolerances", "expected an object")
    unknown = set(tol_doc) - set(_TOLERANCE_KEYS)
    if unknown:
        r.fail(f"tolerances.{sorted(unknown)[0]}", "unknown tolerance")
    tolerances = Tolerances(**{k: r.real(v, f"tolerances.{k}") for k, v in tol_doc.items()})

    try:
        phi = MoebiusMap(a, b, c, d)
    except FoliationLabError as exc:
        raise ValidationError("phi", "degenerate", str(exc)) from exc
    try:
        g = RationalFunction(tuple(g_num), tuple(g_den))
    except FoliationLabError as exc:
        raise ValidationError("family.g", exc.code, str(exc)) from exc
    try:
        speed = SpeedProfile(a0, tuple(terms))
        _ = speed.leaf_structure
    except (FoliationLabError, ValueError) as exc:
        raise ValidationError("speed", getattr(exc, "code", "invalid"), str(exc)) from exc
    check_divisor_periodicity(phi, g, n_max, tolerances.periodicity)
    try:
        if mu is None:
            mu = invariance_multiplier(g, phi)
        family = EquivariantFamily(g, mu, tuple(twist))
    except (FoliationLabError, ValueError) as exc:
        raise ValidationError("family", getattr(exc, "code", "invalid"), str(exc)) from exc
    try:
        return MappingTorusScenario(phi, speed, family, n_max, tolerances)
    except OrbitNotClosed:
        raise
    except FoliationLabError as exc:
        raise ValidationError("family", exc.code, str(exc)) from exc
    except ValueError as exc:
        raise ValidationError("n_max", "invalid", str(exc)) from exc


def parse_scenario_text(text: str) -> MappingTorusScenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, "<document>", exc.msg) from exc
    return scenario_from_document(doc, text)


def parse_scenario(path) -> MappingTorusScenario:
    text = Path(path).read_text(encoding="utf-8")
    return parse_scenario_text(text)


def _c(z: complex) -> list[float]:
    return [z.real, z.imag]


def scenario_to_document(scenario: MappingTorusScenario) -> dict:
    phi, fam, tol = scenario.phi, scenario.family, scenario.tolerances
    return {
        "phi": {k: _c(getattr(phi, k)) for k in "abcd"},
        "speed": {
            "a0": scenario.speed.a0,
            "terms": [{"k": k, "cos": a, "sin": b} for k, a, b in scenario.speed.terms],
        },
        "family": {
            "g_num": [_c(x) for x in fam.g.numerator],
            "g_den": [_c(x) for x in fam.g.denominator],
            "mu": _c(fam.mu),
            "twist": [{"k": k, "coeff": _c(c)} for k, c in fam.twist],
        },
        "n_max": scenario.n_max,
        "tolerances": {k: getattr(tol, k) for k in _TOLERANCE_KEYS},
    }


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def scenario_digest(scenario: MappingTorusScenario) -> str:
    return hashlib.sha256(canonical_json(scenario_to_document(scenario)).encode("utf-8")).hexdigest()


def write_scenario(scenario: MappingTorusScenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_document(scenario), indent=2) + "\n", encoding="utf-8")


def point_to_document(p: PointCP1) -> dict:
    if p.is_infinity:
        return {"chart": "infinity", "z": None}
    return {"chart": p.chart, "z": _c(p.to_complex())}


def report_to_document(report) -> dict:
    return {
        "version": REPORT_VERSION,
        "scenario_digest": report.scenario_digest,
        "orbits": [
            {
                "points": [point_to_document(p) for p in o.points],
                "period_n": o.period_n,
                "length_l": o.length_l,
                "order": o.order,
            }
            for o in report.orbits
        ],
        "sum_l_ord": report.sum_l_ord,
        "residual": report.residual,
        "constancy_ok": report.constancy_ok,
        "constancy_profiles": report.constancy_profiles,
        "tube_checks": [[i, rel] for i, rel in report.tube_checks],
        "stokes_checks": list(report.stokes_checks),
        "balance_residual": report.balance_residual,
        "passed": report.passed,
        "diagnostic_code": report.diagnostic_code,
        "diagnostic": report.diagnostic,
    }


def report_json(report) -> str:
    return json.dumps(report_to_document(report), indent=2, sort_keys=True) + "\n"

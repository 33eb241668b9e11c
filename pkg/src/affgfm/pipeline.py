"""The full construction for one case and its canonical JSON report."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import sympy

from .catalog import CaseManifest, match_catalog
from .errors import ChartError, ValidationError
from .flatcoords import (
    FlatChart,
    check_homogeneity,
    chart_from_text,
    connecting_transformation,
    degree_spectrum,
    solve_chart,
    verify_chart,
)
from .frobenius import FrobeniusData, frobenius_structure, verify_gfm, verify_properties
from .geometry import check_linearity, christoffel_relations, contravariant_christoffel, curvature_is_zero
from .invariants import basic_generators, jacobian_determinant, verify_leading_terms
from .monodromy import MonodromyBound, monodromy_bound
from .numbers import format_coeff, quadratic_field
from .pencil import GeneratorSet, generator_set_from_coefficients, proper_ansatz, solve_pencil
from .polys import format_poly, format_rational, parse_poly, parse_rational, tfield, zring
from .rootsys import build_root_system, make_weight
from .weylgroup import generate_group

REPORT_VERSION = 1
GOLDEN_DIR = "golden/v1"


def _frac(x: Fraction) -> str:
    return format_coeff(Fraction(x))


def _matrix_text(m, fmt=format_poly) -> list[list[str]]:
    return [[fmt(x) for x in row] for row in m]


def field_name(radicand: int) -> str:
    return "Q" if radicand == 1 else f"Q(sqrt({radicand}))"


@dataclass
class CaseResult:
    """Everything computed for one case; ``report`` is the serializable view."""

    case: CaseManifest
    generators: GeneratorSet
    chart: FlatChart
    frobenius: FrobeniusData
    monodromy: MonodromyBound
    report: dict[str, Any]
    timings: dict[str, float] = field(default_factory=dict)


def _pencil_text(gs: GeneratorSet, ell: int) -> list[str]:
    """z^j = y^j + lam s^j written as polynomials in (lam, y)."""
    K = gs.domain
    R = zring(ell, K, prefix="y")
    out = []
    for j in range(ell):
        y = R.gens[1 + j]
        s = gs.s[j]
        lifted = R.from_dict({m: K.convert(c) for m, c in s.terms()}) if s else R.zero
        out.append(format_poly(y + R.gens[0] * lifted))
    return out


def _lambda_metric(g, eta) -> list[list[str]]:
    n = len(g)
    K = g[0][0].ring.domain
    R = zring(n, K)
    lam = R.gens[0]
    embed = lambda p: R.from_dict({(0,) + m: c for m, c in p.terms()})
    return [[format_poly(embed(g[i][j]) + lam * embed(eta[i][j])) for j in range(n)] for i in range(n)]


def _pencil_checks(gs: GeneratorSet) -> dict[str, dict[str, Any]]:
    out = {}
    out["flat_g"] = curvature_is_zero(gs.g)
    out["flat_eta"] = curvature_is_zero(gs.eta)
    out["christoffel_linear_in_lambda"] = check_linearity(gs.g, gs.eta)
    for name, metric in (("g", gs.g), ("eta", gs.eta)):
        rel = christoffel_relations(metric, contravariant_christoffel(metric))
        for key, ok in rel.items():
            out[f"{key}_{name}"] = ok
    return {k: {"passed": bool(v), "witness": ""} for k, v in out.items()}


def resolve_generators(case: CaseManifest, rs, wc, group) -> list[tuple[CaseManifest, GeneratorSet]]:
    """Pinned coefficients give one set; otherwise every solution of the search, labelled -k1, -k2, ..."""
    family = proper_ansatz(_basic(rs, wc, group), wc)
    if case.pencil_coefficients:
        values = [sympy.sympify(v) for v in case.pencil_coefficients]
        radicand = 1
        for v in values:
            for r in v.atoms(sympy.Pow):
                if r.exp == sympy.Rational(1, 2):
                    radicand = int(r.base)
        gs = generator_set_from_coefficients(rs, wc, family, values, group, provenance="catalog", radicand=radicand)
        return [(case, gs)]
    found = solve_pencil(rs, wc, family, group)
    out = []
    for k, gs in enumerate(found, 1):
        coeffs = tuple(format_coeff(c) if not hasattr(c, "free_symbols") else str(c) for c in gs.coefficients)
        known = match_catalog(case.family, case.rank, case.marks, coeffs)
        if known is not None and case.chart_policy in ("paper", "auto"):
            sub = known
        elif known is not None:
            sub = replace(known, chart_policy=case.chart_policy)
        elif len(found) == 1:
            sub = case
        else:
            sub = CaseManifest(
                id=f"{case.id}-k{k}",
                family=case.family,
                rank=case.rank,
                marks=case.marks,
                pencil_coefficients=coeffs,
                chart_policy="solve",
            )
        out.append((sub, gs))
    out.sort(key=lambda pair: pair[0].id)
    return out


def _basic(rs, wc, group):
    return basic_generators(rs, wc, group)


def _chart(case: CaseManifest, gs: GeneratorSet, spectrum, wc) -> tuple[FlatChart, dict[str, Any]]:
    policy = case.effective_policy
    info: dict[str, Any] = {"policy": policy}
    paper = None
    if case.paper_chart is not None:
        pc = case.paper_chart
        paper = chart_from_text(pc.polys, [Fraction(x) for x in pc.d], pc.eta, pc.radicand)
    if policy == "paper":
        chart = paper
        if sorted(chart.d) != list(spectrum.d):
            raise ChartError(f"chart degrees {[str(x) for x in chart.d]} differ from the spectrum")
    else:
        chart = solve_chart(gs.eta, spectrum, wc.theta, hint=paper)
        if paper is not None:
            conn = connecting_transformation(chart, paper)
            info["connection_to_recorded_chart"] = conn.text() if conn else None
    check = verify_chart(chart, gs.eta)
    if not check.passed:
        raise ChartError(f"chart does not flatten eta: {check.witness}")
    if not check_homogeneity(chart, wc.theta):
        raise ChartError("chart is not weighted homogeneous")
    info["notes"] = list(chart.notes)
    return chart, info


def build_case(case: CaseManifest, with_checks: bool = True) -> list[CaseResult]:
    """Run the construction; several results when the pencil search is ambiguous."""
    case.validate()
    rs = build_root_system(case.family, case.rank)
    wc = make_weight(rs, case.marks)
    group = generate_group(rs)
    t0 = time.perf_counter()
    resolved = resolve_generators(case, rs, wc, group)
    t_pencil = time.perf_counter() - t0
    results = []
    for sub, gs in resolved:
        results.append(_build_one(sub, rs, wc, group, gs, with_checks, t_pencil))
    return results


def _build_one(case, rs, wc, group, gs, with_checks, t_pencil) -> CaseResult:
    timings = {"pencil": t_pencil}
    ell = rs.rank
    t = time.perf_counter()
    spectrum = degree_spectrum(gs.eta, wc.theta, wc.kappa)
    chart, chart_info = _chart(case, gs, spectrum, wc)
    timings["chart"] = time.perf_counter() - t
    t = time.perf_counter()
    fd = frobenius_structure(gs.g, chart, wc)
    timings["frobenius"] = time.perf_counter() - t
    t = time.perf_counter()
    mono = monodromy_bound(group, wc, chart, gs.z, gs.eta, annotation=case.expected.get("annotation"))
    timings["monodromy"] = time.perf_counter() - t
    checks: dict[str, dict[str, Any]] = {}
    if with_checks:
        t = time.perf_counter()
        for c in verify_gfm(fd) + verify_properties(fd):
            checks[c.name] = {"passed": c.passed, "witness": c.witness}
        checks.update(_pencil_checks(gs))
        lead = verify_leading_terms(gs.z, wc)
        checks["leading_terms"] = {"passed": lead.passed, "witness": "; ".join(lead.witnesses)}
        jac = jacobian_determinant(_basic(rs, wc, group).y, rs, wc)
        checks["jacobian_product_formula"] = {"passed": jac.matches, "witness": ""}
        checks["jacobian_null_restriction"] = {"passed": jac.null_matches, "witness": ""}
        pairing = all(spectrum.d[a] + spectrum.d[ell - 1 - a] == wc.kappa for a in range(ell))
        checks["degree_pairing_spectrum"] = {"passed": pairing, "witness": ""}
        timings["checks"] = time.perf_counter() - t
    basic = _basic(rs, wc, group)
    report = {
        "version": REPORT_VERSION,
        "id": case.id,
        "root_data": {
            "family": rs.family,
            "rank": rs.rank,
            "cartan": [list(row) for row in rs.cartan],
            "simple_roots": [[_frac(x) for x in r] for r in rs.simple_roots],
        },
        "weight": {
            "marks": list(wc.marks),
            "omega": [_frac(x) for x in wc.omega],
            "theta": [_frac(x) for x in wc.theta],
            "kappa": _frac(wc.kappa),
        },
        "generators": {
            "basic": [y.text() for y in basic.y],
            "pencil": [z.text() for z in gs.z],
            "pencil_in_basic": _pencil_text(gs, ell),
            "provenance": gs.provenance,
            "coefficients": gs.coefficient_text(),
            "field": field_name(gs.radicand),
        },
        "metrics": {
            "g": _matrix_text(gs.g),
            "eta": _matrix_text(gs.eta),
            "g_lambda": _lambda_metric(gs.g, gs.eta),
        },
        "degree_spectrum": [_frac(x) for x in spectrum.d],
        "chart": {
            **chart_info,
            "P": chart.text(),
            "d": [_frac(x) for x in chart.d],
            "eta_normal": _matrix_text(chart.eta_normal, format_coeff),
            "field": field_name(chart.radicand),
        },
        "frobenius": {
            "g_t": _matrix_text(fd.g_t, format_rational),
            "F": format_rational(fd.F),
            "e": [format_rational(x) for x in fd.e],
            "e_lower": [format_rational(x) for x in fd.e_lower],
            "euler": [format_rational(x) for x in fd.euler],
            "unit_form": fd.unit_form,
        },
        "monodromy": {
            "stab_generators": [f"sigma{j + 1}" for j in mono.stab_generators],
            "stab_order": mono.stab_order,
            "group_label": mono.group_label,
            "bound_statement": mono.bound_statement,
            "bound_label": mono.bound_label,
            "triviality": mono.triviality,
            "witness": mono.witness,
            "heuristic": mono.heuristic,
            "annotation": mono.annotation,
        },
        "verification": checks,
    }
    return CaseResult(case=case, generators=gs, chart=chart, frobenius=fd, monodromy=mono, report=report, timings=timings)


# -- serialization ---------------------------------------------------------------


def canonical_json(report: dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _reparse_matrix(m, parse, fmt):
    return [[fmt(parse(x)) for x in row] for row in m]


def parse_report(text: str) -> dict[str, Any]:
    """Load a report and re-canonicalize every expression; raises on any drift."""
    data = json.loads(text)
    required = {"version", "id", "root_data", "weight", "generators", "metrics", "degree_spectrum", "chart", "frobenius", "monodromy", "verification"}
    missing = required - set(data)
    if missing:
        raise ValidationError(f"report lacks {', '.join(sorted(missing))}")
    ell = data["root_data"]["rank"]
    rad_g = _radicand(data["generators"]["field"])
    rad_t = _radicand(data["chart"]["field"])
    Rz = zring(ell, quadratic_field(rad_g), with_lambda=False)
    Rl = zring(ell, quadratic_field(rad_g))
    Ft = tfield(ell, quadratic_field(rad_t))
    fz = lambda s: format_poly(parse_poly(s, Rz))
    fl = lambda s: format_poly(parse_poly(s, Rl))
    ft = lambda s: format_rational(parse_rational(s, Ft))
    checks = [
        (data["metrics"]["g"], _reparse_matrix(data["metrics"]["g"], lambda s: s, fz)),
        (data["metrics"]["eta"], _reparse_matrix(data["metrics"]["eta"], lambda s: s, fz)),
        (data["metrics"]["g_lambda"], _reparse_matrix(data["metrics"]["g_lambda"], lambda s: s, fl)),
        (data["frobenius"]["g_t"], _reparse_matrix(data["frobenius"]["g_t"], lambda s: s, ft)),
        (data["frobenius"]["F"], ft(data["frobenius"]["F"])),
        (data["frobenius"]["e"], [ft(s) for s in data["frobenius"]["e"]]),
        (data["chart"]["P"], [ft(s) for s in data["chart"]["P"]]),
    ]
    for original, again in checks:
        if original != again:
            raise ValidationError(f"non-canonical expression in report: {original!r}")
    return data


def _radicand(name: str) -> int:
    return 1 if name == "Q" else int(name[len("Q(sqrt(") : -2])


def first_difference(a: Any, b: Any, path: str = "") -> str | None:
    """Path and values of the first mismatch between two JSON values."""
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b)):
            if k not in a or k not in b:
                return f"{path}/{k}: present in only one report"
            diff = first_difference(a[k], b[k], f"{path}/{k}")
            if diff:
                return diff
        return None
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return f"{path}: length {len(a)} != {len(b)}"
        for i, (x, y) in enumerate(zip(a, b)):
            diff = first_difference(x, y, f"{path}[{i}]")
            if diff:
                return diff
        return None
    return None if a == b else f"{path}: {a!r} != {b!r}"


# -- expected values -------------------------------------------------------------


def compare_expected(result: CaseResult) -> list[str]:
    """Mismatches between the report and the case's transcribed expected values."""
    exp = result.case.expected
    rep = result.report
    ell = rep["root_data"]["rank"]
    Kg = result.generators.domain
    Rl = zring(ell, Kg)
    Rz = zring(ell, Kg, with_lambda=False)
    Ry = zring(ell, Kg, prefix="y")
    Ft = tfield(ell, result.chart.domain)
    fl = lambda s: format_poly(parse_poly(s, Rl))
    fz = lambda s: format_poly(parse_poly(s, Rz))
    fy = lambda s: format_poly(parse_poly(s, Ry))
    ft = lambda s: format_rational(parse_rational(s, Ft))
    out = []

    def check(name, want, got):
        if want != got:
            out.append(f"{name}: expected {want!r}, got {got!r}")

    if "g_lambda" in exp:
        check("g_lambda", [[fl(s) for s in row] for row in exp["g_lambda"]], rep["metrics"]["g_lambda"])
    if "eta" in exp:
        check("eta", [[fz(s) for s in row] for row in exp["eta"]], rep["metrics"]["eta"])
    if "pencil" in exp:
        check("pencil", [fy(s) for s in exp["pencil"]], rep["generators"]["pencil_in_basic"])
    if result.case.effective_policy == "paper":
        if "g_t" in exp:
            check("g_t", [[ft(s) for s in row] for row in exp["g_t"]], rep["frobenius"]["g_t"])
        if "F" in exp:
            check("F", ft(exp["F"]), rep["frobenius"]["F"])
        if "e" in exp:
            check("e", [ft(s) for s in exp["e"]], rep["frobenius"]["e"])
        if "euler" in exp:
            check("euler", [ft(s) for s in exp["euler"]], rep["frobenius"]["euler"])
    if "unit_form" in exp:
        check("unit_form", exp["unit_form"], rep["frobenius"]["unit_form"])
    if "d" in exp:
        check("degree_spectrum", list(exp["d"]), rep["degree_spectrum"])
    if "stab_order" in exp:
        check("stab_order", exp["stab_order"], rep["monodromy"]["stab_order"])
    if "triviality" in exp:
        check("triviality", exp["triviality"], rep["monodromy"]["triviality"])
    return out


def golden_path(case_id: str) -> Path:
    return Path(str(resources.files("affgfm").joinpath(GOLDEN_DIR, f"{case_id}.json")))


def failed_checks(report: dict[str, Any]) -> list[str]:
    return [f"{k}: {v['witness']}" for k, v in sorted(report["verification"].items()) if not v["passed"]]


def timing_table(results: Sequence[CaseResult]) -> dict[str, dict[str, float]]:
    return {r.case.id: {k: round(v, 3) for k, v in r.timings.items()} for r in results}

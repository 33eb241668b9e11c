"""Command line front end: catalog, build, verify and periods.

Exit codes: 0 success; 1 verification failure; 2 invalid input; 3 no pencil
solution; 4 chart or base point failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

import mpmath

from .catalog import (
    CATALOG_IDS,
    CHART_POLICIES,
    CaseManifest,
    case_id_for,
    get_case,
    list_catalog,
    load_manifest,
    match_catalog,
    with_policy,
)
from .errors import GFMError, ValidationError
from .periods import DEFAULT_DIGITS, PeriodProblem, residual_check, series_with_retry
from .pipeline import (
    build_case,
    canonical_json,
    compare_expected,
    failed_checks,
    first_difference,
    golden_path,
    parse_report,
)

EXIT_OK = 0
EXIT_FAILED = 1
DEFAULT_RHOS = ("1/10", "1/100")


def _threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    try:
        return max(1, int(os.environ.get("GFM_THREADS", "1")))
    except ValueError:
        return 1


def _run_all(fn: Callable, items: Sequence, threads: int) -> list:
    """Map in input order; a process pool when asked for more than one worker."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


# -- case resolution -------------------------------------------------------------


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from exc


def resolve_target(target: str | None, args: argparse.Namespace) -> CaseManifest:
    """A catalog id, a manifest path, or a case assembled from --family/--rank/--marks."""
    if target:
        if target in CATALOG_IDS:
            case = get_case(target)
        elif Path(target).is_file():
            case = load_manifest(target)
        else:
            raise ValidationError(f"{target!r} is neither a catalog id nor a manifest file")
    else:
        if not (args.family and args.rank and args.marks):
            raise ValidationError("give a catalog id, a manifest file, or --family, --rank and --marks")
        family = args.family.upper()
        marks = _parse_ints(args.marks)
        coeffs = tuple(c.strip() for c in args.pencil_coeffs.split(",")) if args.pencil_coeffs else None
        known = match_catalog(family, args.rank, marks, coeffs)
        if known is not None:
            case = known
        else:
            case = CaseManifest(
                id=case_id_for(family, args.rank, marks),
                family=family,
                rank=args.rank,
                marks=marks,
                pencil_coefficients=coeffs,
                chart_policy="auto",
            ).validate()
    if getattr(args, "chart", None):
        case = with_policy(case, args.chart)
    return case


# -- build -----------------------------------------------------------------------


def _build_task(job: tuple[CaseManifest, bool]) -> dict[str, Any]:
    """Worker: plain data only, so results cross process boundaries."""
    case, with_checks = job
    try:
        results = build_case(case, with_checks=with_checks)
    except GFMError as exc:
        return {"error": f"{type(exc).__name__}: {exc}", "exit_code": exc.exit_code, "id": case.id}
    return {
        "reports": [
            {
                "id": r.case.id,
                "json": canonical_json(r.report),
                "failed": failed_checks(r.report),
                "expected": compare_expected(r),
                "timings": {k: round(v, 3) for k, v in r.timings.items()},
            }
            for r in results
        ]
    }


def cmd_catalog(args: argparse.Namespace) -> int:
    for case_id in list_catalog(args.filter or ""):
        print(case_id)
    return EXIT_OK


def cmd_build(args: argparse.Namespace) -> int:
    targets = args.targets or [None]
    cases = [resolve_target(t, args) for t in targets]
    outcomes = _run_all(_build_task, [(c, not args.no_checks) for c in cases], _threads(args.threads))
    reports = []
    code = EXIT_OK
    for out in outcomes:
        if "error" in out:
            _err(f"{out['id']}: {out['error']}")
            return out["exit_code"]
        reports.extend(out["reports"])
    for rep in reports:
        timing = ", ".join(f"{k} {v:.2f}s" for k, v in rep["timings"].items())
        print(f"built {rep['id']} ({timing})", file=sys.stderr)
        for line in rep["failed"]:
            print(f"  failed check {line}", file=sys.stderr)
            code = EXIT_FAILED
    if args.out:
        out = Path(args.out)
        if len(reports) == 1 and out.suffix == ".json":
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(reports[0]["json"], encoding="utf-8")
        else:
            out.mkdir(parents=True, exist_ok=True)
            for rep in reports:
                (out / f"{rep['id']}.json").write_text(rep["json"], encoding="utf-8")
    elif len(reports) == 1:
        sys.stdout.write(reports[0]["json"])
    else:
        merged = [json.loads(rep["json"]) for rep in reports]
        sys.stdout.write(json.dumps(merged, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    return code


# -- verify ----------------------------------------------------------------------


def verify_outcome(out: dict[str, Any], golden: Path | None) -> list[str]:
    """Problems with one built report: golden drift, expected values, failed checks."""
    problems = []
    path = golden or golden_path(out["id"])
    if not path.is_file():
        problems.append(f"no golden file at {path}")
    else:
        text = path.read_text(encoding="utf-8")
        try:
            want = json.loads(text)
        except json.JSONDecodeError as exc:
            want = None
            problems.append(f"golden file is not JSON: {exc}")
        if want is not None and text != out["json"]:
            diff = first_difference(want, json.loads(out["json"]))
            problems.append(f"golden mismatch at {diff or 'formatting only'}")
        if want is not None:
            try:
                parse_report(text)
            except ValidationError as exc:
                problems.append(f"golden file is not canonical: {exc}")
    problems += [f"expected {line}" for line in out["expected"]]
    problems += [f"check {line}" for line in out["failed"]]
    return problems


def cmd_verify(args: argparse.Namespace) -> int:
    cases = [resolve_target(t, args) for t in args.targets]
    if args.golden and len(cases) != 1:
        raise ValidationError("--golden takes a single case")
    outcomes = _run_all(_build_task, [(c, True) for c in cases], _threads(args.threads))
    code = EXIT_OK
    for out in outcomes:
        if "error" in out:
            _err(f"{out['id']}: {out['error']}")
            return out["exit_code"]
        for rep in out["reports"]:
            problems = verify_outcome(rep, Path(args.golden) if args.golden else None)
            status = "FAIL" if problems else "ok"
            print(f"{rep['id']}: {status}")
            for p in problems:
                print(f"  {p}")
            if problems:
                code = EXIT_FAILED
    return code


# -- periods ---------------------------------------------------------------------


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"not a rational number: {text!r}") from exc


def cmd_periods(args: argparse.Namespace) -> int:
    if args.order < 0:
        raise ValidationError("--order must be nonnegative")
    case = resolve_target(args.target, args)
    result = build_case(case, with_checks=False)[0]
    weight = result.report["weight"]
    problem = PeriodProblem(
        result.generators.g,
        result.generators.eta,
        [Fraction(x) for x in weight["theta"]],
        Fraction(weight["kappa"]),
        result.chart,
        precision=args.digits,
    )
    point = [_fraction(x) for x in args.point.split(",")] if args.point else None
    try:
        series = series_with_retry(problem, args.order, point)
    except GFMError as exc:
        if point is not None:
            raise type(exc)(f"{exc}; pick another --point or omit it to walk the built-in base points") from exc
        raise
    rhos = [_fraction(x) for x in (args.rho.split(",") if args.rho else DEFAULT_RHOS)]
    residuals = []
    for s in series:
        for rho in rhos:
            res = residual_check(s, rho=rho)
            residuals.append(
                {
                    "alpha": s.alpha + 1,
                    "rho": str(rho),
                    "flatness": _short(res.flatness),
                    "homogeneity": _short(res.homogeneity),
                    "symmetry": _short(res.symmetry),
                }
            )
    doc = {
        "id": result.case.id,
        "order": args.order,
        "digits": args.digits,
        "base_point": [str(x) for x in series[0].base_point],
        "series": [s.to_json() for s in series],
        "residuals": residuals,
    }
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _short(x) -> str:
    return mpmath.nstr(x, 6)


# -- entry point -----------------------------------------------------------------


def _case_flags(p: argparse.ArgumentParser, chart: bool = True) -> None:
    p.add_argument("--family", help="root system family, one of A B C D G")
    p.add_argument("--rank", type=int, help="rank of the root system")
    p.add_argument("--marks", help="weight marks m_1,...,m_l (comma separated)")
    p.add_argument("--pencil-coeffs", help="pin the pencil search to these coefficients (comma separated)")
    if chart:
        p.add_argument("--chart", choices=CHART_POLICIES, help="recorded chart, solved chart, or recorded when available")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="affgfm", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list built-in case ids")
    p.add_argument("filter", nargs="?", default="", help="substring filter")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("build", help="run the pipeline and write JSON reports")
    p.add_argument("targets", nargs="*", help="catalog ids or manifest files")
    _case_flags(p)
    p.add_argument("--out", help="report path (.json) or directory for several reports")
    p.add_argument("--threads", type=int, help="worker processes (default $GFM_THREADS or 1)")
    p.add_argument("--no-checks", action="store_true", help="skip the verification suite")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="compare against golden reports and run all checks")
    p.add_argument("targets", nargs="+", help="catalog ids or manifest files")
    p.add_argument("--golden", help="golden report to compare with instead of the packaged one")
    p.add_argument("--threads", type=int, help="worker processes (default $GFM_THREADS or 1)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("periods", help="truncated period series at a base point")
    p.add_argument("target", help="catalog id or manifest file")
    p.add_argument("--order", type=int, default=8, help="series order K")
    p.add_argument("--point", help="rational base point z0 (comma separated)")
    p.add_argument("--digits", type=int, default=DEFAULT_DIGITS, help="working precision in decimal digits")
    p.add_argument("--rho", help="rho values for the residual summary (comma separated)")
    p.set_defaults(func=cmd_periods)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GFMError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())

"""Built-in cases and the key = value manifest format.

Expected values are transcribed displays; they are compared after parsing
into the same canonical text the pipeline emits, never as raw strings.
Charts are recorded as z = P(t) in the variable order and normalization of
the displays (``chart_d``, ``chart_eta``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .errors import ValidationError
from .rootsys import FAMILIES

CHART_POLICIES = ("paper", "solve", "auto")


@dataclass(frozen=True)
class PaperChart:
    polys: tuple[str, ...]
    d: tuple[str, ...]
    eta: tuple[tuple[str, ...], ...] | None = None
    radicand: int = 1


@dataclass(frozen=True)
class CaseManifest:
    id: str
    family: str
    rank: int
    marks: tuple[int, ...]
    pencil_coefficients: tuple[str, ...] | None = None
    chart_policy: str = "paper"
    paper_chart: PaperChart | None = None
    expected: dict[str, Any] = field(default_factory=dict, hash=False, compare=False)

    def validate(self) -> "CaseManifest":
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}")
        if len(self.marks) != self.rank:
            raise ValidationError(f"expected {self.rank} marks, got {len(self.marks)}")
        if any(m < 0 for m in self.marks) or not any(self.marks):
            raise ValidationError("marks must be nonnegative and not all zero")
        if self.chart_policy not in CHART_POLICIES:
            raise ValidationError(f"chart policy must be one of {CHART_POLICIES}")
        if self.chart_policy == "paper" and self.paper_chart is None:
            raise ValidationError("chart policy 'paper' needs a recorded chart")
        return self

    @property
    def effective_policy(self) -> str:
        """``auto`` uses the recorded chart when there is one and solves otherwise."""
        if self.chart_policy == "auto":
            return "paper" if self.paper_chart is not None else "solve"
        return self.chart_policy


_B3_ETA_FORMS = {
    "k1": (
        ("12*z1 + 2*z2", "3*z3^2 - 16*z1", "6*z3"),
        ("3*z3^2 - 16*z1", "-32*z2 - 12*z3^2 - 64*z1", "-24*z3"),
        ("6*z3", "-24*z3", "0"),
    ),
    "k2": (
        ("4*z1 + 2*z2", "3*z3^2 - 4*z2", "4*z3"),
        ("3*z3^2 - 4*z2", "16*z2 - 4*z3^2", "0"),
        ("4*z3", "0", "0"),
    ),
    "k3": (
        ("-4*z1 + 2*z2", "3*z3^2 - 8*z2", "2*z3"),
        ("3*z3^2 - 8*z2", "4*z3^2", "8*z3"),
        ("2*z3", "8*z3", "16"),
    ),
}

_B3_G = (
    ("-z1^2", "-z1*z2", "-z1*z3/2"),
    ("-z1*z2", "-2*z2^2 - 4*z1*z2 + 2*z1*z3^2", "2*z1*z3 - z2*z3"),
    ("-z1*z3/2", "2*z1*z3 - z2*z3", "-3*z3^2/4 + 4*z1 + z2"),
)

_B3_F_23 = (
    "-t2^4/48 + t1^3/(24*t3) - t1*t2^2*t3/4 - t1^2*t3^2/12 + t2^2*t3^4/24 + t1*t3^5/180 - t3^8/2268"
)


def _b3_lambda_metric(k: str) -> tuple[tuple[str, ...], ...]:
    return tuple(
        tuple(f"{g} + lam*({e})" for g, e in zip(grow, erow)) for grow, erow in zip(_B3_G, _B3_ETA_FORMS[k])
    )


CATALOG: tuple[CaseManifest, ...] = (
    CaseManifest(
        id="a1-w1",
        family="A",
        rank=1,
        marks=(1,),
        paper_chart=PaperChart(polys=("sqrt(2)*t1",), d=("1/2",), radicand=2),
        expected={
            "g_lambda": (("-z1^2/2 + 2*lam",),),
            "F": "-t1^4/24",
            "e": ("-1/t1",),
            "euler": ("t1/2",),
            "d": ("1/2",),
            "stab_order": 1,
            "annotation": "Z",
        },
    ),
    CaseManifest(
        id="a2-w2",
        family="A",
        rank=2,
        marks=(0, 1),
        paper_chart=PaperChart(polys=("3*t1", "t2 + 3*t1^2/2"), d=("1/3", "2/3")),
        expected={
            "g_lambda": (
                ("-2*z1^2/3 + 2*z2", "3*lam - z1*z2/3"),
                ("3*lam - z1*z2/3", "2*lam*z1 - 2*z2^2/3"),
            ),
            "eta": (("0", "3"), ("3", "2*z1")),
            "g_t": (
                ("(2*t2 - 3*t1^2)/9", "-t1*t2 + t1^3/2"),
                ("-t1*t2 + t1^3/2", "-(2*t2 - 3*t1^2)^2/6"),
            ),
            "F": "t2^3/18 - t1^2*t2^2/4 + t1^4*t2/8 - 3*t1^6/80",
            "e": ("-2/(2*t2 + 3*t1^2)", "-6*t1/(2*t2 + 3*t1^2)"),
            "euler": ("t1/3", "2*t2/3"),
            "unit_form": "-dlog(z2)",
            "d": ("1/3", "2/3"),
            "stab_order": 2,
            "triviality": "EqualsBound",
            "annotation": "<sigma1> ⋊ Z^2 = Z2 ⋊ Z^2",
        },
    ),
    CaseManifest(
        id="c3-w3",
        family="C",
        rank=3,
        marks=(0, 0, 1),
        paper_chart=PaperChart(
            polys=(
                "2*sqrt(3)*t2",
                "4*t2^2 - 4*t1*t3",
                "8/(3*sqrt(3))*(t2^3 + t1^3 + t3^3 - 3*t1*t2*t3)",
            ),
            d=("1", "1", "1"),
            radicand=3,
        ),
        expected={
            "g_lambda": (
                ("-z1^2 + 2*z2 + 12*lam", "-z1*z2 + 3*z3 + 8*lam*z1", "-z1*z3 + 4*lam*z2"),
                (
                    "-z1*z2 + 3*z3 + 8*lam*z1",
                    "-2*z2^2 + 2*z1*z3 - 8*lam*z2 + 8*lam*z1^2",
                    "-2*z2*z3 + 4*lam*z1*z2 - 12*lam*z3",
                ),
                (
                    "-z1*z3 + 4*lam*z2",
                    "-2*z2*z3 + 4*lam*z1*z2 - 12*lam*z3",
                    "-3*z3^2 - 8*lam*z1*z3 + 4*lam*z2^2",
                ),
            ),
            "F": "-t1^3*t2/9 - t2^4/36 - t1*t2^2*t3/3 - t1^2*t3^2/6 - t2*t3^3/9",
            "e": (
                "3*(t1*t2 - t3^2)/(2*(t1^3 + t2^3 + t3^3 - 3*t1*t2*t3))",
                "3*(t1*t3 - t2^2)/(2*(t1^3 + t2^3 + t3^3 - 3*t1*t2*t3))",
                "3*(t2*t3 - t1^2)/(2*(t1^3 + t2^3 + t3^3 - 3*t1*t2*t3))",
            ),
            "euler": ("t1/2", "t2/2", "t3/2"),
            "unit_form": "-1/2*(dlog(z3))",
            "d": ("1", "1", "1"),
            "stab_order": 6,
            "triviality": "ProperSubgroupPossible",
            "annotation": "{e} ⋊ Z^3",
        },
    ),
    CaseManifest(
        id="b3-w1-k1",
        family="B",
        rank=3,
        marks=(1, 0, 0),
        pencil_coefficients=("6", "-12"),
        paper_chart=PaperChart(
            polys=(
                "2*t1*t3 + t2^2/3 + t2*t3^3/3 + t3^6/120",
                "-8*t1*t3 - 4*t2^2/3 + 2*t2*t3^3/3 + 13*t3^6/60",
                "t3^3",
            ),
            d=("5/6", "1/2", "1/6"),
            eta=(("0", "0", "1"), ("0", "3", "0"), ("1", "0", "0")),
        ),
        expected={
            "g_lambda": _b3_lambda_metric("k1"),
            "F": (
                "t1^2*t2/(3*t3) - t1^2*t3^2/12 - 2*t1*t2^3/(27*t3^2) - t1*t2^2*t3/36 + t1*t2*t3^4/360"
                " - t1*t3^7/30240 + t2^5/(135*t3^3) - t2^4/432 + t2^3*t3^3/2160 - t2^2*t3^6/8640"
                " + t2*t3^9/172800 - t3^12/7603200"
            ),
            "e": (
                "-6*(40*t1 + 20*t2*t3^2 + t3^5)/(40*t2^2 + 240*t1*t3 + 40*t2*t3^3 + t3^6)",
                "-6*(40*t2 + 20*t3^3)/(40*t2^2 + 240*t1*t3 + 40*t2*t3^3 + t3^6)",
                "-6*40*t3/(40*t2^2 + 240*t1*t3 + 40*t2*t3^3 + t3^6)",
            ),
            "euler": ("5*t1/6", "t2/2", "t3/6"),
            "unit_form": "-dlog(z1)",
            "d": ("1/6", "1/2", "5/6"),
            "stab_order": 8,
            "annotation": "<sigma2,sigma3> ⋊ Z^3 = D4 ⋊ Z^3",
        },
    ),
    CaseManifest(
        id="b3-w1-k2",
        family="B",
        rank=3,
        marks=(1, 0, 0),
        pencil_coefficients=("2", "4"),
        paper_chart=PaperChart(
            polys=("2*t1*t3 - t2^2 + 2*t3^4/3", "4*t2^2 + 4*t3^4", "4*t3^2"),
            d=("3/4", "1/2", "1/4"),
        ),
        expected={
            "g_lambda": _b3_lambda_metric("k2"),
            "F": _B3_F_23,
            "e": (
                "(6*t1 + 8*t3^3)/(3*t2^2 - 6*t1*t3 - 2*t3^4)",
                "-6*t2/(3*t2^2 - 6*t1*t3 - 2*t3^4)",
                "6*t3/(3*t2^2 - 6*t1*t3 - 2*t3^4)",
            ),
            "euler": ("3*t1/4", "t2/2", "t3/4"),
            "unit_form": "-dlog(z1)",
            "d": ("1/4", "1/2", "3/4"),
            "stab_order": 8,
            "annotation": "<sigma2,sigma3> ⋊ Z^3 = D4 ⋊ Z^3",
        },
    ),
    CaseManifest(
        id="b3-w1-k3",
        family="B",
        rank=3,
        marks=(1, 0, 0),
        pencil_coefficients=("-2", "4"),
        paper_chart=PaperChart(
            polys=("-2*t1*t3 + t2^2 - 2*t3^4/3", "4*t2^2 + 4*t3^4", "4*t2"),
            d=("3/4", "1/2", "1/4"),
        ),
        expected={
            "g_lambda": _b3_lambda_metric("k3"),
            "F": _B3_F_23,
            "euler": ("3*t1/4", "t2/2", "t3/4"),
            "unit_form": "-dlog(z1)",
            "d": ("1/4", "1/2", "3/4"),
            "stab_order": 8,
            "annotation": "<sigma2,sigma3> ⋊ Z^3 = D4 ⋊ Z^3",
        },
    ),
    CaseManifest(
        id="g2-w2",
        family="G",
        rank=2,
        marks=(0, 1),
        pencil_coefficients=("-6", "-3", "12"),
        paper_chart=PaperChart(polys=("-6*t1*t2", "(729*t2^6 + 36*t1^2*t2^2)/4"), d=("2", "1")),
        expected={
            "pencil": ("y1 - 6*lam", "y2 - 3*lam*y1 + 12*lam^2"),
            "g_lambda": (
                ("-2*z1^2 + 2*z2 - 12*lam*z1", "-3*z1*z2 + lam*(3*z1^2 - 36*z2)"),
                ("-3*z1*z2 + lam*(3*z1^2 - 36*z2)", "-6*z2^2 + lam*(6*z1^3 - 36*z1*z2)"),
            ),
            "F": "t1^4/(2916*t2^2) - t1^2*t2^2/8 + 81*t2^6/320",
            "e": (
                "-2*(4*t1^2 + 243*t2^4)/(3*t2*(4*t1^2 + 81*t2^4))",
                "-2*4*t1*t2/(3*t2*(4*t1^2 + 81*t2^4))",
            ),
            "euler": ("2*t1/3", "t2/3"),
            "unit_form": "-1/3*(dlog(z2))",
            "d": ("1", "2"),
            "stab_order": 2,
            "triviality": "ProperSubgroupPossible",
            "annotation": "{e} ⋊ Z^2",
        },
    ),
    CaseManifest(
        id="a3-w1w3",
        family="A",
        rank=3,
        marks=(1, 0, 1),
        pencil_coefficients=("4", "-6", "4"),
        paper_chart=PaperChart(
            polys=(
                "t1^4/6 + t1^2*t2 + t2^2/2 + t1*t3",
                "2*t1^4/3 - t2^2 - 2*t1*t3",
                "t1^4/6 - t1^2*t2 + t2^2/2 + t1*t3",
            ),
            d=("1/4", "1/2", "3/4"),
        ),
        expected={
            "pencil": ("y1 + 4*lam", "y2 - 6*lam", "y3 + 4*lam"),
            "eta": (
                ("6*z1 + 2*z2", "-3*z1 + 2*z2 + 3*z3", "z1 + z3"),
                ("-3*z1 + 2*z2 + 3*z3", "-8*z1 - 12*z2 - 8*z3", "3*z1 + 2*z2 - 3*z3"),
                ("z1 + z3", "3*z1 + 2*z2 - 3*z3", "2*z2 + 6*z3"),
            ),
            "F": (
                "-t1^8/18144 + t1^5*t3/720 - t2^6/(96*t1^4) - t1^4*t2^2/288 + t2^4*t3/(16*t1^3)"
                " - t2^2*t3^2/(8*t1^2) - t1^2*t3^2/24 - t1*t2^2*t3/24 + t3^3/(24*t1) - t2^4/96"
            ),
            "e": (
                "(-12*t1^5 - 72*t3*t1^2 - 36*t2^2*t1)/((t1^4 - 6*t2*t1^2 + 6*t3*t1 + 3*t2^2)*(t1^4 + 6*t2*t1^2 + 6*t3*t1 + 3*t2^2))",
                "(60*t2*t1^4 - 72*t2*t3*t1 - 36*t2^3)/((t1^4 - 6*t2*t1^2 + 6*t3*t1 + 3*t2^2)*(t1^4 + 6*t2*t1^2 + 6*t3*t1 + 3*t2^2))",
                "(-8*t1^7 - 60*t3*t1^4 + 120*t2^2*t1^3 - 72*t3^2*t1 - 36*t2^2*t3)/((t1^4 - 6*t2*t1^2 + 6*t3*t1 + 3*t2^2)*(t1^4 + 6*t2*t1^2 + 6*t3*t1 + 3*t2^2))",
            ),
            "euler": ("t1/4", "t2/2", "3*t3/4"),
            "unit_form": "-(dlog(z1) + dlog(z3))",
            "d": ("1/4", "1/2", "3/4"),
            "stab_order": 2,
            "annotation": "<sigma2> ⋊ Z^3",
        },
    ),
)

CATALOG_IDS = tuple(c.id for c in CATALOG)


def list_catalog(pattern: str = "") -> list[str]:
    """Ids containing ``pattern`` (all ids for an empty pattern)."""
    return [c for c in CATALOG_IDS if pattern in c]


def get_case(case_id: str) -> CaseManifest:
    for c in CATALOG:
        if c.id == case_id:
            return c
    raise ValidationError(f"unknown case id {case_id!r}; known: {', '.join(CATALOG_IDS)}")


def match_catalog(family: str, rank: int, marks, coefficients) -> CaseManifest | None:
    """The catalog entry with this root data and pinned coefficients, if any."""
    marks = tuple(marks)
    coefficients = tuple(coefficients or ())
    for c in CATALOG:
        if (c.family, c.rank, c.marks) == (family, rank, marks) and tuple(c.pencil_coefficients or ()) == coefficients:
            return c
    return None


def case_id_for(family: str, rank: int, marks) -> str:
    """Catalog-style id: ``b3-w1`` for marks (1,0,0), ``a3-w1w3`` for (1,0,1), ``2w1`` for a mark 2."""
    parts = "".join(f"{'' if m == 1 else m}w{j + 1}" for j, m in enumerate(marks) if m)
    return f"{family.lower()}{rank}-{parts}"


# -- manifest files -----------------------------------------------------------------


def _split(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def parse_manifest(text: str) -> CaseManifest:
    """Plain ``key = value`` lines; ``#`` starts a comment.

    Keys: id, family, rank, marks, pencil_coefficients, chart_policy and, for
    a user-supplied chart, chart_polys (``;``-separated), chart_d, chart_eta
    (rows separated by ``;``) and radicand.  A known ``id`` starts from the
    catalog entry and the remaining keys override it.
    """
    values: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"manifest line {n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = value
    known = {"id", "family", "rank", "marks", "pencil_coefficients", "chart_policy", "chart_polys", "chart_d", "chart_eta", "radicand"}
    unknown = set(values) - known
    if unknown:
        raise ValidationError(f"unknown manifest keys: {', '.join(sorted(unknown))}")
    base = None
    if values.get("id") in CATALOG_IDS:
        base = get_case(values["id"])
    try:
        family = values.get("family", base.family if base else "").upper()
        rank = int(values["rank"]) if "rank" in values else (base.rank if base else 0)
        marks = tuple(int(m) for m in _split(values["marks"])) if "marks" in values else (base.marks if base else ())
    except ValueError as exc:
        raise ValidationError(f"bad manifest value: {exc}") from exc
    coeffs = _split(values["pencil_coefficients"]) if "pencil_coefficients" in values else (base.pencil_coefficients if base else None)
    chart = base.paper_chart if base else None
    if "chart_polys" in values:
        eta = None
        if "chart_eta" in values:
            eta = tuple(_split(row) for row in values["chart_eta"].split(";"))
        chart = PaperChart(
            polys=tuple(p.strip() for p in values["chart_polys"].split(";")),
            d=_split(values.get("chart_d", "")),
            eta=eta,
            radicand=int(values.get("radicand", "1")),
        )
    policy = values.get("chart_policy", "auto")
    case_id = values.get("id") or case_id_for(family, rank, marks)
    manifest = CaseManifest(
        id=case_id,
        family=family,
        rank=rank,
        marks=marks,
        pencil_coefficients=coeffs or None,
        chart_policy=policy,
        paper_chart=chart,
        expected=base.expected if base and not set(values) - {"id", "chart_policy"} else {},
    )
    return manifest.validate()


def load_manifest(path: str | Path) -> CaseManifest:
    return parse_manifest(Path(path).read_text(encoding="utf-8"))


def with_policy(case: CaseManifest, policy: str) -> CaseManifest:
    return replace(case, chart_policy=policy).validate()

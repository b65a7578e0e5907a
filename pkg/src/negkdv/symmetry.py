"""Scaling gradings, t-degree profiles and stated point symmetries."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Mapping, NamedTuple

from .anchors import anchor
from .diffalg import DiffPoly, DVar, render_monomial_key
from .report import Report

__all__ = [
    "WeightSystem", "HomogeneityResult", "check_homogeneous", "find_scaling_weights",
    "family_contains", "t_degree_profile", "equivariance_check", "symmetry_reports",
]


@dataclass(frozen=True)
class WeightSystem:
    independent: Mapping[str, Fraction]
    dependent: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "independent",
                           {k: Fraction(v) for k, v in self.independent.items()})
        object.__setattr__(self, "dependent",
                           {k: Fraction(v) for k, v in self.dependent.items()})

    def _x(self) -> Fraction:
        for key in ("x", "v"):
            if key in self.independent:
                return self.independent[key]
        return Fraction(0)

    def of(self, v: DVar) -> Fraction:
        if v.name not in self.dependent:
            raise KeyError(f"no weight assigned to {v.name!r}")
        wt = self.independent.get("t", Fraction(0))
        if v.t_order and "t" not in self.independent:
            raise KeyError("t-derivative present but t has no weight")
        return self.dependent[v.name] - v.t_order * wt - v.x_order * self._x()

    def monomial_weight(self, key) -> Fraction:
        return sum((e * self.of(v) for v, e in key), Fraction(0))

    def scaled(self, r) -> "WeightSystem":
        r = Fraction(r)
        return WeightSystem({k: v * r for k, v in self.independent.items()},
                            {k: v * r for k, v in self.dependent.items()})

    def to_dict(self):
        return {**{k: v for k, v in sorted(self.independent.items())},
                **{k: v for k, v in sorted(self.dependent.items())}}

    def render(self) -> str:
        return "(" + ", ".join(f"{k}:{v}" for k, v in self.to_dict().items()) + ")"


class HomogeneityResult(NamedTuple):
    holds: bool
    weight: Fraction | None
    mismatch: tuple | None = None

    def __bool__(self):
        return self.holds


def check_homogeneous(p: DiffPoly, ws: WeightSystem) -> HomogeneityResult:
    first = None
    for key, _ in p.terms:
        w = ws.monomial_weight(key)
        if first is None:
            first = (key, w)
        elif w != first[1]:
            return HomogeneityResult(False, None,
                                     ((render_monomial_key(first[0]), first[1]),
                                      (render_monomial_key(key), w)))
    return HomogeneityResult(True, first[1] if first else Fraction(0))


def _nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][fc]
        basis.append(vec)
    return basis


def _unknowns(p: DiffPoly, x_label: str) -> list[str]:
    dv = p.dvars()
    out = []
    if any(v.x_order for v in dv):
        out.append(x_label)
    if any(v.t_order for v in dv):
        out.append("t")
    return out + sorted(p.names())


def find_scaling_weights(p: DiffPoly, x_label: str = "x") -> list[WeightSystem]:
    """Basis of all gradings making ``p`` homogeneous.

    Independent variables that never occur as derivation variables are left
    out of the unknowns (their weight is irrelevant).
    """
    unk = _unknowns(p, x_label)
    idx = {k: i for i, k in enumerate(unk)}

    def row(key):
        r = [Fraction(0)] * len(unk)
        for v, e in key:
            r[idx[v.name]] += e
            if v.x_order:
                r[idx[x_label]] -= e * v.x_order
            if v.t_order:
                r[idx["t"]] -= e * v.t_order
        return r
    keys = [k for k, _ in p.terms]
    if not keys:
        raise ValueError("the zero polynomial has no grading")
    base = row(keys[0])
    rows = [[a - b for a, b in zip(row(k), base)] for k in keys[1:]]
    basis = _nullspace(rows, len(unk)) if rows else _nullspace([[Fraction(0)] * len(unk)], len(unk))
    out = []
    for vec in basis:
        lead = vec[idx[x_label]] if x_label in idx and vec[idx[x_label]] else next(x for x in vec if x)
        vec = [x / lead for x in vec]
        ind = {k: vec[idx[k]] for k in (x_label, "t") if k in idx}
        dep = {k: vec[idx[k]] for k in unk if k not in (x_label, "t")}
        out.append(WeightSystem(ind, dep))
    return out


def family_contains(basis: list[WeightSystem], ws: WeightSystem) -> bool:
    """Is ``ws`` (restricted to the basis coordinates) in the span of ``basis``?"""
    if not basis:
        return all(v == 0 for v in ws.to_dict().values())
    keys = list(basis[0].to_dict())
    target = [Fraction(ws.to_dict().get(k, 0)) for k in keys]
    cols = [[b.to_dict()[k] for k in keys] for b in basis]
    # solve sum c_i cols[i] = target by elimination on the augmented system
    rows = [[cols[i][j] for i in range(len(cols))] + [target[j]] for j in range(len(keys))]
    ns = _nullspace(rows, len(cols) + 1)
    return any(vec[-1] != 0 for vec in ns)


def t_degree_profile(p: DiffPoly) -> list[tuple[str, int, int]]:
    """Per monomial: (monomial, number of t-differentiated factors, max t-order)."""
    out = []
    for key, _ in p.terms:
        count = sum(e for v, e in key if v.t_order >= 1)
        mx = max((v.t_order for v, _ in key), default=0)
        out.append((render_monomial_key(key), count, mx))
    return out


def uniform_profile(p: DiffPoly, expected=(1, 1)) -> bool:
    return all((c, m) == tuple(expected) for _, c, m in t_degree_profile(p))


def equivariance_check(p: DiffPoly, ws: WeightSystem, lam: Fraction = Fraction(3, 2)) -> bool:
    """``p`` evaluated on ``lam^w``-scaled jets equals ``lam^W p`` exactly.

    Weights are first scaled to integers so that ``lam^w`` stays rational.
    """
    res = check_homogeneous(p, ws)
    if not res.holds:
        return False
    den = reduce(lcm, (Fraction(v).denominator for v in ws.to_dict().values()), 1)
    iws = ws.scaled(den)
    lam = Fraction(lam)

    def rule(v: DVar):
        if v.name not in iws.dependent:
            return None
        return DiffPoly.from_dvar(v).scale(lam ** int(iws.of(v)))
    scaled = p.substitute(rule)
    return scaled == p.scale(lam ** int(res.weight * den))


def _ws(**kw) -> WeightSystem:
    ind = {k: v for k, v in kw.items() if k in ("x", "t", "v")}
    dep = {k: v for k, v in kw.items() if k not in ind}
    return WeightSystem(ind, dep)


def symmetry_reports(p: DiffPoly | None = None, eq_id: str | None = None) -> list[Report]:
    """Audit the stated symmetries (or grade an arbitrary expression)."""
    from .identities import cleared_numerator, expand_cleared, REGISTRY
    if p is not None or (eq_id is not None and eq_id not in ("eq1b", "eq101", "eq102", "eq105", "all")):
        if p is None:
            p = cleared_numerator(eq_id)
        label = eq_id or "expr"
        x_label = "x" if any(v.t_order for v in p.dvars()) else "v"
        fam = find_scaling_weights(p, x_label)
        return [Report(f"symmetry.{label}.weights", "pass", anchor("symmetry"),
                       {"family": [w.to_dict() for w in fam],
                        "t_profile_uniform_1_1": uniform_profile(p)})]
    reports = []
    want = eq_id or "all"
    # translations: no explicit x or t can be represented, so autonomy is structural
    if want == "all":
        explicit = [k for k, e in REGISTRY.items()
                    if ({"x", "t"} & (e.form.names() if isinstance(e.form, DiffPoly)
                                      else e.form.num.names() | e.form.den.names()))]
        reports.append(Report("symmetry.translation", "pass" if not explicit else "fail",
                              anchor("symmetry"),
                              {"claim": "Gamma1 = d/dx",
                               "check": "registry forms contain no explicit independent variable",
                               "offending": explicit}))
    grading = _ws(x=1, t=0, u=-2)
    if want in ("all", "eq1b", "eq101"):
        for key, poly in (("eq1b", cleared_numerator("eq1b")), ("eq101", cleared_numerator("eq101"))):
            if want not in ("all", key):
                continue
            res = check_homogeneous(poly, grading)
            fam = find_scaling_weights(poly)
            details = {"claim": "Gamma2 = x d/dx - 2u d/du", "weights": grading.to_dict(),
                       "homogeneous": res.holds, "weight": res.weight,
                       "family": [w.to_dict() for w in fam],
                       "in_family": family_contains(fam, grading),
                       "equivariant": equivariance_check(poly, grading)}
            if not res.holds:
                details["mismatch"] = res.mismatch
            ok = res.holds and details["in_family"] and details["equivariant"]
            reports.append(Report(f"symmetry.{key}.scaling", "pass" if ok else "fail",
                                  anchor("symmetry"), details))
    if want in ("all", "eq101", "eq1b", "eq105"):
        targets = {"eq1b": cleared_numerator("eq1b"), "eq101": cleared_numerator("eq101"),
                   "cleared5": expand_cleared(5)}
        for key, poly in targets.items():
            if want != "all" and not (want == key or (want == "eq105" and key == "cleared5")):
                continue
            prof = t_degree_profile(poly)
            ok = uniform_profile(poly)
            reports.append(Report(f"symmetry.{key}.t_profile", "pass" if ok else "fail",
                                  anchor("symmetry"),
                                  {"claim": "Gamma3 = a(t) d/dt", "uniform_1_1": ok,
                                   "profile": [list(r) for r in prof]}))
    if want in ("all", "eq102"):
        poly = cleared_numerator("eq102")
        fam = find_scaling_weights(poly, "v")
        derived = _ws(v=1, w=-2)
        printed = _ws(v=2, w=-3)
        hd = check_homogeneous(poly, derived)
        hp = check_homogeneous(poly, printed)
        details = {"family": [w.to_dict() for w in fam], "dimension": len(fam),
                   "derived_generator": derived.to_dict(), "derived_weight": hd.weight,
                   "printed_generator": printed.to_dict(),
                   "printed_in_family": family_contains(fam, printed),
                   "printed_homogeneous": hp.holds}
        if hp.mismatch:
            details["printed_mismatch"] = hp.mismatch
        ok = len(fam) == 1 and family_contains(fam, derived)
        status = "fail" if not ok else ("discrepancy" if not details["printed_in_family"] else "pass")
        reports.append(Report("symmetry.eq102.scaling", status, anchor("eq102"), details))
    return reports

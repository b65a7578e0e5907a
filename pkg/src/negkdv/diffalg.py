"""Exact differential polynomials in the jet coordinates ``name_{t^a x^b}``.

Coefficients are :class:`fractions.Fraction`; nothing in this module touches
floating point except :meth:`DiffPoly.evaluate`.  Two kinds of symbols exist:

* dependent variables (``u``, ``psi``, ``f`` ...), which carry derivative
  orders and are differentiated by :func:`total_derivative`;
* formal constants (``mu``, ``c``, ``A`` ...), which never carry derivatives
  and are annihilated by every derivation.
"""
from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, NamedTuple, Union

__all__ = [
    "DVar", "Monomial", "DiffPoly", "RationalDiffExpr", "HillIdeal",
    "TotalDerivativeResult", "register", "is_constant_name", "is_registered",
    "var", "const", "dp_arith", "total_derivative", "reduce_hill",
    "substitute_t_derivatives", "substitute_function", "euler_operator",
    "is_total_x_derivative", "rq_arith",
]

Scalar = Union[int, Fraction]

_DEPENDENT: set[str] = {"u", "psi", "psi1", "psi2", "f", "g", "w", "phi", "h"}
_CONSTANTS: set[str] = {"mu", "c", "A", "p", "n", "lam", "nu", "a", "s"}


def register(name: str, constant: bool = False) -> None:
    """Make ``name`` available as a dependent variable or formal constant."""
    if not name.isidentifier() or name in ("x", "t", "v", "D"):
        raise ValueError(f"invalid symbol name {name!r}")
    other = _DEPENDENT if constant else _CONSTANTS
    if name in other:
        raise ValueError(f"{name!r} is already registered with the other kind")
    (_CONSTANTS if constant else _DEPENDENT).add(name)


def is_registered(name: str) -> bool:
    return name in _DEPENDENT or name in _CONSTANTS


def is_constant_name(name: str) -> bool:
    return name in _CONSTANTS


class DVar(NamedTuple):
    """One jet coordinate: ``name`` differentiated ``t_order`` times in t and
    ``x_order`` times in x."""

    name: str
    t_order: int = 0
    x_order: int = 0

    def render(self) -> str:
        if not self.t_order and not self.x_order:
            return self.name
        return f"{self.name}_{'t' * self.t_order}{'x' * self.x_order}"

    def dx(self) -> "DVar":
        return DVar(self.name, self.t_order, self.x_order + 1)

    def dt(self) -> "DVar":
        return DVar(self.name, self.t_order + 1, self.x_order)


# A monomial key is a sorted tuple of (DVar, exponent) pairs.
Key = tuple


class Monomial(NamedTuple):
    coeff: Fraction
    factors: Key

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.factors)


def _order(key: Key):
    return (sum(e for _, e in key), key)


def _mul_keys(k1: Key, k2: Key) -> Key:
    if not k1:
        return k2
    if not k2:
        return k1
    merged = dict(k1)
    for v, e in k2:
        merged[v] = merged.get(v, 0) + e
    return tuple(sorted(merged.items()))


def _drop_one(key: Key, v: DVar) -> Key:
    out = []
    for w, e in key:
        if w == v:
            if e > 1:
                out.append((w, e - 1))
        else:
            out.append((w, e))
    return tuple(out)


class DiffPoly:
    """Canonical multivariate polynomial over the rationals in jet coordinates.

    Immutable.  Monomials are kept sorted by total degree, then
    lexicographically on ``(name, t_order, x_order)``; structural equality
    is mathematical equality.
    """

    __slots__ = ("_terms", "_dict", "_hash")

    def __init__(self, terms: Mapping[Key, Scalar] | None = None):
        d = {}
        if terms:
            for k, c in terms.items():
                if c:
                    d[k] = Fraction(c)
        self._dict = d
        self._terms = tuple(sorted(d.items(), key=lambda kv: _order(kv[0])))
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, c: Scalar) -> "DiffPoly":
        return cls({(): c})

    @classmethod
    def from_dvar(cls, v: DVar, exp: int = 1) -> "DiffPoly":
        if v.name not in _DEPENDENT and v.name not in _CONSTANTS:
            raise KeyError(f"unregistered symbol {v.name!r}")
        if v.name in _CONSTANTS and (v.t_order or v.x_order):
            raise ValueError(f"constant {v.name!r} cannot carry derivatives")
        return cls({((v, exp),): 1})

    @staticmethod
    def coerce(obj) -> "DiffPoly":
        if isinstance(obj, DiffPoly):
            return obj
        if isinstance(obj, (int, Fraction)):
            return DiffPoly.constant(obj)
        raise TypeError(f"cannot coerce {type(obj).__name__} to DiffPoly")

    # inspection -------------------------------------------------------
    @property
    def terms(self) -> tuple:
        return self._terms

    def monomials(self) -> list[Monomial]:
        return [Monomial(c, k) for k, c in self._terms]

    def as_dict(self) -> dict:
        return dict(self._dict)

    def coeff(self, key: Key) -> Fraction:
        return self._dict.get(key, Fraction(0))

    def is_zero(self) -> bool:
        return not self._dict

    def __bool__(self) -> bool:
        return bool(self._dict)

    def __len__(self) -> int:
        return len(self._terms)

    def dvars(self) -> set[DVar]:
        return {v for k in self._dict for v, _ in k}

    def names(self) -> set[str]:
        return {v.name for v in self.dvars()}

    def dependent_names(self) -> set[str]:
        return {n for n in self.names() if n not in _CONSTANTS}

    def is_constant(self) -> bool:
        """True when no dependent variable occurs (formal constants allowed)."""
        return not self.dependent_names()

    def total_degree(self) -> int:
        return max((sum(e for _, e in k) for k in self._dict), default=0)

    def degree_in(self, name: str) -> int:
        return max((sum(e for v, e in k if v.name == name) for k in self._dict), default=0)

    def max_order(self, name: str, which: str = "x") -> int:
        idx = 2 if which == "x" else 1
        return max((v[idx] for v in self.dvars() if v.name == name), default=-1)

    def as_scalar(self) -> Fraction:
        if not self._dict:
            return Fraction(0)
        if set(self._dict) != {()}:
            raise ValueError("polynomial is not a rational constant")
        return self._dict[()]

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = DiffPoly.coerce(other)
        except TypeError:
            return NotImplemented
        d = dict(self._dict)
        for k, c in other._dict.items():
            d[k] = d.get(k, 0) + c
        return DiffPoly(d)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly({k: -c for k, c in self._dict.items()})

    def __sub__(self, other):
        try:
            other = DiffPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return DiffPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        d: dict = {}
        for k1, c1 in self._dict.items():
            for k2, c2 in other._dict.items():
                k = _mul_keys(k1, k2)
                d[k] = d.get(k, 0) + c1 * c2
        return DiffPoly(d)

    __rmul__ = __mul__

    def scale(self, r: Scalar) -> "DiffPoly":
        r = Fraction(r)
        if not r:
            return DiffPoly()
        return DiffPoly({k: c * r for k, c in self._dict.items()})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return RationalDiffExpr(self, DiffPoly.coerce(other))

    def __rtruediv__(self, other):
        return RationalDiffExpr(DiffPoly.coerce(other), self)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("exponent must be an int")
        if k < 0:
            raise ValueError("negative exponent; use RationalDiffExpr for quotients")
        result, base = DiffPoly.constant(1), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DiffPoly.constant(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    # calculus ---------------------------------------------------------
    def partial(self, v: DVar) -> "DiffPoly":
        """Ordinary partial derivative with respect to one jet coordinate."""
        d: dict = {}
        for k, c in self._dict.items():
            for w, e in k:
                if w == v:
                    nk = _drop_one(k, v)
                    d[nk] = d.get(nk, 0) + c * e
        return DiffPoly(d)

    def _derive(self, step: Callable[[DVar], DVar]) -> "DiffPoly":
        d: dict = {}
        for k, c in self._dict.items():
            for w, e in k:
                if w.name in _CONSTANTS:
                    continue
                nk = _mul_keys(_drop_one(k, w), ((step(w), 1),))
                d[nk] = d.get(nk, 0) + c * e
        return DiffPoly(d)

    def dx(self, times: int = 1) -> "DiffPoly":
        p = self
        for _ in range(times):
            p = p._derive(DVar.dx)
        return p

    def dt(self, times: int = 1) -> "DiffPoly":
        p = self
        for _ in range(times):
            p = p._derive(DVar.dt)
        return p

    # substitution / evaluation ---------------------------------------
    def substitute(self, rule: Callable[[DVar], "DiffPoly | None"]) -> "DiffPoly":
        """Replace every factor ``v`` for which ``rule(v)`` is not None."""
        cache: dict = {}
        powers: dict = {}
        out: dict = {}
        for k, c in self._dict.items():
            keep = []
            prod = None
            for v, e in k:
                if v not in cache:
                    r = rule(v)
                    cache[v] = None if r is None else DiffPoly.coerce(r)
                r = cache[v]
                if r is None:
                    keep.append((v, e))
                    continue
                if (v, e) not in powers:
                    powers[(v, e)] = r ** e
                r = powers[(v, e)]
                prod = r if prod is None else prod * r
            keep = tuple(keep)
            if prod is None:
                out[keep] = out.get(keep, 0) + c
                continue
            for pk, pc in prod._dict.items():
                nk = _mul_keys(pk, keep)
                out[nk] = out.get(nk, 0) + pc * c
        return DiffPoly(out)

    def subs(self, values: Mapping[str, "DiffPoly | Scalar"]) -> "DiffPoly":
        """Substitute zero-order symbols (typically constants) by name."""
        def rule(v: DVar):
            if v.name in values and not v.t_order and not v.x_order:
                return DiffPoly.coerce(values[v.name])
            return None
        return self.substitute(rule)

    def evaluate(self, values: Mapping):
        """Numerically evaluate; ``values`` maps DVar (or bare names for
        zero-order symbols) to numbers or numpy arrays."""
        total = 0
        for k, c in self._terms:
            term = float(c)
            for v, e in k:
                if v in values:
                    val = values[v]
                elif not v.t_order and not v.x_order and v.name in values:
                    val = values[v.name]
                else:
                    raise KeyError(f"no value supplied for {v.render()}")
                term = term * val ** e
            total = total + term
        return total

    # rendering ----------------------------------------------------------
    def __str__(self) -> str:
        return render_poly(self)

    def __repr__(self) -> str:
        return f"DiffPoly({render_poly(self)!r})"


def _fmt_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_monomial_key(key: Key) -> str:
    return "*".join(v.render() + (f"^{e}" if e != 1 else "") for v, e in key)


def render_poly(p: DiffPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for i, (k, c) in enumerate(reversed(p.terms)):
        neg = c < 0
        a = -c if neg else c
        body = render_monomial_key(k)
        if not body:
            s = _fmt_fraction(a)
        elif a == 1:
            s = body
        else:
            s = f"{_fmt_fraction(a)}*{body}"
        if i == 0:
            parts.append(("-" if neg else "") + s)
        else:
            parts.append((" - " if neg else " + ") + s)
    return "".join(parts)


def var(name: str, t: int = 0, x: int = 0) -> DiffPoly:
    """The jet coordinate ``name_{t^t x^x}`` as a polynomial."""
    return DiffPoly.from_dvar(DVar(name, t, x))


def const(c: Scalar) -> DiffPoly:
    return DiffPoly.constant(c)


def dp_arith(a: DiffPoly, b, kind: str) -> DiffPoly:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "scale":
        return a.scale(b)
    if kind == "power":
        return a ** b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def total_derivative(p: DiffPoly, var: str) -> DiffPoly:
    if var == "x":
        return p.dx()
    if var == "t":
        return p.dt()
    raise ValueError("derivation variable must be 'x' or 't'")


# --------------------------------------------------------------------------
# rational expressions

class RationalDiffExpr:
    """``num / den`` with no GCD reduction; equality cross-multiplies."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num, den = DiffPoly.coerce(num), DiffPoly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    @staticmethod
    def coerce(obj) -> "RationalDiffExpr":
        if isinstance(obj, RationalDiffExpr):
            return obj
        return RationalDiffExpr(DiffPoly.coerce(obj))

    def is_polynomial(self) -> bool:
        return self.den.is_constant() and not self.den.names()

    def to_poly(self) -> DiffPoly:
        if not self.is_polynomial():
            raise ValueError("denominator is not a rational constant")
        return self.num.scale(1 / self.den.as_scalar())

    def __add__(self, other):
        other = RationalDiffExpr.coerce(other)
        if self.den == other.den:
            return RationalDiffExpr(self.num + other.num, self.den)
        if other.den == 1:
            return RationalDiffExpr(self.num + other.num * self.den, self.den)
        if self.den == 1:
            return RationalDiffExpr(self.num * other.den + other.num, other.den)
        return RationalDiffExpr(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalDiffExpr(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalDiffExpr.coerce(other))

    def __rsub__(self, other):
        return RationalDiffExpr.coerce(other) - self

    def __mul__(self, other):
        other = RationalDiffExpr.coerce(other)
        return RationalDiffExpr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RationalDiffExpr.coerce(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero expression")
        return RationalDiffExpr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RationalDiffExpr.coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        return RationalDiffExpr(self.num ** k, self.den ** k)

    def _quotient_rule(self, d: Callable[[DiffPoly], DiffPoly]) -> "RationalDiffExpr":
        if self.den.is_constant():
            return RationalDiffExpr(d(self.num), self.den)
        return RationalDiffExpr(d(self.num) * self.den - self.num * d(self.den),
                                self.den * self.den)

    def dx(self) -> "RationalDiffExpr":
        return self._quotient_rule(DiffPoly.dx)

    def dt(self) -> "RationalDiffExpr":
        return self._quotient_rule(DiffPoly.dt)

    def equals(self, other) -> bool:
        other = RationalDiffExpr.coerce(other)
        return (self.num * other.den - other.num * self.den).is_zero()

    def __eq__(self, other):
        try:
            return self.equals(other)
        except TypeError:
            return NotImplemented

    __hash__ = None

    def evaluate(self, values):
        return self.num.evaluate(values) / self.den.evaluate(values)

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalDiffExpr({str(self)!r})"


def rq_arith(a, b, kind: str):
    a = RationalDiffExpr.coerce(a)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    if kind == "derivative_x":
        return a.dx()
    if kind == "derivative_t":
        return a.dt()
    if kind == "equals":
        return a.equals(b)
    raise ValueError(f"unknown kind {kind!r}")


# --------------------------------------------------------------------------
# Hill ideal  v_xx = -potential * v

class HillIdeal:
    """Rewrite rules ``v_xx -> -q v`` for each bound variable ``v``."""

    __slots__ = ("rules",)

    def __init__(self, rules: Mapping[str, str]):
        for v, q in rules.items():
            if v not in _DEPENDENT or q not in _DEPENDENT:
                raise KeyError(f"unregistered name in rule {v!r} -> {q!r}")
            if v == q or q in rules:
                raise ValueError("the potential must not itself be bound")
        self.rules = dict(sorted(rules.items()))

    @classmethod
    def single(cls, bound: str = "psi", potential: str = "u") -> "HillIdeal":
        return cls({bound: potential})

    @classmethod
    def pair(cls, potential: str = "u") -> "HillIdeal":
        return cls({"psi1": potential, "psi2": potential})

    def __repr__(self):
        return f"HillIdeal({self.rules!r})"


@lru_cache(maxsize=None)
def hill_normal_form(potential: str, k: int) -> tuple[DiffPoly, DiffPoly]:
    """(alpha, beta) with psi_{x^k} = alpha*psi + beta*psi_x modulo the ideal."""
    if k == 0:
        return DiffPoly.constant(1), DiffPoly()
    if k == 1:
        return DiffPoly(), DiffPoly.constant(1)
    a, b = hill_normal_form(potential, k - 1)
    q = var(potential)
    return a.dx() - q * b, a + b.dx()


def _check_hill(p: DiffPoly, ideal: HillIdeal) -> None:
    for v in p.dvars():
        if v.name in ideal.rules and v.t_order:
            raise ValueError(
                f"{v.render()}: t-derivatives of Hill-bound variables are not "
                "modelled; substitute the t-flow before reducing")


def reduce_hill(p: DiffPoly, ideal: HillIdeal, rng: random.Random | None = None) -> DiffPoly:
    """Normal form of ``p`` modulo the Hill ideal.

    Every bound factor ends with x-order at most 1.  With ``rng`` given the
    rewriting is done one elementary step at a time in a random order instead
    of through the closed-form table; both routes give the same result.
    """
    _check_hill(p, ideal)
    if rng is not None:
        return _reduce_hill_stepwise(p, ideal, rng)

    def rule(v: DVar):
        if v.name in ideal.rules and v.x_order >= 2:
            a, b = hill_normal_form(ideal.rules[v.name], v.x_order)
            return a * var(v.name) + b * var(v.name, 0, 1)
        return None
    return p.substitute(rule)


def _reduce_hill_stepwise(p: DiffPoly, ideal: HillIdeal, rng: random.Random) -> DiffPoly:
    while True:
        hits = [(k, v) for k, _ in p.terms for v, _ in k
                if v.name in ideal.rules and v.x_order >= 2]
        if not hits:
            return p
        k, v = rng.choice(hits)
        c = p.coeff(k)
        # psi_{x^j} -> -D_x^{j-2}(q psi), applied to one occurrence only
        repl = -(var(ideal.rules[v.name]) * var(v.name)).dx(v.x_order - 2)
        rest = DiffPoly({_drop_one(k, v): c})
        p = p - DiffPoly({k: c}) + rest * repl


def substitute_function(p: DiffPoly, name: str, expr: DiffPoly) -> DiffPoly:
    """Replace the dependent variable ``name`` (and all its derivatives) by
    ``expr`` (and the matching total derivatives of it)."""
    cache: dict = {}

    def rule(v: DVar):
        if v.name != name:
            return None
        if v not in cache:
            cache[v] = expr.dt(v.t_order).dx(v.x_order)
        return cache[v]
    return p.substitute(rule)


def substitute_t_derivatives(p: DiffPoly, target: str, base: DiffPoly) -> DiffPoly:
    """Replace ``target_{t x^j}`` by ``D_x^j(base)``; t-free factors are kept."""
    for v in p.dvars():
        if v.name == target and v.t_order >= 2:
            raise ValueError(f"{v.render()} has t-order >= 2; only first-order "
                             "t-flows can be substituted")

    def rule(v: DVar):
        if v.name == target and v.t_order == 1:
            return base.dx(v.x_order)
        return None
    return p.substitute(rule)


# --------------------------------------------------------------------------
# variational calculus

def _euler_layer(p: DiffPoly, name: str, t_order: int) -> DiffPoly:
    top = max((v.x_order for v in p.dvars() if v.name == name and v.t_order == t_order),
              default=-1)
    out = DiffPoly()
    for k in range(top + 1):
        term = p.partial(DVar(name, t_order, k)).dx(k)
        out = out + (term if k % 2 == 0 else -term)
    return out


def euler_operator(p: DiffPoly, var: str) -> DiffPoly:
    """Variational derivative sum_k (-D_x)^k dp/d(var_{x^k})."""
    if var in _CONSTANTS:
        raise ValueError(f"{var!r} is a formal constant")
    if any(v.name == var and v.t_order for v in p.dvars()):
        raise ValueError(f"{var!r} occurs with t-derivatives")
    return _euler_layer(p, var, 0)


class TotalDerivativeResult(NamedTuple):
    holds: bool
    witness: DiffPoly | None = None
    variable: str | None = None

    def __bool__(self):
        return self.holds


def is_total_x_derivative(p: DiffPoly) -> TotalDerivativeResult:
    """Decide whether ``p = D_x(q)`` for some differential polynomial ``q``.

    Every t-layer ``name_{t^a}`` is treated as its own x-jet variable.  A
    term free of dependent variables is never exact (the ring has no ``x``).
    """
    free = DiffPoly({k: c for k, c in p.terms
                     if all(v.name in _CONSTANTS for v, _ in k)})
    if not free.is_zero():
        return TotalDerivativeResult(False, free, None)
    layers = sorted({(v.name, v.t_order) for v in p.dvars() if v.name not in _CONSTANTS})
    for name, a in layers:
        e = _euler_layer(p, name, a)
        if not e.is_zero():
            label = DVar(name, a, 0).render()
            return TotalDerivativeResult(False, e, label)
    return TotalDerivativeResult(True)

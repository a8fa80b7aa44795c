"""Exact coefficient arithmetic.

Four coefficient worlds share one interface:

* ``Rational``     -- arbitrary-precision fractions (the q = 1 world),
* ``RatFunc``      -- the field of rational functions in a formal unit q,
                      stored as Laurent numerator over a monic ordinary
                      denominator in lowest terms,
* ``Cyclotomic``   -- the field Q(zeta_N), elements reduced modulo the N-th
                      cyclotomic polynomial (the q = zeta_N world),
* ``FloatComplex`` -- complex doubles, used by the growth analyzer only.

There is no implicit coercion between variants: mixing them raises
``VariantMismatch``.  All exact variants have decidable equality by
structural comparison of canonical forms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import PoleAtTarget, VariantMismatch

# ---------------------------------------------------------------------------
# sparse polynomial helpers: {exponent: Fraction}, zero coefficients dropped.
# Ordinary polynomials have min exponent >= 0; Laurent polynomials may not.


def _pnorm(d):
    return {e: c for e, c in d.items() if c != 0}


def _padd(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, Fraction(0)) + c
    return _pnorm(out)


def _pneg(a):
    return {e: -c for e, c in a.items()}


def _pmul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return _pnorm(out)


def _pscale(a, c):
    if c == 0:
        return {}
    return {e: ca * c for e, ca in a.items()}


def _pshift(a, k):
    return {e + k: c for e, c in a.items()}


def _pdeg(a):
    return max(a) if a else None


def _pdivmod(a, b):
    """Ordinary polynomial division: a = q*b + r with deg r < deg b."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = {}
    r = dict(a)
    db, lb = _pdeg(b), b[_pdeg(b)]
    while r and _pdeg(r) >= db:
        e = _pdeg(r) - db
        c = r[_pdeg(r)] / lb
        q[e] = c
        for eb, cb in b.items():
            r[eb + e] = r.get(eb + e, Fraction(0)) - c * cb
        r = _pnorm(r)
    return q, r


def _pgcd(a, b):
    """Monic gcd of two ordinary polynomials over Q."""
    a, b = _pnorm(a), _pnorm(b)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    if not a:
        return {}
    lead = a[_pdeg(a)]
    return {e: c / lead for e, c in a.items()}


def _peval_scalar(a, x):
    """Evaluate a polynomial dict at a Scalar point x."""
    total = zero(x.variant)
    for e, c in a.items():
        total = total + from_fraction(x.variant, c) * x**e
    return total


def _peval_complex(a, x):
    total = 0j
    for e, c in a.items():
        total += float(c) * x**e
    return total


def _pxgcd(a, b):
    """Extended Euclid: returns (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = _pnorm(a), _pnorm(b)
    s0, s1 = {0: Fraction(1)}, {}
    t0, t1 = {}, {0: Fraction(1)}
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _padd(s0, _pneg(_pmul(q, s1)))
        t0, t1 = t1, _padd(t0, _pneg(_pmul(q, t1)))
    if not r0:
        return {}, s0, t0
    lead = r0[_pdeg(r0)]
    inv = 1 / lead
    return _pscale(r0, inv), _pscale(s0, inv), _pscale(t0, inv)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n):
    """The n-th cyclotomic polynomial as a sparse dict, computed by
    dividing q^n - 1 by the cyclotomic polynomials of the proper divisors."""
    if n < 1:
        raise ValueError("n must be positive")
    num = {n: Fraction(1), 0: Fraction(-1)}
    for d in range(1, n):
        if n % d == 0:
            q, r = _pdivmod(num, dict(cyclotomic_polynomial(d)))
            assert not r
            num = q
    return tuple(sorted(num.items()))


def euler_phi(n):
    return _pdeg(dict(cyclotomic_polynomial(n)))


# ---------------------------------------------------------------------------
# variants


@dataclass(frozen=True)
class Variant:
    kind: str  # "rational" | "ratfunc" | "cyclotomic" | "float"
    order: int | None = None  # N for cyclotomic

    def __repr__(self):
        if self.kind == "cyclotomic":
            return f"Variant(cyclotomic, N={self.order})"
        return f"Variant({self.kind})"


RATIONAL = Variant("rational")
RATFUNC = Variant("ratfunc")
FLOAT = Variant("float")


def cyclotomic_variant(n):
    return Variant("cyclotomic", n)


class Scalar:
    """Common interface of all coefficient values."""

    variant: Variant

    def _check(self, other):
        if not isinstance(other, Scalar):
            raise TypeError(f"expected Scalar, got {type(other).__name__}")
        if other.variant != self.variant:
            raise VariantMismatch(f"{self.variant} vs {other.variant}")

    def is_zero(self):
        raise NotImplementedError

    def inv(self):
        raise NotImplementedError

    def __sub__(self, other):
        return self + (-other)

    def __truediv__(self, other):
        self._check(other)
        return self * other.inv()

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        base = self if k >= 0 else self.inv()
        out = one(self.variant)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __bool__(self):
        return not self.is_zero()


class Rational(Scalar):
    __slots__ = ("value",)
    variant = RATIONAL

    def __init__(self, value):
        self.value = Fraction(value)

    def is_zero(self):
        return self.value == 0

    def inv(self):
        return Rational(1 / self.value)

    def __add__(self, other):
        self._check(other)
        return Rational(self.value + other.value)

    def __neg__(self):
        return Rational(-self.value)

    def __mul__(self, other):
        self._check(other)
        return Rational(self.value * other.value)

    def __eq__(self, other):
        return isinstance(other, Rational) and self.value == other.value

    def __hash__(self):
        return hash(("Q", self.value))

    def __repr__(self):
        return f"Rational({self.value})"

    def __str__(self):
        return _frac_str(self.value)


def _frac_str(f):
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


class RatFunc(Scalar):
    """num/den with num a Laurent polynomial in q, den a monic ordinary
    polynomial, gcd(ordinary part of num, den) = 1."""

    __slots__ = ("num", "den")
    variant = RATFUNC

    def __init__(self, num, den=None, _reduced=False):
        if den is None:
            den = {0: Fraction(1)}
        num, den = _pnorm(num), _pnorm(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            num, den = self._reduce(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def _reduce(num, den):
        # clear any q-powers from the denominator: q is a unit
        dmin = min(den)
        if dmin != 0:
            den = _pshift(den, -dmin)
            num = _pshift(num, -dmin)
        if not num:
            return {}, {0: Fraction(1)}
        # gcd acts on the ordinary part of the numerator; the minimal q-power
        # of the numerator is a unit and rides along untouched
        nmin = min(num)
        nord = _pshift(num, -nmin) if nmin else dict(num)
        if den == {0: Fraction(1)}:
            return num, den
        g = {0: Fraction(1)} if _pdeg(nord) == 0 else _pgcd(nord, den)
        if g != {0: Fraction(1)}:
            nord = _pdivmod(nord, g)[0]
            den = _pdivmod(den, g)[0]
        lead = den[_pdeg(den)]
        if lead != 1:
            inv = 1 / lead
            nord = _pscale(nord, inv)
            den = _pscale(den, inv)
        num = _pshift(nord, nmin) if nmin else nord
        return num, den

    def is_zero(self):
        return not self.num

    def inv(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __add__(self, other):
        self._check(other)
        if self.den == other.den:
            if self.den == {0: Fraction(1)}:
                return RatFunc(_padd(self.num, other.num), None, _reduced=True)
            return RatFunc(_padd(self.num, other.num), self.den)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return RatFunc(num, _pmul(self.den, other.den))

    def __neg__(self):
        return RatFunc(_pneg(self.num), self.den, _reduced=True)

    def __mul__(self, other):
        self._check(other)
        if self.den == {0: Fraction(1)} and other.den == {0: Fraction(1)}:
            return RatFunc(_pmul(self.num, other.num), None, _reduced=True)
        return RatFunc(_pmul(self.num, other.num), _pmul(self.den, other.den))

    def __eq__(self, other):
        return (
            isinstance(other, RatFunc)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash(("Qq", tuple(sorted(self.num.items())), tuple(sorted(self.den.items()))))

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        return f"({_poly_str(self.num)})/({_poly_str(self.den)})"


def _poly_str(d):
    if not d:
        return "0"
    parts = []
    for e in sorted(d, reverse=True):
        c = d[e]
        cs = _frac_str(abs(c))
        if e == 0:
            term = cs
        else:
            qe = "q" if e == 1 else f"q^{e}"
            term = qe if cs == "1" else f"{cs}*{qe}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts)


_TERM_RE = re.compile(
    r"(?P<sign>[+-])?\s*(?:(?P<coef>\d+(?:/\d+)?)\s*\*?\s*)?(?:q(?:\^(?P<exp>-?\d+))?)?"
)


def _poly_parse(s):
    s = s.strip()
    if s == "0":
        return {}
    out = {}
    pos = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad polynomial string: {s!r} at {pos}")
        sign = -1 if m.group("sign") == "-" else 1
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        body = s[m.start() : m.end()]
        if "q" in body:
            exp = int(m.group("exp")) if m.group("exp") else 1
        else:
            exp = 0
            if m.group("coef") is None:
                raise ValueError(f"bad polynomial term in {s!r}")
        out[exp] = out.get(exp, Fraction(0)) + sign * coef
        pos = m.end()
        while pos < len(s) and s[pos] == " ":
            pos += 1
    return _pnorm(out)


class Cyclotomic(Scalar):
    """An element of Q(zeta_N), stored as a polynomial in zeta_N of degree
    below phi(N)."""

    __slots__ = ("order", "coeffs", "variant")

    def __init__(self, order, coeffs):
        self.order = order
        self.variant = cyclotomic_variant(order)
        phi = dict(cyclotomic_polynomial(order))
        c = _pnorm({e: Fraction(v) for e, v in coeffs.items()})
        if c and _pdeg(c) >= _pdeg(phi):
            c = _pdivmod(c, phi)[1]
        self.coeffs = c

    def is_zero(self):
        return not self.coeffs

    def inv(self):
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero")
        phi = dict(cyclotomic_polynomial(self.order))
        g, s, _ = _pxgcd(self.coeffs, phi)
        assert _pdeg(g) == 0, "cyclotomic polynomial is irreducible over Q"
        return Cyclotomic(self.order, _pscale(s, 1 / g[0]))

    def __add__(self, other):
        self._check(other)
        return Cyclotomic(self.order, _padd(self.coeffs, other.coeffs))

    def __neg__(self):
        return Cyclotomic(self.order, _pneg(self.coeffs))

    def __mul__(self, other):
        self._check(other)
        return Cyclotomic(self.order, _pmul(self.coeffs, other.coeffs))

    def __eq__(self, other):
        return (
            isinstance(other, Cyclotomic)
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash(("zeta", self.order, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        return f"Cyclotomic({self.order}, {self})"

    def __str__(self):
        body = _poly_str(self.coeffs).replace("q", "z")
        return f"cyc{self.order}({body})"


class FloatComplex(Scalar):
    __slots__ = ("value",)
    variant = FLOAT

    def __init__(self, value):
        self.value = complex(value)

    def is_zero(self):
        return self.value == 0

    def inv(self):
        return FloatComplex(1 / self.value)

    def __add__(self, other):
        self._check(other)
        return FloatComplex(self.value + other.value)

    def __neg__(self):
        return FloatComplex(-self.value)

    def __mul__(self, other):
        self._check(other)
        return FloatComplex(self.value * other.value)

    def __eq__(self, other):
        return isinstance(other, FloatComplex) and self.value == other.value

    def __hash__(self):
        return hash(("C", self.value))

    def __repr__(self):
        return f"FloatComplex({self.value})"

    def __str__(self):
        return f"fc({self.value.real!r},{self.value.imag!r})"


# ---------------------------------------------------------------------------
# constructors and generic helpers


def zero(variant):
    return from_int(variant, 0)


def one(variant):
    return from_int(variant, 1)


def from_int(variant, n):
    return from_fraction(variant, Fraction(n))


def from_fraction(variant, f):
    f = Fraction(f)
    if variant.kind == "rational":
        return Rational(f)
    if variant.kind == "ratfunc":
        return RatFunc({0: f} if f else {})
    if variant.kind == "cyclotomic":
        return Cyclotomic(variant.order, {0: f} if f else {})
    if variant.kind == "float":
        return FloatComplex(float(f))
    raise ValueError(f"unknown variant {variant}")


def formal_q(exp=1):
    """The monomial q^exp in Q(q)."""
    return RatFunc({exp: Fraction(1)})


def zeta(order, exp=1):
    """The root of unity zeta_N^exp in Q(zeta_N)."""
    return Cyclotomic(order, {exp % order: Fraction(1)})


def simplify(s):
    """Canonical form of a scalar.  Construction already canonicalizes, so
    this is the identity; it exists so callers can state the intent."""
    return s


def specialize(s, target):
    """Specialize a formal rational function at a root of unity or on the
    unit circle.

    ``target`` is either ``("root", N)`` for q = zeta_N (exact, yields a
    Cyclotomic) or ``("float", theta)`` for q = exp(2*pi*i*theta) (yields a
    FloatComplex).  Raises PoleAtTarget when the denominator vanishes at the
    requested root of unity.
    """
    if not isinstance(s, RatFunc):
        raise VariantMismatch("specialize expects a RatFunc scalar")
    kind, arg = target
    if kind == "root":
        z = zeta(arg)
        den = _peval_scalar(s.den, z)
        if den.is_zero():
            raise PoleAtTarget(f"denominator vanishes at zeta_{arg}")
        num = _peval_scalar(s.num, z)
        return num * den.inv()
    if kind == "float":
        import cmath

        q = cmath.exp(2j * cmath.pi * float(arg))
        den = _peval_complex(s.den, q)
        if den == 0:
            raise PoleAtTarget(f"denominator vanishes at exp(2*pi*i*{arg})")
        num = _peval_complex(s.num, q)
        return FloatComplex(num / den)
    raise ValueError(f"unknown specialization target {target!r}")


# ---------------------------------------------------------------------------
# textual serialization: self-describing strings, exact round trip


def scalar_to_string(s):
    return str(s)


_CYC_RE = re.compile(r"^cyc(\d+)\((.*)\)$")
_FC_RE = re.compile(r"^fc\((.*),(.*)\)$")


def scalar_from_string(text):
    text = text.strip()
    m = _FC_RE.match(text)
    if m:
        return FloatComplex(complex(float(m.group(1)), float(m.group(2))))
    m = _CYC_RE.match(text)
    if m:
        body = m.group(2).replace("z", "q")
        return Cyclotomic(int(m.group(1)), _poly_parse(body))
    if text.startswith("("):
        num_s, den_s = _split_ratfunc(text)
        return RatFunc(_poly_parse(num_s), _poly_parse(den_s))
    return Rational(Fraction(text))


def _split_ratfunc(text):
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                break
    num = text[1:i]
    rest = text[i + 1 :]
    if not rest.startswith("/(") or not rest.endswith(")"):
        raise ValueError(f"bad rational-function string {text!r}")
    return num, rest[2:-1]

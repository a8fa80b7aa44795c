"""Weight functions, Diophantine small divisors, and growth classification.

Everything here is finite-sample: verdicts describe behavior "on the sampled
range" and never assert an infinite-range statement.  Exact rational
arithmetic is used wherever an inequality is decided (weights, combing,
argument reduction for the small divisors); floats appear only in fitted
slopes and residuals that feed the frozen classification thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    InsufficientRange,
    PrecisionExhausted,
    SingularGenerator,
)
from .groupalg import Group, lattice

# frozen classification constants
POLY_SLOPE_TOL = 0.15  # log-log slope must be this close to an integer
POLY_RESIDUAL_TOL = 0.1  # max |log10 residual| on the top decade
SUPER_POLY_RATIO = 1.5  # log g / log m at a sample point raises the flag
EXP_RATE_MIN = 0.01  # min slope of log g against m for "exponential"
DECAY_SLOPE_SLACK = 0.05  # shell-increment slope allowed for "consistent"
FLOAT_CF_BUDGET = 1 << 26  # convergent denominator limit for float theta


# ---------------------------------------------------------------------------
# theta specifications and continued fractions


@dataclass(frozen=True)
class ThetaSpec:
    """The rotation number: exact rational, finite list of continued-fraction
    partial quotients, or a float sample."""

    kind: str  # "rational" | "cf" | "float"
    rational: Fraction | None = None
    quotients: tuple | None = None
    value: float | None = None

    def __post_init__(self):
        if self.kind == "cf":
            qs = self.quotients
            if not qs:
                raise ValueError("cf spec needs at least one partial quotient")
            if any(a < 1 for a in qs[1:]):
                raise ValueError("partial quotients a_k must be >= 1 for k >= 1")

    @classmethod
    def from_rational(cls, p, n):
        return cls("rational", rational=Fraction(p, n))

    @classmethod
    def from_cf(cls, quotients):
        return cls("cf", quotients=tuple(int(a) for a in quotients))

    @classmethod
    def from_float(cls, x):
        return cls("float", value=float(x))

    @classmethod
    def parse(cls, text):
        """Grammar: "p/N" | "cf:a0,a1,..." | "float:x" | bare integer."""
        if text.startswith("cf:"):
            return cls.from_cf(int(a) for a in text[3:].split(","))
        if text.startswith("float:"):
            return cls.from_float(float(text[6:]))
        if "/" in text:
            p, n = text.split("/")
            return cls.from_rational(int(p), int(n))
        return cls.from_rational(int(text), 1)

    def as_fraction(self):
        """Exact value of the spec (the finite CF value for cf inputs,
        the exact binary value for floats)."""
        if self.kind == "rational":
            return self.rational
        if self.kind == "cf":
            val = Fraction(self.quotients[-1])
            for a in reversed(self.quotients[:-1]):
                val = a + (1 / val if val else Fraction(0))
            return val
        return Fraction(self.value)


@dataclass
class ContinuedFraction:
    quotients: list
    convergents: list  # (p_k, q_k)
    exact: bool  # False when a float ran against the digit budget


def continued_fraction(theta, terms):
    """Euclidean continued-fraction expansion with convergents.

    Rational and cf specs are exact (the expansion may terminate before the
    requested number of terms).  Float specs expand the exact binary value
    but raise PrecisionExhausted once the convergent denominators pass the
    reliable-digit budget.
    """
    if theta.kind == "cf":
        qs = list(theta.quotients[:terms])
    else:
        x = theta.as_fraction()
        qs = []
        for _ in range(terms):
            a = math.floor(x)
            qs.append(a)
            frac = x - a
            if frac == 0:
                break
            x = 1 / frac
    pm1, pm2 = 1, 0
    qm1, qm2 = 0, 1
    convergents = []
    budget_ok = True
    for i, a in enumerate(qs):
        p = a * pm1 + pm2
        q = a * qm1 + qm2
        if theta.kind == "float" and q > FLOAT_CF_BUDGET:
            qs = qs[:i]
            budget_ok = False
            break
        convergents.append((p, q))
        pm2, pm1 = pm1, p
        qm2, qm1 = qm1, q
    if theta.kind == "float" and not budget_ok and len(qs) < terms:
        raise PrecisionExhausted(
            f"float theta supports only {len(qs)} reliable partial quotients, "
            f"{terms} requested"
        )
    return ContinuedFraction(qs, convergents, theta.kind != "float" or budget_ok)


# ---------------------------------------------------------------------------
# growth verdicts


@dataclass
class GrowthVerdict:
    growth_class: str  # root-of-unity | polynomial | subexponential |
    #                    exponential | super-exponential | inconclusive
    degree: int | None = None
    super_polynomial_flag: bool = False
    sampled_range: tuple | None = None
    witness: dict = field(default_factory=dict)
    note: str = "verdict holds on the sampled range only"

    def to_json(self):
        return {
            "class": self.growth_class,
            "degree": self.degree,
            "super_polynomial_flag": self.super_polynomial_flag,
            "sampled_range": list(self.sampled_range) if self.sampled_range else None,
            "witness": self.witness,
            "note": self.note,
        }


def _fit_line(xs, ys):
    """Least-squares slope/intercept plus max absolute residual."""
    n = len(xs)
    if n < 2:
        return 0.0, (ys[0] if ys else 0.0), 0.0
    mx = sum(xs) / n
    my = sum(ys) / n
    den = sum((x - mx) ** 2 for x in xs)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / den if den else 0.0
    icept = my - slope * mx
    res = max(abs(y - (slope * x + icept)) for x, y in zip(xs, ys))
    return slope, icept, res


def _classify_samples(samples):
    """Classify growth of the running maximum of positive samples (m, g)."""
    # keep only the points where the running maximum increases
    record = []
    cur = 0.0
    for m, g in samples:
        if g > cur:
            cur = g
            if m >= 2:
                record.append((m, g))
    if len(record) < 2:
        record = [(m, g) for m, g in samples[-2:]]
    flag = any(
        math.log(g) / math.log(m) >= SUPER_POLY_RATIO
        for m, g in record
        if m >= 8 and g > 1
    )
    m_top = record[-1][0]
    top = [(m, g) for m, g in record if m >= m_top / 10] or record[-2:]
    xs = [math.log10(m) for m, _ in top]
    ys = [math.log10(g) for _, g in top]
    slope, _, res = _fit_line(xs, ys)
    witness = {
        "fitted_slope": round(slope, 4),
        "max_residual": round(res, 4),
        "samples": [[m, round(math.log10(g), 4)] for m, g in record[-8:]],
    }
    d = round(slope)
    if abs(slope - d) <= POLY_SLOPE_TOL and res <= POLY_RESIDUAL_TOL and not flag:
        return GrowthVerdict("polynomial", degree=int(d), witness=witness)
    # exponential: log g linear in m on the record points
    exs = [m for m, _ in record]
    eys = [math.log(g) for _, g in record]
    eslope, _, eres = _fit_line(exs, eys)
    if eslope >= EXP_RATE_MIN and eres <= 0.2 * max(abs(y) for y in eys):
        witness["exp_rate"] = round(eslope, 4)
        return GrowthVerdict(
            "exponential", super_polynomial_flag=flag, witness=witness
        )
    if flag:
        # super-polynomial at the sampled points: log g / log m keeps growing
        ratios = [
            math.log(g) / math.log(m) for m, g in record if m >= 8 and g > 1
        ]
        cls = (
            "super-exponential"
            if eslope > 0 and eys[-1] / max(exs) > 1.0
            else "subexponential"
        )
        witness["log_ratio_last"] = round(ratios[-1], 4) if ratios else None
        return GrowthVerdict(cls, super_polynomial_flag=True, witness=witness)
    return GrowthVerdict("inconclusive", witness=witness)


# ---------------------------------------------------------------------------
# small divisors


def _dist_to_z(x):
    """Exact distance from the rational x to the nearest integer."""
    f = x - math.floor(x)
    return min(f, 1 - f)


def small_divisor_growth(theta, m_range):
    """Growth class of g(m) = |1 - e^{2 pi i theta m}|^{-1} = 1/(2 sin(pi x))
    with x the exact distance from theta*m to the nearest integer.

    Rational theta gives the root-of-unity verdict (the divisor vanishes on
    a subgroup).  CF specs are sampled at their convergent denominators q_k,
    where the classification happens (that is where the running maximum
    lives: |q_k theta - p_k| ~ 1/q_{k+1}); float specs are sampled densely.
    """
    if m_range < 1000:
        raise ValueError("small_divisor_growth needs a range of at least 10^3")
    if theta.kind == "rational":
        th = theta.rational
        n = th.denominator
        return GrowthVerdict(
            "root-of-unity",
            sampled_range=(1, m_range),
            witness={"order": n, "vanishing_multiples": n if n > 1 else 1},
            note="divisor vanishes exactly on multiples of the denominator",
        )
    th = theta.as_fraction()
    if theta.kind == "cf":
        cf = continued_fraction(theta, 64)
        # sample at convergent denominators (skip the last, whose distance
        # to the finite-CF value is an artifact of truncation)
        samples = []
        for p, q in cf.convergents[:-1]:
            if q > m_range or q < 1:
                continue
            x = _dist_to_z(th * q)
            if x == 0:
                continue
            samples.append((q, 1.0 / (2.0 * math.sin(math.pi * float(x)))))
        if len(samples) < 3:
            return GrowthVerdict(
                "inconclusive",
                sampled_range=(1, m_range),
                witness={"reason": "fewer than 3 convergents in range"},
            )
    else:
        samples = []
        for m in range(1, m_range + 1):
            x = _dist_to_z(th * m)
            if x == 0:
                return GrowthVerdict(
                    "root-of-unity",
                    sampled_range=(1, m_range),
                    witness={"vanishing_at": m},
                    note="float theta is exactly rational in binary",
                )
            samples.append((m, 1.0 / (2.0 * math.sin(math.pi * float(x)))))
    verdict = _classify_samples(samples)
    verdict.sampled_range = (1, m_range)
    verdict.witness["algebra_hint"] = _algebra_hint(verdict.growth_class)
    return verdict


def _algebra_hint(cls):
    """Interpretive mapping from growth class to the smallest completed
    algebra whose Hochschild homology should agree with the algebraic one."""
    table = {
        "polynomial": "S",
        "subexponential": "S^omega",
        "exponential": "O",
    }
    algebra = table.get(cls)
    return {
        "algebra": algebra,
        "interpretive": True,
        "statement": (
            f"growth class '{cls}' read as the decay condition matching "
            f"{algebra or 'no listed algebra'}; the class-to-algebra mapping "
            "is an interpretation, not a computed fact"
        ),
    }


# ---------------------------------------------------------------------------
# matrix representation growth


def _sup_digits(k):
    sup = "⁰¹²³⁴⁵⁶⁷⁸⁹"
    return "".join(sup[int(c)] for c in str(k))


def matrix_rep_growth(generators, m_range):
    """Operator-norm growth of powers of the generators of a Z^n action.

    Powers are computed exactly (repeated squaring over Q) on a geometric
    grid of exponents; norms are bounded by the max row sum of absolute
    values and refined with a float spectral norm when the entries fit.
    Returns the fitted growth exponent and the tempered-class verdict.
    """
    mats = []
    for gen in generators:
        m = [[Fraction(x) for x in row] for row in gen]
        n = len(m)
        if any(len(row) != n for row in m):
            raise ValueError("generators must be square")
        if _det(m) == 0:
            raise SingularGenerator(f"generator {gen} is not invertible")
        mats.append(m)
    grid = []
    k = 1
    while k < m_range:
        grid.append(k)
        k *= 2
    grid.append(m_range)
    worst_slope = 0.0
    worst_exp_rate = 0.0
    norm_tables = []
    for m in mats:
        for a in (m, _inv(m)):
            table = []
            power = None
            prev = 1
            for e in grid:
                power = a if power is None else _matpow_step(power, a, e - prev, m=None)
                prev = e
                table.append((e, _log_norm(power)))
            norm_tables.append(table)
            xs = [math.log(e + 1) for e, _ in table]
            ys = [ln for _, ln in table]
            slope, _, _ = _fit_line(xs, ys)
            worst_slope = max(worst_slope, slope)
            erate, _, _ = _fit_line([e for e, _ in table], ys)
            worst_exp_rate = max(worst_exp_rate, erate)
    exponential = worst_exp_rate > EXP_RATE_MIN and worst_slope > 3.0
    witness = {
        "fitted_exponent": round(worst_slope, 4),
        "norm_log_samples": [
            [e, round(ln, 4)] for e, ln in norm_tables[0][-6:]
        ],
    }
    if exponential:
        v = GrowthVerdict("exponential", witness=witness, sampled_range=(1, m_range))
        v.witness["tempered"] = "not 𝒮^k-tempered for any k"
        return v
    k = max(0, round(worst_slope))
    v = GrowthVerdict(
        "polynomial", degree=k, witness=witness, sampled_range=(1, m_range)
    )
    if k == 0:
        v.witness["tempered"] = "ℓ₁-tempered"
    else:
        v.witness["tempered"] = f"𝒮{_sup_digits(k)}-tempered, not ℓ₁-tempered"
    return v


def _det(m):
    n = len(m)
    a = [row[:] for row in m]
    det = Fraction(1)
    for j in range(n):
        piv = next((i for i in range(j, n) if a[i][j]), None)
        if piv is None:
            return Fraction(0)
        if piv != j:
            a[j], a[piv] = a[piv], a[j]
            det = -det
        det *= a[j][j]
        inv = 1 / a[j][j]
        for i in range(j + 1, n):
            f = a[i][j] * inv
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[j])]
    return det


def _inv(m):
    n = len(m)
    a = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for j in range(n):
        piv = next(i for i in range(j, n) if a[i][j])
        a[j], a[piv] = a[piv], a[j]
        inv = 1 / a[j][j]
        a[j] = [x * inv for x in a[j]]
        for i in range(n):
            if i != j and a[i][j]:
                f = a[i][j]
                a[i] = [x - f * y for x, y in zip(a[i], a[j])]
    return [row[n:] for row in a]


def _matmul(a, b):
    n = len(a)
    return [
        [sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)]
        for i in range(n)
    ]


def _matpow_step(power, base, steps, m=None):
    """power * base^steps by repeated squaring."""
    acc = power
    sq = base
    while steps:
        if steps & 1:
            acc = _matmul(acc, sq)
        steps >>= 1
        if steps:
            sq = _matmul(sq, sq)
    return acc


def _log_norm(m):
    """log of the max-row-sum norm, exactly via integer logs, refined by a
    float spectral norm when the entries are representable."""
    best = None
    for row in m:
        s = sum(abs(x) for x in row)
        if s:
            ln = math.log(s.numerator) - math.log(s.denominator)
            best = ln if best is None else max(best, ln)
    if best is None:
        return 0.0
    if best < 300:  # entries fit in floats: tighten with the spectral norm
        import numpy as np

        a = np.array([[float(x) for x in row] for row in m])
        sv = np.linalg.svd(a, compute_uv=False)
        if sv.size and sv[0] > 0:
            best = min(best, math.log(sv[0]) + 1e-12)
    return best


# ---------------------------------------------------------------------------
# weight functions


@dataclass
class WeightFunction:
    """A submultiplicative positive weight on a group.

    kind "polynomial": w = (l+1)^k (exact integer values);
    kind "homomorphism": w = exp(a . x) on Z^n, handled in log space with
    the exact rational linear form a; kind "custom": an explicit callable
    returning positive rationals.
    """

    group: Group
    kind: str
    param: object  # k | tuple of Fractions | callable

    def value(self, g):
        if self.kind == "polynomial":
            return Fraction((self.group.length(g) + 1) ** self.param)
        if self.kind == "custom":
            return Fraction(self.param(g))
        raise ValueError("homomorphism weights are evaluated in log space")

    def log_value(self, g):
        """Exact rational logarithm; only for homomorphism weights."""
        if self.kind != "homomorphism":
            raise ValueError(f"no exact log for kind {self.kind!r}")
        return sum(
            (Fraction(a) * x for a, x in zip(self.param, g)), Fraction(0)
        )

    def describe(self):
        if self.kind == "polynomial":
            return f"(l+1)^{self.param}"
        if self.kind == "homomorphism":
            return f"exp({tuple(str(a) for a in self.param)} . x)"
        return "custom"


def polynomial_weight(group, k):
    return WeightFunction(group, "polynomial", int(k))


def homomorphism_weight(group, coeffs):
    return WeightFunction(group, "homomorphism", tuple(Fraction(a) for a in coeffs))


def word_length(g, group):
    return group.length(g)


def is_submultiplicative(w, radius):
    """Exhaustive check of w(gh) <= w(g) w(h) on the radius ball; returns
    None on pass or the first violating pair (g, h)."""
    ball = w.group.ball(radius)
    if w.kind == "homomorphism":
        for g in ball:
            lg = w.log_value(g)
            for h in ball:
                if w.log_value(w.group.mul(g, h)) > lg + w.log_value(h):
                    return (g, h)
        return None
    vals = {g: w.value(g) for g in ball}
    for g in ball:
        vg = vals[g]
        for h in ball:
            if w.value(w.group.mul(g, h)) > vg * vals[h]:
                return (g, h)
    return None


# ---------------------------------------------------------------------------
# Schwartz-class membership (finite-sample consistency only)


def schwartz_membership(samples, group, cls):
    """Consistency of the sampled decay of f with the weighted-l1 class.

    samples: dict element -> value, covering the ball of some radius R >= 16.
    cls: "S" (polynomial weights (l+1)^k), "S^omega" (exp(sqrt(l))),
    "O" (exp(a l)).  The test aggregates |f| into shells, weights them, and
    requires the log shell-mass trend on the top half of the range to be
    non-increasing within the frozen slack.  A consistent verdict is not a
    convergence proof; it is a decay-rate statement on the sampled range.
    """
    if cls not in ("S", "S^omega", "O"):
        raise ValueError(f"unknown class {cls!r}")
    shells = {}
    for g, v in samples.items():
        shells.setdefault(group.length(g), []).append(abs(float(v)))
    radius = max(shells)
    if radius < 16:
        raise InsufficientRange(
            f"samples cover radius {radius}; need at least 16"
        )
    mass = {l: sum(vs) for l, vs in shells.items()}
    support_radius = max((l for l, s in mass.items() if s > 0), default=0)
    if support_radius <= radius // 2:
        return GrowthVerdict(
            "polynomial",
            degree=0,
            sampled_range=(0, radius),
            witness={"finite_support": support_radius, "consistent": True,
                     "class": cls},
            note="finitely supported on the sampled range: all classes",
        )
    if cls == "S":
        weights = [("(l+1)^%d" % k, lambda l, k=k: (l + 1) ** k) for k in range(1, 9)]
    elif cls == "S^omega":
        weights = [("exp(sqrt(l))", lambda l: math.exp(math.sqrt(l)))]
    else:
        weights = [
            (f"exp({a} l)", lambda l, a=a: math.exp(a * l)) for a in (0.25, 0.5, 1.0)
        ]
    # class S is an intersection over all polynomial weights, so every
    # sampled k must pass; class O only asks for SOME exponential rate
    any_quantifier = cls == "O"
    table = {}
    results = []
    for name, wfun in weights:
        pts = [
            (l, math.log(mass[l] * wfun(l)))
            for l in sorted(mass)
            if l >= radius // 2 and mass[l] > 0
        ]
        slope, _, _ = _fit_line([p[0] for p in pts], [p[1] for p in pts])
        ok = slope <= DECAY_SLOPE_SLACK
        table[name] = {"shell_slope": round(slope, 4), "consistent": ok}
        results.append(ok)
    consistent = any(results) if any_quantifier else all(results)
    cls_name = "polynomial" if consistent else "inconclusive"
    return GrowthVerdict(
        cls_name,
        sampled_range=(0, radius),
        witness={"class": cls, "weights": table, "consistent": consistent},
        note=f"consistency with class {cls} on the sampled range only",
    )


# ---------------------------------------------------------------------------
# the straight-line combing of Z^n


def combing_straightline(g, j):
    """The j-th vertex of the monotone lattice path from 0 to g.

    Coordinatewise floor of (j/l(g)) g in absolute value, corrected to word
    length exactly j by incrementing the coordinates with the largest
    remainders (smaller index wins ties); f_j(g) = g for j >= l(g).
    """
    if j < 0:
        raise ValueError("combing step must be nonnegative")
    total = sum(abs(x) for x in g)
    if j >= total:
        return tuple(g)
    base = []
    rems = []
    for i, x in enumerate(g):
        q = Fraction(j * abs(x), total)
        b = math.floor(q)
        base.append(b)
        rems.append((-(q - b), i))
    deficit = j - sum(base)
    rems.sort()
    for _, i in rems[:deficit]:
        base[i] += 1
    return tuple(b if x >= 0 else -b for b, x in zip(base, g))


@dataclass
class CombingWitness:
    weight: str
    g: tuple
    h: tuple
    j: int
    lhs: str
    rhs: str


def check_combing_compatibility(weights, wbar, group, radius, steps):
    """Exhaustive check of  w(f_j(g)) w(f_j(g)^{-1} h) <= wbar(w)(g)
    wbar(w)(g^{-1} h)  over the radius ball and j <= steps.

    weights: list of WeightFunction on the lattice group; wbar: mapping from
    each weight to the bounding WeightFunction.  Exact integer/rational
    comparison for polynomial weights, exact log-space comparison for
    homomorphism weights.  Returns None on pass, else the first witness.
    """
    ball = group.ball(radius)
    paths = {g: [combing_straightline(g, j) for j in range(steps + 1)] for g in ball}
    for w in weights:
        wb = wbar(w) if callable(wbar) else wbar[id(w)]
        log_mode = w.kind == "homomorphism"
        if log_mode and wb.kind != "homomorphism":
            raise ValueError("homomorphism weights need a homomorphism bound")
        for g in ball:
            ginv = group.inv(g)
            for h in ball:
                gh = group.mul(ginv, h)
                if log_mode:
                    rhs = wb.log_value(g) + wb.log_value(gh)
                else:
                    rhs = wb.value(g) * wb.value(gh)
                for j in range(steps + 1):
                    f = paths[g][j]
                    finv_h = group.mul(group.inv(f), h)
                    if log_mode:
                        lhs = w.log_value(f) + w.log_value(finv_h)
                    else:
                        lhs = w.value(f) * w.value(finv_h)
                    if lhs > rhs:
                        return CombingWitness(
                            w.describe(), g, h, j, str(lhs), str(rhs)
                        )
    return None

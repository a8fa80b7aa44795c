"""Quantum-torus computations.

The algebra has invertible generators U, V with U V = q V U.  Elements are
finitely supported Fourier coefficient maps (m, n) -> scalar representing
sums of a_{mn} U^m V^n in normal form (U-powers left of V-powers).  The
parameter worlds: q formal (irrational angle, modeled exactly in Q(q)),
q = 1 (the commutative torus), q = zeta_N^p (rational angle p/N), and a
float q on the unit circle for numerical experiments.

The module builds the length-2 free bimodule resolution, its commutator
quotient complex, the two-term complex L with the small-divisor boundary
1 - q^m, and the identification of the commutator complex with L (x) L.
Every boundary map here preserves the total Fourier bidegree, which is what
makes all homology exactly computable mode by mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import chain, scalars
from .chain import ChainComplex, ChainMap
from .errors import FloatNotSupported, IdentificationFailed, VariantMismatch
from .linalg import Matrix, column_space_contains, nullspace, rank


@dataclass(frozen=True)
class Box:
    """The square index set {(m, n): |m| <= radius, |n| <= radius}."""

    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("box radius must be nonnegative")

    def __contains__(self, point):
        m, n = point
        return abs(m) <= self.radius and abs(n) <= self.radius

    def points(self):
        r = self.radius
        for m in range(-r, r + 1):
            for n in range(-r, r + 1):
                yield (m, n)

    def side(self):
        return 2 * self.radius + 1


@dataclass(frozen=True)
class QSpec:
    """A coefficient world together with its commutation scalar q."""

    variant: scalars.Variant
    q: scalars.Scalar

    @classmethod
    def formal(cls):
        return cls(scalars.RATFUNC, scalars.formal_q())

    @classmethod
    def classical(cls):
        """theta = 0: q = 1 over the rationals."""
        return cls(scalars.RATIONAL, scalars.Rational(1))

    @classmethod
    def root_of_unity(cls, p, n):
        """theta = p/n: q = zeta_n^p."""
        return cls(scalars.cyclotomic_variant(n), scalars.zeta(n, p))

    @classmethod
    def float_theta(cls, theta):
        import cmath

        return cls(scalars.FLOAT, scalars.FloatComplex(cmath.exp(2j * cmath.pi * theta)))

    def q_power(self, k):
        return self.q**k

    def one(self):
        return scalars.one(self.variant)

    def zero(self):
        return scalars.zero(self.variant)


class QTorusElement:
    """Finitely supported map Z^2 -> Scalar in normal form."""

    __slots__ = ("variant", "coeffs")

    def __init__(self, variant, coeffs=None):
        self.variant = variant
        self.coeffs = {}
        if coeffs:
            for k, s in coeffs.items():
                if s.variant != variant:
                    raise VariantMismatch(f"{s.variant} coefficient in {variant} element")
                if not s.is_zero():
                    self.coeffs[k] = s

    @classmethod
    def monomial(cls, qspec, m, n, coeff=None):
        c = coeff if coeff is not None else qspec.one()
        return cls(qspec.variant, {(m, n): c})

    def __add__(self, other):
        if other.variant != self.variant:
            raise VariantMismatch(f"{self.variant} vs {other.variant}")
        out = dict(self.coeffs)
        for k, s in other.coeffs.items():
            cur = out.get(k)
            out[k] = cur + s if cur is not None else s
        return QTorusElement(self.variant, out)

    def __neg__(self):
        return QTorusElement(self.variant, {k: -s for k, s in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return QTorusElement(self.variant, {k: s * c for k, s in self.coeffs.items()})

    def __eq__(self, other):
        return (
            isinstance(other, QTorusElement)
            and self.variant == other.variant
            and self.coeffs == other.coeffs
        )

    def is_zero(self):
        return not self.coeffs

    def support(self):
        return set(self.coeffs)

    def __repr__(self):
        terms = ", ".join(
            f"({m},{n}): {s}" for (m, n), s in sorted(self.coeffs.items())
        )
        return f"QTorusElement{{{terms}}}"

    def to_triplets(self):
        return sorted([[m, n, str(s)] for (m, n), s in self.coeffs.items()])


def qt_element_from_triplets(variant, triplets):
    return QTorusElement(
        variant, {(m, n): scalars.scalar_from_string(s) for m, n, s in triplets}
    )


def qt_mul(qspec, a, b):
    """Product in normal form: U^m V^n . U^p V^r = q^{-n p} U^{m+p} V^{n+r}."""
    if a.variant != b.variant:
        raise VariantMismatch(f"{a.variant} vs {b.variant}")
    out = {}
    for (m, n), ca in a.coeffs.items():
        for (p, r), cb in b.coeffs.items():
            k = (m + p, n + r)
            term = ca * cb * qspec.q_power(-n * p)
            cur = out.get(k)
            out[k] = cur + term if cur is not None else term
    return QTorusElement(a.variant, out)


def conjugate(qspec, x, gen):
    """g x g^{-1} for g in {U, V}.  On the monomial U^m V^n this multiplies
    by q^n (g = U) or q^{-m} (g = V)."""
    if gen == "U":
        return QTorusElement(
            x.variant,
            {(m, n): s * qspec.q_power(n) for (m, n), s in x.coeffs.items()},
        )
    if gen == "V":
        return QTorusElement(
            x.variant,
            {(m, n): s * qspec.q_power(-m) for (m, n), s in x.coeffs.items()},
        )
    raise ValueError(f"generator must be 'U' or 'V', got {gen!r}")


# ---------------------------------------------------------------------------
# the Koszul bimodule resolution
#
# K2 --b2--> K1 = K^2 --b1--> K0 --b0--> algebra, with
#   b0(x . y)        = x y
#   b1(x1.y1, x2.y2) = x1.y1 - x1 U^{-1} . U y1 + x2.y2 - x2 V^{-1} . V y2
#   b2(x . y)        = (x.y - x V^{-1} . V y,  x U^{-1} . U y - x.y)
#
# On the pair monomial basis, "x U^{-1}" and "U y" shift one Fourier index
# and multiply by an explicit power of q; the total bidegree
# (m1 + m2, n1 + n2) is preserved by all three maps.


def _pair_shift_U(qspec, m1, n1, m2, n2):
    """(x U^{-1}, U y) for x = U^{m1} V^{n1}, y = U^{m2} V^{n2}:
    new indices and the q-scalar picked up."""
    # x U^{-1} = q^{n1} U^{m1-1} V^{n1};   U y = U^{m2+1} V^{n2}
    return (m1 - 1, n1, m2 + 1, n2), qspec.q_power(n1)


def _pair_shift_V(qspec, m1, n1, m2, n2):
    # x V^{-1} = U^{m1} V^{n1-1};   V y = q^{-m2} U^{m2} V^{n2+1}
    return (m1, n1 - 1, m2, n2 + 1), qspec.q_power(-m2)


@dataclass
class KoszulData:
    complex: ChainComplex  # degrees -1..2: algebra, K0, K1, K2
    bases: dict  # degree -> list of basis keys
    index: dict  # degree -> {key: position}


def _pair_label(key):
    if len(key) == 2:
        return f"m[{key[0]},{key[1]}]"
    if len(key) == 4:
        m1, n1, m2, n2 = key
        return f"p[{m1},{n1}|{m2},{n2}]"
    c, m1, n1, m2, n2 = key
    return f"p{c}[{m1},{n1}|{m2},{n2}]"


def _koszul_complex_on(qspec, basis2, basis1, basis0, basism1):
    """Assemble the resolution complex on explicit bases.

    basis2/basis0: pair keys (m1, n1, m2, n2); basis1: (copy, m1, n1, m2, n2)
    with copy 1 or 2; basism1: algebra monomial keys (m, n).  Boundary
    entries whose target is missing from the given basis are dropped.
    """
    v = qspec.variant
    bases = {2: basis2, 1: basis1, 0: basis0, -1: basism1}
    index = {d: {k: i for i, k in enumerate(b)} for d, b in bases.items()}
    c = ChainComplex(
        v,
        -1,
        2,
        {d: len(b) for d, b in bases.items()},
        {d: [_pair_label(k) for k in b] for d, b in bases.items()},
    )
    one = qspec.one()

    # b2: pair -> (pair - shiftV pair) in copy 1, (shiftU pair - pair) in copy 2
    d2 = Matrix.zero(len(basis1), len(basis2), v)
    for col, (m1, n1, m2, n2) in enumerate(basis2):
        sv, cv = _pair_shift_V(qspec, m1, n1, m2, n2)
        su, cu = _pair_shift_U(qspec, m1, n1, m2, n2)
        for key, val in [
            ((1, m1, n1, m2, n2), one),
            ((1, *sv), -cv),
            ((2, *su), cu),
            ((2, m1, n1, m2, n2), -one),
        ]:
            row = index[1].get(key)
            if row is not None:
                cur = d2.rows[row].get(col)
                val = cur + val if cur is not None else val
                if val.is_zero():
                    d2.rows[row].pop(col, None)
                else:
                    d2.rows[row][col] = val
    c.boundaries[2] = d2

    # b1: copy 1 -> pair - shiftU pair; copy 2 -> pair - shiftV pair
    d1 = Matrix.zero(len(basis0), len(basis1), v)
    for col, (copy, m1, n1, m2, n2) in enumerate(basis1):
        if copy == 1:
            sk, cs = _pair_shift_U(qspec, m1, n1, m2, n2)
        else:
            sk, cs = _pair_shift_V(qspec, m1, n1, m2, n2)
        for key, val in [((m1, n1, m2, n2), one), (sk, -cs)]:
            row = index[0].get(key)
            if row is not None:
                cur = d1.rows[row].get(col)
                val = cur + val if cur is not None else val
                if val.is_zero():
                    d1.rows[row].pop(col, None)
                else:
                    d1.rows[row][col] = val
    c.boundaries[1] = d1

    # b0: multiplication
    d0 = Matrix.zero(len(basism1), len(basis0), v)
    for col, (m1, n1, m2, n2) in enumerate(basis0):
        row = index[-1].get((m1 + m2, n1 + n2))
        if row is not None:
            d0.rows[row][col] = qspec.q_power(-n1 * m2)
    c.boundaries[0] = d0
    return KoszulData(c, bases, index)


def koszul_resolution(box, qspec):
    """The resolution on a staircase of boxes: K2 pairs in the box, K1 in
    the enlarged box (radius N+1), K0 one step further, so that every
    boundary is total and the emitted complex composes to zero exactly."""
    n = box.radius
    b2 = [(*p, *s) for p in Box(n).points() for s in Box(n).points()]
    b1 = [
        (c, *p, *s)
        for c in (1, 2)
        for p in Box(n + 1).points()
        for s in Box(n + 1).points()
    ]
    b0 = [(*p, *s) for p in Box(n + 2).points() for s in Box(n + 2).points()]
    bm1 = list(Box(2 * (n + 2)).points())
    return _koszul_complex_on(qspec, b2, b1, b0, bm1)


def _mode_koszul(qspec, n, t):
    """The total-bidegree-t summand of the resolution on the staircase."""
    tm, tn = t

    def pairs(radius):
        b = Box(radius)
        return [
            (m1, n1, tm - m1, tn - n1)
            for (m1, n1) in b.points()
            if (tm - m1, tn - n1) in b
        ]

    b2 = pairs(n)
    p1 = pairs(n + 1)
    b1 = [(c, *k) for c in (1, 2) for k in p1]
    b0 = pairs(n + 2)
    bm1 = [(tm, tn)] if b0 else []
    return _koszul_complex_on(qspec, b2, b1, b0, bm1)


@dataclass
class ResolutionReport:
    box_radius: int
    verdict: str  # "pass" | "fail" | "window too small"
    inner_radius: int | None = None
    degrees_checked: tuple = (0, 1, 2)
    augmentation_onto_inner: bool | None = None
    failures: list = field(default_factory=list)  # (mode, degree)
    rim_classes: list = field(default_factory=list)  # (mode, degree, count)
    modes_checked: int = 0


def check_resolution(box, qspec):
    """Exactness of the truncated resolution, mode by mode.

    Decomposes the augmented complex by total Fourier bidegree (preserved by
    all boundary maps) and, per mode, checks that every cycle supported with
    both pair factors in the inner box of radius N-2 is a boundary, and that
    the augmentation hits every algebra monomial of the inner range.
    Homology classes that are only representable near the rim are reported
    separately, not counted as failures.
    """
    if qspec.variant.kind == "float":
        raise FloatNotSupported("check_resolution requires an exact variant")
    n = box.radius
    if n < 2:
        return ResolutionReport(n, "window too small")
    inner = n - 2
    report = ResolutionReport(n, "pass", inner_radius=inner)
    for t in Box(2 * n).points():
        data = _mode_koszul(qspec, n, t)
        report.modes_checked += 1
        c = data.complex
        if c.dim(0) == 0:
            continue
        ranks = {deg: rank(c.boundary(deg)) for deg in (1, 2)}
        for deg in (0, 1, 2):
            inner_cols = [
                i
                for i, k in enumerate(data.bases[deg])
                if _pair_inner(k, inner)
            ]
            if not inner_cols:
                continue
            z_in = _restricted_cycles(c, deg, inner_cols)
            if z_in.ncols == 0:
                continue
            if deg == 2:
                ok = False  # any inner cycle in top degree is spurious
            else:
                d_next = c.boundary(deg + 1)
                ok = rank(d_next.hstack(z_in)) == ranks[deg + 1]
            if not ok:
                report.failures.append((t, deg))
        # rim classes: homology dims of the truncated summand, from ranks
        # (there is no degree-3 boundary, so h2 = dim ker b2)
        h2 = c.dim(2) - ranks[2]
        h1 = c.dim(1) - ranks[1] - ranks[2]
        for deg, hdim in ((1, h1), (2, h2)):
            if hdim:
                report.rim_classes.append((t, deg, hdim))
        if abs(t[0]) <= inner and abs(t[1]) <= inner:
            if rank(c.boundary(0)) != c.dim(-1):
                report.failures.append((t, "augmentation"))
    report.augmentation_onto_inner = not any(
        f[1] == "augmentation" for f in report.failures
    )
    report.verdict = "pass" if not report.failures else "fail"
    return report


def _pair_inner(key, inner):
    if len(key) == 5:
        _, m1, n1, m2, n2 = key
    else:
        m1, n1, m2, n2 = key
    return max(abs(m1), abs(n1), abs(m2), abs(n2)) <= inner


def _restricted_cycles(c, deg, cols):
    """Basis of cycles of D_deg supported on the given columns, lifted back
    to full C_deg coordinates."""
    d = c.boundary(deg)
    sub = Matrix.zero(d.nrows, len(cols), c.variant)
    for k, j in enumerate(cols):
        for i, row in enumerate(d.rows):
            s = row.get(j)
            if s is not None:
                sub.rows[i][k] = s
    ker = nullspace(sub)
    lifted = Matrix.zero(c.dim(deg), ker.ncols, c.variant)
    for k, j in enumerate(cols):
        for jj, s in ker.rows[k].items():
            lifted.rows[j][jj] = s
    return lifted


# ---------------------------------------------------------------------------
# commutator quotient complex and L (x) L


def commutator_complex(box, qspec):
    """The three-term complex  P -> P^2 -> P  on box-truncated monomials,
    with boundaries diagonal in the Fourier mode:
      deg 2 -> 1:  x |-> (x - V x V^{-1},  U x U^{-1} - x)
      deg 1 -> 0:  (x1, x2) |-> x1 - U x1 U^{-1} + x2 - V x2 V^{-1}
    """
    v = qspec.variant
    pts = list(box.points())
    idx = {p: i for i, p in enumerate(pts)}
    npts = len(pts)
    c = ChainComplex(
        v,
        0,
        2,
        {0: npts, 1: 2 * npts, 2: npts},
        {
            0: [f"m[{m},{n}]" for m, n in pts],
            1: [f"c1[{m},{n}]" for m, n in pts] + [f"c2[{m},{n}]" for m, n in pts],
            2: [f"k[{m},{n}]" for m, n in pts],
        },
    )
    one = qspec.one()
    d2 = Matrix.zero(2 * npts, npts, v)
    d1 = Matrix.zero(npts, 2 * npts, v)
    for (m, n), i in idx.items():
        c1 = one - qspec.q_power(-m)  # x - V x V^{-1}
        c2 = qspec.q_power(n) - one  # U x U^{-1} - x
        if not c1.is_zero():
            d2.rows[i][i] = c1
        if not c2.is_zero():
            d2.rows[npts + i][i] = c2
        e1 = one - qspec.q_power(n)  # x1 - U x1 U^{-1}
        e2 = one - qspec.q_power(-m)  # x2 - V x2 V^{-1}
        if not e1.is_zero():
            d1.rows[i][i] = e1
        if not e2.is_zero():
            d1.rows[i][npts + i] = e2
    c.boundaries[2] = d2
    c.boundaries[1] = d1
    return c


def l_complex(radius, qspec):
    """The two-term complex with both spaces spanned by delta_m, |m| <= M,
    and boundary the diagonal matrix 1 - q^m."""
    v = qspec.variant
    ms = list(range(-radius, radius + 1))
    d = Matrix.zero(len(ms), len(ms), v)
    one = qspec.one()
    for i, m in enumerate(ms):
        val = one - qspec.q_power(m)
        if not val.is_zero():
            d.rows[i][i] = val
    return chain.two_term(
        v,
        d,
        degree=1,
        labels1=[f"d1[{m}]" for m in ms],
        labels0=[f"d0[{m}]" for m in ms],
    )


@dataclass
class LLIdentification:
    bijection: dict  # commutator label -> tensor label, per degree
    signs: dict  # commutator label -> +1/-1
    verified: bool
    homology_dims: dict | None = None


def identify_LL(box, qspec):
    """Explicit degreewise basis bijection between the commutator quotient
    complex and L (x) L, with exact boundary-matrix matching.

    The monomial U^m V^n corresponds to delta_{-m} (x) delta_n; copy 1 of
    the middle term is L_0 (x) L_1, copy 2 is L_1 (x) L_0.  All signs are +1
    under the Koszul convention used by tensor_complex.
    """
    if qspec.variant.kind == "float":
        raise FloatNotSupported("identify_LL requires an exact variant")
    n = box.radius
    comm = commutator_complex(box, qspec)
    ll = tensor_complex_ll(n, qspec)
    tensor_index = {
        deg: {lbl: i for i, lbl in enumerate(ll.labels[deg])} for deg in ll.degrees()
    }
    bijection = {0: {}, 1: {}, 2: {}}
    signs = {0: {}, 1: {}, 2: {}}
    perms = {}
    for deg in (0, 1, 2):
        perm = Matrix.zero(ll.dim(deg), comm.dim(deg), qspec.variant)
        one = qspec.one()
        for i, lbl in enumerate(comm.labels[deg]):
            tgt = _ll_partner(lbl)
            j = tensor_index[deg].get(tgt)
            if j is None:
                raise IdentificationFailed(f"no tensor partner for {lbl}")
            bijection[deg][lbl] = tgt
            signs[deg][lbl] = 1
            perm.rows[j][i] = one
        perms[deg] = perm
    # exact boundary correspondence: perm . d_comm = d_ll . perm
    for deg in (1, 2):
        lhs = perms[deg - 1] * comm.boundary(deg)
        rhs = ll.boundary(deg) * perms[deg]
        if lhs != rhs:
            diff = lhs - rhs
            i, j, s = next(iter(diff.entries()))
            raise IdentificationFailed(
                f"boundary mismatch at degree {deg}, entry ({i},{j}) = {s}"
            )
    hom = None
    if qspec.variant.kind != "float":
        hom = {
            deg: chain.homology(comm, deg)[0] for deg in (0, 1, 2)
        }
        hom_ll = {deg: chain.homology(ll, deg)[0] for deg in (0, 1, 2)}
        if hom != hom_ll:
            raise IdentificationFailed(f"homology mismatch {hom} vs {hom_ll}")
    flat_bij = {lbl: tgt for deg in bijection for lbl, tgt in bijection[deg].items()}
    flat_signs = {lbl: s for deg in signs for lbl, s in signs[deg].items()}
    return LLIdentification(flat_bij, flat_signs, True, hom)


def tensor_complex_ll(radius, qspec):
    l = l_complex(radius, qspec)
    return chain.tensor_complex(l, l)


def _ll_partner(comm_label):
    kind = comm_label[0]
    body = comm_label[comm_label.index("[") + 1 : -1]
    m, n = (int(x) for x in body.split(","))
    a, b = -m, n
    if kind == "m":
        return f"t[0](d0[{a}](x)d0[{b}])"
    if comm_label.startswith("c1"):
        return f"t[0](d0[{a}](x)d1[{b}])"
    if comm_label.startswith("c2"):
        return f"t[1](d1[{a}](x)d0[{b}])"
    return f"t[1](d1[{a}](x)d1[{b}])"


# ---------------------------------------------------------------------------
# Hochschild homology


@dataclass
class HochschildResult:
    dims: dict  # degree -> dimension
    modes: dict  # degree -> sorted list of contributing modes

    def to_json(self):
        return {
            "H": {str(d): self.dims[d] for d in sorted(self.dims)},
            "modes": {
                str(d): [list(m) for m in self.modes[d]] for d in sorted(self.modes)
            },
        }


def hochschild_homology(box, qspec):
    """Homology of the commutator quotient complex, computed per Fourier
    mode (the boundaries are mode-diagonal, so the box truncation is exact
    for every mode inside the box)."""
    if qspec.variant.kind == "float":
        raise FloatNotSupported("hochschild_homology requires an exact variant")
    dims = {0: 0, 1: 0, 2: 0}
    modes = {0: [], 1: [], 2: []}
    for t in box.points():
        c = commutator_complex(_SinglePoint(t), qspec)
        for deg in (0, 1, 2):
            h = chain.homology(c, deg)[0]
            if h:
                dims[deg] += h
                modes[deg].append(t)
    for deg in modes:
        modes[deg].sort()
    return HochschildResult(dims, modes)


class _SinglePoint:
    """A one-point stand-in for Box, used to slice out a single mode."""

    def __init__(self, point):
        self.point = point
        self.radius = max(abs(point[0]), abs(point[1]))

    def points(self):
        yield self.point

    def __contains__(self, p):
        return p == self.point

"""Chain complexes of finite-dimensional free modules on a bounded degree
window, with boundary verification, shift, cone, Hom- and tensor-complexes,
truncation filtrations, homology by exact rank, and homotopy checks.

Grading is homological: the boundary ``D_n`` maps degree n to degree n-1.
Degrees outside the window ``[lo, hi]`` are zero.  Basis labels are
structured strings carried through every construction so that cross-module
identifications can be checked as explicit bijections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import scalars
from .errors import FloatNotSupported, ShapeMismatch, VariantMismatch
from .linalg import Matrix, nullspace, rank, solve


@dataclass
class ChainComplex:
    variant: scalars.Variant
    lo: int
    hi: int
    dims: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)
    boundaries: dict = field(default_factory=dict)  # n -> Matrix C_n -> C_{n-1}

    def __post_init__(self):
        for n in range(self.lo, self.hi + 1):
            self.dims.setdefault(n, 0)
            self.labels.setdefault(n, [f"e{n}.{i}" for i in range(self.dims[n])])

    def dim(self, n):
        return self.dims.get(n, 0)

    def boundary(self, n):
        """D_n: C_n -> C_{n-1}; a zero matrix when absent or out of window."""
        d = self.boundaries.get(n)
        if d is None:
            return Matrix.zero(self.dim(n - 1), self.dim(n), self.variant)
        return d

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def total_dim(self):
        return sum(self.dims.values())

    def euler_characteristic(self):
        return sum((-1) ** n * self.dim(n) for n in self.degrees())


@dataclass
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    maps: dict = field(default_factory=dict)  # n -> Matrix C_n -> C'_n

    def map(self, n):
        m = self.maps.get(n)
        if m is None:
            return Matrix.zero(self.target.dim(n), self.source.dim(n), self.source.variant)
        return m

    def is_chain_map(self):
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        for n in range(lo, hi + 2):
            lhs = self.target.boundary(n) * self.map(n)
            rhs = self.map(n - 1) * self.source.boundary(n)
            if lhs != rhs:
                return False
        return True


@dataclass
class Homotopy:
    maps: dict = field(default_factory=dict)  # n -> Matrix C_n -> C'_{n+1}

    def map(self, n, source, target):
        m = self.maps.get(n)
        if m is None:
            return Matrix.zero(target.dim(n + 1), source.dim(n), source.variant)
        return m


@dataclass
class VerifyReport:
    passed: bool
    degree: int | None = None
    entry: tuple | None = None  # (row, col, scalar-string) of first nonzero of D_n D_{n+1}

    def __bool__(self):
        return self.passed


def zero_complex(variant):
    return ChainComplex(variant, 0, 0, {0: 0}, {0: []})


def single_module(variant, dim, degree=0, labels=None):
    """A complex concentrated in one degree."""
    labels = labels if labels is not None else [f"e{degree}.{i}" for i in range(dim)]
    return ChainComplex(variant, degree, degree, {degree: dim}, {degree: list(labels)})


def two_term(variant, d, degree=1, labels1=None, labels0=None):
    """The complex C_degree -> C_{degree-1} with boundary matrix d."""
    c = ChainComplex(
        variant,
        degree - 1,
        degree,
        {degree: d.ncols, degree - 1: d.nrows},
    )
    if labels1 is not None:
        c.labels[degree] = list(labels1)
    if labels0 is not None:
        c.labels[degree - 1] = list(labels0)
    c.boundaries[degree] = d
    return c


def verify_complex(c):
    """Check D_n . D_{n+1} = 0 for all composable degrees; report the first
    violation.  Shape disagreements raise ShapeMismatch."""
    for n in c.degrees():
        d = c.boundary(n)
        if d.ncols != c.dim(n) or d.nrows != c.dim(n - 1):
            raise ShapeMismatch(
                f"boundary at degree {n} is {d.nrows}x{d.ncols}, "
                f"expected {c.dim(n - 1)}x{c.dim(n)}"
            )
        if len(c.labels.get(n, [])) != c.dim(n):
            raise ShapeMismatch(f"label count mismatch at degree {n}")
    for n in range(c.lo + 1, c.hi + 1):
        comp = c.boundary(n) * c.boundary(n + 1)
        if not comp.is_zero():
            i, j, s = next(iter(comp.entries()))
            return VerifyReport(False, n, (i, j, str(s)))
    return VerifyReport(True)


def shift(c):
    """The translation functor: degrees reindexed up by one, boundaries
    negated, labels carried along."""
    out = ChainComplex(
        c.variant,
        c.lo + 1,
        c.hi + 1,
        {n + 1: c.dim(n) for n in c.degrees()},
        {n + 1: list(c.labels[n]) for n in c.degrees()},
    )
    for n, d in c.boundaries.items():
        out.boundaries[n + 1] = -d
    return out


def shift_map(f):
    return ChainMap(
        shift(f.source), shift(f.target), {n + 1: m for n, m in f.maps.items()}
    )


def cone(f):
    """Mapping cone of a chain map: (N + shift M)_m with the block boundary
    [[dN, f], [0, d_shiftM]]."""
    m_src, n_tgt = f.source, f.target
    if m_src.variant != n_tgt.variant:
        raise VariantMismatch("cone of a map between different variants")
    sm = shift(m_src)
    lo = min(n_tgt.lo, sm.lo)
    hi = max(n_tgt.hi, sm.hi)
    out = ChainComplex(
        n_tgt.variant,
        lo,
        hi,
        {k: n_tgt.dim(k) + sm.dim(k) for k in range(lo, hi + 1)},
        {
            k: [f"N|{l}" for l in n_tgt.labels.get(k, [])]
            + [f"M|{l}" for l in sm.labels.get(k, [])]
            for k in range(lo, hi + 1)
        },
    )
    for k in range(lo + 1, hi + 1):
        dn = n_tgt.boundary(k)
        dsm = sm.boundary(k)
        fk = f.map(k - 1)  # f_{k-1}: M_{k-1} = (shift M)_k -> N_{k-1}
        d = Matrix.zero(out.dim(k - 1), out.dim(k), out.variant)
        for i, j, s in dn.entries():
            d.rows[i][j] = s
        for i, j, s in fk.entries():
            d.rows[i][j + n_tgt.dim(k)] = s
        for i, j, s in dsm.entries():
            d.rows[i + n_tgt.dim(k - 1)][j + n_tgt.dim(k)] = s
        out.boundaries[k] = d
    return out


def _hom_basis(m, n, deg):
    """Basis of Hom(M, N)_deg: triples (j, a, b) meaning the matrix unit
    M_j basis a -> N_{deg+j} basis b."""
    out = []
    for j in m.degrees():
        if m.dim(j) == 0 or n.dim(deg + j) == 0:
            continue
        for a in range(m.dim(j)):
            for b in range(n.dim(deg + j)):
                out.append((j, a, b))
    return out


def hom_complex(m, n):
    """Hom complex with boundary d(f) = dN . f + (-1)^|f| f . dM."""
    if m.variant != n.variant:
        raise VariantMismatch("hom_complex of different variants")
    lo = n.lo - m.hi
    hi = n.hi - m.lo
    bases = {deg: _hom_basis(m, n, deg) for deg in range(lo, hi + 1)}
    out = ChainComplex(
        n.variant,
        lo,
        hi,
        {deg: len(bases[deg]) for deg in bases},
        {
            deg: [
                f"h[{j}]({m.labels[j][a]}->{n.labels[deg + j][b]})"
                for (j, a, b) in bases[deg]
            ]
            for deg in bases
        },
    )
    sign_variant = n.variant
    for deg in range(lo + 1, hi + 1):
        index = {t: i for i, t in enumerate(bases[deg - 1])}
        d = Matrix.zero(len(bases[deg - 1]), len(bases[deg]), n.variant)
        sgn = scalars.from_int(sign_variant, (-1) ** deg)
        for col, (j, a, b) in enumerate(bases[deg]):
            # dN composed with the matrix unit
            dn = n.boundary(deg + j)
            for c, bb, s in dn.entries():
                if bb == b:
                    row = index.get((j, a, c))
                    if row is not None:
                        d.rows[row][col] = _acc(d.rows[row].get(col), s)
            # matrix unit composed with dM, sign (-1)^deg
            dm = m.boundary(j + 1)
            for aa, a2, s in dm.entries():
                if aa == a:
                    row = index.get((j + 1, a2, b))
                    if row is not None:
                        d.rows[row][col] = _acc(d.rows[row].get(col), sgn * s)
        _drop_zeros(d)
        out.boundaries[deg] = d
    return out


def _acc(cur, s):
    return s if cur is None else cur + s


def _drop_zeros(mat):
    for r in mat.rows:
        for j in [j for j, s in r.items() if s.is_zero()]:
            del r[j]


def _tensor_basis(m, n, deg):
    out = []
    for p in m.degrees():
        q = deg - p
        if m.dim(p) == 0 or n.dim(q) == 0:
            continue
        for a in range(m.dim(p)):
            for b in range(n.dim(q)):
                out.append((p, a, b))
    return out


def tensor_complex(m, n):
    """Tensor complex with the Koszul sign convention
    d(x (x) y) = dx (x) y + (-1)^{deg x} x (x) dy."""
    if m.variant != n.variant:
        raise VariantMismatch("tensor_complex of different variants")
    lo = m.lo + n.lo
    hi = m.hi + n.hi
    bases = {deg: _tensor_basis(m, n, deg) for deg in range(lo, hi + 1)}
    out = ChainComplex(
        m.variant,
        lo,
        hi,
        {deg: len(bases[deg]) for deg in bases},
        {
            deg: [
                f"t[{p}]({m.labels[p][a]}(x){n.labels[deg - p][b]})"
                for (p, a, b) in bases[deg]
            ]
            for deg in bases
        },
    )
    for deg in range(lo + 1, hi + 1):
        index = {t: i for i, t in enumerate(bases[deg - 1])}
        d = Matrix.zero(len(bases[deg - 1]), len(bases[deg]), m.variant)
        for col, (p, a, b) in enumerate(bases[deg]):
            dm = m.boundary(p)
            for c, aa, s in dm.entries():
                if aa == a:
                    row = index.get((p - 1, c, b))
                    if row is not None:
                        d.rows[row][col] = _acc(d.rows[row].get(col), s)
            dn = n.boundary(deg - p)
            sgn = scalars.from_int(m.variant, (-1) ** p)
            for c, bb, s in dn.entries():
                if bb == b:
                    row = index.get((p, a, c))
                    if row is not None:
                        d.rows[row][col] = _acc(d.rows[row].get(col), sgn * s)
        _drop_zeros(d)
        out.boundaries[deg] = d
    return out


def homology(c, n):
    """(dimension, basis matrix of representative cycles in C_n coordinates).

    Exact variants only; raises FloatNotSupported otherwise.
    """
    if c.variant.kind == "float":
        raise FloatNotSupported("homology requires an exact coefficient variant")
    cycles = nullspace(c.boundary(n))
    bnd = c.boundary(n + 1)
    # keep kernel columns that are independent modulo the image of D_{n+1}
    combined = bnd.hstack(cycles)
    reps = []
    pivot_for_col = {}
    for j in range(combined.ncols):
        vec = {i: row[j] for i, row in enumerate(combined.rows) if j in row}
        red = _reduce_against(vec, pivot_for_col)
        if red:
            pivot_for_col[min(red)] = red
            if j >= bnd.ncols:
                reps.append(j - bnd.ncols)
    out = Matrix.zero(c.dim(n), len(reps), c.variant)
    for k, j in enumerate(reps):
        for i in range(c.dim(n)):
            s = cycles.rows[i].get(j)
            if s is not None:
                out.rows[i][k] = s
    return len(reps), out


def _reduce_against(vec, pivot_for_col):
    row = dict(vec)
    while row:
        reduced = True
        for col in sorted(row):
            piv = pivot_for_col.get(col)
            if piv is not None:
                factor = row[col] * piv[col].inv()
                for j, s in piv.items():
                    cur = row.get(j)
                    val = cur - factor * s if cur is not None else -(factor * s)
                    if val.is_zero():
                        row.pop(j, None)
                    else:
                        row[j] = val
                reduced = False
                break
        if reduced:
            break
    return row


def homology_table(c):
    return {n: homology(c, n)[0] for n in c.degrees()}


def is_quasi_iso(f):
    """A chain map is a quasi-isomorphism iff its mapping cone is exact."""
    co = cone(f)
    return all(homology(co, n)[0] == 0 for n in co.degrees())


def check_homotopy(f, g, h):
    """True iff f - g = d' h + h d degreewise."""
    if f.source is not g.source and (f.source.dims != g.source.dims):
        raise ShapeMismatch("homotopy check requires a shared source")
    src, tgt = f.source, f.target
    for n in range(src.lo, src.hi + 1):
        lhs = f.map(n) - g.map(n)
        rhs = tgt.boundary(n + 1) * h.map(n, src, tgt) + h.map(n - 1, src, tgt) * src.boundary(n)
        if lhs != rhs:
            return False
    return True


def truncate(c, n, side):
    """Truncation filtrations.

    side="below": the subcomplex spanning degrees -n..n whose bottom term is
    the kernel of the boundary there; returns (subcomplex, inclusion).
    side="above": the quotient complex spanning degrees -n..n whose top term
    is the cokernel of the incoming boundary; returns (quotient, projection).
    """
    if c.variant.kind == "float":
        raise FloatNotSupported("truncate requires an exact coefficient variant")
    top = min(n, c.hi)
    bot = max(-n, c.lo)
    if top < bot:
        z = zero_complex(c.variant)
        return z, ChainMap(z, c) if side == "below" else ChainMap(c, z)
    if side == "below":
        return _truncate_below(c, bot, top)
    if side == "above":
        return _truncate_above(c, bot, top)
    raise ValueError(f"side must be 'below' or 'above', got {side!r}")


def _truncate_below(c, bot, top):
    kernel = nullspace(c.boundary(bot))
    full = kernel.ncols == c.dim(bot) and kernel == Matrix.identity(c.dim(bot), c.variant)
    sub = ChainComplex(c.variant, bot, top)
    incl = ChainMap(None, c)
    for m in range(bot, top + 1):
        if m == bot and not full:
            sub.dims[m] = kernel.ncols
            sub.labels[m] = [f"ker[{c.labels[m][_lead(kernel, k)]}]" for k in range(kernel.ncols)]
            incl.maps[m] = kernel
        else:
            sub.dims[m] = c.dim(m)
            sub.labels[m] = list(c.labels[m])
            incl.maps[m] = Matrix.identity(c.dim(m), c.variant)
    for m in range(bot + 1, top + 1):
        if m == bot + 1 and not full:
            # express D_m in kernel coordinates: D_m = K X
            x = solve(kernel, c.boundary(m))
            assert x is not None, "boundary image must lie in the kernel"
            sub.boundaries[m] = x
        else:
            sub.boundaries[m] = c.boundary(m)
    sub.__post_init__()
    incl.source = sub
    return sub, incl


def _lead(mat, col):
    for i, row in enumerate(mat.rows):
        if col in row:
            return i
    return 0


def _truncate_above(c, bot, top):
    bnd = c.boundary(top + 1)
    # representatives of C_top modulo im D_{top+1}
    pivot_for_col = {}
    for j in range(bnd.ncols):
        vec = {i: row[j] for i, row in enumerate(bnd.rows) if j in row}
        red = _reduce_against(vec, pivot_for_col)
        if red:
            pivot_for_col[min(red)] = red
    reps = []
    for j in range(c.dim(top)):
        red = _reduce_against({j: scalars.one(c.variant)}, pivot_for_col)
        if red:
            pivot_for_col[min(red)] = red
            reps.append(j)
    full = len(reps) == c.dim(top) and bnd.is_zero()
    quo = ChainComplex(c.variant, bot, top)
    proj = ChainMap(c, None)
    rep_mat = Matrix.zero(c.dim(top), len(reps), c.variant)
    for k, j in enumerate(reps):
        rep_mat.rows[j][k] = scalars.one(c.variant)
    for m in range(bot, top + 1):
        if m == top and not full:
            quo.dims[m] = len(reps)
            quo.labels[m] = [f"cok[{c.labels[m][j]}]" for j in reps]
            # projection: solve [B | R] x = v, keep the R part
            br = bnd.hstack(rep_mat)
            x = solve(br, Matrix.identity(c.dim(top), c.variant))
            assert x is not None
            pm = Matrix.zero(len(reps), c.dim(top), c.variant)
            for i in range(len(reps)):
                for j2, s in x.rows[bnd.ncols + i].items():
                    if not s.is_zero():
                        pm.rows[i][j2] = s
            proj.maps[m] = pm
        else:
            quo.dims[m] = c.dim(m)
            quo.labels[m] = list(c.labels[m])
            proj.maps[m] = Matrix.identity(c.dim(m), c.variant)
    for m in range(bot + 1, top + 1):
        if m == top and not full:
            quo.boundaries[m] = c.boundary(m) * rep_mat
        else:
            quo.boundaries[m] = c.boundary(m)
    quo.__post_init__()
    proj.target = quo
    return quo, proj


def direct_sum(cs, variant=None):
    """Blockwise direct sum; the empty sum is the zero complex (pass variant)."""
    if not cs:
        if variant is None:
            raise ValueError("direct_sum of no summands needs an explicit variant")
        return zero_complex(variant)
    v = cs[0].variant
    for c in cs[1:]:
        if c.variant != v:
            raise VariantMismatch("direct_sum of different variants")
    lo = min(c.lo for c in cs)
    hi = max(c.hi for c in cs)
    out = ChainComplex(v, lo, hi)
    for m in range(lo, hi + 1):
        out.dims[m] = sum(c.dim(m) for c in cs)
        out.labels[m] = [
            f"s{i}|{l}" for i, c in enumerate(cs) for l in c.labels.get(m, [])
        ]
    for m in range(lo + 1, hi + 1):
        d = Matrix.zero(out.dim(m - 1), out.dim(m), v)
        ro = co = 0
        for c in cs:
            for i, j, s in c.boundary(m).entries():
                d.rows[ro + i][co + j] = s
            ro += c.dim(m - 1)
            co += c.dim(m)
        out.boundaries[m] = d
    out.__post_init__()
    return out


def contracting_homotopy(c):
    """A degree +1 map h with d h + h d = id, constructed by linear solves,
    or None when the complex is not exact."""
    if c.variant.kind == "float":
        raise FloatNotSupported("contracting_homotopy requires an exact variant")
    h = Homotopy()
    ident = {n: Matrix.identity(c.dim(n), c.variant) for n in c.degrees()}
    prev = None  # h_{n-1}
    for n in c.degrees():
        rhs = ident[n]
        if prev is not None:
            rhs = rhs - prev * c.boundary(n)
        x = solve(c.boundary(n + 1), rhs)
        if x is None:
            return None
        h.maps[n] = x
        prev = x
    return h


def induced_homology_map(f, n):
    """Images of homology representatives of the source under f, paired with
    the target's homology data: returns (reps_in_target, target_hom_basis)."""
    dim_s, reps = homology(f.source, n)
    mapped = f.map(n) * reps
    return mapped


def homology_classes_equal(c, n, v1, v2):
    """Do two cycle matrices represent the same homology classes columnwise?"""
    from .linalg import column_space_contains

    diff = v1 - v2
    return column_space_contains(c.boundary(n + 1), diff)


# ---------------------------------------------------------------------------
# JSON serialization


def variant_to_json(v):
    out = {"kind": v.kind}
    if v.order is not None:
        out["order"] = v.order
    return out


def variant_from_json(d):
    return scalars.Variant(d["kind"], d.get("order"))


def complex_to_json(c):
    return {
        "variant": variant_to_json(c.variant),
        "window": [c.lo, c.hi],
        "dims": {str(n): c.dim(n) for n in c.degrees()},
        "labels": {str(n): list(c.labels[n]) for n in c.degrees()},
        "boundaries": {
            str(n): sorted(
                [[i, j, str(s)] for i, j, s in c.boundaries[n].entries()]
            )
            for n in range(c.lo + 1, c.hi + 1)
            if n in c.boundaries
        },
    }


def complex_from_json(d):
    v = variant_from_json(d["variant"])
    lo, hi = d["window"]
    c = ChainComplex(
        v,
        lo,
        hi,
        {int(n): dim for n, dim in d["dims"].items()},
        {int(n): list(ls) for n, ls in d["labels"].items()},
    )
    for n_s, triplets in d["boundaries"].items():
        n = int(n_s)
        c.boundaries[n] = Matrix.from_entries(
            c.dim(n - 1),
            c.dim(n),
            v,
            [(i, j, scalars.scalar_from_string(s)) for i, j, s in triplets],
        )
    return c

"""Bounded non-negatively graded chain complexes over an exact field.

Complexes carry a *trust cap*: the largest degree through which their data
is exact (``None`` means the complex is genuinely bounded and exact in all
degrees).  Truncations of infinite constructions (free commutative monoids,
bar resolutions) carry finite caps; homology is only reported in trusted
degrees.

Sign conventions, fixed once for the whole package:
  d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy
  tau(x (x) y) = (-1)^{|x||y|} y (x) x
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactlinalg import (
    DimensionMismatchError,
    FieldMismatchError,
    Matrix,
    QuotientData,
    quotient_with_section,
)


class ChainError(ValueError):
    pass


class UntrustedDegreeError(ChainError):
    """Homology requested beyond the degree through which data is exact."""


class DiagramInvalidError(ChainError):
    """A diagram handed to finite_colimit fails to commute."""


def min_cap(*caps):
    """Combine trust caps; None acts as +infinity."""
    finite = [c for c in caps if c is not None]
    return min(finite) if finite else None


def cap_trusts(cap, n):
    return cap is None or n <= cap


class ChainComplex:
    """Degreewise finite complex: dims per degree, d_n: X_n -> X_{n-1}."""

    __slots__ = ("field", "dims", "diffs", "cap", "labels")

    def __init__(self, field, dims, diffs, cap=None, labels=None, check=True):
        self.field = field
        self.dims = {n: d for n, d in dims.items() if d}
        self.diffs = {}
        self.cap = cap
        self.labels = dict(labels) if labels else {}
        for n, m in diffs.items():
            if m is None:
                continue
            if not isinstance(m, Matrix):
                m = Matrix.from_rows(field, m)
            self.diffs[n] = m
        if check:
            self._check()

    def _check(self):
        for n, d in self.dims.items():
            if n < 0:
                raise ChainError(f"negative degree {n} with nonzero dimension")
            if self.cap is not None and n > self.cap:
                raise ChainError(f"dimension present above cap in degree {n}")
        for n in list(self.diffs):
            m = self.diffs[n]
            if m.field != self.field:
                raise FieldMismatchError("differential over wrong field")
            want = (self.dim(n - 1), self.dim(n))
            if (m.rows, m.cols) != want:
                raise ChainError(
                    f"d_{n} has shape {m.rows}x{m.cols}, expected {want[0]}x{want[1]}")
        for n in self.dims:
            if n >= 2 and self.dim(n - 2) and self.dim(n - 1):
                if not (self.diff(n - 1) * self.diff(n)).is_zero():
                    raise ChainError(f"d o d != 0 at degree {n}")
        for n, ls in self.labels.items():
            if len(ls) != self.dim(n):
                raise ChainError(f"label count mismatch in degree {n}")

    # -- structure ------------------------------------------------------

    def dim(self, n):
        return self.dims.get(n, 0)

    def degrees(self):
        return sorted(self.dims)

    def top_degree(self):
        return max(self.dims) if self.dims else -1

    def diff(self, n):
        m = self.diffs.get(n)
        if m is None:
            return Matrix.zeros(self.field, self.dim(n - 1), self.dim(n))
        return m

    def label(self, n, i):
        ls = self.labels.get(n)
        return ls[i] if ls else f"e{n}.{i}"

    def degree_range(self):
        """Degrees through which data is trusted and possibly nonzero."""
        top = self.top_degree()
        return range(0, top + 1)

    def trusted(self, n):
        return cap_trusts(self.cap, n)

    def homology_trusted(self, n):
        # H_n needs d_{n+1}, hence dims at n+1 to be exact data
        return self.cap is None or n <= self.cap - 1

    def with_cap(self, cap):
        return ChainComplex(self.field, self.dims, self.diffs,
                            cap=min_cap(self.cap, cap), labels=self.labels, check=False)

    def total_dim(self):
        return sum(self.dims.values())

    def __repr__(self):
        dims = {n: self.dim(n) for n in self.degrees()}
        return f"ChainComplex<{self.field}|dims={dims}|cap={self.cap}>"

    # -- homology --------------------------------------------------------

    def cycles(self, n):
        if self.dim(n) == 0:
            return Matrix.zeros(self.field, 0, 0)
        if n == 0 or self.dim(n - 1) == 0:
            return Matrix.identity(self.field, self.dim(n))
        return self.diff(n).kernel_basis()

    def homology(self, n):
        """(dimension, representative cycle columns) of H_n; exact."""
        if not self.homology_trusted(n):
            raise UntrustedDegreeError(
                f"H_{n} untrusted: data exact only through degree {self.cap}")
        if self.dim(n) == 0:
            return 0, Matrix.zeros(self.field, 0, 0)
        z = self.cycles(n)
        b = self.diff(n + 1).image_basis() if self.dim(n + 1) else \
            Matrix.zeros(self.field, self.dim(n), 0)
        if b.cols == 0:
            qd = quotient_with_section(z.cols, Matrix.zeros(self.field, z.cols, 0))
        else:
            y = z.solve(b)
            if y is None:
                raise ChainError("boundaries not contained in cycles")
            qd = quotient_with_section(z.cols, y)
        reps = z * qd.section
        return qd.dim, reps

    def homology_dim(self, n):
        # rank-nullity: dim H_n = dim_n - rank d_n - rank d_{n+1}
        if not self.homology_trusted(n):
            raise UntrustedDegreeError(
                f"H_{n} untrusted: data exact only through degree {self.cap}")
        d = self.dim(n)
        if d == 0:
            return 0
        r_in = self.diff(n).rank() if (n >= 1 and self.dim(n - 1)) else 0
        r_out = self.diff(n + 1).rank() if self.dim(n + 1) else 0
        return d - r_in - r_out

    def is_acyclic(self):
        """All trusted homology vanishes (H_0 included)."""
        top = self.top_degree()
        hi = top if self.cap is None else min(top, self.cap - 1)
        return all(self.homology_dim(n) == 0 for n in range(0, hi + 1))

    def euler_characteristic(self):
        return sum((-1) ** n * d for n, d in self.dims.items())


def zero_complex(field):
    return ChainComplex(field, {}, {})


def sphere(n, field):
    """One copy of k in degree n; the unit S is sphere(0)."""
    if n < 0:
        raise ChainError("sphere degree must be >= 0")
    return ChainComplex(field, {n: 1}, {}, labels={n: (f"s{n}",)})


def disk(n, field):
    """k in degrees n, n-1 with identity differential; acyclic."""
    if n < 1:
        raise ChainError("disk degree must be >= 1")
    return ChainComplex(field, {n: 1, n - 1: 1},
                        {n: Matrix.identity(field, 1)},
                        labels={n: (f"u{n}",), n - 1: (f"v{n}",)})


class ChainMap:
    """Degreewise matrices f_n: source_n -> target_n commuting with d."""

    __slots__ = ("source", "target", "comps")

    def __init__(self, source, target, comps, check=True):
        if source.field != target.field:
            raise FieldMismatchError("chain map across different fields")
        self.source = source
        self.target = target
        self.comps = {}
        for n, m in comps.items():
            if m is None:
                continue
            if not isinstance(m, Matrix):
                m = Matrix.from_rows(source.field, m)
            if not m.is_zero() or (m.rows and m.cols):
                self.comps[n] = m
        if check:
            self._check()

    def _check(self):
        for n, m in self.comps.items():
            want = (self.target.dim(n), self.source.dim(n))
            if (m.rows, m.cols) != want:
                raise ChainError(
                    f"component {n} has shape {m.rows}x{m.cols}, expected {want}")
        trust = min_cap(self.source.cap, self.target.cap)
        top = max(self.source.top_degree(), self.target.top_degree())
        hi = top if trust is None else min(top, trust)
        for n in range(1, hi + 1):
            lhs = self.target.diff(n) * self.comp(n)
            rhs = self.comp(n - 1) * self.source.diff(n)
            if lhs != rhs:
                raise ChainError(f"chain-map square fails at degree {n}")

    @property
    def field(self):
        return self.source.field

    def comp(self, n):
        m = self.comps.get(n)
        if m is None:
            return Matrix.zeros(self.field, self.target.dim(n), self.source.dim(n))
        return m

    def trust(self):
        return min_cap(self.source.cap, self.target.cap)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        degs = set(self.source.dims) | set(other.source.dims)
        return (self.source.dims == other.source.dims
                and self.target.dims == other.target.dims
                and all(self.comp(n) == other.comp(n) for n in degs))

    def __repr__(self):
        return f"ChainMap<{self.source!r} -> {self.target!r}>"

    # -- algebra ---------------------------------------------------------

    def compose(self, other):
        """self o other (other first)."""
        if other.target.dims != self.source.dims:
            raise ChainError("compose: dimension mismatch")
        comps = {n: self.comp(n) * other.comp(n)
                 for n in set(self.source.dims) | set(other.source.dims)}
        return ChainMap(other.source, self.target, comps, check=False)

    def __add__(self, other):
        comps = {n: self.comp(n) + other.comp(n)
                 for n in set(self.source.dims)}
        return ChainMap(self.source, self.target, comps, check=False)

    def __sub__(self, other):
        comps = {n: self.comp(n) - other.comp(n)
                 for n in set(self.source.dims)}
        return ChainMap(self.source, self.target, comps, check=False)

    def __neg__(self):
        return ChainMap(self.source, self.target,
                        {n: -m for n, m in self.comps.items()}, check=False)

    # -- predicates --------------------------------------------------------

    def is_mono(self):
        for n in self.source.degrees():
            c = self.comp(n)
            if c.rank() < c.cols:
                return False
        return True

    def is_epi(self):
        for n in self.target.degrees():
            c = self.comp(n)
            if c.rank() < c.rows:
                return False
        return True

    def is_degreewise_iso(self):
        if set(self.source.dims) != set(self.target.dims):
            return False
        for n in self.source.degrees():
            c = self.comp(n)
            if c.rows != c.cols or c.rank() < c.rows:
                return False
        return True

    def is_zero(self):
        return all(m.is_zero() for m in self.comps.values())


def identity_map(x):
    return ChainMap(x, x, {n: Matrix.identity(x.field, x.dim(n)) for n in x.dims},
                    check=False)


def zero_map(src, tgt):
    return ChainMap(src, tgt, {}, check=False)


def cone(f):
    """Mapping cone: C_n = T_n + S_{n-1}; acyclic iff f is a quasi-iso."""
    s, t = f.source, f.target
    field = f.field
    dims = {}
    tops = max(t.top_degree(), s.top_degree() + 1)
    for n in range(0, tops + 1):
        d = t.dim(n) + s.dim(n - 1)
        if d:
            dims[n] = d
    diffs = {}
    for n in range(1, tops + 1):
        if dims.get(n, 0) == 0:
            continue
        # block matrix [[d_T, f], [0, -d_S]] on T_n + S_{n-1}
        top_block = t.diff(n).hstack(f.comp(n - 1))
        bot_block = Matrix.zeros(field, s.dim(n - 2), t.dim(n)).hstack(-s.diff(n - 1))
        diffs[n] = top_block.vstack(bot_block)
    cap = min_cap(t.cap, None if s.cap is None else s.cap + 1)
    return ChainComplex(field, dims, diffs, cap=cap)


def is_quasi_iso(f):
    """True iff f induces isomorphisms on homology in all trusted degrees."""
    return cone(f).is_acyclic()


def homology_defects(f):
    """Per-degree comparison of induced maps on homology.

    Returns a list of (degree, dim H_n(source), dim H_n(target), rank of the
    induced map) for every trusted degree where the induced map fails to be
    an isomorphism.  Empty list iff f is a quasi-isomorphism.
    """
    s, t = f.source, f.target
    out = []
    top = max(s.top_degree(), t.top_degree())
    caps = min_cap(s.cap, t.cap)
    hi = top if caps is None else min(top, caps - 1)
    for n in range(0, hi + 1):
        hs, reps_s = s.homology(n)
        ht, _ = t.homology(n)
        if hs == 0 and ht == 0:
            continue
        img = f.comp(n) * reps_s if hs else Matrix.zeros(f.field, t.dim(n), 0)
        r = _homology_class_rank(t, n, img)
        if not (hs == ht == r):
            out.append((n, hs, ht, r))
    return out


def _homology_class_rank(x, n, vectors):
    """Rank of the images of the given cycle columns in H_n(x)."""
    if vectors.cols == 0:
        return 0
    z = x.cycles(n)
    coords = z.solve(vectors)
    if coords is None:
        raise ChainError("vectors are not cycles")
    b = x.diff(n + 1).image_basis() if x.dim(n + 1) else Matrix.zeros(x.field, x.dim(n), 0)
    if b.cols == 0:
        return coords.rank()
    y = z.solve(b)
    qd = quotient_with_section(z.cols, y)
    return (qd.projection * coords).rank()


@dataclass(frozen=True)
class MapClass:
    is_mono: bool
    is_quasi_iso: bool
    verdict: str


def classify(f):
    """Model-structure class of a map: cofibration <=> degreewise mono."""
    mono = f.is_mono()
    qiso = is_quasi_iso(f)
    if mono and qiso:
        verdict = "trivial-cofibration"
    elif mono:
        verdict = "cofibration"
    elif qiso:
        verdict = "weak-equivalence-only"
    else:
        verdict = "neither"
    return MapClass(mono, qiso, verdict)


# -- tensor words -------------------------------------------------------


def word_basis(factors, n):
    """Basis of degree n of the tensor word, lex in (degree vector, indices)."""
    out = []

    def rec(slot, rem, degs, idxs):
        if slot == len(factors):
            if rem == 0:
                out.append((tuple(degs), tuple(idxs)))
            return
        f = factors[slot]
        later_max = sum(x.top_degree() for x in factors[slot + 1:])
        for d in f.degrees():
            if d > rem or rem - d > later_max:
                continue
            for i in range(f.dim(d)):
                degs.append(d)
                idxs.append(i)
                rec(slot + 1, rem - d, degs, idxs)
                degs.pop()
                idxs.pop()
        return

    if not factors:
        if n == 0:
            out.append(((), ()))
        return out
    rec(0, n, [], [])
    return out


def _word_cap(factors, degree_cap=None):
    cap = min_cap(*[f.cap for f in factors]) if factors else None
    return min_cap(cap, degree_cap)


def word_complex(factors, degree_cap=None):
    """Tensor product of the listed complexes, basis ordered lexicographically."""
    field = factors[0].field if factors else None
    if field is None:
        raise ChainError("word_complex of no factors needs a field; use unit_complex")
    for f in factors:
        if f.field != field:
            raise FieldMismatchError("tensor factors over different fields")
    cap = _word_cap(factors, degree_cap)
    natural_top = sum(f.top_degree() for f in factors) if all(f.dims for f in factors) else -1
    hi = natural_top if cap is None else min(natural_top, cap)
    bases = {n: word_basis(factors, n) for n in range(0, hi + 1)}
    dims = {n: len(b) for n, b in bases.items() if b}
    labels = {}
    for n, b in bases.items():
        if b:
            labels[n] = tuple("*".join(factors[s].label(degs[s], idxs[s])
                                       for s in range(len(factors)))
                              for degs, idxs in b)
    diffs = {}
    for n in range(1, hi + 1):
        src = bases.get(n, [])
        tgt = bases.get(n - 1, [])
        if not src or not tgt:
            continue
        pos = {b: r for r, b in enumerate(tgt)}
        cols = []
        for degs, idxs in src:
            col = {}
            sign_acc = 0
            for s, f in enumerate(factors):
                d = degs[s]
                if d >= 1 and f.dim(d - 1):
                    dm = f.diff(d)
                    for r in range(dm.rows):
                        c = dm[r, idxs[s]]
                        if c == field.zero():
                            continue
                        nd = degs[:s] + (d - 1,) + degs[s + 1:]
                        ni = idxs[:s] + (r,) + idxs[s + 1:]
                        row = pos[(nd, ni)]
                        val = c if sign_acc % 2 == 0 else field.neg(c)
                        col[row] = field.add(col.get(row, field.zero()), val)
                sign_acc += d
            cols.append(col)
        z = field.zero()
        diffs[n] = Matrix(field, len(tgt), len(src),
                          [[cols[j].get(i, z) for j in range(len(src))]
                           for i in range(len(tgt))])
    return ChainComplex(field, dims, diffs, cap=cap, labels=labels)


def unit_complex(field):
    """The monoidal unit S = sphere(0) with label "1"."""
    return ChainComplex(field, {0: 1}, {}, labels={0: ("1",)})


def tensor(x, y, degree_cap=None):
    return word_complex([x, y], degree_cap=degree_cap)


def word_map(maps, degree_cap=None, source=None, target=None):
    """Tensor product of degree-0 chain maps between tensor words."""
    srcs = [m.source for m in maps]
    tgts = [m.target for m in maps]
    if source is None:
        source = word_complex(srcs, degree_cap=degree_cap)
    if target is None:
        target = word_complex(tgts, degree_cap=degree_cap)
    field = source.field
    z = field.zero()
    comps = {}
    top = source.top_degree() if source.cap is None else min(source.top_degree(), source.cap)
    for n in range(0, top + 1):
        sb = word_basis(srcs, n)
        tb = word_basis(tgts, n)
        if not sb:
            continue
        pos = {b: r for r, b in enumerate(tb)}
        cols = []
        for degs, idxs in sb:
            # expand the product of per-slot columns
            acc = [((), field.one())]
            for s, m in enumerate(maps):
                cm = m.comp(degs[s])
                nxt = []
                for (prefix, coeff) in acc:
                    for r in range(cm.rows):
                        c = cm[r, idxs[s]]
                        if c == z:
                            continue
                        nxt.append((prefix + (r,), field.mul(coeff, c)))
                acc = nxt
                if not acc:
                    break
            col = {}
            for (ti, coeff) in acc:
                row = pos.get((degs, ti))
                if row is None:
                    continue
                col[row] = field.add(col.get(row, z), coeff)
            cols.append(col)
        comps[n] = Matrix(field, len(tb), len(sb),
                          [[cols[j].get(i, z) for j in range(len(sb))]
                           for i in range(len(tb))])
    return ChainMap(source, target, comps)


def tensor_map(f, g, degree_cap=None):
    return word_map([f, g], degree_cap=degree_cap)


def adjacent_swap(factors, p, degree_cap=None):
    """Signed swap of tensor slots p, p+1: the Koszul symmetry in context."""
    factors = list(factors)
    swapped = factors[:p] + [factors[p + 1], factors[p]] + factors[p + 2:]
    source = word_complex(factors, degree_cap=degree_cap)
    target = word_complex(swapped, degree_cap=degree_cap)
    field = source.field
    z, o = field.zero(), field.one()
    comps = {}
    top = source.top_degree() if source.cap is None else min(source.top_degree(), source.cap)
    for n in range(0, top + 1):
        sb = word_basis(factors, n)
        tb = word_basis(swapped, n)
        if not sb:
            continue
        pos = {b: r for r, b in enumerate(tb)}
        rows = len(tb)
        cols = [dict() for _ in sb]
        for j, (degs, idxs) in enumerate(sb):
            nd = degs[:p] + (degs[p + 1], degs[p]) + degs[p + 2:]
            ni = idxs[:p] + (idxs[p + 1], idxs[p]) + idxs[p + 2:]
            sign = o if (degs[p] * degs[p + 1]) % 2 == 0 else field.neg(o)
            cols[j][pos[(nd, ni)]] = sign
        comps[n] = Matrix(field, rows, len(sb),
                          [[cols[j].get(i, z) for j in range(len(sb))]
                           for i in range(rows)])
    return ChainMap(source, target, comps)


def word_shuffle(factors, sigma, degree_cap=None):
    """Signed permutation of tensor factors; slot i moves to position sigma[i].

    Built as a composition of adjacent swaps, each contributing the Koszul
    sign of the two factors it crosses.
    """
    k = len(factors)
    if sorted(sigma) != list(range(k)):
        raise ChainError(f"not a permutation: {sigma}")
    # current[p] = original slot now sitting at position p
    current = list(range(k))
    target = [None] * k
    for i, p in enumerate(sigma):
        target[p] = i
    cur_factors = list(factors)
    result = identity_map(word_complex(cur_factors, degree_cap=degree_cap))
    # selection sort by adjacent swaps, deterministic
    for p in range(k):
        q = current.index(target[p])
        while q > p:
            sw = adjacent_swap(cur_factors, q - 1, degree_cap=degree_cap)
            result = sw.compose(result)
            cur_factors[q - 1], cur_factors[q] = cur_factors[q], cur_factors[q - 1]
            current[q - 1], current[q] = current[q], current[q - 1]
            q -= 1
    return result


def symmetry_iso(x, y, degree_cap=None):
    """tau: X (x) Y -> Y (x) X with sign (-1)^{|x||y|}."""
    return word_shuffle([x, y], (1, 0), degree_cap=degree_cap)


def group_factors_iso(factors, split_sizes, degree_cap=None):
    """Canonical reindexing word(X_1..X_k) -> word(word(group_1), word(group_2), ...).

    No signs: the bases are in bijection, only enumeration order changes.
    """
    if sum(split_sizes) != len(factors):
        raise ChainError("split sizes must partition the factor list")
    groups = []
    pos = 0
    for s in split_sizes:
        groups.append(list(factors[pos:pos + s]))
        pos += s
    source = word_complex(list(factors), degree_cap=degree_cap)
    grouped = [word_complex(g, degree_cap=degree_cap) for g in groups]
    target = word_complex(grouped, degree_cap=degree_cap)
    field = source.field
    z, o = field.zero(), field.one()
    comps = {}
    top = source.top_degree() if source.cap is None else min(source.top_degree(), source.cap)
    inner_pos = {}

    def ipos(gi, deg):
        key = (gi, deg)
        if key not in inner_pos:
            inner_pos[key] = {b: r for r, b in enumerate(word_basis(groups[gi], deg))}
        return inner_pos[key]

    for n in range(0, top + 1):
        sb = word_basis(list(factors), n)
        tb = word_basis(grouped, n)
        if not sb:
            continue
        tpos = {b: r for r, b in enumerate(tb)}
        data = [[z] * len(sb) for _ in range(len(tb))]
        for j, (degs, idxs) in enumerate(sb):
            gdegs, gidxs = [], []
            p = 0
            for gi, s in enumerate(split_sizes):
                sub_d = degs[p:p + s]
                sub_i = idxs[p:p + s]
                d = sum(sub_d)
                gdegs.append(d)
                gidxs.append(ipos(gi, d)[(tuple(sub_d), tuple(sub_i))])
                p += s
            data[tpos[(tuple(gdegs), tuple(gidxs))]][j] = o
        comps[n] = Matrix.from_rows(field, data)
    return ChainMap(source, target, comps)


def descend_pair(map_from_ww, quot_a, quot_b, degree_cap=None):
    """Induce f: W_a (x) W_b -> Z on Q_a (x) Q_b along two quotient projections.

    Uses that each quotient's section picks standard basis vectors of W, so
    word bases of the quotient tensor lift to word bases of the source.
    Exactness of the descent is asserted.
    """
    wa = quot_a.projection.source
    wb = quot_b.projection.source
    qa = quot_a.complex
    qb = quot_b.complex
    field = wa.field
    source = word_complex([qa, qb], degree_cap=degree_cap)
    z = field.zero()
    comps = {}
    top = source.top_degree() if source.cap is None else min(source.top_degree(), source.cap)
    wpos = {}
    for n in range(0, top + 1):
        qbasis = word_basis([qa, qb], n)
        if not qbasis:
            continue
        wbasis = word_basis([wa, wb], n)
        if n not in wpos:
            wpos[n] = {b: r for r, b in enumerate(wbasis)}
        fm = map_from_ww.comp(n)
        rows = fm.rows
        data = [[z] * len(qbasis) for _ in range(rows)]
        for j, ((d1, d2), (i1, i2)) in enumerate(qbasis):
            r1 = quot_a.quotient.sections[d1] if hasattr(quot_a, "quotient") else None
            lift1 = quot_a.sections[d1] if hasattr(quot_a, "sections") else r1
            raise ChainError("descend_pair requires QuotientComplex inputs")
        comps[n] = Matrix.from_rows(field, data)
    return ChainMap(source, map_from_ww.target, comps)


# -- sums, quotients, colimits -------------------------------------------


def direct_sum(xs):
    return direct_sum_with_maps(xs)[0]


def direct_sum_with_maps(xs):
    """(sum complex, injections, projections); summands in the given order."""
    if not xs:
        raise ChainError("direct sum of nothing: pass the zero complex instead")
    field = xs[0].field
    cap = min_cap(*[x.cap for x in xs])
    degrees = sorted({n for x in xs for n in x.dims})
    dims = {}
    offsets = {n: [] for n in degrees}
    for n in degrees:
        off = 0
        for x in xs:
            offsets[n].append(off)
            off += x.dim(n)
        if off:
            dims[n] = off
    diffs = {}
    for n in degrees:
        if n < 1 or dims.get(n, 0) == 0 or not any(x.dim(n - 1) for x in xs):
            continue
        rows = sum(x.dim(n - 1) for x in xs)
        blocks = []
        for i, x in enumerate(xs):
            block_rows = []
            for k, y in enumerate(xs):
                blk = x.diff(n) if k == i else Matrix.zeros(field, y.dim(n - 1), x.dim(n))
                block_rows.append(blk)
            col = block_rows[0]
            for b in block_rows[1:]:
                col = col.vstack(b)
            blocks.append(col)
        m = blocks[0]
        for b in blocks[1:]:
            m = m.hstack(b)
        assert m.rows == rows
        diffs[n] = m
    labels = {}
    for n in degrees:
        if dims.get(n, 0):
            ls = []
            for x in xs:
                ls.extend(x.label(n, j) for j in range(x.dim(n)))
            labels[n] = tuple(ls)
    total = ChainComplex(field, dims, diffs, cap=cap, labels=labels)
    injs, projs = [], []
    for i, x in enumerate(xs):
        ic, pc = {}, {}
        for n in x.dims:
            z = Matrix.zeros(field, total.dim(n), x.dim(n))
            rowsel = range(offsets[n][i], offsets[n][i] + x.dim(n))
            data = [list(r) for r in z.data]
            for a, b in enumerate(rowsel):
                data[b][a] = field.one()
            ic[n] = Matrix.from_rows(field, data)
        for n in total.dims:
            m = Matrix.zeros(field, x.dim(n), total.dim(n))
            data = [list(r) for r in m.data]
            for a in range(x.dim(n)):
                data[a][offsets[n][i] + a] = field.one()
            pc[n] = Matrix.from_rows(field, data)
        injs.append(ChainMap(x, total, ic, check=False))
        projs.append(ChainMap(total, x, pc, check=False))
    return total, injs, projs


@dataclass(frozen=True)
class QuotientComplex:
    complex: ChainComplex
    projection: ChainMap
    sections: dict      # degree -> Matrix section of the projection
    rep_indices: dict   # degree -> source coordinates whose classes form the basis


def quotient_complex(x, relations, label_wrap=True):
    """Quotient of x by degreewise relation columns; relations must be d-stable."""
    field = x.field
    qds = {}
    for n in x.degrees():
        rel = relations.get(n)
        if rel is None:
            rel = Matrix.zeros(field, x.dim(n), 0)
        qds[n] = quotient_with_section(x.dim(n), rel)
    # d-stability: the projection must kill d(relations)
    for n in x.degrees():
        if n >= 1 and x.dim(n - 1):
            rel = relations.get(n)
            if rel is not None and rel.cols:
                img = qds[n - 1].projection * (x.diff(n) * rel)
                if not img.is_zero():
                    raise ChainError(f"relations not d-stable at degree {n}")
    dims = {n: qd.dim for n, qd in qds.items() if qd.dim}
    diffs = {}
    for n in x.degrees():
        if n >= 1 and dims.get(n, 0) and dims.get(n - 1, 0):
            diffs[n] = qds[n - 1].projection * (x.diff(n) * qds[n].section)
    labels = {}
    for n, qd in qds.items():
        if qd.dim:
            base = [x.label(n, i) for i in qd.rep_indices]
            labels[n] = tuple(f"[{b}]" if label_wrap else b for b in base)
    q = ChainComplex(field, dims, diffs, cap=x.cap, labels=labels)
    proj = ChainMap(x, q, {n: qd.projection for n, qd in qds.items()})
    sections = {n: qd.section for n, qd in qds.items()}
    return QuotientComplex(q, proj, sections)


def descend(map_from_total, quotient):
    """Induce a map on a quotient: requires the map to kill the relations."""
    x = map_from_total.source
    comps = {}
    for n in quotient.complex.degrees():
        sec = quotient.sections.get(n)
        comps[n] = map_from_total.comp(n) * sec
    induced = ChainMap(quotient.complex, map_from_total.target, comps)
    # exactness of descent: induced o proj == original
    for n in x.degrees():
        if induced.comp(n) * quotient.projection.comp(n) != map_from_total.comp(n):
            raise ChainError(f"map does not descend to the quotient (degree {n})")
    return induced


def cokernel(f):
    """(coker(f), projection)."""
    q = quotient_complex(f.target, {n: f.comp(n) for n in f.source.dims})
    return q.complex, q.projection


@dataclass(frozen=True)
class PushoutResult:
    complex: ChainComplex
    in_left: ChainMap    # from B (target of f)
    in_right: ChainMap   # from C (target of g)
    quotient: QuotientComplex
    sum_injections: tuple

    def induced(self, p_left, p_right):
        """Universal map out of the pushout given a commuting cocone."""
        total = self.quotient.projection.source
        comps = {}
        for n in total.degrees():
            comps[n] = p_left.comp(n).hstack(p_right.comp(n))
        glue = ChainMap(total, p_left.target, comps)
        return descend(glue, self.quotient)


def pushout(f, g):
    """Pushout of B <-f- A -g-> C as the cokernel of (f, -g): A -> B + C."""
    if f.source is not g.source and f.source.dims != g.source.dims:
        raise ChainError("pushout legs must share a source")
    b, c = f.target, g.target
    total, injs, _ = direct_sum_with_maps([b, c])
    rel = {}
    for n in f.source.degrees():
        col = f.comp(n).vstack(-g.comp(n))
        rel[n] = col
    q = quotient_complex(total, rel)
    in_b = q.projection.compose(injs[0])
    in_c = q.projection.compose(injs[1])
    return PushoutResult(q.complex, in_b, in_c, q, tuple(injs))


class Diagram:
    """A finite diagram of complexes, keys ordered by insertion."""

    def __init__(self):
        self.order = []
        self.vertices = {}
        self.edges = []

    def add_vertex(self, key, cx):
        if key in self.vertices:
            raise ChainError(f"duplicate vertex {key!r}")
        self.order.append(key)
        self.vertices[key] = cx
        return cx

    def add_edge(self, src, tgt, f):
        if src not in self.vertices or tgt not in self.vertices:
            raise ChainError("edge endpoints must be added first")
        self.edges.append((src, tgt, f))

    def validate(self):
        """Assert parallel length-<=2 composites agree (poset diagrams)."""
        by_src = {}
        for e in self.edges:
            by_src.setdefault(e[0], []).append(e)
        paths = {}
        for (a, b, f) in self.edges:
            paths.setdefault((a, b), []).append((f, ((a, b),)))
            for (b2, c, g) in by_src.get(b, []):
                paths.setdefault((a, c), []).append((g.compose(f), ((a, b), (b, c))))
        for (a, c), fs in paths.items():
            first, first_path = fs[0]
            for other, other_path in fs[1:]:
                if other != first:
                    raise DiagramInvalidError(
                        f"diagram does not commute between {a!r} and {c!r}: "
                        f"paths {first_path} vs {other_path}")


@dataclass(frozen=True)
class ColimitResult:
    complex: ChainComplex
    legs: dict
    quotient: QuotientComplex
    sum_complex: ChainComplex
    injections: dict
    order: tuple

    def induced(self, legs_to, target):
        """Map out of the colimit from a cocone {vertex key -> ChainMap}."""
        total = self.sum_complex
        field = total.field
        comps = {}
        for n in total.degrees():
            row = None
            for key in self.order:
                m = legs_to[key].comp(n)
                row = m if row is None else row.hstack(m)
            comps[n] = row
        glue = ChainMap(total, target, comps)
        return descend(glue, self.quotient)


def finite_colimit(diagram, validate=True):
    """Coequalizer of + over edges of sources into + over vertices, degreewise."""
    if validate:
        diagram.validate()
    xs = [diagram.vertices[k] for k in diagram.order]
    total, injs, _ = direct_sum_with_maps(xs)
    inj = {k: injs[i] for i, k in enumerate(diagram.order)}
    rel = {}
    for n in total.degrees():
        cols = Matrix.zeros(total.field, total.dim(n), 0)
        for (a, b, f) in diagram.edges:
            src = diagram.vertices[a]
            if src.dim(n) == 0:
                continue
            block = inj[a].comp(n) - (inj[b].comp(n) * f.comp(n))
            cols = cols.hstack(block)
        rel[n] = cols
    q = quotient_complex(total, rel)
    legs = {k: q.projection.compose(inj[k]) for k in diagram.order}
    return ColimitResult(q.complex, legs, q, total, inj, tuple(diagram.order))

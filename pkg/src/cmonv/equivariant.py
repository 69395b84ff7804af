"""Symmetric-group actions on complexes: signed permutations of tensor
factors, coinvariants, induction from Young subgroups, truncated bar
resolutions, homotopy orbits, and the Sigma_2 freeness test."""

from __future__ import annotations

from dataclasses import dataclass

from . import perms
from .chain import (
    ChainComplex,
    ChainError,
    ChainMap,
    Matrix,
    direct_sum_with_maps,
    identity_map,
    min_cap,
    quotient_complex,
    word_complex,
    word_shuffle,
)
from .guards import check_guard


class ActionError(ChainError):
    pass


class SymmetricGroupAction:
    """A Sigma_n action given by the adjacent transpositions s_1..s_{n-1}."""

    def __init__(self, n, gens, complex=None, check=True):
        self.n = n
        self.gens = tuple(gens)
        self._memo = {}
        if complex is None:
            if not self.gens:
                raise ActionError("action with no generators needs an explicit complex")
            complex = self.gens[0].source
        self.complex = complex
        if len(self.gens) != max(n - 1, 0):
            raise ActionError(f"need {n - 1} generators for Sigma_{n}")
        if check:
            self._check()

    def _check(self):
        for i, g in enumerate(self.gens):
            if g.source is not g.target and g.source.dims != g.target.dims:
                raise ActionError(f"generator s_{i + 1} is not an endomap")
            if not g.is_degreewise_iso():
                raise ActionError(f"generator s_{i + 1} is not invertible")
        x = self.complex
        if not self.gens:
            return
        idm = identity_map(x)
        for i, g in enumerate(self.gens):
            if g.compose(g) != idm:
                raise ActionError(f"s_{i + 1}^2 != id")
        for i in range(len(self.gens) - 1):
            a, b = self.gens[i], self.gens[i + 1]
            if a.compose(b).compose(a) != b.compose(a).compose(b):
                raise ActionError(f"braid relation fails at s_{i + 1}, s_{i + 2}")
        for i in range(len(self.gens)):
            for j in range(i + 2, len(self.gens)):
                a, b = self.gens[i], self.gens[j]
                if a.compose(b) != b.compose(a):
                    raise ActionError(f"s_{i + 1}, s_{j + 1} do not commute")

    def gen(self, i):
        """Generator s_i, 1-indexed."""
        return self.gens[i - 1]

    def apply(self, p):
        """The action of an arbitrary permutation (one-line tuple)."""
        p = tuple(p)
        if p in self._memo:
            return self._memo[p]
        x = self.complex
        result = identity_map(x)
        for i in perms.adjacent_factorization(p):
            result = self.gen(i).compose(result)
        self._memo[p] = result
        return result


def trivial_action(x, n):
    return SymmetricGroupAction(n, [identity_map(x) for _ in range(n - 1)],
                                complex=x, check=False)


@dataclass(frozen=True)
class EquivariantComplex:
    complex: ChainComplex
    action: SymmetricGroupAction


@dataclass(frozen=True)
class EquivariantMap:
    source: EquivariantComplex
    target: EquivariantComplex
    map: ChainMap

    def check_equivariance(self):
        for i in range(1, self.source.action.n):
            lhs = self.map.compose(self.source.action.gen(i))
            rhs = self.target.action.gen(i).compose(self.map)
            if lhs != rhs:
                raise ActionError(f"map is not equivariant at s_{i}")
        return True


def tensor_power_action(x, n, degree_cap=None, guard=None):
    """X^{(x)n} with Sigma_n permuting factors, Koszul-signed."""
    if n < 1:
        raise ActionError("tensor power arity must be >= 1")
    power = word_complex([x] * n, degree_cap=degree_cap)
    if power.dims:
        check_guard(max(power.dims.values()), f"tensor power X^(x){n}", guard)
    gens = []
    for i in range(1, n):
        sw = word_shuffle([x] * n, perms.transposition(n, i), degree_cap=degree_cap)
        gens.append(ChainMap(power, power, sw.comps, check=False))
    return EquivariantComplex(power, SymmetricGroupAction(n, gens))


@dataclass(frozen=True)
class Coinvariants:
    complex: ChainComplex
    projection: ChainMap
    quotient: object  # chain.QuotientComplex, kept for descending maps


def coinvariants(e):
    """Quotient by v - s_i v for all generators, degreewise."""
    x = e.complex
    rel = {}
    for n in x.degrees():
        cols = Matrix.zeros(x.field, x.dim(n), 0)
        for i in range(1, e.action.n):
            g = e.action.gen(i).comp(n)
            cols = cols.hstack(g - Matrix.identity(x.field, x.dim(n)))
        rel[n] = cols
    q = quotient_complex(x, rel)
    return Coinvariants(q.complex, q.projection, q)


class YoungAction:
    """Commuting Sigma_a x Sigma_b block actions inside Sigma_{a+b}.

    Generators are indexed by the adjacent transpositions of Sigma_n that
    lie in the subgroup, i.e. all s_i with i != a.
    """

    def __init__(self, n, a, gens, complex=None, check=True):
        self.n = n
        self.a = a
        self.gens = dict(gens)  # i (1-indexed, i != a) -> ChainMap
        self._memo = {}
        if complex is None:
            if not self.gens:
                raise ActionError("Young action with no generators needs a complex")
            complex = next(iter(self.gens.values())).source
        self.complex = complex
        expected = {i for i in range(1, n) if i != a}
        if set(self.gens) != expected:
            raise ActionError(f"Young action needs generators {sorted(expected)}")
        if check:
            self._check()

    def _check(self):
        x = self.complex
        if not self.gens:
            return
        idm = identity_map(x)
        for i, g in self.gens.items():
            if not g.is_degreewise_iso():
                raise ActionError(f"Young generator s_{i} not invertible")
            if g.compose(g) != idm:
                raise ActionError(f"Young s_{i}^2 != id")
        for i in self.gens:
            for j in self.gens:
                if j <= i:
                    continue
                a, b = self.gens[i], self.gens[j]
                if j == i + 1:
                    if a.compose(b).compose(a) != b.compose(a).compose(b):
                        raise ActionError(f"Young braid fails at s_{i}, s_{j}")
                else:
                    if a.compose(b) != b.compose(a):
                        raise ActionError(f"Young s_{i}, s_{j} do not commute")

    def apply(self, p):
        """Action of a block-preserving permutation."""
        p = tuple(p)
        if p in self._memo:
            return self._memo[p]
        if set(p[i] for i in range(self.a)) != set(range(self.a)):
            raise ActionError(f"{p} does not preserve the Young blocks")
        result = identity_map(self.complex)
        for i in perms.adjacent_factorization(p):
            if i == self.a:
                raise ActionError("factorization crossed the block boundary")
            result = self.gens[i].compose(result)
        self._memo[p] = result
        return result


def young_trivial(x, n, a):
    return YoungAction(n, a, {i: identity_map(x) for i in range(1, n) if i != a},
                       complex=x, check=False)


@dataclass(frozen=True)
class InducedComplex:
    """Sigma_n . _{Sigma_a x Sigma_b} M: one copy of M per coset."""

    complex: ChainComplex
    action: SymmetricGroupAction
    subsets: tuple          # size-a destination subsets, lex order
    cosets: tuple           # the shuffle permutation per copy
    injections: tuple       # ChainMap M -> complex per copy
    projections: tuple

    @property
    def equivariant(self):
        return EquivariantComplex(self.complex, self.action)


def induce(m, young, guard=None):
    """Induction along Sigma_a x Sigma_b <= Sigma_n of the complex m."""
    n, a = young.n, young.a
    subsets = perms.size_subsets_lex(n, a)
    cosets = [perms.shuffle_for_subset(n, s) for s in subsets]
    copies = len(subsets)
    if m.dims:
        check_guard(copies * max(m.dims.values()), "induced complex", guard)
    total, injs, projs = direct_sum_with_maps([m] * copies)
    idx = {s: k for k, s in enumerate(subsets)}
    gens = []
    for i in range(1, n):
        t = perms.transposition(n, i)
        comp_map = None
        for k, s in enumerate(subsets):
            c = cosets[k]
            g = perms.compose(t, c)
            s2 = tuple(sorted(t[v] for v in s))
            k2 = idx[s2]
            h = perms.compose(perms.inverse(cosets[k2]), g)
            block = young.apply(h)
            piece = injs[k2].compose(block).compose(projs[k])
            comp_map = piece if comp_map is None else comp_map + piece
        gens.append(ChainMap(total, total, comp_map.comps, check=False))
    action = SymmetricGroupAction(n, gens)
    return InducedComplex(total, action, tuple(subsets), tuple(cosets),
                          tuple(injs), tuple(projs))


# -- bar resolution and homotopy orbits ----------------------------------


@dataclass(frozen=True)
class BarResolution:
    """Truncated normalized bar resolution of the trivial module over k[Sigma_n].

    Free right k[Sigma_n]-modules on words of non-identity elements; the
    underlying vector-space complex is exposed for exactness checking.
    """

    n: int
    field: object
    length: int
    group: tuple            # all elements, lex one-line order; group[0] = id
    words: dict             # bar degree -> list of words (tuples of non-id elements)
    complex: ChainComplex   # vector-space realization, basis (word, g)


def _bar_words(group, length, k):
    nonid = [g for g in group if g != perms.identity(len(group[0]))]
    if k == 0:
        return [()]
    out = []

    def rec(prefix):
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        for g in nonid:
            prefix.append(g)
            rec(prefix)
            prefix.pop()

    rec([])
    return out


def _bar_faces(word, group_id):
    """(sign, new word, acting element or None) triples of the bar boundary."""
    k = len(word)
    faces = []
    if k == 0:
        return faces
    faces.append((1, word[1:], None))  # drop first, augmentation side
    for i in range(1, k):
        merged = perms.compose(word[i - 1], word[i])
        if merged != group_id:
            w = word[:i - 1] + (merged,) + word[i + 1:]
            faces.append((-1 if i % 2 else 1, w, None))
    # last face: the final letter acts on the module side
    faces.append((-1 if k % 2 else 1, word[:-1], word[-1]))
    return faces


def bar_resolution(n, field, length, guard=None):
    """Normalized bar resolution, exactness verified in degrees 1..length-1."""
    if n > 4:
        raise ActionError("bar resolution limited to Sigma_n with n <= 4")
    if length > 8:
        raise ActionError("bar resolution length limited to 8")
    group = tuple(perms.all_permutations(n))
    gid = perms.identity(n)
    words = {k: _bar_words(group, length, k) for k in range(length + 1)}
    order = len(group)
    for k, ws in words.items():
        check_guard(len(ws) * order, f"bar resolution degree {k}", guard)
    gi = {g: i for i, g in enumerate(group)}
    dims = {k: len(words[k]) * order for k in range(length + 1)}
    diffs = {}
    for k in range(1, length + 1):
        tgt_pos = {w: r for r, w in enumerate(words[k - 1])}
        rows, cols = dims[k - 1], dims[k]
        data = [[field.zero()] * cols for _ in range(rows)]
        one = field.one()
        for wi, w in enumerate(words[k]):
            for (sign, w2, act) in _bar_faces(w, gid):
                c = one if sign > 0 else field.neg(one)
                r0 = tgt_pos[w2] * order
                for g_idx, g in enumerate(group):
                    col = wi * order + g_idx
                    if act is None:
                        row = r0 + g_idx
                    else:
                        row = r0 + gi[perms.compose(act, g)]
                    data[row][col] = field.add(data[row][col], c)
        diffs[k] = Matrix.from_rows(field, data)
    labels = {}
    for k in range(length + 1):
        ls = []
        for w in words[k]:
            wtxt = "|".join("".join(str(v) for v in g) for g in w) or "[]"
            for g in group:
                ls.append(f"[{wtxt}].{''.join(str(v) for v in g)}")
        labels[k] = tuple(ls)
    cx = ChainComplex(field, dims, diffs, cap=length, labels=labels)
    res = BarResolution(n, field, length, group, words, cx)
    _check_bar_exactness(res)
    return res


def _check_bar_exactness(res):
    cx = res.complex
    for i in range(1, res.length):
        if cx.homology_dim(i) != 0:
            raise ActionError(f"bar resolution not exact in degree {i}")
    # degree 0: augmentation identifies H_0 with the trivial module
    if cx.homology_dim(0) != 1:
        raise ActionError("bar resolution H_0 is not the trivial module")


@dataclass(frozen=True)
class HomotopyOrbits:
    complex: ChainComplex
    comparison: ChainMap       # to the coinvariants complex
    coinvariants: Coinvariants
    resolution: BarResolution


def homotopy_orbits(e, length, guard=None):
    """(bar resolution (x)_{k[Sigma_n]} E) with the comparison to E/Sigma_n."""
    x = e.complex
    field = x.field
    res = bar_resolution(e.action.n, field, length, guard=guard)
    gid = perms.identity(e.action.n)
    rho = {}  # group element -> ChainMap on x

    def act(g):
        if g not in rho:
            rho[g] = e.action.apply(g)
        return rho[g]

    top = x.top_degree() if x.cap is None else min(x.top_degree(), x.cap)
    cap = min_cap(length, x.cap)
    bases = {}
    for m in range(0, length + top + 1):
        basis = []
        for k in range(0, min(m, length) + 1):
            d = m - k
            for wi in range(len(res.words[k])):
                for j in range(x.dim(d)):
                    basis.append((k, wi, d, j))
        bases[m] = basis
    dims = {m: len(b) for m, b in bases.items() if b}
    if dims:
        check_guard(max(dims.values()), "homotopy orbits", guard)
    diffs = {}
    for m in range(1, length + top + 1):
        src, tgt = bases.get(m, []), bases.get(m - 1, [])
        if not src or not tgt:
            continue
        pos = {b: r for r, b in enumerate(tgt)}
        z, one = field.zero(), field.one()
        data = [[z] * len(src) for _ in range(len(tgt))]
        word_pos = {k: {w: i for i, w in enumerate(res.words[k])} for k in res.words}
        for cidx, (k, wi, d, j) in enumerate(src):
            w = res.words[k][wi]
            # bar faces
            for (sign, w2, actel) in _bar_faces(w, gid):
                c = one if sign > 0 else field.neg(one)
                wr = word_pos[k - 1][w2]
                if actel is None:
                    r = pos.get((k - 1, wr, d, j))
                    if r is not None:
                        data[r][cidx] = field.add(data[r][cidx], c)
                else:
                    am = act(actel).comp(d)
                    for r2 in range(am.rows):
                        v = am[r2, j]
                        if v == z:
                            continue
                        r = pos.get((k - 1, wr, d, r2))
                        if r is not None:
                            data[r][cidx] = field.add(data[r][cidx], field.mul(c, v))
            # module differential, Koszul sign (-1)^k
            if d >= 1 and x.dim(d - 1):
                dm = x.diff(d)
                s = one if k % 2 == 0 else field.neg(one)
                for r2 in range(dm.rows):
                    v = dm[r2, j]
                    if v == z:
                        continue
                    r = pos.get((k, wi, d - 1, r2))
                    if r is not None:
                        data[r][cidx] = field.add(data[r][cidx], field.mul(s, v))
        diffs[m] = Matrix.from_rows(field, data)
    total = ChainComplex(field, dims, diffs, cap=cap)
    cv = coinvariants(e)
    comps = {}
    for m, basis in bases.items():
        if not basis or cv.complex.dim(m) == 0:
            tgtdim = cv.complex.dim(m)
            comps[m] = Matrix.zeros(field, tgtdim, len(basis))
            continue
        pm = cv.projection.comp(m)
        data = [[field.zero()] * len(basis) for _ in range(cv.complex.dim(m))]
        for cidx, (k, wi, d, j) in enumerate(basis):
            if k == 0:
                for r in range(pm.rows):
                    data[r][cidx] = pm[r, j]
        comps[m] = Matrix.from_rows(field, data)
    comparison = ChainMap(total, cv.complex, comps)
    return HomotopyOrbits(total, comparison, cv, res)


def is_free_sigma2(e):
    """Degreewise freeness over F_2[Sigma_2]: rank(1 + tau) = dim/2."""
    x = e.complex
    if x.field.char != 2 or e.action.n != 2:
        raise ActionError("freeness test is for Sigma_2 in characteristic 2")
    tau = e.action.gen(1)
    out = {}
    for d in x.degrees():
        m = tau.comp(d) + Matrix.identity(x.field, x.dim(d))
        dim = x.dim(d)
        out[d] = (dim % 2 == 0) and (m.rank() == dim // 2)
    return out

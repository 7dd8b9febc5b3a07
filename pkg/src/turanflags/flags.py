"""Flag-algebra core: types, flags, densities, products and averaging.

A type is a fully labeled model; a flag is a model with an injective
labeling of some vertices inducing a given type.  Flags are stored
roots-first: vertices 0..k-1 carry labels 1..k in order, and the
canonical representative minimizes the encoding over permutations of the
free vertices only.

Algebra elements are finite rational-coefficient vectors over the
canonical flag basis of a fixed theory, type and level.  All arithmetic
is exact (fractions.Fraction); no floating point enters any operation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .theories import (
    InvalidModelError,
    MAX_N,
    Model,
    SizeLimitError,
    canonical,
    encode_vector,
    enumerate_models,
    get_theory,
    induced,
    relabel,
)


class FlagTypeError(TypeError):
    """Operands live over different theories, types or labelings."""


@dataclass(frozen=True)
class FlagType:
    """A fully labeled model; vertex i carries label i+1."""

    base: Model

    @property
    def theory(self) -> str:
        return self.base.theory

    @property
    def size(self) -> int:
        return self.base.n

    def __repr__(self):
        return f"FlagType({self.base.theory}, n={self.base.n}, rel={self.base.rel}, colors={self.base.colors})"


def trivial_type(theory: str) -> FlagType:
    th = get_theory(theory)
    return FlagType(Model(theory, 0, (), () if th.colored else None))


def point_type(theory: str, color: int | None = None) -> FlagType:
    th = get_theory(theory)
    if th.colored:
        return FlagType(Model(theory, 1, (), (color if color is not None else 0,)))
    return FlagType(Model(theory, 1, (), None))


@dataclass(frozen=True)
class Flag:
    """A model rooted at its first k vertices (k = type size)."""

    ftype: FlagType
    model: Model

    def __post_init__(self):
        if induced_ordered(self.model, tuple(range(self.ftype.size))) != self.ftype.base:
            raise InvalidModelError("first vertices do not induce the flag type")

    @property
    def level(self) -> int:
        return self.model.n

    def key(self):
        return self.model.key()


def induced_ordered(model: Model, theta) -> Model:
    """Induced substructure with vertices taken in the order of ``theta``."""
    pos = {v: i for i, v in enumerate(theta)}
    th = get_theory(model.theory)
    rel = []
    for t in model.rel:
        if all(v in pos for v in t):
            tt = tuple(pos[v] for v in t)
            if th.kind == "graph":
                tt = (tt[0], tt[1]) if tt[0] < tt[1] else (tt[1], tt[0])
            elif th.kind == "3graph":
                tt = tuple(sorted(tt))
            rel.append(tt)
    colors = tuple(model.colors[v] for v in theta) if model.colors is not None else None
    return Model(model.theory, len(theta), tuple(sorted(rel)), colors)


@lru_cache(maxsize=400000)
def _canonical_rooted(model: Model, k: int):
    """Lex-min encoding over permutations fixing vertices 0..k-1 pointwise.

    Returns (canonical model, number of root-fixing automorphisms)."""
    n = model.n
    if n - k <= 1:
        return model, 1
    base = encode_vector(model)
    best, best_m, aut = base, model, 0
    ident = tuple(range(n))
    for perm in itertools.permutations(range(k, n)):
        sigma = ident[:k] + perm
        m2 = relabel(model, sigma)
        vec = encode_vector(m2)
        if vec == base:
            aut += 1
        if vec < best:
            best, best_m = vec, m2
    return best_m, aut


def make_flag(ftype: FlagType, model: Model, theta) -> Flag:
    """Flag from a model and an injective root tuple (canonical form)."""
    n = model.n
    theta = tuple(theta)
    rest = [v for v in range(n) if v not in theta]
    sigma = [0] * n
    for i, v in enumerate(theta):
        sigma[v] = i
    for i, v in enumerate(rest):
        sigma[v] = len(theta) + i
    rooted = relabel(model, sigma)
    can, _ = _canonical_rooted(rooted, len(theta))
    return Flag(ftype, can)


def canonical_flag(flag: Flag) -> Flag:
    can, _ = _canonical_rooted(flag.model, flag.ftype.size)
    return Flag(flag.ftype, can)


@lru_cache(maxsize=None)
def flag_basis(ftype: FlagType, level: int) -> tuple:
    """Canonical flags of the given type and level, encoding-ascending."""
    k = ftype.size
    if level < k:
        raise SizeLimitError(f"level {level} below type size {k}")
    if level > MAX_N:
        raise SizeLimitError(f"level {level} beyond supported bound {MAX_N}")
    theory = ftype.theory
    base_key = ftype.base.key()
    seen = {}
    for m in enumerate_models(theory, level):
        for theta in itertools.permutations(range(level), k):
            if induced_ordered(m, theta).key() != base_key:
                continue
            fl = make_flag(ftype, m, theta)
            seen.setdefault(fl.key(), fl)
    return tuple(seen[k2] for k2 in sorted(seen))


@lru_cache(maxsize=None)
def flag_index(ftype: FlagType, level: int) -> dict:
    return {f.key(): i for i, f in enumerate(flag_basis(ftype, level))}


def enumerate_flags(theory: str, ftype: FlagType, level: int) -> tuple:
    if ftype.theory != theory:
        raise FlagTypeError("type belongs to a different theory")
    return flag_basis(ftype, level)


# ---------------------------------------------------------------------------
# algebra elements
# ---------------------------------------------------------------------------

def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class AlgebraElement:
    """Rational combination of canonical flags at a fixed type and level."""

    ftype: FlagType
    level: int
    coeffs: tuple  # sorted tuple of (basis index, Fraction), zero-free

    @property
    def theory(self) -> str:
        return self.ftype.theory

    @staticmethod
    def from_dict(ftype: FlagType, level: int, d: dict) -> "AlgebraElement":
        items = tuple(sorted((i, _frac(c)) for i, c in d.items() if c != 0))
        nb = len(flag_basis(ftype, level))
        if any(not (0 <= i < nb) for i, _ in items):
            raise IndexError("coefficient index outside basis")
        return AlgebraElement(ftype, level, items)

    @staticmethod
    def from_flags(ftype: FlagType, level: int, d: dict) -> "AlgebraElement":
        idx = flag_index(ftype, level)
        return AlgebraElement.from_dict(
            ftype, level, {idx[canonical_flag(f).key()]: c for f, c in d.items()})

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def coeff(self, i: int) -> Fraction:
        for j, c in self.coeffs:
            if j == i:
                return c
        return Fraction(0)

    def vector(self) -> list:
        v = [Fraction(0)] * len(flag_basis(self.ftype, self.level))
        for i, c in self.coeffs:
            v[i] = c
        return v

    # -- linear structure --------------------------------------------------

    def _check_compatible(self, other):
        if self.ftype != other.ftype:
            raise FlagTypeError("elements live over different types")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = constant(self.ftype, other)
        self._check_compatible(other)
        a, b = common_level(self, other)
        d = a.as_dict()
        for i, c in b.coeffs:
            d[i] = d.get(i, Fraction(0)) + c
        return AlgebraElement.from_dict(a.ftype, a.level, d)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return AlgebraElement(self.ftype, self.level,
                              tuple((i, -c) for i, c in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = constant(self.ftype, other)
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return self.__neg__().__add__(constant(self.ftype, other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _frac(other)
            return AlgebraElement(self.ftype, self.level,
                                  tuple((i, c * v) for i, v in self.coeffs if c * v != 0))
        return multiply(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, e: int):
        out = None
        for _ in range(e):
            out = self if out is None else multiply(out, self)
        return out if out is not None else unit(self.ftype, self.ftype.size)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if self.ftype != other.ftype:
            return False
        a, b = common_level(self, other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.ftype, self.level, self.coeffs))


def unit(ftype: FlagType, level: int) -> AlgebraElement:
    return AlgebraElement.from_dict(
        ftype, level, {i: Fraction(1) for i in range(len(flag_basis(ftype, level)))})


def constant(ftype: FlagType, c) -> AlgebraElement:
    return _frac(c) * unit(ftype, ftype.size)


def flag_element(flag: Flag) -> AlgebraElement:
    fl = canonical_flag(flag)
    return AlgebraElement.from_dict(
        fl.ftype, fl.level, {flag_index(fl.ftype, fl.level)[fl.key()]: Fraction(1)})


def model_element(model: Model) -> AlgebraElement:
    """Untyped basis element for a canonical model."""
    m = canonical(model)
    ft = trivial_type(model.theory)
    return AlgebraElement.from_dict(
        ft, m.n, {flag_index(ft, m.n)[m.key()]: Fraction(1)})


def common_level(a: AlgebraElement, b: AlgebraElement):
    if a.level < b.level:
        a = lift(a, b.level)
    elif b.level < a.level:
        b = lift(b, a.level)
    return a, b


# ---------------------------------------------------------------------------
# densities, lifting, products, averaging
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _restriction_counts(ftype: FlagType, level: int, sub: int) -> tuple:
    """For each level-``level`` basis flag H: dict mapping a sub-level basis
    index to the number of free subsets of that size inducing it."""
    k = ftype.size
    idx = flag_index(ftype, sub)
    out = []
    for H in flag_basis(ftype, level):
        counts = {}
        for S in itertools.combinations(range(k, level), sub - k):
            sub_m = induced_ordered(H.model, tuple(range(k)) + S)
            can, _ = _canonical_rooted(sub_m, k)
            i = idx[can.key()]
            counts[i] = counts.get(i, 0) + 1
        out.append(counts)
    return tuple(out)


def flag_density(f: Flag, g: Flag) -> Fraction:
    """Probability that a random extension of g's labeled part by
    |f|-|type| of g's free vertices induces a flag isomorphic to f."""
    if f.ftype != g.ftype:
        raise FlagTypeError("flags of different types")
    k = f.ftype.size
    nf, ng = f.level, g.level
    if nf > ng:
        raise FlagTypeError("first flag larger than second")
    fkey = canonical_flag(f).key()
    count = 0
    for S in itertools.combinations(range(k, ng), nf - k):
        sub_m = induced_ordered(g.model, tuple(range(k)) + S)
        can, _ = _canonical_rooted(sub_m, k)
        if can.key() == fkey:
            count += 1
    return Fraction(count, comb(ng - k, nf - k))


def lift(a: AlgebraElement, level: int) -> AlgebraElement:
    """Re-express at a higher level via the chain rule of densities."""
    if level < a.level:
        raise SizeLimitError("cannot lift downward")
    if level == a.level:
        return a
    if level > MAX_N:
        raise SizeLimitError(f"level {level} beyond supported bound {MAX_N}")
    out = {}
    k = a.ftype.size
    tables = _restriction_counts(a.ftype, level, a.level)
    denom = comb(level - k, a.level - k)
    src = a.as_dict()
    for H_i, counts in enumerate(tables):
        tot = Fraction(0)
        for i, cnt in counts.items():
            c = src.get(i)
            if c is not None:
                tot += c * cnt
        if tot:
            out[H_i] = tot / denom
    return AlgebraElement.from_dict(a.ftype, level, out)


@lru_cache(maxsize=None)
def _split_table(ftype: FlagType, level: int, la: int) -> tuple:
    """For each level-``level`` basis flag H: list of (ia, ib) over subsets
    S1 of the free part with |S1| = la-k; ia indexes the level-la basis on
    roots+S1, ib the level-(level-la+2k... complement) basis."""
    k = ftype.size
    lb = level - la + k
    idx_a = flag_index(ftype, la)
    idx_b = flag_index(ftype, lb)
    out = []
    roots = tuple(range(k))
    for H in flag_basis(ftype, level):
        pairs = []
        free = range(k, level)
        for S1 in itertools.combinations(free, la - k):
            S2 = tuple(v for v in free if v not in S1)
            m1, _ = _canonical_rooted(induced_ordered(H.model, roots + S1), k)
            m2, _ = _canonical_rooted(induced_ordered(H.model, roots + S2), k)
            pairs.append((idx_a[m1.key()], idx_b[m2.key()]))
        out.append(tuple(pairs))
    return tuple(out)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Flag-algebra product; result level = a.level + b.level - |type|."""
    if a.ftype != b.ftype:
        raise FlagTypeError("elements live over different types")
    k = a.ftype.size
    level = a.level + b.level - k
    if level > MAX_N:
        raise SizeLimitError(f"product level {level} beyond supported bound {MAX_N}")
    table = _split_table(a.ftype, level, a.level)
    denom = comb(level - k, a.level - k)
    da, db = a.as_dict(), b.as_dict()
    out = {}
    for H_i, pairs in enumerate(table):
        tot = Fraction(0)
        for ia, ib in pairs:
            ca = da.get(ia)
            if ca is None:
                continue
            cb = db.get(ib)
            if cb is not None:
                tot += ca * cb
        if tot:
            out[H_i] = tot / denom
    return AlgebraElement.from_dict(a.ftype, level, out)


def restrict_type(ftype: FlagType, keep: tuple) -> FlagType:
    """Sub-type on the kept label positions (1-based, increasing)."""
    return FlagType(induced_ordered(ftype.base, tuple(p - 1 for p in keep)))


@lru_cache(maxsize=None)
def _average_table(ftype: FlagType, level: int, keep: tuple) -> tuple:
    """For each basis flag F: (target index, q) with q the labeling
    probability used by the averaging operator."""
    k = ftype.size
    sub_type = restrict_type(ftype, keep)
    idx = flag_index(sub_type, level)
    kept0 = tuple(p - 1 for p in keep)
    out = []
    for F in flag_basis(ftype, level):
        m = F.model
        n = m.n
        target = make_flag(sub_type, m, kept0)
        ti = idx[target.key()]
        fkey = F.key()
        hits = 0
        total = 0
        others = [v for v in range(n) if v not in kept0]
        free_label_positions = [i for i in range(k) if i not in kept0]
        for assign in itertools.permutations(others, len(free_label_positions)):
            theta = [0] * k
            for i in kept0:
                theta[i] = i
            for i, v in zip(free_label_positions, assign):
                theta[i] = v
            total += 1
            if induced_ordered(m, tuple(theta)).key() != ftype.base.key():
                continue
            cand = make_flag(ftype, m, tuple(theta))
            if cand.key() == fkey:
                hits += 1
        out.append((ti, Fraction(hits, total) if total else Fraction(1)))
    return tuple(out)


def average(a: AlgebraElement, keep: tuple = ()) -> AlgebraElement:
    """Averaging (unlabeling) operator.

    ``keep`` lists the 1-based label positions that stay labeled; the
    default fully unlabels.  Coefficients are transported with the factor
    q = P(a uniformly random injective relabeling of the dropped labels
    induces a flag isomorphic to the source flag).
    """
    keep = tuple(keep)
    if any(not (1 <= p <= a.ftype.size) for p in keep) or len(set(keep)) != len(keep) \
            or list(keep) != sorted(keep):
        raise FlagTypeError(f"bad kept-label set {keep}")
    table = _average_table(a.ftype, a.level, keep)
    sub_type = restrict_type(a.ftype, keep)
    out = {}
    for i, c in a.coeffs:
        ti, q = table[i]
        if q:
            out[ti] = out.get(ti, Fraction(0)) + q * c
    return AlgebraElement.from_dict(sub_type, a.level, out)


# ---------------------------------------------------------------------------
# evaluation on concrete models
# ---------------------------------------------------------------------------

class EvaluationError(ValueError):
    pass


@lru_cache(maxsize=None)
def _pattern_cache(theory: str, size: int):
    return {}


def _untyped_density_vector(theory: str, level: int, G: Model) -> dict:
    """index -> density of each canonical level-``level`` model in G."""
    if G.n < level:
        raise EvaluationError(f"model on {G.n} vertices below level {level}")
    idx = {m.key(): i for i, m in enumerate(enumerate_models(theory, level))}
    cache = _pattern_cache(theory, level)
    th = get_theory(theory)
    counts = {}
    for S in itertools.combinations(range(G.n), level):
        if th.kind == "orgraph":
            pat = tuple(1 if (S[i], S[j]) in G._relset else (2 if (S[j], S[i]) in G._relset else 0)
                        for i in range(level) for j in range(i + 1, level))
        elif th.kind == "graph":
            pat = tuple(1 if (S[i], S[j]) in G._relset else 0
                        for i in range(level) for j in range(i + 1, level))
        else:
            pat = tuple(1 if tuple(sorted((S[a], S[b], S[c]))) in G._relset else 0
                        for a in range(level) for b in range(a + 1, level)
                        for c in range(b + 1, level))
        if G.colors is not None:
            pat = (tuple(G.colors[v] for v in S),) + pat
        i = cache.get(pat)
        if i is None:
            i = idx[canonical(induced(G, S)).key()]
            cache[pat] = i
        counts[i] = counts.get(i, 0) + 1
    total = comb(G.n, level)
    return {i: Fraction(c, total) for i, c in counts.items()}


def evaluate(a: AlgebraElement, G) -> Fraction:
    """Exact density sum of ``a`` in a concrete model (or flag, if typed)."""
    if a.ftype.size == 0:
        if isinstance(G, Flag):
            G = G.model
        if G.theory != a.theory:
            raise EvaluationError(f"model of theory {G.theory} for {a.theory} element")
        dens = _untyped_density_vector(a.theory, a.level, G)
        return sum((c * dens.get(i, Fraction(0)) for i, c in a.coeffs), Fraction(0))
    if not isinstance(G, Flag):
        raise EvaluationError("typed element requires a rooted flag to evaluate on")
    if G.ftype != a.ftype:
        raise FlagTypeError("flag type mismatch")
    basis = flag_basis(a.ftype, a.level)
    return sum((c * flag_density(basis[i], G) for i, c in a.coeffs), Fraction(0))


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def type_to_json(ftype: FlagType) -> dict:
    return {"model": ftype.base.to_text(), "size": ftype.size}


def type_from_json(d: dict) -> FlagType:
    return FlagType(Model.from_text(d["model"]))


def element_to_json(a: AlgebraElement) -> dict:
    return {
        "theory": a.theory,
        "type": type_to_json(a.ftype),
        "level": a.level,
        "coeffs": [[i, c.numerator, c.denominator] for i, c in a.coeffs],
    }


def element_from_json(d: dict) -> AlgebraElement:
    ftype = type_from_json(d["type"])
    if ftype.theory != d["theory"]:
        raise FlagTypeError("type/theory mismatch in element JSON")
    return AlgebraElement.from_dict(
        ftype, d["level"],
        {int(i): Fraction(int(p), int(q)) for i, p, q in d["coeffs"]})

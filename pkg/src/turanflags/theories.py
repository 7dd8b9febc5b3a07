"""Relational theories, finite models, canonical forms and enumeration.

Six theories are supported: simple graphs, C4-free orgraphs (directed
graphs with no loops, parallel edges or 2-cycles, excluding induced
oriented 4-cycles), Turan 3-graphs (3-uniform hypergraphs with no
independent set on 4 vertices), and their Z3-colored extensions.

Models are immutable and kept in a canonical form: the lexicographic
minimum of the (colors, relations) encoding over all vertex permutations.
Colors are never permuted by isomorphism, only vertices are.  The
canonical order of ``enumerate_models`` (ascending by encoding) is the
basis order used by every other module and by the file formats.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_N = 8

Z3 = (0, 1, 2)


class SizeLimitError(ValueError):
    """Requested size exceeds the supported desk-scale bounds."""


class InvalidModelError(ValueError):
    """Structure violates the structural axioms of its theory."""


@dataclass(frozen=True)
class Theory:
    name: str
    kind: str            # 'graph' | 'orgraph' | '3graph'
    colored: bool
    forbidden: tuple     # names of forbidden induced patterns, resolved lazily

    @property
    def arity(self) -> int:
        return 3 if self.kind == "3graph" else 2


_THEORIES = {
    "graph": Theory("graph", "graph", False, ()),
    "fdf": Theory("fdf", "orgraph", False, ("c4",)),
    "turan": Theory("turan", "3graph", False, ("i34",)),
    "graphstar": Theory("graphstar", "graph", True, ()),
    "fdfstar": Theory("fdfstar", "orgraph", True, ("c4",)),
    "turanstar": Theory("turanstar", "3graph", True, ("i34",)),
}

#: plain (color-erased) counterpart of each theory
UNSTARRED = {"graphstar": "graph", "fdfstar": "fdf", "turanstar": "turan"}
STARRED = {v: k for k, v in UNSTARRED.items()}


def get_theory(name: str) -> Theory:
    try:
        return _THEORIES[name.lower()]
    except KeyError:
        raise KeyError(f"unknown theory {name!r}; expected one of {sorted(_THEORIES)}")


def _norm_pair(i, j):
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Model:
    """A finite relational structure of one of the six theories.

    ``rel`` is a sorted tuple of tuples: (i, j) with i < j for graphs,
    ordered (tail, head) arcs for orgraphs, sorted triples for 3-graphs.
    ``colors`` is a length-n tuple over Z3 for starred theories, else None.
    """

    theory: str
    n: int
    rel: tuple
    colors: tuple | None = None

    def __post_init__(self):
        th = get_theory(self.theory)
        if self.n < 0:
            raise InvalidModelError("negative vertex count")
        seen = set()
        for t in self.rel:
            if len(t) != th.arity or len(set(t)) != len(t):
                raise InvalidModelError(f"bad tuple {t} for theory {self.theory}")
            if any(not (0 <= v < self.n) for v in t):
                raise InvalidModelError(f"vertex out of range in {t}")
            if th.kind == "graph" and t != _norm_pair(*t):
                raise InvalidModelError(f"graph edge {t} not normalized")
            if th.kind == "3graph" and tuple(sorted(t)) != t:
                raise InvalidModelError(f"3-graph edge {t} not normalized")
            if th.kind == "orgraph" and (t[1], t[0]) in seen:
                raise InvalidModelError(f"2-cycle at {t}")
            if t in seen:
                raise InvalidModelError(f"duplicate tuple {t}")
            seen.add(t)
        if tuple(sorted(self.rel)) != self.rel:
            raise InvalidModelError("relation tuple not sorted")
        if th.colored:
            if self.colors is None or len(self.colors) != self.n:
                raise InvalidModelError("starred theory requires one color per vertex")
            if any(c not in Z3 for c in self.colors):
                raise InvalidModelError("colors must lie in Z3")
        elif self.colors is not None:
            raise InvalidModelError(f"theory {self.theory} carries no colors")

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def graph(n, edges, colors=None, theory=None):
        th = theory or ("graphstar" if colors is not None else "graph")
        rel = tuple(sorted(_norm_pair(i, j) for i, j in edges))
        return Model(th, n, rel, tuple(colors) if colors is not None else None)

    @staticmethod
    def orgraph(n, arcs, colors=None, theory=None):
        th = theory or ("fdfstar" if colors is not None else "fdf")
        rel = tuple(sorted(tuple(a) for a in arcs))
        return Model(th, n, rel, tuple(colors) if colors is not None else None)

    @staticmethod
    def hypergraph(n, triples, colors=None, theory=None):
        th = theory or ("turanstar" if colors is not None else "turan")
        rel = tuple(sorted(tuple(sorted(t)) for t in triples))
        return Model(th, n, rel, tuple(colors) if colors is not None else None)

    # -- basic structure queries ---------------------------------------------

    def adjacent(self, i, j) -> bool:
        """Pair adjacency ignoring orientation (2-ary theories only)."""
        kind = get_theory(self.theory).kind
        if kind == "graph":
            return _norm_pair(i, j) in self._relset
        if kind == "orgraph":
            return (i, j) in self._relset or (j, i) in self._relset
        raise TypeError("adjacency is a binary-theory notion")

    @property
    def _relset(self):
        return frozenset(self.rel)

    def key(self):
        """Total-order key; canonical models sort by it."""
        return (self.n, self.colors or (), self.rel)

    # -- text format -----------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.theory} {self.n}"]
        for t in self.rel:
            lines.append("e " + " ".join(str(v) for v in t))
        if self.colors is not None:
            for v, c in enumerate(self.colors):
                lines.append(f"color {v} {c}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "Model":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise InvalidModelError("empty model text")
        head = lines[0].split()
        if len(head) != 2:
            raise InvalidModelError(f"bad header {lines[0]!r}")
        theory, n = head[0], int(head[1])
        th = get_theory(theory)
        rel = []
        colors = [0] * n if th.colored else None
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] == "e":
                t = tuple(int(v) for v in parts[1:])
                if th.kind == "graph":
                    t = _norm_pair(*t)
                elif th.kind == "3graph":
                    t = tuple(sorted(t))
                rel.append(t)
            elif parts[0] == "color":
                if colors is None:
                    raise InvalidModelError("color line in uncolored theory")
                colors[int(parts[1])] = int(parts[2])
            else:
                raise InvalidModelError(f"bad line {ln!r}")
        return Model(theory, n, tuple(sorted(rel)),
                     tuple(colors) if colors is not None else None)


# ---------------------------------------------------------------------------
# slot encodings: a model is a fixed-length vector of small integers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _slots(kind: str, colored: bool, n: int):
    """Slot layout: list of ('c', v) / ('p', i, j) / ('t', i, j, k) tags."""
    out = []
    if colored:
        out.extend(("c", v) for v in range(n))
    if kind == "graph":
        out.extend(("p", i, j) for i in range(n) for j in range(i + 1, n))
    elif kind == "orgraph":
        out.extend(("p", i, j) for i in range(n) for j in range(n) if i != j)
    else:
        out.extend(("t", *t) for t in itertools.combinations(range(n), 3))
    return tuple(out)


@lru_cache(maxsize=None)
def _slot_index(kind, colored, n):
    return {s: i for i, s in enumerate(_slots(kind, colored, n))}


def encode_vector(model: Model) -> tuple:
    th = get_theory(model.theory)
    slots = _slots(th.kind, th.colored, model.n)
    idx = _slot_index(th.kind, th.colored, model.n)
    vec = [0] * len(slots)
    if th.colored:
        for v, c in enumerate(model.colors):
            vec[v] = c
    if th.kind == "orgraph":
        for (i, j) in model.rel:
            vec[idx[("p", i, j)]] = 1
    else:
        for t in model.rel:
            vec[idx[("p", *t) if th.arity == 2 else ("t", *t)]] = 1
    return tuple(vec)


def decode_vector(theory: str, n: int, vec) -> Model:
    th = get_theory(theory)
    slots = _slots(th.kind, th.colored, n)
    colors = [0] * n if th.colored else None
    rel = []
    for s, v in zip(slots, vec):
        if s[0] == "c":
            colors[s[1]] = int(v)
        elif v:
            rel.append(s[1:])
    return Model(theory, n, tuple(sorted(rel)),
                 tuple(colors) if colors is not None else None)


@lru_cache(maxsize=None)
def _perm_tables(kind: str, colored: bool, n: int):
    """For every permutation sigma of [n], the gather table G with
    encode(sigma . M)[i] = encode(M)[G[i]]."""
    slots = _slots(kind, colored, n)
    idx = _slot_index(kind, colored, n)
    perms = list(itertools.permutations(range(n)))
    tables = np.empty((len(perms), len(slots)), dtype=np.int32)
    for p, sigma in enumerate(perms):
        inv = [0] * n
        for v, w in enumerate(sigma):
            inv[w] = v
        for i, s in enumerate(slots):
            if s[0] == "c":
                tables[p, i] = idx[("c", inv[s[1]])]
            elif s[0] == "p":
                a, b = inv[s[1]], inv[s[2]]
                if kind == "graph" and a > b:
                    a, b = b, a
                tables[p, i] = idx[("p", a, b)]
            else:
                tables[p, i] = idx[("t", *sorted(inv[v] for v in s[1:]))]
    return perms, tables


@lru_cache(maxsize=None)
def _radix_weights(kind, colored, n):
    """Mixed-radix weights packing a slot vector into one or more ints.

    Word capacity is capped at 2**52 so that encodings are exact in
    float64 arithmetic (all partial sums are integers below 2**53).
    """
    slots = _slots(kind, colored, n)
    radix = [3 if s[0] == "c" else 2 for s in slots]
    words = []
    word = []
    acc = 1
    for r in radix:
        if acc * r >= 2 ** 52:
            words.append(word)
            word, acc = [], 1
        word.append(r)
        acc *= r
    words.append(word)
    weights, offset = [], 0
    for word in words:
        w = [0] * len(word)
        acc = 1
        for i in range(len(word) - 1, -1, -1):
            w[i] = acc
            acc *= word[i]
        weights.append((offset, np.array(w, dtype=np.int64)))
        offset += len(word)
    return weights


def _encode_words(vecs: np.ndarray, weights):
    """(B, L) slot array -> list of (B,) int64 words (lexicographic order)."""
    return [vecs[..., off:off + len(w)] @ w for off, w in weights]


@lru_cache(maxsize=None)
def _perm_weight_matrix(kind, colored, n):
    """Weight matrices folding permutation gathers into one matmul.

    encode(sigma_p . M) word k equals (vec(M) float64) @ W_k[:, p]: the
    gather ``permuted[i] = vec[table[p, i]]`` is a bijection on slots, so
    the mixed-radix weights can be scattered through it once.
    """
    _, tables = _perm_tables(kind, colored, n)
    weights = _radix_weights(kind, colored, n)
    L = tables.shape[1]
    out = []
    for off, w in weights:
        W = np.zeros((L, tables.shape[0]), dtype=np.float64)
        for p in range(tables.shape[0]):
            W[tables[p, off:off + len(w)], p] = w
        out.append(W)
    return out


def thread_count() -> int:
    """Worker count for internal parallelism (TURANFLAGS_THREADS override)."""
    raw = os.environ.get("TURANFLAGS_THREADS", "")
    if raw:
        k = int(raw)
        if k < 1:
            raise ValueError("TURANFLAGS_THREADS must be positive")
        return k
    return min(4, os.cpu_count() or 1)


def _batch_min_codes(kind, colored, n, X: np.ndarray):
    """Canonical (lexicographic-minimum) code words for a batch of models.

    X is (B, L) of small ints.  Returns a (B, W) int64 array of code
    words; rows compare lexicographically.
    """
    mats = _perm_weight_matrix(kind, colored, n)
    Xf = X.astype(np.float64)

    def one_chunk(chunk):
        w0 = (chunk @ mats[0]).astype(np.int64)      # (b, n!)
        m0 = w0.min(axis=1)
        out = [m0]
        mask = w0 == m0[:, None]
        for Wk in mats[1:]:
            wk = (chunk @ Wk).astype(np.int64)
            wk = np.where(mask, wk, np.int64(2 ** 62))
            mk = wk.min(axis=1)
            out.append(mk)
            mask &= wk == mk[:, None]
        return np.stack(out, axis=1)

    B = X.shape[0]
    nperms = mats[0].shape[1]
    chunk_size = max(256, min(B, 8 * 1024 * 1024 // max(1, nperms)))
    chunks = [Xf[i:i + chunk_size] for i in range(0, B, chunk_size)]
    if len(chunks) > 1 and thread_count() > 1:
        with ThreadPoolExecutor(max_workers=thread_count()) as pool:
            parts = list(pool.map(one_chunk, chunks))
    else:
        parts = [one_chunk(c) for c in chunks]
    return np.concatenate(parts, axis=0)


def _decode_code_words(theory, n, words) -> Model:
    th = get_theory(theory)
    weights = _radix_weights(th.kind, th.colored, n)
    slots = _slots(th.kind, th.colored, n)
    vec = [0] * len(slots)
    for (off, w), word in zip(weights, words):
        rest = int(word)
        for i, wi in enumerate(w):
            q, rest = divmod(rest, int(wi))
            vec[off + i] = q
    return decode_vector(theory, n, vec)


# ---------------------------------------------------------------------------
# canonicalization and isomorphism tests
# ---------------------------------------------------------------------------

def relabel(model: Model, sigma) -> Model:
    """Apply the vertex permutation v -> sigma[v]."""
    th = get_theory(model.theory)
    if th.kind == "graph":
        rel = tuple(sorted(_norm_pair(sigma[i], sigma[j]) for i, j in model.rel))
    elif th.kind == "orgraph":
        rel = tuple(sorted((sigma[i], sigma[j]) for i, j in model.rel))
    else:
        rel = tuple(sorted(tuple(sorted(sigma[v] for v in t)) for t in model.rel))
    colors = None
    if model.colors is not None:
        cc = [0] * model.n
        for v, c in enumerate(model.colors):
            cc[sigma[v]] = c
        colors = tuple(cc)
    return Model(model.theory, model.n, rel, colors)


@lru_cache(maxsize=200000)
def _canonical_cached(model: Model):
    th = get_theory(model.theory)
    base = encode_vector(model)
    if model.n <= 1:
        return model, 1
    best = base
    aut = 0
    slots = _slots(th.kind, th.colored, model.n)
    perms, tables = _perm_tables(th.kind, th.colored, model.n)
    for p in range(len(perms)):
        tab = tables[p]
        vec = tuple(base[tab[i]] for i in range(len(slots)))
        if vec == base:
            aut += 1
        if vec < best:
            best = vec
    return decode_vector(model.theory, model.n, best), aut


def canonicalize(model: Model):
    """Canonical representative and automorphism-group order.

    canonicalize(sigma . M) == canonicalize(M) for every permutation sigma;
    color-preserving automorphisms only (palette values are fixed).
    """
    return _canonical_cached(model)


def canonical(model: Model) -> Model:
    return _canonical_cached(model)[0]


def aut_count(model: Model) -> int:
    return _canonical_cached(model)[1]


def isomorphic(a: Model, b: Model) -> bool:
    if a.theory != b.theory or a.n != b.n:
        return False
    return canonical(a) == canonical(b)


def induced(model: Model, subset) -> Model:
    """Induced substructure on the given vertices (sorted order, colors kept)."""
    sub = sorted(subset)
    if any(not (0 <= v < model.n) for v in sub) or len(set(sub)) != len(sub):
        raise IndexError(f"bad vertex subset {subset}")
    pos = {v: i for i, v in enumerate(sub)}
    th = get_theory(model.theory)
    inside = set(sub)
    rel = []
    for t in model.rel:
        if all(v in inside for v in t):
            tt = tuple(pos[v] for v in t)
            if th.kind == "graph":
                tt = _norm_pair(*tt)
            elif th.kind == "3graph":
                tt = tuple(sorted(tt))
            rel.append(tt)
    colors = tuple(model.colors[v] for v in sub) if model.colors is not None else None
    return Model(model.theory, len(sub), tuple(sorted(rel)), colors)


def contains_induced(model: Model, pattern: Model) -> bool:
    """True iff some vertex subset induces a copy of ``pattern``.

    The pattern may live in the color-erased counterpart theory, in which
    case colors of ``model`` are ignored.
    """
    m = model
    if pattern.theory != model.theory:
        if UNSTARRED.get(model.theory) == pattern.theory:
            m = erase_colors(model)
        else:
            raise TypeError(f"pattern theory {pattern.theory!r} does not match {model.theory!r}")
    k = pattern.n
    if k > m.n:
        return False
    pkey = canonical(pattern).key()
    for sub in itertools.combinations(range(m.n), k):
        if canonical(induced(m, sub)).key() == pkey:
            return True
    return False


def erase_colors(model: Model) -> Model:
    plain = UNSTARRED.get(model.theory)
    if plain is None:
        return model
    return Model(plain, model.n, model.rel, None)


# ---------------------------------------------------------------------------
# named small models
# ---------------------------------------------------------------------------

def c4_orgraph() -> Model:
    return Model.orgraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


def i34() -> Model:
    return Model.hypergraph(4, [])


_FORBIDDEN_FACTORY = {"c4": c4_orgraph, "i34": i34}


def forbidden_models(theory: Theory):
    return tuple(_FORBIDDEN_FACTORY[f]() for f in theory.forbidden)


# fast forbidden-pattern tests -------------------------------------------------

def _has_induced_c4(model: Model) -> bool:
    """Induced oriented 4-cycle: a 4-subset where every vertex has
    in-degree and out-degree exactly 1 inside the subset."""
    arcs = model._relset
    n = model.n
    for sub in itertools.combinations(range(n), 4):
        ok = True
        cnt = 0
        for v in sub:
            outd = sum(1 for w in sub if (v, w) in arcs)
            ind = sum(1 for w in sub if (w, v) in arcs)
            if outd != 1 or ind != 1:
                ok = False
                break
            cnt += outd
        if ok and cnt == 4:
            return True
    return False


def _has_induced_i34(model: Model) -> bool:
    triples = model._relset
    for sub in itertools.combinations(range(model.n), 4):
        if not any(tuple(sorted(t)) in triples
                   for t in itertools.combinations(sub, 3)):
            return True
    return False


def satisfies_theory(model: Model) -> bool:
    """Structural axioms hold by construction; checks forbidden patterns."""
    th = get_theory(model.theory)
    for f in th.forbidden:
        if f == "c4" and _has_induced_c4(model):
            return False
        if f == "i34" and _has_induced_i34(model):
            return False
    return True


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _extension_states(theory: Theory, n: int):
    """All ways to attach relations (and a color) to a new vertex n-1."""
    old = range(n - 1)
    if theory.kind == "graph":
        structure = [(s, [_norm_pair(v, n - 1) for v in s])
                     for s in _subsets(list(old))]
    elif theory.kind == "orgraph":
        structure = []
        for states in itertools.product((0, 1, 2), repeat=n - 1):
            rel = []
            for v, s in enumerate(states):
                if s == 1:
                    rel.append((n - 1, v))
                elif s == 2:
                    rel.append((v, n - 1))
            structure.append((states, rel))
    else:
        pairs = list(itertools.combinations(old, 2))
        structure = []
        for s in _subsets(pairs):
            structure.append((tuple(s), [tuple(sorted((a, b, n - 1))) for a, b in s]))
    colors = Z3 if theory.colored else (None,)
    for _, rel in structure:
        for c in colors:
            yield rel, c


def _subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


@lru_cache(maxsize=None)
def enumerate_models(theory_name: str, n: int) -> tuple:
    """All models of the theory on n vertices, one canonical representative
    per isomorphism class, in the canonical (encoding-ascending) order."""
    th = get_theory(theory_name)
    if not (0 <= n <= MAX_N):
        raise SizeLimitError(f"n={n} outside supported range 0..{MAX_N}")
    if n == 0:
        return (Model(theory_name, 0, (), () if th.colored else None),)
    parents = enumerate_models(theory_name, n - 1)

    # assemble candidate slot vectors
    slots = _slots(th.kind, th.colored, n)
    idx = _slot_index(th.kind, th.colored, n)
    ext = list(_extension_states(th, n))
    cand = np.zeros((len(parents) * len(ext), len(slots)), dtype=np.int8)
    row = 0
    for parent in parents:
        base = np.zeros(len(slots), dtype=np.int8)
        if th.colored:
            for v, c in enumerate(parent.colors):
                base[v] = c
        for t in parent.rel:
            tag = ("p", *t) if th.arity == 2 else ("t", *t)
            base[idx[tag]] = 1
        for rel, color in ext:
            vec = base.copy()
            if color is not None:
                vec[n - 1] = color
            for t in rel:
                tag = ("p", *t) if th.arity == 2 else ("t", *t)
                vec[idx[tag]] = 1
            cand[row] = vec
            row += 1

    codes = _batch_min_codes(th.kind, th.colored, n, cand)
    uniq = np.unique(codes, axis=0)
    models = []
    for words in uniq:
        m = _decode_code_words(theory_name, n, words)
        keep = True
        for f in th.forbidden:
            if f == "c4" and _has_induced_c4(m):
                keep = False
            elif f == "i34" and _has_induced_i34(m):
                keep = False
        if keep:
            models.append(m)
    models.sort(key=lambda m: m.key())
    return tuple(models)


@lru_cache(maxsize=None)
def model_index(theory_name: str, n: int) -> dict:
    """Canonical-model key -> basis position."""
    return {m.key(): i for i, m in enumerate(enumerate_models(theory_name, n))}


def labeled_count(theory_name: str, n: int) -> int:
    """Number of labeled models (orbit-counting oracle: sum of n!/|Aut|)."""
    total = 0
    fact = 1
    for i in range(2, n + 1):
        fact *= i
    for m in enumerate_models(theory_name, n):
        total += fact // aut_count(m)
    return total

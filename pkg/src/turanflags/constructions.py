"""Concrete orgraph constructions and their exact density reports.

The sign-rule orgraph on Z3 x S (three parts, arcs by the sign of the
coordinate sum), random orientations of complete bipartite graphs, and a
discretized near-balanced three-part construction.  Densities are exact
rationals computed from an integer triad census, so the reports stay
exact even on hundreds of vertices.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .theories import Model, canonical

#: the seeded generator is part of the reproducibility contract
RNG_ALGORITHM = "python-random-mersenne-twister"


class InvalidSpecError(ValueError):
    pass


@dataclass(frozen=True)
class KostochkaSpec:
    """Finite coordinate set for the sign-rule orgraph on Z3 x S."""

    s: tuple  # Fractions

    def __post_init__(self):
        vals = tuple(Fraction(x) for x in self.s)
        object.__setattr__(self, "s", vals)
        if not vals:
            raise InvalidSpecError("empty coordinate set")
        for x in vals:
            for y in vals:
                if x + y == 0:
                    raise InvalidSpecError(f"coordinates {x} and {y} sum to zero")
        if len(set(vals)) != len(vals):
            raise InvalidSpecError("duplicate coordinates")


def _ek_arcs(points):
    """Arcs of the sign-rule orgraph on labeled points (part, coordinate)."""
    arcs = []
    for u, (a, x) in enumerate(points):
        for v, (b, y) in enumerate(points):
            if u == v:
                continue
            s = x + y
            if (s < 0 and b == (a + 1) % 3) or (s > 0 and b == (a - 1) % 3):
                arcs.append((u, v))
    return arcs


def gamma_k(spec: KostochkaSpec) -> Model:
    """Sign-rule orgraph on Z3 x S; C4-free for every admissible S."""
    pts = [(a, x) for a in range(3) for x in sorted(spec.s)]
    return Model.orgraph(len(pts), _ek_arcs(pts))


def fdf_hypergraph(gamma: Model) -> Model:
    """3-graph whose edges are the triples containing a fully isolated
    vertex or a vertex of out-degree 2 (within the triple)."""
    arcs = gamma._relset
    triples = []
    for t in itertools.combinations(range(gamma.n), 3):
        for v in t:
            outd = sum(1 for w in t if (v, w) in arcs)
            ind = sum(1 for w in t if (w, v) in arcs)
            if outd == 2 or (outd == 0 and ind == 0):
                triples.append(t)
                break
    return Model.hypergraph(gamma.n, triples, theory="turan")


# ---------------------------------------------------------------------------
# exact triad census
# ---------------------------------------------------------------------------

def orgraph_census(gamma: Model) -> dict:
    """Counts of the seven 3-vertex orgraph patterns among all triples."""
    n = gamma.n
    if n < 3:
        raise ValueError("census needs at least 3 vertices")
    A = np.zeros((n, n), dtype=np.int64)
    for i, j in gamma.rel:
        A[i, j] = 1
    U = A + A.T
    m = int(A.sum())
    outd = A.sum(axis=1)
    ind = A.sum(axis=0)
    cyclic = int(np.trace(A @ A @ A)) // 3
    triangles = int(np.trace(U @ U @ U)) // 6
    transitive = triangles - cyclic
    out_star = int((outd * (outd - 1) // 2).sum()) - transitive
    in_star = int((ind * (ind - 1) // 2).sum()) - transitive
    path = int((ind * outd).sum()) - transitive - 3 * cyclic
    single_edge = m * (n - 2) - 2 * (out_star + in_star + path) - 3 * (cyclic + transitive)
    empty = comb(n, 3) - single_edge - out_star - in_star - path - cyclic - transitive
    return {
        "empty": empty, "single_edge": single_edge, "path": path,
        "out_star": out_star, "in_star": in_star,
        "cyclic": cyclic, "transitive": transitive,
        "arcs": m, "n": n,
    }


def density_fdf(gamma: Model) -> Fraction:
    """Edge density of the Fon-der-Flaass 3-graph of the orgraph."""
    if gamma.n < 3:
        raise ValueError("need at least 3 vertices")
    c = orgraph_census(gamma)
    edges = c["empty"] + c["single_edge"] + c["out_star"] + c["transitive"]
    return Fraction(edges, comb(gamma.n, 3))


def _aux_densities(gamma: Model) -> dict:
    """Exact graph-side densities from the census."""
    n = gamma.n
    c = orgraph_census(gamma)
    rho = Fraction(c["arcs"], comb(n, 2))
    k3 = Fraction(c["cyclic"] + c["transitive"], comb(n, 3))
    p3bar = Fraction(c["single_edge"], comb(n, 3))
    delta_rho = Fraction(2, 3) - rho
    delta_k3 = Fraction(2, 9) - k3
    f = Fraction(1, 2) * (delta_k3 - delta_rho - p3bar)

    A = np.zeros((n, n), dtype=np.int64)
    for i, j in gamma.rel:
        A[i, j] = 1
    outd = A.sum(axis=1)
    # root the out-degree deviation at each vertex: pair weights are
    # 1 (non-neighbor or in-neighbor) and -2 (out-neighbor), all over 3
    S = (n - 1) - 3 * outd
    Q = (n - 1) + 3 * outd
    total = int((S * S - Q).sum())
    dalpha_sq = Fraction(total, 9 * n * (n - 1) * (n - 2))
    return {
        "rho": rho, "k3": k3, "p3bar": p3bar,
        "delta_rho": delta_rho, "delta_k3": delta_k3,
        "f": f, "dalpha_sq_avg": dalpha_sq,
    }


@dataclass
class DensityReport:
    construction: str
    n: int
    params: dict
    edge_density: Fraction
    fdf_density: Fraction
    aux: dict                      # name -> Fraction
    c4_free: bool | None = None    # None when too large to check exactly
    c4_free_method: str = ""

    def to_json(self) -> dict:
        def frac(x):
            return {"exact": f"{x.numerator}/{x.denominator}", "approx": float(x)}
        out = {
            "construction": self.construction,
            "n": self.n,
            "params": self.params,
            "edge_density": frac(self.edge_density),
            "fdf_density": frac(self.fdf_density),
            "aux": {k: frac(v) for k, v in sorted(self.aux.items())},
        }
        if self.c4_free is not None:
            out["c4_free"] = self.c4_free
            out["c4_free_method"] = self.c4_free_method
        return out


_EXACT_C4_LIMIT = 48


def _c4_free_status(gamma: Model, guaranteed: bool):
    from .theories import _has_induced_c4
    if gamma.n <= _EXACT_C4_LIMIT:
        return (not _has_induced_c4(gamma)), "exact"
    if guaranteed:
        return True, "sign-rule"
    return None, ""


def density_report(construction: str, gamma: Model, params: dict,
                   guaranteed_c4_free: bool = False) -> DensityReport:
    aux = _aux_densities(gamma)
    free, method = _c4_free_status(gamma, guaranteed_c4_free)
    return DensityReport(
        construction=construction,
        n=gamma.n,
        params=params,
        edge_density=aux["rho"],
        fdf_density=density_fdf(gamma),
        aux=aux,
        c4_free=free,
        c4_free_method=method,
    )


# ---------------------------------------------------------------------------
# randomized and discretized constructions
# ---------------------------------------------------------------------------

def random_bipartite_orientation(m: int, seed: int) -> Model:
    """Complete balanced bipartite graph with each edge oriented by an
    independent fair coin from the seeded deterministic generator."""
    if m < 1:
        raise InvalidSpecError("need at least one vertex per side")
    rng = random.Random(seed)
    arcs = []
    for i in range(m):
        for j in range(m, 2 * m):
            if rng.getrandbits(1):
                arcs.append((i, j))
            else:
                arcs.append((j, i))
    return Model.orgraph(2 * m, arcs)


def random_orgraph(n: int, seed: int, c4_free: bool = False) -> Model:
    """Uniform pair-state orgraph; optionally rejection-sampled C4-free."""
    from .theories import _has_induced_c4
    rng = random.Random(seed)
    while True:
        arcs = []
        for i, j in itertools.combinations(range(n), 2):
            s = rng.randrange(3)
            if s == 1:
                arcs.append((i, j))
            elif s == 2:
                arcs.append((j, i))
        g = Model.orgraph(n, arcs)
        if not c4_free or not _has_induced_c4(g):
            return g


def example2_points(delta0: Fraction, m: int):
    """Grid points of the near-balanced three-interval construction.

    Interval a gets round(6 m |I_a|) midpoint-grid points (uniform spacing
    1/(6m) when the counts are integral), every point shifted by the
    rational dither delta0/(10 m) so that no two coordinates sum to zero.
    """
    delta0 = Fraction(delta0)
    if not (0 < delta0 < Fraction(1, 3)):
        raise InvalidSpecError("delta0 must lie strictly between 0 and 1/3")
    if m < 2:
        raise InvalidSpecError("need m >= 2 grid points")
    sixth = Fraction(1, 6)
    intervals = [
        (-sixth + delta0 / 2, sixth - delta0 / 2),
        (-sixth - delta0 / 2, sixth),
        (-sixth, sixth + delta0 / 2),
    ]
    dither = delta0 / (10 * m)
    points = []
    by_part = [set(), set(), set()]
    for a, (lo, hi) in enumerate(intervals):
        length = hi - lo
        cnt = round(6 * m * length)
        h = length / cnt
        for i in range(cnt):
            x = lo + (2 * i + 1) * h / 2 + dither
            points.append((a, x))
            by_part[a].add(x)
    for a in range(3):
        b = (a + 1) % 3
        if by_part[a] & {-y for y in by_part[b]}:
            raise InvalidSpecError("dither failed to clear a zero cross-part sum")
    return points


def example2_orgraph(delta0, m: int) -> Model:
    """Discretized near-balanced construction; sign-rule arcs."""
    pts = example2_points(Fraction(delta0), m)
    return Model.orgraph(len(pts), _ek_arcs(pts))


def verify_c4_lemma(gamma: Model) -> bool:
    """For every nonadjacent pair (t1, t2): any v with t1->v->t2 and any w
    with t2->w->t1 must form an adjacent pair (v, w).  A violation yields
    an induced oriented 4-cycle on {t1, v, t2, w}."""
    arcs = gamma._relset
    n = gamma.n
    for t1 in range(n):
        for t2 in range(n):
            if t1 == t2 or gamma.adjacent(t1, t2):
                continue
            vs = [v for v in range(n)
                  if v not in (t1, t2) and (t1, v) in arcs and (v, t2) in arcs]
            if not vs:
                continue
            ws = [w for w in range(n)
                  if w not in (t1, t2) and (t2, w) in arcs and (w, t1) in arcs]
            for v in vs:
                for w in ws:
                    if v != w and not gamma.adjacent(v, w):
                        return False
    return True

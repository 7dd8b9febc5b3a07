"""Total interpretations between the theories and the induced linear maps.

Each interpretation translates a model (or flag) of its target theory into
one of its source theory on the same vertices by evaluating fixed
defining rules; ``pi`` is the induced algebra homomorphism sending a
source element to the sum of target basis flags whose translation matches.

The vertex-coloring interpretation rooted at an edge assigns color 1 to
vertices adjacent to the second root only (the first root included),
color 2 symmetrically, and color 0 to vertices adjacent to both or
neither root.  The oriented variant uses the same rule on the underlying
adjacency.  Both satisfy the commutative square with the orientation- and
color-erasing maps, which ``verify_commutative_diagram`` checks exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .theories import InvalidModelError, Model, canonical, get_theory, induced
from .flags import (
    AlgebraElement,
    Flag,
    FlagType,
    FlagTypeError,
    canonical_flag,
    flag_basis,
    flag_index,
    induced_ordered,
    trivial_type,
)


@dataclass(frozen=True)
class Interpretation:
    name: str
    source: str                 # source theory (domain of the algebra map)
    target: str                 # target theory (codomain of the algebra map)
    source_type_size: int       # 0 unless the map lands in a typed algebra
    target_type_kind: str       # '', 'E' (graph edge root) or 'A' (arc root)


INTERPRETATIONS = {
    "FDF": Interpretation("FDF", "turan", "fdf", 0, ""),
    "OE": Interpretation("OE", "graph", "fdf", 0, ""),
    "OEStar": Interpretation("OEStar", "graphstar", "fdfstar", 0, ""),
    "CE_Graph": Interpretation("CE_Graph", "graph", "graphstar", 0, ""),
    "CE_FDF": Interpretation("CE_FDF", "fdf", "fdfstar", 0, ""),
    "CE_Turan": Interpretation("CE_Turan", "turan", "turanstar", 0, ""),
    "C": Interpretation("C", "graphstar", "graph", 0, "E"),
    "OC": Interpretation("OC", "fdfstar", "fdf", 0, "A"),
    "OE_A": Interpretation("OE_A", "graph", "fdf", 2, "A"),
}


def edge_type(theory: str = "graph") -> FlagType:
    return FlagType(Model.graph(2, [(0, 1)], theory=theory))


def arc_type(theory: str = "fdf") -> FlagType:
    return FlagType(Model.orgraph(2, [(0, 1)], theory=theory))


def _fdf_triple_is_edge(m: Model, t) -> bool:
    """Fon-der-Flaass rule: the induced orgraph on the triple has a vertex
    of out-degree 2, or a vertex of in- and out-degree 0."""
    arcs = m._relset
    for v in t:
        outd = sum(1 for w in t if (v, w) in arcs)
        ind = sum(1 for w in t if (w, v) in arcs)
        if outd == 2 or (outd == 0 and ind == 0):
            return True
    return False


def _color_rule(adj1: bool, adj2: bool, is_c1: bool, is_c2: bool) -> int:
    if is_c1:
        return 1
    if is_c2:
        return 2
    if adj1 == adj2:
        return 0
    return 1 if adj2 else 2


def _colorize(m: Model, c1: int, c2: int, swap: bool = False) -> tuple:
    """Z3-coloring of all vertices from the adjacency pattern to (c1, c2)."""
    out = []
    for v in range(m.n):
        col = _color_rule(m.adjacent(c1, v), m.adjacent(c2, v), v == c1, v == c2)
        if swap and col in (1, 2):
            col = 3 - col
        out.append(col)
    return tuple(out)


def interpret_model(name: str, obj, swap_c_colors: bool = False):
    """Translate a target-theory model/flag into the source theory.

    ``swap_c_colors`` corrupts the coloring rules of C/OC (a mutation
    hook used to demonstrate that the commutative-diagram check has
    teeth); leave it False for real use.
    """
    I = INTERPRETATIONS[name]
    if name == "FDF":
        m = obj.model if isinstance(obj, Flag) else obj
        if get_theory(m.theory).kind != "orgraph":
            raise InvalidModelError("FDF interpretation expects an orgraph")
        triples = [t for t in _triples(m.n) if _fdf_triple_is_edge(m, t)]
        return Model.hypergraph(m.n, triples, theory="turan")
    if name in ("OE", "OEStar"):
        m = obj.model if isinstance(obj, Flag) else obj
        return _erase_orientation(m, I.source)
    if name in ("CE_Graph", "CE_FDF", "CE_Turan"):
        m = obj.model if isinstance(obj, Flag) else obj
        return Model(I.source, m.n, m.rel, None)
    if name == "OE_A":
        if not isinstance(obj, Flag) or obj.ftype != arc_type():
            raise FlagTypeError("OE_A expects an A-flag of the orgraph theory")
        return Flag(edge_type(), _erase_orientation(obj.model, "graph"))
    if name in ("C", "OC"):
        want = edge_type() if name == "C" else arc_type()
        if not isinstance(obj, Flag) or obj.ftype != want:
            raise FlagTypeError(f"{name} expects a flag of type {want!r}")
        m = obj.model
        colors = _colorize(m, 0, 1, swap=swap_c_colors)
        starred = "graphstar" if name == "C" else "fdfstar"
        return Model(starred, m.n, m.rel, colors)
    raise KeyError(name)


def _triples(n):
    import itertools
    return itertools.combinations(range(n), 3)


def _erase_orientation(m: Model, target_theory: str) -> Model:
    rel = tuple(sorted({(min(i, j), max(i, j)) for i, j in m.rel}))
    return Model(target_theory, m.n, rel, m.colors)


def _free_part_colored(name: str, F: Flag, swap_c_colors: bool) -> Model:
    """C/OC translation restricted to the free vertices of the flag."""
    full = interpret_model(name, F, swap_c_colors=swap_c_colors)
    return induced(full, range(2, full.n))


def pi(name: str, a: AlgebraElement, swap_c_colors: bool = False) -> AlgebraElement:
    """Induced algebra homomorphism on the given element.

    For the global interpretations this keeps the level; the rooted
    coloring maps C and OC send a level-n element to a level-(n+2)
    typed element (the two root vertices join the flag).
    """
    I = INTERPRETATIONS[name]
    if name in ("C", "OC"):
        if a.ftype.size != 0 or a.theory != I.source:
            raise FlagTypeError(f"{name} expects an untyped {I.source} element")
        ftype = edge_type() if name == "C" else arc_type()
        basis = flag_basis(ftype, a.level + 2)
        src_index = flag_index(trivial_type(I.source), a.level)
        coeffs = {}
        da = a.as_dict()
        for bi, F in enumerate(basis):
            m = canonical(_free_part_colored(name, F, swap_c_colors))
            c = da.get(src_index[m.key()])
            if c:
                coeffs[bi] = c
        return AlgebraElement.from_dict(ftype, a.level + 2, coeffs)

    if name == "OE_A":
        if a.ftype != edge_type():
            raise FlagTypeError("OE_A expects an E-typed graph element")
        ftype = arc_type()
        basis = flag_basis(ftype, a.level)
        src_index = flag_index(edge_type(), a.level)
        da = a.as_dict()
        coeffs = {}
        for bi, F in enumerate(basis):
            img = canonical_flag(interpret_model("OE_A", F))
            c = da.get(src_index[img.key()])
            if c:
                coeffs[bi] = c
        return AlgebraElement.from_dict(ftype, a.level, coeffs)

    if a.ftype.size != 0 or a.theory != I.source:
        raise FlagTypeError(f"{name} expects an untyped {I.source} element")
    ftype = trivial_type(I.target)
    from .theories import enumerate_models, model_index
    src_index = model_index(I.source, a.level)
    da = a.as_dict()
    coeffs = {}
    for bi, m in enumerate(enumerate_models(I.target, a.level)):
        img = canonical(interpret_model(name, m))
        c = da.get(src_index.get(img.key(), -1))
        if c:
            coeffs[bi] = c
    return AlgebraElement.from_dict(ftype, a.level, coeffs)


def verify_commutative_diagram(level: int, swap_c_colors: bool = False) -> dict:
    """Check the square (colored graphs -> rooted-edge graphs) against
    (colored orgraphs -> rooted-arc orgraphs) at the given flag size.

    Both composites map untyped colored-graph elements of level
    ``level - 2`` into arc-rooted orgraph elements of level ``level``;
    the check runs over the full source model basis and also confirms the
    translations agree pointwise on every arc-rooted orgraph flag.
    """
    if not (2 <= level <= 4):
        raise ValueError("diagram check supported for flag sizes 2..4")
    from .theories import enumerate_models

    failures = []
    src = enumerate_models("graphstar", level - 2)
    for i, b in enumerate(src):
        elem = AlgebraElement.from_dict(trivial_type("graphstar"), level - 2, {i: Fraction(1)})
        # the mutation corrupts the edge-rooted coloring only, so a swap
        # makes the two composites disagree
        p1 = pi("OE_A", pi("C", elem, swap_c_colors=swap_c_colors))
        p2 = pi("OC", pi("OEStar", elem))
        if p1 != p2:
            failures.append({
                "basis_model": b.to_text(),
                "lhs": [[j, str(c)] for j, c in p1.coeffs],
                "rhs": [[j, str(c)] for j, c in p2.coeffs],
            })
    pointwise = []
    for F in flag_basis(arc_type(), level):
        via_graph = _free_part_colored(
            "C", Flag(edge_type(), _erase_orientation(F.model, "graph")), swap_c_colors)
        via_orgraph = _erase_orientation(_free_part_colored("OC", F, False), "graphstar")
        if canonical(via_graph) != canonical(via_orgraph):
            pointwise.append(F.model.to_text())
    ok = not failures and not pointwise
    return {
        "name": f"commutative-diagram-level-{level}",
        "level": level,
        "pass": ok,
        "basis_size": len(src),
        "failures": failures,
        "pointwise_failures": pointwise,
    }

"""Registry of the named algebra elements used across the workbench.

Every element is exact-rational and cached; names are the CLI-addressable
strings accepted by the ``density`` subcommand.  Graph-theory elements
evaluate on orgraphs through the orientation-erasing map, matching the
usual convention of treating a graph quantity as a function of the
underlying graph.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .theories import Model, get_theory
from .flags import (
    AlgebraElement,
    Flag,
    FlagType,
    average,
    evaluate,
    flag_element,
    lift,
    model_element,
    multiply,
    point_type,
    trivial_type,
    unit,
)
from .interpretations import arc_type, edge_type, pi


# -- small named models ------------------------------------------------------

def graph_model(name: str) -> Model:
    return {
        "rho": Model.graph(2, [(0, 1)]),
        "nu": Model.graph(2, []),
        "i3": Model.graph(3, []),
        "p3bar": Model.graph(3, [(0, 1)]),
        "p3": Model.graph(3, [(0, 1), (1, 2)]),
        "k3": Model.graph(3, [(0, 1), (0, 2), (1, 2)]),
    }[name]


def colored_pair(edge: bool, a: int, b: int) -> Model:
    return Model.graph(2, [(0, 1)] if edge else [], colors=(a, b))


def rho3_model() -> Model:
    return Model.hypergraph(3, [(0, 1, 2)])


# -- flags -------------------------------------------------------------------

@lru_cache(maxsize=None)
def e_flag() -> AlgebraElement:
    """Edge with one labeled endpoint."""
    return flag_element(Flag(point_type("graph"), Model.graph(2, [(0, 1)])))


@lru_cache(maxsize=None)
def alpha_flag() -> AlgebraElement:
    """Directed edge with the tail labeled."""
    return flag_element(Flag(point_type("fdf"), Model.orgraph(2, [(0, 1)])))


@lru_cache(maxsize=None)
def k3_edge_flag() -> AlgebraElement:
    """Edge-rooted triangle."""
    return flag_element(Flag(edge_type(), graph_model("k3")))


def n_flag(adj1: bool, adj2: bool) -> AlgebraElement:
    """Nonedge-rooted 3-vertex graph flag with the given root adjacencies."""
    edges = [(0, 2)] * adj1 + [(1, 2)] * adj2
    ntype = FlagType(Model.graph(2, []))
    return flag_element(Flag(ntype, Model.graph(3, edges)))


# -- named elements ----------------------------------------------------------

@lru_cache(maxsize=None)
def named_element(name: str) -> AlgebraElement:
    builders = {
        # plain graph theory
        "rho": lambda: model_element(graph_model("rho")),
        "nu": lambda: model_element(graph_model("nu")),
        "i3": lambda: model_element(graph_model("i3")),
        "p3bar": lambda: model_element(graph_model("p3bar")),
        "p3": lambda: model_element(graph_model("p3")),
        "k3": lambda: model_element(graph_model("k3")),
        "delta_rho": lambda: Fraction(2, 3) * unit(trivial_type("graph"), 2) - named_element("rho"),
        "delta_k3": lambda: Fraction(2, 9) * unit(trivial_type("graph"), 3) - named_element("k3"),
        "f": lambda: Fraction(1, 2) * (named_element("delta_k3")
                                       - named_element("delta_rho")
                                       - named_element("p3bar")),
        "e_sq_avg": lambda: average(multiply(e_flag(), e_flag())),
        "f2": _build_f2,
        # orgraph theory
        "rho3_fdf": lambda: pi("FDF", named_element("rho3")),
        "delta": lambda: Fraction(4, 9) * unit(trivial_type("fdf"), 3) - named_element("rho3_fdf"),
        "dalpha_sq_avg": _build_dalpha_sq,
        # 3-graph theory
        "rho3": lambda: model_element(rho3_model()),
        # colored graph theory
        "p0": lambda: _point_colored(0),
        "p1": lambda: _point_colored(1),
        "p2": lambda: _point_colored(2),
        "delta0": lambda: Fraction(1, 3) * unit(trivial_type("graphstar"), 1) - named_element("p0"),
        "kappa": _build_kappa,
        "kappa_tilde": lambda: (model_element(colored_pair(True, 1, 1))
                                + model_element(colored_pair(True, 2, 2))
                                + model_element(colored_pair(False, 1, 2))),
        "kappa_prime": lambda: sum_elements(
            model_element(colored_pair(False, a, b)) for a, b in ((0, 1), (0, 2), (1, 2))),
        "q": _build_q,
        "f1": lambda: Fraction(4, 9) * (unit(trivial_type("graphstar"), 4)
                                        - 9 * multiply(named_element("q"), named_element("q"))),
    }
    try:
        build = builders[name]
    except KeyError:
        raise KeyError(f"unknown element {name!r}; known: {sorted(builders)}")
    return build()


def element_names() -> tuple:
    return ("rho", "nu", "i3", "p3bar", "p3", "k3", "delta_rho", "delta_k3",
            "f", "e_sq_avg", "f2", "rho3", "rho3_fdf", "delta", "dalpha_sq_avg",
            "p0", "p1", "p2", "delta0", "kappa", "kappa_tilde", "kappa_prime",
            "q", "f1")


def sum_elements(items):
    total = None
    for x in items:
        total = x if total is None else total + x
    return total


def _point_colored(a: int) -> AlgebraElement:
    return model_element(Model.graph(1, [], colors=(a,)))


def _build_kappa() -> AlgebraElement:
    """Monochromatic edges plus bichromatic nonedges: the defect of the
    coloring against a complete tripartite structure."""
    rho_a = [model_element(colored_pair(True, a, a)) for a in range(3)]
    nu_ab = [model_element(colored_pair(False, a, b)) for a, b in ((0, 1), (0, 2), (1, 2))]
    return sum_elements(rho_a + nu_ab)


def _build_q() -> AlgebraElement:
    ps = [named_element(f"p{a}") for a in range(3)]
    return (multiply(ps[0], ps[1]) + multiply(ps[0], ps[2])
            + multiply(ps[1], ps[2]))


def _build_dalpha_sq() -> AlgebraElement:
    d_alpha = Fraction(1, 3) * unit(point_type("fdf"), 2) - alpha_flag()
    return average(multiply(d_alpha, d_alpha))


def _build_f2() -> AlgebraElement:
    rho = named_element("rho")
    variance = 4 * (named_element("e_sq_avg") - multiply(rho, rho))
    q = n_flag(True, True) - 2 * n_flag(False, False)
    return variance + average(multiply(q, q))


def f2_variance_part() -> AlgebraElement:
    """4([[e^2]]_1 - rho^2): nonnegative by Cauchy-Schwarz, not
    coefficient-wise."""
    rho = named_element("rho")
    return 4 * (named_element("e_sq_avg") - multiply(rho, rho))


def f2_square_part() -> AlgebraElement:
    q = n_flag(True, True) - 2 * n_flag(False, False)
    return average(multiply(q, q))


def evaluate_named(name: str, G: Model) -> Fraction:
    """Evaluate a named element on a model, erasing orientation for
    graph-theory elements applied to orgraphs."""
    a = named_element(name)
    kind = get_theory(G.theory).kind
    if a.theory == "graph" and kind == "orgraph":
        a = pi("OE", a)
    if a.theory != G.theory:
        raise ValueError(f"element {name} of theory {a.theory} cannot "
                         f"evaluate on a {G.theory} model")
    return evaluate(a, G)

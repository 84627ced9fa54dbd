"""Pointwise (exact, untruncated) transverse operators on basic forms.

Codifferentials are built from the conjugate-linear star
``cstar(phi) = star(conj(phi))``; with it ``delta_B = -cstar d_T cstar`` and the
analogous formulas for the Dolbeault pieces are genuine L2 adjoints.
"""

from __future__ import annotations

from enum import Enum
from typing import Callable

from .exterior import (
    BasicForm,
    CoframeWord,
    bidegree_project,
    c_weil,
    conjugate_star,
    contract,
    degree_project,
    interior,
    j_on_forms,
    remove_generator,
    wedge,
)
from .models import FoliationModel, mean_curvature_parts

# -- exterior derivative ------------------------------------------------------


def _d_word(model: FoliationModel, w: CoframeWord) -> BasicForm:
    key = ("dword", w)
    cache = model.cache
    if key not in cache:
        out = model.zero()
        for g in w.gens:
            sign, rest = remove_generator(w, g)
            piece = wedge(model.dgen[g], BasicForm.monomial(rest, model.dims))
            out = out + (piece if sign > 0 else -piece)
        cache[key] = out
    return cache[key]


def _du_wedge(model: FoliationModel, j: int, w: CoframeWord) -> BasicForm:
    key = ("duw", j, w)
    cache = model.cache
    if key not in cache:
        cache[key] = wedge(model.coord_forms[j], BasicForm.monomial(w, model.dims))
    return cache[key]


def d_basic(model: FoliationModel, a: BasicForm) -> BasicForm:
    """Basic exterior derivative ``d_B``."""
    out = model.zero()
    for w, f in a.terms.items():
        for j in range(model.dims):
            df = f.differentiate(j)
            if df.terms:
                out = out + _du_wedge(model, j, w) * df
        dw = _d_word(model, w)
        if dw.terms:
            out = out + dw * f
    return out


def _split(model: FoliationModel, a: BasicForm, dr: int, ds: int, op) -> BasicForm:
    out = model.zero()
    for r, s in sorted(a.bidegrees()):
        out = out + bidegree_project(op(bidegree_project(a, r, s)), r + dr, s + ds)
    return out


def del_basic(model, a):
    return _split(model, a, 1, 0, lambda x: d_basic(model, x))


def delbar_basic(model, a):
    return _split(model, a, 0, 1, lambda x: d_basic(model, x))


def eps(v: BasicForm, a: BasicForm) -> BasicForm:
    return wedge(v, a)


def d_twisted(model, a):
    return d_basic(model, a) - wedge(model.kappa, a)


def del_twisted(model, a):
    return del_basic(model, a) - wedge(mean_curvature_parts(model).kappa10, a)


def delbar_twisted(model, a):
    return delbar_basic(model, a) - wedge(mean_curvature_parts(model).kappa01, a)


def differential(model: FoliationModel, a: BasicForm, kind: str = "d_B") -> BasicForm:
    """``kind`` in ``d_B, d_T, del_B, delbar_B, del_T, delbar_T``."""
    return apply(model, kind, a)


# -- adjoints -----------------------------------------------------------------


def _star_sandwich(op):
    def adj(model, a):
        return -conjugate_star(op(model, conjugate_star(a)))

    return adj


delta_basic = _star_sandwich(d_twisted)
delta_twisted = _star_sandwich(d_basic)
del_basic_adj = _star_sandwich(del_twisted)
delbar_basic_adj = _star_sandwich(delbar_twisted)
del_twisted_adj = _star_sandwich(del_basic)
delbar_twisted_adj = _star_sandwich(delbar_basic)


def codifferential(model: FoliationModel, a: BasicForm, kind: str = "delta_B") -> BasicForm:
    """``kind`` in ``delta_B, delta_T, del_B*, delbar_B*, del_T*, delbar_T*``."""
    return apply(model, kind, a)


def kappa_sharp(model, a):
    return contract(model.kappa, a)


def h10_contract(model, a):
    return contract(mean_curvature_parts(model).h10, a)


def h01_contract(model, a):
    return contract(mean_curvature_parts(model).h01, a)


# -- Lefschetz and Weil -------------------------------------------------------


def lefschetz_l(model: FoliationModel, a: BasicForm) -> BasicForm:
    return wedge(model.kahler_form(), a)


def lambda_dual(model: FoliationModel, a: BasicForm) -> BasicForm:
    """Contraction by the fundamental 2-form."""
    return interior(model.kahler_form(), a)


def weil(model, a):
    return c_weil(a)


def weil_inverse(model, a):
    return c_weil(a, inverse=True)


def d_c_op(model: FoliationModel, a: BasicForm, adjoint: bool = False) -> BasicForm:
    """``d_c = i(delbar_B - del_B)``; with ``adjoint`` returns ``C^-1 delta_B C``."""
    if adjoint:
        return c_weil(delta_basic(model, c_weil(a)), inverse=True)
    return (delbar_basic(model, a) - del_basic(model, a)) * 1j


def counting(model, a):
    """``sum_r (n - r) P_r`` on degree-r parts."""
    out = model.zero()
    for deg in sorted(a.degrees()):
        out = out + degree_project(a, deg) * (model.n - deg)
    return out


# -- composite (second order) -------------------------------------------------


def _anti(f, g):
    def op(model, a):
        return f(model, g(model, a)) + g(model, f(model, a))

    return op


laplace_basic = _anti(d_basic, delta_basic)
laplace_twisted = _anti(d_basic, delta_twisted)
box_basic = _anti(del_basic, del_basic_adj)
boxbar_basic = _anti(delbar_basic, delbar_basic_adj)
box_quasi = _anti(del_basic, del_twisted_adj)
boxbar_quasi = _anti(delbar_basic, delbar_twisted_adj)
laplace_dc = _anti(lambda m, a: d_c_op(m, a), lambda m, a: d_c_op(m, a, adjoint=True))
automorphy_anticommutator = _anti(delbar_basic, h10_contract)


def lie_kappa(model, a):
    """Lie derivative along the metric dual of ``kappa_B`` (Cartan formula)."""
    return d_basic(model, kappa_sharp(model, a)) + kappa_sharp(model, d_basic(model, a))


def lie_j_commutator(model, a):
    """``[L_{kappa^#}, J]``; vanishes exactly when the flow of ``kappa^#`` preserves J."""
    return lie_kappa(model, j_on_forms(a)) - j_on_forms(lie_kappa(model, a))


def ddbar(model, a):
    return del_basic(model, delbar_basic(model, a))


def ddbar_adj(model, a):
    return delbar_basic_adj(model, del_basic_adj(model, a))


laplace_ddbar = _anti(ddbar, ddbar_adj)


# -- registry -----------------------------------------------------------------


class OperatorKind(Enum):
    """Named operators with their bidegree shift (``None`` means only degree is tracked)."""

    d_B = ("d_B", 1, None)
    d_T = ("d_T", 1, None)
    del_B = ("del_B", 1, (1, 0))
    delbar_B = ("delbar_B", 1, (0, 1))
    del_T = ("del_T", 1, (1, 0))
    delbar_T = ("delbar_T", 1, (0, 1))
    delta_B = ("delta_B", -1, None)
    delta_T = ("delta_T", -1, None)
    del_B_adj = ("del_B*", -1, (-1, 0))
    delbar_B_adj = ("delbar_B*", -1, (0, -1))
    del_T_adj = ("del_T*", -1, (-1, 0))
    delbar_T_adj = ("delbar_T*", -1, (0, -1))
    kappa_wedge = ("kappa_wedge", 1, None)
    kappa_sharp = ("kappa_sharp", -1, None)
    H10_contract = ("H10_contract", -1, (-1, 0))
    H01_contract = ("H01_contract", -1, (0, -1))
    L = ("L", 2, (1, 1))
    Lambda = ("Lambda", -2, (-1, -1))
    A = ("A", 0, (0, 0))
    J = ("J", 0, (0, 0))
    C = ("C", 0, (0, 0))
    C_inv = ("C_inv", 0, (0, 0))
    d_c = ("d_c", 1, None)
    d_c_adj = ("d_c*", -1, None)
    ddbar = ("ddbar", 2, (1, 1))
    Delta_B = ("Delta_B", 0, None)
    Delta_T = ("Delta_T", 0, None)
    Box_B = ("Box_B", 0, (0, 0))
    Boxbar_B = ("Boxbar_B", 0, (0, 0))
    Box_Q = ("Box_Q", 0, (0, 0))
    Boxbar_Q = ("Boxbar_Q", 0, (0, 0))
    Delta_ddbar = ("Delta_ddbar", 0, (0, 0))
    Delta_dc = ("Delta_dc", 0, None)
    automorphy = ("automorphy", 0, None)

    def __init__(self, label, degree_shift, bidegree_shift):
        self.label = label
        self.degree_shift = degree_shift
        self.bidegree_shift = bidegree_shift

    @classmethod
    def parse(cls, text: str) -> "OperatorKind":
        for k in cls:
            if text in (k.label, k.name):
                return k
        raise ValueError(f"unknown operator {text!r}; choose one of {', '.join(k.label for k in cls)}")


_TABLE: dict[OperatorKind, Callable[[FoliationModel, BasicForm], BasicForm]] = {
    OperatorKind.d_B: d_basic,
    OperatorKind.d_T: d_twisted,
    OperatorKind.del_B: del_basic,
    OperatorKind.delbar_B: delbar_basic,
    OperatorKind.del_T: del_twisted,
    OperatorKind.delbar_T: delbar_twisted,
    OperatorKind.delta_B: delta_basic,
    OperatorKind.delta_T: delta_twisted,
    OperatorKind.del_B_adj: del_basic_adj,
    OperatorKind.delbar_B_adj: delbar_basic_adj,
    OperatorKind.del_T_adj: del_twisted_adj,
    OperatorKind.delbar_T_adj: delbar_twisted_adj,
    OperatorKind.kappa_wedge: lambda m, a: wedge(m.kappa, a),
    OperatorKind.kappa_sharp: kappa_sharp,
    OperatorKind.H10_contract: h10_contract,
    OperatorKind.H01_contract: h01_contract,
    OperatorKind.L: lefschetz_l,
    OperatorKind.Lambda: lambda_dual,
    OperatorKind.A: counting,
    OperatorKind.J: lambda m, a: j_on_forms(a),
    OperatorKind.C: weil,
    OperatorKind.C_inv: weil_inverse,
    OperatorKind.d_c: lambda m, a: d_c_op(m, a),
    OperatorKind.d_c_adj: lambda m, a: d_c_op(m, a, adjoint=True),
    OperatorKind.ddbar: ddbar,
    OperatorKind.Delta_B: laplace_basic,
    OperatorKind.Delta_T: laplace_twisted,
    OperatorKind.Box_B: box_basic,
    OperatorKind.Boxbar_B: boxbar_basic,
    OperatorKind.Box_Q: box_quasi,
    OperatorKind.Boxbar_Q: boxbar_quasi,
    OperatorKind.Delta_ddbar: laplace_ddbar,
    OperatorKind.Delta_dc: laplace_dc,
    OperatorKind.automorphy: automorphy_anticommutator,
}


def apply(model: FoliationModel, kind: OperatorKind | str, a: BasicForm) -> BasicForm:
    if isinstance(kind, str):
        kind = OperatorKind.parse(kind)
    return _TABLE[kind](model, a)

"""Truncation of pointwise operators to sparse matrices.

A truncation level ``K`` keeps Fourier modes with ``max_j |m_j| <= K``.  Basis
elements are ``(word, mode)`` pairs ordered mode-major, so operators that do
not mix modes are block diagonal with one block per mode.

Operators whose coefficients have positive bandwidth can push a basis element
outside the truncation window.  Such columns are recorded in ``flagged`` and
the escaping part is dropped from the matrix; nothing is discarded silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .exterior import BasicForm, CoframeWord, all_words, words_of_bidegree, words_of_degree
from .fourier import FourierScalar
from .models import FoliationModel, iter_modes
from .operators import OperatorKind, apply

Component = Union[int, tuple[int, int], str]
BasisElement = tuple[CoframeWord, tuple[int, ...]]

LEAK_TOL = 1e-13


class TruncationError(ValueError):
    """The truncation level cannot represent the model's coefficients."""


def component_words(n: int, component: Component) -> tuple[CoframeWord, ...]:
    if component == "all":
        return all_words(n)
    if isinstance(component, tuple):
        return words_of_bidegree(n, *component)
    if isinstance(component, (int, np.integer)):
        return words_of_degree(n, int(component))
    raise ValueError(f"bad component {component!r}: use an int degree, (r, s) or 'all'")


def parse_component(text: str) -> Component:
    text = text.strip()
    if text == "all":
        return "all"
    try:
        if "," in text:
            r, s = (int(x) for x in text.strip("()").split(","))
            return (r, s)
        return int(text)
    except ValueError as exc:
        raise ValueError(f"bad component {text!r}: use j, r,s or all") from exc


@dataclass(frozen=True)
class Basis:
    words: tuple[CoframeWord, ...]
    modes: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.words) * len(self.modes)

    def __getitem__(self, i: int) -> BasisElement:
        nw = len(self.words)
        return self.words[i % nw], self.modes[i // nw]

    def __iter__(self):
        for m in self.modes:
            for w in self.words:
                yield w, m

    def index(self) -> dict[BasisElement, int]:
        return {e: i for i, e in enumerate(self)}

    def block_slices(self):
        nw = len(self.words)
        return [slice(k * nw, (k + 1) * nw) for k in range(len(self.modes))]

    def word_positions(self, words: Sequence[CoframeWord]) -> np.ndarray:
        """Indices of all basis elements whose word lies in ``words``."""
        wanted = set(words)
        return np.array([i for i, (w, _) in enumerate(self) if w in wanted], dtype=int)

    def to_vector(self, a: BasicForm) -> np.ndarray:
        idx = self.index()
        v = np.zeros(len(self), dtype=complex)
        for w, m, c in a.entries():
            j = idx.get((w, m))
            if j is None:
                raise TruncationError(f"form has component {w.label()} at mode {m} outside the basis")
            v[j] = c
        return v

    def to_form(self, v: np.ndarray, n: int, dims: int, tol: float = 0.0) -> BasicForm:
        terms: dict[CoframeWord, dict] = {}
        for i, c in enumerate(v):
            if abs(c) > tol:
                w, m = self[i]
                terms.setdefault(w, {})[m] = c
        return BasicForm(n, dims, {w: FourierScalar(dims, t) for w, t in terms.items()})


def make_basis(model: FoliationModel, K: int, component: Component) -> Basis:
    return Basis(component_words(model.n, component), tuple(iter_modes(model.dims, K)))


@dataclass
class AssembledOperator:
    """Sparse matrix of a truncated operator together with its bases."""

    label: str
    model_name: str
    K: int
    component: Component
    codomain_component: Component
    domain: Basis
    codomain: Basis
    matrix: sp.csr_matrix
    flagged: frozenset = field(default_factory=frozenset)
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, other: "AssembledOperator") -> "AssembledOperator":
        if other.codomain != self.domain:
            raise ValueError(f"cannot compose {self.label} after {other.label}: bases differ")
        # a column of the product is unreliable if the right factor leaked or
        # if it reaches a column the left factor could not represent
        flagged = set(other.flagged)
        if self.flagged:
            bad = np.zeros(self.matrix.shape[1])
            bad[list(self.flagged)] = 1.0
            reach = abs(other.matrix).T @ bad
            flagged |= set(np.nonzero(reach)[0].tolist())
        return AssembledOperator(
            label=f"{self.label}*{other.label}",
            model_name=self.model_name,
            K=self.K,
            component=other.component,
            codomain_component=self.codomain_component,
            domain=other.domain,
            codomain=self.codomain,
            matrix=(self.matrix @ other.matrix).tocsr(),
            flagged=frozenset(flagged),
        )

    def __add__(self, other: "AssembledOperator") -> "AssembledOperator":
        self._same(other)
        return self._with(self.matrix + other.matrix, f"{self.label}+{other.label}", self.flagged | other.flagged)

    def __sub__(self, other: "AssembledOperator") -> "AssembledOperator":
        self._same(other)
        return self._with(self.matrix - other.matrix, f"{self.label}-{other.label}", self.flagged | other.flagged)

    def scaled(self, c: complex) -> "AssembledOperator":
        return self._with(self.matrix * c, f"{c}*{self.label}", self.flagged)

    def _same(self, other):
        if self.domain != other.domain or self.codomain != other.codomain:
            raise ValueError("operators act between different bases")

    def _with(self, matrix, label, flagged):
        return AssembledOperator(
            label, self.model_name, self.K, self.component, self.codomain_component,
            self.domain, self.codomain, sp.csr_matrix(matrix), frozenset(flagged), dict(self.meta),
        )

    def conj_transpose(self) -> "AssembledOperator":
        return AssembledOperator(
            f"({self.label})^H", self.model_name, self.K, self.codomain_component, self.component,
            self.codomain, self.domain, self.matrix.conj().T.tocsr(),
        )

    def interior_columns(self) -> np.ndarray:
        keep = np.ones(self.matrix.shape[1], dtype=bool)
        if self.flagged:
            keep[list(self.flagged)] = False
        return np.nonzero(keep)[0]

    def max_column_norm(self, interior_only: bool = True) -> float:
        """Largest column 2-norm; zero exactly when the operator vanishes."""
        m = self.matrix
        if interior_only and self.flagged:
            m = m[:, self.interior_columns()]
        if m.shape[1] == 0 or m.nnz == 0:
            return 0.0
        sq = np.asarray(abs(m).power(2).sum(axis=0)).ravel()
        return float(np.sqrt(sq.max()))

    def is_mode_diagonal(self) -> bool:
        coo = self.matrix.tocoo()
        nd, nc = len(self.domain.words), len(self.codomain.words)
        if nd == 0 or nc == 0:
            return True
        return bool(np.all(coo.row // nc == coo.col // nd))

    def apply_to(self, a: BasicForm) -> BasicForm:
        v = self.domain.to_vector(a)
        return self.codomain.to_form(self.matrix @ v, a.n, a.dims)


def codomain_component(kind: OperatorKind, component: Component, n: int) -> Component:
    if component == "all":
        return "all"
    if isinstance(component, tuple):
        if kind.bidegree_shift is not None:
            dr, ds = kind.bidegree_shift
            return (component[0] + dr, component[1] + ds)
        return component[0] + component[1] + kind.degree_shift
    return int(component) + kind.degree_shift


def check_truncation(model: FoliationModel, K: int) -> None:
    if K < 0:
        raise TruncationError("truncation level must be non-negative")
    if K < model.bandwidth:
        raise TruncationError(
            f"truncation K={K} is below the coefficient bandwidth {model.bandwidth} of {model.name}"
        )


def assemble(
    model: FoliationModel,
    kind: OperatorKind | str | Callable,
    K: int,
    component: Component = "all",
    codomain: Component | None = None,
    label: str | None = None,
) -> AssembledOperator:
    """Matrix of an operator on the truncated space ``V_K`` of ``component``.

    ``kind`` may be an ``OperatorKind`` (or its label) or any callable
    ``(model, form) -> form``; for callables ``codomain`` must be given.
    """
    check_truncation(model, K)
    if callable(kind) and not isinstance(kind, OperatorKind):
        fn = kind
        if codomain is None:
            raise ValueError("codomain component required for a custom operator")
        label = label or getattr(kind, "__name__", "custom")
    else:
        if isinstance(kind, str):
            kind = OperatorKind.parse(kind)
        fn = lambda m, a, k=kind: apply(m, k, a)  # noqa: E731
        codomain = codomain_component(kind, component, model.n) if codomain is None else codomain
        label = label or kind.label
    key = ("assembled", label, K, component, codomain)
    cacheable = isinstance(kind, OperatorKind)
    if cacheable and key in model.cache:
        return model.cache[key]
    dom = make_basis(model, K, component)
    cod = make_basis(model, K, codomain)
    cod_index = cod.index()
    rows, cols, vals = [], [], []
    flagged = set()
    for j, (w, m) in enumerate(dom):
        out = fn(model, BasicForm.monomial(w, model.dims, FourierScalar._raw(model.dims, {m: 1.0 + 0j})))
        for w2, m2, c in out.entries():
            i = cod_index.get((w2, m2))
            if i is None:
                if abs(c) <= LEAK_TOL:
                    continue
                if max((abs(k) for k in m2), default=0) > K:
                    flagged.add(j)
                    continue
                raise ValueError(f"{label} sent {w.label()} into {w2.label()}, outside component {codomain}")
            rows.append(i)
            cols.append(j)
            vals.append(c)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(len(cod), len(dom)), dtype=complex)
    op = AssembledOperator(label, model.name, K, component, codomain, dom, cod, mat, frozenset(flagged))
    if cacheable:
        model.cache[key] = op
    return op


# -- metric ------------------------------------------------------------------


def mode_gram(model: FoliationModel, K: int) -> np.ndarray | None:
    """Gram matrix of the Fourier modes under the weighted measure (None if flat)."""
    if not model.weighted:
        return None
    key = ("mode_gram", K)
    if key not in model.cache:
        modes = list(iter_modes(model.dims, K))
        what = model.weight(2 * K)
        G = np.empty((len(modes), len(modes)), dtype=complex)
        for i, mi in enumerate(modes):
            for j, mj in enumerate(modes):
                G[i, j] = what[tuple(a - b for a, b in zip(mi, mj))]
        # entry (i, j) is <e_j, e_i>; Hermitian by construction
        G = 0.5 * (G + G.conj().T)
        model.cache[key] = G
    return model.cache[key]


def mode_cholesky(model: FoliationModel, K: int) -> np.ndarray | None:
    """Upper factor ``R`` with ``mode_gram = R^H R``."""
    G = mode_gram(model, K)
    if G is None:
        return None
    key = ("mode_chol", K)
    if key not in model.cache:
        model.cache[key] = sla.cholesky(G, lower=False)
    return model.cache[key]


def gram(model: FoliationModel, basis: Basis) -> sp.spmatrix:
    """Gram matrix of a mode-major basis: the mode Gram tensored with the identity on words."""
    K = max((max((abs(k) for k in m), default=0) for m in basis.modes), default=0)
    G = mode_gram(model, K)
    nw = len(basis.words)
    if G is None:
        return sp.identity(len(basis), dtype=complex, format="csr")
    return sp.kron(sp.csr_matrix(G), sp.identity(nw, dtype=complex), format="csr")


def orthonormalizer(model: FoliationModel, basis: Basis):
    """``(R, R_inv)`` mapping coefficients to coordinates orthonormal for the L2 product."""
    K = max((max((abs(k) for k in m), default=0) for m in basis.modes), default=0)
    R = mode_cholesky(model, K)
    nw = len(basis.words)
    if R is None:
        eye = sp.identity(len(basis), dtype=complex, format="csr")
        return eye, eye
    Rinv = sla.solve_triangular(R, np.eye(R.shape[0]), lower=False)
    return (
        sp.kron(sp.csr_matrix(R), sp.identity(nw), format="csr"),
        sp.kron(sp.csr_matrix(Rinv), sp.identity(nw), format="csr"),
    )


def galerkin_adjoint(model: FoliationModel, op: AssembledOperator) -> AssembledOperator:
    """Adjoint of the truncated operator under the (possibly weighted) L2 product."""
    adj = op.conj_transpose()
    if not model.weighted:
        adj.label = f"{op.label}^*"
        return adj
    Gd = gram(model, op.domain).toarray()
    Gc = gram(model, op.codomain).toarray()
    mat = np.linalg.solve(Gd, op.matrix.conj().T @ Gc)
    return AssembledOperator(
        f"{op.label}^*", model.name, op.K, op.codomain_component, op.component,
        op.codomain, op.domain, sp.csr_matrix(mat),
    )


# -- Laplacians ---------------------------------------------------------------

_HODGE_FACTORS = {
    OperatorKind.Delta_B: (OperatorKind.d_B,),
    OperatorKind.Box_B: (OperatorKind.del_B,),
    OperatorKind.Boxbar_B: (OperatorKind.delbar_B,),
    OperatorKind.Delta_dc: (OperatorKind.d_c,),
    OperatorKind.Delta_ddbar: (OperatorKind.ddbar,),
}


def laplacian(model: FoliationModel, kind: OperatorKind | str, K: int, component: Component = "all") -> AssembledOperator:
    """Truncated Laplacian on ``component``.

    Hodge-type Laplacians (``Delta_B``, ``Box_B``, ``Boxbar_B``, ``Delta_dc``,
    ``Delta_ddbar``) are formed Galerkin-style, ``D^* D + D D^*`` with the
    truncated adjoint, which keeps them self-adjoint on ``V_K``.  Other kinds
    are assembled directly from their pointwise formulas.
    """
    if isinstance(kind, str):
        kind = OperatorKind.parse(kind)
    if kind not in _HODGE_FACTORS:
        return assemble(model, kind, K, component)
    (dk,) = _HODGE_FACTORS[kind]
    base = component
    if isinstance(component, tuple) and dk.bidegree_shift is None:
        base = component[0] + component[1]
    out_op = assemble(model, dk, K, base)
    total = galerkin_adjoint(model, out_op) @ out_op
    back = _preimage_component(dk, base)
    if component_words(model.n, back):
        in_op = assemble(model, dk, K, back)
        total = total + in_op @ galerkin_adjoint(model, in_op)
    total.label = kind.label
    if base != component:
        total = _slice_columns(total, component, model.n)
    return total


def _preimage_component(dk: OperatorKind, component: Component) -> Component:
    if component == "all":
        return "all"
    if isinstance(component, tuple):
        dr, ds = dk.bidegree_shift
        return (component[0] - dr, component[1] - ds)
    return int(component) - dk.degree_shift


def _slice_columns(op: AssembledOperator, component: Component, n: int) -> AssembledOperator:
    cols = op.domain.word_positions(component_words(n, component))
    dom = Basis(component_words(n, component), op.domain.modes)
    remap = {int(c): i for i, c in enumerate(cols)}
    return AssembledOperator(
        op.label, op.model_name, op.K, component, op.codomain_component, dom, op.codomain,
        op.matrix[:, cols].tocsr(), frozenset(remap[j] for j in op.flagged if j in remap), dict(op.meta),
    )


# -- export -------------------------------------------------------------------


def export_operator(op: AssembledOperator, path=None) -> str:
    """Coordinate-format text: header comments, size line, then ``row col re im``."""
    lines = [
        "%%foliage-operator coordinate complex general",
        f"% model {op.model_name}",
        f"% kind {op.label}",
        f"% K {op.K}",
        f"% component {_component_text(op.component)} -> {_component_text(op.codomain_component)}",
        "% domain " + " ".join(f"{w.label()}@{','.join(map(str, m))}" for w, m in op.domain),
        "% codomain " + " ".join(f"{w.label()}@{','.join(map(str, m))}" for w, m in op.codomain),
        f"% flagged {' '.join(str(j + 1) for j in sorted(op.flagged)) or 'none'}",
    ]
    coo = op.matrix.tocoo()
    order = np.lexsort((coo.row, coo.col))
    lines.append(f"{op.shape[0]} {op.shape[1]} {coo.nnz}")
    for k in order:
        v = coo.data[k]
        lines.append(f"{coo.row[k] + 1} {coo.col[k] + 1} {v.real:.17g} {v.imag:.17g}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def read_operator(text: str) -> tuple[dict, sp.csr_matrix]:
    header, rows, cols, vals = {}, [], [], []
    shape = None
    for line in text.splitlines():
        if line.startswith("%%"):
            continue
        if line.startswith("%"):
            key, _, rest = line[1:].strip().partition(" ")
            header[key] = rest
            continue
        parts = line.split()
        if shape is None:
            shape = (int(parts[0]), int(parts[1]))
            continue
        rows.append(int(parts[0]) - 1)
        cols.append(int(parts[1]) - 1)
        vals.append(complex(float(parts[2]), float(parts[3])))
    return header, sp.csr_matrix((vals, (rows, cols)), shape=shape, dtype=complex)


def _component_text(c: Component) -> str:
    if isinstance(c, tuple):
        return f"{c[0]},{c[1]}"
    return str(c)

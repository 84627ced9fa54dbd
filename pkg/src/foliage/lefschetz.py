"""sl2 structure generated by L, Lambda and the counting operator.

With ``A = sum_r (n - r) P_r`` the relations are ``[Lambda, L] = A``,
``[A, Lambda] = 2 Lambda`` and ``[A, L] = -2 L``; Lambda plays the raising
role and L the lowering one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .assembly import assemble
from .cohomology import CapabilityError, InconsistencyError, harmonic_projection, harmonic_space
from .exterior import BasicForm, CoframeWord, words_of_degree
from .fourier import FourierScalar
from .models import FoliationModel
from .operators import OperatorKind, counting, lambda_dual, lefschetz_l

DECOMPOSITION_TOL = 1e-10


def counting_operator(model: FoliationModel, a: BasicForm) -> BasicForm:
    return counting(model, a)


@dataclass
class Sl2Report:
    lambda_l_minus_counting: float
    counting_lambda: float
    counting_l: float
    lambda_is_adjoint_of_l: float

    @property
    def max_residual(self) -> float:
        return max(self.lambda_l_minus_counting, self.counting_lambda, self.counting_l, self.lambda_is_adjoint_of_l)


def sl2_check(model: FoliationModel, K: int = 0) -> Sl2Report:
    """Commutator residuals (max absolute entry) on the full exterior algebra at truncation K."""
    if not model.hermitian:
        raise CapabilityError("the sl2 action needs a transverse Hermitian structure")
    L = assemble(model, OperatorKind.L, K, "all").matrix
    Lam = assemble(model, OperatorKind.Lambda, K, "all").matrix
    A = assemble(model, OperatorKind.A, K, "all").matrix

    def mx(m):
        return float(abs(m).max()) if m.nnz else 0.0

    return Sl2Report(
        lambda_l_minus_counting=mx(Lam @ L - L @ Lam - A),
        counting_lambda=mx(A @ Lam - Lam @ A - 2 * Lam),
        counting_l=mx(A @ L - L @ A + 2 * L),
        lambda_is_adjoint_of_l=mx(Lam - L.conj().T),
    )


# -- fiber linear algebra -----------------------------------------------------


def _fiber_matrix(model: FoliationModel, fn, src_deg: int, dst_deg: int) -> np.ndarray:
    src = words_of_degree(model.n, src_deg)
    dst = words_of_degree(model.n, dst_deg)
    index = {w: i for i, w in enumerate(dst)}
    M = np.zeros((len(dst), len(src)), dtype=complex)
    for j, w in enumerate(src):
        out = fn(model, BasicForm.monomial(w, model.dims))
        for w2, f in out.terms.items():
            M[index[w2], j] = f.coefficient((0,) * model.dims)
    return M


def _l_power(model, src_deg, k) -> np.ndarray:
    M = np.eye(len(words_of_degree(model.n, src_deg)), dtype=complex)
    for i in range(k):
        M = _fiber_matrix(model, lefschetz_l, src_deg + 2 * i, src_deg + 2 * i + 2) @ M
    return M


def primitive_fiber_basis(model: FoliationModel, degree: int) -> np.ndarray:
    """Columns spanning the primitive forms of the given degree at a point."""
    if degree < 0 or degree > 2 * model.n:
        return np.zeros((0, 0), dtype=complex)
    nwords = len(words_of_degree(model.n, degree))
    if degree < 2:
        return np.eye(nwords, dtype=complex)
    lam = _fiber_matrix(model, lambda_dual, degree, degree - 2)
    return sla.null_space(lam, rcond=1e-12)


@dataclass
class PrimitiveDecomposition:
    input: BasicForm
    components: list[tuple[int, BasicForm]]
    residual: float

    def reassemble(self, model: FoliationModel) -> BasicForm:
        out = model.zero()
        for k, p in self.components:
            piece = p
            for _ in range(k):
                piece = lefschetz_l(model, piece)
            out = out + piece
        return out


def decomposition_matrix(model: FoliationModel, degree: int):
    """Columns ``L^k N_k`` for primitive bases ``N_k`` of degree ``degree - 2k``."""
    blocks, layout = [], []
    for k in range(degree // 2 + 1):
        # L^k kills primitives of degree s once k > n - s
        if k < degree - model.n:
            continue
        N = primitive_fiber_basis(model, degree - 2 * k)
        if N.size == 0:
            continue
        blocks.append(_l_power(model, degree - 2 * k, k) @ N)
        layout.append((k, N))
    if not blocks:
        return np.zeros((len(words_of_degree(model.n, degree)), 0)), layout
    return np.hstack(blocks), layout


def primitive_decompose(model: FoliationModel, a: BasicForm) -> PrimitiveDecomposition:
    """Write a pure-degree form as ``sum_k L^k p_k`` with every ``p_k`` primitive."""
    degs = a.degrees()
    if len(degs) > 1:
        raise ValueError("primitive decomposition needs a form of pure degree")
    r = degs.pop() if degs else 0
    if r > 2 * model.n:
        raise ValueError(f"degree {r} exceeds 2n = {2 * model.n}")
    M, layout = decomposition_matrix(model, r)
    if M.shape[1] and np.linalg.matrix_rank(M, tol=1e-10) < M.shape[1]:
        raise InconsistencyError("primitive decomposition is not unique at this degree")
    words = words_of_degree(model.n, r)
    modes = sorted({m for f in a.terms.values() for m in f.terms})
    comps: dict[int, dict[CoframeWord, dict]] = {k: {} for k, _ in layout}
    for m in modes:
        v = np.array([a.coefficient(w).coefficient(m) for w in words], dtype=complex)
        c, *_ = np.linalg.lstsq(M, v, rcond=None)
        pos = 0
        for k, N in layout:
            p = N @ c[pos:pos + N.shape[1]]
            pos += N.shape[1]
            for w, val in zip(words_of_degree(model.n, r - 2 * k), p):
                if val != 0:
                    comps[k].setdefault(w, {})[m] = val
    components = [
        (k, BasicForm(model.n, model.dims, {w: FourierScalar(model.dims, t) for w, t in comps[k].items()}))
        for k, _ in layout
    ]
    dec = PrimitiveDecomposition(a, components, 0.0)
    dec.residual = (dec.reassemble(model) - a).norm()
    if dec.residual > DECOMPOSITION_TOL * max(1.0, a.norm()):
        raise InconsistencyError(f"primitive decomposition residual {dec.residual:.3e}")
    return dec


@dataclass
class LefschetzRank:
    rank: int
    domain_dim: int
    codomain_dim: int

    @property
    def injective(self) -> bool:
        return self.rank == self.domain_dim

    @property
    def surjective(self) -> bool:
        return self.rank == self.codomain_dim


def lefschetz_rank(model: FoliationModel, r: int, k: int, K: int = 0, on: str = "forms", tol: float = 1e-8) -> LefschetzRank:
    """Rank of ``L^k`` from degree ``r`` to ``r + 2k`` on forms or on basic cohomology."""
    if on == "forms":
        M = _l_power(model, r, k)
        rank = int(np.linalg.matrix_rank(M, tol=tol)) if M.size else 0
        return LefschetzRank(rank, M.shape[1], M.shape[0])
    if on != "cohomology":
        raise ValueError("on must be 'forms' or 'cohomology'")
    if not model.kahler:
        raise CapabilityError("L is only defined on basic cohomology for transversely Kähler models")
    src = harmonic_space(model, "Delta_B", r, K)
    dst_deg = r + 2 * k
    if dst_deg > 2 * model.n:
        return LefschetzRank(0, src.dim, 0)
    dst = harmonic_space(model, "Delta_B", dst_deg, K)
    if src.dim == 0 or dst.dim == 0:
        return LefschetzRank(0, src.dim, dst.dim)
    cols = []
    for h in src.basis:
        img = h
        for _ in range(k):
            img = lefschetz_l(model, img)
        cols.append(harmonic_projection(model, dst, img))
    M = np.array(cols).T
    s = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return LefschetzRank(rank, src.dim, dst.dim)


__all__ = [
    "LefschetzRank",
    "PrimitiveDecomposition",
    "Sl2Report",
    "counting_operator",
    "decomposition_matrix",
    "lefschetz_rank",
    "primitive_decompose",
    "primitive_fiber_basis",
    "sl2_check",
]

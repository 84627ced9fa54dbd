"""Harmonic spaces, cohomology tables and class diagnostics.

Kernels are computed from a positive semidefinite operator
``P = sum_k M_k^H M_k`` written in coordinates that are orthonormal for the
(possibly weighted) L2 product.  For the Hodge Laplacian the factors are
``d`` on the component and ``d^*`` coming into it.  The truncated space is
preserved by every differential used here, so kernel dimensions equal the
cohomology of the truncated complex, which stabilises once all modes that
carry cohomology are inside the window.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .assembly import (
    AssembledOperator,
    Basis,
    Component,
    assemble,
    component_words,
    make_basis,
    orthonormalizer,
)
from .config import DEFAULTS, worker_count
from .exterior import BasicForm, j_on_forms, wedge
from .models import FoliationModel, mean_curvature_parts
from .operators import (
    OperatorKind,
    automorphy_anticommutator,
    box_basic,
    boxbar_basic,
    d_basic,
    d_c_op,
    del_basic,
    laplace_basic,
    lie_j_commutator,
)

HARMONIC_KINDS = ("Delta_B", "Boxbar_B", "Box_B", "bott_chern", "Delta_ddbar", "Delta_dc")
HERMITIAN_KINDS = ("Boxbar_B", "Box_B", "bott_chern", "Delta_ddbar", "Delta_dc")


class NonConvergenceError(RuntimeError):
    """A harmonic dimension changed between K and K + step."""


class CapabilityError(ValueError):
    """The model lacks the structure an operation requires."""


class InconsistencyError(RuntimeError):
    """Two independent numerical witnesses disagree."""


# -- kernel machinery ---------------------------------------------------------


def _factors(kind: str, component: Component, n: int) -> list[tuple[OperatorKind, Component, str]]:
    """(operator, its domain component, 'out' | 'in') pieces defining the PSD operator."""
    if kind == "Delta_B":
        return [(OperatorKind.d_B, component, "out"), (OperatorKind.d_B, component - 1, "in")]
    if kind == "Delta_dc":
        return [(OperatorKind.d_c, component, "out"), (OperatorKind.d_c, component - 1, "in")]
    r, s = component
    if kind == "Boxbar_B":
        return [(OperatorKind.delbar_B, (r, s), "out"), (OperatorKind.delbar_B, (r, s - 1), "in")]
    if kind == "Box_B":
        return [(OperatorKind.del_B, (r, s), "out"), (OperatorKind.del_B, (r - 1, s), "in")]
    if kind == "bott_chern":
        return [
            (OperatorKind.del_B, (r, s), "out"),
            (OperatorKind.delbar_B, (r, s), "out"),
            (OperatorKind.ddbar, (r - 1, s - 1), "in"),
        ]
    if kind == "Delta_ddbar":
        return [(OperatorKind.ddbar, (r, s), "out"), (OperatorKind.ddbar, (r - 1, s - 1), "in")]
    raise ValueError(f"unknown harmonic kind {kind!r}; choose one of {', '.join(HARMONIC_KINDS)}")


def _empty(n, comp) -> bool:
    if isinstance(comp, tuple):
        return not component_words(n, comp)
    return not (0 <= comp <= 2 * n)


def _orthonormal_matrix(model, op: AssembledOperator):
    """Matrix of ``op`` in L2-orthonormal coordinates on both sides."""
    if not model.weighted:
        return op.matrix
    R_cod, _ = orthonormalizer(model, op.codomain)
    _, Rinv_dom = orthonormalizer(model, op.domain)
    # the factors are dense across modes, so dense products are much faster here
    return R_cod.toarray() @ (op.matrix @ Rinv_dom.toarray())


@dataclass
class _PSD:
    matrix: sp.spmatrix
    basis: Basis
    out_ops: list
    in_ops: list
    block_diagonal: bool


def _psd_operator(model, kind, component, K) -> _PSD:
    basis = make_basis(model, K, component)
    N = len(basis)
    P = np.zeros((N, N), dtype=complex) if model.weighted else sp.csr_matrix((N, N), dtype=complex)
    outs, ins = [], []
    block = not model.weighted
    for opk, comp, side in _factors(kind, component, model.n):
        if _empty(model.n, comp):
            continue
        if side == "out":
            op = assemble(model, opk, K, comp)
            if op.shape[0] == 0:
                continue
            M = _orthonormal_matrix(model, op)
            P = P + (M.conj().T @ M)
            outs.append(op)
        else:
            op = assemble(model, opk, K, comp)
            if op.shape[1] == 0:
                continue
            M = _orthonormal_matrix(model, op)
            P = P + (M @ M.conj().T)
            ins.append(op)
        block = block and op.is_mode_diagonal()
    return _PSD(P if model.weighted else P.tocsr(), basis, outs, ins, block)


def _eig_blocks(psd: _PSD):
    """Yield (index array, eigenvalues, eigenvectors) per diagonal block."""
    P = psd.matrix
    if psd.block_diagonal and sp.issparse(P):
        for sl in psd.basis.block_slices():
            blk = P[sl, sl].toarray()
            vals, vecs = np.linalg.eigh(0.5 * (blk + blk.conj().T))
            yield np.arange(sl.start, sl.stop), vals, vecs
    else:
        dense = P.toarray() if sp.issparse(P) else P
        vals, vecs = np.linalg.eigh(0.5 * (dense + dense.conj().T))
        yield np.arange(P.shape[0]), vals, vecs


@dataclass
class KernelResult:
    dim: int
    vectors: np.ndarray  # orthonormal coordinates, columns
    threshold: float
    largest_kernel_eig: float
    smallest_nonzero_eig: float
    scale: float


def _kernel(psd: _PSD, tol: float) -> KernelResult:
    blocks = list(_eig_blocks(psd))
    N = psd.matrix.shape[0]
    scale = max([1.0] + [float(np.max(np.abs(v))) for _, v, _ in blocks if len(v)])
    thr = tol * scale
    cols, kmax, nzmin = [], 0.0, math.inf
    for idx, vals, vecs in blocks:
        for k, lam in enumerate(vals):
            if lam <= thr:
                v = np.zeros(N, dtype=complex)
                v[idx] = vecs[:, k]
                cols.append(v)
                kmax = max(kmax, float(abs(lam)))
            else:
                nzmin = min(nzmin, float(lam))
    vectors = np.array(cols).T if cols else np.zeros((N, 0), dtype=complex)
    return KernelResult(len(cols), vectors, thr, kmax, nzmin, scale)


def _block_rank(op: AssembledOperator, tol: float) -> int:
    """Numerical rank, blockwise when the operator does not couple modes."""
    if op.shape[0] == 0 or op.shape[1] == 0:
        return 0
    mats = []
    if op.is_mode_diagonal():
        dsl, csl = op.domain.block_slices(), op.codomain.block_slices()
        mats = [op.matrix[c, d].toarray() for c, d in zip(csl, dsl)]
    else:
        mats = [op.toarray()]
    svals = [np.linalg.svd(m, compute_uv=False) for m in mats if m.size]
    top = max([1.0] + [float(s[0]) for s in svals if len(s)])
    return int(sum(int(np.sum(s > tol * top)) for s in svals))


def _stacked_nullity(ops: Sequence[AssembledOperator], n_dom: int, tol: float) -> int:
    if not ops:
        return n_dom
    if all(op.is_mode_diagonal() for op in ops):
        mats = []
        for k, d in enumerate(ops[0].domain.block_slices()):
            mats.append(np.vstack([op.matrix[op.codomain.block_slices()[k], d].toarray() for op in ops]))
    else:
        mats = [sp.vstack([op.matrix for op in ops]).toarray()]
    svals = [np.linalg.svd(m, compute_uv=False) for m in mats if m.size]
    top = max([1.0] + [float(s[0]) for s in svals if len(s)])
    return n_dom - int(sum(int(np.sum(s > tol * top)) for s in svals))


def _rank_nullity(psd: _PSD, tol: float) -> int | None:
    """``dim ker(outgoing) - rank(incoming)`` when incoming lands in that kernel."""
    for out in psd.out_ops:
        for inc in psd.in_ops:
            comp = out @ inc
            if comp.max_column_norm(interior_only=False) > 1e-8 * max(1.0, out.max_column_norm() * inc.max_column_norm()):
                return None
    nullity = _stacked_nullity(psd.out_ops, len(psd.basis), tol)
    rank = sum(_block_rank(op, tol) for op in psd.in_ops)
    return nullity - rank


# -- public API ---------------------------------------------------------------


@dataclass
class HarmonicSpace:
    model: str
    kind: str
    component: Component
    K: int
    tol: float
    dim: int
    basis: list[BasicForm]
    stability: dict[int, int]
    converged: bool
    rank_nullity: int | None
    spectral_gap: dict[str, float]
    coordinates: np.ndarray = field(repr=False, default=None)
    coefficient_vectors: np.ndarray = field(repr=False, default=None)
    basis_space: Basis = field(repr=False, default=None)

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "component": list(self.component) if isinstance(self.component, tuple) else self.component,
            "dim": self.dim,
            "stability": {str(k): v for k, v in sorted(self.stability.items())},
            "converged": self.converged,
            "rank_nullity": self.rank_nullity,
        }


def _check_kind(model, kind):
    if kind not in HARMONIC_KINDS:
        raise ValueError(f"unknown harmonic kind {kind!r}; choose one of {', '.join(HARMONIC_KINDS)}")
    if kind in HERMITIAN_KINDS and not model.hermitian:
        raise CapabilityError(f"{kind} needs a transverse Hermitian structure")


def _harmonic_at(model, kind, component, K, tol):
    psd = _psd_operator(model, kind, component, K)
    ker = _kernel(psd, tol)
    return psd, ker


def _dimension_at(model, kind, component, K, tol) -> int:
    """Kernel dimension at K; uses rank-nullity instead of a dense eigensolve when that is exact."""
    if model.weighted:
        outs, ins = [], []
        for opk, comp, side in _factors(kind, component, model.n):
            if _empty(model.n, comp):
                continue
            (outs if side == "out" else ins).append(assemble(model, opk, K, comp))
        psd = _PSD(None, make_basis(model, K, component), outs, ins, False)
        if all(op.is_mode_diagonal() for op in outs + ins):
            rn = _rank_nullity(psd, tol)
            if rn is not None:
                return rn
    return _harmonic_at(model, kind, component, K, tol)[1].dim


def harmonic_space(
    model: FoliationModel,
    kind: str,
    component: Component,
    K: int,
    tol: float = DEFAULTS.kernel_tol,
    *,
    step: int = DEFAULTS.stability_step,
    strict: bool = True,
    with_basis: bool = True,
) -> HarmonicSpace:
    """Kernel of a Laplacian-type operator on one (bi)degree.

    ``strict`` raises ``NonConvergenceError`` when the dimension at ``K`` and
    ``K + step`` differ; otherwise the space is returned with
    ``converged=False``.
    """
    _check_kind(model, kind)
    psd, ker = _harmonic_at(model, kind, component, K, tol)
    stability = {K: ker.dim}
    if step:
        stability[K + step] = _dimension_at(model, kind, component, K + step, tol)
    converged = len(set(stability.values())) == 1
    if strict and not converged:
        raise NonConvergenceError(
            f"{kind} on {component} for {model.name}: dims {stability} differ between truncations"
        )
    rn = _rank_nullity(psd, tol)
    if model.weighted:
        _, Rinv = orthonormalizer(model, psd.basis)
        coeffs = Rinv @ ker.vectors
    else:
        coeffs = ker.vectors
    basis = []
    if with_basis:
        basis = [psd.basis.to_form(coeffs[:, k], model.n, model.dims, tol=1e-15) for k in range(ker.dim)]
    return HarmonicSpace(
        model=model.name, kind=kind, component=component, K=K, tol=tol, dim=ker.dim, basis=basis,
        stability=stability, converged=converged, rank_nullity=rn,
        spectral_gap={
            "threshold": ker.threshold,
            "largest_kernel_eigenvalue": ker.largest_kernel_eig,
            "smallest_nonzero_eigenvalue": ker.smallest_nonzero_eig,
        },
        coordinates=ker.vectors, coefficient_vectors=coeffs, basis_space=psd.basis,
    )


def harmonic_projection(model: FoliationModel, space: HarmonicSpace, a: BasicForm) -> np.ndarray:
    """Coordinates of the L2-orthogonal projection of ``a`` onto ``space``."""
    x = space.basis_space.to_vector(a)
    if model.weighted:
        R, _ = orthonormalizer(model, space.basis_space)
        x = R @ x
    return space.coordinates.conj().T @ x


def _lstsq_residual(model, op: AssembledOperator, target: BasicForm):
    """``min_x ||op x - target||`` in the L2 norm; returns (residual, solution coefficients)."""
    b = op.codomain.to_vector(target)
    A = op.toarray()
    if model.weighted:
        Rc, _ = orthonormalizer(model, op.codomain)
        _, Rinv = orthonormalizer(model, op.domain)
        A_t = Rc.toarray() @ A @ Rinv.toarray()
        b_t = Rc @ b
    else:
        A_t, b_t = A, b
    if A_t.size == 0:
        return float(np.linalg.norm(b_t)), np.zeros(op.shape[1], dtype=complex)
    y, *_ = np.linalg.lstsq(A_t, b_t, rcond=None)
    res = float(np.linalg.norm(A_t @ y - b_t))
    x = Rinv @ y if model.weighted else y
    return res, x


@dataclass
class ClassDiagnostic:
    trivial: bool
    projection_norm: float
    residual: float
    relative_residual: float
    witnesses_agree: bool
    details: dict = field(default_factory=dict)


def alvarez_class_trivial(model: FoliationModel, K: int, tol: float = DEFAULTS.class_tol) -> ClassDiagnostic:
    """Decide whether ``[kappa_B]`` vanishes in basic cohomology.

    Primary witness: norm of the harmonic projection of ``kappa_B``.  Second
    witness: least-squares residual of ``d_B f = kappa_B``.
    """
    kappa = model.kappa
    dk = d_basic(model, kappa)
    if not dk.is_zero(1e-10):
        raise InconsistencyError("mean curvature form is not closed")
    space = harmonic_space(model, "Delta_B", 1, K, DEFAULTS.kernel_tol)
    proj = harmonic_projection(model, space, kappa)
    pnorm = float(np.linalg.norm(proj))
    knorm = model.norm(kappa)
    d0 = assemble(model, OperatorKind.d_B, K, 0)
    res, _ = _lstsq_residual(model, d0, kappa)
    scale = max(knorm, 1.0)
    trivial = pnorm <= tol * scale
    trivial_ls = res <= tol * scale
    return ClassDiagnostic(
        trivial=trivial, projection_norm=pnorm, residual=res,
        relative_residual=res / knorm if knorm else 0.0,
        witnesses_agree=trivial == trivial_ls,
        details={"kappa_norm": knorm, "harmonic_dim": space.dim},
    )


def eta_form(model: FoliationModel) -> BasicForm:
    return del_basic(model, mean_curvature_parts(model).kappa01)


def eta_class_trivial(model: FoliationModel, K: int, tol: float = DEFAULTS.class_tol) -> ClassDiagnostic:
    """Decide whether ``[del_B kappa^{0,1}]`` vanishes in the del-delbar cohomology.

    Primary witness: relative residual of ``min_h ||del delbar h - del kappa^{0,1}||``.
    Second witness: projection onto the Bott-Chern harmonic (1,1)-forms.
    """
    if not model.hermitian:
        raise CapabilityError("the eta class needs a transverse Hermitian structure")
    eta = eta_form(model)
    enorm = model.norm(eta)
    ddbar0 = assemble(model, OperatorKind.ddbar, K, (0, 0))
    res, _ = _lstsq_residual(model, ddbar0, eta)
    rel = res / enorm if enorm else 0.0
    trivial = rel <= tol
    space = harmonic_space(model, "bott_chern", (1, 1), K, DEFAULTS.kernel_tol)
    pnorm = float(np.linalg.norm(harmonic_projection(model, space, eta))) if space.dim else 0.0
    agree = trivial == (pnorm <= tol * max(enorm, 1.0))
    return ClassDiagnostic(
        trivial=trivial, projection_norm=pnorm, residual=res, relative_residual=rel,
        witnesses_agree=agree,
        details={"eta_norm": enorm, "bott_chern_11_dim": space.dim},
    )


@dataclass
class AutomorphyReport:
    automorphic: bool
    residual_lie: float
    residual_contract: float
    residual_laplacian: float | None
    bidegree_leak: float
    witness: BasicForm


def automorphy_witness(model: FoliationModel) -> BasicForm:
    """``{delbar_B, H^{1,0} _|}`` applied to ``kappa^{1,0}``."""
    return automorphy_anticommutator(model, mean_curvature_parts(model).kappa10)


def _laplacian_split(m, a):
    return laplace_basic(m, a) - box_basic(m, a) - boxbar_basic(m, a)


def _bidegree_leak(m, a):
    # part of Delta_B a that leaves the bidegree of a (a is pure when assembled per bidegree)
    out = m.zero()
    bds = a.bidegrees()
    for w, f in laplace_basic(m, a).terms.items():
        if w.bidegree not in bds:
            out = out + BasicForm.monomial(w, m.dims, f)
    return out


def automorphic_test(model: FoliationModel, K: int | None = None, tol: float = DEFAULTS.structure_tol) -> AutomorphyReport:
    """Is the mean curvature automorphic?

    The flag comes from the defining property, ``[L_{kappa^#}, J] = 0``.  The
    anticommutator ``{delbar_B, H^{1,0} _|}`` must agree with it whenever J is
    integrable, and on Kähler models so must ``Delta_B - Box_B - Boxbar_B``;
    a disagreement raises ``InconsistencyError``.
    """
    if not model.hermitian:
        raise CapabilityError("automorphy needs a transverse Hermitian structure")
    # Every witness is a differential operator of order <= 2 whose coefficients have
    # the model's bandwidth b, so its action on the modes in [-1, 1]^d (interior at
    # truncation b + 1) already determines it, which is the default K.
    if K is None:
        K = model.bandwidth + 1
    lie = assemble(model, lie_j_commutator, K, "all", codomain="all", label="[L_kappa,J]").max_column_norm()
    anti = assemble(model, automorphy_anticommutator, K, "all", codomain="all", label="automorphy").max_column_norm()
    automorphic = lie <= tol
    leak_total = 0.0
    for r in range(model.n + 1):
        for s in range(model.n + 1):
            op = assemble(model, _bidegree_leak, K, (r, s), codomain=r + s, label=f"leak{r}{s}")
            leak_total = max(leak_total, op.max_column_norm())
    split = None
    if model.integrable and automorphic != (anti <= tol):
        raise InconsistencyError(
            f"automorphy witnesses disagree on {model.name}: Lie {lie:.3e}, anticommutator {anti:.3e}"
        )
    if model.kahler:
        split = assemble(model, _laplacian_split, K, "all", codomain="all", label="split").max_column_norm()
        if automorphic != (split <= tol) or automorphic != (leak_total <= tol):
            raise InconsistencyError(
                f"automorphy witnesses disagree on {model.name}: Lie {lie:.3e}, Laplacian split {split:.3e}"
            )
    return AutomorphyReport(automorphic, lie, anti, split, leak_total, automorphy_witness(model))


# -- tables -------------------------------------------------------------------


@dataclass
class CohomologyReport:
    model: str
    K: int
    tol: float
    betti: list[int]
    dolbeault: list[list[int]]
    bott_chern: list[int]
    flags: dict[str, bool]
    diagnostics: dict[str, object]
    checks: list[dict]
    converged: bool
    thresholds: dict = field(default_factory=lambda: asdict(DEFAULTS))
    model_info: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def _parallel(jobs: list[Callable[[], object]]) -> list:
    workers = worker_count()
    if workers <= 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda j: j(), jobs))


def diamond_dims(model: FoliationModel, K: int, tol: float = DEFAULTS.kernel_tol) -> list[list[int]]:
    """``dim(ker Delta_B  ∩  Omega^{r,s})`` for every bidegree."""
    n = model.n
    table = [[0] * (n + 1) for _ in range(n + 1)]
    for j in range(2 * n + 1):
        psd = _psd_operator(model, "Delta_B", j, K)
        for r in range(max(0, j - n), min(n, j) + 1):
            s = j - r
            idx = psd.basis.word_positions(component_words(n, (r, s)))
            sub = _PSD(psd.matrix[idx][:, idx], Basis(component_words(n, (r, s)), psd.basis.modes), [], [],
                       psd.block_diagonal)
            table[r][s] = _kernel(sub, tol).dim
    return table


def betti_table(model: FoliationModel, K: int, tol: float = DEFAULTS.kernel_tol, *, strict: bool = True) -> CohomologyReport:
    """Basic Betti, Dolbeault and Bott-Chern numbers with class and automorphy flags."""
    n = model.n
    jobs = [lambda j=j: harmonic_space(model, "Delta_B", j, K, tol, strict=False, with_basis=False) for j in range(2 * n + 1)]
    bideg = [(r, s) for r in range(n + 1) for s in range(n + 1)]
    jobs += [lambda c=c: harmonic_space(model, "Boxbar_B", c, K, tol, strict=False, with_basis=False) for c in bideg]
    jobs += [lambda r=r: harmonic_space(model, "bott_chern", (r, r), K, tol, strict=False, with_basis=False) for r in range(n + 1)]
    jobs += [lambda r=r: harmonic_space(model, "Delta_ddbar", (r, r), K, tol, strict=False, with_basis=False) for r in range(n + 1)]
    spaces = _parallel(jobs)
    nb = 2 * n + 1
    betti_sp = spaces[:nb]
    dol_sp = spaces[nb:nb + len(bideg)]
    bc_sp = spaces[nb + len(bideg):nb + len(bideg) + n + 1]
    lit_sp = spaces[nb + len(bideg) + n + 1:]
    required = betti_sp + dol_sp + bc_sp
    converged = all(s.converged for s in required)
    if strict and not converged:
        bad = [f"{s.kind}{s.component}:{s.stability}" for s in required if not s.converged]
        raise NonConvergenceError("unconverged dimensions: " + ", ".join(bad))
    betti = [s.dim for s in betti_sp]
    dol = [[0] * (n + 1) for _ in range(n + 1)]
    for (r, s), sp_ in zip(bideg, dol_sp):
        dol[r][s] = sp_.dim
    bc = [s.dim for s in bc_sp]

    checks = []
    for s in required:
        if s.rank_nullity is not None:
            checks.append({
                "name": f"rank_nullity {s.kind} {s.component}",
                "value": float(s.rank_nullity - s.dim), "pass": s.rank_nullity == s.dim,
            })
    xi = alvarez_class_trivial(model, K)
    eta = eta_class_trivial(model, K)
    auto = automorphic_test(model)
    diamond = diamond_dims(model, K, tol)
    if model.kahler:
        for r in range(n + 1):
            for s in range(n + 1):
                ok = diamond[r][s] <= dol[r][s]
                checks.append({"name": f"harmonic_in_bidegree<=dolbeault ({r},{s})",
                               "value": float(diamond[r][s] - dol[r][s]), "pass": ok})
                if not ok:
                    raise InconsistencyError(
                        f"dim(ker Delta_B on ({r},{s}))={diamond[r][s]} exceeds Dolbeault {dol[r][s]}"
                    )
    for name, diag in (("alvarez", xi), ("eta", eta)):
        checks.append({"name": f"{name} witnesses agree", "value": diag.relative_residual, "pass": diag.witnesses_agree})

    flags = {
        "kahler": model.kahler,
        "integrable": model.integrable,
        "taut": xi.trivial,
        "eta_trivial": eta.trivial,
        "automorphic": auto.automorphic,
    }
    diagnostics = {
        "xi_projection_norm": xi.projection_norm,
        "xi_exactness_residual": xi.residual,
        "eta_residual": eta.residual,
        "eta_relative_residual": eta.relative_residual,
        "eta_bott_chern_projection": eta.projection_norm,
        "automorphy_lie_residual": auto.residual_lie,
        "automorphy_residual": auto.residual_contract,
        "automorphy_laplacian_residual": auto.residual_laplacian,
        "laplacian_bidegree_leak": auto.bidegree_leak,
        "harmonic_bidegree_table": diamond,
        "ddbar_literal_kernel": {
            f"{s.component[0]},{s.component[1]}": {"stability": {str(k): v for k, v in s.stability.items()},
                                                   "converged": s.converged}
            for s in lit_sp
        },
        "spectral_gaps": {f"{s.kind} {s.component}": s.spectral_gap for s in required},
        "stability": {f"{s.kind} {s.component}": {str(k): v for k, v in s.stability.items()} for s in required},
    }
    return CohomologyReport(
        model=model.name, K=K, tol=tol, betti=betti, dolbeault=dol, bott_chern=bc,
        flags=flags, diagnostics=diagnostics, checks=checks, converged=converged,
        model_info=model.describe(),
    )


@dataclass
class DiamondReport:
    table: list[list[int]]
    betti: list[int]
    qualifying: bool
    symmetric: bool
    serre_symmetric: bool
    odd_betti_even: bool
    degree_sums_match: bool
    dolbeault_sums_match: bool
    asymmetries: list[tuple[int, int]]


def hodge_diamond_report(model: FoliationModel, K: int, tol: float = DEFAULTS.kernel_tol) -> DiamondReport:
    """Harmonic-in-bidegree table and which classical symmetries hold.

    The symmetries are asserted only on Kähler models with automorphic mean
    curvature; elsewhere they are computed and reported.
    """
    n = model.n
    table = diamond_dims(model, K, tol)
    betti = [harmonic_space(model, "Delta_B", j, K, tol, with_basis=False).dim for j in range(2 * n + 1)]
    dol = [[harmonic_space(model, "Boxbar_B", (r, s), K, tol, with_basis=False).dim for s in range(n + 1)]
           for r in range(n + 1)]
    asym = [(r, s) for r in range(n + 1) for s in range(n + 1) if r < s and dol[r][s] != dol[s][r]]
    symmetric = all(table[r][s] == table[s][r] for r in range(n + 1) for s in range(n + 1))
    serre = all(dol[r][s] == dol[n - r][n - s] for r in range(n + 1) for s in range(n + 1))
    odd_even = all(betti[j] % 2 == 0 for j in range(1, 2 * n + 1, 2))
    sums = all(
        betti[j] == sum(table[r][j - r] for r in range(max(0, j - n), min(n, j) + 1)) for j in range(2 * n + 1)
    )
    dsums = all(
        betti[j] == sum(dol[r][j - r] for r in range(max(0, j - n), min(n, j) + 1)) for j in range(2 * n + 1)
    )
    qualifying = False
    if model.kahler:
        qualifying = automorphic_test(model).automorphic
    if qualifying and not (symmetric and odd_even and sums):
        raise InconsistencyError(f"Hodge diamond symmetries fail on qualifying model {model.name}")
    return DiamondReport(table, betti, qualifying, symmetric and not asym, serre, odd_even, sums, dsums, asym)


# -- Lefschetz on cohomology and the dd_c lemma -------------------------------


@dataclass
class DdcResult:
    closed: bool
    dc_exact: bool
    solvable: bool
    qualifying: bool
    closed_residual: float
    dc_residual: float
    residual: float
    relative_residual: float
    harmonic_projection_norm: float
    # projection onto Bott-Chern harmonics, for pure (p, p) input; None otherwise
    bott_chern_projection_norm: float | None
    beta: BasicForm | None


def ddc_solve(model: FoliationModel, alpha: BasicForm, K: int, tol: float = 1e-10) -> DdcResult:
    """Try to write a closed, ``d_c``-exact form as ``d d_c beta``.

    The guarantee only holds on taut Kähler models; elsewhere the call is a
    probe and reports which hypothesis or conclusion fails.
    """
    if not model.integrable:
        raise CapabilityError("d_c needs an integrable transverse complex structure")
    degs = alpha.degrees()
    if len(degs) != 1:
        raise ValueError("alpha must have pure degree")
    k = degs.pop()
    anorm = model.norm(alpha)
    closed_res = model.norm(d_basic(model, alpha))
    closed = closed_res <= tol * max(1.0, anorm)
    if k >= 1:
        dc_op = assemble(model, OperatorKind.d_c, K, k - 1)
        dc_res, _ = _lstsq_residual(model, dc_op, alpha)
    else:
        dc_res = anorm
    dc_exact = dc_res <= tol * max(1.0, anorm)
    qualifying = model.kahler and model.kappa.is_zero(1e-14)

    def ddc(m, a):
        return d_basic(m, d_c_op(m, a))

    beta = None
    res = anorm
    if k >= 2:
        op = assemble(model, ddc, K, k - 2, codomain=k, label="d d_c")
        res, x = _lstsq_residual(model, op, alpha)
        beta = op.domain.to_form(x, model.n, model.dims, tol=1e-15)
    rel = res / anorm if anorm else 0.0
    solvable = closed and dc_exact and rel <= tol
    hp = 0.0
    if k <= 2 * model.n:
        space = harmonic_space(model, "Delta_B", k, K, strict=False)
        if space.dim:
            hp = float(np.linalg.norm(harmonic_projection(model, space, alpha)))
    bcp = None
    bideg = alpha.bidegrees()
    if len(bideg) == 1 and len(set(next(iter(bideg)))) == 1:
        space = harmonic_space(model, "bott_chern", next(iter(bideg)), K, strict=False)
        bcp = float(np.linalg.norm(harmonic_projection(model, space, alpha))) if space.dim else 0.0
    return DdcResult(closed, dc_exact, solvable, qualifying, closed_res, dc_res, res, rel, hp, bcp, beta)


def kappa_pair_rank(model: FoliationModel, K: int, tol: float = 1e-8) -> int:
    """Rank of the harmonic projections of ``kappa_B`` and ``J kappa_B`` in degree 1."""
    space = harmonic_space(model, "Delta_B", 1, K)
    cols = [harmonic_projection(model, space, model.kappa), harmonic_projection(model, space, j_on_forms(model.kappa))]
    M = np.array(cols).T
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def wedge_power(model: FoliationModel, a: BasicForm, k: int) -> BasicForm:
    om = model.kahler_form()
    for _ in range(k):
        a = wedge(om, a)
    return a

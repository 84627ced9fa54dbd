"""Randomised identity suite I1-I23 over the transverse operator calculus.

Every identity is evaluated on seeded random forms and, where the matrices are
cheap, also as an assembled-operator norm at truncation K.  Identities whose
structural hypotheses fail on a model are reported as skipped with a reason.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import operators as ops
from .assembly import assemble, galerkin_adjoint, laplacian
from .cohomology import automorphic_test
from .config import DEFAULTS, worker_count
from .exterior import (
    BasicForm,
    all_words,
    bidegree_project,
    conjugate,
    contract,
    degree_project,
    hodge_star,
    j_on_forms,
    c_weil,
    pointwise_inner,
    real_part,
    volume_form,
    wedge,
)
from .fourier import FourierScalar
from .lefschetz import sl2_check
from .models import FoliationModel, iter_modes, mean_curvature_parts

LEVELS = ("Riemannian", "Hermitian", "Kähler", "Kähler+automorphic", "taut")
LEVEL_ALIASES = {
    "riemannian": "Riemannian",
    "hermitian": "Hermitian",
    "kahler": "Kähler",
    "kähler": "Kähler",
    "automorphic": "Kähler+automorphic",
    "kahler+automorphic": "Kähler+automorphic",
    "taut": "taut",
}


# -- random forms -------------------------------------------------------------


@dataclass(frozen=True)
class RandomFormSpec:
    seed: int
    bandwidth: int = 1
    # relative weight per bidegree (r, s); missing bidegrees get weight 1, zero excludes them
    bidegree_weights: Mapping[tuple[int, int], float] | None = None
    amplitude: float = 1.0
    real: bool = False
    degree: int | None = None


def random_form(model: FoliationModel, spec: RandomFormSpec) -> BasicForm:
    """Gaussian coefficients on every admissible word and mode; identical spec gives identical output."""
    rng = np.random.default_rng(spec.seed)
    weights = dict(spec.bidegree_weights or {})
    modes = list(iter_modes(model.dims, spec.bandwidth))
    terms = {}
    for w in all_words(model.n):
        if spec.degree is not None and w.degree != spec.degree:
            continue
        scale = weights.get(w.bidegree, 1.0)
        if scale == 0:
            continue
        z = rng.standard_normal((len(modes), 2)) @ np.array([1.0, 1j])
        terms[w] = FourierScalar(model.dims, dict(zip(modes, spec.amplitude * scale * z)))
    a = BasicForm(model.n, model.dims, terms)
    return real_part(a) if spec.real else a


def random_deformation(dims: int, seed: int, bandwidth: int = 1, amplitude: float = 0.2) -> FourierScalar:
    """Seeded real trigonometric polynomial without constant term."""
    rng = np.random.default_rng(seed)
    terms = {}
    for m in iter_modes(dims, bandwidth):
        neg = tuple(-k for k in m)
        if not any(m) or neg in terms:
            continue
        c = amplitude * complex(*rng.standard_normal(2)) / 2
        terms[m] = c
        terms[neg] = c.conjugate()
    return FourierScalar(dims, terms)


@dataclass
class Trial:
    form: BasicForm
    other: BasicForm
    real_one_form: BasicForm
    function: BasicForm


def make_trial(model: FoliationModel, seed: int, index: int, bandwidth: int) -> Trial:
    base = [seed, index]

    def spec(k, **kw):
        return RandomFormSpec(seed=int(np.random.SeedSequence(base + [k]).generate_state(1)[0]), bandwidth=bandwidth, **kw)

    return Trial(
        form=random_form(model, spec(0)),
        other=random_form(model, spec(1)),
        real_one_form=random_form(model, spec(2, degree=1, real=True)),
        function=random_form(model, spec(3, degree=0, real=True)),
    )


# -- residual helpers ---------------------------------------------------------


def rel(lhs: BasicForm, rhs: BasicForm) -> float:
    return (lhs - rhs).norm() / max(1.0, lhs.norm(), rhs.norm())


def rel_scalar(x: complex, y: complex) -> float:
    return abs(x - y) / max(1.0, abs(x), abs(y))


def zero(a: BasicForm) -> float:
    return a.norm() / max(1.0, a.norm()) if a.terms else 0.0


def _comm(f, g):
    return lambda m, a: f(m, g(m, a)) - g(m, f(m, a))


def _op(kind):
    return lambda m, a: ops.apply(m, kind, a)


def _L(m, a):
    return ops.lefschetz_l(m, a)


def _Lam(m, a):
    return ops.lambda_dual(m, a)


def _J(m, a):
    return j_on_forms(a)


# -- identities ---------------------------------------------------------------


def i1(m, t):
    return zero(ops.d_basic(m, ops.d_basic(m, t.form)))


def i2(m, t):
    a = t.form
    return max(
        zero(ops.d_twisted(m, ops.d_twisted(m, a))),
        zero(ops.delta_basic(m, ops.delta_basic(m, a))),
        zero(ops.delta_twisted(m, ops.delta_twisted(m, a))),
    )


def i3(m, t):
    a, b = t.form, t.other
    return max(
        rel_scalar(m.inner(ops.d_basic(m, a), b), m.inner(a, ops.delta_basic(m, b))),
        rel_scalar(m.inner(ops.d_twisted(m, a), b), m.inner(a, ops.delta_twisted(m, b))),
    )


def i4(m, t):
    a = t.form
    return rel(ops.delta_basic(m, a), ops.delta_twisted(m, a) + ops.kappa_sharp(m, a))


def i5(m, t):
    return max(
        rel(ops.d_twisted(m, m.one()), -m.kappa),
        zero(ops.d_basic(m, m.kappa)),
        rel(ops.d_basic(m, t.form), ops.d_twisted(m, t.form) + wedge(m.kappa, t.form)),
    )


def i6(m, t):
    a = t.form
    lie = ops.kappa_sharp(m, ops.d_basic(m, a)) + ops.d_basic(m, ops.kappa_sharp(m, a))
    return rel(ops.laplace_basic(m, a), ops.laplace_twisted(m, a) + lie)


def i7(m, t):
    a, b, v = t.form, t.other, t.real_one_form
    vc = v * 1j + v  # complex 1-form
    out = [rel_scalar(m.inner(wedge(vc, a), b), m.inner(a, contract(conjugate(vc), b)))]
    nu = volume_form(m.n, m.dims)
    for j in range(2 * m.n + 1):
        aj, bj = degree_project(a, j), degree_project(b, j)
        out.append(rel(hodge_star(hodge_star(aj)), aj * ((-1) ** j)))
        out.append(rel(wedge(aj, hodge_star(conjugate(bj))), nu * pointwise_inner(aj, bj)))
    out.append(rel_scalar(m.inner(hodge_star(a), hodge_star(b)), m.inner(a, b)))
    return max(out)


def i8(m, t):
    a, b = t.form, t.other
    A = ops.counting
    out = [
        rel(_comm(_Lam, _L)(m, a), A(m, a)),
        rel(_comm(A, _Lam)(m, a), _Lam(m, a) * 2),
        rel(_comm(A, _L)(m, a), _L(m, a) * -2),
        rel_scalar(m.inner(_L(m, a), b), m.inner(a, _Lam(m, b))),
    ]
    for j in range(2 * m.n + 1):
        aj = degree_project(a, j)
        out.append(rel(_Lam(m, aj), hodge_star(_L(m, hodge_star(aj))) * ((-1) ** j)))
    return max(out)


def i9(m, t):
    a, v = t.form, t.real_one_form
    jv = j_on_forms(v)
    ins = lambda mm, x: contract(v, x)  # noqa: E731
    ext = lambda mm, x: wedge(v, x)  # noqa: E731
    return max(
        rel(_comm(_L, ins)(m, a), wedge(jv, a)),
        rel(_comm(_Lam, ext)(m, a), -contract(jv, a)),
        zero(_comm(_L, ext)(m, a)),
        zero(_comm(_Lam, ins)(m, a)),
        zero(_comm(_L, _J)(m, a)),
        zero(_comm(_Lam, _J)(m, a)),
    )


def i10(m, t):
    a, b = t.form, t.other
    frame = m.zero()
    for label in m.real_labels:
        th = m.real_generator(label)
        frame = frame + wedge(j_on_forms(th), contract(th, a))
    return max(
        rel(j_on_forms(a), frame),
        rel_scalar(m.inner(c_weil(a), c_weil(b)), m.inner(a, b)),
        rel_scalar(m.inner(c_weil(a), b), m.inner(a, c_weil(b, inverse=True))),
        rel(c_weil(c_weil(a), inverse=True), a),
    )


def i11(m, t):
    a = t.form
    de, db = ops.del_basic, ops.delbar_basic
    return max(
        rel(ops.d_basic(m, a), de(m, a) + db(m, a)),
        zero(de(m, de(m, a))),
        zero(db(m, db(m, a))),
        zero(de(m, db(m, a)) + db(m, de(m, a))),
        zero(ops.del_twisted(m, ops.del_twisted(m, a))),
        zero(ops.del_basic_adj(m, ops.del_basic_adj(m, a))),
    )


def i12(m, t):
    a, b = t.form, t.other
    return max(
        rel(ops.del_basic_adj(m, a), ops.del_twisted_adj(m, a) + ops.h10_contract(m, a)),
        rel(ops.delbar_basic_adj(m, a), ops.delbar_twisted_adj(m, a) + ops.h01_contract(m, a)),
        rel_scalar(m.inner(ops.del_basic(m, a), b), m.inner(a, ops.del_basic_adj(m, b))),
        rel_scalar(m.inner(ops.delbar_basic(m, a), b), m.inner(a, ops.delbar_basic_adj(m, b))),
    )


def i13(m, t):
    parts = mean_curvature_parts(m)
    eta = ops.del_basic(m, parts.kappa01)
    return max(
        zero(ops.del_basic(m, parts.kappa10)),
        zero(ops.delbar_basic(m, parts.kappa01)),
        zero(ops.del_twisted(m, parts.kappa10)),
        zero(real_part(eta)),
        zero(ops.delbar_basic(m, eta)),
    )


def i14(m, t):
    a = t.form
    anti10 = ops._anti(ops.del_basic, ops.h10_contract)
    anti01 = ops._anti(ops.delbar_basic, ops.h01_contract)
    return max(
        rel(ops.box_basic(m, a), ops.box_quasi(m, a) + anti10(m, a)),
        rel(ops.boxbar_basic(m, a), ops.boxbar_quasi(m, a) + anti01(m, a)),
    )


def i15(m, t):
    a, b, f = t.form, t.other, t.function
    dc = lambda x: ops.d_c_op(m, x)  # noqa: E731
    ra = real_part(a)
    return max(
        rel(dc(a), c_weil(ops.d_basic(m, c_weil(a)), inverse=True)),
        rel_scalar(m.inner(dc(a), b), m.inner(a, ops.d_c_op(m, b, adjoint=True))),
        rel(ops.d_basic(m, dc(f)), ops.ddbar(m, f) * 2j),
        zero(ops.d_basic(m, dc(a)) + dc(ops.d_basic(m, a))),
        rel(dc(ra), real_part(dc(ra))),
    )


def i16(m, t):
    a = t.form
    pairs = [
        (_L, _op("d_B")), (_Lam, _op("delta_B")), (_L, _op("del_B")), (_L, _op("delbar_B")),
        (_Lam, _op("del_B*")), (_Lam, _op("delbar_B*")), (_L, _J), (_Lam, _J),
    ]
    return max(zero(_comm(f, g)(m, a)) for f, g in pairs)


def i17(m, t):
    a = t.form
    return max(
        rel(_comm(_L, _op("del_B*"))(m, a), ops.delbar_twisted(m, a) * -1j),
        rel(_comm(_L, _op("delbar_B*"))(m, a), ops.del_twisted(m, a) * 1j),
        rel(_comm(_Lam, _op("del_B"))(m, a), ops.delbar_twisted_adj(m, a) * -1j),
        rel(_comm(_Lam, _op("delbar_B"))(m, a), ops.del_twisted_adj(m, a) * 1j),
    )


def i18(m, t):
    a = t.form
    k10 = mean_curvature_parts(m).kappa10
    rhs = wedge(ops.delbar_basic(m, k10), a) * 1j
    return max(
        rel(_comm(_op("Boxbar_B"), _L)(m, a), rhs),
        rel(_comm(_op("Box_B"), _L)(m, a), rhs),
    )


def i19(m, t):
    a, f = t.form, t.function
    anti01 = ops._anti(ops.del_basic, ops.h01_contract)
    anti10 = ops._anti(ops.delbar_basic, ops.h10_contract)
    rhs = ops.box_basic(m, a) + ops.boxbar_basic(m, a) + anti01(m, a) + anti10(m, a)
    lhs_f = ops.delta_twisted(m, ops.d_basic(m, f))
    return max(
        rel(ops.laplace_basic(m, a), rhs),
        rel(lhs_f, ops.del_twisted_adj(m, ops.del_basic(m, f)) * 2),
        rel(lhs_f, ops.delbar_twisted_adj(m, ops.delbar_basic(m, f)) * 2),
    )


def i20(m, t):
    a = t.form
    out = [rel(ops.laplace_basic(m, a), ops.box_basic(m, a) + ops.boxbar_basic(m, a))]
    for r in range(m.n + 1):
        for s in range(m.n + 1):
            ars = bidegree_project(a, r, s)
            lap = ops.laplace_basic(m, ars)
            out.append(zero(lap - bidegree_project(lap, r, s)))
    return max(out)


def i21(m, t):
    a = t.form
    return zero(ops.delta_basic(m, ops.d_c_op(m, a)) + ops.d_c_op(m, ops.delta_basic(m, a)))


def i22(m, t):
    return rel(ops.laplace_dc(m, t.form), ops.laplace_basic(m, t.form))


def i23(m, t):
    a = t.form
    lap = ops.laplace_basic(m, a)
    return max(rel(lap, ops.box_basic(m, a) * 2), rel(lap, ops.boxbar_basic(m, a) * 2))


# -- matrix checks --------------------------------------------------------------


def _mnorm(op) -> float:
    return op.max_column_norm()


def _mrel(a, b) -> float:
    scale = max(1.0, _mnorm(a), _mnorm(b))
    return _mnorm(a - b) / scale


def m1(m, K):
    d = assemble(m, "d_B", K, "all")
    return _mnorm(d @ d) / max(1.0, _mnorm(d))


def m3(m, K):
    d = assemble(m, "d_B", K, "all")
    return _mrel(assemble(m, "delta_B", K, "all"), galerkin_adjoint(m, d))


def m4(m, K):
    lhs = assemble(m, "delta_B", K, "all")
    return _mrel(lhs, assemble(m, "delta_T", K, "all") + assemble(m, "kappa_sharp", K, "all"))


def m8(m, K):
    return sl2_check(m, m.bandwidth).max_residual


def m22(m, K):
    return _mrel(laplacian(m, "Delta_dc", K, "all"), laplacian(m, "Delta_B", K, "all"))


def m23(m, K):
    lap = laplacian(m, "Delta_B", K, "all")
    return max(
        _mrel(lap, laplacian(m, "Box_B", K, "all").scaled(2)),
        _mrel(lap, laplacian(m, "Boxbar_B", K, "all").scaled(2)),
    )


@dataclass(frozen=True)
class Identity:
    id: str
    level: str
    title: str
    check: Callable[[FoliationModel, Trial], float]
    matrix: Callable[[FoliationModel, int], float] | None = None
    needs_integrable: bool = False


IDENTITIES: tuple[Identity, ...] = (
    Identity("I1", "Riemannian", "d_B^2 = 0", i1, m1),
    Identity("I2", "Riemannian", "d_T^2 = delta_B^2 = delta_T^2 = 0", i2),
    Identity("I3", "Riemannian", "delta_B, delta_T are the L2 adjoints of d_B, d_T", i3, m3),
    Identity("I4", "Riemannian", "delta_B = delta_T + kappa^# _|", i4, m4),
    Identity("I5", "Riemannian", "d_T(1) = -kappa_B, d_B kappa_B = 0, d_B = d_T + kappa_B ^", i5),
    Identity("I6", "Riemannian", "Delta_B = Delta_T + kappa^# _| d_B + d_B kappa^# _|", i6),
    Identity("I7", "Hermitian", "contraction adjointness, star^2 sign law, phi ^ star(conj psi) = <phi, psi> nu", i7),
    Identity("I8", "Hermitian", "[Lambda, L] = A, [A, Lambda] = 2 Lambda, [A, L] = -2 L, Lambda = L^* = (-1)^j star L star", i8, m8),
    Identity("I9", "Hermitian", "[L, X _|] = eps(J X^b), [Lambda, eps(X^b)] = -(JX) _|, [L, J] = [Lambda, J] = 0", i9),
    Identity("I10", "Hermitian", "J frame-sum rule, C unitary with C^* = C^-1", i10),
    Identity("I11", "Hermitian", "d_B = del_B + delbar_B and nilpotency of del, delbar, del_T, del_B^*", i11, needs_integrable=True),
    Identity("I12", "Hermitian", "del_B^* = del_T^* + H^{1,0} _| (and conjugate), adjointness", i12),
    Identity("I13", "Hermitian", "del_B kappa^{1,0} = delbar_B kappa^{0,1} = del_T kappa^{1,0} = 0, eta imaginary and delbar-closed", i13),
    Identity("I14", "Hermitian", "Box_B = Box_Q + {del_B, H^{1,0} _|} (and conjugate)", i14),
    Identity("I15", "Hermitian", "d_c = C^-1 d_B C, d_c^* adjoint, d_B d_c = 2i del delbar = -d_c d_B, d_c real", i15, needs_integrable=True),
    Identity("I16", "Kähler", "L, Lambda commute with d_B, delta_B, del, delbar, their adjoints and J", i16),
    Identity("I17", "Kähler", "[L, del_B^*] = -i delbar_T, [Lambda, del_B] = -i delbar_T^* (and conjugates)", i17),
    Identity("I18", "Kähler", "[Boxbar_B, L] = [Box_B, L] = i eps(delbar_B kappa^{1,0})", i18),
    Identity("I19", "Kähler", "Delta_B = Box + Boxbar + {del, H^{0,1} _|} + {delbar, H^{1,0} _|}; delta_T d f = 2 del_T^* del f", i19),
    Identity("I20", "Kähler+automorphic", "Delta_B = Box_B + Boxbar_B and Delta_B preserves bidegree", i20),
    Identity("I21", "taut", "{delta_B, d_c} = 0", i21),
    Identity("I22", "taut", "Delta_{d_c} = Delta_B", i22, m22),
    Identity("I23", "taut", "Delta_B = 2 Box_B = 2 Boxbar_B", i23, m23),
)

BY_ID = {ident.id: ident for ident in IDENTITIES}


# -- suite ----------------------------------------------------------------------


@dataclass
class IdentityEntry:
    id: str
    level: str
    title: str
    applicable: bool
    residual: float | None
    matrix_residual: float | None
    passed: bool
    skip_reason: str | None = None


@dataclass
class IdentitySuiteResult:
    model: str
    K: int
    seed: int
    trials: int
    threshold: float
    entries: list[IdentityEntry] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(e.passed for e in self.entries if e.applicable)

    @property
    def failures(self) -> list[str]:
        return [e.id for e in self.entries if e.applicable and not e.passed]

    def entry(self, ident: str) -> IdentityEntry:
        for e in self.entries:
            if e.id == ident:
                return e
        raise KeyError(ident)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["all_pass"] = self.all_pass
        return out


def select_identities(suite: str | Sequence[str] = "all") -> list[Identity]:
    """``all``, a level name (that level and every weaker one), or identity ids."""
    if isinstance(suite, str):
        key = suite.strip()
        if key.lower() == "all":
            return list(IDENTITIES)
        level = LEVEL_ALIASES.get(key.lower())
        if level is not None:
            top = LEVELS.index(level)
            return [i for i in IDENTITIES if LEVELS.index(i.level) <= top]
        suite = [s.strip() for s in key.split(",") if s.strip()]
    unknown = [s for s in suite if s not in BY_ID]
    if unknown:
        raise ValueError(
            f"unknown suite entries {unknown}; use all, one of {', '.join(LEVEL_ALIASES)}, or ids I1..I23"
        )
    return sorted((BY_ID[s] for s in suite), key=lambda i: int(i.id[1:]))


def _gates(model: FoliationModel, K: int, need_automorphy: bool) -> dict[str, str | None]:
    """Reason each level is unavailable on ``model`` (None when it applies)."""
    gates: dict[str, str | None] = {"Riemannian": None}
    gates["Hermitian"] = None if model.hermitian else "no transverse Hermitian structure"
    gates["Kähler"] = gates["Hermitian"] or (None if model.kahler else "model is not transversely Kähler")
    if gates["Kähler"] is None and need_automorphy:
        auto = automorphic_test(model)
        gates["Kähler+automorphic"] = (
            None if auto.automorphic
            else f"mean curvature is not automorphic ([L_kappa, J] residual {auto.residual_lie:.3e})"
        )
    else:
        gates["Kähler+automorphic"] = gates["Kähler"]
    gates["taut"] = gates["Kähler"] or (None if model.taut_candidate else "kappa_B is not zero")
    return gates


def run_identities(
    model: FoliationModel,
    suite: str | Sequence[str] = "all",
    K: int = 4,
    seed: int = 0,
    trials: int = 20,
    *,
    bandwidth: int | None = None,
    threshold: float = DEFAULTS.identity_tol,
    matrix_checks: bool = True,
) -> IdentitySuiteResult:
    """Evaluate the selected identities; the result is deterministic in (model, K, seed, trials)."""
    chosen = select_identities(suite)
    bw = min(K, 1) if bandwidth is None else bandwidth
    bw = max(bw, 0)
    need_auto = any(i.level == "Kähler+automorphic" for i in chosen)
    gates = _gates(model, K, need_auto)
    trial_forms = [make_trial(model, seed, t, bw) for t in range(trials)]

    def evaluate(ident: Identity) -> IdentityEntry:
        reason = gates[ident.level]
        if reason is None and ident.needs_integrable and not model.integrable:
            reason = "transverse J is not integrable"
        residual = max((ident.check(model, t) for t in trial_forms), default=0.0)
        mres = None
        if matrix_checks and ident.matrix is not None and reason is None:
            mres = ident.matrix(model, K)
            residual = max(residual, mres)
        applicable = reason is None
        return IdentityEntry(
            ident.id, ident.level, ident.title, applicable, float(residual),
            None if mres is None else float(mres),
            applicable and residual <= threshold, reason,
        )

    needs_hermitian = [i for i in chosen if i.level != "Riemannian"]
    runnable = [i for i in chosen if not (i in needs_hermitian and not model.hermitian)]
    workers = worker_count()
    if workers > 1 and len(runnable) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(evaluate, runnable))
    else:
        done = [evaluate(i) for i in runnable]
    for ident in chosen:
        if ident not in runnable:
            done.append(IdentityEntry(ident.id, ident.level, ident.title, False, None, None, False,
                                      gates[ident.level]))
    done.sort(key=lambda e: int(e.id[1:]))
    return IdentitySuiteResult(model.name, K, seed, trials, threshold, done)


__all__ = [
    "IDENTITIES",
    "LEVELS",
    "Identity",
    "IdentityEntry",
    "IdentitySuiteResult",
    "RandomFormSpec",
    "Trial",
    "make_trial",
    "random_deformation",
    "random_form",
    "run_identities",
    "select_identities",
]

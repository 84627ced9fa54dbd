"""Riemannian foliations with transverse almost-Hermitian structure.

A model fixes an ordered real orthonormal transverse coframe split into pairs
``(theta^a, J theta^a)``, the exterior derivative of each coframe element, the
basic coordinates with their differentials, and the mean curvature form.
Everything is converted once into the unitary complex coframe of
``foliage.exterior``.

Built-in examples come from suspensions of hyperbolic toral automorphisms
(the Carriere flow and its products) plus a flat taut torus.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .exterior import (
    SQRT2,
    BasicForm,
    bidegree_project,
    conjugate,
    inner_product,
    is_real,
    remove_generator,
    wedge,
    word,
)
from .fourier import FourierScalar, weight_coefficients

STRUCTURE_TOL = 1e-12

BUILTIN_MODELS = ("carriere", "product_j1", "product_j2", "taut_torus")


class ModelError(ValueError):
    """Inconsistent or unsupported model data."""


@dataclass(frozen=True)
class MeanCurvatureParts:
    kappa: BasicForm
    kappa10: BasicForm
    kappa01: BasicForm
    # 1-forms whose metric duals are the fields H^{1,0} and H^{0,1}
    h10: BasicForm
    h01: BasicForm


@dataclass(frozen=True, eq=False)
class FoliationModel:
    name: str
    n: int
    coords: tuple[str, ...]
    pairs: tuple[tuple[str, str], ...]
    coord_forms: tuple[BasicForm, ...]
    dgen: Mapping[int, BasicForm]
    kappa: BasicForm
    log_density: FourierScalar
    params: Mapping[str, object] = field(default_factory=dict)
    flags: Mapping[str, bool] = field(default_factory=dict)
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def dims(self) -> int:
        return len(self.coords)

    @property
    def real_labels(self) -> tuple[str, ...]:
        return tuple(lab for pair in self.pairs for lab in pair)

    @property
    def weighted(self) -> bool:
        return bool(self.log_density.terms)

    @property
    def bandwidth(self) -> int:
        """Largest Fourier mode appearing in the structure or the weight."""
        bw = max((f.bandwidth for f in self.dgen.values()), default=0)
        bw = max(bw, self.kappa.bandwidth, self.log_density.bandwidth)
        return bw

    @property
    def hermitian(self) -> bool:
        return self.flags.get("hermitian", False)

    @property
    def integrable(self) -> bool:
        return self.flags.get("integrable", False)

    @property
    def kahler(self) -> bool:
        return self.flags.get("kahler", False)

    @property
    def taut_candidate(self) -> bool:
        return self.flags.get("taut_candidate", False)

    def j_action(self) -> dict[str, tuple[int, str]]:
        """Signed permutation of the real coframe: ``J theta = J theta``, ``J(J theta) = -theta``."""
        table = {}
        for th, jth in self.pairs:
            table[th] = (1, jth)
            table[jth] = (-1, th)
        return table

    def zero(self) -> BasicForm:
        return BasicForm.zero(self.n, self.dims)

    def one(self) -> BasicForm:
        return BasicForm.scalar(self.n, FourierScalar.constant(self.dims, 1.0))

    def scalar(self, f: FourierScalar) -> BasicForm:
        return BasicForm.scalar(self.n, f)

    def weight(self, radius: int) -> dict | None:
        """Fourier coefficients of the measure density ``exp(-f)`` up to ``radius``."""
        if not self.weighted:
            return None
        key = ("weight", radius)
        if key not in self.cache:
            self.cache[key] = weight_coefficients(self.log_density, radius)
        return self.cache[key]

    def inner(self, a: BasicForm, b: BasicForm) -> complex:
        radius = a.bandwidth + b.bandwidth
        return inner_product(a, b, self.weight(radius))

    def norm(self, a: BasicForm) -> float:
        return math.sqrt(max(self.inner(a, a).real, 0.0))

    def real_form(self, coeffs: Mapping[Sequence[str] | str, complex | FourierScalar]) -> BasicForm:
        """Build a form from real-coframe monomials, e.g. ``{("T*", "S*"): 1.0}``."""
        out = self.zero()
        for labels, c in coeffs.items():
            if isinstance(labels, str):
                labels = (labels,)
            piece = self.one()
            for lab in labels:
                piece = wedge(piece, self.real_generator(lab))
            if not isinstance(c, FourierScalar):
                c = FourierScalar.constant(self.dims, c)
            out = out + piece * c
        return out

    def real_generator(self, label: str) -> BasicForm:
        for a, (th, jth) in enumerate(self.pairs, start=1):
            w = BasicForm.generator(self.n, self.dims, a)
            wb = BasicForm.generator(self.n, self.dims, a, bar=True)
            if label == th:
                return (w + wb) * (1 / SQRT2)
            if label == jth:
                return (w - wb) * (-1j / SQRT2)
        raise KeyError(f"{label!r} is not a coframe label of {self.name}; have {self.real_labels}")

    def to_real(self, a: BasicForm, tol: float = 0.0) -> dict[tuple[str, ...], FourierScalar]:
        """Expand a form in real coframe monomials (labels in coframe order)."""
        labels = self.real_labels
        out: dict[tuple[int, ...], FourierScalar] = {}
        for w, f in a.terms.items():
            expansion = {(): 1.0 + 0j}
            for g in w.gens:
                if g <= self.n:
                    a_idx, factors = g, ((0, 1 / SQRT2), (1, 1j / SQRT2))
                else:
                    a_idx, factors = g - self.n, ((0, 1 / SQRT2), (1, -1j / SQRT2))
                nxt: dict[tuple[int, ...], complex] = {}
                for mono, c in expansion.items():
                    for off, fc in factors:
                        r = 2 * (a_idx - 1) + off
                        if r in mono:
                            continue
                        sign = -1 if sum(1 for x in mono if x > r) % 2 else 1
                        key = tuple(sorted(mono + (r,)))
                        nxt[key] = nxt.get(key, 0) + sign * c * fc
                expansion = nxt
            for mono, c in expansion.items():
                if c != 0:
                    out[mono] = out.get(mono, FourierScalar.zero(self.dims)) + f.scale(c)
        result = {}
        for mono, f in sorted(out.items()):
            f = f.prune(tol)
            if f.terms:
                result[tuple(labels[i] for i in mono)] = f
        return result

    def kahler_form(self) -> BasicForm:
        """``sum_a J theta^a ^ theta^a``, i.e. ``-i sum_a w^a ^ wbar^a``."""
        out = self.zero()
        for a in range(1, self.n + 1):
            out = out + BasicForm.monomial(word(self.n, (a,), (a,)), self.dims, -1j)
        return out

    def describe(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "coords": list(self.coords),
            "coframe_pairs": [list(p) for p in self.pairs],
            "flags": dict(self.flags),
            "params": {k: v for k, v in self.params.items()},
            "deformed": self.weighted,
        }


# -- construction -----------------------------------------------------------


def _structure_from_real(n, dims, pairs, d_real, real_gen):
    """Translate ``d(theta)`` given on the real coframe into ``d`` of each complex generator."""
    dreal = {}
    for lab in (l for p in pairs for l in p):
        out = BasicForm.zero(n, dims)
        for (c, la, lb) in d_real.get(lab, ()):
            if not isinstance(c, FourierScalar):
                c = FourierScalar.constant(dims, c)
            out = out + wedge(real_gen(la), real_gen(lb)) * c
        dreal[lab] = out
    dgen = {}
    for a, (th, jth) in enumerate(pairs, start=1):
        dw = (dreal[th] + dreal[jth] * 1j) * (1 / SQRT2)
        dgen[a] = dw
        dgen[n + a] = conjugate(dw)
    return dgen


def _d_generic(n, dims, dgen, coord_forms, a: BasicForm) -> BasicForm:
    # minimal d used only for validation before the operator layer exists
    out = BasicForm.zero(n, dims)
    for w, f in a.terms.items():
        mono = BasicForm.monomial(w, dims)
        for j, du in enumerate(coord_forms):
            df = f.differentiate(j)
            if df.terms:
                out = out + wedge(du, mono) * df
        for g in w.gens:
            sign, rest = remove_generator(w, g)
            piece = wedge(dgen[g], BasicForm.monomial(rest, dims))
            out = out + piece * (f if sign > 0 else -f)
    return out


def _assemble(name, pairs, coords, coord_real, d_real, kappa_real, params, log_density=None):
    n = len(pairs)
    dims = len(coords)
    # temporary generator lookup through a skeleton model
    skeleton = FoliationModel(
        name=name, n=n, coords=tuple(coords), pairs=tuple(tuple(p) for p in pairs),
        coord_forms=(), dgen={}, kappa=BasicForm.zero(n, dims),
        log_density=FourierScalar.zero(dims),
    )
    labels = skeleton.real_labels
    if len(set(labels)) != len(labels):
        raise ModelError(f"coframe labels must be distinct: {labels}")
    dgen = _structure_from_real(n, dims, pairs, d_real, skeleton.real_generator)
    coord_forms = tuple(skeleton.real_form(coord_real[c]) for c in coords)
    kappa = skeleton.real_form(kappa_real) if kappa_real else BasicForm.zero(n, dims)
    model = FoliationModel(
        name=name, n=n, coords=tuple(coords), pairs=tuple(tuple(p) for p in pairs),
        coord_forms=coord_forms, dgen=dgen, kappa=kappa,
        log_density=log_density if log_density is not None else FourierScalar.zero(dims),
        params=dict(params),
    )
    validate(model)
    return replace(model, flags=compute_flags(model), cache={})


def validate(model: FoliationModel) -> None:
    """Raise ``ModelError`` naming each violated structural condition."""
    problems = []
    n, dims = model.n, model.dims
    d = lambda a: _d_generic(n, dims, model.dgen, model.coord_forms, a)  # noqa: E731
    table = model.j_action()
    for lab in model.real_labels:
        s1, l1 = table[lab]
        s2, l2 = table[l1]
        if l2 != lab or s1 * s2 != -1:
            problems.append(f"J does not square to -1 on {lab}")
    for g, dg in model.dgen.items():
        if dg.degrees() - {2}:
            problems.append(f"d of generator {g} is not a 2-form")
        if not d(dg).is_zero(STRUCTURE_TOL):
            problems.append(f"d^2 does not vanish on generator {g}")
    for j, du in enumerate(model.coord_forms):
        if du.degrees() - {1} or not is_real(du):
            problems.append(f"d{model.coords[j]} must be a real 1-form")
        if not d(du).is_zero(STRUCTURE_TOL):
            problems.append(f"d{model.coords[j]} is not closed")
    if not is_real(model.kappa, STRUCTURE_TOL):
        problems.append("mean curvature form is not real")
    if model.kappa.terms and model.kappa.degrees() != {1}:
        problems.append("mean curvature must be a 1-form")
    if not d(model.kappa).is_zero(1e-10):
        problems.append("mean curvature form is not closed")
    if not model.log_density.is_real(1e-14):
        problems.append("leaf log-density must be real")
    if problems:
        raise ModelError(f"model {model.name!r} is invalid: " + "; ".join(problems))


def compute_flags(model: FoliationModel) -> dict[str, bool]:
    n = model.n
    integrable = all(
        bidegree_project(model.dgen[a], 0, 2).is_zero(STRUCTURE_TOL) for a in range(1, n + 1)
    )
    d = lambda a: _d_generic(n, model.dims, model.dgen, model.coord_forms, a)  # noqa: E731
    kahler = integrable and d(model.kahler_form()).is_zero(STRUCTURE_TOL)
    return {
        "hermitian": True,
        "integrable": integrable,
        "kahler": kahler,
        "taut_candidate": model.kappa.is_zero(STRUCTURE_TOL),
    }


def hyperbolic_eigenvalue(A: Sequence[int]) -> float:
    """Expanding eigenvalue of a hyperbolic SL(2, Z) matrix given row-major."""
    problems = []
    if len(A) != 4:
        raise ModelError("A must have four entries (row-major 2x2)")
    if any(not float(x).is_integer() for x in A):
        problems.append("entries must be integers")
    a, b, c, d = (int(round(x)) for x in A)
    if a * d - b * c != 1:
        problems.append(f"determinant is {a * d - b * c}, expected 1")
    if a + d <= 2:
        problems.append(f"trace is {a + d}, expected > 2")
    if problems:
        raise ModelError("A is not a hyperbolic SL(2,Z) matrix: " + "; ".join(problems))
    eig = np.linalg.eigvals(np.array([[a, b], [c, d]], dtype=float))
    return float(np.max(eig.real))


def _carriere(A, log_density=None):
    lam = hyperbolic_eigenvalue(A)
    ll = math.log(lam)
    return _assemble(
        "carriere",
        pairs=[("S*", "T*")],
        coords=["t"],
        coord_real={"t": {"T*": 1.0}},
        d_real={"S*": [(ll, "T*", "S*")]},
        kappa_real={"T*": ll},
        params={"A": list(A), "lambda": lam, "log_lambda": ll},
        log_density=log_density,
    )


def _product(name, pairs, A, log_density=None):
    lam = hyperbolic_eigenvalue(A)
    ll = math.log(lam)
    return _assemble(
        name,
        pairs=pairs,
        coords=["t1", "t2"],
        coord_real={"t1": {"T1*": 1.0}, "t2": {"T2*": 1.0}},
        d_real={"S1*": [(ll, "T1*", "S1*")], "S2*": [(ll, "T2*", "S2*")]},
        kappa_real={"T1*": ll, "T2*": ll},
        params={"A": list(A), "lambda": lam, "log_lambda": ll},
        log_density=log_density,
    )


def _taut_torus(log_density=None):
    return _assemble(
        "taut_torus",
        pairs=[("dx", "dy")],
        coords=["x", "y"],
        coord_real={"x": {"dx": 1.0}, "y": {"dy": 1.0}},
        d_real={},
        kappa_real={},
        params={},
        log_density=log_density,
    )


DEFAULT_A = (2, 1, 1, 1)


def build_model(name: str, params: Mapping | None = None) -> FoliationModel:
    """Construct a built-in model; ``params`` may carry ``A`` and a deformation ``f``."""
    params = dict(params or {})
    A = params.pop("A", DEFAULT_A)
    f = params.pop("f", None)
    if params:
        raise ModelError(f"unknown model parameters: {sorted(params)}")
    if name == "carriere":
        model = _carriere(A)
    elif name == "product_j1":
        model = _product(name, [("S1*", "T1*"), ("S2*", "T2*")], A)
    elif name == "product_j2":
        model = _product(name, [("S1*", "S2*"), ("T1*", "T2*")], A)
    elif name == "taut_torus":
        model = _taut_torus()
    else:
        raise ModelError(f"unknown model {name!r}; choose one of {', '.join(BUILTIN_MODELS)}")
    if f is not None:
        model = deform_leafwise(model, f)
    return model


def mean_curvature_parts(model: FoliationModel) -> MeanCurvatureParts:
    key = "mean_curvature_parts"
    if key not in model.cache:
        k10 = bidegree_project(model.kappa, 1, 0)
        k01 = bidegree_project(model.kappa, 0, 1)
        model.cache[key] = MeanCurvatureParts(model.kappa, k10, k01, h10=k01, h01=k10)
    return model.cache[key]


def basic_differential(model: FoliationModel, f: FourierScalar) -> BasicForm:
    out = model.zero()
    for j, du in enumerate(model.coord_forms):
        out = out + du * f.differentiate(j)
    return out


def deform_leafwise(model: FoliationModel, f: FourierScalar) -> FoliationModel:
    """Leafwise conformal change of the characteristic form by ``exp(-f)``.

    The transverse structure is untouched; the mean curvature shifts by ``d f``
    and the L2 measure picks up the density ``exp(-f)``.
    """
    if f.dims != model.dims:
        raise ModelError(f"deformation has {f.dims} coordinates, model has {model.dims}")
    if not f.is_real(1e-14):
        raise ModelError("deformation function must be real")
    f = f - f.coefficient((0,) * f.dims)  # constants only rescale the measure
    new = replace(
        model,
        name=model.name if model.name.endswith("+deformed") else model.name + "+deformed",
        kappa=model.kappa + basic_differential(model, f),
        log_density=model.log_density + f,
        params={**model.params, "deformation": scalar_to_triples(model.log_density + f)},
        cache={},
    )
    validate(new)
    return replace(new, flags=compute_flags(new), cache={})


# -- config files -------------------------------------------------------------


def scalar_to_triples(f: FourierScalar) -> list:
    return [[list(m), c.real, c.imag] for m, c in sorted(f.terms.items())]


def scalar_from_triples(dims: int, triples) -> FourierScalar:
    terms = {}
    for item in triples:
        if len(item) != 3:
            raise ModelError(f"deformation entries are [mode, re, im], got {item!r}")
        m, re_, im_ = item
        m = (m,) if isinstance(m, int) else tuple(m)
        if len(m) != dims:
            raise ModelError(f"mode {list(m)} needs {dims} entries")
        terms[m] = terms.get(m, 0) + complex(re_, im_)
    return FourierScalar(dims, terms)


def parse_deformation(spec: str, dims: int) -> FourierScalar:
    """Parse ``"m1,m2:re:im;..."`` or a path to a JSON list of ``[mode, re, im]``.

    In the inline form a term whose mirror mode ``-m`` is not listed gets the
    conjugate coefficient there, so ``"1:0.5"`` means ``cos(2 pi u)``.
    """
    p = Path(spec)
    if p.suffix == ".json" or p.is_file():
        try:
            return scalar_from_triples(dims, json.loads(p.read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ModelError(f"cannot read deformation file {spec}: {exc}") from exc
    triples = []
    for chunk in filter(None, (c.strip() for c in spec.split(";"))):
        parts = chunk.split(":")
        if len(parts) not in (2, 3):
            raise ModelError(f"bad deformation term {chunk!r}; expected mode:re[:im]")
        try:
            mode = [int(x) for x in parts[0].split(",")]
            re_ = float(parts[1])
            im_ = float(parts[2]) if len(parts) == 3 else 0.0
        except ValueError as exc:
            raise ModelError(f"bad deformation term {chunk!r}: {exc}") from exc
        triples.append([mode, re_, im_])
    listed = {tuple(t[0]) for t in triples}
    mirrors = [[[-k for k in m], re_, -im_] for m, re_, im_ in triples
               if any(m) and tuple(-k for k in m) not in listed]
    return scalar_from_triples(dims, triples + mirrors)


def load_model_config(path: str | Path) -> FoliationModel:
    """Read a JSON model description ``{"name", "A", "f"}``."""
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"cannot read model config {path}: {exc}") from exc
    if not isinstance(cfg, dict) or "name" not in cfg:
        raise ModelError("model config must be an object with a 'name' field")
    unknown = set(cfg) - {"name", "A", "f"}
    if unknown:
        raise ModelError(f"unknown config keys: {sorted(unknown)}")
    params = {}
    if "A" in cfg:
        params["A"] = cfg["A"]
    model = build_model(cfg["name"], params)
    if cfg.get("f"):
        model = deform_leafwise(model, scalar_from_triples(model.dims, cfg["f"]))
    return model


def resolve_model(spec: str) -> FoliationModel:
    """A built-in name or a path to a JSON config."""
    if spec in BUILTIN_MODELS:
        return build_model(spec)
    p = Path(spec)
    if p.suffix == ".json" or p.is_file():
        return load_model_config(p)
    raise ModelError(f"unknown model {spec!r}; choose one of {', '.join(BUILTIN_MODELS)} or a JSON config")


def iter_modes(dims: int, K: int):
    return product(range(-K, K + 1), repeat=dims)


__all__ = [
    "BUILTIN_MODELS",
    "FoliationModel",
    "MeanCurvatureParts",
    "ModelError",
    "build_model",
    "deform_leafwise",
    "load_model_config",
    "mean_curvature_parts",
    "parse_deformation",
    "resolve_model",
]

"""Transverse exterior algebra in a unitary complex coframe.

Generators are ``w^a`` (holomorphic) and ``wbar^a`` for ``a = 1..n``.  They are
built from a real orthonormal coframe ``theta^a, J theta^a`` by
``w^a = (theta^a + i J theta^a)/sqrt(2)``, which makes every canonical word a
unit vector and distinct words orthogonal.  A word is stored in canonical
order: all holomorphic factors first, each group ascending.

Throughout, ``contract(v, a)`` contracts ``a`` with the metric dual of ``v``
taken through the complex-bilinear extension of the metric.  So contracting
with ``wbar^a`` removes a ``w^a`` factor, and ``contract(v, .)`` is the
pointwise adjoint of ``wedge(conj(v), .)``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple

from .fourier import FourierScalar

SQRT2 = math.sqrt(2.0)


class CoframeWord(NamedTuple):
    n: int
    holo: tuple[int, ...]
    anti: tuple[int, ...]

    @property
    def bidegree(self) -> tuple[int, int]:
        return (len(self.holo), len(self.anti))

    @property
    def degree(self) -> int:
        return len(self.holo) + len(self.anti)

    @property
    def gens(self) -> tuple[int, ...]:
        """Generator positions: ``w^a -> a`` and ``wbar^a -> n + a``."""
        return self.holo + tuple(self.n + a for a in self.anti)

    def label(self) -> str:
        if not self.holo and not self.anti:
            return "1"
        return "^".join([f"w{a}" for a in self.holo] + [f"wb{a}" for a in self.anti])


def word(n: int, holo: Iterable[int] = (), anti: Iterable[int] = ()) -> CoframeWord:
    holo, anti = tuple(holo), tuple(anti)
    for part in (holo, anti):
        if any(not 1 <= a <= n for a in part):
            raise ValueError(f"index out of range 1..{n}: {part}")
        if len(set(part)) != len(part):
            raise ValueError(f"repeated generator in {part}")
    return CoframeWord(n, tuple(sorted(holo)), tuple(sorted(anti)))


def word_from_gens(n: int, gens: Iterable[int]) -> CoframeWord:
    gens = sorted(gens)
    return CoframeWord(n, tuple(g for g in gens if g <= n), tuple(g - n for g in gens if g > n))


@lru_cache(maxsize=None)
def all_words(n: int) -> tuple[CoframeWord, ...]:
    """Every canonical word, ordered by degree then bidegree then lexicographically."""
    out = []
    for deg in range(2 * n + 1):
        for r in range(max(0, deg - n), min(n, deg) + 1):
            out.extend(words_of_bidegree(n, r, deg - r))
    return tuple(out)


@lru_cache(maxsize=None)
def words_of_bidegree(n: int, r: int, s: int) -> tuple[CoframeWord, ...]:
    if not (0 <= r <= n and 0 <= s <= n):
        return ()
    idx = range(1, n + 1)
    return tuple(CoframeWord(n, h, a) for h in combinations(idx, r) for a in combinations(idx, s))


def words_of_degree(n: int, degree: int) -> tuple[CoframeWord, ...]:
    return tuple(w for w in all_words(n) if w.degree == degree)


@lru_cache(maxsize=None)
def wedge_words(w1: CoframeWord, w2: CoframeWord) -> tuple[int, CoframeWord | None]:
    """Return ``(sign, word)`` with ``w1 ^ w2 = sign * word`` (sign 0 if it vanishes)."""
    g1, g2 = w1.gens, w2.gens
    if set(g1) & set(g2):
        return 0, None
    inversions = sum(1 for x in g1 for y in g2 if x > y)
    return (-1 if inversions % 2 else 1), word_from_gens(w1.n, g1 + g2)


@lru_cache(maxsize=None)
def remove_generator(w: CoframeWord, g: int) -> tuple[int, CoframeWord | None]:
    """Interior removal of generator position ``g`` from the front: ``(sign, rest)``."""
    gens = w.gens
    if g not in gens:
        return 0, None
    pos = gens.index(g)
    return (-1 if pos % 2 else 1), word_from_gens(w.n, gens[:pos] + gens[pos + 1:])


@lru_cache(maxsize=None)
def conjugate_word(w: CoframeWord) -> tuple[int, CoframeWord]:
    """``conj(w^H ^ wbar^A) = sign * (w^A ^ wbar^H)``."""
    sign = -1 if (len(w.holo) * len(w.anti)) % 2 else 1
    return sign, CoframeWord(w.n, w.anti, w.holo)


class BasicForm:
    """A basic form: a finite sum of Fourier-coefficient fields times words."""

    __slots__ = ("n", "dims", "terms")

    def __init__(self, n: int, dims: int, terms: dict[CoframeWord, FourierScalar] | None = None):
        self.n = n
        self.dims = dims
        self.terms: dict[CoframeWord, FourierScalar] = {}
        for w, f in (terms or {}).items():
            if w.n != n:
                raise ValueError(f"word {w} lives in rank {w.n}, expected {n}")
            if f.dims != dims:
                raise ValueError("coefficient dimension mismatch")
            if f.terms:
                self.terms[w] = f

    @classmethod
    def zero(cls, n: int, dims: int) -> "BasicForm":
        return cls(n, dims)

    @classmethod
    def scalar(cls, n: int, f: FourierScalar) -> "BasicForm":
        return cls(n, f.dims, {CoframeWord(n, (), ()): f})

    @classmethod
    def monomial(cls, w: CoframeWord, dims: int, coeff: complex | FourierScalar = 1.0) -> "BasicForm":
        if not isinstance(coeff, FourierScalar):
            coeff = FourierScalar.constant(dims, coeff)
        return cls(w.n, dims, {w: coeff})

    @classmethod
    def generator(cls, n: int, dims: int, a: int, bar: bool = False) -> "BasicForm":
        w = word(n, (), (a,)) if bar else word(n, (a,), ())
        return cls.monomial(w, dims)

    # -- inspection -------------------------------------------------------

    def degrees(self) -> set[int]:
        return {w.degree for w in self.terms}

    def bidegrees(self) -> set[tuple[int, int]]:
        return {w.bidegree for w in self.terms}

    @property
    def bandwidth(self) -> int:
        return max((f.bandwidth for f in self.terms.values()), default=0)

    def coefficient(self, w: CoframeWord) -> FourierScalar:
        return self.terms.get(w, FourierScalar.zero(self.dims))

    def norm(self) -> float:
        """Unweighted L2 norm: words and modes are orthonormal."""
        return math.sqrt(sum(f.norm() ** 2 for f in self.terms.values()))

    def max_abs_coefficient(self) -> float:
        return max((f.max_abs_coefficient() for f in self.terms.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(f.is_zero(tol) for f in self.terms.values())

    def entries(self) -> Iterator[tuple[CoframeWord, tuple[int, ...], complex]]:
        for w, f in self.terms.items():
            for m, c in f.terms.items():
                yield w, m, c

    # -- linear structure -------------------------------------------------

    def _check(self, other: "BasicForm") -> None:
        if other.n != self.n or other.dims != self.dims:
            raise ValueError("forms live in different algebras")

    def __add__(self, other):
        if not isinstance(other, BasicForm):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for w, f in other.terms.items():
            g = out.get(w)
            s = f if g is None else g + f
            if s.terms:
                out[w] = s
            else:
                out.pop(w, None)
        return _raw_form(self.n, self.dims, out)

    def __neg__(self):
        return _raw_form(self.n, self.dims, {w: -f for w, f in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, BasicForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        """Multiply by a constant or a basic function."""
        if isinstance(other, FourierScalar):
            out = {}
            for w, f in self.terms.items():
                g = f * other
                if g.terms:
                    out[w] = g
            return _raw_form(self.n, self.dims, out)
        if isinstance(other, (int, float, complex)):
            if other == 0:
                return BasicForm.zero(self.n, self.dims)
            return _raw_form(self.n, self.dims, {w: f.scale(other) for w, f in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BasicForm):
            return NotImplemented
        return self.n == other.n and self.dims == other.dims and self.terms == other.terms

    __hash__ = None

    def allclose(self, other: "BasicForm", atol: float = 1e-12) -> bool:
        return (self - other).is_zero(atol)

    def prune(self, tol: float) -> "BasicForm":
        out = {}
        for w, f in self.terms.items():
            g = f.prune(tol)
            if g.terms:
                out[w] = g
        return _raw_form(self.n, self.dims, out)

    def conjugate(self) -> "BasicForm":
        return conjugate(self)

    def __repr__(self) -> str:
        if not self.terms:
            return "BasicForm(0)"
        return "BasicForm(" + " + ".join(f"{f!r}*{w.label()}" for w, f in sorted(self.terms.items())) + ")"


def _raw_form(n: int, dims: int, terms: dict) -> BasicForm:
    obj = object.__new__(BasicForm)
    obj.n, obj.dims, obj.terms = n, dims, terms
    return obj


def _accumulate(out: dict, w: CoframeWord, f: FourierScalar) -> None:
    g = out.get(w)
    s = f if g is None else g + f
    if s.terms:
        out[w] = s
    else:
        out.pop(w, None)


def wedge(a: BasicForm, b: BasicForm) -> BasicForm:
    a._check(b)
    out: dict = {}
    for w1, f1 in a.terms.items():
        for w2, f2 in b.terms.items():
            sign, w = wedge_words(w1, w2)
            if sign:
                prod = f1 * f2
                _accumulate(out, w, prod if sign > 0 else -prod)
    return _raw_form(a.n, a.dims, out)


def _dual_position(n: int, g: int) -> int:
    # w^a pairs with wbar^a under the complex-bilinear metric
    return g + n if g <= n else g - n


def contract(v: BasicForm, a: BasicForm) -> BasicForm:
    """Contraction of ``a`` by the metric dual of the pure 1-form ``v``."""
    v._check(a)
    if v.terms and v.degrees() != {1}:
        raise ValueError("contraction field must be a pure 1-form")
    out: dict = {}
    for wv, fv in v.terms.items():
        target = _dual_position(v.n, wv.gens[0])
        for w, f in a.terms.items():
            sign, rest = remove_generator(w, target)
            if sign:
                prod = fv * f
                _accumulate(out, rest, prod if sign > 0 else -prod)
    return _raw_form(a.n, a.dims, out)


def interior(beta: BasicForm, a: BasicForm) -> BasicForm:
    """Contraction by a higher-degree form.

    Follows the ordering ``(b1 ^ b2 ^ ... ^ bk) _| = bk _| ... b1 _|`` so that
    contraction by a decomposable form applies its first factor first.
    """
    beta._check(a)
    out = BasicForm.zero(a.n, a.dims)
    for wb, fb in beta.terms.items():
        piece = a * fb
        for g in wb.gens:
            gen = BasicForm.monomial(word_from_gens(a.n, (g,)), a.dims)
            piece = contract(gen, piece)
        out = out + piece
    return out


def degree_project(a: BasicForm, degree: int) -> BasicForm:
    return _raw_form(a.n, a.dims, {w: f for w, f in a.terms.items() if w.degree == degree})


def bidegree_project(a: BasicForm, r: int, s: int) -> BasicForm:
    return _raw_form(a.n, a.dims, {w: f for w, f in a.terms.items() if w.bidegree == (r, s)})


def conjugate(a: BasicForm) -> BasicForm:
    out = {}
    for w, f in a.terms.items():
        sign, cw = conjugate_word(w)
        g = f.conjugate()
        out[cw] = g if sign > 0 else -g
    return _raw_form(a.n, a.dims, out)


def real_part(a: BasicForm) -> BasicForm:
    return (a + conjugate(a)) * 0.5


def is_real(a: BasicForm, tol: float = 1e-12) -> bool:
    return (a - conjugate(a)).is_zero(tol)


def j_on_forms(a: BasicForm) -> BasicForm:
    """Induced almost complex structure: multiplication by ``i(s - r)`` on bidegree (r, s)."""
    out = {}
    for w, f in a.terms.items():
        r, s = w.bidegree
        if r != s:
            out[w] = f.scale(1j * (s - r))
    return _raw_form(a.n, a.dims, out)


def c_weil(a: BasicForm, inverse: bool = False) -> BasicForm:
    """Weil operator ``i^(r-s)`` on bidegree (r, s); the inverse uses ``i^(s-r)``."""
    out = {}
    for w, f in a.terms.items():
        r, s = w.bidegree
        k = (s - r) if inverse else (r - s)
        out[w] = f.scale(1j ** (k % 4))
    return _raw_form(a.n, a.dims, out)


@lru_cache(maxsize=None)
def volume_word(n: int) -> tuple[complex, CoframeWord]:
    """The transverse volume form as ``coefficient * top word``.

    ``nu = i^n w^1 ^ wbar^1 ^ ... ^ w^n ^ wbar^n``, which is the real form
    ``theta^1 ^ J theta^1 ^ ... ^ theta^n ^ J theta^n``.
    """
    top = word(n, range(1, n + 1), range(1, n + 1))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return (1j ** n) * sign, top


def volume_form(n: int, dims: int) -> BasicForm:
    c, top = volume_word(n)
    return BasicForm.monomial(top, dims, c)


@lru_cache(maxsize=None)
def _star_word(w: CoframeWord) -> tuple[complex, CoframeWord]:
    n = w.n
    nu_coeff, _ = volume_word(n)
    sigma, cw = conjugate_word(w)  # conj(w) = sigma * cw
    comp_h = tuple(a for a in range(1, n + 1) if a not in w.anti)
    comp_a = tuple(a for a in range(1, n + 1) if a not in w.holo)
    target = CoframeWord(n, comp_h, comp_a)
    tau, _ = wedge_words(cw, target)
    return sigma * nu_coeff / tau, target


def hodge_star(a: BasicForm) -> BasicForm:
    """Complex-linear star, bidegree (r, s) to (n - s, n - r).

    Characterised by ``phi ^ star(conj(psi)) = <phi, psi> nu``.
    """
    out = {}
    for w, f in a.terms.items():
        c, target = _star_word(w)
        _accumulate(out, target, f.scale(c))
    return _raw_form(a.n, a.dims, out)


def conjugate_star(a: BasicForm) -> BasicForm:
    """Conjugate-linear star ``phi -> star(conj(phi))``, used for codifferentials."""
    return hodge_star(conjugate(a))


def pointwise_inner(a: BasicForm, b: BasicForm) -> FourierScalar:
    """Pointwise Hermitian product ``<a, b>`` as a basic function."""
    a._check(b)
    out = FourierScalar.zero(a.dims)
    for w, f in a.terms.items():
        g = b.terms.get(w)
        if g is not None:
            out = out + f * g.conjugate()
    return out


def inner_product(a: BasicForm, b: BasicForm, weight: dict | None = None) -> complex:
    """Global L2 product, linear in ``a``.

    ``weight`` maps modes to Fourier coefficients of a positive density; when
    omitted the unit-volume flat measure is used.
    """
    a._check(b)
    total = 0j
    for w, f in a.terms.items():
        g = b.terms.get(w)
        if g is None:
            continue
        if weight is None:
            for m, c in f.terms.items():
                d = g.terms.get(m)
                if d is not None:
                    total += c * d.conjugate()
        else:
            for m, c in f.terms.items():
                for m2, d in g.terms.items():
                    k = tuple(y - x for x, y in zip(m, m2))
                    wk = weight.get(k)
                    if wk is None:
                        raise KeyError(f"weight coefficient for mode {k} not supplied")
                    total += c * d.conjugate() * wk
    return total

"""Trigonometric polynomials on a unit-period torus.

A basic function is stored as a sparse map ``mode -> coefficient`` for the
basis ``exp(2*pi*i * m . u)``.  Arithmetic is exact in the sense that no
truncation happens here: products are full convolutions.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

import numpy as np

Mode = tuple[int, ...]

TWO_PI = 2.0 * math.pi


class FourierScalar:
    """Sparse Fourier series in ``dims`` periodic coordinates.

    Zero coefficients are never stored, so two scalars are equal exactly when
    their term maps are equal.
    """

    __slots__ = ("dims", "terms")

    def __init__(self, dims: int, terms: Mapping[Mode, complex] | None = None):
        self.dims = int(dims)
        clean: dict[Mode, complex] = {}
        if terms:
            for m, c in terms.items():
                m = tuple(int(k) for k in m)
                if len(m) != self.dims:
                    raise ValueError(f"mode {m} does not have {self.dims} entries")
                c = complex(c)
                if c != 0:
                    clean[m] = clean.get(m, 0) + c
        self.terms = {m: c for m, c in clean.items() if c != 0}

    @classmethod
    def _raw(cls, dims: int, terms: dict[Mode, complex]) -> "FourierScalar":
        # trusted constructor, terms already canonical
        obj = object.__new__(cls)
        obj.dims = dims
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, dims: int) -> "FourierScalar":
        return cls._raw(dims, {})

    @classmethod
    def constant(cls, dims: int, value: complex) -> "FourierScalar":
        value = complex(value)
        return cls._raw(dims, {(0,) * dims: value} if value != 0 else {})

    @classmethod
    def mode(cls, dims: int, m: Iterable[int], value: complex = 1.0) -> "FourierScalar":
        return cls(dims, {tuple(m): value})

    @classmethod
    def cosine(cls, dims: int, m: Iterable[int], amplitude: float = 1.0) -> "FourierScalar":
        m = tuple(m)
        return cls(dims, {m: amplitude / 2, tuple(-k for k in m): amplitude / 2})

    @classmethod
    def sine(cls, dims: int, m: Iterable[int], amplitude: float = 1.0) -> "FourierScalar":
        m = tuple(m)
        return cls(dims, {m: amplitude / 2j, tuple(-k for k in m): -amplitude / 2j})

    # -- inspection -------------------------------------------------------

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def coefficient(self, m: Iterable[int]) -> complex:
        return self.terms.get(tuple(m), 0j)

    @property
    def bandwidth(self) -> int:
        """Largest ``|m_j|`` over stored modes (0 for the zero function)."""
        return max((max((abs(k) for k in m), default=0) for m in self.terms), default=0)

    def norm(self) -> float:
        """L2 norm on the unit-volume torus (Parseval)."""
        return math.sqrt(sum(abs(c) ** 2 for c in self.terms.values()))

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def is_real(self, tol: float = 0.0) -> bool:
        for m, c in self.terms.items():
            other = self.terms.get(tuple(-k for k in m), 0j)
            if abs(c - other.conjugate()) > tol:
                return False
        return True

    # -- algebra ----------------------------------------------------------

    def _check(self, other: "FourierScalar") -> None:
        if other.dims != self.dims:
            raise ValueError(f"dimension mismatch: {self.dims} vs {other.dims}")

    def __add__(self, other):
        if isinstance(other, FourierScalar):
            self._check(other)
            out = dict(self.terms)
            for m, c in other.terms.items():
                v = out.get(m, 0j) + c
                if v == 0:
                    out.pop(m, None)
                else:
                    out[m] = v
            return FourierScalar._raw(self.dims, out)
        if isinstance(other, (int, float, complex)):
            return self + FourierScalar.constant(self.dims, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return FourierScalar._raw(self.dims, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (FourierScalar, int, float, complex)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value: complex) -> "FourierScalar":
        value = complex(value)
        if value == 0:
            return FourierScalar.zero(self.dims)
        out = {}
        for m, c in self.terms.items():
            v = c * value
            if v != 0:
                out[m] = v
        return FourierScalar._raw(self.dims, out)

    def __mul__(self, other):
        if isinstance(other, FourierScalar):
            self._check(other)
            if len(other.terms) == 1 and len(self.terms) != 1:
                return other * self
            if len(self.terms) == 1:
                (m0, c0), = self.terms.items()
                if not any(m0):
                    return other.scale(c0)
                out = {}
                for m, c in other.terms.items():
                    v = c * c0
                    if v != 0:
                        out[tuple(a + b for a, b in zip(m, m0))] = v
                return FourierScalar._raw(self.dims, out)
            out: dict[Mode, complex] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    out[m] = out.get(m, 0j) + c1 * c2
            return FourierScalar._raw(self.dims, {m: c for m, c in out.items() if c != 0})
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self) -> "FourierScalar":
        return FourierScalar._raw(
            self.dims, {tuple(-k for k in m): c.conjugate() for m, c in self.terms.items()}
        )

    def differentiate(self, axis: int) -> "FourierScalar":
        """Partial derivative along coordinate ``axis``."""
        if not 0 <= axis < self.dims:
            raise ValueError(f"axis {axis} out of range for {self.dims} coordinates")
        out = {}
        for m, c in self.terms.items():
            if m[axis]:
                out[m] = c * (TWO_PI * 1j * m[axis])
        return FourierScalar._raw(self.dims, out)

    def prune(self, tol: float) -> "FourierScalar":
        return FourierScalar._raw(self.dims, {m: c for m, c in self.terms.items() if abs(c) > tol})

    def __eq__(self, other):
        if not isinstance(other, FourierScalar):
            return NotImplemented
        return self.dims == other.dims and self.terms == other.terms

    __hash__ = None

    def allclose(self, other: "FourierScalar", atol: float = 1e-12) -> bool:
        return (self - other).is_zero(atol)

    # -- evaluation -------------------------------------------------------

    def evaluate(self, points) -> np.ndarray:
        """Values at an array of points with trailing axis of length ``dims``."""
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.dims:
            raise ValueError("points must have a trailing axis of length dims")
        out = np.zeros(pts.shape[:-1], dtype=complex)
        for m, c in self.terms.items():
            out += c * np.exp(TWO_PI * 1j * (pts @ np.asarray(m, dtype=float)))
        return out

    def grid_values(self, n: int) -> np.ndarray:
        """Samples on the uniform grid ``u_j = k_j / n`` via inverse FFT."""
        if self.bandwidth * 2 >= n:
            raise ValueError(f"grid of size {n} aliases bandwidth {self.bandwidth}")
        arr = np.zeros((n,) * self.dims, dtype=complex)
        for m, c in self.terms.items():
            arr[tuple(k % n for k in m)] += c
        return np.fft.ifftn(arr) * n ** self.dims

    def __repr__(self) -> str:
        if not self.terms:
            return "FourierScalar(0)"
        parts = [f"{_fmt(c)}*e{list(m)}" for m, c in sorted(self.terms.items())]
        return "FourierScalar(" + " + ".join(parts) + ")"


def _fmt(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:.6g}"
    return f"({c.real:.6g}{c.imag:+.6g}j)"


def weight_coefficients(log_density: FourierScalar, radius: int, grid: int | None = None) -> dict[Mode, complex]:
    """Fourier coefficients of ``exp(-f)`` for all modes with ``|m_j| <= radius``.

    Sampled on a grid fine enough that aliasing sits below double precision
    for the small bandwidths used here.
    """
    dims = log_density.dims
    if grid is None:
        grid = max(64, 4 * radius + 8 * log_density.bandwidth + 16)
        grid = 1 << (grid - 1).bit_length()
    vals = log_density.grid_values(grid)
    if np.max(np.abs(vals.imag)) > 1e-9:
        raise ValueError("log density must be real")
    coeffs = np.fft.fftn(np.exp(-vals.real)) / grid ** dims
    out = {}
    for m in np.ndindex(*((2 * radius + 1,) * dims)):
        mode = tuple(k - radius for k in m)
        out[mode] = complex(coeffs[tuple(k % grid for k in mode)])
    return out


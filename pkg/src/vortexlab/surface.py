"""Flat-torus geometry and spectral calculus of complex differential forms.

Coordinates are z = x + iy with

    d/dz    = (d/dx - i d/dy) / 2
    d/dzbar = (d/dx + i d/dy) / 2
    dz ^ dzbar = -2i dx ^ dy

Arrays are indexed ``[ix, iy]`` on the uniform grid
x_j = j Lx / nx, y_k = k Ly / ny.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

IMAG_TOL = 1e-12


class GridMismatchError(ValueError):
    """Raised when fields sampled on different grids are combined."""


def _wavenumbers(n: int, length: float) -> np.ndarray:
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)
    # Nyquist mode carries no first derivative; keeps D real and skew-adjoint.
    if n % 2 == 0:
        k[n // 2] = 0.0
    return k


@dataclass(frozen=True, eq=False)
class Surface:
    """Torus C / (Lx Z + i Ly Z) with conformal factor h, omega = h^2 dz^dzbar."""

    Lx: float
    Ly: float
    nx: int
    ny: int
    h: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        if h.shape != (self.nx, self.ny):
            raise GridMismatchError(f"h has shape {h.shape}, expected {(self.nx, self.ny)}")
        if not np.all(h > 0):
            raise ValueError("conformal factor h must be strictly positive")
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @classmethod
    def flat(cls, Lx=2 * np.pi, Ly=2 * np.pi, nx=128, ny=128, h=1.0):
        """Build a surface; ``h`` may be a scalar, an array or a callable h(x, y)."""
        xs = np.arange(nx) * (Lx / nx)
        ys = np.arange(ny) * (Ly / ny)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        if callable(h):
            hv = np.asarray(h(X, Y), dtype=float)
        else:
            hv = np.broadcast_to(np.asarray(h, dtype=float), (nx, ny))
        return cls(float(Lx), float(Ly), int(nx), int(ny), np.array(hv, dtype=float))

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def dx(self) -> float:
        return self.Lx / self.nx

    @property
    def dy(self) -> float:
        return self.Ly / self.ny

    @property
    def cell(self) -> float:
        return self.dx * self.dy

    @cached_property
    def X(self) -> np.ndarray:
        return np.meshgrid(np.arange(self.nx) * self.dx, np.arange(self.ny) * self.dy, indexing="ij")[0]

    @cached_property
    def Y(self) -> np.ndarray:
        return np.meshgrid(np.arange(self.nx) * self.dx, np.arange(self.ny) * self.dy, indexing="ij")[1]

    @cached_property
    def Z(self) -> np.ndarray:
        return self.X + 1j * self.Y

    @cached_property
    def h2(self) -> np.ndarray:
        return self.h ** 2

    @cached_property
    def area(self) -> float:
        """Integral of h^2 dx dy."""
        return float(self.h2.sum() * self.cell)

    @cached_property
    def kx(self) -> np.ndarray:
        return _wavenumbers(self.nx, self.Lx)[:, None]

    @cached_property
    def ky(self) -> np.ndarray:
        return _wavenumbers(self.ny, self.Ly)[None, :]

    @cached_property
    def lap_symbol(self) -> np.ndarray:
        # composition of the first-derivative symbols, so 4 d dbar == laplacian exactly
        return -(self.kx ** 2 + self.ky ** 2)

    def check(self, *arrays):
        for a in arrays:
            if np.shape(a) != self.shape:
                raise GridMismatchError(f"field of shape {np.shape(a)} on a {self.shape} surface")

    # -- spectral derivatives (periodic fields) -------------------------------

    def ddx(self, f):
        return _apply(f, 1j * self.kx, axis=0)

    def ddy(self, f):
        return _apply(f, 1j * self.ky, axis=1)

    def d(self, f):
        """Holomorphic derivative d/dz."""
        F = np.fft.fft2(f)
        return np.fft.ifft2(0.5 * (1j * self.kx + self.ky) * F)

    def dbar(self, f):
        """Antiholomorphic derivative d/dzbar."""
        F = np.fft.fft2(f)
        return np.fft.ifft2(0.5 * (1j * self.kx - self.ky) * F)

    def laplacian(self, f):
        out = np.fft.ifft2(self.lap_symbol * np.fft.fft2(f))
        return out.real if np.isrealobj(f) else out

    def mean(self, f):
        return f.mean()

    def integral_dxdy(self, f):
        """Riemann sum of f dx dy; exact for band-limited periodic integrands."""
        return f.sum() * self.cell


def _apply(f, symbol, axis):
    F = np.fft.fft(f, axis=axis)
    out = np.fft.ifft(symbol * F, axis=axis)
    return out.real if np.isrealobj(f) else out


@dataclass(frozen=True, eq=False)
class OneForm:
    """p dz + q dzbar.

    ``imaginary_valued`` marks forms a dz - conj(a) dzbar, i.e. conj(q) == -p.
    """

    p: np.ndarray
    q: np.ndarray
    imaginary_valued: bool = False

    def __post_init__(self):
        p = np.asarray(self.p, dtype=complex)
        q = np.asarray(self.q, dtype=complex)
        if p.shape != q.shape:
            raise GridMismatchError("(1,0) and (0,1) parts on different grids")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if self.imaginary_valued:
            defect = np.max(np.abs(np.conj(q) + p), initial=0.0)
            scale = max(1.0, np.max(np.abs(p), initial=0.0))
            if defect > IMAG_TOL * scale:
                raise ValueError(f"form is not imaginary valued (defect {defect:.3e})")

    @classmethod
    def imaginary(cls, a):
        """a dz - conj(a) dzbar."""
        a = np.asarray(a, dtype=complex)
        return cls(a, -np.conj(a), True)

    @classmethod
    def zeros(cls, shape):
        z = np.zeros(shape, dtype=complex)
        return cls(z, z.copy(), True)

    @property
    def a(self) -> np.ndarray:
        """The (1,0) coefficient; for imaginary-valued forms this is the defining field."""
        return self.p

    @property
    def shape(self):
        return self.p.shape

    def __add__(self, other: OneForm) -> OneForm:
        _same_grid(self.p, other.p)
        return OneForm(self.p + other.p, self.q + other.q, self.imaginary_valued and other.imaginary_valued)

    def __sub__(self, other: OneForm) -> OneForm:
        _same_grid(self.p, other.p)
        return OneForm(self.p - other.p, self.q - other.q, self.imaginary_valued and other.imaginary_valued)

    def __neg__(self) -> OneForm:
        return OneForm(-self.p, -self.q, self.imaginary_valued)

    def scale(self, c) -> OneForm:
        keeps = self.imaginary_valued and np.isrealobj(c)
        return OneForm(c * self.p, c * self.q, keeps)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class TwoForm:
    """f dz ^ dzbar. Purely imaginary as a form exactly when f is real."""

    f: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "f", np.asarray(self.f))

    @property
    def purely_imaginary(self) -> bool:
        f = self.f
        if np.isrealobj(f):
            return True
        scale = max(1.0, np.max(np.abs(f), initial=0.0))
        return bool(np.max(np.abs(f.imag), initial=0.0) <= IMAG_TOL * scale)

    def __add__(self, other):
        _same_grid(self.f, other.f)
        return TwoForm(self.f + other.f)

    def __sub__(self, other):
        _same_grid(self.f, other.f)
        return TwoForm(self.f - other.f)

    def __neg__(self):
        return TwoForm(-self.f)


def _same_grid(a, b):
    if np.shape(a) != np.shape(b):
        raise GridMismatchError(f"grid mismatch: {np.shape(a)} vs {np.shape(b)}")


def volume_form(s: Surface) -> TwoForm:
    """omega = h^2 dz ^ dzbar."""
    return TwoForm(s.h2)


def integrate_two_form(s: Surface, w: TwoForm) -> complex:
    s.check(w.f)
    return complex(np.sum(w.f) * (-2j) * s.cell)


def wedge_one_one(p: OneForm, q: OneForm) -> TwoForm:
    _same_grid(p.p, q.p)
    return TwoForm(p.p * q.q - p.q * q.p)


def wedge_zero_two(f, w: TwoForm) -> TwoForm:
    _same_grid(f, w.f)
    return TwoForm(f * w.f)


def hodge1(p: OneForm) -> OneForm:
    # *(eta dz) = -i eta dz, *(eta dzbar) = i eta dzbar
    return OneForm(-1j * p.p, 1j * p.q, p.imaginary_valued)


def hodge2(p: OneForm) -> OneForm:
    # antilinear: *(eta dz) = -conj(eta) dzbar, *(conj(eta) dzbar) = eta dz
    return OneForm(np.conj(p.q), -np.conj(p.p), False)


def d_zero_form(s: Surface, f) -> OneForm:
    f = np.asarray(f)
    s.check(f)
    p, q = s.d(f), s.dbar(f)
    imag = bool(np.iscomplexobj(f) and np.max(np.abs(f.real), initial=0.0) == 0.0)
    if imag:
        # enforce the exact symmetry conj(q) = -p that holds analytically
        q = -np.conj(p)
    return OneForm(p, q, imag)


def d_one_form(s: Surface, a: OneForm) -> TwoForm:
    """d(p dz + q dzbar) = (dq/dz - dp/dzbar) dz ^ dzbar."""
    s.check(a.p)
    f = s.d(a.q) - s.dbar(a.p)
    if a.imaginary_valued:
        f = f.real
    return TwoForm(f)


def band_limited_field(s: Surface, rng: np.random.Generator, modes: int = 4, complex_valued=True):
    """Random smooth periodic field built from Fourier modes |m|, |n| <= modes."""
    out = np.zeros(s.shape, dtype=complex)
    for m in range(-modes, modes + 1):
        for n in range(-modes, modes + 1):
            c = rng.normal() + 1j * rng.normal()
            c /= 1.0 + m * m + n * n
            out += c * np.exp(2j * np.pi * (m * s.X / s.Lx + n * s.Y / s.Ly))
    return out if complex_valued else out.real

"""Periodic-torus spectral kernel: transforms, derivatives, dealiasing, projection.

All fields live on a uniform n x n grid covering [0, L)^2 with periodic
boundary conditions.  Arrays are indexed [j, i] with i the x index (x fastest
in memory); spectra use the real 2D FFT layout, so the x wavenumber axis is
the half-spectrum.  Odd-order derivatives zero the Nyquist mode, which keeps
differentiation anti-symmetric and the Leray projector exactly idempotent.
"""

from __future__ import annotations

import numpy as np

from .errors import GridMismatch


class Grid:
    """Uniform periodic grid with precomputed wavenumber machinery."""

    def __init__(self, n: int, length: float):
        if n < 16 or n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 16, got {n}")
        if length <= 0:
            raise ValueError(f"grid length must be positive, got {length}")
        self.n = int(n)
        self.length = float(length)
        self.dx = self.length / self.n

        kx = 2.0 * np.pi * np.fft.rfftfreq(n, d=self.dx)  # >= 0
        ky = 2.0 * np.pi * np.fft.fftfreq(n, d=self.dx)
        self.kx = kx[np.newaxis, :]
        self.ky = ky[:, np.newaxis]
        self.k2 = self.kx**2 + self.ky**2

        # First-derivative symbols with the Nyquist mode removed.
        kxd = kx.copy()
        kxd[-1] = 0.0
        kyd = ky.copy()
        kyd[n // 2] = 0.0
        self.ikx = 1j * kxd[np.newaxis, :]
        self.iky = 1j * kyd[:, np.newaxis]

        # Inverse Laplacian consistent with the derivative symbols: modes where
        # both derivative symbols vanish (the mean, Nyquist lines) are skipped.
        kd2 = kxd[np.newaxis, :] ** 2 + kyd[:, np.newaxis] ** 2
        with np.errstate(divide="ignore"):
            self.inv_kd2 = np.where(kd2 > 0.0, 1.0 / np.where(kd2 > 0.0, kd2, 1.0), 0.0)
        # Full-symbol inverse for the Poisson diagnostic (mean skipped).
        k2 = self.k2.copy()
        k2[0, 0] = 1.0
        self.inv_k2 = 1.0 / k2
        self.inv_k2[0, 0] = 0.0

        kcut = (2.0 / 3.0) * (np.pi / self.dx)
        self.dealias_mask = (np.abs(self.kx) <= kcut) & (np.abs(self.ky) <= kcut)

        x1 = np.arange(n) * self.dx
        self.x = x1[np.newaxis, :]
        self.y = x1[:, np.newaxis]

    @property
    def cell_area(self) -> float:
        return self.dx * self.dx

    @property
    def area(self) -> float:
        return self.length * self.length

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and self.n == other.n
            and self.length == other.length
        )

    def __hash__(self):
        return hash((self.n, self.length))

    def __repr__(self):
        return f"Grid(n={self.n}, length={self.length})"


def _check_same_grid(*objs):
    g = objs[0].grid
    for o in objs[1:]:
        if o.grid != g:
            raise GridMismatch(f"grids differ: {o.grid} vs {g}")
    return g


class Field:
    """Real scalar field on a Grid, with a lazily cached real-FFT spectrum."""

    __slots__ = ("grid", "values", "_spec")

    def __init__(self, grid: Grid, values: np.ndarray, spec: np.ndarray | None = None):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (grid.n, grid.n):
            raise ValueError(f"field shape {values.shape} does not match grid n={grid.n}")
        self.grid = grid
        self.values = values
        self._spec = spec

    @classmethod
    def from_spec(cls, grid: Grid, spec: np.ndarray) -> "Field":
        values = np.fft.irfft2(spec, s=(grid.n, grid.n))
        return cls(grid, values, spec=spec)

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros((grid.n, grid.n)))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        return cls(grid, np.asarray(fn(grid.x, grid.y), dtype=np.float64)
                   * np.ones((grid.n, grid.n)))

    @property
    def spec(self) -> np.ndarray:
        if self._spec is None:
            self._spec = np.fft.rfft2(self.values)
        return self._spec

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(),
                     None if self._spec is None else self._spec.copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    # Pointwise arithmetic; results drop the spectrum cache.
    def __add__(self, other):
        if isinstance(other, Field):
            _check_same_grid(self, other)
            return Field(self.grid, self.values + other.values)
        return Field(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field):
            _check_same_grid(self, other)
            return Field(self.grid, self.values - other.values)
        return Field(self.grid, self.values - other)

    def __mul__(self, other):
        if isinstance(other, Field):
            _check_same_grid(self, other)
            return Field(self.grid, self.values * other.values)
        return Field(self.grid, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)


class VectorField:
    """Pair of scalar Fields (x- and y-components) on one Grid."""

    __slots__ = ("x", "y")

    def __init__(self, x: Field, y: Field):
        if x.grid != y.grid:
            raise GridMismatch("vector components live on different grids")
        self.x = x
        self.y = y

    @property
    def grid(self) -> Grid:
        return self.x.grid

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(Field.zeros(grid), Field.zeros(grid))

    def copy(self) -> "VectorField":
        return VectorField(self.x.copy(), self.y.copy())

    def is_finite(self) -> bool:
        return self.x.is_finite() and self.y.is_finite()

    def __add__(self, other):
        return VectorField(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return VectorField(self.x - other.x, self.y - other.y)

    def __mul__(self, other):
        return VectorField(self.x * other, self.y * other)

    __rmul__ = __mul__

    def __neg__(self):
        return VectorField(-self.x, -self.y)


def grad(f: Field) -> VectorField:
    """Spectral gradient; Nyquist modes of the derivative are zeroed."""
    g = f.grid
    s = f.spec
    return VectorField(Field.from_spec(g, g.ikx * s), Field.from_spec(g, g.iky * s))


def div(w: VectorField) -> Field:
    """Spectral divergence; Nyquist modes zeroed."""
    g = w.grid
    return Field.from_spec(g, g.ikx * w.x.spec + g.iky * w.y.spec)


def laplacian(f: Field) -> Field:
    g = f.grid
    return Field.from_spec(g, -g.k2 * f.spec)


def leray_project(w: VectorField) -> VectorField:
    """Remove the gradient part of w, leaving a divergence-free field.

    The k=0 mode (mean flow) is untouched; per-mode the projector is
    I - k k^T / |k|^2 built from the Nyquist-zeroed derivative symbols, so it
    is exactly idempotent and self-adjoint on the discrete grid.
    """
    g = w.grid
    sx, sy = w.x.spec, w.y.spec
    d = (g.ikx * sx + g.iky * sy) * g.inv_kd2
    return VectorField(
        Field.from_spec(g, sx + g.ikx * d),
        Field.from_spec(g, sy + g.iky * d),
    )


def pressure_diagnostic(u: VectorField, v: VectorField) -> Field:
    """Zero-mean p with -laplacian(p) = div div (u (x) u + v (x) v)."""
    g = _check_same_grid(u, v)
    rhs = np.zeros((g.n, g.n // 2 + 1), dtype=complex)
    comps = {"x": (u.x, v.x), "y": (u.y, v.y)}
    ik = {"x": g.ikx, "y": g.iky}
    for a, (ua, va) in comps.items():
        for b, (ub, vb) in comps.items():
            t_ab = dealias(dealias(ua) * dealias(ub) + dealias(va) * dealias(vb))
            rhs += ik[a] * ik[b] * t_ab.spec
    return Field.from_spec(g, rhs * g.inv_k2)


def dealias(f: Field) -> Field:
    """2/3-rule truncation: zero every mode with |kx| or |ky| above the cutoff."""
    return Field.from_spec(f.grid, f.spec * f.grid.dealias_mask)


def heat_propagator(f: Field, nu: float, dt: float) -> Field:
    """Exact diffusion semigroup: multiply the spectrum by exp(-nu |k|^2 dt)."""
    if nu < 0:
        raise ValueError("diffusivity must be >= 0")
    if nu == 0.0:
        return f.copy()
    g = f.grid
    return Field.from_spec(g, f.spec * np.exp(-nu * g.k2 * dt))


def heat_propagator_vec(w: VectorField, nu: float, dt: float) -> VectorField:
    return VectorField(heat_propagator(w.x, nu, dt), heat_propagator(w.y, nu, dt))

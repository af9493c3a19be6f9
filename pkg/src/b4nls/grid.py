"""Periodic box grids, complex fields on them, and the snapshot file format."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

# Refuse grids whose state would not comfortably fit in memory.
MAX_GRID_POINTS = 2**26

SNAPSHOT_MAGIC = b"B4NL"
SNAPSHOT_VERSION = 1


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Periodic box [-L_i/2, L_i/2)^n sampled on N_i equispaced points per axis.

    The frequency lattice is xi_k = 2*pi*k / L_i with k in
    {-N_i/2, ..., N_i/2 - 1} (half-open symmetric range, Nyquist retained),
    stored in FFT ordering.
    """

    extent: tuple[float, ...]
    points: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "extent", tuple(float(L) for L in self.extent))
        object.__setattr__(self, "points", tuple(int(N) for N in self.points))
        if len(self.extent) != len(self.points) or len(self.points) < 1:
            raise GridError("extent and points must be nonempty and of equal length")
        for L in self.extent:
            if not (L > 0 and np.isfinite(L)):
                raise GridError(f"box extent must be positive and finite, got {L}")
        for N in self.points:
            if N < 4 or N % 2 != 0:
                raise GridError(f"points per axis must be even and >= 4, got {N}")
        total = int(np.prod(self.points))
        if total > MAX_GRID_POINTS:
            raise GridError(
                f"grid has {total} points, exceeding the cap of {MAX_GRID_POINTS}"
            )

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / N for L, N in zip(self.extent, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    def axis(self, i: int) -> np.ndarray:
        """Physical coordinates along axis i: -L/2 + j*dx."""
        L, N = self.extent[i], self.points[i]
        return -L / 2 + (L / N) * np.arange(N)

    def freq_axis(self, i: int) -> np.ndarray:
        """Frequencies 2*pi*k/L along axis i, in FFT ordering."""
        L, N = self.extent[i], self.points[i]
        return 2 * np.pi * np.fft.fftfreq(N, d=1.0 / N) / L

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Physical coordinate arrays, broadcastable to the grid shape."""
        return tuple(
            self.axis(i).reshape([-1 if j == i else 1 for j in range(self.dim)])
            for i in range(self.dim)
        )

    def freq_mesh(self) -> tuple[np.ndarray, ...]:
        """Frequency coordinate arrays, broadcastable to the grid shape."""
        return tuple(
            self.freq_axis(i).reshape([-1 if j == i else 1 for j in range(self.dim)])
            for i in range(self.dim)
        )

    def freq_radius(self) -> np.ndarray:
        """|xi| on the full lattice."""
        out = np.zeros(self.shape)
        for xi in self.freq_mesh():
            out = out + xi**2
        return np.sqrt(out)

    def max_freq(self) -> float:
        return float(np.max(self.freq_radius()))

    def min_nonzero_freq(self) -> float:
        return float(min(2 * np.pi / L for L in self.extent))


PHYSICAL = "physical"
FREQUENCY = "frequency"


@dataclass
class ComplexField:
    """Complex samples of u on a Grid, in physical or frequency space."""

    grid: Grid
    values: np.ndarray
    space: str = PHYSICAL

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            raise GridError(
                f"value shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if self.space not in (PHYSICAL, FREQUENCY):
            raise GridError(f"unknown space {self.space!r}")

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.values.copy(), self.space)

    def __add__(self, other: "ComplexField") -> "ComplexField":
        _check_compatible(self, other)
        return ComplexField(self.grid, self.values + other.values, self.space)

    def __sub__(self, other: "ComplexField") -> "ComplexField":
        _check_compatible(self, other)
        return ComplexField(self.grid, self.values - other.values, self.space)

    def __mul__(self, c) -> "ComplexField":
        return ComplexField(self.grid, self.values * c, self.space)

    __rmul__ = __mul__


def _check_compatible(f: ComplexField, g: ComplexField):
    if f.grid != g.grid:
        raise GridError("fields live on different grids")
    if f.space != g.space:
        raise GridError(f"fields live in different spaces: {f.space} vs {g.space}")


@dataclass(frozen=True, order=True)
class DyadicScale:
    """A dyadic number N = 2**k, k integer (possibly negative)."""

    k: int = field(compare=True)

    @property
    def value(self) -> float:
        return float(2.0**self.k)

    @classmethod
    def from_value(cls, N: float) -> "DyadicScale":
        k = int(round(np.log2(N)))
        if 2.0**k != N:
            raise ValueError(f"{N} is not a power of two")
        return cls(k)

    def __float__(self) -> float:
        return self.value


def as_scale(N) -> DyadicScale:
    if isinstance(N, DyadicScale):
        return N
    return DyadicScale.from_value(float(N))


def lattice_scales(grid: Grid, pad: int = 1) -> list[DyadicScale]:
    """Dyadic scales whose annulus (N/2, 2N) can intersect the nonzero lattice.

    Padded by `pad` octaves on both ends so telescoping sums close.
    """
    lo = int(np.floor(np.log2(grid.min_nonzero_freq()))) - pad
    hi = int(np.ceil(np.log2(grid.max_freq()))) + pad
    return [DyadicScale(k) for k in range(lo, hi + 1)]


def write_snapshot(path, f: ComplexField) -> None:
    """Write a field in the repo snapshot format.

    Layout (little-endian): magic "B4NL", u32 version, u32 dim, u32 points
    per axis, f64 extent per axis, then row-major interleaved (re, im) f64.
    """
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<II", SNAPSHOT_VERSION, g.dim))
        fh.write(struct.pack(f"<{g.dim}I", *g.points))
        fh.write(struct.pack(f"<{g.dim}d", *g.extent))
        inter = np.empty(g.shape + (2,))
        inter[..., 0] = f.values.real
        inter[..., 1] = f.values.imag
        fh.write(inter.astype("<f8").tobytes())


def read_snapshot(path) -> ComplexField:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise GridError(f"bad snapshot magic {magic!r}")
        version, dim = struct.unpack("<II", fh.read(8))
        if version != SNAPSHOT_VERSION:
            raise GridError(f"unsupported snapshot version {version}")
        points = struct.unpack(f"<{dim}I", fh.read(4 * dim))
        extent = struct.unpack(f"<{dim}d", fh.read(8 * dim))
        grid = Grid(extent, points)
        count = int(np.prod(points)) * 2
        data = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(grid.shape + (2,))
        values = data[..., 0] + 1j * data[..., 1]
    return ComplexField(grid, values, PHYSICAL)

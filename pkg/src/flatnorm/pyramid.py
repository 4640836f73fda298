"""Synthetic test surface: a noisy pyramid inside a tetrahedralized box.

An ``n x n`` vertex grid over ``[-1, 1]²`` carries a height field (pyramid,
Gaussian peaks and troughs of several widths, uniform noise).  Every grid
column is split into ``layers`` vertical intervals between ``z = -1`` and
``z = 1``.  The noisy height field is one of the level sheets.  Right below
and right above it sit two sheets that follow the noise-free field wherever
the noise points away from them, so the mesh contains smoother surfaces
close to the noisy one.  Every prism between consecutive sheets is cut into
three tetrahedra.  The cut uses the order of the grid vertex ids, so
neighbouring prisms agree on their shared quadrilateral faces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simplicial import Chain, SimplicialComplex, build_complex


@dataclass(frozen=True)
class Pyramid:
    K: SimplicialComplex
    surface: Chain
    heights: np.ndarray
    grid_n: int
    layers: int


SHEET_GAP = 0.05


def _height_fields(grid_n: int, noise_amplitude: float, seed: int, bumps: int = 5):
    """``(clean, noisy)`` height fields on the grid."""
    rng = np.random.default_rng(seed)
    u = np.linspace(-1.0, 1.0, grid_n)
    X, Y = np.meshgrid(u, u, indexing="ij")
    H = -0.5 + (1.0 - np.maximum(np.abs(X), np.abs(Y)))
    for _ in range(bumps):
        cx, cy = rng.uniform(-0.8, 0.8, size=2)
        width = rng.uniform(0.08, 0.4)
        amp = rng.uniform(0.1, 0.3) * rng.choice([-1.0, 1.0])
        H += amp * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * width**2))
    clean = np.clip(H, -0.9, 0.9)
    if noise_amplitude:
        H = H + noise_amplitude * rng.uniform(-1.0, 1.0, size=H.shape)
    return clean, np.clip(H, -0.9, 0.9)


def height_field(grid_n: int, noise_amplitude: float, seed: int, bumps: int = 5) -> np.ndarray:
    return _height_fields(grid_n, noise_amplitude, seed, bumps)[1]


def _column_heights(h: float, clean: float, below: int, above: int) -> list[float]:
    """Sheet heights of one grid column, bottom to top; index ``below`` is the noisy surface."""
    low = max(min(h, clean) - SHEET_GAP, -0.95)
    high = min(max(h, clean) + SHEET_GAP, 0.95)
    zs = [-1.0 + (low + 1.0) * k / (below - 1) for k in range(below)]
    zs.append(h)
    zs += [high + (1.0 - high) * k / (above - 1) for k in range(above)]
    return zs


def generate_noisy_pyramid(grid_n: int, noise_amplitude: float = 0.05, seed: int = 0, layers: int = 4,
                           bumps: int = 5) -> Pyramid:
    """Tetrahedralized ``[-1,1]³`` box containing the pyramid surface as a 2-chain.

    The surface has ``2(n-1)²`` triangles, oriented with upward normals; the
    box has ``6 (n-1)² · layers`` tetrahedra.
    """
    if grid_n < 4:
        raise ValueError("grid_n must be at least 4")
    if layers < 4:
        raise ValueError("need at least two layers below and two above the surface")
    n = grid_n
    clean, H = _height_fields(n, noise_amplitude, seed, bumps)
    below = layers // 2
    above = layers - below
    u = np.linspace(-1.0, 1.0, n)
    nn = n * n
    coords = np.zeros(((layers + 1) * nn, 3))
    for i in range(n):
        for j in range(n):
            g = i * n + j
            zs = _column_heights(H[i, j], clean[i, j], below, above)
            for k, z in enumerate(zs):
                coords[k * nn + g] = (u[i], u[j], z)

    tris2d = []
    for i in range(n - 1):
        for j in range(n - 1):
            a, b, c, d = i * n + j, (i + 1) * n + j, (i + 1) * n + j + 1, i * n + j + 1
            tris2d += [(a, b, c), (a, c, d)]

    tets = []
    for k in range(layers):
        lo, hi = k * nn, (k + 1) * nn
        for t in tris2d:
            a, b, c = sorted(t)
            A, B, C = a + lo, b + lo, c + lo
            A2, B2, C2 = a + hi, b + hi, c + hi
            tets += [(A, B, C, A2), (B, C, A2, B2), (C, A2, B2, C2)]
    K = build_complex(tets, coords)

    xy = coords[:, :2]
    surface = {}
    off = below * nn
    for t in tris2d:
        a, b, c = sorted(t)
        e1, e2 = xy[b] - xy[a], xy[c] - xy[a]
        sign = 1 if e1[0] * e2[1] - e1[1] * e2[0] > 0 else -1
        surface[K.index((a + off, b + off, c + off))] = sign
    return Pyramid(K, Chain(2, K.count(2), surface), H, n, layers)

"""Finite observation regions on the integer lattice Z^d.

A region is an explicit, lexicographically ordered set of integer sites.
All geometry uses the sup-norm (Chebyshev) distance
``|s| = max_k |s_k|``; there is deliberately no Euclidean option.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Site = tuple  # tuple of d signed integers


@dataclass(frozen=True)
class LatticeRegion:
    """An ordered finite set of d-dimensional integer sites.

    Sites are stored in strictly increasing lexicographic order, which
    fixes the site enumeration used by everything downstream (the k-th
    site of the region is ``sites[k]``).
    """

    dimension: int
    sites: tuple

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if len(self.sites) < 1:
            raise ValueError("region must contain at least one site")
        for s in self.sites:
            if len(s) != self.dimension:
                raise ValueError(f"site {s} does not have dimension {self.dimension}")
        for a, b in zip(self.sites, self.sites[1:]):
            if not a < b:  # tuple comparison is lexicographic
                raise ValueError("sites must be strictly increasing in lexicographic order")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def site_array(self) -> np.ndarray:
        """Sites as an (n_sites, d) integer array, enumeration order."""
        return np.asarray(self.sites, dtype=np.int64).reshape(self.n_sites, self.dimension)

    def site_set(self) -> frozenset:
        return frozenset(self.sites)

    def translate(self, v: Sequence[int]) -> "LatticeRegion":
        v = tuple(int(c) for c in v)
        if len(v) != self.dimension:
            raise ValueError("translation vector dimension mismatch")
        moved = tuple(tuple(c + dv for c, dv in zip(s, v)) for s in self.sites)
        return LatticeRegion(self.dimension, moved)


def _region_from_site_iter(dimension: int, sites: Iterable) -> LatticeRegion:
    ordered = tuple(sorted(set(tuple(int(c) for c in s) for s in sites)))
    return LatticeRegion(dimension, ordered)


def make_rect_region(side_lengths: Sequence[int], origin: Sequence[int] | None = None) -> LatticeRegion:
    """Rectangular box of integer sites.

    The box is the product of intervals ``[origin_k, origin_k + side_k)``.
    """
    sides = [int(s) for s in side_lengths]
    d = len(sides)
    if d < 1:
        raise ValueError("need at least one side length")
    if any(s < 1 for s in sides):
        raise ValueError("side lengths must be >= 1")
    if origin is None:
        origin = (0,) * d
    origin = tuple(int(c) for c in origin)
    if len(origin) != d:
        raise ValueError("origin dimension mismatch")
    axes = [np.arange(o, o + s, dtype=np.int64) for o, s in zip(origin, sides)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    # meshgrid 'ij' order is already lexicographic
    sites = tuple(map(tuple, grid.tolist()))
    return LatticeRegion(d, sites)


def make_l_shaped_region(arm_lengths: Sequence[int], thickness: int) -> LatticeRegion:
    """L-shaped region in d=2: union of a horizontal and a vertical arm.

    The arms are the boxes ``arm1 x thickness`` and ``thickness x arm2``
    sharing the corner at the origin.  Exercises non-rectangular regions.
    """
    a1, a2 = (int(a) for a in arm_lengths)
    t = int(thickness)
    if t < 1 or a1 < 1 or a2 < 1:
        raise ValueError("arm lengths and thickness must be >= 1")
    if a1 < t or a2 < t:
        raise ValueError("arms must be at least as long as the thickness")
    box1 = ((i, j) for i in range(a1) for j in range(t))
    box2 = ((i, j) for i in range(t) for j in range(a2))
    return _region_from_site_iter(2, list(box1) + list(box2))


_NEIGHBOR_OFFSETS_CACHE: dict = {}


def _sup_norm_neighbors(d: int) -> np.ndarray:
    """All 3^d - 1 offsets at sup-norm distance exactly 1."""
    if d not in _NEIGHBOR_OFFSETS_CACHE:
        axes = [(-1, 0, 1)] * d
        offs = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        offs = offs[np.any(offs != 0, axis=1)]
        _NEIGHBOR_OFFSETS_CACHE[d] = offs.astype(np.int64)
    return _NEIGHBOR_OFFSETS_CACHE[d]


def boundary(region: LatticeRegion) -> frozenset:
    """Sites of the region with a sup-norm-1 neighbor outside the region."""
    inside = region.site_set()
    arr = region.site_array()
    offs = _sup_norm_neighbors(region.dimension)
    out = []
    for s, row in zip(region.sites, arr):
        for o in offs:
            if tuple((row + o).tolist()) not in inside:
                out.append(s)
                break
    return frozenset(out)


@dataclass(frozen=True)
class RegionSequenceReport:
    """Diagnostics for a sequence of regions meant to grow without bound.

    Purely informational: reports whether |region| is strictly increasing
    and whether the boundary-to-volume ratio is non-increasing over the
    tail of the sequence.  Never rejects.
    """

    sizes: tuple
    boundary_sizes: tuple
    ratios: tuple
    sizes_increasing: bool
    ratios_nonincreasing: bool


def check_region_sequence(regions: Sequence[LatticeRegion]) -> RegionSequenceReport:
    if not regions:
        raise ValueError("need at least one region")
    sizes = tuple(r.n_sites for r in regions)
    bsizes = tuple(len(boundary(r)) for r in regions)
    ratios = tuple(b / s for b, s in zip(bsizes, sizes))
    inc = all(a < b for a, b in zip(sizes, sizes[1:]))
    noninc = all(a >= b - 1e-12 for a, b in zip(ratios, ratios[1:]))
    return RegionSequenceReport(sizes, bsizes, ratios, inc, noninc)


def sup_norm_shell_count(d: int, m: int) -> int:
    """Number of sites of Z^d at sup-norm distance exactly m from the origin."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return 1
    return (2 * m + 1) ** d - (2 * m - 1) ** d


def region_to_dict(region: LatticeRegion) -> dict:
    return {
        "kind": "explicit",
        "dimension": region.dimension,
        "sites": [list(s) for s in region.sites],
    }


def region_from_dict(spec: dict) -> LatticeRegion:
    """Build a region from its serialized form.

    Accepted kinds: ``rect`` (sides, optional origin), ``lshape``
    (arms, thickness) and ``explicit`` (site list).
    """
    kind = spec.get("kind")
    if kind == "rect":
        return make_rect_region(spec["sides"], spec.get("origin"))
    if kind == "lshape":
        return make_l_shaped_region(spec["arms"], spec["thickness"])
    if kind == "explicit":
        d = int(spec["dimension"])
        return _region_from_site_iter(d, spec["sites"])
    raise ValueError(f"unknown region kind: {kind!r}")

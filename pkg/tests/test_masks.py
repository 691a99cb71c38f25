"""Rasterized compact sets: construction, IO round trips, and the
inner-boundary extractor.

The flood-fill oracle for inner_boundary re-derives reachability from
the frame with a hand-rolled BFS, independent of scipy labeling.
"""

import collections

import numpy as np
import pytest

from ecap.errors import PlacementFailed
from ecap.masks import (CompactSetMask, disc_mask, inner_boundary,
                        make_swiss_cheese)
from ecap.oscillation import Disc


def test_disc_mask_geometry():
    x = disc_mask(Disc(0.25 + 0.1j, 0.5), spacing=1 / 64)
    x.check_invariants()
    pts = x.points()
    want = np.abs(pts - (0.25 + 0.1j)) <= 0.5
    assert np.array_equal(x.mask, want)
    assert x.outer == (0.25 + 0.1j, 0.5)


def test_contains_matches_mask_cells():
    x = disc_mask(Disc(0j, 0.4), spacing=1 / 32)
    assert x.contains(0j)
    assert not x.contains(1.0 + 0j)
    # cell centers must round-trip exactly
    pts = x.points()
    got = x.contains(pts)
    assert np.array_equal(got, x.mask)
    # far outside the frame
    assert not x.contains(50.0 + 50.0j)


def test_invariants_reject_bad_masks():
    m = np.zeros((16, 16), dtype=bool)
    with pytest.raises(ValueError):
        CompactSetMask(0j, 0.1, m).check_invariants()
    m2 = np.zeros((16, 16), dtype=bool)
    m2[0, 5] = True          # touches the frame
    with pytest.raises(ValueError):
        CompactSetMask(0j, 0.1, m2).check_invariants()
    m3 = np.zeros((16, 16), dtype=bool)
    m3[8, 8] = True
    CompactSetMask(0j, 0.1, m3).check_invariants()


def test_boundary_interior_partition():
    x = disc_mask(Disc(0j, 0.3), spacing=1 / 48)
    b = x.boundary().mask
    i = x.interior().mask
    assert not (b & i).any()
    assert np.array_equal(b | i, x.mask)
    # every boundary cell has an unoccupied 8-neighbour
    ii, jj = np.nonzero(b)
    for r, c in zip(ii, jj):
        patch = x.mask[max(r - 1, 0):r + 2, max(c - 1, 0):c + 2]
        assert not patch.all()


def test_pgm_round_trip(tmp_path):
    x = make_swiss_cheese(7, Disc(0.1 - 0.2j, 1.0), 4, 0.12,
                          spacing=1 / 128)
    p = tmp_path / "set.pgm"
    x.save_pgm(p)
    y = CompactSetMask.load_pgm(p)
    assert np.array_equal(x.mask, y.mask)
    assert y.origin == x.origin
    assert y.spacing == x.spacing
    # a second save of the loaded set is byte-identical
    q = tmp_path / "again.pgm"
    y.save_pgm(q)
    assert p.read_bytes() == q.read_bytes()
    assert (tmp_path / "set.pgm.json").read_text() == \
        (tmp_path / "again.pgm.json").read_text()


def test_pgm_orientation(tmp_path):
    # single occupied cell at a known (x1, x2): top PGM row is largest x2
    m = np.zeros((8, 8), dtype=bool)
    m[5, 3] = True            # x2 index 5 of 8
    x = CompactSetMask(0j, 0.5, m)
    p = tmp_path / "one.pgm"
    x.save_pgm(p)
    raw = p.read_bytes()
    header_end = raw.index(b"255\n") + 4
    grid = np.frombuffer(raw[header_end:], dtype=np.uint8).reshape(8, 8)
    assert grid[8 - 1 - 5, 3] == 255
    assert grid.sum() == 255


def test_cheese_deterministic():
    a = make_swiss_cheese(11, Disc(0j, 1.0), 6, 0.1, spacing=1 / 128)
    b = make_swiss_cheese(11, Disc(0j, 1.0), 6, 0.1, spacing=1 / 128)
    assert np.array_equal(a.mask, b.mask)
    assert a.holes == b.holes
    c = make_swiss_cheese(12, Disc(0j, 1.0), 6, 0.1, spacing=1 / 128)
    assert not np.array_equal(a.mask, c.mask)


def test_cheese_hole_records():
    x = make_swiss_cheese(3, Disc(0j, 1.0), 8, 0.15, spacing=1 / 128)
    assert len(x.holes) == 8
    gap = x.spacing
    for c, r in x.holes:
        assert 0.075 <= r <= 0.15 + 1e-12
        assert abs(c) <= 1.0 - r - gap + 1e-12
    for i, (c1, r1) in enumerate(x.holes):
        for c2, r2 in x.holes[i + 1:]:
            assert abs(c1 - c2) >= r1 + r2 + gap - 1e-12
    # mask agrees with the record
    pts = x.points()
    want = np.abs(pts) <= 1.0
    for c, r in x.holes:
        want &= ~(np.abs(pts - c) < r)
    assert np.array_equal(x.mask, want)


def test_cheese_placement_failure():
    # 40 holes of nearly half the outer radius cannot coexist
    with pytest.raises(PlacementFailed):
        make_swiss_cheese(0, Disc(0j, 1.0), 40, 0.9, spacing=1 / 64)


def test_cheese_rejects_bad_params():
    with pytest.raises(ValueError):
        make_swiss_cheese(0, Disc(0j, 1.0), -1, 0.1)
    with pytest.raises(ValueError):
        make_swiss_cheese(0, Disc(0j, 1.0), 2, 1.5)


def _reachable_from_frame(comp):
    """4-connected BFS over the complement, started on the frame."""
    ny, nx = comp.shape
    seen = np.zeros_like(comp)
    q = collections.deque()
    for i in range(ny):
        for j in (0, nx - 1):
            if comp[i, j] and not seen[i, j]:
                seen[i, j] = True
                q.append((i, j))
    for j in range(nx):
        for i in (0, ny - 1):
            if comp[i, j] and not seen[i, j]:
                seen[i, j] = True
                q.append((i, j))
    while q:
        i, j = q.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if 0 <= a < ny and 0 <= b < nx and comp[a, b] and not seen[a, b]:
                seen[a, b] = True
                q.append((a, b))
    return seen


def _inner_boundary_oracle(x):
    comp = ~x.mask
    outer = _reachable_from_frame(comp)
    holes = comp & ~outer
    ny, nx = comp.shape
    out = np.zeros_like(x.mask)
    ii, jj = np.nonzero(x.mask)
    for i, j in zip(ii, jj):
        patch_h = holes[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2]
        patch_o = outer[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2]
        if patch_h.any() and not patch_o.any():
            out[i, j] = True
    return out


def test_inner_boundary_of_full_disc_is_empty():
    x = disc_mask(Disc(0j, 0.5), spacing=1 / 64)
    assert not inner_boundary(x).mask.any()


def test_inner_boundary_annulus():
    h = 1 / 96
    x = disc_mask(Disc(0j, 0.5), spacing=h)
    pts = x.points()
    x.mask &= ~(np.abs(pts) < 0.2)
    ib = inner_boundary(x)
    assert np.array_equal(ib.mask, _inner_boundary_oracle(x))
    # the inner rim hugs the hole circle
    d = np.abs(pts[ib.mask])
    assert ib.mask.sum() > 0
    assert d.min() >= 0.2 - 1e-12
    assert d.max() <= 0.2 + 3 * h


def test_inner_boundary_cheese_matches_oracle():
    x = make_swiss_cheese(5, Disc(0j, 1.0), 5, 0.12, spacing=1 / 128)
    ib = inner_boundary(x)
    assert np.array_equal(ib.mask, _inner_boundary_oracle(x))
    # every flagged cell sits within 2 cells of some recorded hole
    pts = x.points()[ib.mask]
    for z in pts:
        assert min(abs(z - c) - r for c, r in x.holes) <= 2 * x.spacing

"""Weight polytopes attached to faces of the maximal cone.

Each face F of the cone carries a linear span U(F) with a saturated integer
basis. Restricting the coordinate functionals of R^L to U(F) and reading them
in the dual basis yields one integer point per lattice element; their convex
hull is the weight polytope of F. The module also provides the projections
dual to span inclusions, the affine change of coordinates between the order
polytope and the apex weight polytope, chain simplices, the distinguished
faces induced by a regular subdivision, and a small normality probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .cone import Face, cone_K, face_of, sample_relative_interior, span_of_face
from .errors import NotSubface, TooLarge
from .exactgeom import (
    AffineMap,
    LatticePolytope,
    Vec,
    affine_map_through,
    integer_points,
    is_integral,
    minkowski_sum,
    rank,
    same_lattice,
    solve_linear,
    to_vec,
    vdot,
    vsub,
    zero_vec,
)
from .lattice import Lattice, ideal_label
from .poset import LinearExtension, order_ideals
from .subdivision import face_subdivision


@dataclass(frozen=True)
class WeightPolytope:
    """Hull of the dual-basis coordinates of the coordinate functionals.

    `basis` rows span U(F) ∩ Z^L and are saturated, so "integer point" has
    an unambiguous meaning in the dual coordinates. `points[a]` is the
    vector (b_1[a], ..., b_d[a]) for the basis rows b_i.
    """

    face: Face
    basis: tuple[tuple[int, ...], ...]
    points: dict[str, tuple[int, ...]]
    polytope: LatticePolytope

    def __eq__(self, other):
        if not isinstance(other, WeightPolytope):
            return NotImplemented
        return self.face == other.face

    def __hash__(self):
        return hash(self.face)


def weight_polytope(F: Face) -> WeightPolytope:
    L = F.cone.lattice
    basis = tuple(tuple(row) for row in span_of_face(F))
    points = {
        a: tuple(row[L.index(a)] for row in basis) for a in L.elements
    }
    poly = LatticePolytope(list(points.values()))
    # every coordinate functional is a vertex, and nothing else is integral
    assert len(set(points.values())) == L.size
    assert len(poly.vertices) == L.size
    assert set(integer_points(poly)) == set(points.values())
    assert poly.dim == F.dim - 1
    return WeightPolytope(F, basis, points, poly)


def _inclusion_matrix(G: Face, F: Face) -> list[list[Fraction]]:
    # rows of basis(F) written in coordinates over basis(G)
    basis_g = span_of_face(G)
    basis_f = span_of_face(F)
    cols = list(zip(*basis_g))
    out = []
    for row in basis_f:
        x = solve_linear(cols, row)
        assert x is not None, "span of the subface must sit inside the span"
        assert is_integral(x)
        out.append(x)
    return out


def project(G: Face, F: Face, point: Sequence) -> Vec:
    """Dual of the span inclusion U(F) ⊆ U(G), in dual-basis coordinates.

    Sends the coordinates of a functional on U(G) to the coordinates of its
    restriction to U(F). Carries the point of G's weight polytope labeled by
    a lattice element to the identically labeled point of F's.
    """
    if G.cone.lattice != F.cone.lattice:
        raise ValueError("faces must belong to the same cone")
    if not (G.tight_idx <= F.tight_idx):
        raise NotSubface("the source face's tight set must be contained in the target's")
    C = _inclusion_matrix(G, F)
    y = to_vec(point)
    if C and len(y) != len(C[0]):
        raise ValueError("point has the wrong length for the source face")
    return tuple(vdot(row, y) for row in C)


def _zeta_for(K) -> AffineMap:
    L = K.lattice
    apex = face_of(K, zero_vec(L.size))
    W = weight_polytope(apex)
    inputs = [L.indicator(a) for a in L.elements]
    outputs = [W.points[a] for a in L.elements]
    m = affine_map_through(inputs, outputs)
    assert m is not None
    assert rank(m.matrix) == L.poset_P.size, "map must be injective on R^P"
    assert is_integral(m.offset) and all(is_integral(r) for r in m.matrix)
    columns = [list(col) for col in zip(*m.matrix)]
    lb = W.polytope.lattice_basis
    assert lb is not None and same_lattice(columns, [list(r) for r in lb])
    return m


def zeta(L: Lattice) -> AffineMap:
    """Affine identification of R^P with the affine span of the apex weight
    polytope, sending each ideal indicator to the matching labeled point.
    Integer points correspond to Z^P under it."""
    return _zeta_for(cone_K(L))


def invert_affine(m: AffineMap, point: Sequence) -> Vec:
    """The unique preimage under an injective affine map; raises if the
    point is off the image."""
    rhs = vsub(to_vec(point), m.offset)
    x = solve_linear(m.matrix, rhs)
    assert x is not None, "point is outside the affine image"
    assert m(x) == tuple(point), "point is outside the affine image"
    return tuple(x)


@dataclass(frozen=True)
class ChainSimplex:
    """Coordinate face of the full-face weight polytope on a maximal chain."""

    extension: LinearExtension
    elements: tuple[str, ...]
    points: dict[str, tuple[int, ...]]
    polytope: LatticePolytope


def chain_simplex(ext: LinearExtension) -> ChainSimplex:
    from .lattice import birkhoff

    P = ext.poset
    L = birkhoff(P)
    K = cone_K(L)
    interior = tuple(Fraction(len(L.iota[a]) ** 2) for a in L.elements)
    full = face_of(K, interior)
    assert full.is_full
    W = weight_polytope(full)
    labels = [ideal_label(frozenset(ext.order[:k]), P.elements)
              for k in range(P.size + 1)]
    pts = {a: W.points[a] for a in labels}
    poly = LatticePolytope(list(pts.values()))
    assert poly.dim == P.size
    assert len(poly.vertices) == P.size + 1
    return ChainSimplex(ext, tuple(labels), pts, poly)


@dataclass(frozen=True)
class DistinguishedFace:
    """A face of the weight polytope cut out by one subdivision part.

    `separator` is the certifying functional, given per lattice element: it
    vanishes exactly on `elements` and is at least 1 elsewhere.
    """

    elements: tuple[str, ...]
    separator: tuple[Fraction, ...]
    polytope: LatticePolytope


def distinguished_faces(F: Face) -> list[DistinguishedFace]:
    """One face of the weight polytope per part of the regular subdivision.

    Each face is the hull of the projected chain simplices of the part's
    extensions. Certified three ways: a separating functional inside the
    face's span, dimension |P|, and a bijection with the part's order
    polytope vertices through the apex identification.
    """
    L = F.cone.lattice
    K = F.cone
    sub = face_subdivision(F)
    W = weight_polytope(F)
    w = sample_relative_interior(F)
    apex = face_of(K, zero_vec(L.size))
    zmap = _zeta_for(K)
    basis_cols = list(zip(*span_of_face(F)))
    out = []
    for part in sub.parts:
        members = set(part.vertex_elements)
        raw = [part.value(L.indicator(a)) - w[i] for i, a in enumerate(L.elements)]
        positive = [x for x in raw if x > 0]
        assert all(x == 0 for a, x in zip(L.elements, raw) if a in members)
        assert len(positive) == L.size - len(members)
        scale = max([Fraction(1)] + [1 / x for x in positive])
        sep = tuple(x * math.ceil(scale) for x in raw)
        # the functional lives in the face's span, so it cuts a genuine face
        assert solve_linear(basis_cols, sep) is not None
        pts = [W.points[a] for a in part.vertex_elements]
        poly = LatticePolytope(pts)
        assert len(poly.vertices) == len(members)
        assert poly.dim == L.poset_P.size
        ideal_sets = set()
        for a in part.vertex_elements:
            back = invert_affine(zmap, project(F, apex, W.points[a]))
            assert back == L.indicator(a)
            ideal_sets.add(frozenset(L.iota[a]))
        assert ideal_sets == set(order_ideals(part.order))
        out.append(DistinguishedFace(part.vertex_elements, sep, poly))
    return out


def normality_probe(Q: LatticePolytope, k_max: int) -> Optional[int]:
    """Smallest k <= k_max whose dilation kQ has an integer point that is
    not a sum of k integer points of Q, or None when every level passes."""
    if k_max > 4:
        raise TooLarge("normality probe is capped at k_max = 4")
    assert all(is_integral(v) for v in Q.vertices)
    base = set(integer_points(Q))
    sums = set(base)
    for k in range(2, k_max + 1):
        sums = minkowski_sum(sums, base)
        if not set(integer_points(Q.scaled(k))) <= sums:
            return k
    return None


def weight_polytope_json(F: Face) -> dict:
    W = weight_polytope(F)
    faces = distinguished_faces(F)
    return {
        "face": F.key(),
        "basis": [list(row) for row in W.basis],
        "points": {a: list(W.points[a]) for a in W.face.cone.lattice.elements},
        "distinguished": [list(d.elements) for d in faces],
    }

"""Reference triangulations used for engine validation, plus random complexes.

The small closed surfaces/manifolds here are classical minimal or
near-minimal triangulations; each one is certified by the test suite through
its cohomology, its cup structure and, where applicable, its Wu classes.
"""

from __future__ import annotations

from itertools import combinations, product

from .simplicial import SimplicialComplex

__all__ = [
    "sphere", "torus_7", "rp2_6", "rp3_40", "cp2_9", "random_complex",
]


def sphere(n: int) -> SimplicialComplex:
    """Boundary of the (n+1)-simplex: the minimal triangulated n-sphere."""
    verts = list(range(n + 2))
    facets = list(combinations(verts, n + 1))
    return SimplicialComplex(verts, facets)


def torus_7() -> SimplicialComplex:
    """The 7-vertex (Moebius-Kantor) torus: triangles {i,i+1,i+3}, {i,i+2,i+3} mod 7."""
    verts = list(range(7))
    facets = []
    for i in range(7):
        facets.append(sorted([(i) % 7, (i + 1) % 7, (i + 3) % 7]))
        facets.append(sorted([(i) % 7, (i + 2) % 7, (i + 3) % 7]))
    return SimplicialComplex(verts, facets)


def rp2_6() -> SimplicialComplex:
    """The 6-vertex real projective plane (antipodal quotient of the icosahedron)."""
    facets = [
        (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
        (2, 3, 5), (2, 4, 5), (2, 4, 6), (3, 4, 6), (3, 5, 6),
    ]
    return SimplicialComplex(range(1, 7), facets)


def rp3_40() -> SimplicialComplex:
    """RP^3 as the antipodal quotient of the barycentric subdivision of the 16-cell.

    Faces of the boundary of the 4-dimensional cross-polytope never contain an
    antipodal vertex pair, so the quotient of the subdivision by the antipodal
    map is again a simplicial complex: 40 vertices, 192 tetrahedra.
    """
    # faces of the cross-polytope boundary: sign vectors on nonempty subsets
    faces = []
    for k in range(1, 5):
        for axes in combinations(range(1, 5), k):
            for signs in product((1, -1), repeat=k):
                faces.append(frozenset(s * a for s, a in zip(signs, axes)))

    def antipode(f):
        return frozenset(-v for v in f)

    def label(f):
        g = antipode(f)
        a, b = sorted([tuple(sorted(f)), tuple(sorted(g))])
        return a

    orbit_labels = sorted({label(f) for f in faces}, key=lambda t: (len(t), t))
    index = {lab: i for i, lab in enumerate(orbit_labels)}

    facets = set()
    top = [f for f in faces if len(f) == 4]
    for tet in top:
        chain_pool = [f for f in faces if f < tet]
        # maximal chains F0 < F1 < F2 < tet
        for f2 in (f for f in chain_pool if len(f) == 3):
            for f1 in (f for f in chain_pool if len(f) == 2 and f < f2):
                for f0 in (f for f in chain_pool if len(f) == 1 and f < f1):
                    facet = frozenset(
                        index[label(f)] for f in (f0, f1, f2, tet)
                    )
                    facets.add(tuple(sorted(facet)))
    return SimplicialComplex(range(len(orbit_labels)), sorted(facets))


# The 9-vertex complex projective plane.  Facets derived by an exhaustive
# search over unions of translation orbits of 5-element subsets of the affine
# plane F_3 x F_3 (vertex v at grid position divmod(v, 3)), keeping a
# pseudomanifold with Euler characteristic 3 whose vertex links are all
# homology 3-spheres and whose middle cup square is unimodular; the test
# suite re-certifies the homology, the intersection pairing and the Wu class.
_CP2_9_FACETS: tuple[tuple[int, ...], ...] = (
    (0, 1, 2, 3, 4), (0, 1, 2, 3, 5), (0, 1, 2, 4, 5), (0, 1, 3, 4, 6),
    (0, 1, 3, 5, 7), (0, 1, 3, 6, 7), (0, 1, 4, 5, 6), (0, 1, 5, 6, 8),
    (0, 1, 5, 7, 8), (0, 1, 6, 7, 8), (0, 2, 3, 4, 8), (0, 2, 3, 5, 8),
    (0, 2, 4, 5, 6), (0, 2, 4, 6, 7), (0, 2, 4, 7, 8), (0, 2, 5, 6, 8),
    (0, 2, 6, 7, 8), (0, 3, 4, 6, 7), (0, 3, 4, 7, 8), (0, 3, 5, 7, 8),
    (1, 2, 3, 4, 8), (1, 2, 3, 5, 7), (1, 2, 3, 6, 7), (1, 2, 3, 6, 8),
    (1, 2, 4, 5, 7), (1, 2, 4, 7, 8), (1, 2, 6, 7, 8), (1, 3, 4, 6, 8),
    (1, 4, 5, 6, 8), (1, 4, 5, 7, 8), (2, 3, 5, 6, 7), (2, 3, 5, 6, 8),
    (2, 4, 5, 6, 7), (3, 4, 5, 6, 7), (3, 4, 5, 6, 8), (3, 4, 5, 7, 8),
)


def cp2_9() -> SimplicialComplex:
    return SimplicialComplex(range(9), _CP2_9_FACETS)


def random_complex(rng, n_vertices: int = 8, dim: int = 3, n_facets: int | None = None) -> SimplicialComplex:
    """Random pure-ish complex: maximal faces drawn among <= (dim+1)-subsets."""
    verts = list(range(n_vertices))
    if n_facets is None:
        n_facets = n_vertices
    picked: list[tuple[int, ...]] = []
    for _ in range(n_facets):
        k = int(rng.integers(2, dim + 2))
        k = min(k, n_vertices)
        chosen = sorted(rng.choice(n_vertices, size=k, replace=False).tolist())
        picked.append(tuple(chosen))
    # prune non-maximal faces so the facet list is legal
    maximal = [
        f for f in set(picked)
        if not any(set(f) < set(g) for g in picked)
    ]
    used = {v for f in maximal for v in f}
    maximal += [(v,) for v in verts if v not in used]
    return SimplicialComplex(verts, sorted(maximal))

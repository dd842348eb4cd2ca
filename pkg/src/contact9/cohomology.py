"""Cohomology groups and class-level operations of a finite simplicial complex.

Integral groups come from Smith normal forms of the coboundary matrices.
Groups with Z/2^j coefficients come from the same integral machinery applied
to the lattice of cochains whose coboundary vanishes mod 2^j, so no floating
point or probabilistic step is involved anywhere.

Every computed group carries explicit representative cocycles, and cochains
can be converted back to coordinates, which is what makes the class-level
operations (cup, Steenrod squares, Bocksteins, coefficient reductions) exact
and testable.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from . import intlinalg
from .intlinalg import safe_matmul, snf, SNF
from .simplicial import Cochain, SimplicialComplex, coboundary, coboundary_matrix, cup, cup_i

__all__ = ["GradedGroup", "CohomologyClass", "Cohomology", "cohomology"]


@dataclass(frozen=True)
class GradedGroup:
    """One graded piece: free rank, torsion chain, and generator cocycles.

    Generators are ordered free part first, then torsion in increasing order
    of the torsion coefficients (which form a divisibility chain).
    """

    degree: int
    free_rank: int
    torsion: tuple[int, ...]
    basis_cocycles: tuple[Cochain, ...]

    @property
    def n_generators(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def orders(self) -> tuple[int, ...]:
        """Per-generator order; 0 means infinite."""
        return (0,) * self.free_rank + self.torsion

    def describe(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class CohomologyClass:
    """A cohomology class in generator coordinates (torsion coords reduced)."""

    modulus: int
    degree: int
    coords: tuple[int, ...]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


@dataclass
class _DegreeData:
    group: GradedGroup
    basis_matrix: np.ndarray          # columns: adapted lattice basis of the cocycle lattice
    basis_snf: SNF | None
    orders: list[int]                 # per column: 0 free, t >= 1 (1 = killed)
    gen_cols: list[int]               # public generator order (free first, torsion ascending)


def _np_coboundary(x: SimplicialComplex, d: int) -> np.ndarray:
    rows = x.n_simplices(d + 1)
    cols = x.n_simplices(d)
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.int64)
    return np.asarray(coboundary_matrix(x, d), dtype=np.int64)


def _solve_columns(res: SNF, rhs: np.ndarray) -> np.ndarray:
    """Solve A X = rhs column-wise through a precomputed SNF; asserts solvability."""
    rows, cols = res.d.shape
    c = safe_matmul(res.u, rhs)
    y = np.zeros((cols, rhs.shape[1]), dtype=c.dtype)
    for i in range(rows):
        di = int(res.d[i, i]) if i < min(rows, cols) else 0
        if di == 0:
            if np.any(c[i, :] != 0):
                raise ArithmeticError("inconsistent lattice system")
        else:
            row = c[i, :]
            if np.any(row % di != 0):
                raise ArithmeticError("lattice system not solvable over the integers")
            if i < cols:
                y[i, :] = row // di
    return safe_matmul(res.v, y)


class Cohomology:
    """All cohomology rings of one complex, with class-level operations."""

    def __init__(self, complex: SimplicialComplex):
        self.complex = complex
        self._delta: dict[int, np.ndarray] = {}
        self._delta_snf: dict[int, SNF] = {}
        self._data: dict[tuple[int, int], _DegreeData] = {}

    # -- raw matrices ------------------------------------------------

    def delta(self, d: int) -> np.ndarray:
        if d not in self._delta:
            self._delta[d] = _np_coboundary(self.complex, d)
        return self._delta[d]

    def delta_snf(self, d: int) -> SNF:
        if d not in self._delta_snf:
            self._delta_snf[d] = snf(self.delta(d))
        return self._delta_snf[d]

    # -- group construction -------------------------------------------

    def _degree_data(self, modulus: int, degree: int) -> _DegreeData:
        key = (modulus, degree)
        if key not in self._data:
            self._data[key] = self._build(modulus, degree)
        return self._data[key]

    def _build(self, modulus: int, degree: int) -> _DegreeData:
        x = self.complex
        n_d = x.n_simplices(degree)
        if n_d == 0:
            group = GradedGroup(degree, 0, (), ())
            return _DegreeData(group, np.zeros((0, 0), dtype=np.int64), None, [], [])

        if modulus == 0:
            # saturated kernel lattice of the coboundary
            res = self.delta_snf(degree)
            lattice = np.asarray(res.v[:, res.rank :])
            relations = self.delta(degree - 1) if degree > 0 else np.zeros((n_d, 0), dtype=np.int64)
        else:
            # lattice of integer cochains whose coboundary vanishes mod 2^j
            res = self.delta_snf(degree)
            cols = []
            rows, colsn = res.d.shape
            for i in range(colsn):
                di = int(res.d[i, i]) if i < min(rows, colsn) else 0
                scale = modulus // gcd(di, modulus) if i < res.rank else 1
                cols.append(np.asarray(res.v[:, i]) * scale)
            lattice = np.stack(cols, axis=1)
            db = self.delta(degree - 1) if degree > 0 else np.zeros((n_d, 0), dtype=np.int64)
            relations = np.concatenate([db, modulus * np.eye(n_d, dtype=np.int64)], axis=1)

        lat_snf = snf(lattice)
        k = lattice.shape[1]
        if relations.shape[1] == 0:
            rel_in_lattice = np.zeros((k, 0), dtype=np.int64)
        else:
            rel_in_lattice = _solve_columns(lat_snf, np.asarray(relations))

        rel_snf = snf(rel_in_lattice)
        adapted = safe_matmul(lattice, rel_snf.u_inv)
        orders: list[int] = []
        for i in range(k):
            if i < rel_snf.rank:
                orders.append(int(rel_snf.d[i, i]))
            else:
                orders.append(0)
        if modulus:
            for t in orders:
                if t == 0 or modulus % t:
                    raise ArithmeticError("mod-2^j group has a generator order not dividing the modulus")

        free_cols = [i for i, t in enumerate(orders) if t == 0]
        tors_cols = [i for i, t in enumerate(orders) if t >= 2]
        tors_cols.sort(key=lambda i: orders[i])
        gen_cols = free_cols + tors_cols

        reps = []
        for c in gen_cols:
            vec = [int(v) for v in adapted[:, c]]
            reps.append(Cochain.from_vector(x, degree, modulus, vec))
        group = GradedGroup(
            degree=degree,
            free_rank=len(free_cols),
            torsion=tuple(orders[c] for c in tors_cols),
            basis_cocycles=tuple(reps),
        )
        return _DegreeData(group, adapted, snf(adapted), orders, gen_cols)

    def group(self, modulus: int, degree: int) -> GradedGroup:
        return self._degree_data(modulus, degree).group

    def groups(self, modulus: int) -> list[GradedGroup]:
        return [self.group(modulus, d) for d in range(self.complex.dimension + 1)]

    def dim_f2(self, degree: int) -> int:
        return len(self.group(2, degree).torsion)

    # -- classes -------------------------------------------------------

    def zero_class(self, modulus: int, degree: int) -> CohomologyClass:
        g = self.group(modulus, degree)
        return CohomologyClass(modulus, degree, (0,) * g.n_generators)

    def basis_classes(self, modulus: int, degree: int) -> list[CohomologyClass]:
        g = self.group(modulus, degree)
        out = []
        for i in range(g.n_generators):
            coords = [0] * g.n_generators
            coords[i] = 1
            out.append(CohomologyClass(modulus, degree, tuple(coords)))
        return out

    def class_of(self, cochain: Cochain) -> CohomologyClass:
        """Coordinates of a cocycle's class; raises if it is not a cocycle."""
        if cochain.complex is not self.complex:
            raise ValueError("cochain belongs to a different complex")
        d = cochain.degree
        if not coboundary(cochain).is_zero():
            raise ValueError("not a cocycle")
        data = self._degree_data(cochain.modulus, d)
        if data.group.n_generators == 0:
            return CohomologyClass(cochain.modulus, d, ())
        vec = np.asarray(cochain.vector(), dtype=object).reshape(-1, 1)
        y = _solve_columns(data.basis_snf, vec).reshape(-1)
        coords = []
        for c in data.gen_cols:
            t = data.orders[c]
            coords.append(int(y[c]) % t if t else int(y[c]))
        return CohomologyClass(cochain.modulus, d, tuple(coords))

    def representative(self, cls: CohomologyClass) -> Cochain:
        data = self._degree_data(cls.modulus, cls.degree)
        g = data.group
        if len(cls.coords) != g.n_generators:
            raise ValueError("coordinate length mismatch")
        out = Cochain(self.complex, cls.degree, cls.modulus, {})
        for c, rep in zip(cls.coords, g.basis_cocycles):
            if c:
                out = out + rep.scale(int(c))
        return out

    def add(self, a: CohomologyClass, b: CohomologyClass) -> CohomologyClass:
        if (a.modulus, a.degree) != (b.modulus, b.degree):
            raise ValueError("class addition needs matching ring and degree")
        orders = self.group(a.modulus, a.degree).orders
        coords = tuple(
            (x + y) % t if t else x + y for x, y, t in zip(a.coords, b.coords, orders)
        )
        return CohomologyClass(a.modulus, a.degree, coords)

    def scale(self, k: int, a: CohomologyClass) -> CohomologyClass:
        orders = self.group(a.modulus, a.degree).orders
        coords = tuple((k * x) % t if t else k * x for x, t in zip(a.coords, orders))
        return CohomologyClass(a.modulus, a.degree, coords)

    # -- operations ------------------------------------------------------

    def cup(self, a: CohomologyClass, b: CohomologyClass) -> CohomologyClass:
        if a.modulus != b.modulus:
            raise ValueError("cup product needs matching coefficient ring")
        z = cup(self.representative(a), self.representative(b))
        return self.class_of(z)

    def sq(self, k: int, a: CohomologyClass) -> CohomologyClass:
        """Steenrod square on a mod-2 class, via the higher cup products."""
        if a.modulus != 2:
            raise ValueError("Steenrod squares act on mod-2 classes")
        if k < 0:
            raise ValueError("negative Steenrod square")
        p = a.degree
        if k > p:
            return self.zero_class(2, p + k)
        rep = self.representative(a)
        return self.class_of(cup_i(rep, rep, p - k))

    def bockstein(self, a: CohomologyClass) -> CohomologyClass:
        """Connecting map H^i(X; Z/2^j) -> H^{i+1}(X; Z): lift, coboundary, divide."""
        m = a.modulus
        if m < 2:
            raise ValueError("Bockstein acts on mod-2^j classes")
        rep = self.representative(a)
        lift = Cochain(self.complex, rep.degree, 0, dict(rep.values))
        dlift = coboundary(lift)
        vals = {}
        for s, c in dlift.values.items():
            if c % m:
                raise AssertionError("Bockstein lift produced a coboundary not divisible by the modulus")
            vals[s] = c // m
        return self.class_of(Cochain(self.complex, rep.degree + 1, 0, vals))

    def reduce_mod(self, j: int, a: CohomologyClass) -> CohomologyClass:
        """Coefficient reduction H^i(X; Z) -> H^i(X; Z/2^j)."""
        if a.modulus != 0:
            raise ValueError("reduce_mod acts on integral classes")
        if j < 1:
            raise ValueError("modulus exponent must be positive")
        m = 2 ** j
        rep = self.representative(a)
        return self.class_of(Cochain(self.complex, rep.degree, m, dict(rep.values)))


def cohomology(x: SimplicialComplex, modulus: int = 0) -> list[GradedGroup]:
    """Cohomology groups of a complex with Z (modulus 0) or Z/2^j coefficients."""
    return Cohomology(x).groups(modulus)


def pullback_cochain(domain: SimplicialComplex, c: Cochain, vertex_map) -> Cochain:
    """Pull a cochain back along the simplicial isomorphism induced by vertex_map.

    ``vertex_map`` sends vertices of ``domain`` to vertices of ``c.complex``;
    the sign of the per-simplex sorting permutation makes this a chain map
    over the integers.
    """
    out: dict[tuple, int] = {}
    target = c.complex
    for sigma in domain.simplices(c.degree):
        image = [vertex_map[v] for v in sigma]
        key = {v: i for i, v in enumerate(image)}
        srt = target.sort_simplex(image)
        perm = [key[v] for v in srt]
        sign = _perm_sign(perm)
        val = c.values.get(tuple(srt), 0)
        if val:
            out[sigma] = sign * val
    return Cochain(domain, c.degree, c.modulus, out)


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def induced_iso_matrix(
    dst: Cohomology, src: Cohomology, vertex_map, modulus: int, degree: int
) -> np.ndarray:
    """Matrix (in generator coordinates) of the pullback H(src) -> H(dst).

    ``vertex_map`` sends vertices of dst.complex to vertices of src.complex
    and must define a simplicial isomorphism.
    """
    g_src = src.group(modulus, degree)
    g_dst = dst.group(modulus, degree)
    cols = []
    for rep in g_src.basis_cocycles:
        pulled = pullback_cochain(dst.complex, rep, vertex_map)
        cols.append(dst.class_of(pulled).coords)
    out = np.zeros((g_dst.n_generators, g_src.n_generators), dtype=np.int64)
    for j, c in enumerate(cols):
        out[:, j] = c
    return out

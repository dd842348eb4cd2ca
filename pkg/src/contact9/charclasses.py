"""Wu and Stiefel-Whitney classes, integral lifts, and the degree-8 coset
arithmetic used by the decision procedure.

Wu classes are solved from the defining property <v_k x, [M]> = <Sq^k x, [M]>
(unique by nondegeneracy of the mod-2 intersection pairing) rather than
declared, so hand-built models get cross-checked.  Stiefel-Whitney classes
come from the Wu formula w = Sq(v); the integral classes are Bocksteins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import f2
from .model import CohomologyModel, F2Class, ManifoldModel, ZClass

__all__ = [
    "WuClasses", "SWClasses", "CosetH8", "SpincData",
    "WuSolveError", "ModelInvariantError", "PreconditionError",
    "solve_wu_degree", "wu_classes", "sw_classes", "integral_lift",
    "random_integral_lift", "compute_dm", "annihilator_subspace",
    "sq2_image_subspace", "coset_reduce", "zero_coset",
    "half_product", "half_product_solutions", "sigma_w4", "spinc_data",
]


class WuSolveError(ValueError):
    """The Wu-class linear system has no (unique) solution: bad pairing data."""


class ModelInvariantError(ValueError):
    """Model data contradicts an identity that holds for closed manifolds."""


class PreconditionError(ValueError):
    """Operation called outside its contract."""


def _cohomology(m) -> CohomologyModel:
    return m.cohomology if isinstance(m, ManifoldModel) else m


@dataclass(frozen=True)
class WuClasses:
    """Wu classes; only v2 and v4 can be nonzero in the scope of this package."""

    by_degree: dict

    @property
    def v2(self) -> F2Class:
        return self.by_degree[2]

    @property
    def v4(self) -> F2Class:
        return self.by_degree[4]


@dataclass(frozen=True)
class SWClasses:
    """Stiefel-Whitney classes w_1..w_n plus the integral classes in degrees 3, 7."""

    w: dict
    w3_integral: ZClass
    w7_integral: ZClass

    @property
    def W3(self) -> ZClass:
        return self.w3_integral

    @property
    def W7(self) -> ZClass:
        return self.w7_integral


@dataclass(frozen=True)
class SpincData:
    """Integral lift data for a model with vanishing degree-3 integral class."""

    c: ZClass            # integral lift of w2
    v: ZClass            # integral lift of w6
    half_cv: ZClass      # a class with 2 * half_cv = c v
    p_c: ZClass | None = None  # externally supplied degree-4 class, if any


class CosetH8:
    """A coset of a subspace of H^8(M; Z/2), canonically reduced."""

    def __init__(self, representative: F2Class, subspace: f2.Subspace):
        if len(representative.bits) != subspace.ambient_dim:
            raise ValueError("representative/subspace dimension mismatch")
        red = subspace.reduce(representative.vec())
        self.representative = F2Class(representative.degree, tuple(int(b) for b in red))
        self.subspace = subspace

    def is_zero(self) -> bool:
        return self.representative.is_zero()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CosetH8)
            and self.subspace == other.subspace
            and self.representative == other.representative
        )

    def __hash__(self):
        return hash((self.representative, self.subspace))

    def __repr__(self):
        return f"CosetH8(rep={self.representative.bits}, subspace_dim={self.subspace.dim})"


# -- Wu / Stiefel-Whitney ----------------------------------------------------


def solve_wu_degree(m: CohomologyModel, k: int) -> F2Class:
    """The unique v_k with <v_k x, [M]> = <Sq^k x, [M]> for every x."""
    n = m.dimension
    comp = n - k
    xs = m.basis_f2(comp)
    rhs = np.array([m.eval_top(m.sq_map(k, x)) if k <= comp else 0 for x in xs], dtype=np.uint8)
    dim_k = m.f2_dim(k)
    if dim_k == 0:
        if rhs.any():
            raise WuSolveError(f"degree-{k} Wu system inconsistent: no candidate classes")
        return m.zero_f2(k)
    mat = f2.zeros(len(xs), dim_k)
    for r, x in enumerate(xs):
        for c, e in enumerate(m.basis_f2(k)):
            mat[r, c] = m.pair(e, x)
    sol = f2.solve(mat, rhs)
    if sol is None:
        raise WuSolveError(f"degree-{k} Wu system unsolvable")
    if f2.nullspace(mat).shape[0]:
        raise WuSolveError(f"degree-{k} Wu system underdetermined: degenerate pairing")
    return m.f2(k, sol)


def wu_classes(model) -> WuClasses:
    """Wu classes of an orientable model; vanishing outside degrees 2, 4 is
    verified from the pairings, never assumed."""
    m = _cohomology(model)
    if not m.orientable:
        raise PreconditionError("Wu classes require an orientable model")
    by_degree = {}
    for k in range(1, m.dimension + 1):
        by_degree[k] = solve_wu_degree(m, k)
    if not by_degree[1].is_zero():
        raise ModelInvariantError("first Wu class nonzero: model is not orientable")
    for k, v in by_degree.items():
        if k not in (2, 4) and not v.is_zero():
            raise ModelInvariantError(f"Wu class in degree {k} is nonzero")
    return WuClasses(by_degree=by_degree)


def sw_classes(model) -> SWClasses:
    """Stiefel-Whitney classes via w_k = sum_i Sq^i(v_{k-i})."""
    m = _cohomology(model)
    wu = wu_classes(model)
    n = m.dimension
    v = {0: m.f2(0, [1]), **wu.by_degree}
    w = {}
    for k in range(1, n + 1):
        acc = m.zero_f2(k)
        for i in range(k + 1):
            vk = v.get(k - i)
            if vk is not None:
                acc = acc + m.sq_map(i, vk)
        w[k] = acc
    w3i = m.beta_map(w[2])
    w7i = m.beta_map(w[6]) if n >= 6 else m.zero_z(7)
    out = SWClasses(w=w, w3_integral=w3i, w7_integral=w7i)
    if n == 9:
        _check_sw_identities(m, out)
    return out


def _check_sw_identities(m: CohomologyModel, sw: SWClasses):
    w = sw.w
    for i in (1, 2, 3):
        if w[2 * i + 1] != m.sq_map(1, w[2 * i]):
            raise ModelInvariantError(f"w{2*i+1} != Sq^1 w{2*i}")
    w2sq = m.cup(w[2], w[2])
    if w[8] != m.cup(w[4], w[4]) + m.cup(w2sq, w2sq):
        raise ModelInvariantError("w8 != w4^2 + w2^4")
    if not w[9].is_zero():
        raise ModelInvariantError("w9 != 0")


# -- integral lifts ----------------------------------------------------------


def integral_lift(model, x: F2Class) -> ZClass | None:
    """A class z with rho2(z) = x, or None when the Bockstein obstructs one.

    The particular solution has all coordinates in {0, 1} (least non-negative
    residues); downstream computations are tested for independence of this
    choice.
    """
    m = _cohomology(model)
    mtx = m.rho2[x.degree]
    sol = f2.solve(mtx, x.vec())
    if sol is None:
        return None
    return m.z(x.degree, [int(b) for b in sol])


def random_integral_lift(model, x: F2Class, rng) -> ZClass | None:
    """A uniformly perturbed lift: particular solution plus a random element
    of the kernel of the reduction."""
    m = _cohomology(model)
    base = integral_lift(model, x)
    if base is None:
        return None
    mtx = m.rho2[x.degree]
    null = f2.nullspace(mtx)
    coords = list(base.coords)
    for row in null:
        if rng.integers(0, 2):
            coords = [c + int(b) for c, b in zip(coords, row)]
    for i in range(len(coords)):
        # even multiples of any generator reduce to zero
        coords[i] += 2 * int(rng.integers(-3, 4))
    return m.z(x.degree, coords)


# -- subspaces and cosets -----------------------------------------------------


def reduction_image_subspace(m: CohomologyModel, degree: int) -> f2.Subspace:
    """Image of the mod-2 reduction in the given degree."""
    cols = [m.rho2[degree][:, c] for c in range(m.z_gens(degree))]
    return f2.Subspace(cols, ambient_dim=m.f2_dim(degree))


def bockstein_kernel_subspace(m: CohomologyModel, degree: int) -> f2.Subspace:
    """Kernel of the mod-2 Bockstein in the given degree."""
    beta = m.beta[degree]
    orders = m.z_orders(degree + 1) if degree + 1 <= m.dimension else ()
    rows = []
    for c, o in enumerate(orders):
        row = [(1 if int(beta[c, j]) % o else 0) if o else (1 if beta[c, j] else 0)
               for j in range(m.f2_dim(degree))]
        rows.append(row)
    if not rows:
        return f2.Subspace(list(np.eye(m.f2_dim(degree), dtype=np.uint8)), ambient_dim=m.f2_dim(degree))
    mat = np.asarray(rows, dtype=np.uint8)
    return f2.Subspace(list(f2.nullspace(mat)), ambient_dim=m.f2_dim(degree))


def sq2_image_subspace(m: CohomologyModel, degree: int = 6) -> f2.Subspace:
    """Sq^2 of the integrally liftable part of H^degree, inside H^{degree+2}."""
    kernel = bockstein_kernel_subspace(m, degree)
    vecs = []
    for row in kernel.basis:
        img = m.sq_map(2, m.f2(degree, row))
        vecs.append(img.vec())
    return f2.Subspace(vecs, ambient_dim=m.f2_dim(degree + 2))


def zero_coset(model) -> CosetH8:
    m = _cohomology(model)
    return CosetH8(m.zero_f2(8), sq2_image_subspace(m, 6))


def coset_reduce(x: F2Class, model) -> CosetH8:
    """The coset of Sq^2(rho2 H^6) represented by a degree-8 class."""
    m = _cohomology(model)
    if x.degree != 8:
        raise PreconditionError("coset arithmetic lives in degree 8")
    return CosetH8(x, sq2_image_subspace(m, 6))


# -- the degree-one subspace and its annihilator description ------------------


def compute_dm(model) -> f2.Subspace:
    """Degree-one classes whose product with w2 lies in the mod-2 image of
    the degree-3 torsion; checked against the annihilator description."""
    m = _cohomology(model)
    sw = sw_classes(model)
    w2 = sw.w[2]
    dim1 = m.f2_dim(1)
    dim3 = m.f2_dim(3)
    mul = f2.zeros(dim3, dim1)
    for c, e in enumerate(m.basis_f2(1)):
        mul[:, c] = m.cup(e, w2).vec()
    torsion_cols = [
        m.rho2[3][:, m.piece(3).z_rank + t] for t in range(len(m.piece(3).z_torsion))
    ]
    torsion_image = f2.Subspace(torsion_cols, ambient_dim=dim3)
    if torsion_image.dim:
        aug = np.concatenate([mul, torsion_image.basis.T], axis=1)
    else:
        aug = mul
    null = f2.nullspace(aug)
    dm = f2.Subspace([row[:dim1] for row in null], ambient_dim=dim1)

    ann = annihilator_subspace(m)
    if dm != ann:
        raise ModelInvariantError(
            "degree-one subspace disagrees with the annihilator of Sq^2(rho2 H^6)"
        )
    return dm


def annihilator_subspace(m: CohomologyModel) -> f2.Subspace:
    """Annihilator in H^1 of Sq^2(rho2 H^6) under the intersection pairing."""
    image = reduction_image_subspace(m, 6)
    vecs = [m.sq_map(2, m.f2(6, row)).vec() for row in image.basis]
    sq2img = f2.Subspace(vecs, ambient_dim=m.f2_dim(8))
    dim1 = m.f2_dim(1)
    rows = []
    for vec in sq2img.basis:
        z = m.f2(8, vec)
        rows.append([m.pair(e, z) for e in m.basis_f2(1)])
    if not rows:
        return f2.Subspace(list(np.eye(dim1, dtype=np.uint8)), ambient_dim=dim1)
    return f2.Subspace(list(f2.nullspace(np.asarray(rows, dtype=np.uint8))), ambient_dim=dim1)


def bockstein_vanishes_on(m: CohomologyModel, subspace: f2.Subspace) -> bool:
    return all(m.beta_map(m.f2(1, row)).is_zero() for row in subspace.basis)


# -- half products -------------------------------------------------------------


def half_product_solutions(c: ZClass, v: ZClass, model) -> list[ZClass]:
    """All solutions d of 2d = c v in degree 8 (one per 2-torsion element)."""
    m = _cohomology(model)
    w = m.cup_z(c, v)
    if not m.rho2_map(w).is_zero():
        raise ModelInvariantError("product of the chosen lifts is not divisible by 2")
    orders = m.z_orders(8)
    base = []
    options: list[list[int]] = []
    for coord, o in zip(w.coords, orders):
        coord = int(coord)
        if o == 0:
            if coord % 2:
                raise ModelInvariantError("even product has an odd free coordinate")
            base.append(coord // 2)
            options.append([0])
        elif o % 2:
            base.append((coord * pow(2, -1, o)) % o)
            options.append([0])
        else:
            if coord % 2:
                raise ModelInvariantError("even product has an odd torsion coordinate")
            base.append(coord // 2)
            options.append([0, o // 2])
    sols = [[]]
    for coord, opts in zip(base, options):
        sols = [s + [coord + o] for s in sols for o in opts]
        if len(sols) > 256:
            raise ModelInvariantError("half-product solution set unexpectedly large")
    return [m.z(8, s) for s in sols]


def half_product(c: ZClass, v: ZClass, model) -> ZClass:
    """The canonical solution d of 2d = c v (coordinate-wise halving)."""
    return half_product_solutions(c, v, model)[0]


# -- the top invariant ---------------------------------------------------------


def sigma_w4(model: ManifoldModel, sw: SWClasses | None = None):
    """<w4 . phi_hat, [M]> for spin models: 0/1, or None when phi_hat is
    needed but absent.  w4 = 0 forces the value 0 without phi_hat."""
    m = model.cohomology
    sw = sw or sw_classes(model)
    if not sw.w[2].is_zero():
        raise PreconditionError("the top invariant is defined for spin models only")
    w4 = sw.w[4]
    if w4.is_zero():
        return 0
    if model.phi_hat is None:
        return None
    return m.pair(w4, model.phi_hat)


def spinc_data(model, sw: SWClasses | None = None, rng=None) -> SpincData:
    """Choose integral lifts c of w2 and v of w6 plus a half product.

    With ``rng`` the lifts are randomized inside their coset, which is how the
    choice-independence guarantees are exercised.
    """
    m = _cohomology(model)
    sw = sw or sw_classes(model)
    if not sw.W3.is_zero():
        raise PreconditionError("integral lift data needs a vanishing degree-3 integral class")
    lift = (lambda x: random_integral_lift(model, x, rng)) if rng is not None else (
        lambda x: integral_lift(model, x)
    )
    c = lift(sw.w[2])
    v = lift(sw.w[6])
    if c is None:
        raise ModelInvariantError("w2 has no integral lift despite vanishing Bockstein")
    if v is None:
        raise ModelInvariantError("w6 has no integral lift: impossible for a closed manifold model with vanishing degree-3 class")
    sols = half_product_solutions(c, v, model)
    if rng is not None:
        half = sols[int(rng.integers(0, len(sols)))]
    else:
        half = sols[0]
    return SpincData(c=c, v=v, half_cv=half)

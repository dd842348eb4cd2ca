"""Steenrod squares on simplicial cohomology: axioms, the Cartan formula,
the composite relation used in degree bookkeeping, and the compatibility
between the Bockstein route and the cup-product route to Sq^1."""

import numpy as np

from contact9.cohomology import Cohomology
from contact9.complexes import cp2_9, random_complex, rp2_6, sphere, torus_7
from contact9.simplicial import Cochain


def random_cocycles(coh, degree, rng, count):
    from contact9 import f2

    x = coh.complex
    simps = x.simplices(degree)
    if not simps:
        return []
    delta = np.asarray(coh.delta(degree), dtype=np.uint8) % 2
    null = f2.nullspace(delta) if delta.size else np.eye(len(simps), dtype=np.uint8)
    out = []
    for _ in range(count):
        combo = np.zeros(len(simps), dtype=np.uint8)
        for row in null:
            if rng.integers(0, 2):
                combo ^= row
        out.append(Cochain.from_vector(x, degree, 2, combo))
    return out


def test_sq0_identity_rp2():
    coh = Cohomology(rp2_6())
    a = coh.basis_classes(2, 1)[0]
    assert coh.sq(0, a) == a


def test_sq1_rp2_is_square():
    coh = Cohomology(rp2_6())
    a = coh.basis_classes(2, 1)[0]
    assert coh.sq(1, a) == coh.cup(a, a)
    assert not coh.sq(1, a).is_zero()


def test_sq2_cp2_is_square():
    coh = Cohomology(cp2_9())
    b = coh.basis_classes(2, 2)[0]
    sq2 = coh.sq(2, b)
    assert sq2 == coh.cup(b, b)
    assert sq2.coords == (1,)


def test_axioms_on_random_complexes():
    rng = np.random.default_rng(2024)
    complexes = [rp2_6(), torus_7(), cp2_9()] + [random_complex(rng, 8, 4, 10) for _ in range(3)]
    checked = 0
    for x in complexes:
        coh = Cohomology(x)
        for d in range(x.dimension + 1):
            for z in random_cocycles(coh, d, rng, 4):
                cls = coh.class_of(z)
                assert coh.sq(0, cls) == cls
                assert coh.sq(d, cls) == coh.cup(cls, cls)
                for k in range(d + 1, d + 3):
                    assert coh.sq(k, cls).is_zero()
                checked += 1
    assert checked >= 50


def test_cartan_formula():
    rng = np.random.default_rng(99)
    complexes = [rp2_6(), torus_7(), random_complex(rng, 8, 4, 10)]
    for x in complexes:
        coh = Cohomology(x)
        for i in range(1, x.dimension):
            for j in range(1, x.dimension + 1 - i):
                for a in coh.basis_classes(2, i):
                    for b in coh.basis_classes(2, j):
                        ab = coh.cup(a, b)
                        for k in range(1, i + j + 1):
                            lhs = coh.sq(k, ab)
                            rhs = coh.zero_class(2, ab.degree + k)
                            for s in range(k + 1):
                                rhs = coh.add(rhs, coh.cup(coh.sq(s, a), coh.sq(k - s, b)))
                            assert lhs == rhs


def test_adem_instance_sq2sq2_eq_sq3sq1():
    rng = np.random.default_rng(4242)
    complexes = [rp2_6(), cp2_9(), random_complex(rng, 8, 5, 10)]
    for x in complexes:
        coh = Cohomology(x)
        for d in range(x.dimension + 1):
            for cls in coh.basis_classes(2, d):
                assert coh.sq(2, coh.sq(2, cls)) == coh.sq(3, coh.sq(1, cls))


def test_rho2_bockstein_equals_sq1():
    """The convention fix: the degree-lowering index of the higher product
    used for Sq^1 must match the lift-coboundary-halve Bockstein."""
    for x in (rp2_6(), torus_7(), sphere(3), cp2_9()):
        coh = Cohomology(x)
        for d in range(x.dimension + 1):
            for cls in coh.basis_classes(2, d):
                assert coh.reduce_mod(1, coh.bockstein(cls)) == coh.sq(1, cls)


def test_secondary_domain_composite():
    """Membership in the domain of the secondary operation is the vanishing
    of beta . Sq^2 . rho2, computed as a composite of engine operations."""
    for x in (cp2_9(), sphere(4)):
        coh = Cohomology(x)
        for d in range(x.dimension - 1):
            for z in coh.basis_classes(0, d):
                composite = coh.bockstein(coh.sq(2, coh.reduce_mod(1, z)))
                direct_zero = coh.sq(2, coh.reduce_mod(1, z)).is_zero()
                if direct_zero:
                    assert composite.is_zero()

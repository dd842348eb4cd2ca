"""The contact-structure decision procedure for closed orientable 9-manifolds.

The verdict walks the obstruction trail: the degree-3 integral class, the
degree-7 integral class (always zero once degree 3 vanishes; asserted live),
the degree-8 coset, and the top mod-2 invariant.  A model with insufficient
data (missing tangential invariant class, or a secondary-operation value the
theory does not determine) yields an explicit Undetermined outcome rather
than a guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import f2
from .charclasses import (
    CosetH8, ModelInvariantError, PreconditionError, SWClasses,
    bockstein_vanishes_on, compute_dm, coset_reduce, half_product_solutions,
    integral_lift, sigma_w4, spinc_data, sq2_image_subspace, sw_classes,
    wu_classes, zero_coset,
)
from .model import CohomologyModel, ManifoldModel, ZClass, connected_sum, validate

__all__ = [
    "Outcome", "ObstructionStage", "MissingDatum", "Trail", "Verdict",
    "ValidationFailedError", "GradedIso",
    "evaluate_omega_pc", "decide", "decide_connected_sum",
    "check_w7_theorem", "homotopy_invariance_check",
]


class Outcome(str, Enum):
    CONTACT = "contact"
    NO_CONTACT = "no_contact"
    UNDETERMINED = "undetermined"


class ObstructionStage(str, Enum):
    W3 = "W3"      # degree-3 integral class nonzero
    O8 = "O8"      # degree-8 coset nonzero (non-spin branch)
    W8 = "W8"      # w8 nonzero (spin branch)
    O9 = "O9"      # top invariant equal to 1


class MissingDatum(str, Enum):
    PHI_HAT = "phi_hat"
    OMEGA_VALUE = "omega_value"


class ValidationFailedError(ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"model failed validation:\n{report}")


@dataclass
class Trail:
    """The obstruction record: entries are None when never reached."""

    o3: ZClass
    o7: ZClass | None = None
    o8: CosetH8 | None = None
    o9: int | None = None


@dataclass
class Verdict:
    outcome: Outcome
    obstruction: ObstructionStage | None
    missing: MissingDatum | None
    trail: Trail
    witness: str
    label: str = ""

    def agrees_with(self, other: "Verdict") -> bool:
        if self.outcome != other.outcome:
            return False
        if self.outcome == Outcome.UNDETERMINED:
            return self.missing == other.missing
        return True

    def __str__(self):
        tail = ""
        if self.obstruction:
            tail = f" at {self.obstruction.value}"
        if self.missing:
            tail = f" (missing {self.missing.value})"
        return f"{self.label or 'model'}: {self.outcome.value}{tail}"


def _require_valid(model: ManifoldModel) -> CohomologyModel:
    report = validate(model)
    if not report.ok:
        raise ValidationFailedError(report)
    m = model.cohomology
    if m.dimension != 9:
        raise PreconditionError("the decision procedure handles 9-manifolds")
    if not m.orientable:
        raise PreconditionError("the decision procedure needs an orientable model")
    return m


def evaluate_omega_pc(model: ManifoldModel, sw: SWClasses | None = None, rng=None) -> CosetH8 | None:
    """The degree-8 obstruction coset, when the theory or the data determine it.

    Branches: spin models evaluate to the class of w8 (the reduction subspace
    is zero there); w4 = 0 forces the zero coset; when the Bockstein vanishes
    on the relevant degree-one subspace the coset is [w8 - rho2(cv/2)] for
    integral lifts c, v of w2, w6; otherwise the externally supplied value is
    used, or None is returned.
    """
    m = model.cohomology
    sw = sw or sw_classes(model)
    if not sw.W3.is_zero():
        raise PreconditionError("the degree-8 coset needs a vanishing degree-3 integral class")
    if sw.w[2].is_zero():
        return coset_reduce(sw.w[8], model)
    if sw.w[4].is_zero():
        return zero_coset(model)
    dm = compute_dm(model)
    if bockstein_vanishes_on(m, dm):
        data = spinc_data(model, sw, rng=rng)
        cosets = set()
        for d in half_product_solutions(data.c, data.v, model):
            rep = sw.w[8] + m.rho2_map(d)
            cosets.add(coset_reduce(rep, model))
        if len(cosets) != 1:
            raise ModelInvariantError(
                "degree-8 coset depends on the half-product choice; contradicts well-definedness"
            )
        return cosets.pop()
    if model.omega_pc is not None:
        return coset_reduce(model.omega_pc, model)
    return None


def check_w7_theorem(model: ManifoldModel) -> bool:
    """Three equivalent forms of the degree-7 vanishing statement, computed
    independently; they must agree (their disagreement is an engine bug)."""
    m = _require_valid(model)
    sw = sw_classes(model)
    if not sw.W3.is_zero():
        raise PreconditionError("the degree-7 vanishing statement assumes the degree-3 class vanishes")
    return _w7_vanishes(m, sw)


def _w7_vanishes(m: CohomologyModel, sw: SWClasses) -> bool:
    w6 = sw.w[6]
    via_bockstein = sw.W7.is_zero()
    via_lift = integral_lift(m, w6) is not None
    torsion_ok = True
    piece3 = m.piece(3)
    for t in range(len(piece3.z_torsion)):
        coords = [0] * m.z_gens(3)
        coords[piece3.z_rank + t] = 1
        red = m.rho2_map(m.z(3, coords))
        if m.eval_top(m.cup(red, w6)):
            torsion_ok = False
    if not (via_bockstein == via_lift == torsion_ok):
        raise AssertionError(
            "inconsistent degree-7 checks: "
            f"bockstein={via_bockstein} lift={via_lift} torsion={torsion_ok}"
        )
    return via_bockstein


def decide(model: ManifoldModel, seed: int | None = None) -> Verdict:
    """Decide existence of an (over-twisted) contact structure.

    With ``seed`` the internal choices (integral lifts, half products) are
    randomized inside their allowed sets; the verdict must not change, which
    is what the choice-independence suites verify.
    """
    m = _require_valid(model)
    rng = np.random.default_rng(seed) if seed is not None else None
    label = model.label or m.label
    sw = sw_classes(model)

    trail = Trail(o3=sw.W3)
    if not sw.W3.is_zero():
        return Verdict(
            Outcome.NO_CONTACT, ObstructionStage.W3, None, trail,
            witness=f"degree-3 integral class has coordinates {sw.W3.coords}",
            label=label,
        )

    if not _w7_vanishes(m, sw):
        raise ModelInvariantError(
            "degree-7 integral class nonzero on a model with vanishing degree-3 class"
        )
    trail.o7 = m.zero_z(7)

    spin = sw.w[2].is_zero()
    omega = evaluate_omega_pc(model, sw, rng=rng)
    trail.o8 = omega

    if spin:
        # the coset subspace vanishes for spin models, so omega is just [w8]
        if not omega.is_zero():
            return Verdict(
                Outcome.NO_CONTACT, ObstructionStage.W8, None, trail,
                witness=f"w8 has coordinates {sw.w[8].bits}",
                label=label,
            )
        sigma = sigma_w4(model, sw)
        trail.o9 = sigma
        if sigma is None:
            return Verdict(
                Outcome.UNDETERMINED, None, MissingDatum.PHI_HAT, trail,
                witness="w4 is nonzero and no tangential invariant class was supplied",
                label=label,
            )
        if sigma:
            return Verdict(
                Outcome.NO_CONTACT, ObstructionStage.O9, None, trail,
                witness="the pairing of w4 with the tangential invariant class equals 1",
                label=label,
            )
        return Verdict(Outcome.CONTACT, None, None, trail, witness="all obstructions vanish", label=label)

    # non-spin branch: the top obstruction always vanishes here
    if omega is None:
        return Verdict(
            Outcome.UNDETERMINED, None, MissingDatum.OMEGA_VALUE, trail,
            witness="secondary-operation value not determined by the data",
            label=label,
        )
    if not omega.is_zero():
        return Verdict(
            Outcome.NO_CONTACT, ObstructionStage.O8, None, trail,
            witness=(
                "degree-8 coset representative "
                f"{omega.representative.bits} nonzero modulo a subspace of dimension {omega.subspace.dim}"
            ),
            label=label,
        )
    trail.o9 = 0
    return Verdict(Outcome.CONTACT, None, None, trail, witness="all obstructions vanish", label=label)


def decide_connected_sum(a: ManifoldModel, b: ManifoldModel, seed: int | None = None) -> Verdict:
    """Verdict for the connected sum computed from the summands' invariants,
    cross-checked against deciding the assembled sum whenever both sides are
    determined."""
    ma = _require_valid(a)
    mb = _require_valid(b)
    sw_a = sw_classes(a)
    sw_b = sw_classes(b)
    label = f"{a.label or ma.label}#{b.label or mb.label}"

    verdict = _sum_verdict_from_clauses(a, b, sw_a, sw_b, label, seed)

    direct = decide(connected_sum(a, b), seed=seed)
    if (
        verdict.outcome != Outcome.UNDETERMINED
        and direct.outcome != Outcome.UNDETERMINED
        and verdict.outcome != direct.outcome
    ):
        raise AssertionError(
            f"summand-based verdict {verdict.outcome} disagrees with the assembled sum {direct.outcome}"
        )
    return verdict


def _sum_verdict_from_clauses(a, b, sw_a, sw_b, label, seed) -> Verdict:
    trail = Trail(o3=_direct_sum_class(a.cohomology, b.cohomology, sw_a.W3, sw_b.W3))
    if not (sw_a.W3.is_zero() and sw_b.W3.is_zero()):
        return Verdict(
            Outcome.NO_CONTACT, ObstructionStage.W3, None, trail,
            witness="a summand has nonzero degree-3 integral class", label=label,
        )
    spin_a = sw_a.w[2].is_zero()
    spin_b = sw_b.w[2].is_zero()
    if spin_a and spin_b:
        if not (sw_a.w[8].is_zero() and sw_b.w[8].is_zero()):
            return Verdict(
                Outcome.NO_CONTACT, ObstructionStage.W8, None, trail,
                witness="a summand has nonzero w8", label=label,
            )
        sig_a = sigma_w4(a, sw_a)
        sig_b = sigma_w4(b, sw_b)
        if sig_a is None or sig_b is None:
            return Verdict(
                Outcome.UNDETERMINED, None, MissingDatum.PHI_HAT, trail,
                witness="a summand is missing its tangential invariant class", label=label,
            )
        if sig_a != sig_b:
            return Verdict(
                Outcome.NO_CONTACT, ObstructionStage.O9, None, trail,
                witness="top invariants of the summands differ", label=label,
            )
        return Verdict(Outcome.CONTACT, None, None, trail, witness="clause for two spin summands", label=label)
    if spin_a or spin_b:
        spin_model, spin_sw = (a, sw_a) if spin_a else (b, sw_b)
        other, other_sw = (b, sw_b) if spin_a else (a, sw_a)
        if not spin_sw.w[8].is_zero():
            return Verdict(
                Outcome.NO_CONTACT, ObstructionStage.O8, None, trail,
                witness="the spin summand has nonzero w8", label=label,
            )
        sub = decide(other, seed=seed)
        return Verdict(sub.outcome, sub.obstruction, sub.missing, trail,
                       witness=f"inherited from {other.label}", label=label)
    va = decide(a, seed=seed)
    vb = decide(b, seed=seed)
    for v in (va, vb):
        if v.outcome == Outcome.NO_CONTACT:
            return Verdict(
                Outcome.NO_CONTACT, v.obstruction, None, trail,
                witness=f"summand {v.label} admits no contact structure", label=label,
            )
    for v in (va, vb):
        if v.outcome == Outcome.UNDETERMINED:
            return Verdict(Outcome.UNDETERMINED, None, v.missing, trail,
                           witness=f"summand {v.label} undetermined", label=label)
    return Verdict(Outcome.CONTACT, None, None, trail,
                   witness="both non-spin summands admit contact structures", label=label)


def _direct_sum_class(ma, mb, za: ZClass, zb: ZClass) -> ZClass:
    # formal juxtaposition used only for reporting the sum trail
    return ZClass(za.degree, tuple(list(za.coords) + list(zb.coords)))


# -- homotopy invariance -------------------------------------------------------


@dataclass
class GradedIso:
    """A degree-preserving generator correspondence between two models.

    ``f2_maps[d]`` sends mod-2 coordinates of the source to the target;
    ``z_maps[d]`` and ``z_inv_maps[d]`` do the same integrally (with torsion
    coordinates understood modulo their orders).
    """

    f2_maps: dict
    z_maps: dict
    z_inv_maps: dict


class IsoRejected(ValueError):
    pass


def _z_apply(m: CohomologyModel, degree: int, mat, coords) -> ZClass:
    out = [0] * m.z_gens(degree)
    for r in range(len(out)):
        for c, x in enumerate(coords):
            out[r] += int(mat[r][c]) * int(x)
    return m.z(degree, out)


def _verify_iso(a: ManifoldModel, b: ManifoldModel, iso: GradedIso):
    ma, mb = a.cohomology, b.cohomology
    if ma.dimension != mb.dimension:
        raise IsoRejected("dimension mismatch")
    n = ma.dimension
    for d in range(n + 1):
        f = np.asarray(iso.f2_maps.get(d, np.zeros((0, 0))), dtype=np.uint8)
        if f.shape != (mb.f2_dim(d), ma.f2_dim(d)):
            raise IsoRejected(f"mod-2 map in degree {d} has the wrong shape")
        if ma.f2_dim(d) and not f2.is_invertible(f):
            raise IsoRejected(f"mod-2 map in degree {d} not invertible")
        if ma.piece(d).z_orders != mb.piece(d).z_orders:
            raise IsoRejected(f"integral generator signature differs in degree {d}")
        z = iso.z_maps.get(d)
        zi = iso.z_inv_maps.get(d)
        if ma.z_gens(d):
            for basis in ma.basis_z(d):
                roundtrip = _z_apply(ma, d, zi, _z_apply(mb, d, z, basis.coords).coords)
                if roundtrip != basis:
                    raise IsoRejected(f"integral map in degree {d} is not invertible")
    # structure compatibility
    for d in range(n + 1):
        fd = iso.f2_maps[d]
        for e in ma.basis_f2(d):
            img = mb.f2(d, f2.mat_vec(fd, e.vec()))
            # Steenrod squares
            for k in range(1, n - d + 1):
                lhs = mb.f2(d + k, f2.mat_vec(iso.f2_maps[d + k], ma.sq_map(k, e).vec())) if d + k <= n else None
                if lhs is not None and lhs != mb.sq_map(k, img):
                    raise IsoRejected(f"Sq^{k} does not commute in degree {d}")
            # Bockstein
            if d + 1 <= n:
                lhs = _z_apply(mb, d + 1, iso.z_maps[d + 1], ma.beta_map(e).coords)
                if lhs != mb.beta_map(img):
                    raise IsoRejected(f"Bockstein does not commute in degree {d}")
        for g in ma.basis_z(d):
            lhs = mb.rho2_map(_z_apply(mb, d, iso.z_maps[d], g.coords))
            rhs = mb.f2(d, f2.mat_vec(iso.f2_maps[d], ma.rho2_map(g).vec()))
            if lhs != rhs:
                raise IsoRejected(f"reduction does not commute in degree {d}")
    for (i, j) in ma.cup2:
        if (i, j) not in mb.cup2:
            raise IsoRejected(f"product tensor ({i},{j}) missing on one side")
        if i + j > n:
            continue
        for x in ma.basis_f2(i):
            for y in ma.basis_f2(j):
                fx = mb.f2(i, f2.mat_vec(iso.f2_maps[i], x.vec()))
                fy = mb.f2(j, f2.mat_vec(iso.f2_maps[j], y.vec()))
                lhs = mb.f2(i + j, f2.mat_vec(iso.f2_maps[i + j], ma.cup(x, y).vec()))
                if lhs != mb.cup(fx, fy):
                    raise IsoRejected(f"cup product does not commute at ({i},{j})")
    # orientation
    if ma.orientable != mb.orientable:
        raise IsoRejected("orientability differs")
    if ma.orientable and _z_apply(mb, n, iso.z_maps[n], (1,)) != mb.z(n, (1,)):
        raise IsoRejected("orientation class not preserved")
    # extra data must correspond when present on both sides
    if (a.phi_hat is None) != (b.phi_hat is None):
        raise IsoRejected("tangential invariant class present on only one side")
    if a.phi_hat is not None:
        img = mb.f2(5, f2.mat_vec(iso.f2_maps[5], a.phi_hat.vec()))
        if img != b.phi_hat:
            raise IsoRejected("tangential invariant class not preserved")
    if (a.omega_pc is None) != (b.omega_pc is None):
        raise IsoRejected("supplied obstruction coset present on only one side")
    if a.omega_pc is not None:
        img = mb.f2(8, f2.mat_vec(iso.f2_maps[8], a.omega_pc.vec()))
        if coset_reduce(img, b) != coset_reduce(b.omega_pc, b):
            raise IsoRejected("supplied obstruction coset not preserved")


def homotopy_invariance_check(a: ManifoldModel, b: ManifoldModel, iso: GradedIso) -> bool:
    """Verify the correspondence, then compare the two verdicts.

    Returns True iff the outcomes agree (Undetermined only matches
    Undetermined for the same missing datum).  A correspondence that fails
    the structure checks is rejected with an exception, not a verdict.
    """
    _verify_iso(a, b, iso)
    return decide(a).agrees_with(decide(b))

"""Canonical convex representers of a positive set: the dual-side support-type
function, its pullback through the canonical map, and the conjugate back on
the primal side.

Over a finite sampled set the first two are exact finite maxima; only the
conjugate-back function carries dual-grid error.  Reports distinguish the
exact claims from the grid-approximate ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BracketViolated, EmptySet, NotAMinorant
from .gridfn import GridFn, intrinsic_conjugate, is_vz, sup_linear_minus
from .grids import GridSpec, image_box
from .positivity import PointSet, is_maximally_q_positive, p_set, sets_match
from .reports import VerifyReport
from .spaces import SsdSpace
from . import tolerances as tols

DUAL_INFLATION = 1.5


def theta(space: SsdSpace, a: PointSet, bstar) -> float | np.ndarray:
    """Support-type function on the dual: max over the set of <a, b*> - q(a)."""
    if len(a) == 0:
        raise EmptySet("representer needs a nonempty set")
    pts = np.atleast_2d(np.asarray(bstar, dtype=float))
    vals, _ = sup_linear_minus(a.points, space.q(a.points), pts)
    return float(vals[0]) if np.asarray(bstar).ndim == 1 else vals


def phi(space: SsdSpace, a: PointSet, b) -> float | np.ndarray:
    """Primal representer, as a finite max over the set (exact).

    Computed both as max[pair(a, b) - q(a)] and as q(b) - inf q(b - a); the
    two agree to floating-point accuracy and the first is returned.
    """
    v1, v2 = phi_two_ways(space, a, b)
    return v1


def phi_two_ways(space: SsdSpace, a: PointSet, b):
    if len(a) == 0:
        raise EmptySet("representer needs a nonempty set")
    pts = np.atleast_2d(np.asarray(b, dtype=float))
    single = np.asarray(b).ndim == 1
    source = a.points @ space.pairing
    vals, _ = sup_linear_minus(source, space.q(a.points), pts)
    qb = space.q(pts)
    inf_q = np.min(space.q(pts)[:, None] - pts @ space.pairing @ a.points.T
                   + space.q(a.points)[None, :], axis=1)
    v2 = qb - inf_q
    if single:
        return float(vals[0]), float(v2[0])
    return vals, v2


def dual_probe_points(space: SsdSpace, grid: GridSpec, inflation: float = DUAL_INFLATION,
                      include_image: bool = True) -> np.ndarray:
    """Probe lattice on the dual side: the image box of the grid under the
    canonical map (merged with the grid itself so degenerate maps still get a
    box), inflated, plus the exact image of the grid nodes."""
    box = image_box(grid, space.pairing, inflate=inflation, include_source=True)
    pts = box.points()
    if include_image:
        pts = np.vstack([pts, grid.points() @ space.pairing.T])
    return pts


def star_theta(space: SsdSpace, a: PointSet, dual_points, c) -> float | np.ndarray:
    """Conjugate of the dual-side representer back on the primal side,
    sup taken over the supplied dual probe points (an under-approximation)."""
    if len(a) == 0:
        raise EmptySet("representer needs a nonempty set")
    dual_points = np.atleast_2d(np.asarray(dual_points, dtype=float))
    theta_vals = theta(space, a, dual_points)
    pts = np.atleast_2d(np.asarray(c, dtype=float))
    vals, _ = sup_linear_minus(dual_points, theta_vals, pts)
    return float(vals[0]) if np.asarray(c).ndim == 1 else vals


@dataclass(frozen=True, eq=False)
class FitzTriple:
    """The three representers of a set materialized on grids."""

    a: PointSet
    space: SsdSpace
    theta_fn: GridFn          # on the dual box lattice
    phi_fn: GridFn            # on the primal grid (exact finite max)
    star_theta_fn: GridFn     # on the primal grid (dual-probe sup)
    dual_points: np.ndarray


def fitz_triple(space: SsdSpace, a: PointSet, grid: GridSpec,
                inflation: float = DUAL_INFLATION) -> FitzTriple:
    dual_box = image_box(grid, space.pairing, inflate=inflation, include_source=True)
    dual_pts = np.vstack([dual_probe_points(space, grid, inflation=inflation),
                          a.points @ space.pairing.T])
    theta_fn = GridFn._raw(dual_box, theta(space, a, dual_box.points()), form="theta")
    pts = grid.points()
    phi_fn = GridFn._raw(
        grid, phi(space, a, pts),
        exact=(lambda xs, _s=space, _a=a: phi(_s, _a, np.atleast_2d(xs))),
        form="phi")
    st = star_theta(space, a, dual_pts, pts)
    star_fn = GridFn._raw(grid, st, form="star_theta")
    return FitzTriple(a, space, theta_fn, phi_fn, star_fn, dual_pts)


def lemma_2_13_suite(space: SsdSpace, a: PointSet, grid: GridSpec,
                     inflation: float = DUAL_INFLATION,
                     tol_exact: float = tols.ATOL_EXACT,
                     tol_grid: float = tols.ATOL_GRID,
                     tol_conj: float | None = None) -> VerifyReport:
    """Elementary representer properties, checked grid-relative.

    Exact finite-max identities are held to tol_exact; inequalities whose
    sides are all evaluated as grid sups to tol_grid; the conjugate-back
    identity (the only genuinely dual-grid-limited part) to tol_conj.
    """
    triple = fitz_triple(space, a, grid, inflation=inflation)
    pts = grid.points()
    qv = space.q(pts)
    report = VerifyReport(suite="lemma_2_13", grid=grid.to_dict(),
                          tolerances={"tol_exact": tol_exact, "tol_grid": tol_grid},
                          meta={"space": space.label, "set": a.label})

    v1, v2 = phi_two_ways(space, a, pts)
    i = int(np.argmax(np.abs(v1 - v2)))
    report.add("a_two_formulas", "lemma_2_13a", abs(float(v1[i] - v2[i])) <= tol_exact,
               residual=abs(float(v1[i] - v2[i])), witness=pts[i])

    phi_on_a = phi(space, a, a.points)
    q_on_a = space.q(a.points)
    j = int(np.argmax(np.abs(phi_on_a - q_on_a)))
    report.add("b_phi_touches", "lemma_2_13b", abs(float(phi_on_a[j] - q_on_a[j])) <= tol_exact,
               residual=abs(float(phi_on_a[j] - q_on_a[j])), witness=a.points[j])

    # sup sources augmented with the set itself so the finite-max identities
    # stay exact even when the set does not sit on grid nodes
    aug_pts = np.vstack([pts, a.points])
    aug_phi = np.concatenate([triple.phi_fn.values, phi_on_a])
    st_aug = star_theta(space, a, triple.dual_points, aug_pts)
    st_nodes, st_on_a = st_aug[: pts.shape[0]], st_aug[pts.shape[0]:]

    if tol_conj is None:
        h_d = float(np.max(triple.theta_fn.grid.spacing))
        lip = tols.observed_lipschitz(triple.star_theta_fn.values_nd(), grid.spacing)
        tol_conj = max(tols.ATOL_GRID, 0.5 * lip * h_d)
    back, _ = sup_linear_minus(aug_pts @ space.pairing, st_aug, pts)
    d_res = np.abs(back - triple.phi_fn.values)
    k = int(np.argmax(d_res))
    report.tolerances["tol_conj"] = tol_conj
    report.add("d_conjugate_back", "lemma_2_13d", float(d_res[k]) <= tol_conj,
               residual=float(d_res[k]), witness=pts[k],
               note="dual-grid-limited identity")

    e_res = st_on_a - q_on_a
    m = int(np.argmax(e_res))
    report.add("e_star_below_q", "lemma_2_13e", float(e_res[m]) <= tol_exact,
               residual=max(0.0, float(e_res[m])), witness=a.points[m])

    phi_at_aug, _ = sup_linear_minus(aug_pts @ space.pairing, aug_phi, aug_pts)
    phi_at, phi_at_on_a = phi_at_aug[: pts.shape[0]], phi_at_aug[pts.shape[0]:]
    f1 = phi_at - st_nodes
    f2 = np.maximum(triple.phi_fn.values, qv) - phi_at
    r1, r2 = int(np.argmax(f1)), int(np.argmax(f2))
    report.add("f_sandwich_upper", "lemma_2_13f", float(f1[r1]) <= tol_grid,
               residual=max(0.0, float(f1[r1])), witness=pts[r1])
    report.add("f_sandwich_lower", "lemma_2_13f", float(f2[r2]) <= tol_grid,
               residual=max(0.0, float(f2[r2])), witness=pts[r2])

    g_res = max(float(np.max(np.abs(st_on_a - q_on_a))),
                float(np.max(np.abs(phi_at_on_a - q_on_a))))
    report.add("g_equalities_on_set", "lemma_2_13g", g_res <= tol_grid,
               residual=g_res, note="evaluated at the set points themselves")

    mx = is_maximally_q_positive(space, a, grid)
    if mx.passed:
        cell = tols.cell_norm(space, grid)
        h_gap = qv - triple.phi_fn.values
        hh = int(np.argmax(h_gap))
        report.add("h_phi_dominates_q", "lemma_2_13h", float(h_gap[hh]) <= tol_grid,
                   residual=max(0.0, float(h_gap[hh])), witness=pts[hh])
        h2 = float(np.max(st_on_a - q_on_a))
        report.add("h_set_in_touching", "lemma_2_13h", h2 <= tol_grid,
                   residual=max(0.0, h2),
                   note="conjugate-back representer touches q on the set")
        ok_i = True
        worst_i = 0.0
        for fn in (triple.star_theta_fn, GridFn._raw(grid, phi_at), triple.phi_fn):
            pset = p_set(fn, space)
            match, dist = sets_match(space, a.points, pset.points, radius=2.0 * cell)
            ok_i &= match
            worst_i = max(worst_i, dist)
        report.add("i_touching_sets_equal", "lemma_2_13i", ok_i, residual=worst_i,
                   note="set equality up to two grid cells")
    else:
        report.add("h_phi_dominates_q", "lemma_2_13h", False, skipped=True,
                   note="set is not grid-maximal")
        report.add("i_touching_sets_equal", "lemma_2_13i", False, skipped=True,
                   note="set is not grid-maximal")
    return report


def theorem_2_15_suite(space: SsdSpace, f: GridFn, h: GridFn | None,
                       grid: GridSpec | None = None,
                       tol: float = tols.ATOL_GRID) -> VerifyReport:
    """Sandwich inequalities around a touching function and the transfer of
    the zero inf-convolution property to anything inside the sandwich."""
    grid = grid or f.grid
    a = p_set(f, space)
    if len(a) == 0:
        raise EmptySet("touching set of f is empty")
    triple = fitz_triple(space, a, grid)
    pts = grid.points()
    report = VerifyReport(suite="theorem_2_15", grid=grid.to_dict(),
                          tolerances={"tol": tol},
                          meta={"space": space.label, "fn": f.form})
    slack = tols.tol_p_membership()
    lo = triple.phi_fn.values - f.values - slack
    i = int(np.nanargmax(np.where(np.isfinite(lo), lo, -np.inf)))
    report.add("f_above_phi", "thm_2_15_1", float(lo[i]) <= tol,
               residual=max(0.0, float(lo[i])), witness=pts[i])
    hi = f.values - triple.star_theta_fn.values - slack
    finite = np.isfinite(hi)
    j = int(np.argmax(np.where(finite, hi, -np.inf)))
    report.add("f_below_star", "thm_2_15_1", float(hi[j]) <= tol if finite.any() else True,
               residual=max(0.0, float(hi[j])) if finite.any() else 0.0, witness=pts[j])
    dual_pts = triple.dual_points
    f_star, _ = sup_linear_minus(np.vstack([pts, a.points]),
                                 np.concatenate([f.values, f.evaluate(a.points)]),
                                 dual_pts)
    theta_vals = theta(space, a, dual_pts)
    phi_star, _ = sup_linear_minus(np.vstack([pts, a.points]),
                                   np.concatenate([triple.phi_fn.values,
                                                   phi(space, a, a.points)]),
                                   dual_pts)
    c1 = theta_vals - f_star - slack
    c2 = f_star - phi_star - slack
    k1, k2 = int(np.argmax(c1)), int(np.argmax(c2))
    report.add("fstar_above_theta", "thm_2_15_1", float(c1[k1]) <= tol,
               residual=max(0.0, float(c1[k1])), witness=dual_pts[k1])
    report.add("fstar_below_phistar", "thm_2_15_1", float(c2[k2]) <= tol,
               residual=max(0.0, float(c2[k2])), witness=dual_pts[k2])
    if h is not None:
        above = triple.phi_fn.values - h.values - slack
        below = h.values - triple.star_theta_fn.values - slack
        finite_a = np.isfinite(above)
        finite_b = np.isfinite(below)
        worst = max(float(np.max(above[finite_a], initial=-np.inf)),
                    float(np.max(below[finite_b], initial=-np.inf)))
        if worst > tol:
            raise BracketViolated(f"candidate leaves the sandwich by {worst:.3e}")
        report.add("h_in_sandwich", "thm_2_15c", True, residual=max(0.0, worst))
        vz_h = is_vz(h, space)
        report.add("h_vz", "thm_2_15c", vz_h.passed,
                   residual=vz_h.check("zero_infconv").worst_residual)
        h_at = intrinsic_conjugate(h, space)
        vz_hat = is_vz(h_at, space)
        report.add("h_conj_vz", "thm_2_15c", vz_hat.passed,
                   residual=vz_hat.check("zero_infconv").worst_residual)
        cell = tols.cell_norm(space, grid)
        ph = p_set(h, space)
        match, dist = sets_match(space, a.points, ph.points, radius=2.0 * cell)
        report.add("h_touching_equals_set", "thm_2_15c", match, residual=dist)
    return report


def sigma_minorant_test(space: SsdSpace, a: PointSet, h: GridFn,
                        tol: float | None = None) -> VerifyReport:
    """One direction of the maximal-representer property: any grid-convex h
    with h <= q on the set stays below the conjugate-back representer."""
    hq = h.evaluate(a.points) - space.q(a.points)
    worst_on_a = float(np.max(hq))
    if worst_on_a > tols.tol_p_membership():
        raise NotAMinorant(f"h exceeds q on the set by {worst_on_a:.3e}")
    triple = fitz_triple(space, a, h.grid)
    if tol is None:
        h_d = float(np.max(triple.theta_fn.grid.spacing))
        lip = tols.observed_lipschitz(h.values_nd(), h.grid.spacing)
        tol = max(tols.ATOL_GRID, 0.5 * (lip + 1.0) * h_d)
    gap = h.values - triple.star_theta_fn.values
    finite = np.isfinite(gap)
    i = int(np.argmax(np.where(finite, gap, -np.inf)))
    report = VerifyReport(suite="sigma_minorant", grid=h.grid.to_dict(),
                          tolerances={"tol": tol},
                          meta={"space": space.label, "set": a.label})
    report.add("minorant_below_star", "thm_2_16", float(gap[i]) <= tol,
               residual=max(0.0, float(gap[i])), witness=h.grid.points()[i])
    return report


def remark_2_14_gap(space: SsdSpace, a: PointSet, grid: GridSpec) -> tuple[float, np.ndarray]:
    """Observed max of (conjugate-back representer - pullback-conjugate of the
    primal representer); strictly positive in the zero-pairing counterexample,
    merely recorded elsewhere."""
    triple = fitz_triple(space, a, grid)
    phi_at = intrinsic_conjugate(triple.phi_fn, space)
    gap = triple.star_theta_fn.values - phi_at.values
    i = int(np.argmax(gap))
    return float(gap[i]), grid.points()[i]

"""Named verification batteries: the catalog of runnable suites behind the
command line.  Each suite builds its own spaces/functions from the built-in
catalog, runs the relevant checks, and returns reports; nothing here raises
on a failed inequality (only on broken preconditions or inputs).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import tolerances as tols
from .catalog import (
    all_special_spaces,
    cubic_graph_set,
    default_grid,
    diagonal_set,
    double_well_fn,
    half_sq_norm_fn,
    helix_set,
    q_plus_const_fn,
    ray_set,
    representer_fns,
    sign_graph_set,
    singleton_origin,
    space_identity,
    space_negated,
    space_nodual,
    space_r2_product,
    space_swap_r3,
    space_zero_pairing,
    vz_catalog,
)
from .duality import (
    density_report,
    dual_norm_check,
    lemma_4_7_identity,
    make_dual,
    theorem_4_10_battery,
    vz_mas_equivalence,
)
from .errors import NoDual, SsdkitError
from .fitzpatrick import (
    lemma_2_13_suite,
    remark_2_14_gap,
    sigma_minorant_test,
    theorem_2_15_suite,
)
from .gridfn import (
    GridFn,
    conjugate_composition_gap,
    intrinsic_conjugate,
    is_vz,
    lsc_biconjugate_envelope,
)
from .grids import GridSpec
from .monotone import (
    MonotoneSet,
    alignment_report,
    negative_alignment,
    projection_closure_check,
    remark_5_6_bound,
    strongly_representable_check,
    theorem_5_8_battery,
    type_ni_check,
)
from .positivity import (
    PointSet,
    dist_bounds_check,
    is_q_positive,
    lemma_2_8_suite,
    p_set,
    project_to_p,
    recheck_trace,
)
from .reports import VerifyReport
from .spaces import check_banach_ssd, lipschitz_checks

SQRT2 = np.sqrt(2.0)


@dataclass
class SuiteOptions:
    grid: GridSpec | None = None
    tol: float | None = None
    seed: int = 42
    lam: float | None = None    # explicit helix pitch, checked verbatim
    epsilon: float = 0.5
    monotone_set: MonotoneSet | None = None
    point_set: PointSet | None = None


def _grid(opts: SuiteOptions, dim=2, n=61) -> GridSpec:
    if opts.grid is not None and opts.grid.dim == dim:
        return opts.grid
    return default_grid(dim, -3.0, 3.0, n)


def _finish(reports, started):
    elapsed = time.perf_counter() - started
    for rep in reports:
        if rep.wall_time == 0.0:
            rep.wall_time = elapsed / max(1, len(reports))
    return reports


# -- individual suites ---------------------------------------------------------------


def suite_banach_ssd(opts: SuiteOptions):
    t0 = time.perf_counter()
    grid = _grid(opts)
    reports = []
    spaces = [space_identity(2), space_negated(2), space_swap_r3(),
              space_r2_product("one"), space_r2_product("two"), space_r2_product("inf")]
    for sp in spaces:
        probe = default_grid(sp.dim, -3, 3, 61) if sp.norm.is_product else "analytic"
        rep = check_banach_ssd(sp, probe=probe)
        rep.suite = "banach_ssd"
        rep.meta["space"] = sp.label
        reports.append(rep)
        lip = lipschitz_checks(sp, n_pairs=2000, seed=opts.seed)
        lip.suite = "banach_ssd"
        reports.append(lip)
    failing = space_r2_product("two", scale=0.5)
    rep = check_banach_ssd(failing, probe=default_grid(2, -3, 3, 61))
    rep.suite = "banach_ssd"
    rep.meta["expected"] = "fail"
    flip = VerifyReport(suite="banach_ssd", tolerances=rep.tolerances,
                        meta={"space": failing.label})
    w = rep.checks[0].witness
    flip.add("halved_norm_fails", "eq_2_1_1", not rep.passed,
             residual=rep.checks[0].worst_residual, witness=w,
             note="negative gauge expected for the halved norm")
    reports.append(flip)
    comp = VerifyReport(suite="banach_ssd", tolerances={"tol": 1e-10})
    sp = space_r2_product("two")
    gap = conjugate_composition_gap(half_sq_norm_fn(grid), sp, grid)
    comp.add("conjugate_composition", "eq_2_1_6", gap <= 1e-10, residual=gap,
             note="pairing-conjugate vs dot-conjugate through the dual map")
    reports.append(comp)
    return _finish(reports, t0)


def suite_helix(opts: SuiteOptions):
    t0 = time.perf_counter()
    sp = space_swap_r3()
    reports = []
    good = is_q_positive(sp, helix_set(pitch=1.0))
    good.suite = "helix"
    reports.append(good)
    if opts.lam is not None:
        # an explicitly requested pitch is checked verbatim (and a flattened
        # helix is expected to fail, driving the exit code)
        verbatim = is_q_positive(sp, helix_set(pitch=opts.lam))
        verbatim.suite = "helix"
        verbatim.meta["pitch"] = opts.lam
        reports.append(verbatim)
    bad = is_q_positive(sp, helix_set(pitch=0.5))
    flip = VerifyReport(suite="helix", tolerances=bad.tolerances,
                        meta={"pitch": 0.5,
                              "min_pairwise_q": bad.meta["min_pairwise_q"]})
    flip.add("flattened_helix_fails", "ex_1_3c", not bad.passed,
             residual=bad.checks[0].worst_residual, witness=bad.checks[0].witness,
             note="pitch 0.5 must break positivity")
    reports.append(flip)
    ray = is_q_positive(sp, ray_set())
    ray.suite = "helix"
    reports.append(ray)
    single = is_q_positive(sp, PointSet([[1.0, 0.0, 0.0]], label="singleton"))
    single.suite = "helix"
    reports.append(single)
    return _finish(reports, t0)


def suite_remark_2_17(opts: SuiteOptions):
    t0 = time.perf_counter()
    sp = space_r2_product("two", tau=1.0)
    grid = _grid(opts, n=121)
    f = half_sq_norm_fn(grid)
    pts = grid.points()
    rep = VerifyReport(suite="remark_2_17", grid=grid.to_dict(),
                       tolerances={"closed_form": tols.ATOL_CLOSED},
                       meta={"space": sp.label})
    gap = f.values - sp.q(pts)
    expected = 0.5 * (pts[:, 0] - pts[:, 1]) ** 2
    r = float(np.max(np.abs(gap - expected)))
    rep.add("gap_closed_form", "remark_2_17", r <= tols.ATOL_CLOSED, residual=r)
    p_expected = 0.5 * (pts[:, 0] + pts[:, 1]) ** 2
    rp = float(np.max(np.abs(sp.p(pts) - p_expected)))
    rep.add("gauge_closed_form", "remark_2_17", rp <= tols.ATOL_CLOSED, residual=rp)
    vz = is_vz(f, sp)
    rep.add("worked_example_vz", "remark_2_17", vz.passed,
            residual=vz.check("zero_infconv").worst_residual)
    touching = p_set(f, sp)
    on_diag = len(touching) == int(grid.num[0]) and float(
        np.max(np.abs(touching.points[:, 0] - touching.points[:, 1]))) < 1e-12
    rep.add("touching_set_is_diagonal", "remark_2_17", on_diag,
            residual=0.0 if on_diag else 1.0)
    reports = [rep]
    probe = grid.subsample(2)
    db = dist_bounds_check(f, sp, probe)
    db.suite = "remark_2_17"
    reports.append(db)
    sharp = VerifyReport(suite="remark_2_17", grid=probe.to_dict(),
                         tolerances={"window": 0.01})
    ratio = db.meta.get("max_ratio", float("nan"))
    ok = SQRT2 - 0.01 <= ratio <= SQRT2 + 1e-9
    sharp.add("sharpness_ratio", "eq_2_7_1", ok, residual=abs(ratio - SQRT2),
              note=f"max distance ratio {ratio:.12f} vs sqrt(2)")
    reports.append(sharp)
    return _finish(reports, t0)


def suite_lemma_1_6(opts: SuiteOptions):
    t0 = time.perf_counter()
    grid = _grid(opts)
    rng = np.random.default_rng(opts.seed)
    reports = []
    cases = [
        (space_r2_product("two"), half_sq_norm_fn(grid), "worked example"),
        (space_identity(2), q_plus_const_fn(space_identity(2), grid), "shifted form"),
    ]
    diag = diagonal_set(-3, 3, 121)
    phi_fn, _ = representer_fns(space_r2_product("two"), diag, grid)
    cases.append((space_r2_product("two"), phi_fn, "diagonal representer"))
    for sp, f, label in cases:
        pts = f.grid.points()
        gap = np.maximum(f.values - sp.q(pts), 0.0)
        idx = rng.integers(0, pts.shape[0], size=(2000, 2))
        b, c = pts[idx[:, 0]], pts[idx[:, 1]]
        gb, gc = gap[idx[:, 0]], gap[idx[:, 1]]
        qbc = sp.q(b - c)
        lhs = -qbc
        bound = (np.sqrt(gb) + np.sqrt(gc)) ** 2
        worst = float(np.max(lhs - bound))
        rep = VerifyReport(suite="lemma_1_6", seed=opts.seed,
                           tolerances={"tol": tols.ATOL_GRID}, meta={"fn": label})
        rep.add("sqrt_gap_bound", "lemma_1_6", worst <= tols.ATOL_GRID,
                residual=max(0.0, worst))
        worst2 = float(np.max(lhs - (2 * gb + 2 * gc)))
        rep.add("doubled_gap_bound", "remark_1_7", worst2 <= tols.ATOL_GRID,
                residual=max(0.0, worst2))
        reports.append(rep)
    sp = space_r2_product("two")
    f = half_sq_norm_fn(grid)
    touching = p_set(f, sp)
    fat = intrinsic_conjugate(f, sp)
    rep = VerifyReport(suite="lemma_1_6", tolerances={"tol": 1e-6})
    worst_pair = 0.0
    worst_conj = 0.0
    for a in touching.points[:: max(1, len(touching) // 50)]:
        vals = f.grid.points() @ sp.pairing @ a - (sp.q(a) + f.values)
        worst_pair = max(worst_pair, float(np.max(vals[np.isfinite(vals)])))
        worst_conj = max(worst_conj,
                         abs(float(fat.values[f.grid.nearest_index(a)]) - sp.q(a)))
    rep.add("touching_affine_bound", "lemma_1_11a", worst_pair <= 1e-6,
            residual=max(0.0, worst_pair))
    rep.add("touching_conjugate_value", "lemma_1_11b", worst_conj <= 1e-6,
            residual=worst_conj)
    reports.append(rep)
    return _finish(reports, t0)


def suite_lemma_2_13(opts: SuiteOptions):
    t0 = time.perf_counter()
    sp = space_r2_product("two")
    grid = _grid(opts)
    reports = []
    if opts.point_set is not None:
        space = sp if opts.point_set.dim == 2 else space_swap_r3()
        if opts.point_set.dim not in (2, 3):
            raise SsdkitError("built-in spaces cover dimensions 2 and 3 only")
        rep = lemma_2_13_suite(space, opts.point_set, _grid(opts, dim=opts.point_set.dim,
                                                           n=61 if opts.point_set.dim == 2 else 17))
        rep.meta["set"] = opts.point_set.label or "user set"
        return _finish([rep], t0)
    diag = diagonal_set(-3, 3, 121)
    rep = lemma_2_13_suite(sp, diag.underlying, grid)
    rep.meta["set"] = "diagonal"
    reports.append(rep)
    rep = lemma_2_13_suite(sp, singleton_origin(2), grid)
    rep.meta["set"] = "origin singleton"
    reports.append(rep)
    sp3 = space_swap_r3()
    grid3 = _grid(opts, dim=3, n=17)
    rep = lemma_2_13_suite(sp3, helix_set(n=61, span=3.0), grid3)
    rep.meta["set"] = "helix sample"
    reports.append(rep)
    zp = space_zero_pairing(2)
    gap, witness = remark_2_14_gap(zp, PointSet([[-1.0, -1.0], [1.0, 1.0]],
                                                label="two points"), grid)
    rep = VerifyReport(suite="lemma_2_13", grid=grid.to_dict(),
                       tolerances={"min_gap": 0.5})
    rep.add("zero_pairing_gap", "remark_2_14", gap >= 0.5, residual=gap,
            witness=witness,
            note="conjugate-back and pullback-conjugate must differ here")
    reports.append(rep)
    return _finish(reports, t0)


def suite_theorem_2_9(opts: SuiteOptions):
    t0 = time.perf_counter()
    sp = space_r2_product("two")
    grid = _grid(opts, n=121)
    f = half_sq_norm_fn(grid)
    reports = []
    db = dist_bounds_check(f, sp, grid.subsample(2))
    db.suite = "theorem_2_9"
    reports.append(db)
    diag = diagonal_set(-3, 3, 121)
    phi_fn, star_fn = representer_fns(sp, diag, grid.subsample(2))
    for fn, label in ((phi_fn, "primal representer"), (star_fn, "conjugate-back representer")):
        rep = lemma_2_8_suite(sp, diag.underlying, fn, grid.subsample(2))
        rep.suite = "theorem_2_9"
        rep.meta["fn"] = label
        reports.append(rep)
    return _finish(reports, t0)


def suite_lemma_2_7(opts: SuiteOptions, n_points: int = 50):
    t0 = time.perf_counter()
    sp = space_r2_product("two")
    grid = _grid(opts, n=121)
    f = half_sq_norm_fn(grid)
    rng = np.random.default_rng(opts.seed)
    nodes = grid.points()
    picks = nodes[rng.integers(0, nodes.shape[0], size=n_points)]
    cell = tols.cell_norm(sp, grid)
    rep = VerifyReport(suite="lemma_2_7", grid=grid.to_dict(), seed=opts.seed,
                       tolerances={"epsilon": opts.epsilon, "cell_slack": 2 * cell})
    worst_cert = 0.0
    worst_dist = -np.inf
    for c in picks:
        trace = project_to_p(f, sp, c, opts.epsilon)
        check = recheck_trace(trace, f, sp)
        worst_cert = max(worst_cert, check.check("per_step_certificates").worst_residual)
        excess = trace.achieved_distance - (trace.bound() + 2 * cell)
        worst_dist = max(worst_dist, excess)
    rep.add("certificates_rechecked", "lemma_2_7a", worst_cert <= 1e-12,
            residual=worst_cert, note=f"{n_points} random starts")
    rep.add("distance_bound", "eq_2_7_2", worst_dist <= 0.0,
            residual=max(0.0, worst_dist))
    return _finish([rep], t0)


def suite_theorem_2_15(opts: SuiteOptions):
    t0 = time.perf_counter()
    sp = space_r2_product("two")
    grid = _grid(opts)
    f = half_sq_norm_fn(grid)
    diag = diagonal_set(-3, 3, 121)
    phi_fn, star_fn = representer_fns(sp, diag, grid)
    reports = []
    for h, label in ((phi_fn, "primal representer"), (star_fn, "conjugate-back"),
                     (GridFn._raw(grid, 0.5 * (phi_fn.values + star_fn.values),
                                  form="midpoint"), "midpoint")):
        rep = theorem_2_15_suite(sp, f, h)
        rep.meta["candidate"] = label
        reports.append(rep)
    return _finish(reports, t0)


def suite_example_2_4(opts: SuiteOptions):
    t0 = time.perf_counter()
    reports = []
    for sp in all_special_spaces():
        dual = make_dual(sp)
        rep = dual_norm_check(sp, dual, n_samples=100, seed=opts.seed)
        rep.suite = "example_2_4"
        rep.meta["norm"] = f"{sp.norm.variant},{sp.norm.tau:g}"
        reports.append(rep)
    rep = VerifyReport(suite="example_2_4", tolerances={"tol": 1e-12})
    ok = True
    for sp in all_special_spaces():
        back = sp.norm.dual().dual()
        ok &= (back.variant == sp.norm.variant
               and abs(back.tau - sp.norm.tau) < 1e-12
               and abs(back.scale - sp.norm.scale) < 1e-12)
    rep.add("duality_involution", "ex_2_4", ok, residual=0.0 if ok else 1.0)
    rng = np.random.default_rng(opts.seed)
    pts = rng.normal(size=(500, 4))
    ordered = True
    for tau in (0.5, 1.0, 2.0):
        from .spaces import NormSpec

        n1 = NormSpec("one", tau=tau)(pts)
        n2 = NormSpec("two", tau=tau)(pts)
        ni = NormSpec("inf", tau=tau)(pts)
        ordered &= bool(np.all(n1 <= n2 + 1e-12) and np.all(n2 <= ni + 1e-12))
    rep.add("norms_increase", "ex_2_4", ordered, residual=0.0 if ordered else 1.0)
    reports.append(rep)
    return _finish(reports, t0)


def suite_example_4_4(opts: SuiteOptions):
    t0 = time.perf_counter()
    grid = _grid(opts)
    reports = []
    rep = VerifyReport(suite="example_4_4", tolerances={"exact": 1e-12})
    try:
        make_dual(space_nodual())
        rep.add("scaled_norm_has_no_dual", "ex_4_4", False, residual=1.0,
                note="construction unexpectedly succeeded")
    except NoDual as exc:
        w = np.asarray(exc.witness)
        exact = (np.allclose(w, [1.0, -1.0], atol=1e-12)
                 and abs(exc.value + 0.75) <= 1e-12)
        rep.add("scaled_norm_has_no_dual", "ex_4_4", exact,
                residual=abs(exc.value + 0.75), witness=w,
                note=f"negative dual gauge {exc.value!r} at the witness")
    reports.append(rep)
    for sp in all_special_spaces():
        dual = make_dual(sp)
        dens = density_report(sp, dual, grid)
        dens.suite = "example_4_4"
        dens.meta["norm"] = f"{sp.norm.variant},{sp.norm.tau:g}"
        reports.append(dens)
    return _finish(reports, t0)


def suite_lemma_4_7(opts: SuiteOptions):
    t0 = time.perf_counter()
    reports = []
    sp = space_r2_product("two")
    dual = make_dual(sp)
    grid = _grid(opts, n=121)
    c_grid = grid.subsample(2)
    f = half_sq_norm_fn(grid)
    rep = lemma_4_7_identity(sp, dual, f, c_grid, tol=opts.tol or 5e-3)
    rep.meta["fn"] = "worked example"
    reports.append(rep)
    diag = diagonal_set(-3, 3, 121)
    phi_fn, _ = representer_fns(sp, diag, grid)
    rep = lemma_4_7_identity(sp, dual, phi_fn, c_grid, tol=opts.tol or 5e-3)
    rep.meta["fn"] = "diagonal representer"
    reports.append(rep)
    ident = space_identity(2)
    rep = lemma_4_7_identity(ident, make_dual(ident), q_plus_const_fn(ident, grid),
                             c_grid, tol=opts.tol or 5e-3)
    rep.meta["fn"] = "shifted quadratic (terms +1/-1)"
    reports.append(rep)
    return _finish(reports, t0)


def suite_theorem_4_9(opts: SuiteOptions):
    t0 = time.perf_counter()
    grid = _grid(opts)
    reports = []
    verdict_table = {}
    for sp in all_special_spaces():
        dual = make_dual(sp)
        dens = density_report(sp, dual, grid)
        fns = vz_catalog(sp, grid)
        for name, fn in fns.items():
            rep = vz_mas_equivalence(sp, dual, fn, density=dens)
            rep.suite = "theorem_4_9"
            rep.meta["norm"] = f"{sp.norm.variant},{sp.norm.tau:g}"
            rep.meta["fn"] = name
            reports.append(rep)
            verdict_table.setdefault(name, set()).add(rep.meta["vz"])
    cross = VerifyReport(suite="theorem_4_9", grid=grid.to_dict(),
                         meta={"norms": "3 kinds x tau in {0.5, 1, 2}"})
    stable = all(len(v) == 1 for v in verdict_table.values())
    cross.add("cross_norm_agreement", "thm_5_3", stable,
              residual=0.0 if stable else 1.0,
              note="identical verdicts across all special norms")
    expected = {"worked_example": True, "shifted_pairing_form": False,
                "phi_diagonal": True, "star_theta_diagonal": True}
    right = all(verdict_table[k] == {v} for k, v in expected.items())
    cross.add("expected_verdicts", "thm_4_9c", right,
              residual=0.0 if right else 1.0)
    reports.append(cross)
    return _finish(reports, t0)


def suite_theorem_4_10(opts: SuiteOptions):
    t0 = time.perf_counter()
    sp = space_r2_product("two")
    dual = make_dual(sp)
    grid = _grid(opts)
    diag = diagonal_set(-3, 3, 121)
    rep = theorem_4_10_battery(sp, dual, diag.underlying, grid)
    return _finish([rep], t0)


def suite_theorem_5_5(opts: SuiteOptions):
    t0 = time.perf_counter()
    diag = diagonal_set(-3, 3, 121)
    reports = []
    rep = alignment_report(diag, [1.0], [-1.0], 1.0, 1.0)
    rep.meta["case"] = "unit weights at (1, -1)"
    reports.append(rep)
    rep = alignment_report(diag, [1.0], [-1.0], 4.0, 1.0)
    rep.meta["case"] = "asymmetric weights"
    reports.append(rep)
    res0 = negative_alignment(diag, [1.0], [1.0], 1.0, 1.0)
    rep = VerifyReport(suite="negative_alignment", meta={"case": "point on the set"})
    rep.add("on_set_omega_zero", "thm_5_5b", res0.degenerate and res0.omega == 0.0,
            residual=res0.omega)
    reports.append(rep)
    rng = np.random.default_rng(opts.seed)
    omegas = []
    for _ in range(10):
        perm = rng.permutation(len(diag))
        shuffled = MonotoneSet.from_points(diag.points[perm])
        omegas.append(negative_alignment(shuffled, [1.0], [-1.0], 1.0, 1.0).omega)
    spread = max(omegas) - min(omegas)
    rep = VerifyReport(suite="negative_alignment", seed=opts.seed,
                       tolerances={"tol": 1e-6})
    rep.add("omega_unique_across_restarts", "thm_5_5b", spread <= 1e-6,
            residual=spread, note="10 reorderings of the sample")
    reports.append(rep)
    sp = space_r2_product("two")
    grid = _grid(opts)
    pc = projection_closure_check(half_sq_norm_fn(grid), sp)
    pc.meta["fn"] = "worked example"
    reports.append(pc)
    phi_sign, _ = representer_fns(sp, sign_graph_set(grid), grid)
    pc = projection_closure_check(phi_sign, sp)
    pc.meta["fn"] = "sign-graph representer"
    reports.append(pc)
    return _finish(reports, t0)


def suite_theorem_5_8(opts: SuiteOptions):
    t0 = time.perf_counter()
    sp = space_r2_product("two")
    dual = make_dual(sp)
    grid = _grid(opts)
    reports = []
    sets = ([(opts.monotone_set.underlying.label or "user set", opts.monotone_set)]
            if opts.monotone_set is not None else
            [("diagonal", diagonal_set(-3, 3, 121)),
             ("clipped cubic graph", cubic_graph_set(grid)),
             ("sign graph", sign_graph_set(grid))])
    for label, mset in sets:
        rep = theorem_5_8_battery(sp, dual, mset, grid)
        rep.meta["set"] = label
        reports.append(rep)
        ni = type_ni_check(sp, mset, dual, grid=grid)
        ni.suite = "theorem_5_8"
        ni.meta["set"] = label
        reports.append(ni)
        phi_fn, _ = representer_fns(sp, mset, grid)
        sr = strongly_representable_check(mset, phi_fn, sp, dual)
        sr.suite = "theorem_5_8"
        sr.meta["set"] = label
        reports.append(sr)
    return _finish(reports, t0)


def suite_remark_5_6(opts: SuiteOptions):
    t0 = time.perf_counter()
    sp = space_r2_product("two")
    grid = _grid(opts, n=121)
    reports = []
    diag = diagonal_set(-3, 3, 121)
    rep = remark_5_6_bound(diag, half_sq_norm_fn(grid), sp, grid.subsample(2))
    rep.meta["fn"] = "worked example"
    reports.append(rep)
    cubic = cubic_graph_set(grid.subsample(2))
    phi_fn, _ = representer_fns(sp, cubic, grid.subsample(2))
    rep = remark_5_6_bound(cubic, phi_fn, sp, grid.subsample(4))
    rep.meta["fn"] = "cubic-graph representer"
    reports.append(rep)
    return _finish(reports, t0)


def _lower_hull_1d(xs, ys):
    order = np.argsort(xs)
    hull = []
    for x, y in zip(xs[order], ys[order]):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (x - x1) >= (y - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((x, y))
    hx = np.array([p[0] for p in hull])
    hy = np.array([p[1] for p in hull])
    return np.interp(xs, hx, hy)


def _random_convex_fn(rng, grid):
    kind = rng.integers(0, 2)
    d = grid.dim
    if kind == 0:
        k = int(rng.integers(3, 8))
        slopes = rng.uniform(-3, 3, size=(k, d))
        inters = rng.uniform(-1, 1, size=k)
        return GridFn.from_callable(
            grid, lambda p: np.max(np.atleast_2d(p) @ slopes.T + inters, axis=1),
            form="max of affine")
    r = rng.normal(size=(d, d))
    a = r @ r.T + 0.1 * np.eye(d)
    b = rng.uniform(-1, 1, size=d)
    return GridFn.from_callable(
        grid, lambda p: 0.5 * np.einsum("ni,ij,nj->n", np.atleast_2d(p), a,
                                        np.atleast_2d(p)) + np.atleast_2d(p) @ b,
        form="random quadratic")


def suite_fenchel_moreau(opts: SuiteOptions, n_random: int = 20):
    t0 = time.perf_counter()
    rng = np.random.default_rng(opts.seed)
    rep = VerifyReport(suite="fenchel_moreau", seed=opts.seed,
                       tolerances={"bound": "5 * spacing * observed slope"})
    worst_margin = -np.inf
    for i in range(n_random):
        grid = (GridSpec.box(-3, 3, 121, 1) if i % 2 == 0
                else GridSpec.box(-2, 2, 41, 2))
        f = _random_convex_fn(rng, grid)
        fss = lsc_biconjugate_envelope(f)
        lip = tols.observed_lipschitz(f.values_nd(), grid.spacing)
        bound = 5.0 * float(np.max(grid.spacing)) * max(lip, 1e-12)
        err = float(np.max(np.abs(fss.values - f.values)))
        worst_margin = max(worst_margin, err - bound)
    rep.add("biconjugate_recovers_convex", "thm_6_1", worst_margin <= 0.0,
            residual=max(0.0, worst_margin), note=f"{n_random} random functions")
    grid = GridSpec.box(-2, 2, 81, 1)
    dw = double_well_fn(grid)
    fss = lsc_biconjugate_envelope(dw)
    hull = _lower_hull_1d(grid.points()[:, 0], dw.values)
    lip = tols.observed_lipschitz(dw.values_nd(), grid.spacing)
    bound = 5.0 * float(grid.spacing[0]) * lip
    err = float(np.max(np.abs(fss.values - hull)))
    rep.add("double_well_hull", "thm_6_1", err <= bound, residual=err,
            note="independent lower-hull oracle")
    below = float(np.max(fss.values - dw.values))
    rep.add("biconjugate_below", "thm_6_1", below <= 1e-12,
            residual=max(0.0, below))
    return _finish([rep], t0)


def suite_theorem_2_16(opts: SuiteOptions):
    t0 = time.perf_counter()
    sp = space_r2_product("two")
    grid = _grid(opts)
    diag = diagonal_set(-3, 3, 121)
    phi_fn, star_fn = representer_fns(sp, diag, grid)
    reports = []
    rep = sigma_minorant_test(sp, diag.underlying, phi_fn)
    rep.meta["candidate"] = "primal representer"
    reports.append(rep)
    a0 = np.array([1.0, 1.0])
    affine = GridFn.from_callable(
        grid, lambda p: np.atleast_2d(p) @ sp.pairing @ a0 - sp.q(a0),
        form="affine tangent")
    rep = sigma_minorant_test(sp, diag.underlying, affine)
    rep.meta["candidate"] = "affine tangent"
    reports.append(rep)
    return _finish(reports, t0)


SUITES = {
    "banach_ssd": suite_banach_ssd,
    "helix": suite_helix,
    "remark_2_17": suite_remark_2_17,
    "lemma_1_6": suite_lemma_1_6,
    "lemma_2_7": suite_lemma_2_7,
    "lemma_2_13": suite_lemma_2_13,
    "theorem_2_9": suite_theorem_2_9,
    "theorem_2_15": suite_theorem_2_15,
    "theorem_2_16": suite_theorem_2_16,
    "example_2_4": suite_example_2_4,
    "example_4_4": suite_example_4_4,
    "lemma_4_7": suite_lemma_4_7,
    "theorem_4_9": suite_theorem_4_9,
    "theorem_4_10": suite_theorem_4_10,
    "theorem_5_5": suite_theorem_5_5,
    "theorem_5_8": suite_theorem_5_8,
    "remark_5_6": suite_remark_5_6,
    "fenchel_moreau": suite_fenchel_moreau,
}


def run_suite(name: str, opts: SuiteOptions | None = None):
    if name not in SUITES:
        raise SsdkitError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    return SUITES[name](opts or SuiteOptions())

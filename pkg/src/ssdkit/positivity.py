"""Nonnegative-gap sets: pairwise positivity, touching sets, density, and the
certificate-carrying projection iteration.

All maximality and density claims are grid-relative: the candidate grid and
the tolerances that scope the claim are recorded in every report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptySet,
    EpsilonOutOfRange,
    FBelowQ,
    NotVZ,
    PreconditionFailed,
    StepInfeasible,
)
from .gridfn import GridFn, is_vz, min_values_plus_gauge
from .grids import GridSpec
from .reports import VerifyReport
from .spaces import SsdSpace, _as_points, pairwise_norm, pairwise_p, pairwise_q
from . import tolerances as tols

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite list of points standing in for a set; duplicates are dropped."""

    points: np.ndarray
    label: str = ""
    allow_empty: bool = False

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            pts = pts.reshape(0, pts.shape[1] if pts.ndim == 2 and pts.shape[1] else 1)
            if not self.allow_empty:
                raise EmptySet("point set must be nonempty")
        else:
            if not np.all(np.isfinite(pts)):
                raise ValueError("points must be finite")
            pts = _dedup(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def to_csv(self, path):
        header = f"label: {self.label}" if self.label else ""
        np.savetxt(path, self.points, delimiter=",", header=header)

    @classmethod
    def from_csv(cls, path, label=""):
        pts = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(pts, label=label)


def _dedup(pts, tol=1e-12):
    keep = []
    for i in range(pts.shape[0]):
        if not any(np.max(np.abs(pts[i] - pts[j])) <= tol for j in keep):
            keep.append(i)
    return pts[keep].copy()


def sets_match(space: SsdSpace, a_rows, b_rows, radius: float) -> tuple[bool, float]:
    """Symmetric Hausdorff comparison in the space norm; (verdict, distance)."""
    a = np.atleast_2d(np.asarray(a_rows, dtype=float))
    b = np.atleast_2d(np.asarray(b_rows, dtype=float))
    if a.shape[0] == 0 or b.shape[0] == 0:
        return (a.shape[0] == b.shape[0]), (0.0 if a.shape[0] == b.shape[0] else np.inf)
    d = pairwise_norm(space, a, b)
    haus = max(float(np.max(np.min(d, axis=1))), float(np.max(np.min(d, axis=0))))
    return haus <= radius, haus


# -- positivity ------------------------------------------------------------------

def is_q_positive(space: SsdSpace, a: PointSet, tol: float = tols.ATOL_CLOSED) -> VerifyReport:
    """Pairwise test q(b - c) >= -tol; failure reports the worst pair."""
    if len(a) == 0:
        raise EmptySet("q-positivity needs a nonempty set")
    qmat = pairwise_q(space, a.points, a.points)
    iu = np.triu_indices(len(a), k=1)
    report = VerifyReport(suite="is_q_positive", tolerances={"tol": tol},
                          meta={"space": space.label, "set": a.label, "n": len(a)})
    if iu[0].size == 0:
        report.add("pairwise_gap", "def_1_2", True, residual=0.0,
                   note="singleton: q(0) = 0")
        report.meta["min_pairwise_q"] = 0.0
        return report
    vals = qmat[iu]
    k = int(np.argmin(vals))
    worst = float(vals[k])
    pair = [a.points[iu[0][k]], a.points[iu[1][k]]]
    report.add("pairwise_gap", "def_1_2", worst >= -tol,
               residual=max(0.0, -worst), witness=pair)
    report.meta["min_pairwise_q"] = worst
    return report


def is_maximally_q_positive(space: SsdSpace, a: PointSet, candidate_grid: GridSpec,
                            q_tol: float = tols.ATOL_CLOSED,
                            dist_tol: float | None = None) -> VerifyReport:
    """Grid-relative maximality: no candidate node farther than dist_tol from
    the set extends it (pairwise gaps all >= -q_tol against the set)."""
    if len(a) == 0:
        raise EmptySet("maximality needs a nonempty set")
    if dist_tol is None:
        dist_tol = 2.0 * tols.cell_norm(space, candidate_grid)
    pts = candidate_grid.points()
    dists = np.min(pairwise_norm(space, pts, a.points), axis=1)
    outside = dists > dist_tol
    report = VerifyReport(suite="is_maximally_q_positive",
                          grid=candidate_grid.to_dict(),
                          tolerances={"q_tol": q_tol, "dist_tol": dist_tol},
                          meta={"space": space.label, "set": a.label,
                                "claim": "maximal relative to this grid only"})
    if not np.any(outside):
        report.add("no_extension_on_grid", "def_1_2", True, residual=0.0,
                   note="every candidate is within dist_tol of the set")
        return report
    gaps = np.min(pairwise_q(space, pts[outside], a.points), axis=1)
    extenders = gaps >= -q_tol
    n_ext = int(np.count_nonzero(extenders))
    witness = pts[outside][extenders][:5] if n_ext else None
    report.add("no_extension_on_grid", "def_1_2", n_ext == 0,
               residual=float(n_ext), witness=witness,
               note=f"{n_ext} extension candidates among {int(outside.sum())} probed")
    return report


def p_set(f: GridFn, space: SsdSpace, tol_p: float | None = None,
          label: str = "") -> PointSet:
    """Grid nodes where f touches q (gap <= tol_p); may be empty.

    Requires f >= q - tol_p on the whole grid.
    """
    if tol_p is None:
        tol_p = tols.tol_p_membership()
    pts = f.grid.points()
    gap = f.values - space.q(pts)
    mn = float(np.min(gap))
    if mn < -tol_p:
        raise FBelowQ(f"min(f - q) = {mn:.3e} < -{tol_p:.1e}")
    sel = gap <= tol_p
    return PointSet(pts[sel], label=label or "touching set", allow_empty=True)


def p_dense_check(space: SsdSpace, a: PointSet, c_grid: GridSpec,
                  tol_density: float | None = None) -> VerifyReport:
    """min over the set of p(c - a) <= tol for every grid c; worst c reported.

    The default tolerance is the one-cell variation of p, the best a sampled
    set can achieve.
    """
    if len(a) == 0:
        raise EmptySet("density check needs a nonempty set")
    if tol_density is None:
        tol_density = max(tols.DENSITY_TOL, tols.one_cell_p_bound(space, c_grid))
    pts = c_grid.points()
    best = np.min(pairwise_p(space, pts, a.points), axis=1)
    i = int(np.argmax(best))
    report = VerifyReport(suite="p_dense_check", grid=c_grid.to_dict(),
                          tolerances={"tol_density": tol_density},
                          meta={"space": space.label, "set": a.label})
    report.add("gauge_density", "def_2_6", float(best[i]) <= tol_density,
               residual=float(best[i]), witness=pts[i])
    return report


# -- projection with certificates ---------------------------------------------------

@dataclass
class ProjectionTrace:
    """Iterates of the certified descent toward the touching set.

    Step n must satisfy (f - q)(b_n) + p(b_{n-1} - b_n) <= lam^(2n) * alpha^2
    with lam = eps/(3 + eps); certificates are stored so they can be rechecked
    from the iterates alone.
    """

    start: np.ndarray
    epsilon: float
    alpha: float
    iterates: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    limit: np.ndarray | None = None
    achieved_distance: float = 0.0

    @property
    def lam(self) -> float:
        return self.epsilon / (3.0 + self.epsilon)

    def bound(self) -> float:
        """Distance bound (1 + eps) * sqrt(2) * alpha implied by the certificates."""
        return (1.0 + self.epsilon) * _SQRT2 * self.alpha

    def to_dict(self):
        return {
            "start": self.start.tolist(),
            "epsilon": self.epsilon,
            "alpha": self.alpha,
            "lambda": self.lam,
            "iterates": [b.tolist() for b in self.iterates],
            "certificates": self.certificates,
            "limit": None if self.limit is None else self.limit.tolist(),
            "achieved_distance": self.achieved_distance,
            "distance_bound": self.bound(),
        }


def project_to_p(f: GridFn, space: SsdSpace, c, epsilon: float,
                 stop_tol: float | None = None, tol_p: float | None = None,
                 max_steps: int = 60) -> ProjectionTrace:
    """Certified grid descent from c toward the touching set of f.

    Each step minimizes (f - q)(b) + p(prev - b) over the grid and must meet
    the geometric certificate; the loop stops once the certificate target
    drops below stop_tol (default: the one-cell variation of p, below which a
    grid step cannot certify).  Raises StepInfeasible when the grid cannot
    meet a target above that floor.
    """
    if not (0.0 < epsilon < 1.0):
        raise EpsilonOutOfRange("epsilon must lie strictly between 0 and 1")
    if tol_p is None:
        tol_p = tols.tol_p_membership()
    cc, _ = _as_points(c, space.dim)
    c0 = cc[0]
    nodes = f.grid.points()
    fq = f.values - space.q(nodes)
    gap_inf = float(np.min(fq))
    if gap_inf < -tol_p:
        raise NotVZ("f dips below q; zero inf-convolution cannot hold")
    if gap_inf > tol_p:
        raise NotVZ(f"inf(f - q) = {gap_inf:.3e} never closes; "
                    "zero inf-convolution cannot hold")
    fc = float(f.evaluate(c0)[0]) if f.exact is not None else float(f.values[f.grid.nearest_index(c0)])
    qc = space.q(c0)
    alpha2 = max(0.0, fc - qc)
    trace = ProjectionTrace(start=c0.copy(), epsilon=epsilon, alpha=float(np.sqrt(alpha2)))
    if stop_tol is None:
        stop_tol = max(1e-12, tols.one_cell_p_bound(space, f.grid))
    if alpha2 <= tol_p:
        trace.iterates.append(c0.copy())
        trace.limit = c0.copy()
        trace.achieved_distance = 0.0
        return trace
    lam2 = trace.lam**2
    prev = c0
    target = alpha2
    for n in range(1, max_steps + 1):
        target *= lam2
        if target < stop_tol:
            break
        vals, args = min_values_plus_gauge(space, fq, nodes, prev[None, :])
        best = float(vals[0])
        if best > target:
            raise StepInfeasible(
                f"step {n}: grid best {best:.3e} exceeds certificate {target:.3e}",
                trace=trace, best=best)
        b = nodes[int(args[0])]
        trace.iterates.append(b.copy())
        trace.certificates.append({
            "step": n,
            "target": target,
            "achieved": best,
            "gap_term": float(fq[int(args[0])]),
            "p_term": float(space.p(prev - b)),
        })
        prev = b
    trace.limit = prev.copy()
    trace.achieved_distance = float(space.norm(c0 - prev))
    return trace


def recheck_trace(trace: ProjectionTrace, f: GridFn, space: SsdSpace) -> VerifyReport:
    """Re-derive every certificate from the recorded iterates alone."""
    report = VerifyReport(suite="recheck_trace",
                          tolerances={"float_slack": 1e-12},
                          meta={"epsilon": trace.epsilon, "alpha": trace.alpha})
    lam2 = trace.lam**2
    prev = trace.start
    target = trace.alpha**2
    ok_all = True
    worst = 0.0
    for n, b in enumerate(trace.iterates, start=1):
        if trace.alpha == 0.0:
            break
        target *= lam2
        idx = f.grid.nearest_index(b)
        val = float(f.values[idx] - space.q(b) + space.p(prev - b))
        excess = val - target
        worst = max(worst, excess)
        ok_all &= excess <= 1e-12
        prev = b
    report.add("per_step_certificates", "lemma_2_7a", ok_all, residual=max(0.0, worst),
               note=f"{len(trace.iterates)} steps rechecked")
    if trace.limit is not None:
        d = float(space.norm(trace.start - trace.limit))
        bound = trace.bound()
        report.add("distance_bound", "eq_2_7_2", d <= bound + 1e-12,
                   residual=max(0.0, d - bound),
                   note=f"distance {d:.4f} vs bound {bound:.4f}")
    return report


def dist_bounds_check(f: GridFn, space: SsdSpace, c_grid: GridSpec,
                      tol: float | None = None, ratio_floor: float | None = None) -> VerifyReport:
    """Distance-to-touching-set bounds with the sharpness ratio probe.

    Checks dist(c, P) <= sqrt(2) sqrt(-inf q(c - P)) + slack and
    dist(c, P) <= sqrt(2) sqrt((f - q)(c)), plus the chain
    -inf q(c - P) <= (f - q)(c).  Records max dist / sqrt(-inf q) over
    candidates whose denominator clears ratio_floor.
    """
    p = p_set(f, space)
    if len(p) == 0:
        raise PreconditionFailed("touching set is empty")
    if tol is None:
        tol = tols.ATOL_GRID
    cell = tols.cell_norm(space, c_grid)
    slack = 2.0 * cell
    pts = c_grid.points()
    dists = np.min(pairwise_norm(space, pts, p.points), axis=1)
    inf_q = np.min(pairwise_q(space, pts, p.points), axis=1)
    neg_inf_q = np.maximum(0.0, -inf_q)
    fq = f.evaluate(pts) - space.q(pts)
    report = VerifyReport(suite="dist_bounds_check", grid=c_grid.to_dict(),
                          tolerances={"tol": tol, "cell_slack": slack},
                          meta={"space": space.label, "touching_n": len(p)})
    r1 = dists - (_SQRT2 * np.sqrt(np.maximum(fq, 0.0)) + tol)
    i = int(np.argmax(r1))
    report.add("dist_vs_gap", "eq_2_7_1", float(r1[i]) <= 0.0,
               residual=max(0.0, float(r1[i])), witness=pts[i])
    r2 = dists - (_SQRT2 * np.sqrt(neg_inf_q) + slack)
    j = int(np.argmax(r2))
    report.add("dist_vs_infq", "thm_2_9a", float(r2[j]) <= 0.0,
               residual=max(0.0, float(r2[j])), witness=pts[j],
               note="additive slack of two grid cells for the sampled set")
    r3 = neg_inf_q - (np.maximum(fq, 0.0) + tol)
    k = int(np.argmax(r3))
    report.add("infq_below_gap", "remark_2_17", float(r3[k]) <= 0.0,
               residual=max(0.0, float(r3[k])), witness=pts[k])
    if ratio_floor is None:
        ratio_floor = 16.0 * tols.cell_norm(space, c_grid) ** 2
    valid = neg_inf_q >= ratio_floor
    if np.any(valid):
        ratios = dists[valid] / np.sqrt(neg_inf_q[valid])
        report.meta["max_ratio"] = float(np.max(ratios))
        report.meta["min_ratio"] = float(np.min(ratios))
        report.meta["ratio_floor"] = ratio_floor
    return report


def lemma_2_8_suite(space: SsdSpace, a: PointSet, h: GridFn, c_grid: GridSpec,
                    tol: float | None = None) -> VerifyReport:
    """Consequences of density + positivity for a sampled set.

    Preconditions (density, positivity) are themselves verified and the run
    refuses when they fail.  Checks the distance bound, the induced zero
    inf-convolution for any h >= q touching on the set, and grid maximality.
    """
    pos = is_q_positive(space, a)
    dense = p_dense_check(space, a, c_grid)
    if not (pos.passed and dense.passed):
        raise PreconditionFailed("set is not a grid-verified dense positive set")
    if tol is None:
        tol = tols.ATOL_GRID
    cell = tols.cell_norm(space, c_grid)
    pts = c_grid.points()
    report = VerifyReport(suite="lemma_2_8", grid=c_grid.to_dict(),
                          tolerances={"tol": tol, "cell_slack": 2.0 * cell},
                          meta={"space": space.label, "set": a.label})
    inf_q = np.min(pairwise_q(space, pts, a.points), axis=1)
    i = int(np.argmax(inf_q))
    q_cell = tols.one_cell_p_bound(space, c_grid)
    report.add("infq_nonpositive", "lemma_2_8a", float(inf_q[i]) <= q_cell,
               residual=max(0.0, float(inf_q[i])), witness=pts[i],
               note="one-cell slack for the sampled set")
    dists = np.min(pairwise_norm(space, pts, a.points), axis=1)
    r = dists - (_SQRT2 * np.sqrt(np.maximum(0.0, -inf_q)) + 2.0 * cell)
    j = int(np.argmax(r))
    report.add("dist_bound", "lemma_2_8a", float(r[j]) <= 0.0,
               residual=max(0.0, float(r[j])), witness=pts[j])
    hq = h.values - space.q(h.grid.points())
    above = float(np.min(hq)) >= -tols.tol_p_membership()
    touch = p_set(h, space) if above else None
    covers = False
    if touch is not None and len(touch):
        covers, _ = sets_match(space, a.points, touch.points, radius=np.inf)
        near = np.min(pairwise_norm(space, a.points, touch.points), axis=1)
        covers = bool(np.max(near) <= 2.0 * cell)
    if above and covers:
        vz = is_vz(h, space, c_grid=c_grid)
        report.add("induced_vz", "lemma_2_8b", vz.passed,
                   residual=vz.check("zero_infconv").worst_residual)
    else:
        report.add("induced_vz", "lemma_2_8b", False, skipped=True,
                   note="h does not dominate q or does not touch on the set")
    mx = is_maximally_q_positive(space, a, c_grid)
    report.add("grid_maximality", "lemma_2_8c", mx.passed,
               residual=mx.checks[0].worst_residual)
    return report

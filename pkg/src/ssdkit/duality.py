"""Dual-side structure: the inverse pairing, dual norms of the split-norm
family, image density, the two-sided inf-convolution identity, and the
equivalence battery for maximal sets.

The dual of R^d is R^d under the dot product, so the compatible dual pairing
is the matrix inverse of the primal one and the dual side is itself a space
of the same kind; we materialize it as an `SsdSpace` and reuse all gauges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DensityNotVerified,
    NoDual,
    PreconditionFailed,
    SingularPairing,
)
from .fitzpatrick import fitz_triple, phi, theta
from .gridfn import (
    GridFn,
    intrinsic_conjugate,
    is_mas,
    is_vz,
    min_values_plus_gauge,
    sup_linear_minus,
    zero_infconv_residuals,
)
from .grids import GridSpec, image_box
from .positivity import PointSet, is_maximally_q_positive, p_set, sets_match
from .reports import VerifyReport
from .spaces import (
    EUCLIDEAN,
    PRODUCT_KINDS,
    QUADRATIC,
    NormSpec,
    SsdSpace,
    _canonical_direction,
    pairwise_q,
    swap_matrix,
)
from . import tolerances as tols

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class DualSsd:
    """Dual pairing and dual norm attached to a space, as a space in its own
    right (`as_space` carries q-tilde and p-tilde as its q and p)."""

    space: SsdSpace
    pairing_tilde: np.ndarray
    dual_norm: NormSpec
    as_space: SsdSpace

    def q_tilde(self, c):
        return self.as_space.q(c)

    def g_tilde(self, c):
        return self.as_space.g(c)

    def p_tilde(self, c):
        return self.as_space.p(c)

    def to_dict(self):
        return {"pairing": self.pairing_tilde.tolist(), "norm": self.dual_norm.to_dict()}


def save_space_document(space: SsdSpace, path, dual: DualSsd | None = None) -> None:
    """One JSON document for a space, with the dual structure under "dual"."""
    import json

    doc = space.to_dict()
    if dual is not None:
        doc["dual"] = dual.to_dict()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_space_document(path) -> tuple[SsdSpace, DualSsd | None]:
    """Read a space document; reconstructs and revalidates the dual if present."""
    import json

    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    space = SsdSpace.from_dict(doc)
    dual = None
    if "dual" in doc:
        dual = make_dual(space)
        stored = np.asarray(doc["dual"]["pairing"], dtype=float)
        if np.max(np.abs(stored - dual.pairing_tilde)) > 1e-9:
            raise SingularPairing("stored dual pairing disagrees with the "
                                  "canonical one for this space")
    return space, dual


def make_dual(space: SsdSpace, probe_grid: GridSpec | None = None,
              tol: float = tols.ATOL_CLOSED, n_random: int = 1000,
              seed: int = 42) -> DualSsd:
    """Construct the canonical dual structure and validate compatibility.

    Raises SingularPairing when the pairing has no inverse and NoDual when
    the dual gauge p-tilde goes negative (witness and value attached).  The
    nonnegativity check is analytic whenever the dual norm has a quadratic
    form and sampled otherwise (p-tilde is 2-homogeneous, so a unit box
    sample suffices).
    """
    m = space.pairing
    if np.linalg.cond(m) > 1e12:
        raise SingularPairing("pairing matrix is numerically singular")
    m_inv = np.linalg.inv(m)
    m_tilde = 0.5 * (m_inv + m_inv.T)
    dual_norm = space.norm.dual()
    as_space = SsdSpace(m_tilde, norm=dual_norm,
                        label=(space.label + " (dual)") if space.label else "dual")
    dual = DualSsd(space, as_space.pairing, dual_norm, as_space)

    rng = np.random.default_rng(seed)
    b = rng.standard_normal((n_random, space.dim))
    cstar = rng.standard_normal((n_random, space.dim))
    lhs = np.einsum("ni,ij,nj->n", b @ m.T, m_tilde, cstar)
    rhs = np.einsum("ni,ni->n", b, cstar)
    if np.max(np.abs(lhs - rhs)) > 1e-8 * max(1.0, float(np.max(np.abs(rhs)))):
        raise SingularPairing("dual pairing fails the compatibility identity")
    qt = as_space.q(b @ m.T)
    if np.max(np.abs(qt - space.q(b))) > 1e-8 * max(1.0, float(np.max(np.abs(qt)))):
        raise SingularPairing("dual quadratic form fails the pullback identity")

    w = dual_norm.quadratic_weight(space.dim)
    if w is not None:
        vals, vecs = np.linalg.eigh(w + m_tilde)
        lo = float(vals[0])
        if lo < -tol:
            witness = _canonical_direction(vecs[:, 0])
            raise NoDual(f"dual gauge is negative: p_tilde({witness.tolist()}) = "
                         f"{as_space.p(witness):.6g}",
                         witness=witness, value=float(as_space.p(witness)))
    else:
        grid = probe_grid or GridSpec.box(-1.0, 1.0, _probe_points_per_axis(space.dim), space.dim)
        pts = grid.points()
        pv = as_space.p(pts)
        i = int(np.argmin(pv))
        if float(pv[i]) < -tol:
            raise NoDual(f"dual gauge is negative at {pts[i].tolist()}",
                         witness=pts[i], value=float(pv[i]))
    return dual


def _probe_points_per_axis(dim):
    return {1: 201, 2: 81, 3: 21, 4: 21}.get(dim, 9)


# -- dual norms -----------------------------------------------------------------

def numerical_dual_norm(space: SsdSpace, ystar) -> float:
    """sup{<x, y*> : norm(x) <= 1} computed independently of the closed form.

    For split norms the Euclidean alignment of each half reduces the problem
    to two radii on the unit sphere of a planar norm, scanned densely; for
    Euclidean/quadratic norms the aligned direction is explicit.
    """
    y = np.asarray(ystar, dtype=float)
    norm = space.norm
    if norm.variant == EUCLIDEAN:
        return float(np.linalg.norm(y) / norm.scale)
    if norm.variant == QUADRATIC:
        w = norm.quadratic_weight(space.dim)
        return float(np.sqrt(y @ np.linalg.solve(w, y)))
    n = space.dim // 2
    a = float(np.linalg.norm(y[:n]))
    b = float(np.linalg.norm(y[n:]))
    ts = np.linspace(0.0, np.pi / 2.0, 200_001)
    r1, r2 = np.cos(ts), np.sin(ts)
    lengths = norm.scale * norm.combine_halves(r1, r2)
    r1, r2 = r1 / lengths, r2 / lengths
    return float(np.max(r1 * a + r2 * b))


def dual_norm_check(space: SsdSpace, dual: DualSsd, n_samples: int = 100,
                    seed: int = 42, tol: float = 1e-4, radius: float = 3.0) -> VerifyReport:
    """Numerical dual norm vs the claimed closed form on random dual vectors."""
    rng = np.random.default_rng(seed)
    ys = rng.uniform(-radius, radius, size=(n_samples, space.dim))
    claimed = dual.dual_norm(ys)
    worst, witness = 0.0, None
    for y, c in zip(ys, claimed):
        err = abs(numerical_dual_norm(space, y) - float(c))
        if err > worst:
            worst, witness = err, y
    report = VerifyReport(suite="dual_norm_check", seed=seed,
                          tolerances={"tol": tol},
                          meta={"space": space.label, "n_samples": n_samples})
    report.add("dual_norm_closed_form", "ex_2_4", worst <= tol,
               residual=worst, witness=witness)
    z = np.zeros(space.dim)
    report.add("dual_norm_at_zero", "plumbing",
               abs(float(dual.dual_norm(z))) <= 1e-15, residual=abs(float(dual.dual_norm(z))))
    return report


# -- image density ------------------------------------------------------------------

def p_tilde_density(space: SsdSpace, dual: DualSsd, bstar, primal_grid: GridSpec):
    """(achieved infimum of p_tilde(b* - iota(c)), witnessing primal c).

    Three candidate witnesses, best value returned: the primal grid minimum,
    the split-norm algebraic witness (x = 0, x* side completed, exact zero
    for the unscaled split norms on the swap pairing), and the preimage
    through the map (exact zero whenever the pairing is invertible -- in
    finite dimensions the image is the whole dual side, so the density
    condition only ever fails by grid truncation).
    """
    b = np.asarray(bstar, dtype=float)
    nodes = primal_grid.points()
    diffs_vals = dual.p_tilde(b[None, :] - nodes @ space.pairing.T)
    i = int(np.argmin(diffs_vals))
    best_val, best_wit = float(diffs_vals[i]), nodes[i]
    if (space.norm.variant in PRODUCT_KINDS and space.norm.scale == 1.0
            and np.array_equal(space.pairing, swap_matrix(space.dim // 2))):
        n = space.dim // 2
        tau = space.norm.tau
        w = np.concatenate([np.zeros(n), b[:n] + tau**2 * b[n:]])
        val = float(dual.p_tilde(b - space.iota_apply(w)))
        if val < best_val:
            best_val, best_wit = val, w
    if np.linalg.cond(space.pairing) < 1e12:
        w = np.linalg.solve(space.pairing, b)
        val = float(dual.p_tilde(b - space.iota_apply(w)))
        if val < best_val:
            best_val, best_wit = val, w
    return best_val, best_wit


def density_report(space: SsdSpace, dual: DualSsd, primal_grid: GridSpec,
                   probe_points=None, tol_density: float = tols.DENSITY_TOL) -> VerifyReport:
    """Image density over a deterministic set of dual probe points."""
    if probe_points is None:
        box = image_box(primal_grid, space.pairing, inflate=1.5, include_source=True)
        coarse = GridSpec(box.lower, box.upper, np.minimum(box.num, 7))
        probe_points = coarse.points()
    worst, wit, arg = -np.inf, None, None
    for b in probe_points:
        val, w = p_tilde_density(space, dual, b, primal_grid)
        if val > worst:
            worst, wit, arg = val, b, w
    report = VerifyReport(suite="p_tilde_density", grid=primal_grid.to_dict(),
                          tolerances={"tol_density": tol_density},
                          meta={"space": space.label, "n_probes": len(probe_points)})
    report.add("image_density", "eq_4_2_1", worst <= tol_density,
               residual=max(0.0, worst), witness=wit,
               note="worst achieved infimum over the probe points")
    return report


# -- the two-sided identity -----------------------------------------------------------

def lemma_4_7_identity(space: SsdSpace, dual: DualSsd, f: GridFn, c_grid: GridSpec,
                       tol: float | None = None,
                       dual_grid: GridSpec | None = None) -> VerifyReport:
    """Zero-sum identity between the primal and dual inf-convolutions:
    ((f - q) ic p)(c) + ((f* - qt) ic pt)(iota(c)) should vanish on the grid.

    The dual-side minimization runs over the image of the sample grid unless
    `dual_grid` widens it (needed when the effective domain of f is much
    smaller than the box, which pushes the dual minimizer outside the image).
    """
    if tol is None:
        tol = max(tols.ATOL_GRID,
                  tols.one_cell_p_bound(space, f.grid)
                  + tols.one_cell_p_bound(dual.as_space, f.grid))
    c_pts = c_grid.points()
    term1, _ = zero_infconv_residuals(f, space, c_pts)
    if dual_grid is None:
        dual_nodes = f.grid.points() @ space.pairing.T
    else:
        dual_nodes = dual_grid.points()
    fstar, _ = sup_linear_minus(f.grid.points(), f.values, dual_nodes)
    gap = fstar - dual.q_tilde(dual_nodes)
    term2, _ = min_values_plus_gauge(dual.as_space, gap, dual_nodes,
                                     c_pts @ space.pairing.T)
    resid = np.abs(term1 + term2)
    i = int(np.argmax(resid))
    report = VerifyReport(suite="lemma_4_7", grid=c_grid.to_dict(),
                          tolerances={"tol": tol},
                          meta={"space": space.label, "fn": f.form,
                                "dual_lattice": "image of the sample grid"})
    report.add("two_sided_zero_sum", "lemma_4_7", float(resid[i]) <= tol,
               residual=float(resid[i]), witness=c_pts[i],
               note=f"term1 {float(term1[i]):+.3e}, term2 {float(term2[i]):+.3e} at witness")
    report.meta["max_term1"] = float(np.max(np.abs(term1)))
    report.meta["max_term2"] = float(np.max(np.abs(term2)))
    return report


def vz_mas_equivalence(space: SsdSpace, dual: DualSsd, f: GridFn,
                       density: VerifyReport | None = None) -> VerifyReport:
    """The two predicates must agree once image density is verified."""
    if density is None:
        density = density_report(space, dual, f.grid)
    if not density.passed:
        raise DensityNotVerified("image density does not hold on the probe points")
    vz = is_vz(f, space)
    mas = is_mas(f, space, dual)
    report = VerifyReport(suite="vz_mas_equivalence", grid=f.grid.to_dict(),
                          tolerances={**vz.tolerances, **mas.tolerances},
                          meta={"space": space.label, "fn": f.form,
                                "vz": vz.passed, "mas": mas.passed})
    report.add("verdicts_agree", "thm_4_9c", vz.passed == mas.passed,
               residual=0.0 if vz.passed == mas.passed else 1.0,
               note=f"vz={vz.passed}, mas={mas.passed}")
    return report


# -- the equivalence battery ------------------------------------------------------------

def theorem_4_10_battery(space: SsdSpace, dual: DualSsd, a: PointSet, grid: GridSpec,
                         h_candidates=None, tol: float = tols.ATOL_GRID) -> VerifyReport:
    """Equivalent conditions for a grid-maximal positive set; verdicts must be
    unanimous.  Refuses when maximality or image density fails.
    """
    mx = is_maximally_q_positive(space, a, grid)
    if not mx.passed:
        raise PreconditionFailed("set is not grid-maximal; battery does not apply")
    dens = density_report(space, dual, grid)
    if not dens.passed:
        raise DensityNotVerified("image density does not hold on the probe points")

    triple = fitz_triple(space, a, grid)
    nodes = grid.points()
    image_nodes = np.vstack([image_box(grid, space.pairing, inflate=1.0,
                                       include_source=False).points(),
                             nodes @ space.pairing.T])
    report = VerifyReport(suite="theorem_4_10", grid=grid.to_dict(),
                          tolerances={"tol": tol},
                          meta={"space": space.label, "set": a.label,
                                "dual_probe": "image box lattice + image of grid nodes"})
    verdicts = {}

    qt = dual.q_tilde(image_nodes)
    inf_qt = np.min(pairwise_q(dual.as_space, image_nodes, a.points @ space.pairing.T), axis=1)
    i = int(np.argmax(inf_qt))
    verdicts["a"] = float(inf_qt[i]) <= tol
    report.add("a_infqt_nonpositive", "thm_4_10a", verdicts["a"],
               residual=max(0.0, float(inf_qt[i])), witness=image_nodes[i])

    theta_vals = theta(space, a, image_nodes)
    gap_b = qt - theta_vals
    j = int(np.argmax(gap_b))
    verdicts["b"] = float(gap_b[j]) <= tol
    report.add("b_theta_dominates_qt", "thm_4_10b", verdicts["b"],
               residual=max(0.0, float(gap_b[j])), witness=image_nodes[j])

    phi_star, _ = sup_linear_minus(np.vstack([nodes, a.points]),
                                   np.concatenate([triple.phi_fn.values,
                                                   phi(space, a, a.points)]),
                                   image_nodes)
    gap_c = qt - phi_star
    k = int(np.argmax(gap_c))
    verdicts["c"] = float(gap_c[k]) <= tol
    report.add("c_phistar_dominates_qt", "thm_4_10c", verdicts["c"],
               residual=max(0.0, float(gap_c[k])), witness=image_nodes[k])

    vz_phi = is_vz(triple.phi_fn, space)
    verdicts["f"] = vz_phi.passed
    report.add("f_phi_vz", "thm_4_10f", vz_phi.passed,
               residual=vz_phi.check("zero_infconv").worst_residual)
    vz_star = is_vz(triple.star_theta_fn, space)
    verdicts["g"] = vz_star.passed
    report.add("g_star_vz", "thm_4_10g", vz_star.passed,
               residual=vz_star.check("zero_infconv").worst_residual)

    if h_candidates is None:
        mid = GridFn._raw(grid, 0.5 * (triple.phi_fn.values + triple.star_theta_fn.values),
                          form="midpoint candidate")
        h_candidates = [triple.phi_fn, triple.star_theta_fn, mid]
    cell = tols.cell_norm(space, grid)
    for idx, h in enumerate(h_candidates):
        mas = is_mas(h, space, dual)
        touch = p_set(h, space)
        match, dist = sets_match(space, a.points, touch.points, radius=2.0 * cell)
        verdicts[f"d{idx}"] = mas.passed and match
        report.add(f"d_candidate{idx}_mas_represents", "thm_4_10d", verdicts[f"d{idx}"],
                   residual=dist, note=f"candidate {h.form or idx}")
        vz = is_vz(h, space)
        verdicts[f"e{idx}"] = vz.passed and match
        report.add(f"e_candidate{idx}_vz_represents", "thm_4_10e", verdicts[f"e{idx}"],
                   residual=vz.check("zero_infconv").worst_residual)
        inside = (np.all(h.values <= triple.star_theta_fn.values + tols.tol_p_membership())
                  and np.all(h.values >= triple.phi_fn.values - tols.tol_p_membership()))
        h_at = intrinsic_conjugate(h, space)
        dom = float(np.min(h_at.values - space.q(nodes)))
        verdicts[f"b2.{idx}"] = (not inside) or dom >= -tol
        report.add(f"b2_candidate{idx}_conj_dominates", "thm_4_10b2", verdicts[f"b2.{idx}"],
                   residual=max(0.0, -dom),
                   note="sandwiched candidates: conjugate dominates the dual form")

    unanimous = len(set(verdicts.values())) == 1
    report.add("unanimity", "thm_4_10", unanimous,
               residual=0.0 if unanimous else 1.0,
               note=f"{sum(verdicts.values())}/{len(verdicts)} conditions true")
    report.meta["verdicts"] = {k: bool(v) for k, v in verdicts.items()}
    return report

"""Finite-dimensional spaces carrying a symmetric pairing and a compatible norm.

A space is R^d with a symmetric matrix M defining the pairing
``pair(b, c) = b^T M c`` and a norm chosen from a small family.  The dual of
R^d is identified with R^d through the standard dot product, so the canonical
map from the space into its dual is literally the matrix M.

Quadratic gauges used everywhere downstream:

    q(b) = pair(b, b) / 2        g(b) = norm(b)^2 / 2        p = g + q

A space is "norm-compatible" when p >= 0 everywhere; `check_banach_ssd`
verifies this analytically (quadratic norms) or on a sample grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NotSymmetric,
    UnsupportedProbe,
    ZeroDimension,
)

EUCLIDEAN = "euclidean"
QUADRATIC = "quadratic"
PRODUCT_ONE = "one"
PRODUCT_TWO = "two"
PRODUCT_INF = "inf"

PRODUCT_KINDS = (PRODUCT_ONE, PRODUCT_TWO, PRODUCT_INF)
_DUAL_PRODUCT_KIND = {PRODUCT_ONE: PRODUCT_INF, PRODUCT_TWO: PRODUCT_TWO, PRODUCT_INF: PRODUCT_ONE}

_SQRT2 = np.sqrt(2.0)


def _as_points(x, dim):
    """Coerce to a float array of shape (n, dim); return (array, was_single)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        if arr.shape[0] != dim:
            raise DimensionMismatch(f"expected length {dim}, got {arr.shape[0]}")
        return arr[None, :], True
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DimensionMismatch(f"expected shape (n, {dim}), got {arr.shape}")
    return arr, False


@dataclass(frozen=True, eq=False)
class NormSpec:
    """Norm descriptor.

    variant: "euclidean", "quadratic" (weight matrix W, norm sqrt(b^T W b)),
    or a product-split norm "one" / "two" / "inf" with torsion tau > 0 on an
    even-dimensional space split as (x, x*):

        one:  (tau*|x| + |x*|/tau) / sqrt(2)
        two:  sqrt(tau^2*|x|^2 + |x*|^2/tau^2)
        inf:  sqrt(2) * max(tau*|x|, |x*|/tau)

    with |.| the Euclidean norm on each half.  `scale` multiplies the whole
    norm (the family is not closed under scaling otherwise).
    """

    variant: str = EUCLIDEAN
    tau: float = 1.0
    scale: float = 1.0
    weight: np.ndarray | None = None

    def __post_init__(self):
        if self.variant not in (EUCLIDEAN, QUADRATIC) + PRODUCT_KINDS:
            raise ValueError(f"unknown norm variant {self.variant!r}")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.variant == QUADRATIC:
            if self.weight is None:
                raise ValueError("quadratic norm needs a weight matrix")
            w = np.asarray(self.weight, dtype=float)
            object.__setattr__(self, "weight", 0.5 * (w + w.T))

    @property
    def is_product(self) -> bool:
        return self.variant in PRODUCT_KINDS

    def __call__(self, points, dim=None):
        """Evaluate the norm on an (n, d) array or a single vector."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        d = pts.shape[1]
        if self.variant == EUCLIDEAN:
            out = np.linalg.norm(pts, axis=1)
        elif self.variant == QUADRATIC:
            out = np.sqrt(np.maximum(np.einsum("ni,ij,nj->n", pts, self.weight, pts), 0.0))
        else:
            n = d // 2
            if 2 * n != d:
                raise DimensionMismatch("product norm needs even dimension")
            a = np.linalg.norm(pts[:, :n], axis=1)
            b = np.linalg.norm(pts[:, n:], axis=1)
            out = self.combine_halves(a, b)
        out = self.scale * out
        return float(out[0]) if single else out

    def combine_halves(self, a, b):
        """Norm value from the Euclidean norms of the two halves (unscaled)."""
        ta, tb = self.tau * np.asarray(a), np.asarray(b) / self.tau
        if self.variant == PRODUCT_ONE:
            return (ta + tb) / _SQRT2
        if self.variant == PRODUCT_TWO:
            return np.sqrt(ta**2 + tb**2)
        if self.variant == PRODUCT_INF:
            return _SQRT2 * np.maximum(ta, tb)
        raise UnsupportedProbe("combine_halves only applies to product norms")

    def dual(self) -> "NormSpec":
        """Dual norm under the dot-product pairing.

        For product norms the dual swaps the roles of the two halves, which
        on dot coordinates is the partner kind with torsion 1/tau.
        """
        if self.variant == EUCLIDEAN:
            return NormSpec(EUCLIDEAN, scale=1.0 / self.scale)
        if self.variant == QUADRATIC:
            w_inv = np.linalg.inv(self.weight)
            return NormSpec(QUADRATIC, scale=1.0 / self.scale, weight=0.5 * (w_inv + w_inv.T))
        return NormSpec(_DUAL_PRODUCT_KIND[self.variant], tau=1.0 / self.tau, scale=1.0 / self.scale)

    def quadratic_weight(self, dim) -> np.ndarray | None:
        """W with norm^2 = b^T W b, or None when the norm is not quadratic."""
        s2 = self.scale**2
        if self.variant == EUCLIDEAN:
            return s2 * np.eye(dim)
        if self.variant == QUADRATIC:
            return s2 * self.weight
        if self.variant == PRODUCT_TWO:
            n = dim // 2
            diag = np.concatenate([np.full(n, self.tau**2), np.full(n, self.tau**-2)])
            return s2 * np.diag(diag)
        return None

    def to_dict(self):
        doc = {"variant": self.variant, "tau": self.tau, "scale": self.scale}
        if self.weight is not None:
            doc["weight"] = np.asarray(self.weight).tolist()
        return doc

    @classmethod
    def from_dict(cls, doc):
        return cls(
            variant=doc.get("variant", EUCLIDEAN),
            tau=float(doc.get("tau", 1.0)),
            scale=float(doc.get("scale", 1.0)),
            weight=np.asarray(doc["weight"], dtype=float) if "weight" in doc else None,
        )


class SsdSpace:
    """R^d with symmetric pairing matrix M and a norm; immutable after build."""

    def __init__(self, pairing, norm: NormSpec | None = None, label: str = ""):
        m = np.asarray(pairing, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotSymmetric(f"pairing must be square, got shape {m.shape}")
        if m.shape[0] == 0:
            raise ZeroDimension("space must be nonzero")
        if np.max(np.abs(m - m.T)) > 0:
            raise NotSymmetric("pairing matrix is not symmetric")
        self.pairing = m.copy()
        self.pairing.setflags(write=False)
        self.dim = m.shape[0]
        self.norm = norm if norm is not None else NormSpec()
        if self.norm.is_product and self.dim % 2 != 0:
            raise DimensionMismatch("product norms need an even-dimensional space")
        if self.norm.variant == QUADRATIC and self.norm.weight.shape != m.shape:
            raise DimensionMismatch("quadratic norm weight has the wrong shape")
        self.label = label
        self._opnorm_cache = None

    def __repr__(self):
        return f"SsdSpace(dim={self.dim}, norm={self.norm.variant!r}, label={self.label!r})"

    # -- pairing and gauges ---------------------------------------------------

    def pair(self, b, c) -> float:
        bb, _ = _as_points(b, self.dim)
        cc, _ = _as_points(c, self.dim)
        if bb.shape[0] == 1 and cc.shape[0] == 1:
            return float(bb[0] @ self.pairing @ cc[0])
        raise DimensionMismatch("pair expects two single vectors; use pairwise_pair")

    def pairwise_pair(self, b_rows, c_rows) -> np.ndarray:
        bb, _ = _as_points(b_rows, self.dim)
        cc, _ = _as_points(c_rows, self.dim)
        return bb @ self.pairing @ cc.T

    def q(self, b):
        bb, single = _as_points(b, self.dim)
        out = 0.5 * np.einsum("ni,ij,nj->n", bb, self.pairing, bb)
        return float(out[0]) if single else out

    def norm_of(self, b):
        return self.norm(b)

    def g(self, b):
        bb, single = _as_points(b, self.dim)
        out = 0.5 * self.norm(bb) ** 2
        return float(out[0]) if single else out

    def p(self, b):
        bb, single = _as_points(b, self.dim)
        out = self.g(bb) + self.q(bb)
        return float(out[0]) if single else out

    def dist(self, c, points) -> float:
        """Norm distance from c to a finite set of points (rows)."""
        pts, _ = _as_points(points, self.dim)
        cc, _ = _as_points(c, self.dim)
        return float(np.min(self.norm(pts - cc[0])))

    # -- canonical map into the dual -----------------------------------------

    def iota(self) -> np.ndarray:
        """Matrix of the map realizing the pairing against the dot product."""
        return self.pairing

    def iota_apply(self, b):
        bb, single = _as_points(b, self.dim)
        out = bb @ self.pairing.T
        return out[0] if single else out

    def dual_norm_of(self, c):
        return self.norm.dual()(c)

    def operator_norm(self):
        """(value, estimated) for the canonical map as an operator norm.

        Exact for Euclidean/quadratic norms and for product norms whose
        pairing is the half-swap; otherwise a seeded sampled estimate.
        """
        if self._opnorm_cache is None:
            self._opnorm_cache = self._operator_norm()
        return self._opnorm_cache

    def _operator_norm(self):
        s2 = self.norm.scale**2
        if self.norm.variant == EUCLIDEAN:
            return float(np.linalg.norm(self.pairing, 2) / s2), False
        if self.norm.variant == QUADRATIC:
            w = s2 * self.norm.weight
            vals, vecs = np.linalg.eigh(w)
            w_isqrt = (vecs / np.sqrt(vals)) @ vecs.T
            return float(np.linalg.norm(w_isqrt @ self.pairing @ w_isqrt, 2)), False
        if self.norm.is_product and np.array_equal(self.pairing, swap_matrix(self.dim // 2)):
            exact = {PRODUCT_ONE: 2.0, PRODUCT_TWO: 1.0, PRODUCT_INF: 1.0}
            return exact[self.norm.variant] / s2, False
        rng = np.random.default_rng(42)
        u = rng.standard_normal((10_000, self.dim))
        u /= self.norm(u)[:, None]
        return float(np.max(self.dual_norm_of(u @ self.pairing.T))), True

    # -- serialization ---------------------------------------------------------

    def to_dict(self):
        return {
            "dim": self.dim,
            "pairing": self.pairing.tolist(),
            "norm": self.norm.to_dict(),
            "label": self.label,
        }

    def to_json(self, path=None):
        doc = json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(doc)
        return doc

    @classmethod
    def from_dict(cls, doc):
        return cls(
            pairing=np.asarray(doc["pairing"], dtype=float),
            norm=NormSpec.from_dict(doc.get("norm", {})),
            label=doc.get("label", ""),
        )

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def make_ssd(pairing_matrix, norm: NormSpec | None = None, label: str = "") -> SsdSpace:
    """Build a space, rejecting non-symmetric pairings and dimension zero."""
    return SsdSpace(pairing_matrix, norm=norm, label=label)


def swap_matrix(n: int) -> np.ndarray:
    """The 2n x 2n block matrix exchanging the two halves of (x, x*)."""
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = np.eye(n)
    return j


def product_space(n: int, kind: str = PRODUCT_TWO, tau: float = 1.0, scale: float = 1.0,
                  label: str = "") -> SsdSpace:
    """R^n x R^n with pair((x,x*),(y,y*)) = <x,y*> + <y,x*> and a split norm."""
    norm = NormSpec(kind, tau=tau, scale=scale)
    if not label:
        label = f"product(n={n}, norm={kind},{tau:g}" + (f", scale={scale:g})" if scale != 1 else ")")
    return SsdSpace(swap_matrix(n), norm=norm, label=label)


# -- pairwise gauge kernels (no (n*m, d) intermediates) -------------------------

def pairwise_sq_dists(x_rows, y_rows):
    x = np.asarray(x_rows, dtype=float)
    y = np.asarray(y_rows, dtype=float)
    sq = (np.sum(x**2, axis=1)[:, None] - 2.0 * (x @ y.T)) + np.sum(y**2, axis=1)[None, :]
    return np.maximum(sq, 0.0)


def pairwise_q(space: SsdSpace, x_rows, y_rows):
    """Matrix of q(x_i - y_j)."""
    x, _ = _as_points(x_rows, space.dim)
    y, _ = _as_points(y_rows, space.dim)
    return space.q(x)[:, None] - x @ space.pairing @ y.T + space.q(y)[None, :]


def pairwise_g(space: SsdSpace, x_rows, y_rows):
    """Matrix of g(x_i - y_j)."""
    x, _ = _as_points(x_rows, space.dim)
    y, _ = _as_points(y_rows, space.dim)
    norm = space.norm
    w = norm.quadratic_weight(space.dim)
    if w is not None:
        qx = 0.5 * np.einsum("ni,ij,nj->n", x, w, x)
        qy = 0.5 * np.einsum("ni,ij,nj->n", y, w, y)
        return qx[:, None] - x @ w @ y.T + qy[None, :]
    n = space.dim // 2
    a = np.sqrt(pairwise_sq_dists(x[:, :n], y[:, :n]))
    b = np.sqrt(pairwise_sq_dists(x[:, n:], y[:, n:]))
    return 0.5 * (norm.scale * norm.combine_halves(a, b)) ** 2


def pairwise_p(space: SsdSpace, x_rows, y_rows):
    """Matrix of p(x_i - y_j)."""
    return pairwise_g(space, x_rows, y_rows) + pairwise_q(space, x_rows, y_rows)


def pairwise_norm(space: SsdSpace, x_rows, y_rows):
    """Matrix of norm(x_i - y_j)."""
    return np.sqrt(np.maximum(2.0 * pairwise_g(space, x_rows, y_rows), 0.0))


# -- compatibility and continuity checks ----------------------------------------

def check_banach_ssd(space: SsdSpace, probe="analytic", tol: float = 1e-9):
    """Verify p = g + q >= 0, analytically or on a sample grid.

    `probe` is "analytic" (smallest eigenvalue of W + M, only for norms with
    a quadratic form) or a GridSpec to minimize p over.  The report carries
    the minimizing witness on failure.
    """
    from .reports import VerifyReport

    report = VerifyReport(suite="check_banach_ssd", tolerances={"tol": tol},
                          meta={"space": space.label})
    if isinstance(probe, str):
        if probe != "analytic":
            raise UnsupportedProbe(f"unknown probe {probe!r}")
        if space.norm.is_product:
            raise UnsupportedProbe("analytic probe does not cover the split "
                                   "norms; pass a GridSpec to sample instead")
        w = space.norm.quadratic_weight(space.dim)
        vals, vecs = np.linalg.eigh(w + space.pairing)
        lo = float(vals[0])
        witness = _canonical_direction(vecs[:, 0])
        report.add("gauge_nonnegative", "eq_2_1_1", lo >= -tol,
                   residual=max(0.0, -lo), witness=witness,
                   note="smallest eigenvalue of W + M")
        report.meta["method"] = "analytic"
    else:
        pts = probe.points()
        pv = space.p(pts)
        i = int(np.argmin(pv))
        report.add("gauge_nonnegative", "eq_2_1_1", float(pv[i]) >= -tol,
                   residual=max(0.0, -float(pv[i])), witness=pts[i],
                   note="grid minimum of p")
        report.grid = probe.to_dict()
        report.meta["method"] = "sampled"
    return report


def _canonical_direction(vec):
    """Scale to unit max-entry with the first nonzero entry positive."""
    v = np.asarray(vec, dtype=float)
    v = v / np.max(np.abs(v))
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return np.where(np.abs(v) < 1e-12, 0.0, v)


def lipschitz_checks(space: SsdSpace, n_pairs: int = 1000, seed: int = 42,
                     radius: float = 3.0, tol: float = 1e-9):
    """Continuity bounds for q and p on sampled pairs.

    Checks |q(d) - q(e)| <= 0.5*|iota|*|d-e|*|d+e| and
    |p(d) - p(e)| <= 0.5*(1+|iota|)*|d-e|*(|d|+|e|); when the operator norm
    is a sampled estimate the report says so.
    """
    from .reports import VerifyReport

    rng = np.random.default_rng(seed)
    d = rng.uniform(-radius, radius, size=(n_pairs, space.dim))
    e = rng.uniform(-radius, radius, size=(n_pairs, space.dim))
    opnorm, estimated = space.operator_norm()
    qd, qe = space.q(d), space.q(e)
    nd, ne = space.norm(d), space.norm(e)
    ndiff = space.norm(d - e)
    q_resid = np.abs(qd - qe) - 0.5 * opnorm * ndiff * space.norm(d + e)
    p_resid = np.abs(space.p(d) - space.p(e)) - 0.5 * (1.0 + opnorm) * ndiff * (nd + ne)
    report = VerifyReport(suite="lipschitz_checks", seed=seed,
                          tolerances={"tol": tol},
                          meta={"space": space.label, "n_pairs": n_pairs,
                                "operator_norm": opnorm,
                                "operator_norm_estimated": estimated})
    i = int(np.argmax(q_resid))
    report.add("q_continuity", "eq_2_1_3", float(q_resid[i]) <= tol,
               residual=max(0.0, float(q_resid[i])), witness=[d[i], e[i]])
    j = int(np.argmax(p_resid))
    report.add("p_continuity", "eq_2_1_5", float(p_resid[j]) <= tol,
               residual=max(0.0, float(p_resid[j])), witness=[d[j], e[j]])
    k = rng.uniform(-radius, radius, size=(n_pairs, space.dim))
    m = rng.uniform(-radius, radius, size=(n_pairs, space.dim))
    bound = opnorm * space.norm(k) * space.norm(m)
    vals = np.abs(np.einsum("ni,ij,nj->n", k, space.pairing, m))
    r = int(np.argmax(vals - bound))
    report.add("pairing_bound", "eq_2_1_2", float(vals[r] - bound[r]) <= tol,
               residual=max(0.0, float(vals[r] - bound[r])), witness=[k[r], m[r]])
    return report

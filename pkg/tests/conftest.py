import numpy as np
import pytest

from ssdkit import make_dual, product_space
from ssdkit.catalog import (
    default_grid,
    diagonal_set,
    half_sq_norm_fn,
    space_identity,
    space_swap_r3,
)


@pytest.fixture(scope="session")
def prod_space():
    """R^2 = R x R with the swap pairing and the tau=1 quadratic split norm."""
    return product_space(1, kind="two", tau=1.0)


@pytest.fixture(scope="session")
def prod_dual(prod_space):
    return make_dual(prod_space)


@pytest.fixture(scope="session")
def swap3():
    return space_swap_r3()


@pytest.fixture(scope="session")
def ident2():
    return space_identity(2)


@pytest.fixture(scope="session")
def grid61():
    return default_grid(2, -3.0, 3.0, 61)


@pytest.fixture(scope="session")
def grid121():
    return default_grid(2, -3.0, 3.0, 121)


@pytest.fixture(scope="session")
def diag121():
    return diagonal_set(-3.0, 3.0, 121)


@pytest.fixture(scope="session")
def worked_fn61(grid61):
    return half_sq_norm_fn(grid61)


@pytest.fixture(scope="session")
def worked_fn121(grid121):
    return half_sq_norm_fn(grid121)


def brute_force_conjugate(points, values, targets):
    """O(N*M) reference conjugate written as an explicit double loop."""
    out = np.empty(len(targets))
    for j, y in enumerate(targets):
        best = -np.inf
        for x, fx in zip(points, values):
            if np.isfinite(fx):
                best = max(best, float(np.dot(x, y)) - float(fx))
        out[j] = best
    return out


def lower_convex_hull_1d(xs, ys):
    """Monotone-chain lower hull, evaluated back at the sample abscissae."""
    pts = sorted(zip(xs, ys))
    hull = []
    for x, y in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (x - x1) >= (y - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((x, y))
    hx = np.array([h[0] for h in hull])
    hy = np.array([h[1] for h in hull])
    return np.interp(xs, hx, hy)

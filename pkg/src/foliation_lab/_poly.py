"""Low-level polynomial numerics: coefficient lists are low degree first."""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import RootFindingFailed

EPS = float(np.finfo(float).eps)
TRIM_TOL = 1e-12
CLUSTER_TOL = 1e-7
MAX_ABERTH_ITER = 200
_LOOSE_LINK = 5e-2


def trim(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    nz = np.nonzero(np.abs(c) > TRIM_TOL)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1].copy()


def degree(c: np.ndarray) -> int:
    return len(c) - 1


def polyval(c, x):
    return P.polyval(x, c)


def polyder(c: np.ndarray, m: int = 1) -> np.ndarray:
    if len(c) <= m:
        return np.zeros(1, dtype=complex)
    return P.polyder(c, m)


def _error_bound(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    # Horner rounding bound, inflated to make the stopping test robust.
    n = len(c) - 1
    return 8 * (n + 1) * EPS * P.polyval(np.abs(z), np.abs(c))


def aberth_roots(coeffs, max_iter: int = MAX_ABERTH_ITER) -> np.ndarray:
    """All roots of a polynomial by simultaneous Aberth refinement.

    Exact zero roots (vanishing low-order coefficients) are split off first.
    A root estimate is frozen once its residual drops to the rounding level
    of the evaluation, which is how clusters around a multiple root stop.
    """
    c = trim(coeffs)
    n = degree(c)
    if n <= 0:
        return np.zeros(0, dtype=complex)
    k0 = int(np.argmax(np.abs(c) > 0))
    c = c[k0:]
    zero_roots = np.zeros(k0, dtype=complex)
    n = degree(c)
    if n == 0:
        return zero_roots
    if n == 1:
        return np.concatenate([zero_roots, [-c[0] / c[1]]])

    c = c / c[-1]
    dc = P.polyder(c)
    r0 = abs(c[0]) ** (1.0 / n)
    k = np.arange(n)
    z = r0 * (1 + 0.02 * k / n) * np.exp(1j * (2 * np.pi * k / n + 0.4))

    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter + 1):
        pz = P.polyval(z, c)
        done |= np.abs(pz) <= _error_bound(c, z)
        if done.all():
            return np.concatenate([zero_roots, z])
        dpz = P.polyval(z, dc)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        if np.any(diff == 0):
            z = z + 1e-10 * (1 + np.abs(z)) * np.exp(1j * (k + 1.0))
            continue
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            corr = ratio / (1 - ratio * s)
        bad = ~np.isfinite(corr)
        corr[bad] = 1e-8 * (1 + np.abs(z[bad]))
        active = ~done
        z[active] = z[active] - corr[active]
    raise RootFindingFailed(
        f"Aberth iteration did not converge in {max_iter} iterations "
        f"(degree {n}, {int((~done).sum())} roots unsettled)"
    )


def _link(roots: np.ndarray, thresh: float) -> list[list[int]]:
    """Single-linkage groups under a relative distance threshold."""
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = 1 + max(abs(roots[i]), abs(roots[j]))
            if abs(roots[i] - roots[j]) <= thresh * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _polish_multiple(c: np.ndarray, x0: complex, m: int) -> complex:
    # Newton on the (m-1)-th derivative, where an m-fold root is simple.
    q = polyder(c, m - 1)
    dq = polyder(q)
    x = x0
    for _ in range(60):
        qx = P.polyval(x, q)
        dqx = P.polyval(x, dq)
        if dqx == 0:
            break
        step = qx / dqx
        x = x - step
        if abs(step) <= 4 * EPS * (1 + abs(x)):
            break
    return complex(x)


def _pseudozero_radius(c: np.ndarray, x: complex, m: int) -> float:
    dm = abs(P.polyval(x, polyder(c, m)))
    if dm == 0:
        return math.inf
    eta = float(_error_bound(c, np.array([x]))[0])
    return (math.factorial(m) * eta / dm) ** (1.0 / m)


def _resolve(c: np.ndarray, rs: np.ndarray, thresh: float) -> list[tuple[complex, int]]:
    m = len(rs)
    if m == 1:
        return [(complex(rs[0]), 1)]
    c0 = complex(rs.mean())
    spread = float(np.max(np.abs(rs - c0)))
    scale = 1 + abs(c0)
    x = _polish_multiple(c, c0, m)
    if abs(x - c0) > max(10 * spread, CLUSTER_TOL * scale):
        x = c0
    if spread <= CLUSTER_TOL * scale:
        return [(x, m)]
    if spread <= 100 * _pseudozero_radius(c, x, m):
        return [(x, m)]
    out: list[tuple[complex, int]] = []
    finer = thresh / 10
    for g in _link(rs, finer):
        out.extend(_resolve(c, rs[g], finer))
    return out


def root_clusters(coeffs) -> list[tuple[complex, int]]:
    """Distinct roots with multiplicities.

    Root estimates are grouped loosely, then each group is accepted as one
    multiple root only if its spread is consistent with the rounding-level
    pseudozero set of that multiplicity; otherwise it is split at a finer
    threshold. Groups tighter than the clustering tolerance always merge.
    """
    c = trim(coeffs)
    if degree(c) <= 0:
        return []
    roots = aberth_roots(c)
    out: list[tuple[complex, int]] = []
    for g in _link(roots, _LOOSE_LINK):
        out.extend(_resolve(c, roots[g], _LOOSE_LINK))
    return out


def from_roots(roots: list[tuple[complex, int]], lead: complex = 1.0) -> np.ndarray:
    c = np.array([lead], dtype=complex)
    for r, m in roots:
        for _ in range(m):
            c = P.polymul(c, np.array([-r, 1.0], dtype=complex))
    return c

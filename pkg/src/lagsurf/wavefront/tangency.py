"""Locating and classifying tangencies of two wavefronts (points where the gradients agree)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import GeneratingFunction

NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-12
STEP_TOL = 1e-13
DAMPING = 0.5
MAX_HALVINGS = 40
DEDUP_RADIUS = 1e-6
DEGENERATE_DET = 1e-8
DEFAULT_GRID = 64


@dataclass(frozen=True)
class Tangency:
    point: tuple[float, float]
    sgn: int
    """+1 or -1 at transversal points; 0 when the Hessian is degenerate."""
    transversal: bool
    hessian_det: float
    hessian: tuple[tuple[float, float], tuple[float, float]]
    residual: float

    def tsv(self) -> str:
        x1, x2 = (_clean(v) for v in self.point)
        return f"{x1:.12g}\t{x2:.12g}\t{_clean(self.hessian_det):.12g}\t{self.sgn:d}\t{str(self.transversal).lower()}"


TSV_HEADER = "x1\tx2\tdet\tsgn\ttransversal"


def _clean(v: float) -> float:
    # print -0.0 and roundoff-sized values as 0
    return 0.0 if abs(v) < 1e-14 else float(v)


def _residual(g: GeneratingFunction, x1, x2):
    gr = g.gradient(x1, x2)
    r = np.hypot(gr[0], gr[1])
    return gr, np.where(np.isfinite(r), r, np.inf)


def _newton(g: GeneratingFunction, x1: np.ndarray, x2: np.ndarray):
    """Damped Newton on grad g = 0 for every seed at once.

    Returns final points and residual norms; seeds that stall keep their last iterate.
    A seed stops once the residual is below tolerance and the last step was
    negligible; the second test keeps slowly converging (degenerate) roots moving
    until their Hessian shows it.
    """
    gr, res = _residual(g, x1, x2)
    active = np.isfinite(res)
    for _ in range(NEWTON_MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        H = g.hessian(x1[idx], x2[idx])
        a, b, d = H[0, 0], H[0, 1], H[1, 1]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            det = a * d - b * b
            ok = np.isfinite(det) & (det != 0)
            s1 = np.where(ok, -(d * gr[0, idx] - b * gr[1, idx]) / det, 0.0)
            s2 = np.where(ok, -(-b * gr[0, idx] + a * gr[1, idx]) / det, 0.0)
        lam = np.ones(idx.size)
        pending = ok.copy()
        new1, new2 = x1[idx].copy(), x2[idx].copy()
        new_gr = gr[:, idx].copy()
        new_res = res[idx].copy()
        for _ in range(MAX_HALVINGS):
            p = np.flatnonzero(pending)
            if p.size == 0:
                break
            t1 = x1[idx[p]] + lam[p] * s1[p]
            t2 = x2[idx[p]] + lam[p] * s2[p]
            tg, tr = _residual(g, t1, t2)
            accept = tr <= res[idx[p]]
            acc = p[accept]
            new1[acc], new2[acc] = t1[accept], t2[accept]
            new_gr[:, acc] = tg[:, accept]
            new_res[acc] = tr[accept]
            pending[acc] = False
            lam[p[~accept]] *= DAMPING
        moved = ~pending & ok
        step = np.hypot(new1 - x1[idx], new2 - x2[idx])
        x1[idx], x2[idx] = new1, new2
        gr[:, idx], res[idx] = new_gr, new_res
        # a seed whose step cannot reduce the residual is finished
        stalled = idx[~moved]
        active[stalled] = False
        active[idx[(new_res <= NEWTON_TOL) & (step <= STEP_TOL * (1 + np.hypot(new1, new2)))]] = False
    return x1, x2, res


def find_tangencies(h1: GeneratingFunction, h2: GeneratingFunction, box, grid: int = DEFAULT_GRID) -> list[Tangency]:
    """All points of ``box`` where grad h1 = grad h2, classified by det Hess(h2 - h1).

    ``box`` is ``((x1_lo, x1_hi), (x2_lo, x2_hi))``; a degenerate interval
    (lo == hi) restricts the search to a line.
    """
    (a1, b1), (a2, b2) = box
    if a1 > b1 or a2 > b2:
        raise ValueError(f"empty box {box}")
    g = h2 - h1
    u = (np.arange(grid) + 0.5) / grid
    s1, s2 = np.meshgrid(a1 + (b1 - a1) * u, a2 + (b2 - a2) * u, indexing="ij")
    x1, x2, res = _newton(g, s1.ravel().copy(), s2.ravel().copy())

    eps = 1e-12
    inside = (res <= NEWTON_TOL) & (x1 >= a1 - eps) & (x1 <= b1 + eps) & (x2 >= a2 - eps) & (x2 <= b2 + eps)
    cand = sorted(zip(res[inside], x1[inside], x2[inside]))
    reps: list[tuple[float, float, float]] = []
    for r, p1, p2 in cand:
        if all(np.hypot(p1 - q1, p2 - q2) > DEDUP_RADIUS for _, q1, q2 in reps):
            reps.append((r, p1, p2))

    out = []
    for r, p1, p2 in sorted(reps, key=lambda t: (t[1], t[2])):
        H = g.hessian(p1, p2)
        det = float(H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0])
        transversal = abs(det) >= DEGENERATE_DET
        sgn = (1 if det > 0 else -1) if transversal else 0
        hess = ((float(H[0, 0]), float(H[0, 1])), (float(H[1, 0]), float(H[1, 1])))
        out.append(Tangency((float(p1), float(p2)), sgn, transversal, det, hess, float(r)))
    return out

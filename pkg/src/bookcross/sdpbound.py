"""Semidefinite max-k-cut bounds and certified crossing-number lower bounds.

The Frieze-Jerrum relaxation upper-bounds the maximum k-cut of the
chord-overlap graph, hence C(n,4) minus it lower-bounds the k-page
crossing number.  For odd n the dihedral symmetry collapses the program
to d+1 linear matrix inequalities of order d-1 (d = floor(n/2)) whose
data are discrete-Fourier eigenvalues of the adjacency circulant blocks.
Solver output is never trusted as a bound directly: `certify_bound`
repairs the returned point to exact-arithmetic-safe feasibility first.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Iterable

import cvxpy as cp
import numpy as np

from .chordgraph import ChordGraph, InputError, block_first_row, laplacian
from .drawings import dds_limit_ratio, prior_lower_ratio

__all__ = [
    "SdpProblem",
    "LmiBlock",
    "SdpSolution",
    "CertifiedBound",
    "fj_dense",
    "assemble_reduced",
    "solve_conic",
    "fj_reduced",
    "certify_bound",
    "lift_bound",
    "alpha_upper_bound",
    "ALPHA_GUARANTEE",
    "limit_table",
    "load_bound_cache",
    "update_bound_cache",
]

# Approximation guarantees alpha_k for max-k-cut rounding, 3 <= k <= 10.
ALPHA_GUARANTEE = {
    3: 0.836008,
    4: 0.857487,
    5: 0.876610,
    6: 0.891543,
    7: 0.903259,
    8: 0.912664,
    9: 0.920367,
    10: 0.926788,
}

_DENSE_GUARD = 320


@dataclass
class LmiBlock:
    """One constraint  const + sum_i y_i free_coeff[i] + sum_b c_b X_b >= 0 (PSD).

    Nonnegative matrix variables enter whole-block with a scalar multiplier
    (zero when a block does not appear); their dimension must match.
    """

    dim: int
    const: np.ndarray
    free_coeff: list[np.ndarray]
    nonneg_coeff: list[float]


@dataclass
class SdpProblem:
    """Minimization over free scalars and entrywise-nonnegative symmetric blocks."""

    num_free: int
    nonneg_dims: list[int]
    objective_free: np.ndarray
    objective_nonneg: list[np.ndarray]
    psd_blocks: list[LmiBlock]
    constant: float = 0.0
    meta: dict = field(default_factory=dict)


@dataclass
class SdpSolution:
    """Solver output plus the feasibility residuals used for certification."""

    status: str  # optimal | feasible-suboptimal | failed
    objective_value: float
    primal_residual: float  # worst PSD violation (positive = infeasible)
    dual_residual: float  # worst nonnegativity violation
    min_eigenvalue_slack: float
    method: str  # reduced | dense-primal | dense-dual
    n: int = 0
    k: int = 0
    y: np.ndarray | None = None
    x_blocks: list[np.ndarray] | None = None
    solver_gap: float | None = None
    solver_name: str = ""

    @property
    def ok(self) -> bool:
        return self.status in ("optimal", "feasible-suboptimal")


@dataclass
class CertifiedBound:
    """A rigorous lower bound on nu_k(K_n) from a repaired relaxation point."""

    n: int
    k: int
    fj_value: float  # valid upper bound on the relaxation value
    nu_lower: int
    certificate_feasibility_margin: float
    method: str  # reduced | dense

    @property
    def ratio(self) -> float:
        """(C(n,4) - fj_value) / C(n,4), a lower bound on nu_k(K_n)/C(n,4)."""
        c4 = comb(self.n, 4)
        return (c4 - self.fj_value) / c4

    def to_json_dict(self, solver_tol: float | None = None) -> dict:
        rec = {
            "n": self.n,
            "k": self.k,
            "fj": self.fj_value,
            "nu_lower": self.nu_lower,
            "margin": self.certificate_feasibility_margin,
            "method": self.method,
        }
        if solver_tol is not None:
            rec["solver_tol"] = solver_tol
        return rec


def _solve_with_fallback(problem: cp.Problem, tol: float) -> str:
    """Try CLARABEL at the requested tolerance, relaxing once, then SCS.

    Tolerances below what the solver can attain are retried at 1e-8;
    bounds stay rigorous regardless because certification repairs the
    returned point.
    """
    for attempt_tol in dict.fromkeys((tol, max(tol, 1e-8))):
        try:
            problem.solve(
                solver=cp.CLARABEL,
                tol_gap_abs=attempt_tol,
                tol_gap_rel=attempt_tol,
                tol_feas=attempt_tol,
            )
        except Exception:
            continue
        if problem.status == "optimal":
            return "CLARABEL"
    if problem.value is not None and problem.status == "optimal_inaccurate":
        return "CLARABEL"
    problem.solve(solver=cp.SCS, eps=max(tol, 1e-7), max_iters=50_000)
    return "SCS"


def fj_dense(g: ChordGraph, k: int, tol: float = 1e-8, form: str = "primal") -> SdpSolution:
    """Frieze-Jerrum bound for g by solving the full-size program.

    form="primal": max ((k-1)/(2k)) tr(L X) over X PSD, unit diagonal,
    X >= -J/(k-1) entrywise.  form="dual": the equivalent minimization in
    (w, S), whose feasible points certify upper bounds on the relaxation
    (use this side for `certify_bound`).  Solving both forms brackets the
    value; the backend does not expose its own gap, so `solver_gap` stays
    None and certification carries the error control.
    """
    p = g.num_vertices
    if p > _DENSE_GUARD:
        raise InputError(f"{p} vertices exceeds dense-solve guard {_DENSE_GUARD}")
    sol = fj_dense_laplacian(laplacian(g).astype(float), k, tol, form)
    sol.n = g.n
    return sol


def fj_dense_laplacian(lap: np.ndarray, k: int, tol: float = 1e-8, form: str = "primal") -> SdpSolution:
    """Dense relaxation for an arbitrary graph given by its Laplacian."""
    if k < 2:
        raise InputError(f"relaxation needs k >= 2, got {k}")
    p = lap.shape[0]
    coeff = (k - 1) / (2 * k)
    lb = -1.0 / (k - 1)
    if form == "primal":
        x = cp.Variable((p, p), symmetric=True)
        cons = [x >> 0, cp.diag(x) == 1, x >= lb]
        prob = cp.Problem(cp.Maximize(coeff * cp.trace(lap @ x)), cons)
        solver = _solve_with_fallback(prob, tol)
        xv = np.asarray(x.value)
        xv = (xv + xv.T) / 2
        eig_min = float(np.linalg.eigvalsh(xv).min())
        diag_err = float(np.abs(np.diag(xv) - 1).max())
        entry_err = float(max(0.0, (lb - xv).max()))
        return SdpSolution(
            status="optimal" if prob.status == "optimal" else "feasible-suboptimal",
            objective_value=float(prob.value),
            primal_residual=max(0.0, -eig_min) + diag_err,
            dual_residual=entry_err,
            min_eigenvalue_slack=eig_min,
            method="dense-primal",
            n=0,
            k=k,
            x_blocks=[xv],
            solver_name=solver,
        )
    if form != "dual":
        raise InputError(f"unknown form {form!r}")
    w = cp.Variable(p)
    s = cp.Variable((p, p), symmetric=True)
    m_expr = cp.diag(w) - coeff * lap - s
    prob = cp.Problem(
        cp.Minimize(cp.sum(w) + cp.sum(s) / (k - 1)),
        [m_expr >> 0, s >= 0],
    )
    solver = _solve_with_fallback(prob, tol)
    wv = np.asarray(w.value).ravel()
    sv = np.asarray(s.value)
    sv = (sv + sv.T) / 2
    m_num = np.diag(wv) - coeff * lap - sv
    eig_min = float(np.linalg.eigvalsh(m_num).min())
    s_min = float(sv.min())
    return SdpSolution(
        status="optimal" if prob.status == "optimal" else "feasible-suboptimal",
        objective_value=float(prob.value),
        primal_residual=max(0.0, -eig_min),
        dual_residual=max(0.0, -s_min),
        min_eigenvalue_slack=eig_min,
        method="dense-dual",
        n=0,
        k=k,
        y=wv,
        x_blocks=[sv],
        solver_name=solver,
    )


def _orbit_valencies(n: int) -> np.ndarray:
    d = n // 2
    return np.array([i * (i - 1) + 2 * (i - 1) * (d - i) for i in range(2, d + 1)], dtype=float)


def _adjacency_block_eigenvalues(n: int, m: int) -> np.ndarray:
    """Matrix of m-th DFT eigenvalues of the adjacency circulant blocks."""
    d = n // 2
    size = d - 1
    cosines = np.cos(2 * np.pi * m * np.arange(n) / n)
    lam = np.zeros((size, size))
    for i in range(2, d + 1):
        for j in range(i, d + 1):
            row = np.array(block_first_row(i, j, n).first_row, dtype=float)
            v = float(row @ cosines)
            lam[i - 2, j - 2] = v
            lam[j - 2, i - 2] = v
    return lam


def assemble_reduced(n: int, k: int) -> SdpProblem:
    """Symmetry-reduced Frieze-Jerrum program for odd n.

    Variables: y in R^(d-1) (one per orbit) and d+1 nonnegative symmetric
    blocks X^(0..d) holding the first-row entries of the projected slack
    matrix.  Constraint m (0 <= m <= d):

        Diag(y - ((k-1)/(2k)) val) + ((k-1)/(2k)) lam^(m)
            - [X^(0) + 2 sum_t X^(t) cos(2 pi m t / n)]  >=  0  (PSD),

    with lam^(m) the adjacency-block DFT eigenvalues.  The objective is
    n * sum(y) + (n/(k-1)) * <J, X^(0) + 2 sum_t X^(t)>, i.e. the exact
    image of the all-ones inner product of the slack matrix.
    """
    if n % 2 == 0:
        raise InputError(f"symmetry reduction requires odd n, got {n}")
    if n < 7:
        raise InputError(f"need n >= 7, got {n}")
    if k < 2:
        raise InputError(f"relaxation needs k >= 2, got {k}")
    d = n // 2
    size = d - 1
    coeff = (k - 1) / (2 * k)
    val = _orbit_valencies(n)
    ones = np.ones((size, size))
    basis = [np.zeros((size, size)) for _ in range(size)]
    for i in range(size):
        basis[i][i, i] = 1.0

    blocks = []
    for m in range(d + 1):
        lam = _adjacency_block_eigenvalues(n, m)
        const = coeff * lam - coeff * np.diag(val)
        coeffs = [
            -1.0 if t == 0 else -2.0 * math.cos(2 * math.pi * m * t / n)
            for t in range(d + 1)
        ]
        blocks.append(
            LmiBlock(dim=size, const=const, free_coeff=basis, nonneg_coeff=coeffs)
        )

    obj_nonneg = [
        (n / (k - 1)) * (ones if t == 0 else 2.0 * ones) for t in range(d + 1)
    ]
    return SdpProblem(
        num_free=size,
        nonneg_dims=[size] * (d + 1),
        objective_free=np.full(size, float(n)),
        objective_nonneg=obj_nonneg,
        psd_blocks=blocks,
        meta={"n": n, "k": k, "kind": "reduced"},
    )


def solve_conic(p: SdpProblem, tol: float = 1e-8) -> SdpSolution:
    """Solve the block program with a conic interior-point backend.

    Residuals are recomputed from the returned point; downstream bounds
    must go through `certify_bound`, which restores exact feasibility.
    """
    y = cp.Variable(p.num_free) if p.num_free else None
    xs = [cp.Variable((m, m), symmetric=True) for m in p.nonneg_dims]
    cons = [x >= 0 for x in xs]
    for blk in p.psd_blocks:
        expr = cp.Constant(blk.const)
        if y is not None:
            flat = np.stack([c.ravel() for c in blk.free_coeff], axis=1)
            expr = expr + cp.reshape(cp.Constant(flat) @ y, (blk.dim, blk.dim), order="C")
        for c, x in zip(blk.nonneg_coeff, xs):
            if c != 0.0:
                expr = expr + c * x
        cons.append(expr >> 0)
    objective = p.constant
    if y is not None:
        objective = objective + p.objective_free @ y
    for w, x in zip(p.objective_nonneg, xs):
        objective = objective + cp.sum(cp.multiply(w, x))
    prob = cp.Problem(cp.Minimize(objective), cons)
    solver = _solve_with_fallback(prob, tol)
    if prob.value is None or prob.status in ("infeasible", "unbounded"):
        return SdpSolution(
            status="failed",
            objective_value=float("nan"),
            primal_residual=float("inf"),
            dual_residual=float("inf"),
            min_eigenvalue_slack=float("-inf"),
            method="reduced",
            solver_name=solver,
        )
    yv = np.asarray(y.value).ravel() if y is not None else np.zeros(0)
    xvs = []
    for x in xs:
        v = np.asarray(x.value)
        xvs.append((v + v.T) / 2)
    min_eig = float("inf")
    for blk in p.psd_blocks:
        m_num = blk.const.copy()
        for i in range(p.num_free):
            m_num = m_num + yv[i] * blk.free_coeff[i]
        for c, xv in zip(blk.nonneg_coeff, xvs):
            if c != 0.0:
                m_num = m_num + c * xv
        min_eig = min(min_eig, float(np.linalg.eigvalsh(m_num).min()))
    x_min = min((float(v.min()) for v in xvs), default=0.0)
    return SdpSolution(
        status="optimal" if prob.status == "optimal" else "feasible-suboptimal",
        objective_value=float(prob.value),
        primal_residual=max(0.0, -min_eig),
        dual_residual=max(0.0, -x_min),
        min_eigenvalue_slack=min_eig,
        method=p.meta.get("kind", "generic"),
        n=p.meta.get("n", 0),
        k=p.meta.get("k", 0),
        y=yv,
        x_blocks=xvs,
        solver_name=solver,
    )


def fj_reduced(n: int, k: int, tol: float = 1e-8) -> SdpSolution:
    """Assemble and solve the symmetry-reduced program for odd n."""
    sol = solve_conic(assemble_reduced(n, k), tol)
    sol.method = "reduced"
    return sol


def _certify_reduced(n: int, k: int, sol: SdpSolution) -> CertifiedBound:
    d = n // 2
    xs = [np.maximum(x, 0.0) for x in sol.x_blocks]
    y = sol.y.astype(float).copy()
    coeff = (k - 1) / (2 * k)
    val = _orbit_valencies(n)
    worst = 0.0
    scale = 1.0
    for m in range(d + 1):
        lam = _adjacency_block_eigenvalues(n, m)
        mu = xs[0] + sum(
            2.0 * math.cos(2 * math.pi * m * t / n) * xs[t] for t in range(1, d + 1)
        )
        m_num = np.diag(y - coeff * val) + coeff * lam - mu
        worst = max(worst, -float(np.linalg.eigvalsh(m_num).min()))
        scale = max(scale, float(np.abs(m_num).max()))
    # pad for eigensolver and accumulation error before inflating y
    margin = max(0.0, worst) + 1e-9 * scale
    y += margin
    ones = np.ones_like(xs[0])
    obj = n * float(y.sum()) + (n / (k - 1)) * float(
        (ones * xs[0]).sum() + 2.0 * sum((ones * xs[t]).sum() for t in range(1, d + 1))
    )
    value = obj * (1 + 1e-12) + 1e-9
    c4 = comb(n, 4)
    nu_lower = max(0, math.ceil(Fraction(c4) - Fraction(value)))
    return CertifiedBound(
        n=n, k=k, fj_value=value, nu_lower=nu_lower,
        certificate_feasibility_margin=margin, method="reduced",
    )


def _certify_dense(n: int, k: int, sol: SdpSolution, g: ChordGraph) -> CertifiedBound:
    coeff = (k - 1) / (2 * k)
    lap = laplacian(g).astype(float)
    s = np.maximum(sol.x_blocks[0], 0.0)
    w = sol.y.astype(float).copy()
    m_num = np.diag(w) - coeff * lap - s
    worst = max(0.0, -float(np.linalg.eigvalsh(m_num).min()))
    margin = worst + 1e-9 * max(1.0, float(np.abs(m_num).max()))
    w += margin
    obj = float(w.sum()) + float(s.sum()) / (k - 1)
    value = obj * (1 + 1e-12) + 1e-9
    c4 = comb(n, 4)
    nu_lower = max(0, math.ceil(Fraction(c4) - Fraction(value)))
    return CertifiedBound(
        n=n, k=k, fj_value=value, nu_lower=nu_lower,
        certificate_feasibility_margin=margin, method="dense",
    )


def certify_bound(n: int, k: int, sol: SdpSolution, g: ChordGraph | None = None) -> CertifiedBound:
    """Repair a minimization-side solution into a rigorous bound.

    Nonnegative blocks are clipped to zero, the constraint matrices are
    rebuilt from the clipped point, and the diagonal variables are
    inflated by the worst PSD violation (plus a small error pad).  The
    repaired objective upper-bounds the relaxation value, so
    C(n,4) - value lower-bounds the crossing number.
    """
    if not sol.ok or sol.y is None or sol.x_blocks is None:
        raise InputError("cannot certify: solver did not return a usable point")
    if sol.method == "reduced":
        return _certify_reduced(n, k, sol)
    if sol.method == "dense-dual":
        if g is None:
            from .chordgraph import build_chord_graph

            g = build_chord_graph(n)
        return _certify_dense(n, k, sol, g)
    raise InputError(
        f"certification needs a minimization-side solution, got {sol.method!r}"
    )


def lift_bound(m: int, ratio, n: int):
    """Lift a lower-bound ratio at K_m to n > m: nu_k(K_n) >= ratio * C(n,4)."""
    if not n > m >= 4:
        raise InputError(f"need n > m >= 4, got n={n}, m={m}")
    return ratio * comb(n, 4)


def alpha_upper_bound(n: int, k: int, fj_value: float) -> float:
    """Rounding-guarantee upper bound C(n,4) - alpha_k * fj_value, 3 <= k <= 10."""
    if k not in ALPHA_GUARANTEE:
        raise InputError(f"no approximation guarantee tabulated for k={k}")
    return comb(n, 4) - ALPHA_GUARANTEE[k] * fj_value


def limit_table(
    k_range: Iterable[int],
    m: int,
    ratio_at_m: Callable[[int], float | None] | dict | None = None,
) -> list[dict]:
    """Rows (k, prior lower, improved lower at m, construction-limit upper, quotient).

    `ratio_at_m` supplies the certified ratio for each k (callable or dict);
    missing values leave a flagged gap.
    """
    if m % 2 == 0:
        raise InputError(f"reduced solves need odd m, got {m}")
    rows = []
    for k in k_range:
        upper = float(dds_limit_ratio(k))
        prior = float(prior_lower_ratio(k)) if k >= 3 else None
        improved = None
        if ratio_at_m is not None:
            improved = ratio_at_m.get(k) if isinstance(ratio_at_m, dict) else ratio_at_m(k)
        rows.append(
            {
                "k": k,
                "prior_lower": prior,
                "improved_lower": improved,
                "upper": upper,
                "quotient": (improved / upper) if improved is not None else None,
                "m": m,
                "gap": improved is None,
            }
        )
    return rows


def load_bound_cache(path: str) -> dict[tuple[int, int], dict]:
    """Read the JSONL bound cache; later lines win only if not weaker."""
    cache: dict[tuple[int, int], dict] = {}
    if not os.path.exists(path):
        return cache
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            key = (rec["n"], rec["k"])
            if key not in cache or not _weaker(rec, cache[key]):
                cache[key] = rec
    return cache


def _weaker(new: dict, old: dict) -> bool:
    if new["nu_lower"] != old["nu_lower"]:
        return new["nu_lower"] < old["nu_lower"]
    return new["fj"] > old["fj"]


def update_bound_cache(path: str, bound: CertifiedBound, solver_tol: float | None = None) -> bool:
    """Append the bound unless the cache already holds a stronger one.

    Returns True if the record was written.
    """
    cache = load_bound_cache(path)
    rec = bound.to_json_dict(solver_tol)
    rec["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    key = (bound.n, bound.k)
    if key in cache and _weaker(rec, cache[key]):
        return False
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "a") as fh:
        fh.write(json.dumps(rec) + "\n")
    return True

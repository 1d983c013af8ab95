"""Most probable bin occupations by constrained entropy maximization.

For bins of ``k_i`` states at energy ``eps_i`` the Stirling form of
``log I - alpha N - beta E`` is stationary at

    nu_i = k_i / (exp(alpha + beta eps_i) + 1)    (fermions)
    nu_i = k_i / (exp(alpha + beta eps_i) - 1)    (bosons)

and :func:`solve` finds the multipliers that meet the particle-number (and,
when no ``beta`` is given, energy) constraints.

Boson objective: the count ``(k+nu-1)! / ((k-1)! nu!)`` is Stirling-expanded
with ``k - 1`` replaced by ``k``, the same slack taken in the fermion case::

    F = (k+nu)(log(k+nu) - 1) - k(log k - 1) - nu(log nu - 1) - alpha nu - beta eps nu

so ``dF/dnu = log((k+nu)/nu) - alpha - beta eps``, which vanishes at the
Bose-Einstein occupation above.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, Infeasible, NoConvergence, PoleError

FERMION = "fermion"
BOSON = "boson"

TOL = 1e-8
ABS_FLOOR = 1e-12
MAX_ITER = 200
STIRLING_MIN = 10


class StirlingWarning(UserWarning):
    """Stirling's approximation evaluated at small occupation numbers."""


@dataclass(frozen=True)
class Level:
    k: int
    energy: float


@dataclass(frozen=True)
class MaxEntProblem:
    """Bins ``(k_i, eps_i)``, a particle target ``N`` and either ``beta`` or ``E``."""

    levels: tuple[Level, ...]
    statistics: str
    N: float
    beta: float | None = None
    E: float | None = None

    def __post_init__(self):
        levels = tuple(lv if isinstance(lv, Level) else Level(*lv) for lv in self.levels)
        object.__setattr__(self, "levels", levels)
        if self.statistics not in (FERMION, BOSON):
            raise ValueError(f"statistics must be {FERMION!r} or {BOSON!r}")
        if not levels:
            raise ValueError("at least one level is required")
        for i, lv in enumerate(levels):
            if int(lv.k) != lv.k or lv.k < 1:
                raise ValueError(f"level {i}: state count must be a positive integer")
            if not math.isfinite(lv.energy):
                raise ValueError(f"level {i}: energy must be finite")
            if i and lv.energy < levels[i - 1].energy:
                raise ValueError("level energies must be non-decreasing")
        if not (math.isfinite(self.N) and self.N > 0):
            raise ValueError("particle target N must be positive")
        if (self.beta is None) == (self.E is None):
            raise ValueError("give exactly one of beta or E")
        for name in ("beta", "E"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise ValueError(f"{name} must be finite")

    @property
    def k(self) -> np.ndarray:
        return np.array([lv.k for lv in self.levels], dtype=float)

    @property
    def eps(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels], dtype=float)

    @property
    def fermionic(self) -> bool:
        return self.statistics == FERMION


@dataclass(frozen=True)
class MaxEntSolution:
    alpha: float
    beta: float
    nu: tuple[float, ...]
    residuals: tuple[float, float]
    iterations: int
    converged: bool
    method: str
    problem: MaxEntProblem = field(repr=False)

    @property
    def fill(self) -> tuple[float, ...]:
        """Average occupation per state of each bin, ``nu_i / k_i``."""
        return tuple(n / lv.k for n, lv in zip(self.nu, self.problem.levels))

    def as_dict(self) -> dict:
        p = self.problem
        return {
            "statistics": p.statistics,
            "alpha": self.alpha,
            "beta": self.beta,
            "N_target": p.N,
            "E_target": p.E,
            "bins": [
                {"k": lv.k, "energy": lv.energy, "nu": n, "fill": f}
                for lv, n, f in zip(p.levels, self.nu, self.fill)
            ],
            "residuals": {"N": self.residuals[0], "E": self.residuals[1]},
            "diagnostics": {"iterations": self.iterations, "converged": self.converged,
                            "method": self.method},
        }


def fd_occupation(alpha, beta, eps):
    """Fermi-Dirac occupation ``1 / (exp(alpha + beta eps) + 1)``, in (0, 1)."""
    x = np.asarray(alpha + beta * np.asarray(eps, dtype=float), dtype=float)
    # exp(-|x|) never overflows
    e = np.exp(-np.abs(x))
    out = np.where(x >= 0, e / (1.0 + e), 1.0 / (1.0 + e))
    return out if out.ndim else float(out)


def be_occupation(alpha, beta, eps):
    """Bose-Einstein occupation ``1 / (exp(alpha + beta eps) - 1)``.

    Raises
    ------
    PoleError
        If ``alpha + beta eps <= 0`` anywhere (condensation regime).
    """
    x = np.asarray(alpha + beta * np.asarray(eps, dtype=float), dtype=float)
    if np.any(x <= 0):
        bad = int(np.argmax(x <= 0)) if x.ndim else None
        raise PoleError(f"alpha + beta*eps = {float(np.min(x)):.6g} <= 0: Bose-Einstein pole",
                        bad)
    out = 1.0 / np.expm1(x)
    return out if out.ndim else float(out)


def _check_interior(nu: np.ndarray, problem: MaxEntProblem):
    k = problem.k
    if nu.shape != k.shape:
        raise ValueError(f"expected {k.size} occupations, got {nu.size}")
    if np.any(nu <= 0) or (problem.fermionic and np.any(nu >= k)):
        bounds = "0 < nu < k" if problem.fermionic else "nu > 0"
        raise DomainError(f"occupations must satisfy {bounds}")


def _xlogx_minus(x):
    return x * (np.log(x) - 1.0)


def objective_F(nu: Sequence[float], problem: MaxEntProblem, alpha: float, beta: float) -> float:
    """Stirling form of ``log I - alpha N - beta E`` at bin occupations ``nu``.

    Warns with :class:`StirlingWarning` when some ``nu_i < 10``.
    """
    nu = np.asarray(nu, dtype=float)
    _check_interior(nu, problem)
    if np.any(nu < STIRLING_MIN):
        warnings.warn("Stirling's approximation is poor for occupations below 10",
                      StirlingWarning, stacklevel=2)
    k, eps = problem.k, problem.eps
    if problem.fermionic:
        log_i = _xlogx_minus(k) - _xlogx_minus(k - nu) - _xlogx_minus(nu)
    else:
        log_i = _xlogx_minus(k + nu) - _xlogx_minus(k) - _xlogx_minus(nu)
    return float(np.sum(log_i - alpha * nu - beta * eps * nu))


def stationarity_residual(nu: Sequence[float], problem: MaxEntProblem,
                          alpha: float, beta: float) -> np.ndarray:
    """Per-bin ``dF/dnu_i``; zero exactly at the distribution occupations."""
    nu = np.asarray(nu, dtype=float)
    _check_interior(nu, problem)
    k, eps = problem.k, problem.eps
    ratio = (k - nu) / nu if problem.fermionic else (k + nu) / nu
    return np.log(ratio) - (alpha + beta * eps)


def occupation_function(statistics: str):
    return fd_occupation if statistics == FERMION else be_occupation


def bin_occupations(problem: MaxEntProblem, alpha: float, beta: float) -> np.ndarray:
    """``nu_i = k_i f(alpha + beta eps_i)`` for every bin."""
    return problem.k * occupation_function(problem.statistics)(alpha, beta, problem.eps)


# --- solver -----------------------------------------------------------------


class _Merged:
    """Bins of equal energy merged into one; the arithmetic of the solve."""

    def __init__(self, problem: MaxEntProblem):
        ks: list[float] = []
        es: list[float] = []
        for lv in problem.levels:
            if es and es[-1] == lv.energy:
                ks[-1] += lv.k
            else:
                ks.append(float(lv.k))
                es.append(lv.energy)
        self.k = np.array(ks)
        self.eps = np.array(es)
        self.fermionic = problem.fermionic
        # first original bin index of each merged level, for error messages
        self.origin = []
        prev = None
        for i, lv in enumerate(problem.levels):
            if lv.energy != prev:
                self.origin.append(i)
                prev = lv.energy

    def f_and_slope(self, alpha: float, beta: float):
        """Per-state occupation and its derivative with respect to x."""
        x = alpha + beta * self.eps
        if self.fermionic:
            f = fd_occupation(alpha, beta, self.eps)
            return f, -f * (1.0 - f)
        if np.any(x <= 0):
            i = int(np.argmin(x))
            raise PoleError(f"bin {self.origin[i]} reaches the Bose-Einstein pole", self.origin[i])
        f = 1.0 / np.expm1(x)
        return f, -f * (1.0 + f)

    def totals(self, alpha: float, beta: float):
        f, _ = self.f_and_slope(alpha, beta)
        nu = self.k * f
        return float(nu.sum()), float(nu @ self.eps)

    def pole_alpha(self, beta: float) -> tuple[float, int]:
        """Bosons only: smallest admissible alpha (exclusive) and the bin that sets it."""
        x = -beta * self.eps
        i = int(np.argmax(x))
        return float(x[i]), self.origin[i]


def _rel(value: float, target: float) -> float:
    return abs(value - target) / max(abs(target), 1.0)


def _alpha_for(m: _Merged, beta: float, n_target: float, max_iter: int) -> tuple[float, int]:
    """Solve ``N(alpha) = n_target`` at fixed beta; N is strictly decreasing in alpha.

    Safeguarded Newton inside an expanding bracket.
    """
    def g(a):
        f, slope = m.f_and_slope(a, beta)
        return float(m.k @ f) - n_target, float(m.k @ slope)

    if m.fermionic:
        centre = -beta * float(np.mean(m.eps))
        lo, hi = centre - 1.0, centre + 1.0
        step = 1.0
        while g(lo)[0] < 0:
            step *= 2
            lo -= step
            if step > 1e300:
                raise Infeasible("particle target cannot be reached")
        step = 1.0
        while g(hi)[0] > 0:
            step *= 2
            hi += step
            if step > 1e300:
                raise Infeasible("particle target cannot be reached")
    else:
        pole, where = m.pole_alpha(beta)
        delta = ABS_FLOOR * max(1.0, abs(pole))
        lo = pole + delta
        if g(lo)[0] < 0:
            raise PoleError(
                f"N = {n_target:g} needs bin {where} closer to the Bose-Einstein pole "
                "than double precision resolves (condensation regime)", where)
        step = 1.0
        hi = pole + step
        while g(hi)[0] > 0:
            step *= 2
            hi = pole + step

    a = 0.5 * (lo + hi)
    for it in range(1, max_iter + 1):
        val, slope = g(a)
        if val == 0:
            return a, it
        if val > 0:
            lo = a
        else:
            hi = a
        step_ok = slope < 0
        if step_ok:
            nxt = a - val / slope
            step_ok = lo < nxt < hi
        if not step_ok:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - a) <= 1e-15 * max(1.0, abs(a)) or not lo < hi:
            return nxt, it
        a = nxt
    return a, max_iter


def _newton_2d(m: _Merged, problem: MaxEntProblem, alpha: float, beta: float, max_iter: int):
    """Damped Newton on the scaled (N, E) residual. Returns (alpha, beta, iterations, ok)."""
    n_t, e_t = problem.N, problem.E
    e_scale = max(abs(e_t), 1.0)

    def resid(a, b):
        n, e = m.totals(a, b)
        return np.array([(n - n_t) / n_t, (e - e_t) / e_scale])

    try:
        r = resid(alpha, beta)
    except PoleError:
        return alpha, beta, 0, False
    for it in range(1, max_iter + 1):
        if np.max(np.abs(r)) <= 1e-15:
            return alpha, beta, it, True
        f, slope = m.f_and_slope(alpha, beta)
        w = m.k * slope
        jac = np.array([
            [w.sum() / n_t, (w @ m.eps) / n_t],
            [(w @ m.eps) / e_scale, (w @ m.eps**2) / e_scale],
        ])
        try:
            step = -np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            return alpha, beta, it, False
        if not np.all(np.isfinite(step)):
            return alpha, beta, it, False
        lam = 1.0
        norm = np.linalg.norm(r)
        for _ in range(60):
            a_new, b_new = alpha + lam * step[0], beta + lam * step[1]
            try:
                r_new = resid(a_new, b_new)
            except PoleError:
                lam *= 0.5
                continue
            if np.all(np.isfinite(r_new)) and np.linalg.norm(r_new) < (1 - 1e-4 * lam) * norm:
                break
            lam *= 0.5
        else:
            # no further decrease: either converged to rounding level or stuck
            return alpha, beta, it, np.max(np.abs(r)) <= ABS_FLOOR
        small = abs(lam * step[0]) <= 1e-15 * max(1.0, abs(alpha)) and \
            abs(lam * step[1]) <= 1e-15 * max(1.0, abs(beta))
        alpha, beta, r = a_new, b_new, r_new
        if small:
            return alpha, beta, it, True
    return alpha, beta, max_iter, False


def _nested_bisection(m: _Merged, problem: MaxEntProblem, max_iter: int):
    """Outer bisection on beta (E strictly decreasing at fixed N), inner solve for alpha."""
    n_t, e_t = problem.N, problem.E
    count = 0

    def energy_gap(b):
        nonlocal count
        a, it = _alpha_for(m, b, n_t, max_iter)
        count += it
        return m.totals(a, b)[1] - e_t, a

    g0, _ = energy_gap(0.0)
    if g0 == 0:
        lo = hi = 0.0
    else:
        direction = 1.0 if g0 > 0 else -1.0
        near, far = 0.0, direction
        while (energy_gap(far)[0] > 0) == (g0 > 0):
            near, far = far, far * 2
            if abs(far) > 1e300:
                raise Infeasible("energy target cannot be bracketed")
        lo, hi = sorted((near, far))
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        gm, _ = energy_gap(mid)
        if gm == 0:
            lo = hi = mid
            break
        if gm > 0:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    alpha, it = _alpha_for(m, beta, n_t, max_iter)
    return alpha, beta, count + it


def _check_feasible(m: _Merged, problem: MaxEntProblem):
    n_t = problem.N
    if m.fermionic and not n_t < m.k.sum():
        raise Infeasible(f"N = {n_t:g} fermions need more than the {m.k.sum():g} available states")
    if problem.E is None:
        return
    e_t = problem.E
    if len(m.k) == 1:
        if _rel(n_t * m.eps[0], e_t) > TOL:
            raise Infeasible("a single energy level fixes E = N * eps")
        return
    if m.fermionic:
        # energy range spanned by filling the lowest / highest states first
        def packed(order):
            left, total = n_t, 0.0
            for i in order:
                take = min(left, m.k[i])
                total += take * m.eps[i]
                left -= take
            return total
        e_min, e_max = packed(range(len(m.k))), packed(reversed(range(len(m.k))))
    else:
        e_min, e_max = n_t * m.eps[0], n_t * m.eps[-1]
    if not e_min < e_t < e_max:
        raise Infeasible(f"E = {e_t:g} outside the attainable open range ({e_min:g}, {e_max:g})")


def solve(problem: MaxEntProblem, tol: float = TOL, max_iter: int = MAX_ITER) -> MaxEntSolution:
    """Find alpha (and beta, when E is the constraint) for the most probable occupations.

    Raises
    ------
    Infeasible
        Targets outside the attainable range.
    PoleError
        Bosons whose target requires the lowest level at or past the pole.
    NoConvergence
        Constraint residuals above ``tol`` after ``max_iter`` iterations;
        the best iterate is attached as ``best``.
    """
    m = _Merged(problem)
    _check_feasible(m, problem)

    if problem.beta is not None:
        beta = float(problem.beta)
        alpha, iters = _alpha_for(m, beta, problem.N, max_iter)
        method = "newton-bisection"
    elif len(m.k) == 1:
        beta = 0.0
        alpha, iters = _alpha_for(m, beta, problem.N, max_iter)
        method = "newton-bisection"
    else:
        a0, it0 = _alpha_for(m, 0.0, problem.N, max_iter)
        alpha, beta, iters, ok = _newton_2d(m, problem, a0, 0.0, max_iter)
        iters += it0
        method = "newton"
        if not ok:
            alpha, beta, it1 = _nested_bisection(m, problem, max_iter)
            iters += it1
            alpha, beta, it2, _ = _newton_2d(m, problem, alpha, beta, 5)
            iters += it2
            method = "bisection"

    nu = bin_occupations(problem, alpha, beta)
    n_got = float(nu.sum())
    e_got = float(nu @ problem.eps)
    d_n = n_got - problem.N
    d_e = 0.0 if problem.E is None else e_got - problem.E
    ok_n = abs(d_n) <= max(tol * problem.N, ABS_FLOOR)
    ok_e = problem.E is None or abs(d_e) <= max(tol * max(abs(problem.E), 1.0), ABS_FLOOR)
    sol = MaxEntSolution(float(alpha), float(beta), tuple(float(v) for v in nu),
                         (d_n, d_e), iters, bool(ok_n and ok_e), method, problem)
    if not sol.converged:
        raise NoConvergence(f"constraints not met after {iters} iterations "
                            f"(dN = {d_n:.3g}, dE = {d_e:.3g})", best=sol)
    return sol

"""Volume entropy: free-group closed form, sandwich bounds and minimization.

For the free group on m generators with symmetric weights the entropy h
is the unique positive root of ``sum_i 1/(1 + exp(w_i h)) = 1/2``.
For a lambda-translation-apparent presentation of G the entropy lies in
``[N' ln z*, h(F_m, w)]`` where z* is the largest real root of p for the
integer weights ``N' w``; we carry the root in the log variable so the
lower end is read off directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np

from .avoidance import p_polynomial, p_root_log, prefix_groups
from .errors import NonConvergence, NotTranslationApparent
from .presentations import check_translation_apparent
from .words import Presentation, WeightVector, as_fraction, lcm_of_denominators

__all__ = [
    "EntropyEstimate",
    "MinimizeResult",
    "free_entropy",
    "entropy_gradient",
    "rationalize_weights",
    "entropy_bounds",
    "minimize_entropy",
    "lower_bound_oracle",
    "project_to_simplex",
]


def _weights_array(w) -> np.ndarray:
    if isinstance(w, WeightVector):
        return w.as_array()
    arr = np.asarray([float(v) for v in w], dtype=float)
    if arr.ndim != 1 or len(arr) == 0 or np.any(arr <= 0):
        raise ValueError(f"weights must be a nonempty positive vector, got {w}")
    return arr


def _sigmoid_neg(x: np.ndarray) -> np.ndarray:
    # 1/(1+e^x) without overflow
    return 0.5 * (1.0 - np.tanh(0.5 * x))


def free_entropy(w, m: Optional[int] = None, tol: float = 0.0) -> float:
    """Entropy of F_m for per-generator weights w, by bisection."""
    ws = _weights_array(w)
    if m is not None and m != len(ws):
        raise ValueError(f"expected {m} weights, got {len(ws)}")
    m = len(ws)
    if m == 1:
        raise ValueError("the free group of rank 1 has zero entropy")
    lo = 1e-9
    hi = 2 * m * math.log(2 * m - 1) / float(ws.min()) + 1
    wl = ws.tolist()
    # the relative term stops the loop at double resolution for huge h
    while hi - lo > tol + 4e-16 * hi:
        mid = 0.5 * (lo + hi)
        s = sum(0.5 * (1.0 - math.tanh(0.5 * a * mid)) for a in wl)
        if s > 0.5:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def entropy_gradient(w, m: Optional[int] = None, h: Optional[float] = None) -> np.ndarray:
    """dh/dw_i by implicit differentiation of the defining equation."""
    ws = _weights_array(w)
    if h is None:
        h = free_entropy(ws, m)
    s = _sigmoid_neg(ws * h)
    ds = -s * (1 - s)  # derivative of 1/(1+e^x)
    return -h * ds / np.dot(ws, ds)


# ----------------------------------------------------------------- bounds


@dataclass
class EntropyEstimate:
    h_lo: float
    h_hi: float
    methods: dict[str, str]
    hypotheses: dict = field(default_factory=dict)
    rationalization: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.h_hi - self.h_lo


def rationalize_weights(w: WeightVector, max_denominator: int = 10**6) -> dict:
    """Round each weight to a nearby rational, renormalize exactly, scale to integers."""
    approx = [Fraction(v).limit_denominator(max_denominator) for v in w.per_generator]
    total = 2 * sum(approx)
    w1 = WeightVector(tuple(v / total for v in approx))
    N = lcm_of_denominators(w1.per_generator)
    w2 = w1.scaled(N)
    rel = max(abs(a - b) / b for a, b in zip(w1.per_generator, w.per_generator))
    return {"w_rational": w1, "scale": N, "w_integral": w2, "max_relative_change": float(rel)}


def _prop_hypotheses(m: int, l: int, j: int, N: int) -> dict:
    """l > 32m and 8mjl < (2m-1)^(l/(16m) - 2), compared in exact integers."""
    e = Fraction(l, 16 * m) - 2
    lhs = 8 * m * j * l
    if e < 0:
        second = False
    else:
        second = lhs ** e.denominator < (2 * m - 1) ** e.numerator
    return {
        "m": m, "l": l, "j": j, "N": N,
        "l_gt_32m": l > 32 * m,
        "count_condition": second,
        "8mjl": lhs,
        "exponent": str(e),
        "gap_bound": 2 / l if l else math.inf,
    }


def entropy_bounds(p: Presentation, lam, w: WeightVector, *, require: bool = True,
                   max_denominator: int = 10**6) -> EntropyEstimate:
    """Sandwich ``h(F_m, w) - 2/l <= h(G, w) <= h(F_m, w)`` made numeric.

    Raises NotTranslationApparent unless p is lambda-translation-apparent
    (pass ``require=False`` to compute the numbers anyway).
    """
    lam = as_fraction(lam)
    if not isinstance(w, WeightVector):
        w = WeightVector(tuple(w))
    report = check_translation_apparent(p, lam)
    if require and not report:
        raise NotTranslationApparent("; ".join(report.causes), report)
    if not w.normalized:
        w = w.normalize()
    rat = rationalize_weights(w, max_denominator)
    w1, Nscale = rat["w_rational"], rat["scale"]
    h_hi = free_entropy(w)

    P = p_polynomial(p, lam, w1)
    t_root, status = p_root_log(P)
    h_lo = float(t_root) if t_root is not None else 0.0

    hyp = {}
    if p.relators:
        _, info = prefix_groups(p, lam, w1)
        N = int(rat["w_integral"].total)
        hyp = _prop_hypotheses(p.m, info["l"], info["j"], N)
        hyp.update(_root_interval_check(P, Nscale, N, info["l"]))
    rat = {k: (str(v) if isinstance(v, WeightVector) else v) for k, v in rat.items()}
    rat["entropy_change"] = abs(free_entropy(w1) - h_hi)
    return EntropyEstimate(
        h_lo=min(h_lo, h_hi),
        h_hi=h_hi,
        methods={"h_lo": "p_root" if t_root is not None else "none", "h_hi": "free_closed_form",
                 "root_status": status},
        hypotheses=hyp,
        rationalization=rat,
    )


def _root_interval_check(P, scale: int, N: int, l: int) -> dict:
    """Signs of p at M0 - 1/(N l) and at M0, for the integer weights scale*w."""
    with mpmath.workdps(P.dps):
        t0 = P.free_root
        M0 = mpmath.exp(t0 / scale)
        left = M0 - mpmath.mpf(1) / (N * l)
        v_left = P(scale * mpmath.log(left))
        v_right = P(t0)
        return {
            "M0": float(M0),
            "p_at_left": mpmath.nstr(v_left, 8),
            "p_at_M0": mpmath.nstr(v_right, 8),
            "root_in_interval": bool(v_left < 0 < v_right),
        }


def lower_bound_oracle(p: Presentation, lam, max_denominator: int = 10**12) -> Callable:
    """``x -> h_lo`` on float weights, for use as a heuristic minimize_entropy objective.

    The fine rational grid keeps the objective smooth at finite-difference scale.
    """
    lam = as_fraction(lam)
    if not check_translation_apparent(p, lam):
        raise NotTranslationApparent("lower bound oracle needs a translation-apparent presentation",
                                     check_translation_apparent(p, lam))

    def oracle(x) -> float:
        w = WeightVector(tuple(Fraction(float(v)).limit_denominator(max_denominator) for v in x))
        return entropy_bounds(p, lam, w.normalize(), require=False,
                              max_denominator=max_denominator).h_lo

    return oracle


# ------------------------------------------------------------- minimizer


def project_to_simplex(x: np.ndarray, total: float, floor: float = 0.0) -> np.ndarray:
    """Euclidean projection onto {y : sum y = total, y >= floor}."""
    n = len(x)
    budget = total - n * floor
    if budget < 0:
        raise ValueError("floor too large for the simplex")
    v = x - floor
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - budget
    k = np.arange(1, n + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0) + floor


@dataclass
class MinimizeResult:
    w: np.ndarray
    value: float
    iterations: int
    converged: bool
    heuristic: bool = False
    grad_norm: float = math.nan

    def weight_vector(self, max_denominator: int = 10**6) -> WeightVector:
        """Rational approximation of the minimizer, renormalized exactly."""
        approx = WeightVector.from_floats(self.w, max_denominator)
        return approx.normalize()


def _central_gradient(f: Callable, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    g = np.empty_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (f(x + e) - f(x - e)) / (2 * step)
    return g


def minimize_entropy(oracle: Callable = free_entropy, m: int = 2, tol: float = 1e-8, *,
                     gradient: Optional[Callable] = None, start: Optional[Sequence[float]] = None,
                     floor: float = 1e-6, max_iter: int = 5000, heuristic: bool = False,
                     fd_step: float = 1e-6) -> MinimizeResult:
    """Projected gradient descent on {w : 2 sum w = 1, w >= floor} with Armijo steps.

    ``oracle`` maps a float array of per-generator weights to a value. The
    free entropy gets its analytic gradient; any other oracle uses central
    differences unless ``gradient`` is given. Raises NonConvergence (with
    the last iterate attached) when the iteration cap is hit.
    """
    if gradient is None:
        if oracle is free_entropy:
            gradient = entropy_gradient
        else:
            gradient = lambda x: _central_gradient(oracle, x, fd_step)
    total = 0.5
    if start is None:
        # a deliberately lopsided start so the test is not trivial
        x = np.linspace(1.0, 2.0, m)
        x = x / (2 * x.sum())
    else:
        x = np.asarray(start, dtype=float)
    x = project_to_simplex(x, total, floor)
    fx = oracle(x)
    g = gradient(x)
    step = 1.0
    pg_norm = math.inf
    for it in range(1, max_iter + 1):
        pg_norm = float(np.linalg.norm(x - project_to_simplex(x - g, total, floor)))
        if pg_norm < tol:
            return MinimizeResult(x, fx, it, True, heuristic, pg_norm)
        noise = 1e-14 * max(1.0, abs(fx))
        while True:
            y = project_to_simplex(x - step * g, total, floor)
            fy = oracle(y)
            if fy <= fx + 1e-4 * float(np.dot(g, y - x)) or step < 1e-16:
                gy = gradient(y)
                break
            if fy <= fx + noise:
                # f is flat to rounding here, so let the gradient decide
                gy = gradient(y)
                if np.linalg.norm(y - project_to_simplex(y - gy, total, floor)) < pg_norm:
                    break
            step *= 0.5
        if np.array_equal(y, x):
            return MinimizeResult(x, fx, it, pg_norm < 10 * tol, heuristic, pg_norm)
        # Barzilai-Borwein trial step for the next iteration
        sk, yk = y - x, gy - g
        sy = float(np.dot(sk, yk))
        step = min(float(np.dot(sk, sk)) / sy, 1e3) if sy > 0 else 1.0
        x, fx, g = y, fy, gy
    result = MinimizeResult(x, fx, max_iter, False, heuristic, pg_norm)
    raise NonConvergence(f"no convergence after {max_iter} iterations (|pg| = {pg_norm:.3g})", result)

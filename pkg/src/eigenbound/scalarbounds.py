"""Closed-form scalar functions and eigenvalue-count bounds.

Implements the combinatorial series f(a) = sum_n n^{n/2} a^n / n!, its
inverse, the weighted-exponential pair g_eps / h_eps, the kernel-bound
constants for compactly supported and exponentially decaying potentials,
the discrete-spectral-radius bounds, and the total-multiplicity bounds
with their corollary closed forms.

Every bound is evaluated in hardware doubles by default; passing
precision="extended" reruns the same formula in 50-digit software floats
for cross-checking. Near-threshold parameters make the log ratio
ln(rho/sqrt(T^2+R)) cancel catastrophically in doubles, so it is always
computed through log1p on the algebraically rearranged argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln, digamma, polygamma

from .errors import (DegenerateK, DivergentB, InadmissibleRho, InadmissibleT,
                     ModeMismatch, NegativeLogArgument, NonpositiveImK,
                     WrongDecayClass)
from .potentials import PotentialFunctionals

_LN_DBL_MAX = math.log(np.finfo(float).max)


# ---------------------------------------------------------------------------
# the series f and friends

def f_series(a: float) -> float:
    """f(a) = sum_{n>=0} n^{n/2} a^n / n!  (0^0 = 1).

    Returns +inf when the value exceeds the double range; callers needing
    the logarithm should use log_f_series instead.
    """
    if a < 0:
        raise ValueError("f is defined for a >= 0")
    if a == 0.0:
        return 1.0
    if 2.0 * a * a + math.log1p(a) > _LN_DBL_MAX:   # paper majorant overflows
        return math.inf
    s = 1.0
    t = a                     # n = 1 term
    n = 1
    while True:
        s += t
        ratio = a * (1.0 + 1.0 / n) ** (n / 2.0) / math.sqrt(n + 1.0)
        t *= ratio
        n += 1
        q = a * math.exp(0.5) / math.sqrt(n + 1.0)  # geometric tail majorant
        if q < 0.5 and t / (1.0 - q) < 1e-15 * s:
            s += t
            break
        if n > 20_000_000:
            raise RuntimeError("f_series failed to terminate")
    return s


def _f_peak_index(a: float) -> float:
    """Stationary point of the log term t(n) = (n/2)ln n + n ln a - lgamma(n+1)."""
    n = max(math.e * a * a, 2.0)
    for _ in range(80):
        g = 0.5 * math.log(n) + 0.5 + math.log(a) - digamma(n + 1.0)
        gp = 0.5 / n - polygamma(1, n + 1.0)
        step = g / gp
        n -= step
        if n <= 1.0:
            n = 2.0
        if abs(step) < 1e-9 * n:
            break
    return n


def log_f_series(a: float) -> float:
    """ln f(a), finite for every finite a >= 0."""
    if a < 0:
        raise ValueError("f is defined for a >= 0")
    if a == 0.0:
        return 0.0
    if a <= 17.0:
        return math.log(f_series(a))
    n_star = _f_peak_index(a)
    sigma = math.sqrt(2.0 * n_star)
    if a > 1e5:
        # Laplace approximation over the term index; relative error O(1/n*)
        lt_peak = 0.5 * n_star * math.log(n_star) + n_star * math.log(a) \
            - gammaln(n_star + 1.0)
        curv = abs(0.5 / n_star - polygamma(1, n_star + 1.0))
        return lt_peak + 0.5 * math.log(2.0 * math.pi / curv)
    half = int(14.0 * sigma) + 50
    lo = max(0, int(n_star) - half)
    hi = int(n_star) + half
    m = -math.inf
    # two passes: find max, then accumulate exp(lt - m) in chunks
    def _lt(nv):
        out = nv * math.log(a) - gammaln(nv + 1.0)
        pos = nv > 0
        out[pos] += 0.5 * nv[pos] * np.log(nv[pos])
        return out
    for c0 in range(lo, hi + 1, 1_000_000):
        nv = np.arange(c0, min(c0 + 1_000_000, hi + 1), dtype=float)
        m = max(m, float(np.max(_lt(nv))))
    acc = 0.0
    for c0 in range(lo, hi + 1, 1_000_000):
        nv = np.arange(c0, min(c0 + 1_000_000, hi + 1), dtype=float)
        acc += float(np.sum(np.exp(_lt(nv) - m)))
    return m + math.log(acc)


def f_inverse(y: float) -> float:
    """Inverse of the strictly increasing f on [1, inf), bisection to 1e-10 relative."""
    if y < 1.0:
        raise ValueError("f maps [0, inf) onto [1, inf)")
    if y == 1.0:
        return 0.0
    ly = math.log(y)
    lo, hi = 0.0, 1.0
    while log_f_series(hi) < ly:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if log_f_series(mid) < ly:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-10 * max(hi, 1e-30):
            break
    return 0.5 * (lo + hi)


def g_eps(eps: float, t: float) -> float:
    """g_eps(t) = t * exp(eps * t)."""
    if t < 0 or eps <= 0:
        raise ValueError("need t >= 0 and eps > 0")
    x = eps * t
    if x > _LN_DBL_MAX:
        return math.inf
    return t * math.exp(x)


def h_eps(eps: float, s: float) -> float:
    """Inverse of g_eps: the unique root of t e^{eps t} = s, by safeguarded Newton."""
    if s < 0 or eps <= 0:
        raise ValueError("need s >= 0 and eps > 0")
    if s == 0.0:
        return 0.0
    # solve phi(t) = ln t + eps t - ln s = 0 on (0, s]
    ls = math.log(s)
    t = min(s, math.log1p(eps * s) / eps)
    if t <= 0.0:
        t = s
    lo, hi = 0.0, s
    for _ in range(200):
        phi = math.log(t) + eps * t - ls
        if phi > 0:
            hi = t
        else:
            lo = t
        step = phi / (1.0 / t + eps)
        t_new = t - step
        if not (lo < t_new < (hi if hi > 0 else s)):
            t_new = 0.5 * (lo + (hi if hi > lo else t + t))
        if abs(t_new - t) <= 1e-12 * max(t, 1e-300):
            t = t_new
            break
        t = t_new
    return t


# ---------------------------------------------------------------------------
# kernel-bound constants

_SQRT2 = math.sqrt(2.0)


def lemma1_constant(fn: PotentialFunctionals) -> float:
    """C = max{ kato/(8 pi^2), ||V||_inf/(8 pi) + (sqrt2/16)||grad V||_inf (d+1) }."""
    if fn.decay_kind != "compact":
        raise WrongDecayClass("constant C needs a compactly supported potential")
    first = fn.kato_constant / (8.0 * math.pi ** 2)
    second = fn.linf_norm / (8.0 * math.pi) + \
        (_SQRT2 / 16.0) * fn.grad_linf_norm * (fn.support_diameter + 1.0)
    return max(first, second)


def lemma1_kernel_bound(C: float, k: complex) -> float:
    """2C / (sqrt(1+4|k|) - 1), written in rationalized form."""
    ak = abs(k)
    if ak == 0.0:
        raise DegenerateK("kernel bound diverges at k = 0")
    return C * (math.sqrt(1.0 + 4.0 * ak) + 1.0) / (2.0 * ak)


def lemma2_constant(fn: PotentialFunctionals) -> float:
    """C~ = (1/8 pi^2) max{ kato, pi A (1 + sqrt2 pi) }."""
    if fn.decay_kind != "exponential":
        raise WrongDecayClass("constant C~ needs an exponentially decaying potential")
    return max(fn.kato_constant,
               math.pi * fn.weighted_sup * (1.0 + _SQRT2 * math.pi)) / (8.0 * math.pi ** 2)


def lemma2_kernel_bound(Ct: float, eps: float, k: complex) -> float:
    """C~ / h_eps(|k|)."""
    ak = abs(k)
    if ak == 0.0:
        raise DegenerateK("kernel bound diverges at k = 0")
    return Ct / h_eps(eps, ak)


def radius_bound(fn: PotentialFunctionals, constant: float, mode: str,
                 eps: Optional[float] = None) -> float:
    """Discrete-spectral-radius bound R for the given theorem mode."""
    cl1 = constant * fn.l1_norm
    if mode == "Theorem1":
        if fn.decay_kind != "compact":
            raise ModeMismatch("Theorem1 radius needs compact support")
        return (cl1 * (1.0 + cl1)) ** 2
    if mode == "Theorem2":
        if fn.decay_kind != "exponential":
            raise ModeMismatch("Theorem2 radius needs exponential decay")
        e = fn.eps if eps is None else eps
        x = 2.0 * e * cl1
        return math.inf if x > _LN_DBL_MAX else cl1 ** 2 * math.exp(x)
    raise ValueError(f"unknown mode {mode!r}")


def hadamard_deviation_bound(c_l1: float, k: complex) -> float:
    """f(2 C||V||_1 / (sqrt(1+4|k|)-1)) - 1: upper bound for |D(k) - 1| in C+.

    c_l1 is the product C * ||V||_1.
    """
    if k.imag <= 0:
        raise NonpositiveImK("Hadamard deviation bound holds in the upper half plane")
    ak = abs(k)
    if ak == 0.0:
        raise DegenerateK("bound diverges at k = 0")
    arg = c_l1 * (math.sqrt(1.0 + 4.0 * ak) + 1.0) / (2.0 * ak)
    return f_series(arg) - 1.0


# ---------------------------------------------------------------------------
# bound reports

@dataclass(frozen=True)
class BoundParameters:
    eps: float
    T: Optional[float] = None
    rho: Optional[float] = None

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.T is not None and self.T <= 0:
            raise ValueError("T must be positive")


@dataclass(frozen=True)
class BoundReport:
    constant: float
    constant_kind: str        # "C" (Lemma 1) or "Ct" (Lemma 2)
    radius_R: float
    A: float
    B: float
    T_used: float
    rho_used: float
    eps: float
    n_bound: float
    admissible: bool
    diagnostic: str

    def as_dict(self):
        return {
            "constant": self.constant, "constant_kind": self.constant_kind,
            "radius_R": self.radius_R, "A": self.A, "B": self.B,
            "T_used": self.T_used, "rho_used": self.rho_used, "eps": self.eps,
            "n_bound": self.n_bound, "admissible": self.admissible,
            "diagnostic": self.diagnostic,
        }


def _log_ratio(T: float, R: float, delta: float) -> float:
    """ln((T+delta)/sqrt(T^2+R)) without cancellation: 0.5*log1p(((2T+d)d - R)/(T^2+R))."""
    num = (2.0 * T + delta) * delta - R
    q = num / (T * T + R)
    if q <= -1.0:
        return -math.inf
    return 0.5 * math.log1p(q)


def _check_eps(fn: PotentialFunctionals, eps: float):
    if abs(fn.eps - eps) > 1e-12 * max(1.0, eps):
        raise ValueError(
            f"functionals were measured at eps={fn.eps}, bound requested eps={eps}")


def n_bound_theorem1(fn: PotentialFunctionals, C: float,
                     params: BoundParameters, enforce: bool = True,
                     precision: str = "double") -> BoundReport:
    """Total-multiplicity bound for compactly supported potentials.

    N(V) <= [ln((T+eps/4)/sqrt(T^2+R))]^{-1} [ln f(AB/2 pi eps)
             - ln{2 - f(2C||V||_1/(sqrt(1+4T)-1))}].
    """
    if fn.decay_kind != "compact":
        raise ModeMismatch("Theorem 1 requires a compactly supported potential")
    eps = params.eps
    _check_eps(fn, eps)
    if precision == "extended":
        return _n_bound_theorem1_mp(fn, C, params, enforce)
    cl1 = C * fn.l1_norm
    R = (cl1 * (1.0 + cl1)) ** 2
    t_lower = max(2.0 * R / eps - eps / 8.0, 2.0 * cl1 * (1.0 + 2.0 * cl1))
    T = params.T if params.T is not None else (1.01 * t_lower if t_lower > 0 else eps)
    if enforce and T <= t_lower:
        raise InadmissibleT(
            f"T={T:.6g} must exceed max(2R/eps - eps/8, 2C||V||1(1+2C||V||1)) = {t_lower:.6g}")
    delta = eps / 4.0
    rho = T + delta
    q = fn.weighted_sup * fn.weighted_l1 / (2.0 * math.pi * eps)
    # 2 C||V||_1 / (sqrt(1+4T)-1) in rationalized form (stable for small T)
    arg2 = 2.0 * cl1 * (math.sqrt(1.0 + 4.0 * T) + 1.0) / (4.0 * T)
    floor = 2.0 - f_series(arg2)
    if floor <= 0.0:
        raise NegativeLogArgument(
            f"2 - f({arg2:.6g}) = {floor:.6g} <= 0; T below the admissible threshold")
    bracket = log_f_series(q) - math.log(floor)
    denom = _log_ratio(T, R, delta)
    n_bound = bracket / denom if denom > 0 else math.inf
    return BoundReport(C, "C", R, fn.weighted_sup, fn.weighted_l1, T, rho, eps,
                       max(n_bound, 0.0), True,
                       f"T threshold {t_lower:.6g}; f-arguments q={q:.6g}, hadamard={arg2:.6g}")


def n_bound_corollary1(fn: PotentialFunctionals, C: float, eps: float,
                       precision: str = "double") -> BoundReport:
    """Closed-form relaxation of Theorem 1 at its implied T."""
    if fn.decay_kind != "compact":
        raise ModeMismatch("Corollary 1 requires a compactly supported potential")
    _check_eps(fn, eps)
    if precision == "extended":
        return _n_bound_corollary1_mp(fn, C, eps)
    cl1 = C * fn.l1_norm
    if cl1 == 0.0:
        return BoundReport(C, "C", 0.0, fn.weighted_sup, fn.weighted_l1,
                           eps, eps, eps, 0.0, True, "zero potential short-circuit")
    L = cl1 * (1.0 + cl1)
    if eps / 2.0 <= L:
        T = 4.0 * L * L / eps
    else:
        T = 2.0 * cl1 * (1.0 + 2.0 * cl1)
    m = min(eps / (2.0 * cl1), (1.0 + cl1) ** 2 / (1.0 + 2.0 * cl1))
    denom = math.log1p(0.25 * m * m / (1.0 + cl1) ** 2)
    q = fn.weighted_sup * fn.weighted_l1 / (2.0 * math.pi * eps)
    bracket = 3.0 + 2.0 * q * q + math.log1p(q)
    n_bound = 2.0 * bracket / denom
    return BoundReport(C, "C", L * L, fn.weighted_sup, fn.weighted_l1, T,
                       T + eps / 4.0, eps, n_bound, True,
                       f"corollary case {'eps/2<=L' if eps / 2.0 <= L else 'eps/2>=L'}")


def n_bound_theorem2(fn: PotentialFunctionals, Ct: float,
                     params: BoundParameters, enforce: bool = True,
                     precision: str = "double") -> BoundReport:
    """Total-multiplicity bound for exponentially decaying potentials."""
    if fn.decay_kind != "exponential":
        raise ModeMismatch("Theorem 2 requires an exponentially decaying potential")
    eps = params.eps
    _check_eps(fn, eps)
    if not math.isfinite(fn.weighted_l1):
        raise DivergentB("B(eps) must be finite")
    if precision == "extended":
        return _n_bound_theorem2_mp(fn, Ct, params, enforce)
    cl1 = Ct * fn.l1_norm
    R = radius_bound(fn, Ct, "Theorem2", eps)
    t_lower = max(2.0 * R / eps - eps / 8.0, g_eps(eps, 2.0 * cl1))
    T = params.T if params.T is not None else (1.01 * t_lower if t_lower > 0 else eps)
    if enforce and T <= t_lower:
        raise InadmissibleT(
            f"T={T:.6g} must exceed max(2R/eps - eps/8, g_eps(2C~||V||1)) = {t_lower:.6g}")
    delta = (params.rho - T) if params.rho is not None else eps / 4.0
    rho = T + delta
    if enforce and ((2.0 * T + delta) * delta < R or delta > eps / 4.0 * (1 + 1e-12)
                    or delta < 0):
        raise InadmissibleRho(
            f"rho={rho:.6g} outside [sqrt(T^2+R), T+eps/4] for T={T:.6g}")
    q = fn.weighted_sup * fn.weighted_l1 / (2.0 * math.pi * eps)
    arg2 = cl1 / h_eps(eps, T)
    floor = 2.0 - f_series(arg2)
    if floor <= 0.0:
        raise NegativeLogArgument(
            f"2 - f({arg2:.6g}) = {floor:.6g} <= 0; T below the admissible threshold")
    bracket = log_f_series(q) - math.log(floor)
    denom = _log_ratio(T, R, delta)
    n_bound = bracket / denom if denom > 0 else math.inf
    return BoundReport(Ct, "Ct", R, fn.weighted_sup, fn.weighted_l1, T, rho, eps,
                       max(n_bound, 0.0), True,
                       f"T threshold {t_lower:.6g}; f-arguments q={q:.6g}, hadamard={arg2:.6g}")


def n_bound_corollary2(fn: PotentialFunctionals, Ct: float, eps: float,
                       precision: str = "double") -> BoundReport:
    """Closed-form relaxation of Theorem 2 at its implied T."""
    if fn.decay_kind != "exponential":
        raise ModeMismatch("Corollary 2 requires an exponentially decaying potential")
    _check_eps(fn, eps)
    if precision == "extended":
        return _n_bound_corollary2_mp(fn, Ct, eps)
    cl1 = Ct * fn.l1_norm
    if cl1 == 0.0:
        return BoundReport(Ct, "Ct", 0.0, fn.weighted_sup, fn.weighted_l1,
                           eps, eps, eps, 0.0, True, "zero potential short-circuit")
    if eps <= 2.0 * cl1:
        M = g_eps(eps, cl1)
        T = 4.0 * M * M / eps
    else:
        T = g_eps(eps, 2.0 * cl1)
    m = min(1.0, eps / (2.0 * cl1))
    denom = math.log1p(0.25 * m * m * math.exp(-2.0 * cl1))
    q = fn.weighted_sup * fn.weighted_l1 / (2.0 * math.pi * eps)
    bracket = 3.0 + 2.0 * q * q + math.log1p(q)
    n_bound = 2.0 * bracket / denom
    R = radius_bound(fn, Ct, "Theorem2", eps)
    return BoundReport(Ct, "Ct", R, fn.weighted_sup, fn.weighted_l1, T,
                       T + eps / 4.0, eps, n_bound, True,
                       f"corollary case {'eps<=2Ctl1' if eps <= 2.0 * cl1 else 'eps>=2Ctl1'}")


# ---------------------------------------------------------------------------
# 50-digit cross-check path (mpmath)

def mp_f_series(a, dps: int = 50):
    """f(a) in software floats; independent evaluation for oracle cross-checks."""
    import mpmath as mp
    with mp.workdps(dps):
        a = mp.mpf(a)
        if a < 0:
            raise ValueError("f is defined for a >= 0")
        s = mp.mpf(1)
        t = a
        n = 1
        while n < 5_000_000:
            s += t
            t *= a * mp.power(1 + mp.mpf(1) / n, mp.mpf(n) / 2) / mp.sqrt(n + 1)
            n += 1
            if t < mp.mpf(10) ** (-dps) * s:
                s += t
                break
        else:
            raise RuntimeError("mp_f_series exceeded its term limit")
        return +s


def mp_h_eps(eps, s, dps: int = 50):
    import mpmath as mp
    with mp.workdps(dps):
        eps, s = mp.mpf(eps), mp.mpf(s)
        if s == 0:
            return mp.mpf(0)
        return mp.findroot(lambda t: t * mp.exp(eps * t) - s,
                           min(s, mp.log(1 + eps * s) / eps + mp.mpf("1e-30")))


def _mp_report(fn, constant, kind, R, T, rho, eps, n_bound, diag):
    return BoundReport(float(constant), kind, float(R), fn.weighted_sup,
                       fn.weighted_l1, float(T), float(rho), float(eps),
                       float(n_bound), True, diag)


def _n_bound_theorem1_mp(fn, C, params, enforce):
    import mpmath as mp
    with mp.workdps(50):
        eps = mp.mpf(params.eps)
        cl1 = mp.mpf(C) * mp.mpf(fn.l1_norm)
        R = (cl1 * (1 + cl1)) ** 2
        t_lower = max(2 * R / eps - eps / 8, 2 * cl1 * (1 + 2 * cl1))
        T = mp.mpf(params.T) if params.T is not None else \
            (mp.mpf("1.01") * t_lower if t_lower > 0 else eps)
        if enforce and T <= t_lower:
            raise InadmissibleT(f"T={float(T):.6g} below threshold {float(t_lower):.6g}")
        rho = T + eps / 4
        q = mp.mpf(fn.weighted_sup) * mp.mpf(fn.weighted_l1) / (2 * mp.pi * eps)
        arg2 = 2 * cl1 / (mp.sqrt(1 + 4 * T) - 1)
        floor = 2 - mp_f_series(arg2)
        if floor <= 0:
            raise NegativeLogArgument("2 - f(...) <= 0")
        bracket = mp.log(mp_f_series(q)) - mp.log(floor)
        denom = mp.log(rho / mp.sqrt(T * T + R))
        nb = bracket / denom if denom > 0 else mp.inf
        return _mp_report(fn, C, "C", R, T, rho, eps, max(nb, 0), "extended precision")


def _n_bound_corollary1_mp(fn, C, eps):
    import mpmath as mp
    with mp.workdps(50):
        eps = mp.mpf(eps)
        cl1 = mp.mpf(C) * mp.mpf(fn.l1_norm)
        if cl1 == 0:
            return _mp_report(fn, C, "C", 0, eps, eps, eps, 0, "zero potential")
        L = cl1 * (1 + cl1)
        T = 4 * L * L / eps if eps / 2 <= L else 2 * cl1 * (1 + 2 * cl1)
        m = min(eps / (2 * cl1), (1 + cl1) ** 2 / (1 + 2 * cl1))
        denom = mp.log(1 + m * m / (4 * (1 + cl1) ** 2))
        q = mp.mpf(fn.weighted_sup) * mp.mpf(fn.weighted_l1) / (2 * mp.pi * eps)
        nb = 2 * (3 + 2 * q * q + mp.log(1 + q)) / denom
        return _mp_report(fn, C, "C", L * L, T, T + eps / 4, eps, nb, "extended precision")


def _n_bound_theorem2_mp(fn, Ct, params, enforce):
    import mpmath as mp
    with mp.workdps(50):
        eps = mp.mpf(params.eps)
        cl1 = mp.mpf(Ct) * mp.mpf(fn.l1_norm)
        R = cl1 ** 2 * mp.exp(2 * eps * cl1)
        t_lower = max(2 * R / eps - eps / 8, 2 * cl1 * mp.exp(2 * eps * cl1))
        T = mp.mpf(params.T) if params.T is not None else \
            (mp.mpf("1.01") * t_lower if t_lower > 0 else eps)
        if enforce and T <= t_lower:
            raise InadmissibleT(f"T={float(T):.6g} below threshold {float(t_lower):.6g}")
        rho = mp.mpf(params.rho) if params.rho is not None else T + eps / 4
        if enforce and (rho < mp.sqrt(T * T + R) or rho > T + eps / 4):
            raise InadmissibleRho("rho outside admissible interval")
        q = mp.mpf(fn.weighted_sup) * mp.mpf(fn.weighted_l1) / (2 * mp.pi * eps)
        h = mp_h_eps(eps, T)
        floor = 2 - mp_f_series(cl1 / h)
        if floor <= 0:
            raise NegativeLogArgument("2 - f(...) <= 0")
        bracket = mp.log(mp_f_series(q)) - mp.log(floor)
        denom = mp.log(rho / mp.sqrt(T * T + R))
        nb = bracket / denom if denom > 0 else mp.inf
        return _mp_report(fn, Ct, "Ct", R, T, rho, eps, max(nb, 0), "extended precision")


def _n_bound_corollary2_mp(fn, Ct, eps):
    import mpmath as mp
    with mp.workdps(50):
        eps = mp.mpf(eps)
        cl1 = mp.mpf(Ct) * mp.mpf(fn.l1_norm)
        if cl1 == 0:
            return _mp_report(fn, Ct, "Ct", 0, eps, eps, eps, 0, "zero potential")
        if eps <= 2 * cl1:
            M = cl1 * mp.exp(eps * cl1)
            T = 4 * M * M / eps
        else:
            T = 2 * cl1 * mp.exp(2 * eps * cl1)
        m = min(mp.mpf(1), eps / (2 * cl1))
        denom = mp.log(1 + m * m * mp.exp(-2 * cl1) / 4)
        q = mp.mpf(fn.weighted_sup) * mp.mpf(fn.weighted_l1) / (2 * mp.pi * eps)
        nb = 2 * (3 + 2 * q * q + mp.log(1 + q)) / denom
        R = cl1 ** 2 * mp.exp(2 * eps * cl1)
        return _mp_report(fn, Ct, "Ct", R, T, T + eps / 4, eps, nb, "extended precision")

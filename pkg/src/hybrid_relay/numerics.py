"""Special functions, quadrature and summation used by the closed forms."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np
from scipy import linalg, special

_SQRT_PI = math.sqrt(math.pi)
_TINY = np.finfo(float).tiny
# above this argument the scaled complement is taken from its asymptotic series
_ASYMPTOTIC_Z = 50.0


def erfc(x: float) -> float:
    return float(special.erfc(x))


def erfcx(x: float) -> float:
    """Scaled complementary error function ``exp(x**2) * erfc(x)``."""
    return float(special.erfcx(x))


def _one_minus_sqrtpi_z_erfcx(z: float) -> float:
    # 1 - sqrt(pi) z erfcx(z); loses ~2 z^2 ulps when done directly
    if z < _ASYMPTOTIC_Z:
        return 1.0 - _SQRT_PI * z * erfcx(z)
    x = 1.0 / (2.0 * z * z)
    term, total = x, 0.0
    for n in range(1, 12):
        total += term
        term *= -(2 * n + 1) * x
    return total


def _check_laplace_args(s: float, a: float) -> None:
    if not s > 0:
        raise ValueError(f"s must be positive, got {s!r}")
    if not a >= 0:
        raise ValueError(f"a must be nonnegative, got {a!r}")


def laplace_exp_sqrt(s: float, a: float) -> float:
    """Closed form of ``∫_0^∞ exp(-s γ) exp(-a √γ) dγ``.

    Equals ``1/s - a√π/(2 s^{3/2}) · exp(a²/4s) · erfc(a/2√s)``; the
    exponential-times-erfc product goes through ``erfcx`` so it never
    overflows.
    """
    _check_laplace_args(s, a)
    if a == 0:
        return 1.0 / s
    z = a / (2.0 * math.sqrt(s))
    return _one_minus_sqrtpi_z_erfcx(z) / s


def laplace_exp_sqrt_complement(s: float, a: float) -> float:
    """``∫_0^∞ exp(-s γ) (1 - exp(-a √γ)) dγ = 1/s - laplace_exp_sqrt(s, a)``.

    Computed without the subtraction, which matters when ``a`` is small.
    """
    _check_laplace_args(s, a)
    if a == 0:
        return 0.0
    z = a / (2.0 * math.sqrt(s))
    return _SQRT_PI * z * erfcx(z) / s


def log_binomial(n: int, k: int) -> float:
    if k < 0 or n < 0:
        raise ValueError("n and k must be nonnegative")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    return math.log(math.comb(n, k))


class SignedSum(NamedTuple):
    sum: float
    cancellation_ratio: float


def compensated_signed_sum(terms: Iterable[float]) -> SignedSum:
    """Neumaier-compensated sum plus ``Σ|t| / |Σt|`` as a precision gauge."""
    s = 0.0
    c = 0.0
    abs_total = 0.0
    for t in terms:
        t = float(t)
        abs_total += abs(t)
        u = s + t
        if abs(s) >= abs(t):
            c += (s - u) + t
        else:
            c += (t - u) + s
        s = u
    total = s + c
    if abs_total == 0.0:
        return SignedSum(total, 0.0)
    return SignedSum(total, abs_total / max(abs(total), _TINY))


# -- error-free products (Dekker / Veltkamp) -------------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """``a*b`` as an unevaluated pair ``(p, e)`` with ``p + e`` exact.

    Works elementwise on numpy arrays.
    """
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def dd_mul(ah, al, bh, bl):
    """Product of two double-double numbers, renormalised."""
    p, e = two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    s = p + e
    return s, e - (s - p)


def dd_powers(x: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``x**0 .. x**n`` as double-double (hi, lo) arrays."""
    hi = np.empty(n + 1)
    lo = np.empty(n + 1)
    hi[0], lo[0] = 1.0, 0.0
    for i in range(1, n + 1):
        hi[i], lo[i] = dd_mul(hi[i - 1], lo[i - 1], x, 0.0)
    return hi, lo


# -- Gauss-Laguerre quadrature --------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 128
    rel_tol: float = 1e-9
    max_doublings: int = 6

    def __post_init__(self):
        if not isinstance(self.nodes, int) or self.nodes < 8:
            raise ValueError("nodes must be an integer ≥ 8")
        if not (0 < self.rel_tol <= 1e-3):
            raise ValueError("rel_tol must lie in (0, 1e-3]")
        if not isinstance(self.max_doublings, int) or self.max_doublings < 1:
            raise ValueError("max_doublings must be a positive integer")


@functools.lru_cache(maxsize=16)
def laguerre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Laguerre rule (weight e^-x).

    Golub-Welsch eigenvalues polished by Newton steps; weights come from the
    Christoffel sum over ``L_k(x) e^{-x/2}``, which stays bounded by 1, so
    large ``n`` neither overflows nor produces NaNs. Weights below the
    double range underflow to zero.
    """
    k = np.arange(n, dtype=float)
    x = linalg.eigvalsh_tridiagonal(2.0 * k + 1.0, k[1:])
    x = np.sort(np.abs(x))
    for _ in range(3):
        q_prev, q, ssum = _scaled_laguerre(x, n)
        # L_n'(x) = n (L_n - L_{n-1}) / x
        denom = n * (q - q_prev)
        safe = denom != 0
        x = np.where(safe, x - x * q / np.where(safe, denom, 1.0), x)
    _, _, ssum = _scaled_laguerre(x, n)
    with np.errstate(under="ignore"):
        w = np.where(ssum > 0, np.exp(-x) / np.where(ssum > 0, ssum, 1.0), 0.0)
    w.setflags(write=False)
    x.setflags(write=False)
    return x, w


def _scaled_laguerre(x: np.ndarray, n: int):
    """Return ``(L_{n-1}, L_n)`` times ``e^{-x/2}`` and ``Σ_{k<n} (L_k e^{-x/2})²``."""
    with np.errstate(under="ignore"):
        p_prev = np.zeros_like(x)
        p = np.exp(-0.5 * x)
    ssum = p * p
    for j in range(n):
        p_next = ((2 * j + 1 - x) * p - j * p_prev) / (j + 1)
        p_prev, p = p, p_next
        if j < n - 1:
            ssum += p * p
    return p_prev, p, ssum


class QuadratureResult(NamedTuple):
    value: float
    achieved_rel_tol: float


class NonFiniteIntegrand(ArithmeticError):
    def __init__(self, abscissa: float, value: float):
        self.abscissa = abscissa
        super().__init__(f"integrand returned {value!r} at gamma={abscissa!r}")


def _evaluate(f: Callable, gamma: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(f(gamma), dtype=float)
        if values.shape != gamma.shape:
            raise TypeError
    except TypeError:
        values = np.array([float(f(g)) for g in gamma])
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise NonFiniteIntegrand(float(gamma[i]), float(values[i]))
    return values


def _laguerre_sqrt_map(f: Callable, n: int) -> float:
    # γ = t²:  ∫ e^{-γ} f(γ) dγ = ∫ e^{-t} [2t e^{t - t²} f(t²)] dt, smooth in t
    t, w = laguerre_rule(n)
    with np.errstate(under="ignore"):
        jac = w * 2.0 * t * np.exp(t - t * t)
    live = jac > 0
    values = _evaluate(f, t[live] * t[live])
    return float(math.fsum(jac[live] * values))


def integrate_semi_infinite(f: Callable, spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    """Estimate ``∫_0^∞ e^{-γ} f(γ) dγ`` by Gauss-Laguerre with node doubling.

    ``f`` may be vectorised (called with an array of abscissae) or scalar.
    The rule is applied after the substitution ``γ = t²`` so integrands with
    ``√γ`` behaviour at the origin, like the FSO CDF, converge spectrally.

    Refinement stops as soon as two successive estimates agree to
    ``spec.rel_tol``, or after ``spec.max_doublings``; the returned
    ``achieved_rel_tol`` is the last relative change either way, so callers
    detect non-convergence by comparing it against ``spec.rel_tol``.
    """
    n = spec.nodes
    prev = _laguerre_sqrt_map(f, n)
    achieved = math.inf
    for _ in range(spec.max_doublings):
        n *= 2
        cur = _laguerre_sqrt_map(f, n)
        scale = max(abs(cur), _TINY)
        achieved = abs(cur - prev) / scale
        prev = cur
        if achieved <= spec.rel_tol:
            break
    return QuadratureResult(prev, achieved)

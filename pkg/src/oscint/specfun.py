"""Bessel functions of integer order, their zeros, and I₀.

Three regimes for J_m(x):
  |x| ≤ 8            ascending series
  8 < |x|, not far   Miller's downward recurrence, normalized by J₀ + 2ΣJ_{2k} = 1
  |x| > max(1000, m²) Hankel asymptotic expansion
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.optimize import brentq

from oscint.errors import NumericalError, OutOfRangeError
from oscint.models import BesselEval, BesselMethod, CheckResult

logger = logging.getLogger(__name__)

MAX_ORDER = 60
MAX_ARGUMENT = 1e6
SERIES_LIMIT = 8.0
ASYMPTOTIC_LIMIT = 1000.0
MAX_ZERO_INDEX = 20
ZERO_ORDERS = (0, 1, 2)

_RESCALE = 1e250


def _check_order(order: int) -> None:
    if not 0 <= order <= MAX_ORDER:
        msg = f"Bessel order must be in [0, {MAX_ORDER}], got {order}"
        raise OutOfRangeError(msg)


def _series(order: int, x: float) -> float:
    half = 0.5 * x
    term = half**order / math.factorial(order)
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + order))
        total += term
        if abs(term) <= 1e-17 * max(abs(total), 1e-300) or k > 200:
            return total


def _miller_start(order: int, x: float) -> int:
    n = int(max(order, x) + 30 + 10 * x ** (1.0 / 3.0))
    return n + (n % 2)


def _miller(order: int, x: float) -> float:
    n_start = _miller_start(order, x)
    f_next, f_cur = 0.0, 1e-300
    norm = 0.0
    result = 0.0
    for k in range(n_start, 0, -1):
        f_prev = (2.0 * k / x) * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        # f_cur now holds the unnormalized J_{k-1}
        if k - 1 == order:
            result = f_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * f_cur
        if abs(f_cur) > _RESCALE:
            f_cur /= _RESCALE
            f_next /= _RESCALE
            norm /= _RESCALE
            result /= _RESCALE
    norm += f_cur
    return result / norm


def _hankel(order: int, x: float) -> float:
    mu = 4.0 * order * order
    p, q = 1.0, 0.0
    term = 1.0
    k = 0
    prev = math.inf
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(term) >= prev or abs(term) < 1e-17:
            break
        prev = abs(term)
        if k % 2:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += -term if (k // 2) % 2 else term
    chi = x - (0.5 * order + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_j_eval(order: int, x: float) -> BesselEval:
    """J_order(x) with the method used recorded."""
    _check_order(order)
    if not math.isfinite(x) or abs(x) > MAX_ARGUMENT:
        msg = f"Bessel argument must satisfy |x| ≤ {MAX_ARGUMENT:g}, got {x}"
        raise OutOfRangeError(msg)
    ax = abs(x)
    sign = -1.0 if (x < 0 and order % 2) else 1.0
    if ax <= SERIES_LIMIT:
        value, method = _series(order, ax), BesselMethod.SERIES
    elif ax > max(ASYMPTOTIC_LIMIT, order * order):
        value, method = _hankel(order, ax), BesselMethod.ASYMPTOTIC
    else:
        value, method = _miller(order, ax), BesselMethod.RECURRENCE
    return BesselEval(order=order, argument=x, value=sign * value, method=method)


def bessel_j(order: int, x: float) -> float:
    return bessel_j_eval(order, x).value


def bessel_j_prime(order: int, x: float) -> float:
    """J_m'(x) = (J_{m-1}(x) - J_{m+1}(x)) / 2, with J_{-1} = -J_1."""
    if order == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x))


def bessel_j_table(max_order: int, x: np.ndarray) -> np.ndarray:
    """J_0..J_{max_order} at every entry of `x` (x ≥ 0), shape (max_order + 1, *x.shape)."""
    _check_order(max_order)
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0) or np.any(x > ASYMPTOTIC_LIMIT):
        msg = f"tabulated Bessel arguments must lie in [0, {ASYMPTOTIC_LIMIT:g}]"
        raise OutOfRangeError(msg)
    flat = x.ravel()
    out = np.zeros((max_order + 1, flat.size))
    small = flat <= SERIES_LIMIT
    if small.any():
        out[:, small] = _series_table(max_order, flat[small])
    if (~small).any():
        out[:, ~small] = _miller_table(max_order, flat[~small])
    return out.reshape((max_order + 1, *x.shape))


def _series_table(max_order: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    q = -half * half
    out = np.empty((max_order + 1, x.size))
    lead = np.ones_like(x)
    for m in range(max_order + 1):
        if m:
            lead = lead * half / m
        term = lead.copy()
        total = lead.copy()
        for k in range(1, 80):
            term = term * q / (k * (k + m))
            total += term
            if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
                break
        out[m] = total
    return out


def _miller_table(max_order: int, x: np.ndarray) -> np.ndarray:
    n_start = _miller_start(max_order, float(x.max()))
    f_next = np.zeros_like(x)
    f_cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    out = np.zeros((max_order + 1, x.size))
    for k in range(n_start, 0, -1):
        f_prev = (2.0 * k / x) * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        j = k - 1
        if j <= max_order:
            out[j] = f_cur
        if j % 2 == 0 and j > 0:
            norm += 2.0 * f_cur
        big = np.abs(f_cur) > _RESCALE
        if big.any():
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            f_cur *= scale
            f_next *= scale
            norm *= scale
            out *= scale
    norm += f_cur
    return out / norm


def bessel_i0(x: float) -> float:
    """Modified Bessel I₀ by its (positive-term) series."""
    if not math.isfinite(x) or abs(x) > 700.0:
        msg = f"I0 argument must satisfy |x| ≤ 700, got {x}"
        raise OutOfRangeError(msg)
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while term > 1e-17 * total:
        k += 1
        term *= q / (k * k)
        total += term
    return total


def _mcmahon(order: int, k: int) -> float:
    beta = (k + 0.5 * order - 0.25) * math.pi
    mu = 4.0 * order * order
    b8 = 8.0 * beta
    return beta - (mu - 1) / b8 - 4.0 * (mu - 1) * (7 * mu - 31) / (3.0 * b8**3)


def bessel_j_zero(order: int, k: int) -> float:
    """k-th positive zero of J_order, for order in {0, 1, 2} and 1 ≤ k ≤ 20."""
    if order not in ZERO_ORDERS:
        msg = f"zeros are available for orders {ZERO_ORDERS}, got {order}"
        raise OutOfRangeError(msg)
    if not 1 <= k <= MAX_ZERO_INDEX:
        msg = f"zero index must be in [1, {MAX_ZERO_INDEX}], got {k}"
        raise OutOfRangeError(msg)
    guess = _mcmahon(order, k)
    lo, hi = guess - 1.0, guess + 1.0
    try:
        root = brentq(
            lambda x: bessel_j(order, x), lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps
        )
    except (ValueError, RuntimeError) as e:
        msg = f"j_{order},{k} could not be refined in [{lo:.6f}, {hi:.6f}]: {e}"
        raise NumericalError(msg) from e
    logger.debug("j_{%d,%d}: McMahon %.6f, refined %.15f", order, k, guess, root)
    return float(root)


def _five_point_derivative(order: int, x: float, h: float = 1e-3) -> float:
    f = [bessel_j(order, x + j * h) for j in (-2, -1, 1, 2)]
    return (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)


def identity_checks() -> list[CheckResult]:
    """Recurrence, derivative, normalization and zero checks of the kernel."""
    xs = np.linspace(0.5, 50.0, 100)
    recurrence = max(
        abs(bessel_j(m - 1, x) + bessel_j(m + 1, x) - (2 * m / x) * bessel_j(m, x))
        for m in range(1, 11)
        for x in xs
    )
    derivative = max(abs(_five_point_derivative(0, x) + bessel_j(1, x)) for x in xs)
    squares = bessel_j(0, 10.0) ** 2 + 2 * sum(bessel_j(m, 10.0) ** 2 for m in range(1, 41))
    zeros = max(
        abs(bessel_j_zero(0, 1) - 2.404825557695773),
        abs(bessel_j_zero(1, 1) - 3.831705970207512),
        abs(bessel_j_zero(0, 2) - 5.520078110286311),
    )
    return [
        CheckResult("bessel_recurrence", recurrence, 1e-10),
        CheckResult("bessel_derivative", derivative, 1e-10),
        CheckResult("bessel_sum_of_squares", abs(squares - 1.0), 1e-10),
        CheckResult("bessel_zeros", zeros, 1e-12),
    ]

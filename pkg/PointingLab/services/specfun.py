"""Special functions used by the pointing-error and end-to-end distributions.

Every public function accepts Python floats or numpy arrays (broadcast
element-wise) and returns a float for scalar input, an ndarray otherwise.
Series and continued fractions stop on the relative tolerance of the
``Accuracy`` record passed in (the module default when omitted).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from PointingLab.settings import settings

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329
_HALF_LN_TWO_PI = 0.5 * math.log(2.0 * math.pi)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)
_TINY = 1e-300

# Lanczos coefficients, g = 9 (Godfrey); fractional error below 1e-13.
_LANCZOS = (
    1.000000000000000174663,
    5716.400188274341379136,
    -14815.30426768413909044,
    14291.49277657478554025,
    -6348.160217641458813289,
    1301.608286058321874105,
    -108.1767053514369634679,
    2.605696505611755827729,
    -0.7423452510201416151527e-2,
    0.5384136432509564062961e-7,
    -0.4023533141268236372067e-8,
)

_I0_SERIES_LIMIT = 30.0
_I0_OVERFLOW = 700.0
_KUMMER_ASYMPTOTIC = 30.0
_GAUSS_NODES = 160


class SpecialFunctionDomainError(ValueError):
    """Argument outside the domain of a special function."""


class SeriesTruncationError(ArithmeticError):
    """A series or continued fraction did not converge within max_terms."""


class QuadratureError(ArithmeticError):
    """An adaptive quadrature could not reach its tolerance."""


@dataclass(frozen=True)
class Accuracy:
    rel_tol: float
    max_terms: int

    def __post_init__(self) -> None:
        if not 0.0 < self.rel_tol <= 1e-3:
            raise ValueError(f"rel_tol must lie in (0, 1e-3], got {self.rel_tol}")
        if self.max_terms < 32:
            raise ValueError(f"max_terms must be at least 32, got {self.max_terms}")


DEFAULT_ACCURACY = Accuracy(rel_tol=settings.REL_TOL, max_terms=settings.MAX_TERMS)


def _broadcast(*args) -> Tuple[bool, Tuple[np.ndarray, ...]]:
    scalar = all(np.ndim(a) == 0 for a in args)
    arrays = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
    return scalar, tuple(np.atleast_1d(np.array(a, dtype=float)) for a in arrays)


def _finish(out: np.ndarray, scalar: bool):
    if scalar:
        return float(np.asarray(out).reshape(-1)[0])
    return out


# ---------------------------------------------------------------------------
# Gamma function family
# ---------------------------------------------------------------------------

def _ln_gamma(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 20.0
    if np.any(small):
        xs = x[small]
        summ = np.zeros_like(xs)
        for k in range(len(_LANCZOS) - 1, 0, -1):
            summ += _LANCZOS[k] / (xs + k)
        summ = (summ + _LANCZOS[0]) * _SQRT_TWO_PI
        arg1 = xs + 0.5
        arg2 = arg1 + 9.0
        out[small] = arg1 * np.log(arg2) - arg2 + np.log(summ / xs)
    if np.any(~small):
        # Euler-Maclaurin tail, truncation error below 2.4e-14
        xl = x[~small]
        inv2 = 1.0 / (xl * xl)
        series = (1.0 / 12.0 + inv2 * (-1.0 / 360.0 + inv2 * (1.0 / 1260.0 - inv2 / 1680.0))) / xl
        out[~small] = (xl - 0.5) * np.log(xl) - xl + _HALF_LN_TWO_PI + series
    return out


def ln_gamma(x):
    """Natural logarithm of the Gamma function for positive real argument."""
    scalar, (xa,) = _broadcast(x)
    if np.any(~(xa > 0.0)):
        raise SpecialFunctionDomainError("ln_gamma requires x > 0")
    return _finish(_ln_gamma(xa), scalar)


def _gamma_series(s: np.ndarray, x: np.ndarray, acc: Accuracy) -> np.ndarray:
    """Regularized lower gamma P(s, x) by its power series (s > 0, x > 0)."""
    ap = s.copy()
    delta = 1.0 / s
    total = delta.copy()
    for _ in range(acc.max_terms):
        ap += 1.0
        delta = delta * x / ap
        total += delta
        if np.all(np.abs(delta) <= np.abs(total) * acc.rel_tol):
            break
    else:
        raise SeriesTruncationError("incomplete gamma series did not converge")
    return total * np.exp(-x + s * np.log(x) - _ln_gamma(s))


def _gamma_cf(s: np.ndarray, x: np.ndarray, acc: Accuracy) -> np.ndarray:
    """Continued fraction h with Gamma(s, x) = exp(-x) x**s h, any real s, x > 0.

    Modified Lentz evaluation.
    """
    b = x + 1.0 - s
    b = np.where(np.abs(b) < _TINY, _TINY, b)
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, acc.max_terms + 1):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= acc.rel_tol):
            break
    else:
        raise SeriesTruncationError("incomplete gamma continued fraction did not converge")
    return h


def _regularized_gamma_pair(s: np.ndarray, x: np.ndarray, acc: Accuracy) -> Tuple[np.ndarray, np.ndarray]:
    """Return (P, Q) for s > 0, x >= 0."""
    p = np.zeros_like(x)
    q = np.ones_like(x)
    use_series = (x > 0.0) & (x < s + 1.0)
    use_cf = x >= s + 1.0
    if np.any(use_series):
        ps = _gamma_series(s[use_series], x[use_series], acc)
        p[use_series] = ps
        q[use_series] = 1.0 - ps
    if np.any(use_cf):
        sc, xc = s[use_cf], x[use_cf]
        qc = np.exp(-xc + sc * np.log(xc) - _ln_gamma(sc)) * _gamma_cf(sc, xc, acc)
        q[use_cf] = qc
        p[use_cf] = 1.0 - qc
    return p, q


def _check_gamma_args(s: np.ndarray, x: np.ndarray) -> None:
    if np.any(~(s > 0.0)):
        raise SpecialFunctionDomainError("incomplete gamma requires s > 0")
    if np.any(~(x >= 0.0)):
        raise SpecialFunctionDomainError("incomplete gamma requires x >= 0")


def regularized_upper_gamma(s, x, accuracy: Optional[Accuracy] = None):
    """Q(s, x) = Gamma(s, x) / Gamma(s)."""
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (sa, xa) = _broadcast(s, x)
    _check_gamma_args(sa, xa)
    return _finish(_regularized_gamma_pair(sa, xa, acc)[1], scalar)


def upper_incomplete_gamma(s, x, accuracy: Optional[Accuracy] = None):
    """Gamma(s, x) = integral_x^inf t^(s-1) e^-t dt for s > 0, x >= 0."""
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (sa, xa) = _broadcast(s, x)
    _check_gamma_args(sa, xa)
    _, q = _regularized_gamma_pair(sa, xa, acc)
    return _finish(np.exp(_ln_gamma(sa)) * q, scalar)


def lower_incomplete_gamma(s, x, accuracy: Optional[Accuracy] = None):
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (sa, xa) = _broadcast(s, x)
    _check_gamma_args(sa, xa)
    p, _ = _regularized_gamma_pair(sa, xa, acc)
    return _finish(np.exp(_ln_gamma(sa)) * p, scalar)


# ---------------------------------------------------------------------------
# Generalized exponential integral and the Whittaker family built on it
# ---------------------------------------------------------------------------

def _expint_one_series(x: np.ndarray, acc: Accuracy) -> np.ndarray:
    """E_1(x) for 0 < x < 1."""
    term = -x.copy()
    total = term.copy()
    for k in range(2, acc.max_terms + 1):
        term = -term * x * (k - 1) / (k * k)
        total += term
        if np.all(np.abs(term) <= np.abs(total) * acc.rel_tol):
            break
    else:
        raise SeriesTruncationError("E_1 series did not converge")
    return -EULER_GAMMA - np.log(x) - total


def _expint_scaled(nu: np.ndarray, x: np.ndarray, acc: Accuracy) -> np.ndarray:
    """exp(x) * E_nu(x) for real nu and x > 0."""
    out = np.empty_like(x)
    s = 1.0 - nu
    use_cf = x >= np.maximum(1.0, s + 1.0)
    use_gamma = (~use_cf) & (s > 0.0)
    use_recur = (~use_cf) & (s <= 0.0)

    if np.any(use_cf):
        # E_nu(x) = x^(nu-1) Gamma(1-nu, x) = exp(-x) * cf
        out[use_cf] = _gamma_cf(s[use_cf], x[use_cf], acc)

    if np.any(use_gamma):
        sg, xg = s[use_gamma], x[use_gamma]
        _, q = _regularized_gamma_pair(sg, xg, acc)
        out[use_gamma] = np.exp(xg - sg * np.log(xg) + _ln_gamma(sg)) * q

    if np.any(use_recur):
        nr, xr = nu[use_recur], x[use_recur]
        steps = np.floor(nr)
        start = nr - steps
        value = np.empty_like(xr)
        at_integer = start == 0.0
        if np.any(at_integer):
            # begin from E_1 and recur one step less
            value[at_integer] = _expint_one_series(xr[at_integer], acc)
            start = np.where(at_integer, 1.0, start)
            steps = np.where(at_integer, steps - 1.0, steps)
        frac = ~at_integer
        if np.any(frac):
            sf, xf = 1.0 - start[frac], xr[frac]
            _, q = _regularized_gamma_pair(sf, xf, acc)
            value[frac] = np.exp(-sf * np.log(xf) + _ln_gamma(sf)) * q
        ex = np.exp(-xr)
        order = start.copy()
        for _ in range(int(steps.max())):
            live = steps > 0.0
            value = np.where(live, (ex - xr * value) / order, value)
            order = np.where(live, order + 1.0, order)
            steps = steps - 1.0
        out[use_recur] = value * np.exp(xr)
    return out


def expint_e(nu, x, accuracy: Optional[Accuracy] = None):
    """Generalized exponential integral E_nu(x) = integral_1^inf t^-nu e^(-x t) dt."""
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (na, xa) = _broadcast(nu, x)
    if np.any(~(xa > 0.0)):
        raise SpecialFunctionDomainError("expint_e requires x > 0")
    with np.errstate(under="ignore"):
        out = np.exp(-xa) * _expint_scaled(na, xa, acc)
    return _finish(out, scalar)


def upper_gamma_any(s, x, accuracy: Optional[Accuracy] = None):
    """Gamma(s, x) for any real s and x > 0, through x^s E_(1-s)(x)."""
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (sa, xa) = _broadcast(s, x)
    if np.any(~(xa > 0.0)):
        raise SpecialFunctionDomainError("upper_gamma_any requires x > 0")
    with np.errstate(under="ignore"):
        out = np.exp(sa * np.log(xa) - xa) * _expint_scaled(1.0 - sa, xa, acc)
    return _finish(out, scalar)


def whittaker_w_scaled(nu, x, accuracy: Optional[Accuracy] = None):
    """x^(nu/2) e^(-x/2) W_{-nu/2,(1-nu)/2}(x), which equals x * E_nu(x)."""
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (na, xa) = _broadcast(nu, x)
    if np.any(~(xa > 0.0)):
        raise SpecialFunctionDomainError("whittaker_w_scaled requires x > 0")
    with np.errstate(under="ignore"):
        out = xa * np.exp(-xa) * _expint_scaled(na, xa, acc)
    return _finish(out, scalar)


def _whittaker_w_integral(kappa: float, mu: float, x: float) -> float:
    """W_{kappa,mu}(x) from its Laplace-type integral, valid when mu - kappa + 1/2 > 0."""
    from scipy import integrate

    lead = mu - kappa + 0.5
    if lead <= 0.0:
        raise SpecialFunctionDomainError(
            f"no integral representation for kappa={kappa}, mu={mu}"
        )
    p = mu - kappa - 0.5
    r = mu + kappa - 0.5
    value, abserr = integrate.quad(
        lambda t: math.exp(-x * t) * t ** p * (1.0 + t) ** r, 0.0, math.inf, limit=200
    )
    if not math.isfinite(value) or abserr > 1e-8 * abs(value) + 1e-300:
        raise QuadratureError(f"Whittaker integral did not converge (abserr={abserr:.3g})")
    log_pre = (mu + 0.5) * math.log(x) - 0.5 * x - float(_ln_gamma(np.array([lead]))[0])
    return math.exp(log_pre) * value


def whittaker_w(kappa, mu, x, accuracy: Optional[Accuracy] = None):
    """Whittaker function W_{kappa,mu}(x) for x > 0.

    The family mu = kappa + 1/2 (up to the sign of mu) is evaluated through
    the incomplete-gamma identity; any other index pair falls back to the
    integral representation.
    """
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (ka, ma, xa) = _broadcast(kappa, mu, x)
    if np.any(~(xa > 0.0)):
        raise SpecialFunctionDomainError("whittaker_w requires x > 0")
    # W is even in mu
    ma = np.where(np.isclose(ma + ka, -0.5, rtol=0.0, atol=1e-12), -ma, ma)
    family = np.isclose(ma - ka, 0.5, rtol=0.0, atol=1e-12)
    out = np.empty_like(xa)
    if np.any(family):
        nu = -2.0 * ka[family]
        xf = xa[family]
        # W = x^(1 - nu/2) e^(x/2) E_nu(x)
        out[family] = np.exp((1.0 - nu / 2.0) * np.log(xf) - 0.5 * xf) * _expint_scaled(nu, xf, acc)
    for idx in zip(*np.nonzero(~family)):
        logger.debug("Whittaker W via integral representation at %s", idx)
        k_i, m_i, x_i = float(ka[idx]), float(ma[idx]), float(xa[idx])
        try:
            out[idx] = _whittaker_w_integral(k_i, m_i, x_i)
        except SpecialFunctionDomainError:
            out[idx] = _whittaker_w_integral(k_i, -m_i, x_i)
    return _finish(out, scalar)


# ---------------------------------------------------------------------------
# Bessel I0 and Marcum Q1
# ---------------------------------------------------------------------------

def _i0_series(ax: np.ndarray, acc: Accuracy) -> np.ndarray:
    t = 0.25 * ax * ax
    term = np.ones_like(ax)
    total = np.ones_like(ax)
    for k in range(1, acc.max_terms + 1):
        term = term * t / (k * k)
        total += term
        if np.all(term <= total * acc.rel_tol):
            break
    else:
        raise SeriesTruncationError("I0 series did not converge")
    return total


def _i0e_asymptotic(ax: np.ndarray, acc: Accuracy) -> np.ndarray:
    term = np.ones_like(ax)
    total = np.ones_like(ax)
    for k in range(1, acc.max_terms + 1):
        term = term * (2 * k - 1) ** 2 / (8.0 * k * ax)
        total += term
        if np.all(term <= total * acc.rel_tol):
            break
    return total / np.sqrt(2.0 * math.pi * ax)


def bessel_i0e(x, accuracy: Optional[Accuracy] = None):
    """Exponentially scaled modified Bessel function exp(-|x|) I0(x)."""
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (xa,) = _broadcast(x)
    ax = np.abs(xa)
    out = np.empty_like(ax)
    low = ax <= _I0_SERIES_LIMIT
    if np.any(low):
        out[low] = _i0_series(ax[low], acc) * np.exp(-ax[low])
    if np.any(~low):
        out[~low] = _i0e_asymptotic(ax[~low], acc)
    return _finish(out, scalar)


def bessel_i0(x, accuracy: Optional[Accuracy] = None):
    """Modified Bessel function of the first kind, order zero."""
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (xa,) = _broadcast(x)
    ax = np.abs(xa)
    if np.any(ax > _I0_OVERFLOW):
        raise OverflowError(f"bessel_i0 overflows for |x| > {_I0_OVERFLOW}")
    out = np.empty_like(ax)
    low = ax <= _I0_SERIES_LIMIT
    if np.any(low):
        out[low] = _i0_series(ax[low], acc)
    if np.any(~low):
        out[~low] = _i0e_asymptotic(ax[~low], acc) * np.exp(ax[~low])
    return _finish(out, scalar)


def marcum_q1(a, b, accuracy: Optional[Accuracy] = None):
    """First-order Marcum Q function.

    Summed as a Poisson mixture of regularized upper gamma functions,
    Q1(a, b) = sum_k Pois(k; a^2/2) Q(k + 1, b^2/2), whose terms are all
    nonnegative.
    """
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (aa, ba) = _broadcast(a, b)
    if np.any(~(aa >= 0.0)) or np.any(~(ba >= 0.0)):
        raise SpecialFunctionDomainError("marcum_q1 requires a >= 0 and b >= 0")
    lam = 0.5 * aa * aa
    y = 0.5 * ba * ba
    with np.errstate(divide="ignore"):
        ln_lam = np.log(lam)
        ln_y = np.log(y)
    weight = np.exp(-lam)
    tail = np.exp(-y)
    total = weight * tail
    ln_fact = 0.0
    cap = int(max(acc.max_terms, lam.max(initial=0.0) + 40.0 * math.sqrt(lam.max(initial=0.0)) + 100))
    with np.errstate(under="ignore", invalid="ignore"):
        for k in range(1, cap + 1):
            ln_fact += math.log(k)
            weight = np.where(lam > 0.0, np.exp(-lam + k * ln_lam - ln_fact), 0.0)
            tail = np.where(y > 0.0, tail + np.exp(-y + k * ln_y - ln_fact), 1.0)
            tail = np.minimum(tail, 1.0)
            total += weight * tail
            remaining = weight * (k + 1.0) / np.maximum(k + 1.0 - lam, 1e-300)
            if np.all((k > lam) & (remaining <= 1e-17)):
                break
        else:
            raise SeriesTruncationError("Marcum Q series did not converge")
    out = np.where(ba == 0.0, 1.0, np.clip(total, 0.0, 1.0))
    return _finish(out, scalar)


# ---------------------------------------------------------------------------
# Confluent hypergeometric 1F1
# ---------------------------------------------------------------------------

def _kummer_taylor(a: np.ndarray, b: np.ndarray, x: np.ndarray, acc: Accuracy) -> np.ndarray:
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(acc.max_terms):
        term = term * (a + k) * x / ((b + k) * (k + 1.0))
        total += term
        if np.all(np.abs(term) <= np.abs(total) * acc.rel_tol):
            return total
    raise SeriesTruncationError("1F1 Taylor series did not converge")


def _kummer_asymptotic(a: np.ndarray, b: np.ndarray, x: np.ndarray, acc: Accuracy) -> Tuple[np.ndarray, np.ndarray]:
    """Leading large-x expansion; returns (value, converged mask)."""
    term = np.ones_like(x)
    total = np.ones_like(x)
    converged = np.zeros(x.shape, dtype=bool)
    diverged = np.zeros(x.shape, dtype=bool)
    previous = np.full_like(x, np.inf)
    for k in range(acc.max_terms):
        term = term * (b - a + k) * (1.0 - a + k) / ((k + 1.0) * x)
        diverged |= (np.abs(term) > previous) & ~converged
        live = ~converged & ~diverged
        total = np.where(live, total + term, total)
        converged |= live & (np.abs(term) <= np.abs(total) * acc.rel_tol)
        previous = np.abs(term)
        if np.all(converged | diverged):
            break
    log_pre = _ln_gamma(b) - _ln_gamma(a) + x + (a - b) * np.log(x)
    return np.exp(log_pre) * total, converged


def _is_nonpositive_integer(v: np.ndarray) -> np.ndarray:
    return (v <= 0.0) & (v == np.round(v))


def kummer_1f1(a, b, x, accuracy: Optional[Accuracy] = None):
    """Confluent hypergeometric function 1F1(a; b; x)."""
    acc = accuracy or DEFAULT_ACCURACY
    scalar, (aa, ba, xa) = _broadcast(a, b, x)
    if np.any(_is_nonpositive_integer(ba)):
        raise SpecialFunctionDomainError("kummer_1f1 requires b not a nonpositive integer")
    out = np.empty_like(xa)

    # Kummer transformation keeps the summed argument nonnegative
    negative = xa < -1.0
    ea = np.where(negative, ba - aa, aa)
    ex = np.where(negative, -xa, xa)

    asym = (ex > _KUMMER_ASYMPTOTIC) & (ea > 0.0) & (ba > 0.0)
    if np.any(asym):
        value, ok = _kummer_asymptotic(ea[asym], ba[asym], ex[asym], acc)
        idx = np.flatnonzero(asym)
        out.flat[idx[ok]] = value[ok]
        asym.flat[idx[~ok]] = False
    taylor = ~asym
    if np.any(taylor):
        out[taylor] = _kummer_taylor(ea[taylor], ba[taylor], ex[taylor], acc)
    with np.errstate(over="ignore"):
        out = np.where(negative, np.exp(xa) * out, out)
    return _finish(out, scalar)


# ---------------------------------------------------------------------------
# Gaussian-weighted moments
# ---------------------------------------------------------------------------

def _gauss_moment_quadrature(n: float, a: np.ndarray, b: np.ndarray, normalized: bool) -> np.ndarray:
    """Gauss-Legendre on x = y^2 for b < 0, where the closed form cancels."""
    nodes, weights = np.polynomial.legendre.leggauss(_GAUSS_NODES)
    root = np.sqrt(b * b + 8.0 * a * max(n, 0.0))
    if n > 0.0:
        peak = 2.0 * n / (root - b)
        width = 1.0 / np.sqrt(n / (peak * peak) + 2.0 * a)
    else:
        peak = np.zeros_like(b)
        width = 1.0 / (np.abs(b) + np.sqrt(2.0 * a))
    upper = np.sqrt(peak + 40.0 * width)
    y = 0.5 * upper[..., None] * (nodes + 1.0)
    with np.errstate(divide="ignore", under="ignore"):
        log_f = (
            math.log(2.0)
            + (2.0 * n + 1.0) * np.log(y)
            - a[..., None] * y ** 4
            + b[..., None] * y * y
        )
        if normalized:
            log_f -= float(_ln_gamma(np.array([n + 1.0]))[0])
        return 0.5 * upper * np.sum(weights * np.exp(log_f), axis=-1)


def gauss_moment(n, a, b, normalized: bool = False, accuracy: Optional[Accuracy] = None):
    """J_n(a, b) = integral_0^inf x^n exp(-a x^2 + b x) dx for n > -1, a >= 0.

    Closed form through 1F1 when b >= 0; quadrature when b < 0. With
    ``normalized`` the result is divided by Gamma(n + 1).
    """
    acc = accuracy or DEFAULT_ACCURACY
    n = float(n)
    if n <= -1.0:
        raise SpecialFunctionDomainError("gauss_moment requires n > -1")
    scalar, (aa, ba) = _broadcast(a, b)
    if np.any(~(aa >= 0.0)):
        raise SpecialFunctionDomainError("gauss_moment requires a >= 0")
    out = np.empty_like(aa)
    ln_norm = float(_ln_gamma(np.array([n + 1.0]))[0]) if normalized else 0.0

    flat = aa == 0.0
    if np.any(flat):
        bf = ba[flat]
        with np.errstate(divide="ignore"):
            val = np.where(
                bf < 0.0,
                np.exp(float(_ln_gamma(np.array([n + 1.0]))[0]) - ln_norm - (n + 1.0) * np.log(np.abs(bf))),
                np.inf,
            )
        out[flat] = val

    closed = (~flat) & (ba >= 0.0)
    if np.any(closed):
        ac, bc = aa[closed], ba[closed]
        c = bc / np.sqrt(ac)
        arg = 0.25 * c * c
        h1 = 0.5 * (n + 1.0)
        h2 = 0.5 * n + 1.0
        lg1 = float(_ln_gamma(np.array([h1]))[0])
        lg2 = float(_ln_gamma(np.array([h2]))[0])
        scale = -(n + 1.0) / 2.0 * np.log(ac) - ln_norm
        with np.errstate(over="ignore", invalid="ignore"):
            first = np.exp(lg1 + scale) * kummer_1f1(h1, 0.5, arg, acc)
            second = c * np.exp(lg2 + scale) * kummer_1f1(h2, 1.5, arg, acc)
        out[closed] = 0.5 * (first + second)

    quad = (~flat) & (ba < 0.0)
    if np.any(quad):
        out[quad] = _gauss_moment_quadrature(n, aa[quad], ba[quad], normalized)
    return _finish(out, scalar)

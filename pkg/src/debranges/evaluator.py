"""Numerical evaluation of the analytic objects attached to spectral data.

Everything is built from the canonical product A(z) = prod (1 - z/t_n)
with zero set T, the Herglotz ratio of the mass measure, and Cauchy
transforms of coefficient sequences.  Magnitudes are carried in the log
domain throughout: on lacunary grids the products overflow doubles long
before the quantities of interest (ratios, phases, coefficients) do.

Conventions fixed here and used everywhere else:
  * the element with coefficients a is F(z) = A(z) sum a_n mu_n^{1/2} / (z - t_n)
    with norm ||F|| = pi ||a||_2 and inner product pi^2 sum a conj(b);
  * the Herglotz ratio uses the t/(t^2+1) regularizer; the free real
    constant r defaults to 0;
  * the phase is the increasing branch phi = atan(B/A) + pi * #{n : t_n < x},
    which places phi in (-pi/2, pi/2) left of the grid.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EvaluationAtNode,
    NoSignChange,
    PhaseBracketFailure,
)
from .spectral import CoefficientVector, SpectralData, coefficients, tail_sums

TWO_PI = 2.0 * math.pi


def _norm_phase(p: float) -> float:
    """Wrap a phase into (-pi, pi]."""
    p = math.fmod(p, TWO_PI)
    if p > math.pi:
        p -= TWO_PI
    elif p <= -math.pi:
        p += TWO_PI
    return p


@dataclass(frozen=True)
class LogComplex:
    """A nonzero complex value stored as (log modulus, phase).

    phase is normalized to (-pi, pi].  log_abs = -inf encodes an exact
    zero (phase then meaningless but kept at 0).
    """

    log_abs: float
    phase: float = 0.0

    def to_complex(self) -> complex:
        if self.log_abs == -math.inf:
            return 0j
        return cmath.exp(complex(self.log_abs, self.phase))

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_abs + other.log_abs, _norm_phase(self.phase + other.phase))

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_abs - other.log_abs, _norm_phase(self.phase - other.phase))

    @staticmethod
    def from_complex(z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(math.log(abs(z)), cmath.phase(z))

    @staticmethod
    def from_real(x: float) -> "LogComplex":
        if x == 0:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(math.log(abs(x)), 0.0 if x > 0 else math.pi)

    @property
    def real_sign(self) -> float:
        """Sign of the value assuming it is real (phase 0 or pi)."""
        return 1.0 if abs(_norm_phase(self.phase)) < math.pi / 2 else -1.0


@dataclass(frozen=True)
class SpaceElement:
    """A space element: spectral data plus basis coefficients."""

    data: SpectralData
    coeffs: CoefficientVector


def element(data: SpectralData, values) -> SpaceElement:
    vec = coefficients(values)
    if len(vec) > len(data):
        raise EvaluationAtNode("coefficient vector longer than node list")
    return SpaceElement(data, vec)


def inner_product(f: SpaceElement, g: SpaceElement) -> complex:
    """(F, G) = pi^2 sum a_n conj(b_n)."""
    a = f.coeffs.values
    b = g.coeffs.values
    n = min(len(a), len(b))
    return math.pi**2 * complex(np.sum(a[:n] * np.conj(b[:n])))


def norm(f: SpaceElement) -> float:
    return math.pi * f.coeffs.norm


# ---------------------------------------------------------------------------
# canonical product


def log_product(data: SpectralData, z: complex) -> LogComplex:
    """log of A(z) = prod_n (1 - z/t_n), accumulated with compensated sums."""
    z = complex(z)
    t = data.nodes
    w = 1.0 - z / t
    if np.any(w == 0):
        raise EvaluationAtNode(f"z={z} lies on the node grid")
    log_abs = math.fsum(np.log(np.abs(w)).tolist())
    phase = math.fsum(np.angle(w).tolist())
    return LogComplex(log_abs, _norm_phase(phase))


def log_product_grid(data: SpectralData, z: np.ndarray) -> np.ndarray:
    """log|A| on an array of points (plain summation, quadrature use)."""
    t = data.nodes
    w = 1.0 - z[..., None] / t
    return np.log(np.abs(w)).sum(axis=-1)


def product_derivative(data: SpectralData, n: int) -> LogComplex:
    """A'(t_n) as a signed log value.

    Differentiating the finite product leaves the single term
    A'(t_n) = (-1/t_n) * prod_{k != n} (1 - t_n/t_k).
    """
    t = data.nodes
    if not 0 <= n < len(t):
        raise IndexError(f"node index {n} out of range")
    w = 1.0 - t[n] / np.delete(t, n)
    log_abs = math.fsum(np.log(np.abs(w)).tolist()) - math.log(abs(t[n]))
    sign = -math.copysign(1.0, t[n]) * (-1.0 if (w < 0).sum() % 2 else 1.0)
    return LogComplex(log_abs, 0.0 if sign > 0 else math.pi)


def product_derivatives(data: SpectralData) -> tuple[np.ndarray, np.ndarray]:
    """(log|A'(t_n)|, sign) for every node at once."""
    t = data.nodes
    diff = t[:, None] / t[None, :]
    w = 1.0 - diff
    np.fill_diagonal(w, 1.0)
    log_abs = np.log(np.abs(w)).sum(axis=1) - np.log(np.abs(t))
    signs = -np.sign(t) * np.where((w < 0).sum(axis=1) % 2, -1.0, 1.0)
    return log_abs, signs


# ---------------------------------------------------------------------------
# Cauchy transforms


def cauchy_transform(elem: SpaceElement, z: complex) -> complex:
    """sum a_n mu_n^{1/2} / (z - t_n); z must avoid the node grid."""
    z = complex(z)
    t = elem.data.nodes[: len(elem.coeffs)]
    if np.any(z == t):
        raise EvaluationAtNode(f"z={z} lies on the node grid")
    w = elem.coeffs.values * np.sqrt(elem.data.masses[: len(elem.coeffs)]) / (z - t)
    return complex(math.fsum(w.real.tolist()), math.fsum(w.imag.tolist()))


def evaluate(elem: SpaceElement, z: complex) -> LogComplex:
    """F(z) = A(z) * cauchy transform; across T by the residue identity.

    At a node, F(t_n) = A'(t_n) a_n mu_n^{1/2}.
    """
    z = complex(z)
    t = elem.data.nodes
    hits = np.nonzero(z == t)[0]
    if hits.size:
        n = int(hits[0])
        a_n = elem.coeffs.values[n] if n < len(elem.coeffs) else 0.0
        if a_n == 0:
            return LogComplex(-math.inf, 0.0)
        val = LogComplex.from_complex(a_n * math.sqrt(elem.data.mu[n]))
        return product_derivative(elem.data, n) * val
    s = cauchy_transform(elem, z)
    if s == 0:
        return LogComplex(-math.inf, 0.0)
    return log_product(elem.data, z) * LogComplex.from_complex(s)


# ---------------------------------------------------------------------------
# Herglotz ratio, phase and the inner function's derivative


def herglotz(data: SpectralData, r_const: float, z: complex) -> complex:
    """B(z)/A(z) = r + (1/pi) sum (1/(t_n - z) - t_n/(t_n^2+1)) mu_n."""
    z = complex(z)
    t = data.nodes
    mu = data.masses
    if np.any(z == t):
        raise EvaluationAtNode(f"z={z} lies on the node grid")
    terms = (1.0 / (t - z) - t / (t * t + 1.0)) * mu
    return r_const + complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist())) / math.pi


def _herglotz_slope(data: SpectralData, x: float) -> float:
    """(B/A)'(x) = (1/pi) sum mu_n / (t_n - x)^2 > 0."""
    t = data.nodes
    mu = data.masses
    return math.fsum((mu / (t - x) ** 2).tolist()) / math.pi


def inner_derivative(data: SpectralData, r_const: float, x: float) -> float:
    """|Theta'(x)| on the real axis, where Theta = (1 + im)/(1 - im), m = B/A.

    Equals 2 m'(x) / (1 + m(x)^2); at a node the limit value is
    2 pi / mu_n, which is what this returns there.
    """
    x = float(x)
    t = data.nodes
    hits = np.nonzero(x == t)[0]
    if hits.size:
        return TWO_PI / data.mu[int(hits[0])]
    m = herglotz(data, r_const, x).real
    return 2.0 * _herglotz_slope(data, x) / (1.0 + m * m)


def phase(data: SpectralData, r_const: float, x: float) -> float:
    """Continuous increasing branch of arg(Theta)/2 on the real axis.

    phi(x) = atan(m(x)) + pi * #{n : t_n < x}; at a node, phi(t_n) =
    pi/2 + pi n.  Strictly increasing since phi' = |Theta'|/2 > 0.
    """
    x = float(x)
    t = data.nodes
    below = int(np.count_nonzero(t < x))
    hits = np.nonzero(x == t)[0]
    if hits.size:
        return math.pi / 2 + math.pi * below
    m = herglotz(data, r_const, x).real
    return math.atan(m) + math.pi * below


def phase_range(data: SpectralData, r_const: float) -> tuple[float, float]:
    """Open interval of attainable phase values over the stored prefix."""
    t = data.nodes
    mu = data.masses
    m_inf = r_const - math.fsum((mu * t / (t * t + 1.0)).tolist()) / math.pi
    lo = math.atan(m_inf)
    return lo, lo + math.pi * len(t)


# ---------------------------------------------------------------------------
# reproducing kernels


def kernel_coefficients(data: SpectralData, w: complex) -> CoefficientVector:
    """Coefficient vector of the reproducing kernel at w.

    a_n(k_w) = -conj(A(w)) mu_n^{1/2} / (pi^2 (t_n - conj w)), which
    follows from the nodal values B(t_n) = -mu_n A'(t_n)/pi.  For w on
    the grid the kernel collapses onto a single basis direction with
    a_n = mu_n^{1/2} A'(t_n) / pi^2.
    """
    w = complex(w)
    t = data.nodes
    mu = data.masses
    hits = np.nonzero(w == t)[0]
    if hits.size:
        n = int(hits[0])
        vals = np.zeros(len(t), dtype=complex)
        d = product_derivative(data, n)
        vals[n] = math.sqrt(mu[n]) * d.to_complex() / math.pi**2
        return coefficients(vals)
    aw = log_product(data, w).to_complex()
    vals = -np.conj(aw) * np.sqrt(mu) / (math.pi**2 * (t - np.conj(w)))
    return coefficients(vals)


def kernel_at(data: SpectralData, w: complex) -> SpaceElement:
    return SpaceElement(data, kernel_coefficients(data, w))


# ---------------------------------------------------------------------------
# Clark data


@dataclass(frozen=True)
class ClarkData:
    """Level set of the inner function at alpha with its point masses."""

    alpha: complex
    nodes: tuple
    masses: tuple
    exceptional_alpha: complex | None
    alpha_is_exceptional: bool


def _bisect_phase(data, r_const, level, lo, hi, iters=200):
    flo = phase(data, r_const, lo) - level
    fhi = phase(data, r_const, hi) - level
    if flo > 0 or fhi < 0:
        raise PhaseBracketFailure(f"level {level} not bracketed by ({lo}, {hi})")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if phase(data, r_const, mid) - level <= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def clark_data(data: SpectralData, r_const: float, alpha: complex) -> ClarkData:
    """Solve phi(x) = arg(alpha)/2 + pi n over the span of the stored grid.

    Nodes by bisection on the monotone phase; masses pi / phi'(x) =
    2 pi / |Theta'(x)|.  The possible exceptional alpha is detected from
    a finite total mass (tail model included) and reported, never used
    to forbid the computation.
    """
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-9:
        raise PhaseBracketFailure("alpha must be unimodular")
    t = data.nodes
    theta_half = cmath.phase(alpha) / 2.0
    lo_phi, hi_phi = phase_range(data, r_const)

    # exceptional value exists iff the total mass is finite
    ts = tail_sums(data)
    exceptional = None
    if ts.known and math.isfinite(ts.mass):
        mu = data.masses
        m_inf = r_const - math.fsum((mu * t / (t * t + 1.0)).tolist()) / math.pi
        exceptional = (1 + 1j * m_inf) / (1 - 1j * m_inf)
    is_exc = exceptional is not None and abs(alpha - exceptional) < 1e-8

    n_lo = math.ceil((lo_phi - theta_half) / math.pi + 1e-12)
    n_hi = math.floor((hi_phi - theta_half) / math.pi - 1e-12)
    node_phis = math.pi / 2 + math.pi * np.arange(len(t))

    found = []
    for n in range(n_lo, n_hi + 1):
        level = theta_half + math.pi * n
        j = int(np.searchsorted(node_phis, level))
        if j < len(t) and level == node_phis[j]:
            found.append(float(t[j]))
            continue
        if j == 0:
            # below the first node: expand the bracket leftward
            lo = t[0] - 1.0
            for _ in range(200):
                if phase(data, r_const, lo) < level:
                    break
                lo = t[0] - 2 * (t[0] - lo)
            else:
                raise PhaseBracketFailure("cannot bracket below the grid")
            found.append(_bisect_phase(data, r_const, level, lo, float(np.nextafter(t[0], -math.inf))))
        elif j == len(t):
            hi = t[-1] + 1.0
            for _ in range(200):
                if phase(data, r_const, hi) > level:
                    break
                hi = t[-1] + 2 * (hi - t[-1])
            else:
                raise PhaseBracketFailure("cannot bracket beyond the grid")
            found.append(_bisect_phase(data, r_const, level, float(np.nextafter(t[-1], math.inf)), hi))
        else:
            found.append(_bisect_phase(data, r_const, level, t[j - 1], t[j]))
    masses = [TWO_PI / inner_derivative(data, r_const, x) for x in found]
    return ClarkData(alpha, tuple(found), tuple(masses), exceptional, is_exc)


# ---------------------------------------------------------------------------
# real roots of Cauchy transforms


def _cauchy_sum(t, c, x):
    return math.fsum((c / (x - t)).tolist())


def find_real_roots(data: SpectralData, signed_coeffs, bracket, samples: int = 257) -> list:
    """All roots of sum c_n/(x - t_n) inside (u, v).

    The bracket is split at interior nodes; each node-free piece is
    scanned for sign changes and every change is refined by bisection
    with a safeguarded Newton polish.  Raises NoSignChange when the
    bracket contains no root; a missing root is reported, not invented.
    """
    t = data.nodes
    c = np.asarray(signed_coeffs, dtype=float)
    if len(c) != len(t):
        raise NoSignChange("coefficient vector must match the node list")
    u, v = float(bracket[0]), float(bracket[1])
    if not u < v:
        raise NoSignChange(f"empty bracket ({u}, {v})")
    cuts = [u] + [x for x in t if u < x < v] + [v]
    roots = []
    for left, right in zip(cuts, cuts[1:]):
        width = right - left
        pad = 1e-12 * max(1.0, abs(left), abs(right))
        pad = min(pad, 0.25 * width)
        xs = np.linspace(left + pad, right - pad, samples)
        vals = np.array([_cauchy_sum(t, c, x) for x in xs])
        sign = np.sign(vals)
        for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
            roots.append(_refine_root(t, c, xs[i], xs[i + 1]))
        for i in np.nonzero(vals == 0.0)[0]:
            roots.append(float(xs[i]))
    if not roots:
        raise NoSignChange(f"no sign change of the transform inside ({u}, {v})")
    return sorted(roots)


def _refine_root(t, c, lo, hi, iters=200):
    """Bisection with Newton polish; scale-invariant stopping rule."""
    flo = _cauchy_sum(t, c, lo)
    x = 0.5 * (lo + hi)
    for _ in range(iters):
        x = 0.5 * (lo + hi)
        fx = _cauchy_sum(t, c, x)
        if fx == 0.0:
            break
        if flo * fx < 0:
            hi = x
        else:
            lo, flo = x, fx
        if hi - lo <= 1e-15 * max(1.0, abs(x)):
            break
    # safeguarded Newton: derivative is -sum c/(x-t)^2
    for _ in range(3):
        fx = _cauchy_sum(t, c, x)
        dfx = -math.fsum((c / (x - t) ** 2).tolist())
        if dfx == 0:
            break
        step = fx / dfx
        x_new = x - step
        if not lo < x_new < hi:
            break
        x = x_new
    dist = np.min(np.abs(x - t))
    scale = math.fsum((np.abs(c)).tolist()) / max(dist, 1e-300)
    if abs(_cauchy_sum(t, c, x)) > 1e-9 * scale:
        raise NoSignChange(f"refinement stalled near x={x}")
    return float(x)

"""Closed-form outage results for the two-way IRS link.

Partial-fraction coefficients, the cascade-channel PDF and power CDF in both
the general (distinct amplitudes) and constant-amplitude regimes, per-user
and system outage probability, the large-N approximation, and a half-duplex
one-way baseline.

The partial-fraction sum is alternating with coefficients that grow roughly
like exp(0.6 N) for smooth amplitude profiles, so double precision runs out
of digits near N ~ 20. Every evaluation therefore tracks the magnitude sum
of its terms and transparently re-evaluates the same formula in mpmath with
enough working digits whenever cancellation would eat the answer. Results
are deterministic either way.
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import mpmath as mp
import numpy as np

from . import model, specfun
from .model import Direction

_EPS = 2.220446049250313e-16
_DEGENERATE_REL_SEP = 1e-9
_CONSTANT_AMP_REL_TOL = 1e-12
_CLAMP_TOL = 1e-12
# double path is trusted while est. rounding error <= max(ABS_FLOOR, |S|*REL)
_ESCALATE_ABS_FLOOR = 1e-14
_ESCALATE_REL = 1e-10


class Regime(enum.Enum):
    GENERAL = "general"
    CONSTANT_AMPLITUDE = "constant_amplitude"


class DegeneratePoles(ValueError):
    """Two pole coefficients coincide below the supported relative separation.

    The partial-fraction closed form is singular there; callers should use
    the constant-amplitude regime (all amplitudes equal) or the quadrature
    oracle fallback (oracle.cdf_via_quadrature / --oracle-fallback).
    """

    def __init__(self, i, j, a_i, a_j):
        self.pair = (i, j)
        super().__init__(
            f"poles {i} and {j} coincide (a[{i}]={a_i!r}, a[{j}]={a_j!r}, "
            f"relative separation < {_DEGENERATE_REL_SEP}); use the "
            "constant-amplitude regime or the quadrature oracle fallback"
        )


class ConsistencyError(ArithmeticError):
    """A probability left [0,1] by more than floating-point noise."""


@dataclass(frozen=True, eq=False)
class CascadeDistribution:
    """Precomputed description of one direction's cascade |z| distribution.

    General regime: poles a_i with partial-fraction coefficients C_i held in
    sign/log-magnitude form (pf_coeffs is their float rendering). Constant
    regime: a single common pole; pf_coeffs is unused.
    """

    poles: np.ndarray
    pf_coeffs: np.ndarray
    sigma_product: float
    regime: Regime
    n_elements: int
    pf_signs: np.ndarray
    pf_logs: np.ndarray

    @property
    def condition_estimate(self):
        """max |C_i a_i|: how much cancellation the partial-fraction sum hides."""
        if self.regime is Regime.CONSTANT_AMPLITUDE:
            return 1.0
        return float(np.exp(np.max(self.pf_logs + np.log(self.poles))))


def partial_fraction_coeffs(poles):
    """Coefficients C_i = a_i^(N-2) / prod_{j!=i} (a_i - a_j) as floats.

    The empty product is 1, so a single pole gives [1/a]. Raises
    DegeneratePoles when some pair sits closer than relative separation 1e-9.
    """
    signs, logs = _pf_sign_log(np.asarray(poles, dtype=float))
    with np.errstate(over="ignore"):
        return signs * np.exp(logs)


def _pf_sign_log(a):
    """Signs and log-magnitudes of the partial-fraction coefficients."""
    if a.ndim != 1 or a.size < 1:
        raise ValueError("poles must be a nonempty one-dimensional vector")
    if not np.all(np.isfinite(a)) or np.any(a <= 0.0):
        raise ValueError("poles must be positive finite reals")
    n = a.size
    order = np.argsort(a)
    a_sorted = a[order]
    rel_sep = np.diff(a_sorted) / a_sorted[1:]
    bad = np.nonzero(rel_sep < _DEGENERATE_REL_SEP)[0]
    if bad.size:
        k = bad[0]
        i, j = int(order[k]), int(order[k + 1])
        raise DegeneratePoles(i, j, a[i], a[j])
    diff = a[:, None] - a[None, :]
    np.fill_diagonal(diff, 1.0)
    signs = np.prod(np.sign(diff), axis=1)
    logs = (n - 2) * np.log(a) - np.sum(np.log(np.abs(diff)), axis=1)
    return signs, logs


def detect_regime(amplitudes):
    """CONSTANT_AMPLITUDE iff all nonzero amplitudes agree within 1e-12 relative."""
    amps = np.asarray(amplitudes, dtype=float)
    nonzero = amps[amps > 0.0]
    if nonzero.size == 0:
        raise model.ZeroCascadeError(
            "all IRS amplitudes are zero; outage is 1 for any positive threshold"
        )
    lo, hi = nonzero.min(), nonzero.max()
    if hi - lo <= _CONSTANT_AMP_REL_TOL * hi:
        return Regime.CONSTANT_AMPLITUDE
    return Regime.GENERAL


def build_distribution(scenario, direction):
    """Cascade distribution of |z| for one direction of a valid scenario."""
    model.ensure_valid(scenario)
    poles = model.pole_coefficients(scenario.channels, scenario.irs, direction)
    regime = detect_regime(scenario.irs.amplitudes)
    sigma = model.sigma_product(scenario.channels, direction)
    if regime is Regime.CONSTANT_AMPLITUDE:
        n = poles.size
        common = float(np.mean(poles))
        poles = np.array([common] * n)
        signs = np.zeros(n)
        logs = np.full(n, -np.inf)
        coeffs = np.zeros(n)
    else:
        signs, logs = _pf_sign_log(poles)
        with np.errstate(over="ignore"):
            coeffs = signs * np.exp(logs)
    for arr in (poles, coeffs, signs, logs):
        arr.flags.writeable = False
    return CascadeDistribution(
        poles=poles,
        pf_coeffs=coeffs,
        sigma_product=sigma,
        regime=regime,
        n_elements=int(poles.size),
        pf_signs=signs,
        pf_logs=logs,
    )


def _needs_mp(total_mag, signed_sum):
    err = total_mag * _EPS * 8.0
    return err > max(_ESCALATE_ABS_FLOOR, abs(signed_sum) * _ESCALATE_REL)


def _mp_dps_for(total_mag):
    return 30 + max(0, int(math.log10(total_mag)) + 12) if total_mag > 0 else 30


def _k1_bracket(u):
    """(1 - u K1(u)) / 2 without cancellation; the CDF kernel per pole.

    Series form below u = 1: 1 - u K1(u) = (u^2/4) A(u) - u (ln(u/2)+gamma) I1(u)
    with A and I1 the ascending sums of the K1 expansion.
    """
    if u == 0.0:
        return 0.0
    if u >= 1.0:
        return 0.5 * (1.0 - u * specfun.bessel_k1(u))
    t = 0.25 * u * u
    term = 1.0
    b = 1.0
    a_sum = 1.0
    hk, hk1 = 0.0, 1.0
    for k in range(1, 30):
        term *= t / (k * (k + 1))
        hk += 1.0 / k
        hk1 += 1.0 / (k + 1)
        b += term
        a_sum += term * (hk + hk1)
        if term * (hk + hk1 + 1.0) < 1e-18 * a_sum:
            break
    i1 = 0.5 * u * b
    return 0.5 * (t * a_sum - u * (math.log(0.5 * u) + 0.5772156649015328606065121) * i1)


def _mp_pf_coeffs(poles):
    a = [mp.mpf(float(p)) for p in poles]
    n = len(a)
    coeffs = []
    for i in range(n):
        prod = mp.mpf(1)
        for j in range(n):
            if j != i:
                prod *= a[i] - a[j]
        coeffs.append(a[i] ** (n - 2) / prod)
    return a, coeffs


def cascade_pdf(dist, r):
    """Density of the cascade magnitude |z| at r >= 0.

    General regime: r * sum_i C_i K0(r / sqrt(a_i)); constant regime:
    4 r^N / (Gamma(N) b^(N+1)) K_{N-1}(2 r / b) with b = 2 sqrt(a), evaluated
    in log space.
    """
    if not (isinstance(r, (int, float)) and math.isfinite(r)):
        raise ValueError(f"r must be a finite real, got {r!r}")
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r!r}")
    if r == 0.0:
        return 0.0
    if dist.regime is Regime.CONSTANT_AMPLITUDE:
        return _pdf_constant(dist, float(r))
    return _pdf_general(dist, float(r))


def _pdf_constant(dist, r):
    n = dist.n_elements
    b = 2.0 * math.sqrt(float(dist.poles[0]))
    ln_value = (
        math.log(4.0) + n * math.log(r) - specfun.ln_gamma(n)
        - (n + 1) * math.log(b) + specfun.bessel_kn_log(n - 1, 2.0 * r / b)
    )
    return math.exp(ln_value) if ln_value > -745.0 else 0.0


def _pdf_general(dist, r):
    signed = 0.0
    total = 0.0
    for sign, logc, a in zip(dist.pf_signs, dist.pf_logs, dist.poles):
        ln_term = logc + specfun.bessel_kn_log(0, r / math.sqrt(a))
        if ln_term < -745.0:
            continue
        term = math.exp(ln_term)
        signed += sign * term
        total += term
    if _needs_mp(total, signed):
        return _pdf_general_mp(dist, r, total)
    return r * signed


def _pdf_general_mp(dist, r, total_mag):
    with mp.workdps(_mp_dps_for(total_mag)):
        a, coeffs = _mp_pf_coeffs(dist.poles)
        acc = mp.mpf(0)
        for ai, ci in zip(a, coeffs):
            acc += ci * mp.besselk(0, r / mp.sqrt(ai))
        return float(r * acc)


def cascade_power_cdf(dist, xi):
    """CDF of the cascade power |z|^2 at xi >= 0.

    General regime: sum_i 2 C_i a_i [1/2 - (sqrt(xi)/(2 sqrt(a_i)))
    K1(sqrt(xi)/sqrt(a_i))]; constant regime:
    1 - (2/Gamma(N)) (z/2)^N K_N(z) with z = sqrt(xi/a), via expm1 in log
    space. Clamps sub-1e-12 excursions outside [0,1]; larger ones raise
    ConsistencyError.
    """
    if not (isinstance(xi, (int, float)) and math.isfinite(xi)):
        raise ValueError(f"xi must be a finite real, got {xi!r}")
    if xi < 0:
        raise ValueError(f"xi must be nonnegative, got {xi!r}")
    if xi == 0.0:
        return 0.0
    if dist.regime is Regime.CONSTANT_AMPLITUDE:
        value = _cdf_constant(dist, float(xi))
    else:
        value = _cdf_general(dist, float(xi))
    return _clamp_probability(value)


def _clamp_probability(value):
    if value < 0.0:
        if value >= -_CLAMP_TOL:
            return 0.0
        raise ConsistencyError(f"probability fell below 0 by {-value}")
    if value > 1.0:
        if value <= 1.0 + _CLAMP_TOL:
            return 1.0
        raise ConsistencyError(f"probability exceeded 1 by {value - 1.0}")
    return value


def _cdf_constant(dist, xi):
    n = dist.n_elements
    z = math.sqrt(xi / float(dist.poles[0]))
    s = (
        math.log(2.0) + n * math.log(0.5 * z) - specfun.ln_gamma(n)
        + specfun.bessel_kn_log(n, z)
    )
    if s < -745.0:
        return 1.0
    return -math.expm1(min(s, 0.0)) if s <= 0.0 else 1.0 - math.exp(s)


def _cdf_general(dist, xi):
    sq = math.sqrt(xi)
    signed = 0.0
    total = 0.0
    for sign, logc, a in zip(dist.pf_signs, dist.pf_logs, dist.poles):
        bracket = _k1_bracket(sq / math.sqrt(a))
        if bracket == 0.0:
            continue
        term = math.exp(logc + math.log(a) + math.log(2.0 * bracket))
        signed += sign * term
        total += term
    if _needs_mp(total, signed):
        return _cdf_general_mp(dist, xi, total)
    return signed


def _cdf_general_mp(dist, xi, total_mag):
    with mp.workdps(_mp_dps_for(total_mag)):
        a, coeffs = _mp_pf_coeffs(dist.poles)
        sq = mp.sqrt(mp.mpf(xi))
        acc = mp.mpf(0)
        for ai, ci in zip(a, coeffs):
            u = sq / mp.sqrt(ai)
            acc += 2 * ci * ai * (mp.mpf(1) / 2 - (u / 2) * mp.besselk(1, u))
        return float(acc)


def pf_total_mass(dist):
    """sum_i C_i a_i, which the decomposition forces to be exactly 1."""
    if dist.regime is Regime.CONSTANT_AMPLITUDE:
        return 1.0
    logs = dist.pf_logs + np.log(dist.poles)
    signed = float(np.sum(dist.pf_signs * np.exp(logs - logs.max())))
    total = float(np.sum(np.exp(logs - logs.max())))
    scale = math.exp(logs.max())
    if _needs_mp(total * scale, signed * scale):
        with mp.workdps(_mp_dps_for(total * scale)):
            a, coeffs = _mp_pf_coeffs(dist.poles)
            return float(mp.fsum(ci * ai for ci, ai in zip(coeffs, a)))
    return signed * scale


@dataclass(frozen=True)
class OutageReport:
    p_user1: float
    p_user2: float
    p_system: float
    gamma_prime_1: float
    gamma_prime_2: float
    approx_system: Optional[float]
    regime: Regime


def outage_user(scenario, direction):
    """Outage probability of the direction's receiving user (Theorem-style
    CDF evaluation at the user's equivalent threshold)."""
    dist = build_distribution(scenario, direction)
    gamma_prime = model.equivalent_threshold(scenario.receiving_user(direction))
    return cascade_power_cdf(dist, gamma_prime)


def outage_system(scenario):
    """Both per-user outages and their union combination as an OutageReport.

    The two directions use independent cascade channels (h_r, g_t) and
    (g_r, h_t), so the system outage is p1 + p2 - p1 p2.
    """
    model.ensure_valid(scenario)
    dist1 = build_distribution(scenario, Direction.U1_RECEIVES)
    dist2 = build_distribution(scenario, Direction.U2_RECEIVES)
    g1 = model.equivalent_threshold(scenario.user1)
    g2 = model.equivalent_threshold(scenario.user2)
    p1 = cascade_power_cdf(dist1, g1)
    p2 = cascade_power_cdf(dist2, g2)
    approx = None
    if dist1.regime is Regime.CONSTANT_AMPLITUDE and dist1.n_elements >= 2:
        approx = outage_approx(scenario)
    return OutageReport(
        p_user1=p1,
        p_user2=p2,
        p_system=p1 + p2 - p1 * p2,
        gamma_prime_1=g1,
        gamma_prime_2=g2,
        approx_system=approx,
        regime=dist1.regime,
    )


def outage_approx_user(scenario, direction):
    """Large-N per-user approximation gamma' / (N - 1) (constant amplitudes)."""
    n = _approx_n(scenario)
    return model.equivalent_threshold(scenario.receiving_user(direction)) / (n - 1)


def outage_approx(scenario):
    """Large-N system approximation (g1' + g2' - g1' g2') / (N - 1), as printed.

    Note the cross term is carried over (N-1), not (N-1)^2 as the per-user
    expansion would give; both agree to the approximation's order.
    """
    n = _approx_n(scenario)
    g1 = model.equivalent_threshold(scenario.user1)
    g2 = model.equivalent_threshold(scenario.user2)
    return (g1 + g2 - g1 * g2) / (n - 1)


def _approx_n(scenario):
    model.ensure_valid(scenario)
    if detect_regime(scenario.irs.amplitudes) is not Regime.CONSTANT_AMPLITUDE:
        raise ValueError("the large-N approximation requires constant amplitudes")
    n = int(np.count_nonzero(np.asarray(scenario.irs.amplitudes) > 0.0))
    if n < 2:
        raise ValueError("the large-N approximation requires at least 2 elements")
    return n


def one_way_outage(scenario):
    """Half-duplex baseline: each direction gets its own slot at doubled
    target rate and zero loop-interference residual; directions combine as
    the same union event."""
    model.ensure_valid(scenario)
    probs = []
    for direction in (Direction.U1_RECEIVES, Direction.U2_RECEIVES):
        user = scenario.receiving_user(direction)
        dist = build_distribution(scenario, direction)
        gamma_t = model.snr_threshold(2.0 * user.target_rate)
        probs.append(cascade_power_cdf(dist, gamma_t / user.transmit_snr))
    p1, p2 = probs
    return p1 + p2 - p1 * p2

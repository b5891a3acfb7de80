"""Asymptotic secret key rates for Gaussian-modulated coherent-state CV-QKD.

Reverse reconciliation with a single-quadrature (homodyne) receiver whose
imperfections are trusted: detection efficiency ``eta`` and electrical noise
``nu_el``.  All variances are in shot-noise units (SNU) and the excess noise
``eps`` is referred to the channel input.

Two eavesdropper models are covered:

* individual attacks, leakage bounded by the Shannon information ``I_BE``;
* collective attacks, leakage bounded by the Holevo quantity ``chi_BE``
  computed from four symplectic eigenvalues.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import InfeasibleLinkError, NumericalDomainError, ParameterError
from .search import bisect_decreasing, golden_section_max

# Negative discriminants / eigenvalue deficits smaller than this are round-off.
DISCRIMINANT_TOL = 1e-9
EIGENVALUE_TOL = 1e-9
# |SKR| at the returned excess-noise threshold, bits/symbol.
BISECTION_TOL = 1e-9
# Golden-section width on log10(v_a); far below 1e-6 bits/symbol in SKR.
GOLDEN_TOL = 1e-6
V_A_BRACKET = (1e-3, 1e3)
DEFAULT_SYMBOL_RATE_HZ = 1e9


class Attack(str, enum.Enum):
    INDIVIDUAL = "individual"
    COLLECTIVE = "collective"


@dataclass(frozen=True)
class ProtocolParams:
    """Alice's modulation variance ``v_a`` (SNU) and reconciliation efficiency."""

    v_a: float
    beta: float = 1.0

    def __post_init__(self) -> None:
        # v_a = 0 is accepted as the no-modulation limit (I_AB = 0).
        if not (math.isfinite(self.v_a) and self.v_a >= 0.0):
            raise ParameterError(f"v_a must be finite and >= 0, got {self.v_a}")
        if not (0.0 < self.beta <= 1.0):
            raise ParameterError(f"beta must lie in (0, 1], got {self.beta}")

    @property
    def v(self) -> float:
        return self.v_a + 1.0


@dataclass(frozen=True)
class LinkParams:
    t: float
    eps: float = 0.0
    eta: float = 1.0
    nu_el: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.t <= 1.0):
            raise ParameterError(f"t must lie in (0, 1], got {self.t}")
        if not (math.isfinite(self.eps) and self.eps >= 0.0):
            raise ParameterError(f"eps must be finite and >= 0, got {self.eps}")
        if not (0.0 < self.eta <= 1.0):
            raise ParameterError(f"eta must lie in (0, 1], got {self.eta}")
        if not (math.isfinite(self.nu_el) and self.nu_el >= 0.0):
            raise ParameterError(f"nu_el must be finite and >= 0, got {self.nu_el}")

    def with_eps(self, eps: float) -> "LinkParams":
        return replace(self, eps=eps)


@dataclass(frozen=True)
class NoiseBreakdown:
    chi_line: float
    chi_hom: float
    chi_tot: float


@dataclass(frozen=True)
class EigenIntermediates:
    a_term: float
    b_term: float
    c_term: float
    d_term: float
    lambdas: tuple[float, float, float, float]


@dataclass(frozen=True)
class SkrResult:
    i_ab: float
    leak_eve: float
    skr_per_symbol: float
    attack_model: Attack

    @property
    def positive_key(self) -> bool:
        return self.skr_per_symbol > 0.0


def chi_line(link: LinkParams) -> float:
    # Excess noise adds to the channel noise; it must never lower the rate.
    return 1.0 / link.t - 1.0 + link.eps


def chi_hom(link: LinkParams) -> float:
    return (1.0 + link.nu_el) / link.eta - 1.0


def chi_tot(link: LinkParams) -> NoiseBreakdown:
    """Channel, detector and total input-referred added noise."""
    line = chi_line(link)
    hom = chi_hom(link)
    return NoiseBreakdown(line, hom, line + hom / link.t)


def mutual_info_ab(proto: ProtocolParams, link: LinkParams) -> float:
    tot = chi_tot(link).chi_tot
    return 0.5 * math.log2((proto.v + tot) / (1.0 + tot))


def eve_info_individual(proto: ProtocolParams, link: LinkParams) -> float:
    """Shannon information between Bob's data and Eve's best individual estimate.

    Ratio of Bob's measured variance to Eve's conditional variance on it.
    """
    noise = chi_tot(link)
    v = proto.v
    v_b = link.eta * link.t * (v + noise.chi_tot)
    v_b_given_e = link.eta * (1.0 / (link.t * (1.0 / v + noise.chi_line)) + noise.chi_hom)
    return max(0.5 * math.log2(v_b / v_b_given_e), 0.0)


def g_func(x: float) -> float:
    """Von Neumann entropy (bits) of a thermal state with mean photon number x."""
    if x < 0.0:
        raise ParameterError(f"g_func requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    return (x + 1.0) * math.log2(x + 1.0) - x * math.log2(x)


def _half_root_pair(s: float, p: float, label: str) -> tuple[float, float]:
    # Roots of z^2 - s z + p; returns sqrt of each root.
    disc = s * s - 4.0 * p
    if disc < 0.0:
        if disc < -DISCRIMINANT_TOL:
            raise NumericalDomainError(
                f"{label} discriminant {disc:.3e} < 0: non-physical covariance state")
        disc = 0.0
    root = math.sqrt(disc)
    hi = 0.5 * (s + root)
    # Product of the roots is p; avoids cancellation in (s - root) / 2.
    lo = p / hi if hi > 0.0 else 0.0
    if lo < 0.0:
        raise NumericalDomainError(f"{label}: negative squared eigenvalue {lo:.3e}")
    return math.sqrt(hi), math.sqrt(lo)


def symplectic_eigenvalues(proto: ProtocolParams, link: LinkParams) -> EigenIntermediates:
    """Intermediates A, B, C, D and the four symplectic eigenvalues.

    A = V^2 (1 - 2T) + 2T + T^2 (V + chi_line)^2 and B = T^2 (V chi_line + 1)^2
    are evaluated after substituting chi_line = 1/T - 1 + eps, which turns
    both into sums of nonnegative terms; the textbook form loses up to ~1e-12
    relative accuracy to cancellation of the V^2 terms when T is near 1.
    """
    v, u, t, eps = proto.v, proto.v_a, link.t, link.eps
    hom = chi_hom(link)
    t_v_line = 1.0 + t * (u + eps)  # T (V + chi_line)
    sqrt_b = v * (1.0 - t + t * eps) + t
    a = 1.0 + (1.0 + u * (1.0 - t)) ** 2 + t * eps * (2.0 + 2.0 * t * u + t * eps)
    b = sqrt_b * sqrt_b
    denom = t_v_line + hom  # T (V + chi_tot)
    c = (v * sqrt_b + t_v_line + a * hom) / denom
    d = sqrt_b * (v + sqrt_b * hom) / denom
    l1, l2 = _half_root_pair(a, b, "lambda_1,2")
    l3, l4 = _half_root_pair(c, d, "lambda_3,4")
    lambdas = (l1, l2, l3, l4)
    for lam in lambdas:
        if lam < 1.0 - EIGENVALUE_TOL:
            raise NumericalDomainError(f"symplectic eigenvalue {lam!r} < 1")
    return EigenIntermediates(a, b, c, d, lambdas)


def _g_of_eigenvalue(lam: float) -> float:
    return g_func(max((lam - 1.0) / 2.0, 0.0))


def holevo_bound(proto: ProtocolParams, link: LinkParams) -> float:
    """Holevo information between Bob and Eve, chi_BE = S(E) - S(E|B)."""
    l1, l2, l3, l4 = symplectic_eigenvalues(proto, link).lambdas
    chi = (_g_of_eigenvalue(l1) + _g_of_eigenvalue(l2)
           - _g_of_eigenvalue(l3) - _g_of_eigenvalue(l4))
    if chi < 0.0:
        if chi < -DISCRIMINANT_TOL:
            raise NumericalDomainError(f"negative Holevo bound {chi:.3e}")
        chi = 0.0
    return chi


def secret_key_rate(proto: ProtocolParams, link: LinkParams,
                    attack: Attack = Attack.COLLECTIVE) -> SkrResult:
    """Reverse-reconciliation key rate, bits/symbol; negative means no key."""
    attack = Attack(attack)
    i_ab = mutual_info_ab(proto, link)
    if attack is Attack.INDIVIDUAL:
        leak = eve_info_individual(proto, link)
    else:
        leak = holevo_bound(proto, link)
    return SkrResult(i_ab, leak, proto.beta * i_ab - leak, attack)


def skr_bits_per_second(result: SkrResult, symbol_rate: float = DEFAULT_SYMBOL_RATE_HZ) -> float:
    if not (math.isfinite(symbol_rate) and symbol_rate > 0.0):
        raise ParameterError(f"symbol_rate must be > 0, got {symbol_rate}")
    return max(result.skr_per_symbol, 0.0) * symbol_rate


@dataclass(frozen=True)
class ModulationOptimum:
    params: ProtocolParams
    skr_per_symbol: float
    at_bracket_edge: bool
    positive_key: bool


def optimize_modulation_variance(link: LinkParams, beta: float = 1.0,
                                 attack: Attack = Attack.COLLECTIVE,
                                 bracket: tuple[float, float] = V_A_BRACKET,
                                 n_scan: int = 61) -> ModulationOptimum:
    """Choose v_a maximising the key rate on a log-spaced bracket.

    A coarse scan over log10(v_a) picks the best cell, then golden-section
    search refines within its two neighbours.  When the rate keeps growing
    towards an end of the bracket that end is returned with
    ``at_bracket_edge`` set.  If no v_a gives a positive rate the argmax is
    still returned, with ``positive_key`` False.
    """
    ProtocolParams(1.0, beta)  # validates beta
    lo, hi = math.log10(bracket[0]), math.log10(bracket[1])

    def rate(log_va: float) -> float:
        return secret_key_rate(ProtocolParams(10.0 ** log_va, beta), link, attack).skr_per_symbol

    step = (hi - lo) / (n_scan - 1)
    grid = [lo + i * step for i in range(n_scan)]
    values = [rate(x) for x in grid]
    best = max(range(n_scan), key=values.__getitem__)
    left, right = grid[max(best - 1, 0)], grid[min(best + 1, n_scan - 1)]
    x_opt, f_opt = golden_section_max(rate, left, right, tol=GOLDEN_TOL)
    for edge in (lo, hi):
        f_edge = rate(edge)
        if f_edge >= f_opt:
            x_opt, f_opt = edge, f_edge
    at_edge = abs(x_opt - lo) < 2 * GOLDEN_TOL or abs(x_opt - hi) < 2 * GOLDEN_TOL
    return ModulationOptimum(ProtocolParams(10.0 ** x_opt, beta), f_opt, at_edge, f_opt > 0.0)


def max_tolerable_excess_noise(proto: ProtocolParams, link: LinkParams,
                               attack: Attack = Attack.COLLECTIVE) -> float:
    """Excess noise (SNU) at which the key rate reaches zero.

    ``link.eps`` is ignored.  The key rate decreases strictly with eps, so the
    threshold is unique and is found by bisection to |SKR| < 1e-9 bits/symbol.
    """
    def rate(eps: float) -> float:
        return secret_key_rate(proto, link.with_eps(eps), attack).skr_per_symbol

    if rate(0.0) <= 0.0:
        raise InfeasibleLinkError("no positive key even without excess noise")
    hi = 1.0
    while rate(hi) > 0.0:
        hi *= 2.0
        if hi > 1e9:
            raise NumericalDomainError("could not bracket the excess-noise threshold")
    return bisect_decreasing(rate, 0.0, hi, ftol=BISECTION_TOL)

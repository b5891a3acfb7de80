"""Guard-band allocation of CV-QKD channels and aggregate throughput.

QKD channels sit in the guard bands of a classical WDM grid: one band
between each pair of neighbouring carriers plus one band outside each
outermost carrier, so a grid of ``n`` carriers offers ``n + 1`` bands.
Frequencies are in GHz, wavelengths in nm.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from .errors import InfeasibleLinkError, ParameterError
from .noise import CrosstalkModel, WavelengthNoiseTable, eps_at_wavelength, eval_excess_noise
from .search import bisect_decreasing
from .skr import (
    DEFAULT_SYMBOL_RATE_HZ,
    Attack,
    LinkParams,
    ProtocolParams,
    SkrResult,
    max_tolerable_excess_noise,
    optimize_modulation_variance,
    secret_key_rate,
    skr_bits_per_second,
)

# Speed of light expressed as nm * GHz (exact).
C_NM_GHZ = 299_792_458.0
MAX_LAUNCH_POWER_TOL_DB = 0.01
POWER_SEARCH_RANGE_DBM = (-100.0, 60.0)


def ghz_to_nm(f_ghz: float) -> float:
    return C_NM_GHZ / f_ghz


def nm_to_ghz(wavelength_nm: float) -> float:
    return C_NM_GHZ / wavelength_nm


@dataclass(frozen=True)
class ClassicalGrid:
    n_channels: int = 30
    spacing_ghz: float = 100.0
    symbol_rate_gbd: float = 24.5
    bits_per_symbol: int = 8  # PM-16QAM: 4 bits x 2 polarisations
    band_nm: tuple[float, float] = (1537.0, 1563.0)
    # Carrier `anchor_index` (0 = lowest frequency) sits at `anchor_nm`.
    anchor_nm: float = 1550.35
    anchor_index: int = 14

    def __post_init__(self) -> None:
        if self.n_channels < 0:
            raise ParameterError(f"n_channels must be >= 0, got {self.n_channels}")
        if not self.symbol_rate_gbd > 0.0:
            raise ParameterError("symbol_rate_gbd must be > 0")
        if not self.spacing_ghz > self.symbol_rate_gbd:
            raise ParameterError(
                f"spacing {self.spacing_ghz} GHz must exceed occupied width {self.symbol_rate_gbd} GHz")
        if self.band_nm[0] >= self.band_nm[1]:
            raise ParameterError("band_nm must be (short, long)")

    @property
    def occupied_ghz(self) -> float:
        # No roll-off: occupied width equals the symbol rate.
        return self.symbol_rate_gbd

    @property
    def guard_band_ghz(self) -> float:
        return self.spacing_ghz - self.occupied_ghz

    def carrier_ghz(self, index: int) -> float:
        """Carrier frequency; indices -1 and n_channels give the virtual outer neighbours."""
        return nm_to_ghz(self.anchor_nm) + (index - self.anchor_index) * self.spacing_ghz

    def carriers_ghz(self) -> list[float]:
        return [self.carrier_ghz(i) for i in range(self.n_channels)]


@dataclass(frozen=True)
class QkdGrid:
    channel_bw_ghz: float = 1.0
    slot_ghz: float = 5.0
    # Cap on slots per guard band; None keeps the geometric count.
    max_slots_per_band: int | None = 11

    def __post_init__(self) -> None:
        if not (self.channel_bw_ghz > 0.0 and self.slot_ghz >= self.channel_bw_ghz):
            raise ParameterError("need 0 < channel_bw_ghz <= slot_ghz")
        if self.max_slots_per_band is not None and self.max_slots_per_band < 0:
            raise ParameterError("max_slots_per_band must be >= 0")

    def slots_per_band_raw(self, cg: ClassicalGrid) -> int:
        # Tiny epsilon keeps exact multiples (e.g. 25.0 / 5.0) from rounding down.
        return max(int(math.floor(cg.guard_band_ghz / self.slot_ghz + 1e-9)), 0)

    def slots_per_band(self, cg: ClassicalGrid) -> int:
        raw = self.slots_per_band_raw(cg)
        if self.max_slots_per_band is None:
            return raw
        return min(raw, self.max_slots_per_band)


@dataclass(frozen=True)
class CoreLayout:
    n_qkd_cores: int = 6
    n_classical_cores: int = 3
    total_cores: int = 19
    center_excluded: bool = True

    def __post_init__(self) -> None:
        used = self.n_qkd_cores + self.n_classical_cores + (1 if self.center_excluded else 0)
        if min(self.n_qkd_cores, self.n_classical_cores) < 0 or used > self.total_cores:
            raise ParameterError(
                f"core layout uses {used} cores but the fibre has {self.total_cores}")


@dataclass(frozen=True)
class SpectrumPlan:
    slot_centers_ghz: tuple[float, ...]
    bands: int
    slots_per_band: int
    slots_per_band_raw: int
    channels: int
    guard_band_ghz: float
    slots_within_band: bool
    per_channel_skr_bps: float | None = None
    aggregate_skr_bps: float | None = None
    classical_bps: float | None = None

    def slot_wavelengths_nm(self) -> list[float]:
        return [ghz_to_nm(f) for f in self.slot_centers_ghz]

    def to_dict(self, include_slots: bool = True) -> dict:
        d = asdict(self)
        d["slot_centers_ghz"] = list(self.slot_centers_ghz) if include_slots else None
        if include_slots:
            d["slot_wavelengths_nm"] = self.slot_wavelengths_nm()
        return d


def allocate_qkd_slots(cg: ClassicalGrid, qg: QkdGrid) -> SpectrumPlan:
    """Fill every guard band with a centred block of equally spaced QKD slots.

    Outer bands are laid out as if a further carrier sat one spacing beyond
    the outermost classical channel, so they hold as many slots as an inner
    band.  A guard band narrower than one slot gives an empty plan.
    """
    bands = cg.n_channels + 1 if cg.n_channels >= 1 else 0
    raw = qg.slots_per_band_raw(cg)
    per_band = qg.slots_per_band(cg)
    centers: list[float] = []
    for band in range(bands):
        guard_center = cg.carrier_ghz(band - 1) + 0.5 * cg.spacing_ghz
        for i in range(per_band):
            centers.append(guard_center + (i - 0.5 * (per_band - 1)) * qg.slot_ghz)
    short_nm, long_nm = cg.band_nm
    within = all(nm_to_ghz(long_nm) <= f <= nm_to_ghz(short_nm) for f in centers)
    return SpectrumPlan(tuple(centers), bands, per_band, raw, bands * per_band,
                        cg.guard_band_ghz, within)


def aggregate_skr(plan: SpectrumPlan, per_channel_skr_bps: float | Sequence[float],
                  n_qkd_cores: int = 1) -> float:
    """Total key rate: one rate for every channel, or one rate per slot."""
    if isinstance(per_channel_skr_bps, (int, float)):
        if per_channel_skr_bps < 0.0:
            raise ParameterError("per-channel key rate must be >= 0")
        return plan.channels * float(per_channel_skr_bps) * n_qkd_cores
    rates = [float(r) for r in per_channel_skr_bps]
    if len(rates) != plan.channels:
        raise ParameterError(f"got {len(rates)} rates for {plan.channels} channels")
    if any(r < 0.0 for r in rates):
        raise ParameterError("per-channel key rates must be >= 0")
    return math.fsum(rates) * n_qkd_cores


def classical_throughput(cg: ClassicalGrid, n_cores: int) -> float:
    """Gross line rate in bit/s, no FEC overhead removed."""
    return cg.n_channels * cg.symbol_rate_gbd * 1e9 * cg.bits_per_symbol * n_cores


def max_launch_power(model: CrosstalkModel | Callable[[float], float], proto: ProtocolParams,
                     link: LinkParams, attack: Attack = Attack.INDIVIDUAL) -> float:
    """Highest launch power per channel and core (dBm) that still yields a key.

    ``model`` maps launch power in dBm to excess noise in SNU and must be
    nondecreasing.  Returns ``math.inf`` when crosstalk never closes the key
    (power-independent model, or still positive at the top of the search range).
    """
    eps_of = model
    eps_max = max_tolerable_excess_noise(proto, link, attack)
    lo, hi = POWER_SEARCH_RANGE_DBM
    if eps_of(lo) >= eps_max:
        raise InfeasibleLinkError(
            f"excess noise {eps_of(lo):.4g} SNU at {lo} dBm already exceeds the "
            f"tolerable {eps_max:.4g} SNU")
    if isinstance(model, CrosstalkModel) and model.k_xt == 0.0:
        return math.inf
    if eps_of(hi) < eps_max:
        return math.inf

    def margin(p: float) -> float:
        return secret_key_rate(proto, link.with_eps(eps_of(p)), attack).skr_per_symbol

    return bisect_decreasing(margin, lo, hi, ftol=0.0, xtol=MAX_LAUNCH_POWER_TOL_DB / 100)


# --- sweeps --------------------------------------------------------------

SKR_COLUMNS = ("skr_coll_ideal_bps", "skr_ind_ideal_bps", "skr_coll_beta_bps", "skr_ind_beta_bps")
_COLUMN_KEYS = {
    "skr_coll_ideal_bps": (Attack.COLLECTIVE, "ideal"),
    "skr_ind_ideal_bps": (Attack.INDIVIDUAL, "ideal"),
    "skr_coll_beta_bps": (Attack.COLLECTIVE, "beta"),
    "skr_ind_beta_bps": (Attack.INDIVIDUAL, "beta"),
}


@dataclass(frozen=True)
class SweepRow:
    x: float
    eps: float
    results: dict[str, SkrResult]
    v_a: dict[str, float]
    bps: dict[str, float]


@dataclass
class SweepResult:
    axis_column: str
    beta: float
    symbol_rate_hz: float
    rows: list[SweepRow] = field(default_factory=list)

    @property
    def columns(self) -> tuple[str, ...]:
        return (self.axis_column, "eps_snu") + SKR_COLUMNS

    def summary(self) -> dict:
        """Mean rate over the points with positive key, per column."""
        out = {}
        for col in SKR_COLUMNS:
            positive = [r.bps[col] for r in self.rows if r.bps[col] > 0.0]
            out[col] = {
                "mean_positive_bps": math.fsum(positive) / len(positive) if positive else 0.0,
                "n_positive": len(positive),
                "n_points": len(self.rows),
            }
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([repr(r.x), repr(r.eps)] + [repr(r.bps[c]) for c in SKR_COLUMNS])
        return buf.getvalue()


def _rates_at(eps: float, link: LinkParams, beta: float, v_a: float | None,
              symbol_rate: float) -> tuple[dict, dict, dict]:
    results, v_as, bps = {}, {}, {}
    probe = link.with_eps(eps)
    for col, (attack, which) in _COLUMN_KEYS.items():
        b = 1.0 if which == "ideal" else beta
        if v_a is None:
            proto = optimize_modulation_variance(probe, b, attack).params
        else:
            proto = ProtocolParams(v_a, b)
        res = secret_key_rate(proto, probe, attack)
        results[col], v_as[col] = res, proto.v_a
        bps[col] = skr_bits_per_second(res, symbol_rate)
    return results, v_as, bps


def sweep_points(xs: Sequence[float], eps_values: Sequence[float], link: LinkParams,
                 axis_column: str, beta: float = 0.898, v_a: float | None = None,
                 symbol_rate: float = DEFAULT_SYMBOL_RATE_HZ) -> SweepResult:
    """Key rates for each (axis value, eps) pair, ordered by axis value.

    ``v_a=None`` optimises the modulation variance separately at every point
    and for every attack/efficiency combination.
    """
    out = SweepResult(axis_column, beta, symbol_rate)
    for x, eps in sorted(zip(xs, eps_values)):
        results, v_as, bps = _rates_at(eps, link, beta, v_a, symbol_rate)
        out.rows.append(SweepRow(float(x), float(eps), results, v_as, bps))
    return out


def sweep_wavelength(table: WavelengthNoiseTable, link: LinkParams, beta: float = 0.898,
                     v_a: float | None = None, step_nm: float | None = None,
                     symbol_rate: float = DEFAULT_SYMBOL_RATE_HZ) -> SweepResult:
    """Key rate across wavelength with eps taken from the measured table.

    Evaluates at the table knots, or on a regular grid of ``step_nm``.
    """
    if step_nm is None:
        wavelengths = list(table.wavelength_nm)
    else:
        if not step_nm > 0.0:
            raise ParameterError("step_nm must be > 0")
        lo, hi = table.span_nm
        n = int(math.floor((hi - lo) / step_nm + 1e-9))
        wavelengths = [lo + i * step_nm for i in range(n + 1)]
    eps = [eps_at_wavelength(table, w) for w in wavelengths]
    return sweep_points(wavelengths, eps, link, "wavelength_nm", beta, v_a, symbol_rate)


def sweep_power(model: CrosstalkModel, powers_dbm: Sequence[float], link: LinkParams,
                beta: float = 0.898, v_a: float | None = None,
                symbol_rate: float = DEFAULT_SYMBOL_RATE_HZ) -> SweepResult:
    eps = [eval_excess_noise(model, p) for p in powers_dbm]
    return sweep_points(powers_dbm, eps, link, "power_dbm", beta, v_a, symbol_rate)

"""Run configuration: a flat ``section.key = value`` file plus CLI overrides.

Example::

    # reference link
    link.t = 0.2
    link.eta = 0.7
    link.nu_el_snu = 0.08
    protocol.beta = 0.898

The unit of every field is fixed by its suffix (``_snu``, ``_dbm``, ``_ghz``,
``_nm``, ``_hz``, ``_bps``); unitless ratios carry no suffix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .errors import ParameterError
from .homodyne import MeasurementConfig
from .noise import CrosstalkModel
from .planner import ClassicalGrid, CoreLayout, QkdGrid
from .skr import Attack, LinkParams


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


def _optional_float(text: str) -> float | None:
    return None if text.strip().lower() in ("", "none", "auto") else float(text)


def _optional_int(text: str) -> int | None:
    return None if text.strip().lower() in ("", "none") else int(text)


def _optional_str(text: str) -> str | None:
    return None if text.strip().lower() in ("", "none") else text.strip()


def _attacks(text: str) -> tuple[Attack, ...]:
    return tuple(Attack(a.strip().lower()) for a in text.split(",") if a.strip())


def _bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (parser, default, help)
SCHEMA: dict[str, tuple[Callable[[str], Any], Any, str]] = {
    "protocol.v_a_snu": (_optional_float, None, "modulation variance; 'auto' optimises per link"),
    "protocol.beta": (float, 0.898, "reconciliation efficiency of the non-ideal case"),
    "link.t": (float, 0.2, "channel transmittance"),
    "link.eps_snu": (float, 0.0, "input-referred excess noise"),
    "link.eta": (float, 0.7, "detection efficiency"),
    "link.nu_el_snu": (float, 0.08, "receiver electrical noise"),
    "run.attacks": (_attacks, (Attack.COLLECTIVE, Attack.INDIVIDUAL), "comma-separated attack models"),
    "run.symbol_rate_hz": (float, 1e9, "QKD symbol rate"),
    "run.seed": (int, 0, "RNG seed"),
    "grid.n_channels": (int, 30, "classical WDM channels"),
    "grid.spacing_ghz": (float, 100.0, "classical channel spacing"),
    "grid.symbol_rate_gbd": (float, 24.5, "classical symbol rate"),
    "grid.bits_per_symbol": (int, 8, "classical bits per symbol"),
    "grid.band_start_nm": (float, 1537.0, "short edge of the band"),
    "grid.band_end_nm": (float, 1563.0, "long edge of the band"),
    "grid.anchor_nm": (float, 1550.35, "wavelength of the anchor carrier"),
    "grid.anchor_index": (int, 14, "index of the anchor carrier, 0 = lowest frequency"),
    "qkd.channel_bw_ghz": (float, 1.0, "QKD channel bandwidth"),
    "qkd.slot_ghz": (float, 5.0, "QKD slot spacing"),
    "qkd.max_slots_per_band": (_optional_int, 11, "cap on slots per guard band; 'none' disables"),
    "cores.n_qkd": (int, 6, "cores carrying QKD"),
    "cores.n_classical": (int, 3, "cores carrying classical channels"),
    "cores.total": (int, 19, "cores in the fibre"),
    "plan.per_channel_skr_bps": (_optional_float, None, "uniform per-channel key rate; 'auto' derives it"),
    "plan.attack": (Attack, Attack.COLLECTIVE, "attack model for derived plan rates"),
    "model.eps_floor_snu": (_optional_float, None, "crosstalk model floor"),
    "model.k_xt_snu_per_mw": (_optional_float, None, "crosstalk model slope"),
    "input.power_csv": (_optional_str, None, "power sweep CSV (power_dbm,eps_snu)"),
    "input.wavelength_csv": (_optional_str, None, "wavelength sweep CSV (wavelength_nm,eps_snu)"),
    "sweep.step_nm": (_optional_float, None, "wavelength step; default uses table knots"),
    "sweep.power_min_dbm": (float, -30.0, "power sweep start"),
    "sweep.power_max_dbm": (float, 0.0, "power sweep end"),
    "sweep.power_step_db": (float, 0.5, "power sweep step"),
    "calib.n_samples": (int, 1_000_000, "samples per calibration stage"),
    "calib.n0": (float, 1.0, "shot-noise variance, arbitrary units"),
    "calib.eps_planted_snu": (float, 0.05, "planted excess noise"),
    "output.path": (_optional_str, None, "output file; stdout when unset"),
    "output.summary_path": (_optional_str, None, "sweep summary JSON file"),
    "output.include_slots": (_bool, True, "list slot frequencies in plan output"),
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        raw[key] = value.strip()
    return raw


@dataclass
class RunConfig:
    values: dict[str, Any] = field(default_factory=lambda: {k: v[1] for k, v in SCHEMA.items()})

    @classmethod
    def from_sources(cls, path: str | Path | None = None,
                     overrides: dict[str, str] | None = None) -> "RunConfig":
        raw: dict[str, str] = {}
        if path is not None:
            p = Path(path)
            try:
                text = p.read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config file {p}: {exc.strerror}") from None
            raw.update(parse_config_text(text, str(p)))
        for key, value in (overrides or {}).items():
            if key not in SCHEMA:
                raise ConfigError(f"unknown key {key!r}")
            raw[key] = value
        cfg = cls()
        for key, text in raw.items():
            try:
                cfg.values[key] = SCHEMA[key][0](text)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{key}: cannot parse {text!r} ({exc})") from None
        return cfg

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def _build(self, section: str, factory: Callable[[], Any]) -> Any:
        try:
            return factory()
        except ParameterError as exc:
            raise ConfigError(f"[{section}] {exc}") from None

    def _positive(self, key: str) -> float:
        v = self.values[key]
        if not (math.isfinite(v) and v > 0.0):
            raise ConfigError(f"{key}: must be > 0, got {v}")
        return v

    def link(self) -> LinkParams:
        v = self.values
        return self._build("link", lambda: LinkParams(
            v["link.t"], v["link.eps_snu"], v["link.eta"], v["link.nu_el_snu"]))

    @property
    def beta(self) -> float:
        b = self.values["protocol.beta"]
        if not (0.0 < b <= 1.0):
            raise ConfigError(f"protocol.beta: must lie in (0, 1], got {b}")
        return b

    @property
    def v_a(self) -> float | None:
        v = self.values["protocol.v_a_snu"]
        if v is not None and not (math.isfinite(v) and v >= 0.0):
            raise ConfigError(f"protocol.v_a_snu: must be >= 0, got {v}")
        return v

    @property
    def symbol_rate_hz(self) -> float:
        return self._positive("run.symbol_rate_hz")

    @property
    def attacks(self) -> tuple[Attack, ...]:
        a = self.values["run.attacks"]
        if not a:
            raise ConfigError("run.attacks: at least one attack model required")
        return a

    def classical_grid(self) -> ClassicalGrid:
        v = self.values
        return self._build("grid", lambda: ClassicalGrid(
            v["grid.n_channels"], v["grid.spacing_ghz"], v["grid.symbol_rate_gbd"],
            v["grid.bits_per_symbol"], (v["grid.band_start_nm"], v["grid.band_end_nm"]),
            v["grid.anchor_nm"], v["grid.anchor_index"]))

    def qkd_grid(self) -> QkdGrid:
        v = self.values
        return self._build("qkd", lambda: QkdGrid(
            v["qkd.channel_bw_ghz"], v["qkd.slot_ghz"], v["qkd.max_slots_per_band"]))

    def core_layout(self) -> CoreLayout:
        v = self.values
        return self._build("cores", lambda: CoreLayout(
            v["cores.n_qkd"], v["cores.n_classical"], v["cores.total"]))

    def crosstalk_model(self) -> CrosstalkModel | None:
        floor, k = self.values["model.eps_floor_snu"], self.values["model.k_xt_snu_per_mw"]
        if floor is None and k is None:
            return None
        return self._build("model", lambda: CrosstalkModel(floor or 0.0, k or 0.0))

    def measurement(self) -> MeasurementConfig:
        v = self.values
        return self._build("calib", lambda: MeasurementConfig(
            v["calib.n_samples"], v["calib.n0"], v["link.nu_el_snu"], v["link.eta"],
            v["link.t"], v["calib.eps_planted_snu"], v["run.seed"]))

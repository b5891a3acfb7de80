"""Crosstalk-induced excess noise versus launch power and wavelength.

Measured curves are ingested from CSV; nothing here derives crosstalk from
fibre physics.  Power dependence is modelled as

    eps(P) = eps_floor + k_xt * P_mW,    P_mW = 10 ** (P_dBm / 10)

since inter-core coupled power is linear in launched power.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import FitError, OutOfRangeError, ParameterError


def dbm_to_mw(p_dbm):
    return 10.0 ** (np.asarray(p_dbm, dtype=float) / 10.0)


def mw_to_dbm(p_mw):
    return 10.0 * np.log10(np.asarray(p_mw, dtype=float))


@dataclass(frozen=True)
class PowerNoisePoint:
    launch_power_dbm: float
    eps: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.launch_power_dbm):
            raise ParameterError(f"launch power must be finite, got {self.launch_power_dbm}")
        if not (math.isfinite(self.eps) and self.eps >= 0.0):
            raise ParameterError(f"eps must be finite and >= 0, got {self.eps}")


@dataclass(frozen=True)
class CrosstalkModel:
    eps_floor: float
    k_xt: float  # SNU per mW per channel and core

    def __post_init__(self) -> None:
        if not (self.eps_floor >= 0.0 and self.k_xt >= 0.0):
            raise ParameterError(
                f"eps_floor and k_xt must be >= 0, got ({self.eps_floor}, {self.k_xt})")

    def __call__(self, launch_power_dbm: float) -> float:
        return eval_excess_noise(self, launch_power_dbm)


@dataclass(frozen=True)
class CrosstalkFit:
    model: CrosstalkModel
    stderr_floor: float
    stderr_k: float
    residual_rms: float
    n_points: int
    # True when a negative least-squares coefficient was clamped to 0.
    clamped: bool


def fit_crosstalk_model(points: Sequence[PowerNoisePoint]) -> CrosstalkFit:
    """Ordinary least squares of eps against launch power in mW.

    Standard errors come from the residual variance (zero for two points or
    an exact fit).
    """
    if len(points) < 2:
        raise FitError(f"need at least 2 points, got {len(points)}")
    p_mw = dbm_to_mw([p.launch_power_dbm for p in points])
    eps = np.array([p.eps for p in points], dtype=float)
    if np.unique(p_mw).size < 2:
        raise FitError("need at least 2 distinct launch powers")
    design = np.column_stack([np.ones_like(p_mw), p_mw])
    coef, _, rank, _ = np.linalg.lstsq(design, eps, rcond=None)
    if rank < 2:
        raise FitError("degenerate design matrix")
    resid = eps - design @ coef
    dof = len(points) - 2
    if dof > 0:
        s2 = float(resid @ resid) / dof
        cov = s2 * np.linalg.inv(design.T @ design)
        se_floor, se_k = (float(math.sqrt(max(c, 0.0))) for c in np.diag(cov))
    else:
        se_floor = se_k = 0.0
    floor, k = float(coef[0]), float(coef[1])
    clamped = floor < 0.0 or k < 0.0
    model = CrosstalkModel(max(floor, 0.0), max(k, 0.0))
    rms = float(math.sqrt(np.mean(resid ** 2)))
    return CrosstalkFit(model, se_floor, se_k, rms, len(points), clamped)


def eval_excess_noise(model: CrosstalkModel, launch_power_dbm: float) -> float:
    if not math.isfinite(launch_power_dbm):
        raise ParameterError(f"launch power must be finite, got {launch_power_dbm}")
    return model.eps_floor + model.k_xt * 10.0 ** (launch_power_dbm / 10.0)


@dataclass(frozen=True)
class WavelengthNoiseTable:
    wavelength_nm: tuple[float, ...]
    eps: tuple[float, ...]
    launch_power_dbm: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "wavelength_nm", tuple(float(w) for w in self.wavelength_nm))
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        if len(self.wavelength_nm) != len(self.eps):
            raise ParameterError("wavelength and eps columns differ in length")
        if not self.wavelength_nm:
            raise ParameterError("wavelength table is empty")
        w = np.asarray(self.wavelength_nm)
        if np.any(np.diff(w) <= 0.0):
            raise ParameterError("wavelengths must be strictly increasing")
        if any(not (math.isfinite(e) and e >= 0.0) for e in self.eps):
            raise ParameterError("eps values must be finite and >= 0")

    @property
    def span_nm(self) -> tuple[float, float]:
        return self.wavelength_nm[0], self.wavelength_nm[-1]

    def __len__(self) -> int:
        return len(self.wavelength_nm)


def eps_at_wavelength(table: WavelengthNoiseTable, wavelength_nm: float) -> float:
    lo, hi = table.span_nm
    if not (lo <= wavelength_nm <= hi):
        raise OutOfRangeError(f"{wavelength_nm} nm outside table range [{lo}, {hi}] nm")
    return float(np.interp(wavelength_nm, table.wavelength_nm, table.eps))


# --- CSV ingestion -------------------------------------------------------

def _data_rows(lines: Iterable[str]) -> tuple[list[str], list[str]]:
    comments, body = [], []
    for line in lines:
        stripped = line.strip()
        if not stripped:
            continue
        (comments if stripped.startswith("#") else body).append(stripped)
    return comments, body


def _read_two_columns(path: Path, header: tuple[str, str]) -> tuple[list[str], list[tuple[float, float]]]:
    path = Path(path)
    with path.open(newline="") as fh:
        comments, body = _data_rows(fh)
    if not body:
        raise ParameterError(f"{path}: missing header row {','.join(header)}")
    reader = csv.reader(body)
    found = tuple(col.strip() for col in next(reader))
    if found != header:
        raise ParameterError(f"{path}: expected header {','.join(header)}, got {','.join(found)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 2:
            raise ParameterError(f"{path}: row {lineno} has {len(row)} fields, expected 2")
        try:
            rows.append((float(row[0]), float(row[1])))
        except ValueError as exc:
            raise ParameterError(f"{path}: row {lineno}: {exc}") from None
    return comments, rows


def read_power_csv(path) -> list[PowerNoisePoint]:
    """Read ``power_dbm,eps_snu`` rows."""
    _, rows = _read_two_columns(path, ("power_dbm", "eps_snu"))
    return [PowerNoisePoint(p, e) for p, e in rows]


def read_wavelength_csv(path) -> WavelengthNoiseTable:
    """Read ``wavelength_nm,eps_snu`` rows plus a ``# launch_power_dbm=<x>`` comment."""
    comments, rows = _read_two_columns(path, ("wavelength_nm", "eps_snu"))
    power = None
    for c in comments:
        key, _, value = c.lstrip("#").partition("=")
        if key.strip() == "launch_power_dbm":
            power = float(value)
    if power is None:
        raise ParameterError(f"{path}: missing '# launch_power_dbm=<x>' comment line")
    rows.sort()
    return WavelengthNoiseTable(tuple(w for w, _ in rows), tuple(e for _, e in rows), power)


def write_power_csv(path, points: Sequence[PowerNoisePoint]) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["power_dbm", "eps_snu"])
        for p in points:
            w.writerow([repr(float(p.launch_power_dbm)), repr(float(p.eps))])


def write_wavelength_csv(path, table: WavelengthNoiseTable) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write(f"# launch_power_dbm={table.launch_power_dbm}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["wavelength_nm", "eps_snu"])
        for wl, e in zip(table.wavelength_nm, table.eps):
            w.writerow([repr(float(wl)), repr(float(e))])

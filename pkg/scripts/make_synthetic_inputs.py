"""Write SYNTHETIC power- and wavelength-sweep CSVs for exercising the CLI.

These are not measurements.  The wavelength table places a Lorentzian
excess-noise peak on every classical carrier over a flat guard-band floor;
the power table follows eps = floor + k * P_mW with Gaussian jitter.
"""

import argparse
from pathlib import Path

import numpy as np

from cvqkd_mcf import noise, planner
from cvqkd_mcf.noise import CrosstalkModel, PowerNoisePoint, WavelengthNoiseTable


def wavelength_table(floor: float, peak: float, width_ghz: float, step_nm: float) -> WavelengthNoiseTable:
    cg = planner.ClassicalGrid()
    carriers = np.array(cg.carriers_ghz())
    wl = np.arange(cg.band_nm[0], cg.band_nm[1] + step_nm / 2, step_nm)
    f = planner.C_NM_GHZ / wl
    detuning = f[:, None] - carriers[None, :]
    eps = floor + peak * np.sum(1.0 / (1.0 + (detuning / width_ghz) ** 2), axis=1)
    return WavelengthNoiseTable(tuple(np.round(wl, 6)), tuple(eps), 12.2)


def power_points(model: CrosstalkModel, sigma: float, seed: int) -> list[PowerNoisePoint]:
    rng = np.random.default_rng(seed)
    out = []
    for p in np.arange(-30.0, -1.0, 2.0):
        out.append(PowerNoisePoint(float(p), max(model(p) + rng.normal(0.0, sigma), 0.0)))
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="synthetic")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    noise.write_wavelength_csv(out / "wavelength_sweep.csv", wavelength_table(0.002, 0.05, 15.0, 0.02))
    noise.write_power_csv(out / "power_sweep.csv", power_points(CrosstalkModel(0.005, 2.0), 2e-3, args.seed))
    print(f"wrote {out / 'wavelength_sweep.csv'} and {out / 'power_sweep.csv'} (synthetic)")


if __name__ == "__main__":
    main()

"""Command-line entry point: ``cvqkd-mcf {skr,sweep,plan,fit,calibrate-sim}``.

Exit codes: 0 success, 2 invalid configuration or input, 3 infeasible link.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

from . import homodyne, noise, planner, skr
from .config import SCHEMA, ConfigError, RunConfig
from .errors import (
    CalibrationError,
    FitError,
    InfeasibleLinkError,
    InsufficientDataError,
    NumericalDomainError,
    OutOfRangeError,
    ParameterError,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


def _check_finite(obj: Any, path: str = "$") -> None:
    if isinstance(obj, float) and not math.isfinite(obj):
        raise AssertionError(f"non-finite value at {path}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _check_finite(v, f"{path}[{i}]")


def dumps(report: dict) -> str:
    _check_finite(report)
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _link_dict(link: skr.LinkParams) -> dict:
    return {"t": link.t, "eps_snu": link.eps, "eta": link.eta, "nu_el_snu": link.nu_el}


def _proto_for(cfg: RunConfig, link: skr.LinkParams, beta: float,
               attack: skr.Attack) -> tuple[skr.ProtocolParams, bool]:
    if cfg.v_a is not None:
        return skr.ProtocolParams(cfg.v_a, beta), False
    opt = skr.optimize_modulation_variance(link, beta, attack)
    return opt.params, opt.at_bracket_edge


def _betas(cfg: RunConfig) -> list[float]:
    return [1.0] if cfg.beta == 1.0 else [1.0, cfg.beta]


def _require_file(path: str | None, key: str) -> Path:
    if path is None:
        raise ConfigError(f"{key}: input file required for this command")
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"{key}: no such file: {p}")
    return p


# --- commands ------------------------------------------------------------

def cmd_skr(cfg: RunConfig) -> dict:
    link = cfg.link()
    noise_b = skr.chi_tot(link)
    rate = cfg.symbol_rate_hz
    entries = []
    for attack in cfg.attacks:
        for beta in _betas(cfg):
            proto, at_edge = _proto_for(cfg, link, beta, attack)
            res = skr.secret_key_rate(proto, link, attack)
            eig = skr.symplectic_eigenvalues(proto, link)
            try:
                eps_max = skr.max_tolerable_excess_noise(proto, link, attack)
            except InfeasibleLinkError:
                eps_max = None
            entries.append({
                "attack": attack.value,
                "beta": beta,
                "v_a_snu": proto.v_a,
                "v_a_optimized": cfg.v_a is None,
                "v_a_at_bracket_edge": at_edge,
                "i_ab": res.i_ab,
                "i_be": skr.eve_info_individual(proto, link),
                "chi_be": skr.holevo_bound(proto, link),
                "leak_eve": res.leak_eve,
                "skr_per_symbol": res.skr_per_symbol,
                "positive_key": res.positive_key,
                "skr_bps": skr.skr_bits_per_second(res, rate),
                "eigen": {"a": eig.a_term, "b": eig.b_term, "c": eig.c_term,
                          "d": eig.d_term, "lambdas": list(eig.lambdas)},
                "max_tolerable_eps_snu": eps_max,
                "feasible_at_zero_eps": eps_max is not None,
            })
    return {
        "command": "skr",
        "link": _link_dict(link),
        "symbol_rate_hz": rate,
        "noise": {"chi_line_snu": noise_b.chi_line, "chi_hom_snu": noise_b.chi_hom,
                  "chi_tot_snu": noise_b.chi_tot},
        "results": entries,
    }


def _power_model(cfg: RunConfig) -> tuple[noise.CrosstalkModel, dict]:
    model = cfg.crosstalk_model()
    if model is not None:
        return model, {"source": "config"}
    path = _require_file(cfg["input.power_csv"], "input.power_csv")
    fit = noise.fit_crosstalk_model(noise.read_power_csv(path))
    return fit.model, {"source": str(path), "clamped": fit.clamped}


def cmd_sweep(cfg: RunConfig, axis: str) -> tuple[str, dict]:
    link = cfg.link()
    if axis == "power":
        model, _ = _power_model(cfg)
        lo, hi, step = (cfg["sweep.power_min_dbm"], cfg["sweep.power_max_dbm"],
                        cfg["sweep.power_step_db"])
        if not (step > 0.0 and hi >= lo):
            raise ConfigError("sweep.power_*: need power_step_db > 0 and power_max_dbm >= power_min_dbm")
        n = int(math.floor((hi - lo) / step + 1e-9))
        powers = [round(lo + i * step, 10) for i in range(n + 1)]
        result = planner.sweep_power(model, powers, link, cfg.beta, cfg.v_a, cfg.symbol_rate_hz)
    elif axis == "wavelength":
        path = _require_file(cfg["input.wavelength_csv"], "input.wavelength_csv")
        table = noise.read_wavelength_csv(path)
        result = planner.sweep_wavelength(table, link, cfg.beta, cfg.v_a, cfg["sweep.step_nm"],
                                          cfg.symbol_rate_hz)
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    summary = {"command": "sweep", "axis": axis, "beta": cfg.beta,
               "symbol_rate_hz": cfg.symbol_rate_hz, "summary": result.summary()}
    return result.to_csv(), summary


def _slot_rates_from_table(plan: planner.SpectrumPlan, table: noise.WavelengthNoiseTable,
                           cfg: RunConfig, link: skr.LinkParams, attack: skr.Attack) -> list[float]:
    rates = []
    for wl in plan.slot_wavelengths_nm():
        eps = noise.eps_at_wavelength(table, wl)
        probe = link.with_eps(eps)
        proto, _ = _proto_for(cfg, probe, cfg.beta, attack)
        rates.append(skr.skr_bits_per_second(skr.secret_key_rate(proto, probe, attack),
                                             cfg.symbol_rate_hz))
    return rates


def cmd_plan(cfg: RunConfig) -> dict:
    cg, qg, cores = cfg.classical_grid(), cfg.qkd_grid(), cfg.core_layout()
    plan = planner.allocate_qkd_slots(cg, qg)
    attack = cfg["plan.attack"]
    per_channel = cfg["plan.per_channel_skr_bps"]
    rate_source = "config"
    slot_rates = None
    if per_channel is None and cfg["input.wavelength_csv"] is not None:
        table = noise.read_wavelength_csv(_require_file(cfg["input.wavelength_csv"],
                                                        "input.wavelength_csv"))
        slot_rates = _slot_rates_from_table(plan, table, cfg, cfg.link(), attack)
        per_channel = math.fsum(slot_rates) / plan.channels if plan.channels else 0.0
        rate_source = "wavelength_table"
    elif per_channel is None:
        link = cfg.link()
        proto, _ = _proto_for(cfg, link, cfg.beta, attack)
        res = skr.secret_key_rate(proto, link, attack)
        if not res.positive_key:
            raise InfeasibleLinkError(
                f"link gives no positive key under {attack.value} attacks "
                f"(skr_per_symbol={res.skr_per_symbol:.4g})")
        per_channel = skr.skr_bits_per_second(res, cfg.symbol_rate_hz)
        rate_source = "link"
    if per_channel < 0.0:
        raise ConfigError("plan.per_channel_skr_bps: must be >= 0")
    if slot_rates is not None:
        per_core = planner.aggregate_skr(plan, slot_rates, 1)
    else:
        per_core = planner.aggregate_skr(plan, per_channel, 1)
    total = per_core * cores.n_qkd_cores
    classical = planner.classical_throughput(cg, cores.n_classical_cores)
    plan_d = plan.to_dict(include_slots=cfg["output.include_slots"])
    plan_d.update(per_channel_skr_bps=per_channel, aggregate_skr_bps=total,
                  classical_bps=classical)
    return {
        "command": "plan",
        "plan": plan_d,
        "rate_source": rate_source,
        "attack": attack.value,
        "beta": cfg.beta,
        "skr_per_core_bps": per_core,
        "n_qkd_cores": cores.n_qkd_cores,
        "n_classical_cores": cores.n_classical_cores,
        "slot_skr_bps": slot_rates,
    }


def cmd_fit(cfg: RunConfig) -> dict:
    path = _require_file(cfg["input.power_csv"], "input.power_csv")
    points = noise.read_power_csv(path)
    fit = noise.fit_crosstalk_model(points)
    link = cfg.link().with_eps(0.0)
    limits = []
    for attack in cfg.attacks:
        for beta in _betas(cfg):
            # v_a chosen at the model floor, where the link is at its best.
            proto, _ = _proto_for(cfg, link.with_eps(fit.model.eps_floor), beta, attack)
            p_max = planner.max_launch_power(fit.model, proto, link, attack)
            limits.append({
                "attack": attack.value, "beta": beta, "v_a_snu": proto.v_a,
                "max_launch_power_dbm": None if math.isinf(p_max) else p_max,
                "power_independent": math.isinf(p_max),
            })
    return {
        "command": "fit",
        "input": str(path),
        "n_points": fit.n_points,
        "model": {"eps_floor_snu": fit.model.eps_floor, "k_xt_snu_per_mw": fit.model.k_xt},
        "stderr": {"eps_floor_snu": fit.stderr_floor, "k_xt_snu_per_mw": fit.stderr_k},
        "residual_rms_snu": fit.residual_rms,
        "clamped": fit.clamped,
        "link": _link_dict(link),
        "max_launch_power": limits,
    }


def cmd_calibrate_sim(cfg: RunConfig) -> dict:
    report = homodyne.run_calibration(cfg.measurement())
    return {"command": "calibrate-sim", **report.to_dict()}


# --- argument parsing ----------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat 'section.key = value' config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key (repeatable)")
    p.add_argument("-o", "--output", help="output file (overrides output.path)")
    keys = p.add_argument_group("config keys (each overrides the config file)")
    for key, (_, default, help_text) in SCHEMA.items():
        keys.add_argument(f"--{key}", dest=key, default=None, metavar="X",
                          help=f"{help_text} [default: {default}]")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cvqkd-mcf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("skr", help="secret key rates for one link")
    _add_common(s)
    s = sub.add_parser("sweep", help="key rate vs launch power or wavelength (CSV)")
    s.add_argument("--axis", choices=("power", "wavelength"), required=True)
    _add_common(s)
    s = sub.add_parser("plan", help="guard-band QKD allocation and aggregate rates")
    _add_common(s)
    s = sub.add_parser("fit", help="fit a crosstalk model to a power sweep CSV")
    _add_common(s)
    s = sub.add_parser("calibrate-sim", help="simulate the three-stage noise calibration")
    _add_common(s)
    return p


def load_config(args: argparse.Namespace) -> RunConfig:
    overrides: dict[str, str] = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    for key in SCHEMA:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.output is not None:
        overrides["output.path"] = args.output
    return RunConfig.from_sources(args.config, overrides)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        out = cfg["output.path"]
        if args.cmd == "skr":
            _emit(dumps(cmd_skr(cfg)), out)
        elif args.cmd == "sweep":
            table, summary = cmd_sweep(cfg, args.axis)
            _emit(table, out)
            if cfg["output.summary_path"] is not None:
                _emit(dumps(summary), cfg["output.summary_path"])
        elif args.cmd == "plan":
            _emit(dumps(cmd_plan(cfg)), out)
        elif args.cmd == "fit":
            _emit(dumps(cmd_fit(cfg)), out)
        elif args.cmd == "calibrate-sim":
            _emit(dumps(cmd_calibrate_sim(cfg)), out)
    except InfeasibleLinkError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, ParameterError, FitError, CalibrationError, InsufficientDataError,
            OutOfRangeError, NumericalDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

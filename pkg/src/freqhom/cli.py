"""``freqhom`` command line: calibration, dip and sweep curves, oracle checks.

Exit codes: 0 ok, 2 input error, 3 unphysical data, 4 verification failure.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict

import click
import numpy as np

from . import hom, io
from .errors import ConfigError, DomainError, FreqHomError, UnphysicalDataError
from .estimator import calibrate
from .forward import rate_curve
from .params import WHATIFS, apply_whatif
from .verify import run_checks

EXIT_INPUT, EXIT_UNPHYSICAL, EXIT_VERIFY = 2, 3, 4


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _emit(text: str, out) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        io.write_text(out, text)


def _config(path):
    try:
        return io.load_config(path)
    except ConfigError as exc:
        _fail(str(exc), EXIT_INPUT)


def parse_tau_range(text: str) -> tuple[float, float]:
    """``"20"`` or ``"-20,20"``."""
    parts = [p for p in text.split(",") if p.strip()]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise click.BadParameter(f"not a delay range: {text!r}") from None
    if len(values) == 1:
        values = [-abs(values[0]), abs(values[0])]
    if len(values) != 2:
        raise click.BadParameter("expected one value or 'lo,hi'")
    return values[0], values[1]


def parse_powers(text: str) -> list[float]:
    """Comma list ``"50,140,190"`` or inclusive range ``"start:stop:step"``."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise click.BadParameter("range needs start <= stop and step > 0")
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            values = (start + step * np.arange(n)).tolist()
        else:
            values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"not a power list or range: {text!r}") from None
    if not values:
        raise click.BadParameter("no powers given")
    if any(p < 0 for p in values):
        raise click.BadParameter("pump powers must be nonnegative")
    return values


class _Powers(click.ParamType):
    name = "powers"

    def convert(self, value, param, ctx):
        try:
            return parse_powers(value)
        except click.BadParameter as exc:
            self.fail(exc.message, param, ctx)


class _TauRange(click.ParamType):
    name = "range"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return parse_tau_range(value)
        except click.BadParameter as exc:
            self.fail(exc.message, param, ctx)


@click.group()
@click.version_option(package_name="freqhom")
def main():
    """Frequency-domain Hong-Ou-Mandel interference model.

    CONFIG is a JSON configuration file; the name ``paper`` selects the
    bundled paper.json parameter set.
    """


@main.command("calibrate")
@click.argument("config")
@click.argument("measurements", type=click.Path(dir_okay=False))
@click.option("--trials", type=float, default=None, help="Pulses per power point, for R~ standard errors.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Report path (default stdout).")
def cmd_calibrate(config, measurements, trials, out):
    """Estimate R~, the loss budget, the pump curve and the noise model."""
    cfg = _config(config)
    try:
        table = io.load_measurements(measurements)
    except ConfigError as exc:
        _fail(str(exc), EXIT_INPUT)
    noise_u = list(zip(table.powers, table.d_u)) if table.d_u is not None else None
    noise_l = list(zip(table.powers, table.d_l)) if table.d_l is not None else None
    try:
        result = calibrate(list(table.rates), cfg.config.bandwidths, noise_u, noise_l, trials)
    except UnphysicalDataError as exc:
        _fail(f"unphysical data in {measurements}: {exc}", EXIT_UNPHYSICAL)
    except FreqHomError as exc:
        _fail(f"{measurements}: {exc}", EXIT_INPUT)
    _emit(json.dumps(calibration_report(result), indent=2) + "\n", out)


def calibration_report(result) -> dict:
    report = {
        "estimates": [
            {"power_mW": e.power, "r_tilde": e.r_tilde, "budget": asdict(e.budget), "r_tilde_stderr": e.stderr}
            for e in result.estimates
        ],
        "budget": asdict(result.budget),
        "budget_spread": dict(zip(("tu", "tl", "mu"), result.budget_spread)),
        "rate_residuals": [
            dict(zip(("p_ut", "p_us", "p_lt", "p_ls"), r), power_mW=e.power)
            for e, r in zip(result.estimates, result.rate_residuals)
        ],
        "skipped_powers_mW": list(result.skipped),
        "pump_curve": None,
        "noise": None,
    }
    if result.pump is not None:
        report["pump_curve"] = {"amplitude": result.pump.curve.amplitude, "rate_per_mw": result.pump.curve.rate,
                                "residual_norm": result.pump.residual_norm}
    if result.noise is not None:
        report["noise"] = {"unit": "probability", "du": list(result.noise.model.du_coeffs),
                           "dl": list(result.noise.model.dl_coeffs),
                           "residual_norm_u": result.noise.residual_norm_u,
                           "residual_norm_l": result.noise.residual_norm_l}
    return report


def _whatif_option(f):
    return click.option("--whatif", type=click.Choice(WHATIFS), default="none", show_default=True,
                        help="Override applied to the config first.")(f)


@main.command("dip")
@click.argument("config")
@click.option("--power", type=click.FloatRange(min=0), required=True, help="Pump power in mW.")
@click.option("--tau-range", type=_TauRange(), default="20", show_default=True,
              help="Delay half-range in ps, or 'lo,hi'.")
@click.option("--points", type=click.IntRange(min=3), default=401, show_default=True)
@_whatif_option
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_dip(config, power, tau_range, points, whatif, out):
    """Coincidence probability against delay; CSV tau_ps,p_c."""
    cfg = apply_whatif(_config(config).config, whatif)
    try:
        dip = hom.dip_scan(cfg, power, tau_range, points)
    except DomainError as exc:
        _fail(str(exc), EXIT_INPUT)
    footer = {"power_mW": power, "p_c_inf": dip.p_c_inf, "visibility": dip.visibility, "fwhm_ps": dip.fwhm}
    _emit(io.format_csv(("tau_ps", "p_c"), zip(dip.delays, dip.p_c), footer), out)


@main.command("sweep")
@click.argument("config")
@click.option("--powers", type=_Powers(), default="0:350:10", show_default=True,
              help="Comma list or start:stop:step in mW.")
@_whatif_option
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_sweep(config, powers, whatif, out):
    """Visibility against pump power; CSV power_mW,visibility."""
    cfg = apply_whatif(_config(config).config, whatif)
    try:
        rows = hom.visibility_sweep(cfg, powers)
    except FreqHomError as exc:
        _fail(str(exc), EXIT_INPUT)
    _emit(io.format_csv(("power_mW", "visibility"), rows, {"whatif": whatif}), out)


@main.command("rates")
@click.argument("config")
@click.option("--powers", type=_Powers(), default="0:350:10", show_default=True)
@click.option("--hz", is_flag=True, help="Multiply by the repetition rate to give counts per second.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_rates(config, powers, hz, out):
    """Predicted single-input count probabilities; CSV power_mW,p_ut,p_us,p_lt,p_ls."""
    cfg = _config(config)
    scale = cfg.repetition_rate_mhz * 1e6 if hz else 1.0
    rows = [(r.power, *(scale * v for v in r.as_tuple())) for r in rate_curve(cfg.config, powers)]
    _emit(io.format_csv(("power_mW", "p_ut", "p_us", "p_lt", "p_ls"), rows, {"unit": "Hz" if hz else "per_pulse"}), out)


@main.command("conventions")
@click.argument("config")
@click.option("--power", type=click.FloatRange(min=0), default=140.0, show_default=True)
@click.option("--tau-max", type=click.FloatRange(min=0, min_open=True), default=40.0, show_default=True)
def cmd_conventions(config, power, tau_max):
    """Dip FWHM under each bandwidth convention."""
    cfg = _config(config).config
    click.echo("convention,fwhm_ps,visibility")
    for name, fwhm, vis in hom.convention_sensitivity(cfg, power, tau_max):
        marker = "  # configured" if name == cfg.convention else ""
        click.echo(f"{name},{io.fmt(fwhm)},{io.fmt(vis)}{marker}")


@main.command("check")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--spectral-cases", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--fock-cases", type=click.IntRange(min=1), default=200, show_default=True,
              help="Random configurations per input kind.")
@click.option("--tolerance-scale", type=float, default=1.0, hidden=True)
def cmd_check(seed, spectral_cases, fock_cases, tolerance_scale):
    """Run the seeded oracle suites and report the largest deviations."""
    results = run_checks(seed, spectral_cases, fock_cases, tolerance_scale)
    failed = False
    for r in results:
        status = "ok" if r.passed else "FAIL"
        click.echo(f"{r.name}: cases={r.cases} max_deviation={r.max_deviation:.3e} "
                   f"tolerance={r.tolerance:.1e} {status}")
        if not r.passed:
            failed = True
            click.echo(f"{r.name} worst case: {json.dumps(r.worst_case, sort_keys=True)}")
    if failed:
        sys.exit(EXIT_VERIFY)


if __name__ == "__main__":
    main()

"""Command-line front end.

Subcommands: ``simulate``, ``sweep``, ``gains``, ``fit``, ``mc``, ``compile``.
Every subcommand accepts ``--config <json>`` and ``--out <path>``; flags given
on the command line override values from the config file.

Exit status: 0 success, 1 validation error, 2 numerical failure, 3 fit did not
converge.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import circuit as C
from . import criteria as K
from . import fit as F
from . import montecarlo as MC
from . import sweep as SW
from .errors import DegenerateSNL, InvalidState, NumericalDegeneracy, TripolError
from .polarization import FormMode, StokesIndex, stokes_means

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_NOT_CONVERGED = 0, 1, 2, 3


class ConfigError(TripolError, ValueError):
    pass


@dataclass
class RunConfig:
    """Resolved run configuration, echoed into every JSON report."""

    circuit: str | None = None
    circuit_file: str | None = None
    r: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    r_prime: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    alpha_c: float = 1.0
    alpha_a: float = 0.0
    theta: float = 0.0
    eta: float = 1.0
    gains: object = "optimal"
    form_mode: str = "paper_approx"
    n: int = 1_000_000
    seed: int = 0
    stokes_mode: str = "linearized"

    @property
    def uses_preset(self) -> bool:
        return self.circuit is None and self.circuit_file is None

    def preset(self) -> SW.PresetParams:
        return SW.PresetParams(tuple(self.r), tuple(self.r_prime), self.alpha_c, self.alpha_a, self.theta, self.eta)

    def circuit_spec(self) -> C.CircuitSpec:
        if self.circuit is not None and self.circuit_file is not None:
            raise ConfigError("give either an inline circuit or a circuit file, not both")
        if self.circuit is not None:
            return C.parse_circuit(self.circuit)
        if self.circuit_file is not None:
            try:
                text = Path(self.circuit_file).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read circuit file: {exc}") from exc
            return C.parse_circuit(text)
        return self.preset().circuit()

    def build(self):
        return C.compile_circuit(self.circuit_spec())


def _triple(text: str) -> list[float]:
    vals = [float(x) for x in str(text).split(",")]
    if len(vals) == 1:
        vals *= 3
    if len(vals) != 3:
        raise ConfigError(f"expected one or three comma-separated values, got {text!r}")
    return vals


def _gains(text):
    if text == "optimal":
        return "optimal"
    return _triple(text)


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config {args.config}: {exc}") from exc
        unknown = set(data) - set(RunConfig.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **data)
    overrides = {}
    for name in ("alpha_c", "alpha_a", "theta", "eta", "n", "seed", "stokes_mode", "form_mode", "circuit_file"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    for name in ("r", "r_prime"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = _triple(value)
    if getattr(args, "gains", None) is not None:
        overrides["gains"] = _gains(args.gains)
    cfg = replace(cfg, **overrides)
    if isinstance(cfg.gains, str) and cfg.gains != "optimal":
        cfg = replace(cfg, gains=_gains(cfg.gains))
    if len(cfg.r) != 3 or len(cfg.r_prime) != 3:
        raise ConfigError("r and r_prime need three values")
    FormMode(cfg.form_mode)
    return cfg


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x)!r}")


# --- subcommands -------------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    state, beams = cfg.build()
    mode = FormMode(cfg.form_mode)
    result = K.evaluate_criteria(state, beams, cfg.gains, mode)
    report = {"config": asdict(cfg), "beams": [], "criteria": result.as_dict()}
    for b in beams:
        variances = {k.name: MC.analytic_stokes_variances(state, b, mode)[k] for k in StokesIndex}
        report["beams"].append({"name": b.name, "means": dict(zip(("S0", "S1", "S2", "S3"), stokes_means(b))), "variances": variances})
    if cfg.uses_preset:
        p = cfg.preset()
        closed = K.closed_form_I(p.modes(), result.gains, p.eta)
        report["closed_form"] = {
            "I1": closed[0],
            "I2": closed[1],
            "I3": closed[2],
            "optimal_gains": list(K.optimal_gains_closed_form(p.modes(), p.eta)),
            "max_abs_difference": max(abs(a - b) for a, b in zip(closed, result.values)),
        }
    _emit(args, _json(report))
    return EXIT_OK


def cmd_gains(args) -> int:
    cfg = _load_config(args)
    state, beams = cfg.build()
    mode = FormMode(cfg.form_mode)
    rows = []
    for j in range(3):
        g, i_min = K.optimal_gain_numeric(state, beams, j, mode)
        rows.append({"criterion": f"I{j + 1}", "g_opt": g, "I_min": i_min})
    report = {"config": asdict(cfg), "numeric": rows}
    if cfg.uses_preset:
        p = cfg.preset()
        report["closed_form"] = list(K.optimal_gains_closed_form(p.modes(), p.eta))
    _emit(args, _json(report))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    if args.steps < 2:
        raise ConfigError("a sweep needs at least two steps")
    if args.param not in SW.SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {args.param!r}; choose from {SW.SWEEP_PARAMS}")
    if not cfg.uses_preset and args.param in ("r_common", "r_prime_common"):
        raise ConfigError(f"{args.param} sweeps need the GHZ preset, not a custom circuit")
    mode = FormMode(cfg.form_mode)
    if cfg.uses_preset:
        build = SW.preset_builder(cfg.preset(), args.param)
    else:
        spec = cfg.circuit_spec()

        def build(v):
            if args.param == "eta":
                return (*C.compile_circuit(SW.with_uniform_loss(spec, v)), None)
            return (*C.compile_circuit(spec), (v, v, v))

    values = np.linspace(args.start, args.stop, args.steps)
    rows = SW.sweep_rows(build, values, cfg.gains, mode)
    _emit(args, SW.format_rows(rows))
    for lo, hi in SW.bracket_crossings(rows):
        print(f"sum crosses {K.GENUINE_BOUND:g} between {args.param}={lo:.12g} and {args.param}={hi:.12g}", file=sys.stderr)
    return EXIT_OK


def cmd_fit(args) -> int:
    targets = _triple(args.targets)
    sigma = _triple(args.uncertainties) if args.uncertainties else None
    gain_policy = "optimal" if args.gain in (None, "optimal") else _triple(args.gain)
    res = F.fit_parameters(targets, args.model, sigma, gain_policy)
    report = res.as_dict()
    report["targets"] = targets
    report["uncertainties"] = sigma
    _emit(args, _json(report))
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_mc(args) -> int:
    cfg = _load_config(args)
    state, beams = cfg.build()
    mode = FormMode(cfg.form_mode)
    gains = K.optimal_gains_numeric(state, beams, mode) if cfg.gains == "optimal" else cfg.gains
    est = MC.mc_criteria(state, beams, gains, cfg.n, cfg.seed, cfg.stokes_mode, mode, workers=args.workers)
    analytic = K.evaluate_criteria(state, beams, gains, mode)
    report = {
        "config": asdict(cfg),
        "estimate": est.as_dict(),
        "analytic": analytic.as_dict(),
        "z_scores": [(e - a) / s for e, a, s in zip(est.I, analytic.values, est.se)],
    }
    if args.ratios:
        ratios = [float(x) for x in args.ratios.split(",")]
        report["linearization"] = MC.validate_linearization(state, beams, cfg.n, cfg.seed, ratios)
    _emit(args, _json(report))
    return EXIT_OK


def cmd_compile(args) -> int:
    if args.preset:
        spec = C.ghz_preset(alpha_a=0.0)
    elif args.circuit == "-":
        spec = C.parse_circuit(sys.stdin.read())
    elif args.circuit:
        try:
            text = Path(args.circuit).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read circuit file: {exc}") from exc
        spec = C.parse_circuit(text)
    else:
        raise ConfigError("give a circuit path, '-' for stdin, or --preset")
    state, beams = C.compile_circuit(spec)
    names = spec.mode_names
    out = [f"modes: {spec.n_modes}"]
    out += [f"beam {b.name}: h={names[b.h_mode]} v=#{b.v_mode} alpha_c={b.alpha_c:g} alpha_a={b.alpha_a:g} theta={b.theta:g}" for b in beams]
    if args.dump:
        U = C.mixing_coefficients(spec)
        out.append("mixing coefficients (out = U @ in), columns: " + " ".join(names))
        for name, row in zip(names, U):
            out.append(f"{name}: " + " ".join(f"{x: .5f}" for x in row))
        if any(isinstance(e, C.Loss) for e in spec.elements):
            out.append("note: losses are not part of the transform")
    if args.print:
        out.append(C.format_circuit(spec).rstrip("\n"))
    _emit(args, "\n".join(out) + "\n")
    return EXIT_OK


# --- argument parsing --------------------------------------------------------


def _common(p, preset=True):
    p.add_argument("--config", help="JSON file mirroring the run configuration")
    p.add_argument("--out", help="write output here instead of stdout")
    if preset:
        p.add_argument("--circuit", dest="circuit_file", help="circuit file (default: GHZ preset)")
        p.add_argument("--r", help="squeezing parameter: one value or r1,r2,r3")
        p.add_argument("--r-prime", dest="r_prime", help="excess anti-squeezing noise: one value or three")
        p.add_argument("--alpha-c", dest="alpha_c", type=float)
        p.add_argument("--alpha-a", dest="alpha_a", type=float)
        p.add_argument("--theta", type=float)
        p.add_argument("--eta", type=float, help="uniform detection efficiency on the preset outputs")
        p.add_argument("--gains", help="'optimal', one gain, or g1,g2,g3")
        p.add_argument("--form-mode", dest="form_mode", choices=[m.value for m in FormMode])


class _Parser(argparse.ArgumentParser):
    """Usage errors are validation errors (exit 1); argparse's default 2 means numerical failure here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tripol", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="propagate the state and evaluate the criteria")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gains", help="optimal gains, numeric and closed form")
    _common(p)
    p.set_defaults(func=cmd_gains)

    p = sub.add_parser("sweep", help="CSV of the criteria over a parameter grid")
    _common(p)
    p.add_argument("param", choices=SW.SWEEP_PARAMS)
    p.add_argument("start", type=float)
    p.add_argument("stop", type=float)
    p.add_argument("steps", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit squeezing parameters to measured criteria")
    _common(p, preset=False)
    p.add_argument("--targets", required=True, help="I1,I2,I3")
    p.add_argument("--uncertainties", help="sigma1,sigma2,sigma3 used as inverse-variance weights")
    p.add_argument("--model", default="symmetric", choices=F.MODELS)
    p.add_argument("--gain", help="'optimal' (default) or a fixed gain")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("mc", help="Monte Carlo estimate of the criteria")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--stokes-mode", dest="stokes_mode", choices=["linearized", "exact"])
    p.add_argument("--ratios", help="comma-separated alpha_a^2/alpha_c^2 values for a linearization check")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("compile", help="parse a circuit and show its structure")
    _common(p, preset=False)
    p.add_argument("circuit", nargs="?", help="circuit file, or '-' for stdin")
    p.add_argument("--preset", action="store_true", help="use the built-in GHZ network")
    p.add_argument("--dump", action="store_true", help="print the mixing coefficients")
    p.add_argument("--print", action="store_true", help="echo the normalized program")
    p.set_defaults(func=cmd_compile)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (InvalidState, DegenerateSNL, NumericalDegeneracy) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (TripolError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    weakdyn weak-value --scenario qubit.json --observable Z --initial i --final f
    weakdyn free-particle --kick 2.0 --out csv --out-path out/

Exit codes: 0 ok, 2 parse/validation, 3 orthogonal post-selection,
4 numeric failure, 5 bad flags.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import freeparticle as fp
from .errors import BadFlags, ParseError, WeakDynError
from .hilbert import HermitianMatrix, SpectralObservable, evolve, inner, normalize, random_state, spectral_decompose
from .report import Report, fnv1a64, report_files, write_report
from .response import DEFAULT_FD_STEP, imaginary_weak_value_fd, response_curve
from .scenario import RANDOM, Scenario, canonical_bytes, parse_scenario, scenario_to_dict
from .weakstats import (
    EPS_ORTH,
    logical_tension,
    max_transition_unitary,
    reconstruct_output_probability,
    reconstruct_weak_value,
    shifted_distribution,
    weak_conditional_distribution,
    weak_value,
)

COMMANDS = ("weak-value", "dist", "shift", "response", "tension", "umax", "free-particle", "kick")
DENSITY_COLUMNS = ("x", "re", "im", "abs", "arg", "arg_unwrapped", "action")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadFlags(message)


class _Context:
    """Resolves names in a scenario against flags and scenario defaults."""

    def __init__(self, scenario: Scenario, flags: dict[str, Any]):
        self.scenario = scenario
        self.flags = flags
        opts = scenario.options
        seed = flags.get("seed")
        self.seed = int(seed if seed is not None else opts.get("seed", 0))
        if self.seed < 0:
            raise BadFlags("--seed must be non-negative")
        eps = flags.get("epsilon")
        self.eps = float(eps if eps is not None else opts.get("epsilon", EPS_ORTH))
        self._random_names = sorted(k for k, v in scenario.states.items() if isinstance(v, str))

    def _name(self, flag: str, *option_keys: str) -> str:
        name = self.flags.get(flag)
        for key in option_keys:
            if name is None:
                name = self.scenario.options.get(key)
        if name is None:
            raise BadFlags(f"missing --{flag.replace('_', '-')} (no default in scenario options)")
        return name

    def state(self, flag: str, *option_keys: str):
        name = self._name(flag, *option_keys)
        if name not in self.scenario.states:
            raise BadFlags(f"--{flag} names undefined state {name!r}")
        raw = self.scenario.states[name]
        if isinstance(raw, str) and raw == RANDOM:
            return random_state(self.scenario.dim, self.seed + self._random_names.index(name))
        return normalize(raw)

    def observable(self, flag: str, *option_keys: str) -> SpectralObservable:
        name = self._name(flag, *option_keys)
        if name == "standard":
            return SpectralObservable.diagonal(np.arange(self.scenario.dim, dtype=float))
        if name not in self.scenario.observables:
            raise BadFlags(f"--{flag} names undefined observable {name!r}")
        return spectral_decompose(HermitianMatrix(self.scenario.observables[name]))


def _dist_columns(obs: SpectralObservable, values: np.ndarray) -> dict[str, Any]:
    return {
        "m": np.arange(values.size),
        "eigenvalue": obs.eigenvalues,
        "re": values.real,
        "im": values.imag,
        "abs": np.abs(values),
        "arg": np.angle(values),
    }


def _free_particle_config(flags: dict[str, Any], scenario: Optional[Scenario]) -> fp.FreeParticleConfig:
    base = dict(scenario.options.get("free_particle", {})) if scenario else {}
    for key in fp.FreeParticleConfig.__dataclass_fields__:
        if flags.get(key) is not None:
            base[key] = flags[key]
    return fp.FreeParticleConfig(**base)


def _run_free_particle(report: Report, cfg: fp.FreeParticleConfig, kick: float, mode: str, eps: float):
    scene = fp.build_scene(cfg)
    if kick:
        d = fp.apply_kick(scene, kick, mode, eps)
    else:
        d = fp.numeric_conditional_density(scene, mode, eps)
    action = fp.action_profile(d, cfg)
    report.add_table(
        "density",
        dict(zip(DENSITY_COLUMNS, (d.xs, d.values.real, d.values.imag, np.abs(d.values), d.arg, d.phase_unwrapped, action))),
    )
    k0 = scene.anchor_index()
    sc = report.scalars
    sc["kick.delta_p"] = float(kick)
    sc["kick.classical_center"] = kick * cfg.tau / (4 * cfg.mass)
    sc["density.stationary_point"] = fp.stationary_point(d)
    sc["density.total"] = d.total()
    sc["density.at_anchor"] = complex(d.values[k0])
    sc["density.abs_at_anchor"] = float(abs(d.values[k0]))
    sc["density.arg_at_anchor"] = float(d.arg[k0])
    sc["density.analytic_abs"] = math.sqrt(2 * cfg.mass / (math.pi * cfg.hbar * cfg.tau))
    sc["positivity.boundary"] = fp.positivity_boundary(cfg)
    if not kick:
        lo, hi = fp.real_sign_change(d)
        sc["positivity.sign_change_lo"] = lo
        sc["positivity.sign_change_hi"] = hi
    cutoff = 3 * math.sqrt(cfg.hbar * cfg.tau / cfg.mass)
    if cutoff <= cfg.length / 2:
        sc["tail.cutoff"] = cutoff
        sc["tail.net"] = fp.tail_cancellation(d, cutoff)
    _, achieved = max_transition_unitary(scene.position_observable(), scene.i_state, scene.f_state, eps)
    sc["umax.achieved_probability"] = achieved
    sc["scene.eigen_residual_initial"] = scene.eigen_residuals[0]
    sc["scene.eigen_residual_final"] = scene.eigen_residuals[1]
    if mode == "analytic":
        report.warnings.append("analytic normalization: density does not sum to one on the truncated grid")


def execute(command: str, flags: dict[str, Any], scenario: Optional[Scenario]) -> Report:
    """Run one command and collect its results into a Report."""
    if command not in COMMANDS:
        raise BadFlags(f"unknown command {command!r}")

    if command in ("free-particle", "kick"):
        cfg = _free_particle_config(flags, scenario)
        kick = flags.get("delta_p") if command == "kick" else flags.get("kick")
        kick = float(kick or 0.0)
        mode = flags.get("normalization") or "numeric"
        eps = flags.get("epsilon")
        if eps is None:
            eps = scenario.options.get("epsilon", EPS_ORTH) if scenario else EPS_ORTH
        inputs = {
            "scenario": scenario_to_dict(scenario) if scenario else None,
            "config": cfg.__dict__,
            "kick": kick,
            "normalization": mode,
        }
        digest = fnv1a64(json.dumps(inputs, sort_keys=True, separators=(",", ":")).encode("utf-8"))
        report = Report(command, digest)
        _run_free_particle(report, cfg, kick, mode, float(eps))
        return report

    if scenario is None:
        raise BadFlags(f"{command} needs --scenario")
    ctx = _Context(scenario, flags)
    report = Report(command, fnv1a64(canonical_bytes(scenario)))
    sc = report.scalars

    if command == "tension":
        i = ctx.state("i", "i", "initial")
        m = ctx.state("m", "m")
        f = ctx.state("f", "f", "final")
        t = logical_tension(i, m, f)
        sc["tension"] = t.tension
        sc["tension.overlap_magnitude"] = t.overlap_magnitude
        return report

    i = ctx.state("initial", "initial", "i")
    f = ctx.state("final", "final", "f")
    p_f0 = abs(inner(f, i)) ** 2
    sc["transition.p_f0"] = p_f0

    if command == "weak-value":
        a = ctx.observable("observable", "observable")
        w = weak_value(a, i, f, ctx.eps)
        d = weak_conditional_distribution(a, i, f, ctx.eps)
        sc["weak_value"] = w
        sc["weak_value.reconstructed"] = reconstruct_weak_value(a.eigenvalues, d)
        step = flags.get("fd_step") or DEFAULT_FD_STEP
        try:
            sc["weak_value.imag_fd"] = imaginary_weak_value_fd(i, f, a, step, ctx.eps)
        except WeakDynError as exc:
            report.warnings.append(f"finite-difference check skipped: {exc}")
        report.add_table("conditional", _dist_columns(a, d.values))
    elif command == "dist":
        b = ctx.observable("basis", "basis", "observable")
        d = weak_conditional_distribution(b, i, f, ctx.eps)
        sc["conditional.sum"] = d.total()
        report.add_table("conditional", _dist_columns(b, d.values))
    elif command == "shift":
        b = ctx.observable("basis", "basis", "observable", "generator")
        phi = flags.get("phi")
        if phi is None:
            raise BadFlags("shift needs --phi")
        d = shifted_distribution(b, phi, i, f, ctx.eps)
        d0 = weak_conditional_distribution(b, i, f, ctx.eps)
        sc["shifted.phi"] = float(phi)
        sc["shifted.sum"] = d.total()
        sc["transition.p_f_phi"] = abs(inner(f, evolve(b, phi, i))) ** 2
        sc["transition.p_f_phi_reconstructed"] = reconstruct_output_probability(d0, b.eigenvalues, phi, p_f0)
        report.add_table("shifted", _dist_columns(b, d.values))
    elif command == "response":
        g = ctx.observable("generator", "generator", "observable")
        lo = flags.get("phi_min")
        hi = flags.get("phi_max")
        lo = -math.pi if lo is None else lo
        hi = math.pi if hi is None else hi
        steps = flags.get("steps") or 101
        curve = response_curve(i, f, g, lo, hi, steps)
        d0 = weak_conditional_distribution(g, i, f, ctx.eps)
        rebuilt = np.array([reconstruct_output_probability(d0, g.eigenvalues, p, p_f0) for p in curve.phis])
        report.add_table("response", {"phi": curve.phis, "p_direct": curve.probabilities, "p_reconstructed": rebuilt})
        sc["weak_value.imag"] = weak_value(g, i, f, ctx.eps).imag
        sc["weak_value.imag_fd"] = imaginary_weak_value_fd(i, f, g, flags.get("fd_step") or DEFAULT_FD_STEP, ctx.eps)
        sc["response.max_reconstruction_error"] = float(np.max(np.abs(rebuilt - curve.probabilities)))
    elif command == "umax":
        b = ctx.observable("basis", "basis", "observable")
        u, achieved = max_transition_unitary(b, i, f, ctx.eps)
        terms_abs = np.abs(np.conj(b.coefficients(f)) * b.coefficients(i))
        sc["umax.achieved_probability"] = achieved
        sc["umax.verified_probability"] = abs(inner(f, u.apply(i))) ** 2
        report.add_table("umax", {"m": np.arange(b.dim), "phase": u.phases, "term_abs": terms_abs})
    return report


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--out", choices=("csv", "json"), default="json")
    p.add_argument("--out-path", help="directory for report files (default: stdout)")
    p.add_argument("--seed", type=int, help="seed for 'random' states")
    p.add_argument("--epsilon", type=float, help="orthogonality threshold")


def _add_fp(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mass", type=float)
    p.add_argument("--hbar", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--length", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--normalization", choices=fp.NORMALIZATION_MODES, default="numeric")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weakdyn", description="Weak values and their unitary response.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("weak-value", help="complex weak value of an observable")
    p.add_argument("--observable")
    p.add_argument("--initial")
    p.add_argument("--final")
    p.add_argument("--fd-step", type=float)

    p = sub.add_parser("dist", help="weak conditional probabilities over a basis")
    p.add_argument("--basis", help="observable name or 'standard'")
    p.add_argument("--initial")
    p.add_argument("--final")

    p = sub.add_parser("shift", help="conditional probabilities after exp(-i phi A)")
    p.add_argument("--phi", type=float)
    p.add_argument("--basis", help="observable name or 'standard'")
    p.add_argument("--initial")
    p.add_argument("--final")

    p = sub.add_parser("response", help="transition probability versus phi")
    p.add_argument("--generator")
    p.add_argument("--phi-min", type=float)
    p.add_argument("--phi-max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--fd-step", type=float)
    p.add_argument("--initial")
    p.add_argument("--final")

    p = sub.add_parser("tension", help="phase of <f|m><m|i><i|f>")
    p.add_argument("--i")
    p.add_argument("--m")
    p.add_argument("--f")

    p = sub.add_parser("umax", help="diagonal unitary maximizing the i -> f transition")
    p.add_argument("--basis", help="observable name or 'standard'")
    p.add_argument("--initial")
    p.add_argument("--final")

    p = sub.add_parser("free-particle", help="conditional position density of the pinned free particle")
    _add_fp(p)
    p.add_argument("--kick", type=float, default=0.0)

    p = sub.add_parser("kick", help="free-particle density after a momentum kick")
    _add_fp(p)
    p.add_argument("--delta-p", type=float, required=True)

    for p in sub.choices.values():
        _add_common(p)
    return parser


def _load_scenario(path: Optional[str]) -> Optional[Scenario]:
    if path is None:
        return None
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read scenario {path}: {exc.strerror}") from None
    return parse_scenario(data)


def run(argv: Optional[list[str]] = None) -> bytes:
    args = build_parser().parse_args(argv)
    flags = vars(args)
    report = execute(args.command, flags, _load_scenario(args.scenario))
    if args.out_path:
        out = Path(args.out_path)
        out.mkdir(parents=True, exist_ok=True)
        for name, data in report_files(report, args.out).items():
            (out / name).write_bytes(data)
        return b""
    return write_report(report, args.out)


def main(argv: Optional[list[str]] = None) -> int:
    try:
        data = run(argv)
    except WeakDynError as exc:
        print(f"weakdyn: error: {exc}", file=sys.stderr)
        return exc.exit_code
    try:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return 0


if __name__ == "__main__":
    sys.exit(main())

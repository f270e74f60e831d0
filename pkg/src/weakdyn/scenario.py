"""Scenario documents: JSON with complex numbers written as [re, im] pairs.

    {
      "dim": 2,
      "states": {"i": [[0.7071, 0], [0.7071, 0]], "r": "random"},
      "observables": {"Z": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]},
      "options": {"epsilon": 1e-12, "seed": 7, "initial": "i",
                  "free_particle": {"points": 8192}}
    }

A state given as the string "random" is drawn from the run seed.
Options may name default states/observables for the command flags
(initial, final, observable, basis, generator, i, m, f); those names are
checked when the document is parsed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ParseError, ValidationError
from .freeparticle import FreeParticleConfig

STATE_REF_OPTIONS = ("initial", "final", "i", "m", "f")
OBSERVABLE_REF_OPTIONS = ("observable", "generator")
BASIS_REF_OPTIONS = ("basis",)
FREE_PARTICLE_KEYS = ("mass", "hbar", "tau", "length", "points")
RANDOM = "random"


@dataclass
class Scenario:
    dim: int
    states: dict[str, Any] = field(default_factory=dict)
    observables: dict[str, np.ndarray] = field(default_factory=dict)
    options: dict[str, Any] = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        if self.dim != other.dim or self.options != other.options:
            return False
        if self.states.keys() != other.states.keys() or self.observables.keys() != other.observables.keys():
            return False
        for k, v in self.states.items():
            w = other.states[k]
            if isinstance(v, str) or isinstance(w, str):
                if v != w:
                    return False
            elif not np.array_equal(v, w):
                return False
        return all(np.array_equal(v, other.observables[k]) for k, v in self.observables.items())


def _complex(value, where: str) -> complex:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise ParseError(f"{where}: complex numbers are written as a two-element [re, im] array, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def _vector(raw, where: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{where}: expected a non-empty list of [re, im] amplitudes")
    return np.array([_complex(a, f"{where}[{k}]") for k, a in enumerate(raw)], dtype=complex)


def _matrix(raw, where: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{where}: expected a list of rows of [re, im] entries")
    rows = [_vector(row, f"{where}[{r}]") for r, row in enumerate(raw)]
    if len({row.size for row in rows}) != 1:
        raise ParseError(f"{where}: rows must all have the same length")
    return np.array(rows)


def parse_scenario(text: bytes | str) -> Scenario:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"scenario is not valid UTF-8: {exc.reason}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object")
    unknown = set(doc) - {"dim", "states", "observables", "options"}
    if unknown:
        raise ParseError(f"unknown top-level keys: {', '.join(sorted(unknown))}")

    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValidationError(f"dim must be a positive integer, got {dim!r}")

    states: dict[str, Any] = {}
    for name, raw in (doc.get("states") or {}).items():
        if raw == RANDOM:
            states[name] = RANDOM
            continue
        vec = _vector(raw, f"states.{name}")
        if vec.size != dim:
            raise ValidationError(f"state {name!r} has {vec.size} amplitudes, expected dim = {dim}")
        if not np.linalg.norm(vec) > 0:
            raise ValidationError(f"state {name!r} is the zero vector")
        states[name] = vec

    observables: dict[str, np.ndarray] = {}
    for name, raw in (doc.get("observables") or {}).items():
        mat = _matrix(raw, f"observables.{name}")
        if mat.shape != (dim, dim):
            raise ValidationError(f"observable {name!r} has shape {mat.shape}, expected ({dim}, {dim})")
        observables[name] = mat

    options = doc.get("options") or {}
    if not isinstance(options, dict):
        raise ParseError("options must be a JSON object")
    scenario = Scenario(dim, states, observables, options)
    validate_options(scenario)
    return scenario


def validate_options(s: Scenario) -> None:
    opts = s.options
    for key in STATE_REF_OPTIONS:
        if key in opts and opts[key] not in s.states:
            raise ValidationError(f"options.{key} references undefined state {opts[key]!r}")
    for key in OBSERVABLE_REF_OPTIONS:
        if key in opts and opts[key] not in s.observables:
            raise ValidationError(f"options.{key} references undefined observable {opts[key]!r}")
    for key in BASIS_REF_OPTIONS:
        if key in opts and opts[key] != "standard" and opts[key] not in s.observables:
            raise ValidationError(f"options.{key} references undefined observable {opts[key]!r}")
    if "epsilon" in opts:
        e = opts["epsilon"]
        if not isinstance(e, (int, float)) or isinstance(e, bool) or not (math.isfinite(e) and e > 0):
            raise ValidationError(f"options.epsilon must be a positive number, got {e!r}")
    if "seed" in opts and (not isinstance(opts["seed"], int) or isinstance(opts["seed"], bool)):
        raise ValidationError(f"options.seed must be an integer, got {opts['seed']!r}")
    fp = opts.get("free_particle", {})
    if not isinstance(fp, dict) or set(fp) - set(FREE_PARTICLE_KEYS):
        raise ValidationError(f"options.free_particle accepts only {', '.join(FREE_PARTICLE_KEYS)}")
    FreeParticleConfig(**fp)


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "dim": s.dim,
        "states": {k: v if isinstance(v, str) else [_pair(a) for a in v] for k, v in s.states.items()},
        "observables": {k: [[_pair(a) for a in row] for row in m] for k, m in s.observables.items()},
        "options": s.options,
    }


def serialize_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2)


def canonical_bytes(s: Scenario) -> bytes:
    return json.dumps(scenario_to_dict(s), sort_keys=True, separators=(",", ":")).encode("utf-8")

"""Run configuration: JSON schema, parsing, and defaults.

The configuration file is JSON.  Exact rationals are strings ("1/5",
"0.5"); the sequence is either explicit or geometric::

    {
      "epsilon": "1/5",
      "sequence": {"kind": "geometric", "base": 6, "length": 44},
      "weights": {"even": "0.5", "odd": "0.5"},
      "tolerances": {
        "measure": "1e-9",
        "ratio": "1e-6",
        "divergence_factor": 2.0,
        "little_o": 1e-3,
        "offset": 0.5
      },
      "max_index": 10,
      "parallel_scan": false,
      "probe": {"curves": [2, 4], "target": "even"}
    }

``tolerances``, ``parallel_scan`` and ``probe`` are optional.  Schema
violations raise :class:`ConfigError` (usage errors, exit code 2);
sequence-constraint violations are verdict failures reported by the
commands themselves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .curves import RSequence, validate_sequence


class ConfigError(ValueError):
    """Malformed configuration file (schema level)."""


@dataclass(frozen=True)
class Tolerances:
    measure: Fraction
    ratio: Fraction
    divergence_factor: float
    little_o: float
    offset: float


DEFAULT_TOLERANCES = Tolerances(
    measure=Fraction(1, 10**9),
    ratio=Fraction(1, 10**6),
    divergence_factor=2.0,
    little_o=1e-3,
    offset=0.5,
)


@dataclass(frozen=True)
class RunConfig:
    epsilon: Fraction
    sequence_kind: str
    sequence_base: int | None
    sequence_length: int | None
    sequence_explicit: tuple[int, ...] | None
    weight_even: Fraction
    weight_odd: Fraction
    tolerances: Tolerances
    max_index: int
    parallel_scan: bool
    probe_curves: tuple[int, int]
    probe_target: str

    def build_sequence(self) -> RSequence:
        """Validate and return the configured sequence.

        Raises :class:`lamtrack.curves.SequenceValidationError` on
        constraint violations (a verdict failure, not a usage error).
        """
        if self.sequence_kind == "geometric":
            assert self.sequence_base is not None and self.sequence_length is not None
            r = tuple(self.sequence_base**i for i in range(1, self.sequence_length + 1))
        else:
            assert self.sequence_explicit is not None
            r = self.sequence_explicit
        return validate_sequence(self.epsilon, r)


def _fraction(value, where: str) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: not a rational: {value!r}") from exc


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    try:
        epsilon = _fraction(data["epsilon"], "epsilon")
        seq = data["sequence"]
        weights = data["weights"]
    except KeyError as exc:
        raise ConfigError(f"missing required key: {exc.args[0]}") from exc

    if not isinstance(seq, dict) or "kind" not in seq:
        raise ConfigError("sequence: need an object with a 'kind'")
    kind = seq["kind"]
    base = length = None
    explicit = None
    if kind == "geometric":
        try:
            base = int(seq["base"])
            length = int(seq["length"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("sequence: geometric needs integer 'base' and 'length'") from exc
    elif kind == "explicit":
        try:
            explicit = tuple(int(x) for x in seq["r"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("sequence: explicit needs an integer list 'r'") from exc
    else:
        raise ConfigError(f"sequence: unknown kind {kind!r}")

    if not isinstance(weights, dict):
        raise ConfigError("weights: need an object with 'even' and 'odd'")
    try:
        w_even = _fraction(weights["even"], "weights.even")
        w_odd = _fraction(weights["odd"], "weights.odd")
    except KeyError as exc:
        raise ConfigError(f"weights: missing {exc.args[0]}") from exc
    if w_even < 0 or w_odd < 0:
        raise ConfigError("weights must be nonnegative")

    tols = data.get("tolerances", {})
    if not isinstance(tols, dict):
        raise ConfigError("tolerances: need an object")
    try:
        tolerances = Tolerances(
            measure=_fraction(tols.get("measure", "1/1000000000"), "tolerances.measure"),
            ratio=_fraction(tols.get("ratio", "1/1000000"), "tolerances.ratio"),
            divergence_factor=float(tols.get("divergence_factor", 2.0)),
            little_o=float(tols.get("little_o", 1e-3)),
            offset=float(tols.get("offset", 0.5)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"tolerances: {exc}") from exc
    if tolerances.measure <= 0 or tolerances.ratio <= 0:
        raise ConfigError("tolerances must be positive")

    try:
        max_index = int(data.get("max_index", 10))
    except (TypeError, ValueError) as exc:
        raise ConfigError("max_index: need an integer") from exc

    probe = data.get("probe", {})
    if not isinstance(probe, dict):
        raise ConfigError("probe: need an object")
    curves = probe.get("curves", [2, 4])
    if (
        not isinstance(curves, (list, tuple))
        or len(curves) != 2
        or not all(isinstance(c, int) for c in curves)
    ):
        raise ConfigError("probe.curves: need two integer curve indices")
    target = probe.get("target", "even")
    if target not in ("even", "odd"):
        raise ConfigError("probe.target: need 'even' or 'odd'")

    return RunConfig(
        epsilon=epsilon,
        sequence_kind=kind,
        sequence_base=base,
        sequence_length=length,
        sequence_explicit=explicit,
        weight_even=w_even,
        weight_odd=w_odd,
        tolerances=tolerances,
        max_index=max_index,
        parallel_scan=bool(data.get("parallel_scan", False)),
        probe_curves=(curves[0], curves[1]),
        probe_target=target,
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(data)

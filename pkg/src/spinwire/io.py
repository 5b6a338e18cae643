"""Run configuration and deterministic table serialization.

Tables go out as CSV (one header row, comma-separated, UTF-8, LF) or as
a single JSON object with ``metadata`` and ``columns`` members.  All
numbers are written with a fixed number of significant digits (12 by
default) so reruns of the same configuration are byte-identical.
"""

import json
from dataclasses import dataclass, fields
from math import log

import numpy as np

from .chain import ChainSpec, XState, make_bell, make_one_excitation_x, \
    make_thermal_correlated

DEFAULT_PRECISION = 12

#: columns measured in nats that the --bits display flag rescales
ENTROPY_COLUMNS = ("entropy", "info_flux")

UNITS = {"hbar": 1, "energy": "J", "time": "1/J"}


@dataclass
class RunConfig:
    """Everything one command run depends on; round-trips through JSON."""

    n: int = 10
    omega: float = 1.0
    j: float = 1.0
    profile: str = "pst"
    family: str = "thermal"
    beta: float = 0.0
    alpha: float = 0.0
    kind: str = "phi+"
    a: float = 0.0
    b: float = 0.5
    c: float = 0.5
    w: complex = 0.0
    z: complex = 0.0
    steps: int = 2000
    t_max: object = None
    y: int = 3
    times: object = None
    engine: str = "sector"
    out: object = None
    format: str = "csv"
    precision: int = DEFAULT_PRECISION
    bits: bool = False
    plot: bool = False

    def chain_spec(self):
        return ChainSpec(
            n_sites=self.n, omega=self.omega, j_scale=self.j, profile=self.profile
        )

    def state(self):
        """Initial pair state described by the family fields."""
        if self.family == "thermal":
            return make_thermal_correlated(self.beta, self.omega, self.alpha)
        if self.family == "one-exc":
            return make_one_excitation_x(self.b, self.c, self.alpha)
        if self.family == "bell":
            return make_bell(self.kind)
        if self.family == "x":
            d = 1.0 - self.a - self.b - self.c
            return XState(
                a=self.a, b=self.b, c=self.c, d=d,
                w=complex(self.w), z=complex(self.z),
            )
        raise ValueError(
            f"unknown family {self.family!r}; expected thermal, one-exc, bell, or x"
        )

    def validate(self):
        """Run the constructor validations; raises ValueError on bad input."""
        self.chain_spec()
        self.state()
        if self.steps < 2:
            raise ValueError(f"need at least 2 grid points, got steps={self.steps}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.precision < 1:
            raise ValueError(f"precision must be >= 1, got {self.precision}")
        return self

    def to_dict(self):
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, complex):
                value = [value.real, value.imag]
            elif isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("w", "z"):
            if key in kwargs and isinstance(kwargs[key], (list, tuple)):
                kwargs[key] = complex(kwargs[key][0], kwargs[key][1])
        if "times" in kwargs and isinstance(kwargs["times"], list):
            kwargs["times"] = tuple(kwargs["times"])
        return cls(**kwargs)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=False)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def format_number(value, precision=DEFAULT_PRECISION):
    """Fixed-significant-digit decimal form used by every writer."""
    return f"{value:.{precision}g}"


def _json_safe(value, precision):
    if isinstance(value, complex):
        return [_json_safe(value.real, precision), _json_safe(value.imag, precision)]
    if isinstance(value, (bool, str, int, type(None))):
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not np.isfinite(v):
            return None
        return float(format_number(v, precision))
    if isinstance(value, dict):
        return {k: _json_safe(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_safe(v, precision) for v in value]
    return str(value)


def _apply_bits(columns, metadata):
    converted = dict(columns)
    scale = 1.0 / log(2.0)
    for name in ENTROPY_COLUMNS:
        if name in converted:
            converted[name] = np.asarray(converted[name], dtype=float) * scale
    metadata = dict(metadata)
    metadata["entropy_units"] = "bits"
    return converted, metadata


def write_table(path, columns, metadata, fmt="csv", precision=DEFAULT_PRECISION,
                bits=False):
    """Write named columns plus metadata to ``path`` deterministically.

    ``columns`` maps name -> array-like (numeric or strings), written in
    insertion order.  ``bits`` rescales entropy-based columns from nats
    to bits at serialization time only.
    """
    metadata = dict(metadata)
    metadata.setdefault("entropy_units", "nats")
    metadata["units"] = UNITS
    if bits:
        columns, metadata = _apply_bits(columns, metadata)
    lengths = {len(np.atleast_1d(col)) for col in columns.values()}
    if len(lengths) > 1:
        raise ValueError(f"column lengths differ: {sorted(lengths)}")
    if fmt == "csv":
        _write_csv(path, columns, precision)
    elif fmt == "json":
        _write_json(path, columns, metadata, precision)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _cell(value, precision):
    if isinstance(value, (str, np.str_)):
        return str(value)
    return format_number(float(value), precision)


def _write_csv(path, columns, precision):
    names = list(columns)
    arrays = [np.atleast_1d(columns[name]) for name in names]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*arrays):
            fh.write(",".join(_cell(v, precision) for v in row) + "\n")


def _write_json(path, columns, metadata, precision):
    payload = {
        "metadata": _json_safe(metadata, precision),
        "columns": {
            name: _json_safe(np.atleast_1d(col).tolist(), precision)
            for name, col in columns.items()
        },
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False, allow_nan=False)
        fh.write("\n")

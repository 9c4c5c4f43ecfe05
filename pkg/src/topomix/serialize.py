"""CSV ingestion and the JSON mixture document."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import __version__
from .bandwidth import TdeResult
from .errors import InvalidInputError, ParseError
from .grid_density import Grid, GridDensity
from .mixture import Mixture, js_divergence
from .unimodal import ucat

FORMAT = "topomix.mixture/1"


def _read_text(source: Union[str, Path, io.TextIOBase]) -> str:
    if hasattr(source, "read"):
        return source.read()
    return Path(source).read_text()


def _rows(text: str):
    """Yield ``(line_number, fields)`` for nonblank lines."""
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        fields = [c.strip() for c in row]
        if any(fields):
            yield lineno, fields


def _floats(fields, lineno):
    try:
        return [float(c) for c in fields]
    except ValueError:
        raise ParseError(f"not a number: {','.join(fields)!r}", lineno) from None


def _is_numeric(fields) -> bool:
    try:
        [float(c) for c in fields]
    except ValueError:
        return False
    return True


def parse_sample(text: str) -> np.ndarray:
    """One value per line; a single non-numeric first line is taken as a header."""
    values = []
    for i, (lineno, fields) in enumerate(_rows(text)):
        if i == 0 and not _is_numeric(fields):
            continue
        if len(fields) != 1:
            raise ParseError(f"expected one value, found {len(fields)}", lineno)
        values.extend(_floats(fields, lineno))
    x = np.array(values, dtype=float)
    if x.size == 0:
        raise InvalidInputError("no sample values found")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("sample contains non-finite values")
    return x


def parse_density(text: str, rtol: float = 1e-6) -> GridDensity:
    """``x,value`` rows on equally spaced, strictly increasing cell midpoints."""
    xs, vs = [], []
    for i, (lineno, fields) in enumerate(_rows(text)):
        if i == 0 and not _is_numeric(fields):
            continue
        if len(fields) != 2:
            raise ParseError(f"expected two columns x,value, found {len(fields)}", lineno)
        x, v = _floats(fields, lineno)
        xs.append(x)
        vs.append(v)
    if not xs:
        raise InvalidInputError("no density rows found")
    x = np.array(xs)
    if x.size == 1:
        raise InvalidInputError("a density needs at least two rows")
    steps = np.diff(x)
    if np.any(steps <= 0):
        bad = int(np.flatnonzero(steps <= 0)[0]) + 1
        raise InvalidInputError(f"x values must be strictly increasing (row {bad + 1})")
    dx = (x[-1] - x[0]) / (x.size - 1)
    if np.max(np.abs(steps - dx)) > rtol * dx:
        raise InvalidInputError("x values must be equally spaced")
    v = np.array(vs)
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise InvalidInputError("density values must be finite and nonnegative")
    return GridDensity(Grid(float(x[0] - dx / 2), float(dx), x.size), v)


def read_sample(source) -> np.ndarray:
    return parse_sample(_read_text(source))


def read_density(source) -> GridDensity:
    return parse_density(_read_text(source))


def looks_like_density(text: str) -> bool:
    """True when the first data row has two columns."""
    for i, (_, fields) in enumerate(_rows(text)):
        if i == 0 and not _is_numeric(fields):
            continue
        return len(fields) == 2
    return False


@dataclass
class MixtureDocument:
    mixture: Mixture
    j_nats: float
    ucat: int
    tde: Optional[dict] = None
    provenance: dict = field(default_factory=dict)
    panel: Optional[str] = None

    @classmethod
    def build(
        cls,
        mixture: Mixture,
        tde: Optional[TdeResult] = None,
        delta_h: Optional[float] = None,
        provenance: Optional[dict] = None,
        panel: Optional[str] = None,
    ) -> "MixtureDocument":
        tde_dict = None
        if tde is not None:
            tde_dict = tde.as_dict()
            tde_dict["delta_h"] = delta_h
        prov = {"tool": "topomix", "version": __version__}
        prov.update(provenance or {})
        return cls(mixture, js_divergence(mixture), ucat(mixture.density), tde_dict, prov, panel)

    def to_dict(self) -> dict:
        g = self.mixture.grid
        d = {
            "format": FORMAT,
            "grid": {"x0": g.x0, "dx": g.dx, "n_cells": g.n_cells},
            "weights": self.mixture.weights.tolist(),
            "pi": self.mixture.pi.tolist(),
            "modes": self.mixture.modes().tolist(),
            "j_nats": self.j_nats,
            "ucat": self.ucat,
            "tde": self.tde,
            "provenance": self.provenance,
        }
        if self.panel is not None:
            d["panel"] = self.panel
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "MixtureDocument":
        if d.get("format") != FORMAT:
            raise ParseError(f"unsupported document format {d.get('format')!r}")
        try:
            grid = Grid(d["grid"]["x0"], d["grid"]["dx"], d["grid"]["n_cells"])
            mixture = Mixture(grid, np.array(d["weights"], dtype=float))
            return cls(
                mixture,
                float(d["j_nats"]),
                int(d["ucat"]),
                d.get("tde"),
                d.get("provenance", {}),
                d.get("panel"),
            )
        except KeyError as e:
            raise ParseError(f"missing field {e}") from None

    @classmethod
    def from_json(cls, text: str) -> "MixtureDocument":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise ParseError(str(e), e.lineno) from None


def stacked_rows(mixture: Mixture, panel: Optional[str] = None) -> list[list]:
    """Rows of ``x`` followed by cumulative component sums, ready for an area plot."""
    cum = np.cumsum(mixture.weights, axis=0)
    x = mixture.grid.midpoints
    head = [] if panel is None else [panel]
    return [head + [float(x[k])] + cum[:, k].tolist() for k in range(x.size)]


def stacked_csv(mixtures: dict[str, Mixture]) -> str:
    width = max(m.n_components for m in mixtures.values())
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["panel", "x"] + [f"cum_{i + 1}" for i in range(width)])
    for name, m in mixtures.items():
        out.writerows(stacked_rows(m, name))
    return buf.getvalue()

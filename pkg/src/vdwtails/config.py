"""TOML run configuration: parsing with line-numbered errors and canonical output.

Layout::

    [units]
    c = 137.035999

    [atom.A]
    levels = [["n", 0.0], ["m", -0.1], ["v", 0.4]]
    dipoles = [["n", "m", 1.0, 0.0, 0.0], ["n", "v", 0.0, 1.0, 0.0]]

    [atom.B]
    file = "ground_atom.toml"      # or inline levels/dipoles

    [pair]
    ref_a = "n"
    ref_b = "g"
    identical = false
    axis = [0.0, 0.0, 1.0]
    prescription = "feynman"

    [grid]
    min = 10.0
    max = 10000.0
    points = 64
    spacing = "log"

    [output]
    csv = "curve.csv"
    json = "curve.json"
    channels = ["wick", "pole", "width"]

    [quadrature]                   # optional
    rel_tol = 1e-12

Level energies are absolute; differences are taken by the engine. For
identical atoms [atom.B] may be omitted.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .errors import InputError, VdwError
from .model import SPEED_OF_LIGHT_AU, AtomModel, PairSystem, UnitsSystem
from .polarizability import Prescription

CHANNELS = ("wick", "pole", "width")
SPACINGS = ("linear", "log")
QUADRATURE_KEYS = ("rel_tol", "abs_tol", "max_subdivisions")
SECTIONS = ("units", "atom", "pair", "grid", "output", "quadrature")


class ConfigError(InputError):
    """Configuration problem, optionally tied to a line of the source text."""

    def __init__(self, message: str, line: Optional[int] = None, source: str = "config"):
        self.line = line
        self.source = source
        prefix = f"{source}:{line}: " if line else f"{source}: "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class GridSpec:
    min: float
    max: float
    points: int
    spacing: str = "log"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(math.log10(self.min), math.log10(self.max), self.points)
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class AtomSource:
    model: AtomModel
    file: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    atom_a: AtomSource
    atom_b: Optional[AtomSource]
    ref_a: str
    ref_b: str
    grid: GridSpec
    identical: bool = False
    axis: tuple = (0.0, 0.0, 1.0)
    prescription: str = Prescription.FEYNMAN.value
    c: float = SPEED_OF_LIGHT_AU
    channels: tuple = CHANNELS
    csv_name: str = "curve.csv"
    json_name: str = "curve.json"
    quadrature: tuple = ()
    base_dir: str = field(default=".", compare=False)

    def pair(self) -> PairSystem:
        atom_b = self.atom_b.model if self.atom_b is not None else self.atom_a.model
        return PairSystem(
            self.atom_a.model, atom_b, self.ref_a, self.ref_b, self.identical, UnitsSystem(self.c), self.axis
        )

    def quadrature_overrides(self) -> dict:
        return dict(self.quadrature)

    def sha256(self) -> str:
        return hashlib.sha256(dumps(self).encode("utf-8")).hexdigest()


# --- locating keys for error messages -----------------------------------------


def _locate(text: str, section: Optional[str], key: Optional[str] = None) -> Optional[int]:
    """1-based line of ``key`` inside ``[section]`` (or of the header itself)."""
    if not text:
        return None
    lines = text.splitlines()
    header = re.compile(r"^\s*\[\s*([^\]]+?)\s*\]\s*(#.*)?$")
    current = None
    header_line = None
    for no, line in enumerate(lines, start=1):
        m = header.match(line)
        if m:
            current = re.sub(r"\s+", "", m.group(1))
            if current == section:
                header_line = no
            continue
        if key is not None and current == section and re.match(rf"^\s*{re.escape(key)}\s*=", line):
            return no
    return header_line


class _Reader:
    def __init__(self, data: dict, text: str, source: str):
        self.data = data
        self.text = text
        self.source = source

    def fail(self, message, section=None, key=None):
        raise ConfigError(message, _locate(self.text, section, key), self.source)

    def table(self, name, required=True) -> dict:
        parts = name.split(".")
        node = self.data
        for part in parts:
            if not isinstance(node, dict) or part not in node:
                if required:
                    self.fail(f"missing section [{name}]")
                return {}
            node = node[part]
        if not isinstance(node, dict):
            self.fail(f"[{name}] must be a table", name)
        return node

    def get(self, section, table, key, kind, default=None, required=False):
        if key not in table:
            if required:
                self.fail(f"missing key {key!r}", section)
            return default
        value = table[key]
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                self.fail(f"{section}.{key} must be a number", section, key)
            value = float(value)
            if not math.isfinite(value):
                self.fail(f"{section}.{key} must be finite", section, key)
        elif kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                self.fail(f"{section}.{key} must be an integer", section, key)
        elif not isinstance(value, kind):
            self.fail(f"{section}.{key} has the wrong type", section, key)
        return value

    def check_keys(self, section, table, allowed):
        for key in table:
            if key not in allowed:
                self.fail(f"unknown key {key!r} in [{section}]", section, key)


def _parse_atom(reader: _Reader, section: str, table: dict, base_dir: Path) -> AtomSource:
    reader.check_keys(section, table, ("levels", "dipoles", "file"))
    file_ref = reader.get(section, table, "file", str)
    if file_ref is not None:
        if "levels" in table or "dipoles" in table:
            reader.fail("give either file or inline levels/dipoles, not both", section, "file")
        path = base_dir / file_ref
        try:
            text = path.read_text()
        except OSError as exc:
            reader.fail(f"cannot read atom file {file_ref!r}: {exc.strerror}", section, "file")
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(str(exc), None, str(path)) from None
        sub = _Reader(data, text, str(path))
        sub.check_keys("<top>", data, ("levels", "dipoles"))
        model = _atom_from_lists(sub, None, data)
        return AtomSource(model, file_ref)
    return AtomSource(_atom_from_lists(reader, section, table))


def _atom_from_lists(reader: _Reader, section, table) -> AtomModel:
    levels = table.get("levels")
    if not isinstance(levels, list) or not levels:
        reader.fail("levels must be a non-empty list of [label, energy] entries", section, "levels")
    entries = []
    for item in levels:
        ok = isinstance(item, list) and len(item) in (2, 3) and isinstance(item[0], str)
        ok = ok and isinstance(item[1], (int, float)) and not isinstance(item[1], bool)
        ok = ok and (len(item) == 2 or isinstance(item[2], str))
        if not ok:
            reader.fail(f"bad level entry {item!r}; expected [label, energy] or [label, energy, tag]", section, "levels")
        entries.append(tuple(item))
    dipoles = table.get("dipoles", [])
    if not isinstance(dipoles, list):
        reader.fail("dipoles must be a list", section, "dipoles")
    dips = []
    for item in dipoles:
        ok = isinstance(item, list) and len(item) == 5 and all(isinstance(s, str) for s in item[:2])
        ok = ok and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item[2:])
        if not ok:
            reader.fail(f"bad dipole entry {item!r}; expected [from, to, dx, dy, dz]", section, "dipoles")
        dips.append((item[0], item[1], tuple(float(v) for v in item[2:])))
    try:
        return AtomModel.build(entries, dips)
    except InputError as exc:
        reader.fail(str(exc), section, "levels")


def loads(text: str, base_dir=".", source: str = "config") -> RunConfig:
    """Parse configuration text.

    Raises:
        ConfigError: with the offending line number where it can be located.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(exc), None, source) from None
    reader = _Reader(data, text, source)
    for name in data:
        if name not in SECTIONS:
            reader.fail(f"unknown section [{name}]", name)
    base = Path(base_dir)

    units = reader.table("units", required=False)
    reader.check_keys("units", units, ("c",))
    c = reader.get("units", units, "c", float, SPEED_OF_LIGHT_AU)
    if c <= 0:
        reader.fail("units.c must be positive", "units", "c")

    atoms = reader.table("atom")
    reader.check_keys("atom", atoms, ("A", "B"))
    atom_a = _parse_atom(reader, "atom.A", reader.table("atom.A"), base)
    atom_b = None
    if "B" in atoms:
        atom_b = _parse_atom(reader, "atom.B", reader.table("atom.B"), base)

    pair = reader.table("pair")
    reader.check_keys("pair", pair, ("ref_a", "ref_b", "identical", "axis", "prescription"))
    ref_a = reader.get("pair", pair, "ref_a", str, required=True)
    ref_b = reader.get("pair", pair, "ref_b", str, required=True)
    identical = reader.get("pair", pair, "identical", bool, False)
    axis = reader.get("pair", pair, "axis", list, [0.0, 0.0, 1.0])
    if len(axis) != 3 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in axis):
        reader.fail("pair.axis must be a list of three numbers", "pair", "axis")
    prescription = reader.get("pair", pair, "prescription", str, Prescription.FEYNMAN.value)
    if prescription not in (p.value for p in Prescription):
        reader.fail(f"unknown prescription {prescription!r}", "pair", "prescription")
    if atom_b is None and not identical:
        reader.fail("[atom.B] is required unless pair.identical = true", "pair", "identical")
    for key, ref, source in (("ref_a", ref_a, atom_a), ("ref_b", ref_b, atom_b or atom_a)):
        if ref not in source.model.labels:
            reader.fail(f"pair.{key}: unknown level {ref!r}", "pair", key)

    grid = reader.table("grid")
    reader.check_keys("grid", grid, ("min", "max", "points", "spacing"))
    gmin = reader.get("grid", grid, "min", float, required=True)
    gmax = reader.get("grid", grid, "max", float, required=True)
    points = reader.get("grid", grid, "points", int, required=True)
    spacing = reader.get("grid", grid, "spacing", str, "log")
    if gmin <= 0:
        reader.fail("grid.min must be positive", "grid", "min")
    if not gmin < gmax:
        reader.fail("grid.min must be smaller than grid.max", "grid", "max")
    if points < 2:
        reader.fail("grid.points must be at least 2", "grid", "points")
    if spacing not in SPACINGS:
        reader.fail(f"grid.spacing must be one of {', '.join(SPACINGS)}", "grid", "spacing")

    output = reader.table("output", required=False)
    reader.check_keys("output", output, ("csv", "json", "channels"))
    csv_name = reader.get("output", output, "csv", str, "curve.csv")
    json_name = reader.get("output", output, "json", str, "curve.json")
    channels = reader.get("output", output, "channels", list, list(CHANNELS))
    for ch in channels:
        if ch not in CHANNELS:
            reader.fail(f"unknown channel {ch!r}; valid channels are {', '.join(CHANNELS)}", "output", "channels")
    if len(set(channels)) != len(channels):
        reader.fail("duplicate channel names", "output", "channels")

    quad = reader.table("quadrature", required=False)
    reader.check_keys("quadrature", quad, QUADRATURE_KEYS)
    overrides = []
    for key in QUADRATURE_KEYS:
        if key in quad:
            kind = int if key == "max_subdivisions" else float
            value = reader.get("quadrature", quad, key, kind)
            if value <= 0:
                reader.fail(f"quadrature.{key} must be positive", "quadrature", key)
            overrides.append((key, value))

    cfg = RunConfig(
        atom_a=atom_a,
        atom_b=atom_b,
        ref_a=ref_a,
        ref_b=ref_b,
        grid=GridSpec(gmin, gmax, points, spacing),
        identical=identical,
        axis=tuple(float(v) for v in axis),
        prescription=prescription,
        c=c,
        channels=tuple(c for c in CHANNELS if c in channels),
        csv_name=csv_name,
        json_name=json_name,
        quadrature=tuple(overrides),
        base_dir=str(base),
    )
    try:
        cfg.pair()
    except VdwError as exc:
        reader.fail(str(exc), "pair")
    return cfg


def load(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc.strerror}", None, str(path)) from None
    return loads(text, base_dir=path.parent, source=str(path))


def _atom_table(source: AtomSource) -> dict:
    if source.file is not None:
        return {"file": source.file}
    levels = []
    for lvl in source.model.levels:
        entry = [lvl.label, lvl.energy]
        if lvl.symmetry_tag is not None:
            entry.append(lvl.symmetry_tag)
        levels.append(entry)
    dipoles = [[d.from_label, d.to_label, *d.d_vector] for d in source.model.dipoles]
    return {"levels": levels, "dipoles": dipoles}


def to_dict(cfg: RunConfig) -> dict:
    atoms = {"A": _atom_table(cfg.atom_a)}
    if cfg.atom_b is not None:
        atoms["B"] = _atom_table(cfg.atom_b)
    data = {
        "units": {"c": cfg.c},
        "atom": atoms,
        "pair": {
            "ref_a": cfg.ref_a,
            "ref_b": cfg.ref_b,
            "identical": cfg.identical,
            "axis": list(cfg.axis),
            "prescription": cfg.prescription,
        },
        "grid": {"min": cfg.grid.min, "max": cfg.grid.max, "points": cfg.grid.points, "spacing": cfg.grid.spacing},
        "output": {"csv": cfg.csv_name, "json": cfg.json_name, "channels": list(cfg.channels)},
    }
    if cfg.quadrature:
        data["quadrature"] = dict(cfg.quadrature)
    return data


def dumps(cfg: RunConfig) -> str:
    """Canonical TOML text; ``loads(dumps(cfg)) == cfg``."""
    return tomli_w.dumps(to_dict(cfg))


def with_grid(cfg: RunConfig, **kwargs) -> RunConfig:
    return replace(cfg, grid=replace(cfg.grid, **kwargs))

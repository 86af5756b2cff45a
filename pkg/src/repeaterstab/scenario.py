"""YAML scenario files.

A scenario is a mapping with the sections ``deployment``, ``channel``,
``frequency_grid``, ``analysis`` and one optional section per command
(``bound``, ``coverage``, ``echo``). Every section except ``deployment``
may be omitted. See ``scenarios/`` in the repository for one example per
command.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path

import yaml

from .channel import FreeSpaceLOS
from .deployment import (Deployment, make_custom, make_grid, make_multicell, make_pair,
                         make_ring, make_ring_even)
from .errors import InvalidInputError, RepeaterError
from .stability import FrequencyGrid

__all__ = ["ScenarioError", "Scenario", "load_scenario", "parse_scenario"]


class ScenarioError(InvalidInputError):
    """Malformed or inconsistent scenario file; the message names the offending line."""


class _LineDict(dict):
    line: int = 0

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.lines: dict[str, int] = {}


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    out = _LineDict()
    out.line = node.start_mark.line + 1
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        out[key] = loader.construct_object(value_node, deep=True)
        out.lines[key] = key_node.start_mark.line + 1
    return out


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)
# YAML 1.1 rejects "2.0e9" (no exponent sign) as a float
_LineLoader.yaml_implicit_resolvers = {k: list(v) for k, v in yaml.SafeLoader.yaml_implicit_resolvers.items()}
_LineLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^[-+]?(?:[0-9][0-9_]*\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                |[0-9][0-9_]*[eE][-+]?[0-9]+
                |[-+]?\.(?:inf|Inf|INF)
                |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."))

SECTIONS = {
    "deployment": {"kind", "d", "N", "R", "W", "s", "M", "positions", "source"},
    "channel": {"carrier_frequency", "speed_of_light"},
    "frequency_grid": {"carrier", "bandwidth", "spacing"},
    "analysis": {"alpha_lo", "alpha_hi", "relative_to_alpha_g", "n_alpha", "eps_stab", "rtol"},
    "bound": {"W", "spacings", "cells"},
    "coverage": {"N_list", "R", "gamma_db", "gamma_convention", "delta_max"},
    "echo": {"alpha", "beta", "tau", "d", "sample_rate", "duration", "input"},
}

ANALYSIS_DEFAULTS = {"alpha_lo": 0.1, "alpha_hi": 10.0, "relative_to_alpha_g": True,
                     "n_alpha": 200, "eps_stab": None, "rtol": 1e-3}


@dataclass
class Scenario:
    """Parsed scenario with the raw tree kept for the CSV parameter echo."""

    source_name: str
    sha256: str
    raw: dict
    deployment: Deployment | None
    channel: FreeSpaceLOS
    grid: FrequencyGrid
    analysis: dict
    sections: dict

    def echo_params(self) -> str:
        return json.dumps(_plain(self.raw), sort_keys=True, separators=(",", ":"))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_plain(v) for v in obj]
    return obj


class _Ctx:
    def __init__(self, name: str):
        self.name = name

    def fail(self, where: dict | None, key: str | None, msg: str):
        line = None
        if isinstance(where, _LineDict):
            line = where.lines.get(key, where.line) if key is not None else where.line
        loc = f"{self.name}:{line}" if line else self.name
        raise ScenarioError(f"{loc}: {msg}")

    def number(self, sec: dict, key: str, *, default=None, integer=False, positive=False,
               nonneg=False, path: str = ""):
        if key not in sec:
            if default is None:
                self.fail(sec, None, f"missing required key {path}{key}")
            return default
        v = sec[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(sec, key, f"{path}{key} must be a number, got {v!r}")
        if integer and int(v) != v:
            self.fail(sec, key, f"{path}{key} must be an integer, got {v!r}")
        if positive and not v > 0:
            self.fail(sec, key, f"{path}{key} must be > 0, got {v!r}")
        if nonneg and not v >= 0:
            self.fail(sec, key, f"{path}{key} must be >= 0, got {v!r}")
        return int(v) if integer else float(v)

    def number_list(self, sec: dict, key: str, *, integer=False, path: str = "") -> list:
        v = sec.get(key)
        if not isinstance(v, list) or not v:
            self.fail(sec, key, f"{path}{key} must be a non-empty list")
        out = []
        for item in v:
            if isinstance(item, bool) or not isinstance(item, (int, float)) or (integer and int(item) != item):
                self.fail(sec, key, f"{path}{key} contains invalid entry {item!r}")
            out.append(int(item) if integer else float(item))
        return out


def _section(ctx: _Ctx, root: dict, name: str, required: bool = False) -> dict:
    if name not in root:
        if required:
            ctx.fail(root, None, f"missing section {name!r}")
        return _LineDict()
    sec = root[name]
    if not isinstance(sec, dict):
        ctx.fail(root, name, f"section {name!r} must be a mapping")
    for key in sec:
        if key not in SECTIONS[name]:
            ctx.fail(sec, key, f"unknown key {name}.{key}")
    return sec


def _deployment(ctx: _Ctx, sec: dict) -> Deployment:
    kind = sec.get("kind")
    p = "deployment."
    try:
        if kind == "pair":
            return make_pair(ctx.number(sec, "d", positive=True, path=p))
        if kind == "ring":
            N = ctx.number(sec, "N", integer=True, path=p)
            R = ctx.number(sec, "R", positive=True, path=p)
            return make_ring(N, R) if N % 2 else make_ring_even(N, R)
        if kind == "grid":
            return make_grid(ctx.number(sec, "W", positive=True, path=p),
                             ctx.number(sec, "s", positive=True, path=p))
        if kind == "multicell":
            return make_multicell(ctx.number(sec, "M", integer=True, path=p),
                                  ctx.number(sec, "W", positive=True, path=p),
                                  ctx.number(sec, "s", positive=True, path=p))
        if kind == "custom":
            pts = sec.get("positions")
            if not isinstance(pts, list) or not pts:
                ctx.fail(sec, "positions", "deployment.positions must be a non-empty list of [x, y]")
            for pt in pts:
                if not (isinstance(pt, list) and len(pt) == 2
                        and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in pt)):
                    ctx.fail(sec, "positions", f"invalid position {pt!r}; expected [x, y]")
            return make_custom(pts, sec.get("source", [0.0, 0.0]))
    except ScenarioError:
        raise
    except InvalidInputError as exc:
        ctx.fail(sec, None, f"invalid {kind} deployment: {exc}")
    ctx.fail(sec, "kind" if "kind" in sec else None,
             f"deployment.kind must be one of pair, ring, grid, multicell, custom; got {kind!r}")


def parse_scenario(text: str, name: str = "<scenario>") -> Scenario:
    """Parse and validate scenario text; raise :class:`ScenarioError` on any problem."""
    ctx = _Ctx(name)
    try:
        root = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f"{name}:{mark.line + 1}" if mark is not None else name
        raise ScenarioError(f"{loc}: YAML syntax error: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(root, dict):
        raise ScenarioError(f"{name}: top level must be a mapping")
    for key in root:
        if key not in SECTIONS:
            ctx.fail(root, key, f"unknown section {key!r}")

    dep_sec = _section(ctx, root, "deployment")
    deployment = _deployment(ctx, dep_sec) if "deployment" in root else None

    ch_sec = _section(ctx, root, "channel")
    try:
        channel = FreeSpaceLOS(
            ctx.number(ch_sec, "carrier_frequency", default=2.0e9, positive=True, path="channel."),
            ctx.number(ch_sec, "speed_of_light", default=3.0e8, positive=True, path="channel."))
    except RepeaterError as exc:
        if isinstance(exc, ScenarioError):
            raise
        ctx.fail(ch_sec, None, str(exc))

    g_sec = _section(ctx, root, "frequency_grid")
    try:
        grid = FrequencyGrid(
            ctx.number(g_sec, "carrier", default=channel.carrier_frequency, positive=True, path="frequency_grid."),
            ctx.number(g_sec, "bandwidth", default=20.0e6, nonneg=True, path="frequency_grid."),
            ctx.number(g_sec, "spacing", default=10.0e3, positive=True, path="frequency_grid."))
    except InvalidInputError as exc:
        if isinstance(exc, ScenarioError):
            raise
        ctx.fail(g_sec, None, f"invalid frequency grid: {exc}")

    a_sec = _section(ctx, root, "analysis")
    analysis = dict(ANALYSIS_DEFAULTS)
    for key in ("alpha_lo", "alpha_hi"):
        if key in a_sec:
            analysis[key] = ctx.number(a_sec, key, nonneg=True, path="analysis.")
    if "n_alpha" in a_sec:
        analysis["n_alpha"] = ctx.number(a_sec, "n_alpha", integer=True, path="analysis.")
        if analysis["n_alpha"] < 2:
            ctx.fail(a_sec, "n_alpha", "analysis.n_alpha must be >= 2")
    for key in ("eps_stab", "rtol"):
        # an explicit null keeps the default
        if a_sec.get(key) is not None:
            analysis[key] = ctx.number(a_sec, key, positive=True, path="analysis.")
    if "relative_to_alpha_g" in a_sec:
        if not isinstance(a_sec["relative_to_alpha_g"], bool):
            ctx.fail(a_sec, "relative_to_alpha_g", "analysis.relative_to_alpha_g must be true or false")
        analysis["relative_to_alpha_g"] = a_sec["relative_to_alpha_g"]
    if not analysis["alpha_lo"] < analysis["alpha_hi"]:
        ctx.fail(a_sec, "alpha_hi" if "alpha_hi" in a_sec else None, "analysis.alpha_lo must be < alpha_hi")

    sections = {}
    if "bound" in root:
        b = _section(ctx, root, "bound")
        sections["bound"] = {
            "W": ctx.number(b, "W", default=2000.0, positive=True, path="bound."),
            "spacings": ctx.number_list(b, "spacings", path="bound."),
            "cells": ctx.number_list(b, "cells", integer=True, path="bound."),
        }
        if any(s <= 0 or s > sections["bound"]["W"] for s in sections["bound"]["spacings"]):
            ctx.fail(b, "spacings", "bound.spacings must lie in (0, W]")
        if any(m < 1 for m in sections["bound"]["cells"]):
            ctx.fail(b, "cells", "bound.cells must be >= 1")
    if "coverage" in root:
        c = _section(ctx, root, "coverage")
        n_list = ctx.number_list(c, "N_list", integer=True, path="coverage.")
        if any(n < 2 or n % 2 for n in n_list):
            ctx.fail(c, "N_list", "coverage.N_list entries must be even and >= 2")
        conv = c.get("gamma_convention", "power")
        if conv not in ("power", "amplitude"):
            ctx.fail(c, "gamma_convention", "coverage.gamma_convention must be 'power' or 'amplitude'")
        sections["coverage"] = {
            "N_list": n_list,
            "R": ctx.number(c, "R", positive=True, path="coverage."),
            "gamma_db": ctx.number(c, "gamma_db", path="coverage."),
            "gamma_convention": conv,
            "delta_max": (None if c.get("delta_max") is None
                          else ctx.number(c, "delta_max", positive=True, path="coverage.")),
        }
    if "echo" in root:
        e = _section(ctx, root, "echo")
        echo = {
            "alpha": ctx.number(e, "alpha", nonneg=True, path="echo."),
            "sample_rate": ctx.number(e, "sample_rate", positive=True, path="echo."),
            "duration": ctx.number(e, "duration", positive=True, path="echo."),
            "input": e.get("input", "impulse"),
        }
        if "d" in e:
            d = ctx.number(e, "d", positive=True, path="echo.")
            echo["beta"] = ctx.number(e, "beta", default=channel.path_gain(d), nonneg=True, path="echo.")
            echo["tau"] = ctx.number(e, "tau", default=channel.delay(d), positive=True, path="echo.")
        else:
            echo["beta"] = ctx.number(e, "beta", nonneg=True, path="echo.")
            echo["tau"] = ctx.number(e, "tau", positive=True, path="echo.")
        if echo["input"] not in ("impulse", "file"):
            ctx.fail(e, "input", "echo.input must be 'impulse' or 'file'")
        sections["echo"] = echo

    return Scenario(name, hashlib.sha256(text.encode()).hexdigest(), root, deployment, channel, grid,
                    analysis, sections)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read scenario: {exc.strerror}") from None
    return parse_scenario(text, str(path.name))


def fail_at(scn: Scenario, section: str, key: str | None, msg: str) -> None:
    """Raise a :class:`ScenarioError` pointing at ``section.key`` in the original file."""
    sec = scn.raw.get(section, scn.raw)
    _Ctx(scn.source_name).fail(sec, key, msg)

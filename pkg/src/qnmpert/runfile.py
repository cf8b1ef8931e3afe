"""Declarative run files: TOML, nested sections, strict key checking."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import RunFileError

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

_SCENARIOS = ("solve", "perturb", "bump-sweep", "mu-scaling", "pt-demo")

_SCHEMA = {
    "potential": {"kind", "v0", "b"},
    "mode": {"root_index", "j", "branch"},
    "perturbation": {"kind", "x0", "width", "height", "mu"},
    "sweep": {"start", "stop", "count", "log"},
    "solver": {"ode_tol", "quad_tol", "l_radius", "k_max", "a",
               "subtract_asymptotics", "order", "match_point"},
    "output": {"csv", "diagnostics", "figures"},
}
_POSITIVE = {"v0", "b", "width", "ode_tol", "quad_tol", "l_radius", "a"}


@dataclass
class RunFile:
    scenario: str
    potential: dict = field(default_factory=dict)
    mode: dict = field(default_factory=dict)
    perturbation: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    path: str = ""

    def solver_get(self, key, default):
        return self.solver.get(key, default)


def _validate_section(name: str, data: dict, path):
    allowed = _SCHEMA[name]
    for key, value in data.items():
        if key not in allowed:
            raise RunFileError(f"{path}: unknown key '{key}' in [{name}]")
        if key in _POSITIVE and not (isinstance(value, (int, float)) and value > 0):
            raise RunFileError(f"{path}: [{name}] {key} must be a positive number")


def load_runfile(path) -> RunFile:
    """Parse and validate a run file; unknown keys are rejected."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise RunFileError(f"cannot read run file {path}: {exc}") from exc
    try:
        data = _toml.loads(raw.decode("utf-8"))
    except (_toml.TOMLDecodeError, UnicodeDecodeError) as exc:
        # TOMLDecodeError messages carry line/column positions
        raise RunFileError(f"{path}: {exc}") from exc

    scenario = data.pop("scenario", None)
    if scenario not in _SCENARIOS:
        raise RunFileError(
            f"{path}: scenario must be one of {', '.join(_SCENARIOS)}; got {scenario!r}")
    sections = {}
    for name in _SCHEMA:
        sec = data.pop(name, {})
        if not isinstance(sec, dict):
            raise RunFileError(f"{path}: [{name}] must be a table")
        _validate_section(name, sec, path)
        sections[name] = sec
    if data:
        raise RunFileError(f"{path}: unknown top-level keys {sorted(data)}")

    kind = sections["potential"].get("kind")
    if kind not in (None, "step", "poschl_teller"):
        raise RunFileError(f"{path}: potential kind must be 'step' or 'poschl_teller'")
    pkind = sections["perturbation"].get("kind")
    if pkind not in (None, "bump", "width"):
        raise RunFileError(f"{path}: perturbation kind must be 'bump' or 'width'")
    return RunFile(scenario=scenario, path=str(path), **sections)

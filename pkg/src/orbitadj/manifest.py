"""Flat key-value manifests describing one command-line run.

Every file-producing command drops one of these next to its output so a
run can be audited later: what command ran, on which inputs, with which
parameters, how long each phase took, and what warnings surfaced.  The
format is one ``key<TAB>value`` pair per line - trivially greppable and
parseable from any language.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import InputError

__all__ = ["RunManifest", "parse_manifest"]


@dataclass
class RunManifest:
    """Everything worth recording about one successful run."""

    command: str
    inputs: list[str] = field(default_factory=list)
    params: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    version: str = __version__

    def set_param(self, name: str, value) -> None:
        self.params[name] = str(value)

    def add_timings(self, phases: dict[str, float], prefix: str = "") -> None:
        for phase, seconds in phases.items():
            self.timings[prefix + phase] = float(seconds)

    def to_text(self) -> str:
        lines = [f"command\t{self.command}", f"version\t{self.version}"]
        lines += [f"input.{i}\t{p}" for i, p in enumerate(self.inputs)]
        lines += [f"param.{k}\t{v}" for k, v in self.params.items()]
        lines += [
            f"timing.{phase}_s\t{seconds:.6f}"
            for phase, seconds in self.timings.items()
        ]
        lines += [f"warning.{i}\t{w}" for i, w in enumerate(self.warnings)]
        for line in lines:
            key, _, value = line.partition("\t")
            if "\t" in value or "\n" in value:
                raise InputError(f"manifest value for {key!r} contains a tab/newline")
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")


def parse_manifest(text: str) -> RunManifest:
    """Inverse of ``RunManifest.to_text`` (modulo float formatting)."""
    command = None
    version = ""
    inputs: dict[int, str] = {}
    warnings: dict[int, str] = {}
    params: dict[str, str] = {}
    timings: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        key, sep, value = raw.partition("\t")
        if not sep:
            raise InputError(f"manifest line {lineno}: expected key<TAB>value")
        if key == "command":
            command = value
        elif key == "version":
            version = value
        elif key.startswith("input."):
            inputs[int(key[6:])] = value
        elif key.startswith("param."):
            params[key[6:]] = value
        elif key.startswith("timing.") and key.endswith("_s"):
            timings[key[7:-2]] = float(value)
        elif key.startswith("warning."):
            warnings[int(key[8:])] = value
        else:
            raise InputError(f"manifest line {lineno}: unknown key {key!r}")
    if command is None:
        raise InputError("manifest is missing the 'command' line")
    return RunManifest(
        command=command,
        inputs=[inputs[i] for i in sorted(inputs)],
        params=params,
        timings=timings,
        warnings=[warnings[i] for i in sorted(warnings)],
        version=version,
    )

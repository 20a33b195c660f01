"""Experiment configuration and file formats.

A config is one JSON (or TOML, when a toml parser is available) document
with up to three sections:

``map``
    Torus map parameters: ``eigenvalues`` (list of ints), and for a
    deformed map ``eps``, ``r`` (dimension 2), ``gamma1``, ``gamma2``,
    ``slope``.  Omit everything but ``eigenvalues`` for the linear model.
``sft``
    Explicit subshift: either ``{"path": "doc.json"}`` pointing at a
    matrix document or the document inlined.  When absent, commands that
    need a shift induce one from the map's Markov partition.
``run``
    Orbit length ``N``, ensemble size ``seeds``, master ``seed``,
    ``grid_per_axis``, optional overrides ``c`` and ``gamma0``, the
    low-variation ``rho``, sampling ``trials``, Gibbs ``max_len``,
    contraction ``probes``, and an optional ``potential`` spec for induced
    shifts (``{"constant": v}`` or ``{"depth": k, "values": {...}}``).

A matrix document is ``{"d": int, "rows": [[0/1, ...]], "potential":
{"depth": k, "values": {"word": value}}}`` with words written as digit
strings over the states ``0..d-1`` (so at most 10 states when a potential
is present).  A config plus the package version determines every output
byte; nothing time-dependent is ever written.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import sft, torus

__all__ = [
    "load_config",
    "build_map",
    "build_sft",
    "build_potential",
    "load_sft_document",
    "save_sft_document",
    "DEFAULT_RUN",
]

DEFAULT_RUN = {
    "N": 100000,
    "seeds": 100,
    "seed": 20240,
    "grid_per_axis": 512,
    "rho": 0.5,
    "trials": 1000,
    "max_len": 8,
    "probes": 2,
    "deep_times": 10,
    "eps0_grid": 512,
    "gamma0_seeds": 1000,
    "gamma0_len": 100000,
}


def load_config(path) -> dict:
    """Parse a JSON or TOML config file into a plain dict."""
    path = Path(path)
    data = path.read_bytes()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib  # python >= 3.11
        except ModuleNotFoundError:
            try:
                import tomli as tomllib
            except ModuleNotFoundError as exc:
                raise ValueError("no TOML parser available; use a JSON config") from exc
        return tomllib.loads(data.decode())
    return json.loads(data.decode())


def run_params(cfg: dict) -> dict:
    out = dict(DEFAULT_RUN)
    out.update(cfg.get("run", {}))
    return out


def build_map(cfg: dict) -> torus.TorusMap:
    """Torus map from the ``map`` section."""
    try:
        spec = cfg["map"]
        ev = tuple(int(v) for v in spec["eigenvalues"])
    except KeyError as exc:
        raise ValueError(f"config is missing map data: {exc}") from exc
    if "eps" not in spec:
        return torus.make_linear_map(ev)
    return torus.make_deformed_map(
        ev,
        eps=float(spec["eps"]),
        r=float(spec["r"]) if "r" in spec else None,
        gamma1=float(spec.get("gamma1", 0.05)),
        gamma2=float(spec.get("gamma2", 0.06)),
        slope=float(spec["slope"]) if "slope" in spec else None,
    )


def _parse_word(word: str, d: int) -> tuple:
    symbols = tuple(int(ch) for ch in str(word))
    if any(s >= d for s in symbols):
        raise ValueError(f"word {word!r} uses states outside 0..{d - 1}")
    return symbols


def load_sft_document(doc: dict):
    """(TransitionMatrix, potential or None) from a matrix document."""
    d = int(doc["d"])
    A = sft.TransitionMatrix(doc["rows"])
    if A.d != d:
        raise ValueError("declared d does not match the row count")
    phi = None
    if doc.get("potential") is not None:
        if d > 10:
            raise ValueError("word syntax supports at most 10 states")
        pot = doc["potential"]
        depth = int(pot["depth"])
        values = {_parse_word(w, d): float(v) for w, v in pot["values"].items()}
        phi = sft.LocallyConstantPotential(depth, values)
    return A, phi


def save_sft_document(A: sft.TransitionMatrix, phi=None) -> dict:
    doc = {"d": A.d, "rows": A.entries.tolist(), "potential": None}
    if phi is not None:
        doc["potential"] = {
            "depth": phi.depth,
            "values": {"".join(str(s) for s in w): v for w, v in phi.values.items()},
        }
    return doc


def build_sft(cfg: dict, base_dir=None):
    """Explicit shift from the ``sft`` section, or None when absent."""
    spec = cfg.get("sft")
    if spec is None:
        return None
    if "path" in spec:
        path = Path(spec["path"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return load_sft_document(json.loads(path.read_text()))
    return load_sft_document(spec)


def build_potential(spec, d: int):
    """Potential from a run-section spec, for a shift with ``d`` states."""
    if spec is None:
        return sft.LocallyConstantPotential.zero(d)
    if "constant" in spec:
        return sft.LocallyConstantPotential.constant(d, float(spec["constant"]))
    depth = int(spec.get("depth", 1))
    values = {_parse_word(w, d): float(v) for w, v in spec["values"].items()}
    return sft.LocallyConstantPotential(depth, values)

"""Scenario files: a single JSON document describing one reproducible run.

Every knob is in the file (or overridden on the command line); defaults are
materialized by normalize() so --print-config shows the exact effective
configuration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .control import MultiplierModel
from .dynamics import SimConfig
from .graph import Graph, GraphSpec, build_clustered, build_erdos_renyi, load_graph_csv
from .kernel import KernelParams

__all__ = ["ScenarioError", "Scenario", "load_scenario", "normalize"]

_STREAM_X0 = 0x78300000


class ScenarioError(ValueError):
    """Scenario file failed to parse or validate; message is path-anchored."""


_GRAPH_DEFAULTS = {
    "kind": "erdos-renyi",
    "n": 10,
    "p": 0.2,
    "weight": 1.0,
    "k": 0.0,
    "clusters": 2,
    "p_in": 0.3,
    "p_out": 0.02,
    "stubborn_fraction": 0.0,
    "stubborn_k": 1.0,
    "default_k": 0.0,
    "default_weight": 1.0,
    "seed": 0,
    "edges": None,
    "nodes": None,
}

_SIM_DEFAULTS = {
    "horizon": 1.0,
    "step": 0.05,
    "sigma": 0.0,
    "alpha": 0.0,
    "kernel": {"theta1": 0.0, "theta2": 0.0},
    "x0": {"kind": "uniform"},
    "seed": 0,
    "clamp": False,
    "model": "fj",
    "workers": 1,
}

_OUTPUT_DEFAULTS = {
    "trajectories": True,
    "controls": False,
    "costs": False,
    "kde_times": [],
    "picard": None,
    "sensitivity": None,
}


def _merge(defaults: dict, given: dict, where: str) -> dict:
    out = dict(defaults)
    for key, value in given.items():
        if key not in defaults:
            raise ScenarioError(f"{where}.{key}: unknown field")
        out[key] = value
    return out


def normalize(doc: dict) -> dict:
    """Fill defaults and reject unknown fields; returns the effective document."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario: top level must be a JSON object")
    known = {"name", "graph", "sim", "multiplier", "policy", "outputs"}
    for key in doc:
        if key not in known:
            raise ScenarioError(f"scenario.{key}: unknown field")
    out = {
        "name": doc.get("name", "scenario"),
        "graph": _merge(_GRAPH_DEFAULTS, doc.get("graph", {}), "graph"),
        "sim": _merge(_SIM_DEFAULTS, doc.get("sim", {}), "sim"),
        "multiplier": doc.get("multiplier"),
        "policy": _merge({"kind": "zero", "value": 0.0}, doc.get("policy", {}), "policy"),
        "outputs": _merge(_OUTPUT_DEFAULTS, doc.get("outputs", {}), "outputs"),
    }
    if isinstance(out["sim"].get("kernel"), dict):
        out["sim"]["kernel"] = _merge({"theta1": 0.0, "theta2": 0.0},
                                      out["sim"]["kernel"], "sim.kernel")
    return out


@dataclass
class Scenario:
    name: str
    graph: Graph
    sim: SimConfig
    multiplier: MultiplierModel | None
    policy_kind: str
    policy_value: float
    outputs: dict
    doc: dict = field(repr=False, default_factory=dict)

    @property
    def x0(self) -> np.ndarray:
        return self.sim.x0


def _build_graph(spec: dict, base_dir: Path) -> Graph:
    kind = spec["kind"]
    if kind == "erdos-renyi":
        return build_erdos_renyi(int(spec["n"]), float(spec["p"]),
                                 w=float(spec["weight"]), k=float(spec["k"]),
                                 seed=int(spec["seed"]))
    if kind == "clustered":
        gs = GraphSpec(kind="clustered", n=int(spec["n"]), clusters=int(spec["clusters"]),
                       p_in=float(spec["p_in"]), p_out=float(spec["p_out"]),
                       stubborn_fraction=float(spec["stubborn_fraction"]),
                       stubborn_k=float(spec["stubborn_k"]),
                       default_k=float(spec["default_k"]),
                       default_weight=float(spec["default_weight"]), seed=int(spec["seed"]))
        return build_clustered(gs)
    if kind == "explicit":
        if not spec["edges"] or not spec["nodes"]:
            raise ScenarioError("graph.edges/graph.nodes: explicit graphs need both CSV paths")
        return load_graph_csv(base_dir / spec["edges"], base_dir / spec["nodes"])
    raise ScenarioError(f"graph.kind: unknown generator {kind!r}")


def _build_x0(spec, n: int, seed: int) -> np.ndarray:
    if isinstance(spec, list):
        spec = {"kind": "explicit", "values": spec}
    kind = spec.get("kind", "uniform")
    if kind == "uniform":
        rng = np.random.default_rng(np.random.SeedSequence([_STREAM_X0, int(seed)]))
        return rng.uniform(0.0, 1.0, n)
    if kind == "constant":
        return np.full(n, float(spec.get("value", 0.5)))
    if kind == "explicit":
        values = np.asarray(spec.get("values", []), dtype=float)
        if values.shape != (n,):
            raise ScenarioError(f"sim.x0.values: expected {n} entries, got {values.size}")
        return values
    raise ScenarioError(f"sim.x0.kind: unknown kind {kind!r}")


def _build_alpha(spec):
    if isinstance(spec, dict):
        try:
            return (spec["times"], spec["values"])
        except KeyError as exc:
            raise ScenarioError(f"sim.alpha.{exc.args[0]}: missing") from None
    return float(spec)


def _build_multiplier(spec) -> MultiplierModel | None:
    if spec is None:
        return None
    kind = spec.get("kind", "linear")
    if kind == "linear":
        return MultiplierModel.linear(float(spec.get("lambda0", 0.0)),
                                      float(spec.get("rate", 0.0)))
    if kind == "tabulated":
        try:
            return MultiplierModel.tabulated(spec["times"], spec["values"])
        except KeyError as exc:
            raise ScenarioError(f"multiplier.{exc.args[0]}: missing") from None
    raise ScenarioError(f"multiplier.kind: unknown kind {kind!r}")


def from_document(doc: dict, base_dir: Path | str = ".",
                  seed_override: int | None = None,
                  workers_override: int | None = None) -> Scenario:
    """Validate the (raw) scenario document and construct all domain objects."""
    doc = normalize(doc)
    base_dir = Path(base_dir)
    try:
        graph = _build_graph(doc["graph"], base_dir)
    except (ValueError, OSError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"graph: {exc}") from exc

    sim = doc["sim"]
    seed = int(sim["seed"]) if seed_override is None else int(seed_override)
    workers = int(sim["workers"]) if workers_override is None else int(workers_override)
    n = graph.n
    try:
        kernel = KernelParams(float(sim["kernel"]["theta1"]), float(sim["kernel"]["theta2"]))
        x0 = _build_x0(sim["x0"], n, seed)
        cfg = SimConfig(
            n=n,
            horizon=float(sim["horizon"]),
            eps=float(sim["step"]),
            sigma=sim["sigma"],
            alpha=_build_alpha(sim["alpha"]),
            kernel=kernel,
            x0=x0,
            seed=seed,
            clamp=bool(sim["clamp"]),
            model=str(sim["model"]),
            workers=workers,
        )
    except ScenarioError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"sim: {exc}") from exc

    multiplier = _build_multiplier(doc["multiplier"])
    policy_kind = doc["policy"]["kind"]
    if policy_kind not in ("zero", "constant", "optimal"):
        raise ScenarioError(f"policy.kind: unknown kind {policy_kind!r}")
    if policy_kind == "optimal" and multiplier is None:
        raise ScenarioError("policy.kind: 'optimal' requires a multiplier section")

    outputs = doc["outputs"]
    for t in outputs["kde_times"]:
        if not 0.0 <= float(t) <= cfg.horizon + 1e-12:
            raise ScenarioError(f"outputs.kde_times: snapshot time {t} outside [0, horizon]")
    if outputs["picard"] is not None:
        pic = _merge({"tol": 1e-4, "max_iter": 10, "policy": "scenario"},
                     outputs["picard"], "outputs.picard")
        if pic["tol"] <= 0 or pic["max_iter"] < 1:
            raise ScenarioError("outputs.picard: tol must be > 0 and max_iter >= 1")
        if pic["policy"] not in ("scenario", "zero"):
            raise ScenarioError("outputs.picard.policy: must be 'scenario' or 'zero'")
        outputs = dict(outputs, picard=pic)
    if outputs["sensitivity"] is not None:
        sens = _merge(
            {"regime": "case1", "param": "x", "values": [], "base": {}},
            outputs["sensitivity"], "outputs.sensitivity",
        )
        if sens["regime"] not in ("case1", "case2"):
            raise ScenarioError("outputs.sensitivity.regime: must be 'case1' or 'case2'")
        if not sens["values"]:
            raise ScenarioError("outputs.sensitivity.values: empty grid")
        outputs = dict(outputs, sensitivity=sens)

    doc_effective = dict(doc)
    doc_effective["sim"] = dict(sim, seed=seed, workers=workers)
    return Scenario(
        name=str(doc["name"]),
        graph=graph,
        sim=cfg,
        multiplier=multiplier,
        policy_kind=policy_kind,
        policy_value=float(doc["policy"]["value"]),
        outputs=outputs,
        doc=doc_effective,
    )


def load_scenario(path, seed_override: int | None = None,
                  workers_override: int | None = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return from_document(doc, base_dir=path.parent, seed_override=seed_override,
                         workers_override=workers_override)

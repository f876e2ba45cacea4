"""JSON scenario files.

One structured format for six problem kinds, selected by a top-level
``"kind"`` key. A file carries exactly one of ``"body"`` (explicit data) or
``"generator"`` (a ``seed`` plus size parameters for the random generators).

Conventions inside ``body``:

* complex channel gains are ``[re, im]`` pairs;
* users, files and tags are 1-based; graph vertices are 0-based, like the
  solver output;
* a scalar is accepted wherever a per-user or per-link array is broadcast.

Example::

    {"kind": "ic", "body": {"files": 4, "wants": [[3], [1, 2], [2, 3]]}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .apps.coding import SideInformation, initial_broadcast
from .apps.cran import CranScenario, random_cran_scenario
from .apps.noma import NomaScenario, random_noma_scenario
from .apps.rfid import RfidScenario, geometric_scenario, random_rfid_scenario
from .graph import Graph, build_graph, parse_dimacs, random_graph
from .rng import substream

KINDS = ("graph", "noma", "ic", "idnc", "rfid", "cran")


class ScenarioError(ValueError):
    """Malformed scenario file."""


@dataclass(frozen=True)
class ScenarioFile:
    kind: str
    data: Any  # Graph, NomaScenario, SideInformation, RfidScenario or CranScenario
    generator: dict | None = None


def _complex_array(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ScenarioError("complex values must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _one_based(items, limit: int, what: str) -> frozenset[int]:
    out = set()
    for x in items:
        if not isinstance(x, int) or not 1 <= x <= limit:
            raise ScenarioError(f"{what} id {x!r} outside 1..{limit}")
        out.add(x - 1)
    return frozenset(out)


def _require(d: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in d]
    if missing:
        raise ScenarioError(f"missing field(s): {', '.join(missing)}")


# --- explicit bodies ---------------------------------------------------------


def _graph_body(b: dict) -> Graph:
    _require(b, "n")
    edges = [tuple(e) for e in b.get("edges", [])]
    if any(len(e) != 2 for e in edges):
        raise ScenarioError("edges must be [i, j] pairs")
    return build_graph(int(b["n"]), edges, b.get("weights"))


def _coding_body(b: dict) -> SideInformation:
    _require(b, "files")
    F = int(b["files"])
    if ("wants" in b) == ("has" in b):
        raise ScenarioError("give exactly one of 'wants' or 'has'")
    sets = [_one_based(s, F, "file") for s in b.get("wants", b.get("has"))]
    erasure = b.get("erasure", 0.0)
    if np.isscalar(erasure):
        erasure = [float(erasure)] * len(sets)
    if "has" in b:
        return SideInformation.from_has(F, sets, erasure)
    return SideInformation(F, tuple(sets), tuple(erasure))


def _noma_body(b: dict) -> NomaScenario:
    _require(b, "gains", "powers", "noise", "rate_min")
    h = _complex_array(b["gains"])
    if h.ndim != 2:
        raise ScenarioError("NOMA gains must be a users x channels matrix")
    U = h.shape[0]
    powers = np.broadcast_to(np.asarray(b["powers"], dtype=np.float64), (U,))
    rmin = np.broadcast_to(np.asarray(b["rate_min"], dtype=np.float64), (U,))
    return NomaScenario(
        h, powers, float(b["noise"]), float(b.get("gap", 1.0)), b.get("bandwidth", 1.0), rmin
    )


def _rfid_body(b: dict) -> RfidScenario:
    _require(b, "alpha")
    if "coverage" in b:
        _require(b, "tags")
        T = int(b["tags"])
        cov = tuple(tuple(_one_based(lvl, T, "tag") for lvl in reader) for reader in b["coverage"])
        pos, radii = b.get("reader_positions"), b.get("radii")
        return RfidScenario(T, cov, int(b["alpha"]), pos, None if radii is None else tuple(radii))
    _require(b, "reader_positions", "tag_positions", "radii")
    return geometric_scenario(
        b["reader_positions"],
        b["tag_positions"],
        b["radii"],
        int(b["alpha"]),
        reader_collisions=bool(b.get("reader_collisions", True)),
    )


def _cran_body(b: dict) -> CranScenario:
    _require(b, "gains", "powers", "noise")
    h = _complex_array(b["gains"])
    if h.ndim != 3:
        raise ScenarioError("CRAN gains must be an RRH x RRB x user tensor")
    return CranScenario(
        h,
        b["powers"],
        b.get("power_caps", b["powers"]),
        float(b["noise"]),
        float(b.get("gap", 1.0)),
        b.get("weights"),
    )


_BODY = {
    "graph": _graph_body,
    "noma": _noma_body,
    "ic": _coding_body,
    "idnc": _coding_body,
    "rfid": _rfid_body,
    "cran": _cran_body,
}


# --- generators --------------------------------------------------------------


def _gen_graph(gen: dict, rng: np.random.Generator, seed: int) -> Graph:
    return random_graph(int(gen["n"]), float(gen.get("density", 0.5)), rng, gen.get("weights", "unit"))


def _gen_coding(gen: dict, rng: np.random.Generator, seed: int) -> SideInformation:
    U, F = int(gen["users"]), int(gen["files"])
    eps = gen.get("erasure", 0.1)
    eps = [float(eps)] * U if np.isscalar(eps) else [float(e) for e in eps]
    if "p_has" in gen:
        has = rng.random((U, F)) < float(gen["p_has"])
        return SideInformation.from_has(F, [np.flatnonzero(row).tolist() for row in has], eps)
    return initial_broadcast(U, F, eps, seed)


def _gen_noma(gen: dict, rng: np.random.Generator, seed: int) -> NomaScenario:
    rmin = gen.get("rate_min", [0.5, 2.0])
    return random_noma_scenario(
        rng,
        int(gen["users"]),
        int(gen["channels"]),
        path_loss=float(gen.get("path_loss", 1.0)),
        power=float(gen.get("power", 1.0)),
        noise=float(gen.get("noise", 0.1)),
        gap=float(gen.get("gap", 1.0)),
        bandwidth=float(gen.get("bandwidth", 1.0)),
        rate_min=tuple(rmin) if isinstance(rmin, list) else float(rmin),
    )


def _gen_rfid(gen: dict, rng: np.random.Generator, seed: int) -> RfidScenario:
    return random_rfid_scenario(
        rng,
        int(gen["readers"]),
        int(gen["tags"]),
        int(gen.get("levels", 2)),
        alpha=int(gen.get("alpha", 3)),
        side=float(gen.get("side", 10.0)),
        reader_collisions=bool(gen.get("reader_collisions", False)),
    )


def _gen_cran(gen: dict, rng: np.random.Generator, seed: int) -> CranScenario:
    return random_cran_scenario(
        rng,
        int(gen["users"]),
        int(gen["rrhs"]),
        int(gen["rrbs"]),
        path_loss=float(gen.get("path_loss", 1.0)),
        power=float(gen.get("power", 1.0)),
        noise=float(gen.get("noise", 0.1)),
        gap=float(gen.get("gap", 1.0)),
    )


_GEN = {
    "graph": _gen_graph,
    "noma": _gen_noma,
    "ic": _gen_coding,
    "idnc": _gen_coding,
    "rfid": _gen_rfid,
    "cran": _gen_cran,
}


def generate(kind: str, gen: dict) -> Any:
    """Instantiate a random scenario; the stream is ``substream(seed, "scenario", kind)``."""
    if kind not in KINDS:
        raise ScenarioError(f"unknown kind {kind!r}")
    seed = gen.get("seed")
    if not isinstance(seed, int) or not 0 <= seed < 1 << 64:
        raise ScenarioError("generator seed must be a 64-bit unsigned integer")
    try:
        return _GEN[kind](gen, substream(seed, "scenario", kind), seed)
    except KeyError as exc:
        raise ScenarioError(f"generator block missing {exc.args[0]!r}") from None


def load_scenario_text(text: str) -> ScenarioFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ScenarioError(f"kind must be one of {KINDS}, got {kind!r}")
    if ("body" in doc) == ("generator" in doc):
        raise ScenarioError("give exactly one of 'body' or 'generator'")
    try:
        if "generator" in doc:
            return ScenarioFile(kind, generate(kind, doc["generator"]), dict(doc["generator"]))
        return ScenarioFile(kind, _BODY[kind](doc["body"]))
    except ScenarioError:
        raise
    except (TypeError, ValueError, KeyError, IndexError) as exc:
        raise ScenarioError(f"bad {kind} scenario: {exc}") from None


def load_scenario(path: str) -> ScenarioFile:
    with open(path, encoding="utf-8") as fh:
        return load_scenario_text(fh.read())


def load_graph_text(text: str) -> Graph:
    """A graph from DIMACS text or from a ``graph`` scenario file."""
    if text.lstrip().startswith("{"):
        sf = load_scenario_text(text)
        if sf.kind != "graph":
            raise ScenarioError(f"expected a graph scenario, got {sf.kind!r}")
        return sf.data
    return parse_dimacs(text)


def load_graph(path: str) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_graph_text(fh.read())


# --- writing -----------------------------------------------------------------


def _pairs(z: np.ndarray) -> list:
    return np.stack([z.real, z.imag], axis=-1).tolist()


def scenario_body(obj: Any) -> tuple[str, dict]:
    """Inverse of the body parsers: ``(kind, body)`` for a scenario object.

    Side information is always written as ``idnc`` (a superset of ``ic``).
    """
    if isinstance(obj, Graph):
        return "graph", {"n": obj.n, "edges": [list(e) for e in obj.edges()], "weights": list(obj.weights)}
    if isinstance(obj, SideInformation):
        wants = [sorted(f + 1 for f in w) for w in obj.wants]
        return "idnc", {"files": obj.n_files, "wants": wants, "erasure": list(obj.erasure)}
    if isinstance(obj, NomaScenario):
        return "noma", {
            "gains": _pairs(obj.gains),
            "powers": obj.powers.tolist(),
            "noise": obj.noise,
            "gap": obj.gap,
            "bandwidth": obj.bandwidth.tolist(),
            "rate_min": obj.rate_min.tolist(),
        }
    if isinstance(obj, RfidScenario):
        body = {
            "tags": obj.n_tags,
            "alpha": obj.alpha,
            "coverage": [[sorted(t + 1 for t in lvl) for lvl in reader] for reader in obj.coverage],
        }
        if obj.has_geometry:
            body["reader_positions"] = obj.reader_positions.tolist()
            body["radii"] = list(obj.radii)
        return "rfid", body
    if isinstance(obj, CranScenario):
        return "cran", {
            "gains": _pairs(obj.gains),
            "powers": obj.powers.tolist(),
            "power_caps": obj.power_caps.tolist(),
            "noise": obj.noise,
            "gap": obj.gap,
            "weights": obj.weights.tolist(),
        }
    raise TypeError(f"no scenario format for {type(obj).__name__}")


def dump_scenario(obj: Any, kind: str | None = None) -> str:
    auto, body = scenario_body(obj)
    return json.dumps({"kind": kind or auto, "body": body}, sort_keys=True)


__all__ = [
    "KINDS",
    "ScenarioError",
    "ScenarioFile",
    "dump_scenario",
    "generate",
    "load_graph",
    "load_graph_text",
    "load_scenario",
    "load_scenario_text",
    "scenario_body",
]

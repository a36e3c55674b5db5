"""JSON documents for ground spaces, functions, measures, laws and reports.

Every document is an object with ``kind`` and ``version`` fields and embeds
the ground space it lives on. Configurations are written as lists of site
labels (repeated labels for multisets). Complex values are ``[re, im]`` pairs;
exact rationals may be given as strings such as ``"3/4"``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .ground import GroundSpace, mask_sites, sites_mask
from .measures import FiniteConfigMeasure, ProcessLaw
from .star import RankedFunction
from .transforms import ObservableFunction

VERSION = 1


class FormatError(ValueError):
    pass


def _num(v) -> Any:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, int):
        return v
    return float(v)


def _complex_pair(v) -> list:
    if isinstance(v, Fraction):
        return [str(v), 0]
    c = complex(v)
    return [c.real, c.imag]


def _parse_real(v):
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError as e:
            raise FormatError(f"bad number {v!r}") from e
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FormatError(f"bad number {v!r}")
    return v


def _parse_value(v):
    if isinstance(v, list):
        if len(v) != 2:
            raise FormatError(f"complex values are [re, im] pairs, got {v!r}")
        re, im = _parse_real(v[0]), _parse_real(v[1])
        if im == 0:
            return re if isinstance(re, Fraction) else complex(re, 0.0)
        return complex(float(re), float(im))
    return _parse_real(v)


def space_to_doc(space: GroundSpace) -> dict:
    sites = []
    for i, label in enumerate(space.labels):
        row: dict[str, Any] = {"label": label, "weight": space.weights[i]}
        if space.coords is not None:
            row["coords"] = list(space.coords[i])
        sites.append(row)
    return {
        "sites": sites,
        "regions": {name: space.names(mask_sites(mask)) for name, mask in space.regions},
    }


def space_from_doc(doc: dict) -> GroundSpace:
    try:
        sites = doc["sites"]
        labels = [str(s["label"]) for s in sites]
        weights = [float(s.get("weight", 1.0)) for s in sites]
        coords = None
        if sites and all("coords" in s for s in sites):
            coords = tuple(tuple(float(c) for c in s["coords"]) for s in sites)
        index = {l: i for i, l in enumerate(labels)}
        regions = tuple((name, sites_mask(index[l] for l in members))
                        for name, members in doc.get("regions", {}).items())
        return GroundSpace(tuple(labels), tuple(weights), coords, regions)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"bad ground space: {e}") from e


def _config(space: GroundSpace, labels: list) -> tuple[int, ...]:
    try:
        return tuple(sorted(space.index(str(l)) for l in labels))
    except KeyError as e:
        raise FormatError(str(e)) from e


def _envelope(kind: str, space: GroundSpace, **body) -> dict:
    return {"kind": kind, "version": VERSION, "space": space_to_doc(space), **body}


def to_doc(obj) -> dict:
    if isinstance(obj, GroundSpace):
        return {"kind": "ground_space", "version": VERSION, **space_to_doc(obj)}
    if isinstance(obj, RankedFunction):
        ranks: dict[str, list] = {}
        for pts, v in obj.items():
            ranks.setdefault(str(len(pts)), []).append([obj.space.names(pts), *_complex_pair(v)])
        return _envelope("ranked_function", obj.space, max_rank=obj.max_rank, ranks=ranks)
    if isinstance(obj, ObservableFunction):
        vals = [[obj.space.names(mask_sites(m)), *_complex_pair(v)] for m, v in enumerate(obj.values.tolist())]
        return _envelope("observable_function", obj.space, values=vals)
    if isinstance(obj, FiniteConfigMeasure):
        ranks = {}
        for m, w in obj.items():
            ranks.setdefault(str(bin(m).count("1")), []).append([obj.space.names(mask_sites(m)), _num(w)])
        return _envelope("measure", obj.space, max_rank=obj.max_rank, ranks=ranks)
    if isinstance(obj, ProcessLaw):
        atoms = [[obj.space.names(mask_sites(m)), _num(v)] for m, v in enumerate(obj.probs.tolist()) if v != 0]
        return _envelope("law", obj.space, atoms=atoms)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_doc(doc: dict):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise FormatError("document has no 'kind' field")
    if doc.get("version") != VERSION:
        raise FormatError(f"unsupported version {doc.get('version')!r}")
    kind = doc["kind"]
    if kind == "ground_space":
        return space_from_doc(doc)
    if "space" not in doc:
        raise FormatError(f"{kind} document lacks its ground space")
    space = space_from_doc(doc["space"])
    try:
        if kind == "ranked_function":
            simple, multi = {}, {}
            for rank, rows in doc["ranks"].items():
                for labels, *val in rows:
                    pts = _config(space, labels)
                    if len(pts) != int(rank):
                        raise FormatError(f"configuration {labels} filed under rank {rank}")
                    v = _parse_value(val if len(val) == 2 else val[0])
                    if len(set(pts)) == len(pts):
                        simple[sites_mask(pts)] = v
                    else:
                        multi[pts] = v
            return RankedFunction(space, simple, multi, max_rank=doc.get("max_rank"))
        if kind == "observable_function":
            exact = False
            vals = {}
            for labels, *val in doc["values"]:
                v = _parse_value(val if len(val) == 2 else val[0])
                exact |= isinstance(v, Fraction)
                vals[sites_mask(_config(space, labels))] = v
            t = np.zeros(1 << space.n, dtype=object if exact else np.complex128)
            for m, v in vals.items():
                t[m] = v
            return ObservableFunction(space, t)
        if kind == "measure":
            atoms = {}
            for rank, rows in doc["ranks"].items():
                for labels, w in rows:
                    pts = _config(space, labels)
                    if len(set(pts)) != len(pts):
                        raise FormatError("measures live on simple configurations")
                    atoms[sites_mask(pts)] = _parse_real(w)
            return FiniteConfigMeasure(space, atoms, max_rank=doc.get("max_rank"))
        if kind == "law":
            atoms = {sites_mask(_config(space, labels)): _parse_real(p) for labels, p in doc["atoms"]}
            return ProcessLaw.from_atoms(space, atoms)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"bad {kind} document: {e}") from e
    raise FormatError(f"unknown kind {kind!r}")


def _plain(o):
    if isinstance(o, (np.bool_, np.integer, np.floating)):
        return o.item()
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=False, allow_nan=False, default=_plain) + "\n"


def save(obj, path: str | Path) -> None:
    doc = obj if isinstance(obj, dict) else to_doc(obj)
    Path(path).write_text(dumps(doc))


def load(path: str | Path, expect: str | None = None):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not JSON ({e})") from e
    if expect is not None and isinstance(doc, dict) and doc.get("kind") != expect:
        raise FormatError(f"{path}: expected a {expect} document, got {doc.get('kind')!r}")
    return from_doc(doc)

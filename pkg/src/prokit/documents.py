"""JSON documents for systems and morphisms.

One canonical serialization: key order fixed by construction, two-space
indent, trailing newline. Tables are lists of records keyed by "at",
because element ids may be tuples and JSON objects cannot key on those.
"""

from __future__ import annotations

import json
from dataclasses import replace

from .category import FINSET, MATMOD, get_backend
from .dmorphism import DelayMorphism, identity_morphism
from .errors import DocumentError, ProkitError
from .fuzz import (
    PlantSpec,
    gen_adversarial_sequence,
    gen_planted_level_iso,
    gen_planted_sequence,
    gen_strict_sequence,
)
from .indexset import FinitePoset, IndexPoset, NatPoset, NatSquarePoset, mardesic
from .system import DelaySystem

SYSTEM_FORMAT = "prokit/system-v1"
MORPHISM_FORMAT = "prokit/morphism-v1"


def key_from_json(k):
    """JSON id -> element id: lists become tuples, recursively."""
    if isinstance(k, list):
        return tuple(key_from_json(v) for v in k)
    if isinstance(k, bool) or not isinstance(k, (int, str)):
        raise DocumentError(f"invalid element id {k!r}")
    return k


def key_to_json(k):
    if isinstance(k, tuple):
        return [key_to_json(v) for v in k]
    return k


def canonical_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_json(path: str) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON: {exc}") from None


def _expect(cond, msg):
    if not cond:
        raise DocumentError(msg)


# ---------------------------------------------------------------------------
# Index blocks


def build_index(block) -> IndexPoset:
    _expect(isinstance(block, dict) and "kind" in block, "index block needs a 'kind'")
    kind = block["kind"]
    try:
        if kind == "finite":
            ids = [key_from_json(i) for i in block["elements"]]
            pairs = [
                (key_from_json(lo), key_from_json(hi)) for lo, hi in block.get("le", [])
            ]
            return FinitePoset(ids, pairs, name=block.get("name", "finite"))
        if kind == "nat":
            return NatPoset(block.get("limit"))
        if kind == "nat_square":
            return NatSquarePoset()
        if kind == "mardesic_of":
            return mardesic(build_index(block["base"]))
    except DocumentError:
        raise
    except (ProkitError, KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad index block ({kind}): {exc}") from None
    raise DocumentError(f"unknown index kind {kind!r}")


# ---------------------------------------------------------------------------
# System documents


def _payload_from_record(backend, rec):
    if backend == "finset":
        _expect("map" in rec, f"finset bond record needs 'map': {rec!r}")
        return tuple(rec["map"])
    _expect("rows" in rec, f"matmod bond record needs 'rows': {rec!r}")
    return tuple(tuple(row) for row in rec["rows"])


def _payload_to_record(backend, payload):
    if backend == "finset":
        return {"map": list(payload)}
    return {"rows": [list(r) for r in payload]}


def build_system(doc: dict) -> DelaySystem:
    _expect(isinstance(doc, dict), "system document must be an object")
    _expect(doc.get("format") == SYSTEM_FORMAT, f"expected format {SYSTEM_FORMAT!r}")
    cat_block = doc.get("category") or {}
    backend = cat_block.get("backend")
    _expect(backend in ("finset", "matmod"), f"unknown backend {backend!r}")
    idx = build_index(doc.get("index"))
    objects = doc.get("objects") or {}
    bonds = doc.get("bonds") or {}
    name = doc.get("name", "system")
    if bonds.get("mode") == "generated":
        _expect(
            objects.get("mode") == "generated",
            "generated bonds require generated objects",
        )
        return replace(_generated_system(backend, cat_block, idx, bonds), name=name)
    _expect(bonds.get("mode") == "explicit", "bonds block needs mode explicit|generated")
    _expect(objects.get("mode") == "explicit", "objects block needs mode explicit")
    if backend == "matmod":
        _expect("modulus" in cat_block, "matmod category needs a modulus")
        modulus = int(cat_block["modulus"])
    obj_table = {}
    try:
        for rec in objects["table"]:
            at = key_from_json(rec["at"])
            if backend == "finset":
                obj_table[at] = FINSET.obj(tuple(rec["points"]))
            else:
                obj_table[at] = MATMOD.obj(int(rec["dim"]), modulus)
    except DocumentError:
        raise
    except (ProkitError, KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad objects table: {exc}") from None
    bond_table = {}
    try:
        for rec in bonds["table"]:
            lo, hi = (key_from_json(v) for v in rec["at"])
            bond_table[(lo, hi)] = _payload_from_record(backend, rec)
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad bonds table: {exc}") from None
    cat = get_backend(backend)

    def object_at(e):
        if e.id not in obj_table:
            raise DocumentError(f"{name}: no object at {e.id!r}")
        return obj_table[e.id]

    mors = {}

    def bond_at(lo, hi):
        key = (lo.id, hi.id)
        if key not in mors:
            if key in bond_table:
                try:
                    mors[key] = cat.mor(object_at(hi), object_at(lo), bond_table[key])
                except ProkitError as exc:
                    raise DocumentError(f"{name}: bad bond at {key!r}: {exc}") from None
            elif lo.id == hi.id:
                mors[key] = cat.identity(object_at(lo))
            else:
                raise DocumentError(f"{name}: no bond at {key!r}")
        return mors[key]

    return DelaySystem(idx, backend, object_at, bond_at, name=name)


def _generated_system(backend, cat_block, idx, bonds) -> DelaySystem:
    gen = bonds.get("generator")
    spec = PlantSpec(
        length=idx.limit if isinstance(idx, NatPoset) and idx.limit else 2,
        seed=int(bonds.get("seed", 0)),
        backend=backend,
        delay_profile=tuple(bonds["delay_profile"]) if "delay_profile" in bonds else None,
        max_points=int(bonds.get("max_points", 6)),
        max_dim=int(bonds.get("max_dim", 4)),
        modulus=int(cat_block.get("modulus", 5)),
    )
    try:
        if gen in ("strict", "planted"):
            _expect(
                isinstance(idx, NatPoset) and idx.limit is not None,
                f"generator {gen!r} needs index {{'kind': 'nat', 'limit': L}}",
            )
            if gen == "strict":
                return gen_strict_sequence(spec)
            system, _ = gen_planted_sequence(spec)
            return system
        if gen == "adversarial":
            _expect(
                isinstance(idx, NatPoset) and idx.limit is None,
                "generator 'adversarial' needs index {'kind': 'nat'} without limit",
            )
            return gen_adversarial_sequence(spec)
    except DocumentError:
        raise
    except ProkitError as exc:
        raise DocumentError(f"generator {gen!r} failed: {exc}") from None
    raise DocumentError(f"unknown bond generator {gen!r}")


def system_to_doc(system: DelaySystem, h: int) -> dict:
    """Materialize the window as an explicit, round-trippable document."""
    idx = system.index
    w = list(idx.window(h))
    _expect(w, "cannot serialize an empty window")
    cat_block = {"backend": system.backend}
    if system.backend == "matmod":
        cat_block["modulus"] = system.object(w[0]).payload[1]
    le_pairs = [
        [key_to_json(lo.id), key_to_json(hi.id)]
        for lo in w
        for hi in w
        if lo.id != hi.id and idx.le(lo, hi)
    ]
    obj_table = []
    for e in w:
        obj = system.object(e)
        rec = {"at": key_to_json(e.id)}
        if system.backend == "finset":
            rec["points"] = list(obj.payload)
        else:
            rec["dim"] = obj.payload[0]
        obj_table.append(rec)
    bond_table = []
    for lo in w:
        for hi in w:
            if lo.id != hi.id and idx.le(lo, hi):
                rec = {"at": [key_to_json(lo.id), key_to_json(hi.id)]}
                rec.update(_payload_to_record(system.backend, system.bond(lo, hi).payload))
                bond_table.append(rec)
    return {
        "format": SYSTEM_FORMAT,
        "name": system.name,
        "horizon": h,
        "category": cat_block,
        "index": {
            "kind": "finite",
            "elements": [key_to_json(e.id) for e in w],
            "le": le_pairs,
        },
        "objects": {"mode": "explicit", "table": obj_table},
        "bonds": {"mode": "explicit", "table": bond_table},
    }


# ---------------------------------------------------------------------------
# Morphism documents


def build_morphism(doc: dict, reuse=None):
    """Build a DelayMorphism from a document.

    reuse, when given, is (source_system, target_system, source_block,
    target_block) from an already-built document; this document must carry
    JSON-equal system blocks and the built morphism then shares instances,
    which is what d_equiv needs.
    Returns (morphism, source_block, target_block).
    """
    _expect(isinstance(doc, dict), "morphism document must be an object")
    _expect(doc.get("format") == MORPHISM_FORMAT, f"expected format {MORPHISM_FORMAT!r}")
    block = doc.get("morphism") or {}
    mode = block.get("mode")
    name = doc.get("name", "m")
    if mode == "generated":
        _expect(
            reuse is None,
            "a generated morphism carries no system blocks to match against",
        )
        _expect(block.get("generator") == "level_iso",
                f"unknown morphism generator {block.get('generator')!r}")
        spec = PlantSpec(
            length=int(block.get("length", 2)),
            seed=int(block.get("seed", 0)),
            backend=block.get("backend", "finset"),
            modulus=int(block.get("modulus", 5)),
            morphism_delay=int(block.get("morphism_delay", 0)),
        )
        try:
            _, _, fwd, _ = gen_planted_level_iso(spec)
        except ProkitError as exc:
            raise DocumentError(f"level_iso generator failed: {exc}") from None
        return replace(fwd, name=name), None, None
    src_block, tgt_block = doc.get("source"), doc.get("target")
    _expect(src_block is not None and tgt_block is not None,
            "morphism document needs source and target system blocks")
    if reuse is not None:
        prev_source, prev_target, prev_src_block, prev_tgt_block = reuse
        _expect(
            src_block == prev_src_block and tgt_block == prev_tgt_block,
            "the two morphism documents must agree on source and target blocks",
        )
        source, target = prev_source, prev_target
    else:
        source = build_system(src_block)
        target = source if tgt_block == src_block else build_system(tgt_block)
    if mode == "identity":
        _expect(tgt_block == src_block, "identity morphism needs equal source and target")
        return replace(identity_morphism(source), name=name), src_block, tgt_block
    _expect(mode == "explicit", "morphism block needs mode explicit|identity|generated")
    fmap = {}
    comps = {}
    try:
        for rec in block["index_map"]:
            fmap[key_from_json(rec["at"])] = key_from_json(rec["to"])
        for rec in block["components"]:
            comps[key_from_json(rec["at"])] = _payload_from_record(source.backend, rec)
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad morphism block: {exc}") from None

    def index_map(b):
        if b.id not in fmap:
            raise DocumentError(f"{name}: no index map entry at {b.id!r}")
        return source.index.elem(fmap[b.id])

    cat = source.cat
    mors = {}

    def component(b):
        if b.id not in mors:
            if b.id not in comps:
                raise DocumentError(f"{name}: no component at {b.id!r}")
            try:
                mors[b.id] = cat.mor(
                    source.object(index_map(b)), target.object(b), comps[b.id]
                )
            except ProkitError as exc:
                raise DocumentError(f"{name}: bad component at {b.id!r}: {exc}") from None
        return mors[b.id]

    return DelayMorphism(source, target, index_map, component, name=name), src_block, tgt_block


def morphism_to_doc(m: DelayMorphism, h: int) -> dict:
    src_doc = system_to_doc(m.source, h)
    tgt_doc = system_to_doc(m.target, h)
    dumped = {key_from_json(i) for i in src_doc["index"]["elements"]}
    fmap_table = []
    comp_table = []
    for b in m.target.index.window(h):
        a = m.index_map(b)
        _expect(
            a.id in dumped,
            f"index map image {a.id!r} leaves the horizon; raise it to serialize",
        )
        fmap_table.append({"at": key_to_json(b.id), "to": key_to_json(a.id)})
        rec = {"at": key_to_json(b.id)}
        rec.update(_payload_to_record(m.source.backend, m.component(b).payload))
        comp_table.append(rec)
    return {
        "format": MORPHISM_FORMAT,
        "name": m.name,
        "horizon": h,
        "source": src_doc,
        "target": tgt_doc,
        "morphism": {
            "mode": "explicit",
            "index_map": fmap_table,
            "components": comp_table,
        },
    }

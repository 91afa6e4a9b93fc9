"""Command line interface.

prokit check SYSTEM.json       wellformedness and the delay condition
prokit reduce SYSTEM.json      constructive reductions, emitting the reduced document
prokit morphism MORPHISM.json  morphism checks and transforms
prokit fuzz                    planted-answer agreement between engine and oracle

Exit codes: 0 the queried property holds; 1 it is refuted; 2 the window was
too small to decide; 64 unusable input (bad arguments, unparsable documents,
unsupported queries). Reports are canonical JSON on stdout with the timing
field isolated at the end; --verbose adds a human summary on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .dmorphism import (
    LevelPackage,
    check_delay_morphism,
    d_equiv,
    extract_pro_iso,
    level_reindex,
    make_special,
    verify_iso_pair,
)
from .documents import (
    build_morphism,
    build_system,
    canonical_json,
    key_to_json,
    load_json,
    morphism_to_doc,
    system_to_doc,
)
from .errors import (
    DocumentError,
    GenerationError,
    InconclusiveError,
    PreconditionError,
    ProkitError,
    UnsupportedQueryError,
)
from .fuzz import run_fuzz
from .indexset import Counterexample, IndexElem, MissingWitness, Verdict, WitnessTable
from .system import (
    check_delay,
    check_strict,
    check_wellformed,
    commutative_extract,
    mardesic_reindex,
    restrict,
    to_sequence,
)

DEFAULT_HORIZON = 32


class Parser(argparse.ArgumentParser):
    # usage errors exit 64, not argparse's default 2 (2 means inconclusive here)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(64, f"{self.prog}: error: {message}\n")


def _jsonable(x):
    if isinstance(x, Verdict):
        return verdict_json(x)
    if isinstance(x, IndexElem):
        return key_to_json(x.id)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    payload = getattr(x, "payload", None)
    if payload is not None:
        return _jsonable(payload)
    return str(x)


def verdict_json(v: Verdict) -> dict:
    out = {"mode": v.mode, "horizon": v.horizon,
           "value": "holds" if v.value else "fails"}
    e = v.evidence
    if isinstance(e, WitnessTable):
        out["evidence"] = {
            "kind": "witness-table",
            "entries": [[_jsonable(s), _jsonable(w)] for s, w in e.entries],
        }
    elif isinstance(e, Counterexample):
        out["evidence"] = {"kind": "counterexample", "detail": _jsonable(e.detail)}
    elif isinstance(e, MissingWitness):
        out["evidence"] = {"kind": "missing-witness", "horizon": e.horizon,
                           "detail": _jsonable(e.detail)}
    return out


def verdict_exit(v: Verdict) -> int:
    if v.holds:
        return 0
    return 2 if v.inconclusive else 1


def resolve_horizon(args, doc=None) -> int:
    if getattr(args, "horizon", None) is not None:
        return args.horizon
    if doc is not None and isinstance(doc.get("horizon"), int):
        return doc["horizon"]
    env = os.environ.get("PROKIT_HORIZON")
    if env:
        try:
            return int(env)
        except ValueError:
            raise DocumentError(f"PROKIT_HORIZON is not an integer: {env!r}") from None
    return DEFAULT_HORIZON


def _note(args, msg):
    if getattr(args, "verbose", False):
        print(msg, file=sys.stderr)


def _emit(report: dict, args, t0: float):
    if getattr(args, "figures", None):
        try:
            from .figures import render_figures

            report["figures"] = render_figures(report, args.figures)
        except Exception as exc:  # figures never flip a verdict
            print(f"prokit: figures failed: {exc}", file=sys.stderr)
    report["timing"] = {"seconds": round(time.monotonic() - t0, 6)}
    sys.stdout.write(canonical_json(report))


def _combine(codes) -> int:
    if 1 in codes:
        return 1
    if 2 in codes:
        return 2
    return 0


# ---------------------------------------------------------------------------
# Subcommands


def cmd_check(args) -> int:
    t0 = time.monotonic()
    doc = load_json(args.document)
    system = build_system(doc)
    h = resolve_horizon(args, doc)
    wf = check_wellformed(system, h)
    report = {"command": "check", "system": system.name, "horizon": h,
              "wellformed": verdict_json(wf)}
    if not wf.holds:
        _note(args, f"{system.name}: not wellformed at H={h}")
        _emit(report, args, t0)
        return 1
    if args.mode == "strict":
        sv = check_strict(system, h)
        report["strict"] = verdict_json(sv)
        word = "holds" if sv.holds else "inconclusive" if sv.inconclusive else "refuted"
        _note(args, f"{system.name}: strict {word} at H={h}")
        _emit(report, args, t0)
        return verdict_exit(sv)
    rep = check_delay(system, h)
    entries = []
    for e in rep.entries:
        entries.append({
            "index": key_to_json(e.elem.id),
            "value": "holds" if e.verdict.holds else "fails",
            "witness": key_to_json(e.witness.id) if e.verdict.holds else None,
        })
    report["delay"] = {
        "all_hold": rep.all_hold,
        "inconclusive": rep.inconclusive,
        "entries": entries,
    }
    fail = rep.first_failure()
    if fail is not None:
        report["delay"]["first_failure"] = {
            "index": key_to_json(fail.elem.id),
            "verdict": verdict_json(fail.verdict),
        }
    code = 0 if rep.all_hold else (2 if rep.inconclusive else 1)
    _note(args, f"{system.name}: delay "
          + ("holds" if rep.all_hold else "inconclusive" if rep.inconclusive else "refuted")
          + f" at H={h}")
    _emit(report, args, t0)
    return code


def _parse_subset(text: str, system=None, h: int = 0):
    text = text.strip()
    if text in ("evens", "odds"):
        # named subsets only make sense for integer-indexed systems
        want = 0 if text == "evens" else 1
        ids = [e.id for e in system.index.window(h)
               if isinstance(e.id, int) and e.id % 2 == want]
        if not ids:
            raise DocumentError(f"--subset {text}: no matching indexes in window")
        return ids
    if text.startswith("["):
        try:
            ids = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"--subset: invalid JSON: {exc}") from None
        if not isinstance(ids, list):
            raise DocumentError("--subset JSON must be a list")
        from .documents import key_from_json

        return [key_from_json(i) for i in ids]
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        out.append(int(part) if part.lstrip("-").isdigit() else part)
    if not out:
        raise DocumentError("--subset is empty")
    return out


def cmd_reduce(args) -> int:
    t0 = time.monotonic()
    doc = load_json(args.document)
    system = build_system(doc)
    h = resolve_horizon(args, doc)
    report = {"command": "reduce", "op": args.op, "system": system.name, "horizon": h}
    extra = {}
    if args.op == "restrict":
        if not args.subset:
            raise DocumentError("--op restrict needs --subset")
        try:
            members = [system.index.elem(i)
                       for i in _parse_subset(args.subset, system, h)]
        except PreconditionError as exc:
            raise DocumentError(f"--subset: {exc}") from None
        restricted, inc, back = restrict(system, members, h)
    elif args.op == "mardesic":
        restricted, inc, back = mardesic_reindex(system)
    elif args.op == "sequence":
        restricted, inc, back = to_sequence(system, h)
    else:  # extract
        chain, restricted, inc, back = commutative_extract(system, h)
        extra["chain"] = [key_to_json(c.id) for c in chain]
    iso = verify_iso_pair(inc, back, h)
    out_doc = system_to_doc(restricted, h)
    report["result"] = {
        "elements": [key_to_json(e.id) for e in restricted.index.window(h)],
        **extra,
    }
    report["iso"] = verdict_json(iso)
    if args.out:
        with open(args.out, "w") as f:
            f.write(canonical_json(out_doc))
        report["out"] = args.out
    else:
        report["document"] = out_doc
    _note(args, f"{system.name}: {args.op} -> {len(report['result']['elements'])} indices, "
          + ("iso holds" if iso.holds else "iso unresolved"))
    _emit(report, args, t0)
    return verdict_exit(iso)


def cmd_morphism(args) -> int:
    t0 = time.monotonic()
    doc = load_json(args.document)
    h = resolve_horizon(args, doc)
    m, sb, tb = build_morphism(doc)
    report = {"command": "morphism", "op": args.op, "morphism": m.name, "horizon": h}
    out_morphism = None
    if args.op == "check":
        if args.against:
            doc2 = load_json(args.against)
            if sb is None:
                raise DocumentError(
                    "--against needs inline source/target blocks on both documents"
                )
            m2, _, _ = build_morphism(doc2, reuse=(m.source, m.target, sb, tb))
            v = d_equiv(m, m2, h)
            report["against"] = m2.name
            report["relation"] = "d_equiv"
        else:
            v = check_delay_morphism(m, h)
            report["relation"] = "delay-morphism"
        code = verdict_exit(v)
    elif args.op == "special":
        sp = make_special(m, h)
        v = d_equiv(m, sp, h)
        report["index_map"] = [
            {"at": key_to_json(b.id), "to": key_to_json(sp.index_map(b).id)}
            for b in m.target.index.window(h)
        ]
        out_morphism = sp
        code = verdict_exit(v)
    elif args.op == "level":
        pkg = level_reindex(m, h)
        v = pkg.square
        report["pairs"] = len(pkg.C.window(h))
        out_morphism = pkg.level
        code = verdict_exit(v)
    else:  # extract-iso
        pkg = LevelPackage.from_level(m)
        res = extract_pro_iso(pkg, h)
        report["chain"] = [key_to_json(c.id) for c in res.chain]
        report["invertible"] = res.inverse is not None
        out_morphism = res.morphism
        if res.iso is None:
            report["iso"] = None
            v = None
            code = 1
        else:
            v = res.iso
            code = verdict_exit(res.iso)
    report["verdict"] = verdict_json(v) if v is not None else None
    if args.out and out_morphism is not None:
        with open(args.out, "w") as f:
            f.write(canonical_json(morphism_to_doc(out_morphism, h)))
        report["out"] = args.out
    _note(args, f"{m.name}: {args.op} -> exit {code}")
    _emit(report, args, t0)
    return code


def cmd_fuzz(args) -> int:
    t0 = time.monotonic()
    if args.seeds < 1:
        raise DocumentError("--seeds must be at least 1")
    if args.len < 3:
        raise DocumentError("--len must be at least 3")
    seeds = args.seeds
    rep = run_fuzz(seeds, args.len, args.backend, base_seed=args.seed)
    report = {"command": "fuzz", "seeds": seeds, "length": args.len,
              "backend": args.backend, "base_seed": args.seed,
              "ok": rep["ok"], "rows": rep["rows"]}
    _note(args, f"fuzz: {seeds} seeds, "
          + ("all agree" if rep["ok"] else "MISMATCH"))
    _emit(report, args, t0)
    return 0 if rep["ok"] else 1


# ---------------------------------------------------------------------------


def _common(p, out=False):
    p.add_argument("--horizon", type=int, default=None,
                   help=f"window horizon (default: document, then $PROKIT_HORIZON, then {DEFAULT_HORIZON})")
    p.add_argument("--figures", metavar="DIR", default=None,
                   help="render matplotlib figures and CSV tables into DIR")
    p.add_argument("--verbose", action="store_true", help="human summary on stderr")
    if out:
        p.add_argument("--out", metavar="FILE", default=None,
                       help="write the produced document to FILE")


def main(argv=None) -> int:
    parser = Parser(prog="prokit",
                    description="delay-inverse systems: windowed checks and reductions")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    pc = sub.add_parser("check", help="verify a system document")
    pc.add_argument("document")
    pc.add_argument("--mode", choices=["delay", "strict"], default="delay",
                    help="which commutation condition to verify")
    _common(pc)
    pc.set_defaults(func=cmd_check)

    pr = sub.add_parser("reduce", help="reduce a system document")
    pr.add_argument("document")
    pr.add_argument("--op", required=True,
                    choices=["restrict", "mardesic", "sequence", "extract"])
    pr.add_argument("--subset", default=None,
                    help="restrict: comma-separated ids or a JSON list")
    _common(pr, out=True)
    pr.set_defaults(func=cmd_reduce)

    pm = sub.add_parser("morphism", help="check or transform a morphism document")
    pm.add_argument("document")
    pm.add_argument("--op", required=True,
                    choices=["check", "special", "level", "extract-iso"])
    pm.add_argument("--against", default=None,
                    help="check: second morphism document for d-equivalence")
    _common(pm, out=True)
    pm.set_defaults(func=cmd_morphism)

    pf = sub.add_parser("fuzz", help="engine vs oracle on planted sequences")
    pf.add_argument("--seeds", type=int, default=64, help="seed count")
    pf.add_argument("--len", type=int, default=16, help="sequence length")
    pf.add_argument("--backend", default="finset", choices=["finset", "matmod"])
    pf.add_argument("--seed", type=int, default=0, help="base seed offset")
    _common(pf)
    pf.set_defaults(func=cmd_fuzz)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InconclusiveError as exc:
        print(f"prokit: inconclusive: {exc}", file=sys.stderr)
        return 2
    except (DocumentError, UnsupportedQueryError, GenerationError) as exc:
        print(f"prokit: {exc}", file=sys.stderr)
        return 64
    except PreconditionError as exc:
        print(f"prokit: refuted precondition: {exc}", file=sys.stderr)
        return 1
    except ProkitError as exc:
        print(f"prokit: {exc}", file=sys.stderr)
        return 64


if __name__ == "__main__":
    sys.exit(main())

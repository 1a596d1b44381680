"""Command-line surface: reproducible pipelines with exact JSON reports.

Every report embeds a run manifest (command, input digests, seed, version,
payload digest).  Outputs are canonical JSON, so identical inputs and flags
produce byte-identical bytes; wall-clock timing goes to stderr only.
Exit codes: 0 success, 1 internal failure, 2 validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from flatfill import formats
from flatfill.errors import FlatfillError

VERSION = "0.1.0"
REPORT_FORMAT = "flatfill-report/1"
ERROR_FORMAT = "flatfill-error/1"


def _read_doc(path, manifest_inputs, name):
    import json

    if path in (None, "-"):
        data = sys.stdin.read()
        manifest_inputs[name or "stdin"] = formats.digest(data)
        return json.loads(data)
    with open(path) as fh:
        data = fh.read()
    manifest_inputs[name or path] = formats.digest(data)
    return json.loads(data)


def _emit(doc, out_path, args, manifest_inputs, seed=None):
    payload = formats.canonical_json(formats.jsonable(doc))
    manifest = {
        "command": "flatfill " + " ".join(args),
        "inputs": manifest_inputs,
        "seed": seed,
        "version": VERSION,
        "output_digest": formats.digest(payload),
    }
    wrapped = dict(doc)
    wrapped["manifest"] = manifest
    text = formats.canonical_json(formats.jsonable(wrapped))
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _jobs_default():
    env = os.environ.get("FLATFILL_JOBS")
    return int(env) if env else 1


def cmd_gen_tree(ns, argv):
    from flatfill.buildings import bruhat_tits_tree_ball

    b = bruhat_tits_tree_ball(ns.q, ns.R)
    _emit(formats.building_to_json(b), ns.output, argv, {})
    return 0


def cmd_gen_a2(ns, argv):
    from flatfill.buildings import a2_ball

    b = a2_ball(ns.q, ns.R)
    _emit(formats.building_to_json(b), ns.output, argv, {})
    return 0


def cmd_flatmate(ns, argv):
    from flatfill.buildings import maximal_geodesics
    from flatfill.nerve import flatmate_complex

    inputs = {}
    doc = _read_doc(ns.input, inputs, "building")
    building = formats.building_from_json(doc)
    if ns.cover == "aligned":
        fragments = maximal_geodesics(building)
    else:
        fragments = building.apartments
    members = [frozenset(f.vertices) for f in fragments]
    fm = flatmate_complex(building.complex.vertices, members, max_dim=ns.max_dim)
    out = formats.complex_to_json(fm.complex)
    out["cover"] = [sorted(m) for m in members]
    out["cover_kind"] = ns.cover
    _emit(out, ns.output, argv, inputs)
    return 0


def cmd_verify(ns, argv):
    from flatfill.filling import reduced_betti

    inputs = {}
    doc = _read_doc(ns.input, inputs, "complex")
    cx = formats.complex_from_json(doc)
    q_max = ns.max_dim if ns.max_dim is not None else cx.dim
    betti = reduced_betti(cx, q_max)
    acyclic = all(b == 0 for b in betti)
    payload = {
        "format": REPORT_FORMAT,
        "kind": "verify",
        "reduced_betti": betti,
        "acyclic": acyclic,
        "pass": (acyclic if ns.acyclic else True),
    }
    _emit(payload, ns.output, argv, inputs)
    return 0 if payload["pass"] else 1


def cmd_fill(ns, argv):
    from flatfill.filling import min_l1_fill, min_support_fill

    inputs = {}
    cx = formats.complex_from_json(_read_doc(ns.complex, inputs, "complex"))
    alpha = formats.chain_from_json(_read_doc(ns.cycle, inputs, "cycle"))
    if ns.support:
        result = min_support_fill(cx, alpha, budget=ns.budget)
    else:
        result = min_l1_fill(cx, alpha)
    payload = {
        "format": REPORT_FORMAT,
        "kind": "fill",
        "fill": formats.chain_to_json(result.fill),
        "norm": result.norm,
        "support": result.support,
        "exhaustive": result.exhaustive,
        "certificate": {
            "dual": [
                {"simplex": list(s), "y": formats.fraction_str(c)}
                for s, c in sorted(result.optimality_certificate.items())
            ]
            if isinstance(result.optimality_certificate, dict) and "exhausted" not in result.optimality_certificate
            else result.optimality_certificate,
        },
    }
    _emit(payload, ns.output, argv, inputs)
    return 0


def cmd_uconst(ns, argv):
    from flatfill.filling import universal_constant

    entry = universal_constant(ns.q, ns.r, jobs=ns.jobs)
    payload = {
        "format": REPORT_FORMAT,
        "kind": "uconst",
        "q": entry.q,
        "r": entry.r,
        "value": entry.value,
        "witness_facets": [list(f) for f in entry.witness.facets],
        "classes_scanned": entry.iso_classes_scanned,
    }
    _emit(payload, ns.output, argv, {})
    return 0


def cmd_homotopy(ns, argv):
    from flatfill.homotopy import full_complex_oracle, synthesize_bounded_homotopy, verify_homotopy

    inputs = {}
    if ns.building:
        from flatfill.buildings import apartment_nerve, sector_completion_oracle

        building = formats.building_from_json(_read_doc(ns.building, inputs, "building"))
        cx = apartment_nerve(building, max_dim=ns.q_max + 1)
        oracle = sector_completion_oracle(building, cx)
    else:
        cx = formats.complex_from_json(_read_doc(ns.complex, inputs, "complex"))
        oracle = full_complex_oracle(cx)
    h = synthesize_bounded_homotopy(cx, oracle, ns.q_max)
    report = verify_homotopy(cx, h, seed=ns.seed)
    payload = {
        "format": REPORT_FORMAT,
        "kind": "homotopy",
        "oracle": oracle.name,
        "q_max": ns.q_max,
        "verification": report,
        "ledger": h.meta.get("ledger"),
    }
    if ns.dump:
        dump = {
            "format": REPORT_FORMAT,
            "kind": "homotopy-maps",
            "base": formats.chain_to_json(h.base_chain),
            "maps": {
                str(q): [{"simplex": list(s), "image": formats.chain_to_json(c)} for s, c in sorted(table.items())]
                for q, table in h.maps.items()
            },
        }
        with open(ns.dump, "w") as fh:
            fh.write(formats.canonical_json(formats.jsonable(dump)))
    _emit(payload, ns.output, argv, inputs, seed=ns.seed)
    return 0 if report["pass"] else 1


def cmd_support(ns, argv):
    from flatfill.support import support_control_profile

    inputs = {}
    cx = formats.complex_from_json(_read_doc(ns.complex, inputs, "complex"))
    prof = support_control_profile(cx, ns.q, ns.m_max, qtop=ns.qtop, mode=ns.mode, seed=ns.seed)
    payload = {
        "format": REPORT_FORMAT,
        "kind": "support",
        "degrees": {
            str(p): {
                "controlled": d["controlled"],
                "table": {str(m): v for m, v in d["table"].items()},
                "mode": d["mode"],
                "witness": formats.chain_to_json(d["witness"]) if d["witness"] is not None else None,
            }
            for p, d in prof.degrees.items()
        },
        "flags": prof.mode_flags,
    }
    _emit(payload, ns.output, argv, inputs, seed=ns.seed)
    return 0


def cmd_nerve(ns, argv):
    from flatfill.nerve import build_nerve_equivalence

    inputs = {}
    cx = formats.complex_from_json(_read_doc(ns.complex, inputs, "complex"))
    cover = formats.cover_from_json(_read_doc(ns.cover, inputs, "cover"))
    eq = build_nerve_equivalence(cx, cover.members, q_max=ns.q_max)
    payload = {
        "format": REPORT_FORMAT,
        "kind": "nerve-equivalence",
        "pass": eq.report["pass"],
        "homotopy_norms": eq.report["homotopy_norms"],
        "homology": {str(q): d for q, d in eq.report["homology"].items()},
        "failures": eq.report["failures"],
        "nerve_facets": [list(f) for f in eq.nerve.facets],
    }
    _emit(payload, ns.output, argv, inputs)
    return 0 if eq.report["pass"] else 1


def cmd_report(ns, argv):
    import json

    inputs = {}
    doc = _read_doc(ns.input, inputs, "report")
    kind = doc.get("kind", "?")
    lines = [f"flatfill report kind={kind}"]
    for key in sorted(doc):
        if key in ("format", "kind", "manifest"):
            continue
        lines.append(f"  {key}: {json.dumps(doc[key], sort_keys=True)[:240]}")
    print("\n".join(lines))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="flatfill", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-tree", help="generate a regular tree ball")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--R", type=int, required=True)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen_tree)

    g = sub.add_parser("gen-a2", help="generate an A2-tilde lattice-class ball")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--R", type=int, required=True)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen_a2)

    g = sub.add_parser("flatmate", help="aligned (flatmate) complex of a building ball")
    g.add_argument("--input", "-i")
    g.add_argument("--max-dim", type=int, default=None)
    g.add_argument("--cover", choices=("aligned", "apartments"), default="aligned")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_flatmate)

    g = sub.add_parser("verify", help="reduced Betti numbers and acyclicity")
    g.add_argument("--input", "-i")
    g.add_argument("--acyclic", action="store_true")
    g.add_argument("--max-dim", type=int, default=None)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_verify)

    g = sub.add_parser("fill", help="minimal filling of a cycle")
    g.add_argument("--complex", required=True)
    g.add_argument("--cycle", required=True)
    g.add_argument("--support", action="store_true")
    g.add_argument("--budget", type=int, default=200_000)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_fill)

    g = sub.add_parser("uconst", help="universal filling constant by enumeration")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--jobs", type=int, default=_jobs_default())
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_uconst)

    g = sub.add_parser("homotopy", help="synthesize and verify a bounded contracting homotopy")
    g.add_argument("--building")
    g.add_argument("--complex")
    g.add_argument("--q-max", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--dump")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_homotopy)

    g = sub.add_parser("support", help="support-control profile")
    g.add_argument("--complex", required=True)
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--m-max", type=int, required=True)
    g.add_argument("--qtop", type=int, default=None)
    g.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_support)

    g = sub.add_parser("nerve", help="nerve equivalence of a flatmate cover")
    g.add_argument("--complex", required=True)
    g.add_argument("--cover", required=True)
    g.add_argument("--verify", action="store_true")
    g.add_argument("--q-max", type=int, default=None)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_nerve)

    g = sub.add_parser("report", help="render a report file as text")
    g.add_argument("--input", "-i")
    g.set_defaults(func=cmd_report)

    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    ns = parser.parse_args(argv)
    started = time.monotonic()
    try:
        code = ns.func(ns, argv)
    except FlatfillError as exc:
        err = {"format": ERROR_FORMAT, "error": exc.code, "message": str(exc)}
        sys.stdout.write(formats.canonical_json(err))
        return 2
    except BrokenPipeError:
        return 0
    finally:
        print(f"flatfill: {time.monotonic() - started:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Inputs are JSON files (groups, G-complexes, coefficient systems, certificates)
or preset names: suite members such as ``reflection_hexagon`` and groups such
as ``C2``, ``S3``, ``V4``, ``Q8``, ``D4``.  JSON output is deterministic and
is the format tests rely on; text output renders the same data as aligned
tables.  The exit code is 0 iff every requested check passes, 1 if a check
fails and 2 for unusable input.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import suite
from .bredon import bredon_cohomology, equivariant_chains, standard_identifications
from .coeffsys import CoeffSys, GroupModule, atomic_system, constant_system, fixed_point_system
from .errors import BredonError
from .gcomplex import (
    GComplex,
    cohomology_dims,
    fixed_subcomplex,
    prepare,
    quotient,
    relative_cohomology_dims,
    singular_set,
    validate_action,
)
from .groups import FiniteGroup, SubgroupFamily
from .homotopy import (
    ChainMap,
    HomotopyCertificate,
    cone,
    contracting_homotopy,
    homotopy_equivalence_check,
    induced_chain_map,
    subdivision_chain_map,
    verify_certificate,
)
from .linalg import check_prime
from .smith import euler_check, smith_report

COMMANDS = (
    "subgroups", "validate", "fixed", "singular", "quotient",
    "bredon", "smith", "euler", "split-check", "homotopy-check",
)
COEFF_NAMES = ("constant", "regular", "atomic-G", "atomic-0")
EXTRA_COMPLEXES: dict[str, Callable[[], GComplex]] = {
    "dihedral_twelve_gon": suite.dihedral_twelve_gon,
    "collar_annulus": suite.collar_annulus,
}


class InputError(BredonError):
    """Unusable command-line input: missing file, unknown preset, wrong kind of object."""


@dataclass
class JobConfig:
    command: str
    inputs: list[str]
    p: int = 2
    auto_subdivide: int = 2
    fmt: str = "text"
    field_char: int | None = None
    options: dict[str, Any] = field(default_factory=dict)

    def check(self) -> None:
        self.p = check_prime(self.p)
        if not 0 <= self.auto_subdivide <= 2:
            raise InputError("--subdivide must be 0, 1 or 2")
        if self.field_char is not None and self.field_char == self.p:
            raise InputError(f"the ground field has characteristic {self.p}; p must differ from it")
        for name in self.inputs:
            if not os.path.exists(name) and _preset_kind(name) is None:
                raise InputError(f"{name}: no such file or preset")


# ---------------------------------------------------------------------------
# input resolution


def _group_preset(name: str) -> FiniteGroup | None:
    fixed = {"trivial": FiniteGroup.trivial, "V4": FiniteGroup.klein_four, "klein": FiniteGroup.klein_four,
             "Q8": FiniteGroup.quaternion}
    if name in fixed:
        return fixed[name]()
    m = re.fullmatch(r"([CSD])(\d+)", name)
    if not m:
        return None
    n = int(m.group(2))
    if m.group(1) == "C" and 1 <= n <= 64:
        return FiniteGroup.cyclic(n)
    if m.group(1) == "S" and 1 <= n <= 5:
        return FiniteGroup.symmetric(n)
    if m.group(1) == "D" and 2 <= n <= 32:
        return FiniteGroup.dihedral(n)
    return None


def _preset_kind(name: str) -> str | None:
    if name in suite.names() or name in EXTRA_COMPLEXES:
        return "complex"
    if _group_preset(name) is not None:
        return "group"
    return None


def _classify(data: dict) -> str:
    if "s" in data and "d" in data:
        return "certificate"
    if "dims" in data:
        return "coeffsys"
    if "vertices" in data:
        return "complex"
    if "degree" in data:
        return "group"
    raise InputError("unrecognized JSON object: expected a group, complex, coefficient system or certificate")


def load(name: str, group: FiniteGroup | None = None) -> tuple[str, Any]:
    """``(kind, object)`` for a file path or preset name.

    Coefficient systems and complexes without an embedded group use ``group``.
    Certificates are returned as their raw JSON.
    """
    if os.path.exists(name):
        try:
            with open(name) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"{name}: {exc}") from exc
        kind = _classify(data)
        if kind == "group":
            return kind, FiniteGroup.from_json(data)
        if kind == "certificate":
            return kind, data
        if "group" in data:
            group = FiniteGroup.from_json(data["group"])
        if kind == "complex":
            return kind, GComplex.from_json(data, group if group is not None else FiniteGroup.trivial())
        if group is None:
            raise InputError(f"{name}: a coefficient system needs --group or an embedded group")
        return kind, CoeffSys.from_json(data, group)
    kind = _preset_kind(name)
    if kind == "complex":
        return kind, (EXTRA_COMPLEXES[name]() if name in EXTRA_COMPLEXES else suite.member(name).raw)
    if kind == "group":
        return kind, _group_preset(name)
    raise InputError(f"{name}: no such file or preset")


def _complex(name: str, cfg: JobConfig) -> GComplex:
    kind, obj = load(name, _option_group(cfg))
    if kind == "group":
        raise InputError(f"{name}: expected a G-complex, got a group")
    if kind != "complex":
        raise InputError(f"{name}: expected a G-complex, got a {kind}")
    return prepare(obj, cfg.auto_subdivide, oriented=cfg.p != 2)


def _option_group(cfg: JobConfig) -> FiniteGroup | None:
    g = cfg.options.get("group")
    if g is None:
        return None
    kind, obj = load(g)
    if kind == "complex":
        return obj.group
    if kind != "group":
        raise InputError(f"{g}: expected a group")
    return obj


# ---------------------------------------------------------------------------
# commands; each returns a JSON-ready dict with "ok" and "failures"


def _fail(check: str, detail: Any) -> dict:
    return {"check": check, "detail": detail}


def _complex_summary(X: GComplex, p: int) -> dict:
    n = max(X.dim + 1, 1)
    return {
        "dim": X.dim,
        "f_vector": X.f_vector,
        "simplices": [list(s) for s in X.maximal_simplices()],
        "homology_dims": cohomology_dims(X, p, n),
    }


def cmd_subgroups(cfg: JobConfig) -> dict:
    kind, obj = load(cfg.inputs[0])
    if kind not in ("group", "complex"):
        raise InputError(f"{cfg.inputs[0]}: expected a group or complex")
    G = obj if kind == "group" else obj.group
    lat = G.lattice
    classes = {H: i for i, cls in enumerate(lat.conjugacy_classes()) for H in cls}
    rows = [
        {
            "id": H.id, "order": H.order, "elements": list(H.elements),
            "generators": list(lat.generators_of(H.id)), "normal": bool(lat.is_normal(H.id)),
            "class": classes[H.id], "covers": list(lat.covers[H.id]),
        }
        for H in lat
    ]
    return {"group_order": G.order, "count": len(rows), "subgroups": rows, "ok": True, "failures": []}


def cmd_validate(cfg: JobConfig) -> dict:
    group = _option_group(cfg)
    records = []
    for name in cfg.inputs:
        kind, obj = load(name, group)
        rec: dict[str, Any] = {"input": name, "kind": kind}
        if kind == "group":
            rec.update(ok=True, order=obj.order)
        elif kind == "complex":
            raw = validate_action(obj)
            X = prepare(obj, cfg.auto_subdivide, oriented=cfg.p != 2)
            done = validate_action(X)
            oriented = cfg.p == 2 or (done.admissible and X.is_orientation_preserving())
            rec.update(
                raw={"simplicial": raw.simplicial, "admissible": raw.admissible, "regular": raw.regular,
                     "detail": raw.detail},
                prepared={"admissible": done.admissible, "regular": done.regular,
                          "orientation_preserving": oriented, "f_vector": X.f_vector, "detail": done.detail},
                ok=raw.simplicial and done.admissible and done.regular and oriented,
            )
        elif kind == "coeffsys":
            rep = obj.validate()
            rec.update(rep.to_json())
            rec["dims"] = list(obj.dims)
        else:
            rec.update(ok=False, message="certificates are re-verified with split-check")
        records.append(rec)
    failures = [_fail("validate", {k: r[k] for k in ("input", "kind")}) for r in records if not r["ok"]]
    return {"inputs": records, "ok": not failures, "failures": failures}


def cmd_fixed(cfg: JobConfig) -> dict:
    X = _complex(cfg.inputs[0], cfg)
    lat = X.group.lattice
    H = cfg.options.get("subgroup")
    H = lat.whole if H is None else int(H)
    if not 0 <= H < len(lat):
        raise InputError(f"subgroup id {H} out of range 0..{len(lat) - 1}")
    F = fixed_subcomplex(X, H)
    out = {"subgroup": H, "subgroup_order": lat[H].order, "fixed": _complex_summary(F, cfg.p)}
    out["fixed"]["vertices"] = list(F.vertices)
    return {**out, "ok": True, "failures": []}


def cmd_singular(cfg: JobConfig) -> dict:
    X = _complex(cfg.inputs[0], cfg)
    lat = X.group.lattice
    seeds = cfg.options.get("family")
    A = SubgroupFamily.nontrivial(lat) if not seeds else SubgroupFamily.generated_by(lat, seeds)
    S = singular_set(X, A)
    return {"family": sorted(A.members), "singular": _complex_summary(S, cfg.p), "ok": True, "failures": []}


def cmd_quotient(cfg: JobConfig) -> dict:
    X = _complex(cfg.inputs[0], cfg)
    Y, proj = quotient(X)
    return {
        "complex_f_vector": X.f_vector, "quotient": _complex_summary(Y, cfg.p),
        "vertex_projection": [int(v) for v in proj], "ok": True, "failures": [],
    }


def _named_system(name: str, G: FiniteGroup, p: int) -> CoeffSys:
    if name == "constant":
        return constant_system(G, p)
    if name == "regular":
        return fixed_point_system(GroupModule.regular(G, p))
    if name == "atomic-G":
        return atomic_system(GroupModule.trivial(G, p), at_trivial_only=False)
    return atomic_system(GroupModule.trivial(G, p), at_trivial_only=True)


def cmd_bredon(cfg: JobConfig) -> dict:
    X = _complex(cfg.inputs[0], cfg)
    p, G = cfg.p, X.group
    coeff = cfg.options.get("coeff") or "constant"
    n = max(X.dim + 1, 1)
    checks: dict[str, Any] = {}
    if coeff in COEFF_NAMES:
        L = _named_system(coeff, G, p)
        dims = bredon_cohomology(equivariant_chains(X, p), L, length=n)
        if coeff == "atomic-0":
            SX = singular_set(X, SubgroupFamily.nontrivial(G.lattice))
            Y, proj = quotient(X)
            SY = Y.with_simplices([tuple(sorted({int(proj[v]) for v in s})) for s in SX.maximal_simplices()])
            top, meaning = relative_cohomology_dims(Y, SY, p, n), "H^*(X/G, SX/G)"
        else:
            ident = next(i for i in standard_identifications(X, p) if i.coeff == coeff)
            top, meaning = ident.topological, ident.meaning
        checks["identification"] = {
            "matches": meaning if top == dims else None, "expected": top, "ok": top == dims,
        }
    else:
        kind, L = load(coeff, G)
        if kind != "coeffsys":
            raise InputError(f"{coeff}: expected a coefficient system")
        if L.p != p:
            raise InputError(f"{coeff}: system is over F_{L.p}, but --p is {p}")
        rep = L.validate()
        checks["validate"] = rep.to_json()
        dims = bredon_cohomology(equivariant_chains(X, p), L, length=n) if rep.ok else []
    failures = [_fail(k, v) for k, v in checks.items() if not v["ok"]]
    return {"coeff": coeff, "dims": dims, "checks": checks, "ok": not failures, "failures": failures}


def cmd_smith(cfg: JobConfig) -> dict:
    X = _complex(cfg.inputs[0], cfg)
    rep = smith_report(X, cfg.p, r_max=int(cfg.options.get("r_max", 2)), max_subdivisions=0)
    out = rep.to_json()
    failures = []
    for key in ("pipelines_agree", "inequalities_hold"):
        if not out[key]:
            failures.append(_fail(key, False))
    if not rep.euler["identity_holds"]:
        failures.append(_fail("euler_identity", rep.euler))
    if rep.euler["divisibility"] is False:
        failures.append(_fail("divisibility", rep.euler))
    if not rep.corollary["ok"]:
        failures.append(_fail("fixed_point_corollary", rep.corollary))
    out["failures"] = failures
    return out


def cmd_euler(cfg: JobConfig) -> dict:
    X = _complex(cfg.inputs[0], cfg)
    e = euler_check(X)
    failures = []
    if not e["identity_holds"]:
        failures.append(_fail("euler_identity", e))
    if e["divisibility"] is False:
        failures.append(_fail("divisibility", e))
    return {"group_order": X.group.order, "euler": e, "ok": not failures, "failures": failures}


def cmd_split_check(cfg: JobConfig) -> dict:
    """Contract the cone of the identity of ``C[X^?]``, or re-verify a certificate for it."""
    X = _complex(cfg.inputs[0], cfg)
    C = equivariant_chains(X, cfg.p)
    K = cone(ChainMap.identity(C))
    sizes = [int(K.terms[q].dims[0]) for q in range(K.length)]
    given = cfg.options.get("certificate")
    if given:
        kind, data = load(given)
        if kind != "certificate":
            raise InputError(f"{given}: expected a certificate")
        shapes_ok = data.get("p") == cfg.p and data.get("sizes") == sizes and len(data["s"]) == K.length
        verified = False
        if shapes_ok:
            # empty blocks lose their shape in JSON
            ext = sizes + [0]
            mats = [np.array(m, dtype=np.int64).reshape(ext[q + 1], ext[q]) for q, m in enumerate(data["s"])]
            cert = HomotopyCertificate(K, mats, data.get("kind", "contracting"), data.get("method", "file"))
            verified = verify_certificate(cert)
        found, source = True, "file"
    else:
        cert = contracting_homotopy(K)
        found = cert is not None
        verified = found and verify_certificate(cert)  # type: ignore[arg-type]
        source = "computed"
        emit = cfg.options.get("emit")
        if emit and cert is not None:
            with open(emit, "w") as fh:
                json.dump(cert.to_json(), fh, sort_keys=True)
    failures = [] if verified else [_fail("certificate", {"found": found, "verified": verified})]
    return {
        "complex": "cone of the identity", "sizes": sizes, "source": source,
        "found": found, "verified": verified, "ok": verified, "failures": failures,
    }


def cmd_homotopy_check(cfg: JobConfig) -> dict:
    """Is a chain map of G-complexes a G-homotopy equivalence?  Default: the subdivision map."""
    X = _complex(cfg.inputs[0], cfg)
    target = cfg.options.get("target")
    if target:
        kind, Y = load(target, X.group)
        if kind != "complex":
            raise InputError(f"{target}: expected a G-complex")
        vm = cfg.options.get("vertex_map")
        if vm is None:
            raise InputError("--target needs --vertex-map")
        f, description = induced_chain_map(X, Y, vm, cfg.p), "induced map"
    else:
        _, f = subdivision_chain_map(X, cfg.p)
        description = "subdivision map"
    rep = homotopy_equivalence_check(f)
    out = rep.to_json()
    failures = []
    if not f.is_chain_map():
        failures.append(_fail("chain_map", False))
    if not rep.verified:
        failures.append(_fail("homotopy_equivalence", {k: out[k] for k in ("quasi_iso_at_1", "certificate")}))
    out.update(map=description, ok=not failures, failures=failures)
    return out


HANDLERS: dict[str, Callable[[JobConfig], dict]] = {
    "subgroups": cmd_subgroups, "validate": cmd_validate, "fixed": cmd_fixed, "singular": cmd_singular,
    "quotient": cmd_quotient, "bredon": cmd_bredon, "smith": cmd_smith, "euler": cmd_euler,
    "split-check": cmd_split_check, "homotopy-check": cmd_homotopy_check,
}


# ---------------------------------------------------------------------------
# output


def _scalar(v: Any) -> bool:
    return not isinstance(v, (dict, list)) or (isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v))


def _fmt(v: Any) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


def _table(rows: list[dict], indent: str) -> list[str]:
    keys = list(rows[0])
    cells = [[k for k in keys]] + [[_fmt(r.get(k)) for k in keys] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(keys))]
    return [indent + "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]


def render_text(obj: Any, indent: str = "") -> list[str]:
    """Aligned key/value lines; lists of records become tables."""
    lines: list[str] = []
    if isinstance(obj, dict):
        simple = [k for k in obj if _scalar(obj[k])]
        width = max((len(k) for k in simple), default=0)
        for k in simple:
            lines.append(f"{indent}{k.ljust(width)}  {_fmt(obj[k])}")
        for k in obj:
            if k in simple:
                continue
            lines.append(f"{indent}{k}:")
            lines.extend(render_text(obj[k], indent + "  "))
    elif isinstance(obj, list) and obj and all(isinstance(r, dict) for r in obj):
        if all(_scalar(v) for r in obj for v in r.values()) and len({tuple(r) for r in obj}) == 1:
            lines.extend(_table(obj, indent))
        else:
            for i, r in enumerate(obj):
                lines.append(f"{indent}[{i}]")
                lines.extend(render_text(r, indent + "  "))
    else:
        lines.append(indent + _fmt(obj))
    return lines


def emit(result: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result, sort_keys=True, indent=2) + "\n"
    return "\n".join(render_text(result)) + "\n"


# ---------------------------------------------------------------------------
# entry point


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="the prime (default 2)")
    common.add_argument("--subdivide", type=int, default=2, metavar="N",
                        help="subdivide up to N times to reach an admissible, regular action (default 2)")
    common.add_argument("--raw", action="store_true", help="trust the input: no subdivision")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--group", help="group file or preset for inputs without an embedded group")
    common.add_argument("--field-char", type=int, default=None,
                        help="characteristic of the ground field, which must differ from p")

    parser = argparse.ArgumentParser(prog="bredonfp", description="Bredon cohomology and Smith theory over F_p.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("subgroups", parents=[common], help="list the subgroup lattice").add_argument("input")
    sub.add_parser("validate", parents=[common], help="validate groups, complexes and systems") \
        .add_argument("inputs", nargs="+")
    fx = sub.add_parser("fixed", parents=[common], help="fixed subcomplex X^H")
    fx.add_argument("input")
    fx.add_argument("--subgroup", type=int, default=None, help="lattice id (default: the whole group)")
    sg = sub.add_parser("singular", parents=[common], help="singular set S_A X")
    sg.add_argument("input")
    sg.add_argument("--family", type=_int_list, default=None,
                    help="ids generating the family (default: nontrivial subgroups)")
    sub.add_parser("quotient", parents=[common], help="orbit complex X/G").add_argument("input")
    br = sub.add_parser("bredon", parents=[common], help="Bredon cohomology")
    br.add_argument("input")
    br.add_argument("--coeff", default="constant", help=f"one of {', '.join(COEFF_NAMES)} or a system file")
    sm = sub.add_parser("smith", parents=[common], help="Smith-theory report")
    sm.add_argument("input")
    sm.add_argument("--r-max", type=int, default=2)
    sub.add_parser("euler", parents=[common], help="Euler characteristic identity").add_argument("input")
    sp = sub.add_parser("split-check", parents=[common], help="contracting homotopy of the cone of the identity")
    sp.add_argument("input")
    sp.add_argument("--certificate", default=None, help="re-verify this certificate instead of computing one")
    sp.add_argument("--emit", default=None, help="write the computed certificate to this file")
    hc = sub.add_parser("homotopy-check", parents=[common], help="G-homotopy equivalence of a chain map")
    hc.add_argument("input")
    hc.add_argument("--target", default=None, help="target complex for an induced map")
    hc.add_argument("--vertex-map", type=_int_list, default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> JobConfig:
    inputs = list(args.inputs) if hasattr(args, "inputs") else [args.input]
    skip = {"command", "input", "inputs", "p", "subdivide", "raw", "format", "field_char"}
    options = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    if "family" in options:
        options["family"] = list(options["family"])
    for key in ("target", "certificate", "group"):
        if key in options:
            inputs_to_check = options[key]
            if not os.path.exists(inputs_to_check) and _preset_kind(inputs_to_check) is None:
                raise InputError(f"{inputs_to_check}: no such file or preset")
    return JobConfig(
        command=args.command, inputs=inputs, p=args.p, auto_subdivide=0 if args.raw else args.subdivide,
        fmt=args.format, field_char=args.field_char, options=options,
    )


def run(cfg: JobConfig) -> tuple[dict, int]:
    """Execute one job; returns the result record and the exit code."""
    try:
        cfg.check()
        result = HANDLERS[cfg.command](cfg)
    except (BredonError, ValueError, KeyError, IndexError, TypeError) as exc:
        result = {"ok": False, "failures": [_fail("input", {"error": type(exc).__name__, "message": str(exc)})]}
        return {"command": cfg.command, "p": cfg.p, **result}, 2
    result = {"command": cfg.command, "p": cfg.p, **result}
    return result, 0 if result["ok"] else 1


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except BredonError as exc:
        result = {"command": args.command, "ok": False,
                  "failures": [_fail("input", {"error": type(exc).__name__, "message": str(exc)})]}
        sys.stdout.write(emit(result, args.format))
        return 2
    result, code = run(cfg)
    sys.stdout.write(emit(result, cfg.fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())

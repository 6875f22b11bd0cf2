"""fibalg: command-line front end over `.fib` files.

Exit codes: 0 ok, 1 usage or unknown entity, 2 parse failure,
3 validation failure, 4 construction failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import algkit as ak
from . import catalog
from .dsl import ParseError, Workspace, parse
from .fincat import (
    ConstructionError,
    FibalgError,
    FinCategory,
    Functor,
    SizeGuardError,
    StructuralError,
    ValidationError,
    discrete_diagram,
    is_colimit,
)
from .grothfib import (
    SplitFibrationData,
    TotalCategory,
    as_total,
    build_total,
    check_total,
    em_hat_comparison,
    grothendieck,
    reindex,
    verify_fibration,
)
from .limcolim import (
    SMALL_SHAPES,
    Absent,
    check_swindle,
    coproduct_oracle,
    limit_in_total,
    limit_sweep,
    linton_coproduct,
    swindle_left_adjoint,
)
from .monadkit import AlgebraObject, ParamEndofunctorData, ParamMonadData, is_em_algebra
from .recognize import recognize

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VALIDATION, EXIT_CONSTRUCTION = 0, 1, 2, 3, 4
SCHEMA_VERSION = "v1"


class CliError(Exception):
    def __init__(self, code: int, message: str, **extra: Any):
        super().__init__(message)
        self.code = code
        self.extra = extra


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        raise CliError(EXIT_USAGE, message, usage=self.format_usage().strip())


@dataclass
class Report:
    command: list[str]
    status: str = "ok"
    payload: dict[str, Any] = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)
    seconds: float = 0.0
    code: int = EXIT_OK
    json: bool | None = None
    subcommand: str | None = None

    def fail(self, code: int, **payload: Any) -> "Report":
        self.status, self.code = "fail", code
        self.payload.update(payload)
        if not (self.payload.get("witness") or self.payload.get("diagnostics")):
            self.payload["witness"] = [self.payload.get("message", "failed")]
        return self

    def as_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "subcommand": self.subcommand,
            "status": self.status,
            "payload": plain(self.payload),
            "timing": {"seconds": round(self.seconds, 6)},
        }


def plain(x: Any) -> Any:
    """JSON-ready copy: tuples become lists, dict keys become strings."""
    if isinstance(x, dict):
        return {("/".join(map(str, k)) if isinstance(k, tuple) else str(k)): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x, key=str) if isinstance(x, (set, frozenset)) else x
        return [plain(v) for v in items]
    if x is None or isinstance(x, (str, int, float, bool)):
        return x
    return str(x)


# ---------------------------------------------------------------------------
# loading and resolution


def read_source(path: str) -> tuple[str, str]:
    """Text of a .fib file; '-' reads stdin, and a missing file whose stem
    names a catalog entry falls back to the bundled copy."""
    if path == "-":
        return sys.stdin.read(), "<stdin>"
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8"), str(p)
    if p.suffix == ".fib" and p.stem in catalog.names():
        return catalog.text(p.stem), f"catalog:{p.stem}"
    raise CliError(EXIT_USAGE, f"no such file: {path}")


def load(path: str) -> tuple[Workspace, str]:
    text, origin = read_source(path)
    try:
        return parse(text), origin
    except ParseError as e:
        code = EXIT_VALIDATION if all(d.severity == "law" for d in e.diagnostics) else EXIT_PARSE
        what = "validation" if code == EXIT_VALIDATION else "parse"
        raise CliError(code, f"{what} failed for {origin}", diagnostics=[d.as_dict() for d in e.diagnostics]) from None


def entity(w: Workspace, name: str, *kinds: str) -> Any:
    try:
        return w.get(name, *kinds)
    except KeyError as e:
        raise CliError(EXIT_USAGE, e.args[0], known=w.names()) from None


def resolve_total(w: Workspace, name: str, flavor: str | None = None, variance: str = "fibration") -> TotalCategory:
    v = entity(w, name, "fibration", "functor", "parammonad", "paramcomonad", "paramfunctor")
    if isinstance(v, SplitFibrationData):
        return grothendieck(v, name)
    if isinstance(v, Functor):
        return as_total(name, v.dom, v, variance)
    if isinstance(v, ParamMonadData):
        return build_total(v, flavor or ("coEM" if v.comonad else "EM"))
    if isinstance(v, ParamEndofunctorData):
        return build_total(v, flavor or "Alg")
    raise CliError(EXIT_USAGE, f"{name} does not present a total category")


def total_object(t: TotalCategory, key: str) -> str:
    """An object of t by id, or by its payload written a:x:xi."""
    if key in t.cat.objects:
        return key
    parts = tuple(key.split(":"))
    for o, k in t.payload.items():
        if tuple(k) == parts:
            return o
    raise CliError(EXIT_USAGE, f"{t.name} has no object {key}")


def describe_total(t: TotalCategory) -> dict[str, Any]:
    return {
        "name": t.name,
        "flavor": t.flavor,
        "variance": t.variance,
        "object_count": len(t.cat.objects),
        "morphism_count": len(t.cat.morphisms),
        "objects": [{"id": o, "over": t.p.omap[o], "data": list(t.payload.get(o, ()))} for o in t.cat.objects],
        "fibres": {a: len(t.over(a)) for a in t.base.objects},
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(a, r: Report) -> None:
    w, origin = load(a.file)
    r.payload.update(source=origin, entities=[{"name": n, "kind": w.kinds[n]} for n in w.names()], diagnostics=[])
    r.lines.append(f"{origin}: {len(w)} entities, all valid")
    r.lines += [f"  {w.kinds[n]} {n}" for n in w.names()]


def cmd_total(a, r: Report) -> None:
    w, _ = load(a.file)
    t = resolve_total(w, a.param, a.flavor)
    rep = check_total(t)
    r.payload.update(describe_total(t), lawful=rep.ok)
    r.lines.append(f"{t.name}: {len(t.cat.objects)} objects, {len(t.cat.morphisms)} morphisms ({t.flavor})")
    r.lines += [f"  {o} over {t.p.omap[o]}: {t.payload.get(o, ())}" for o in t.cat.objects]
    if not rep.ok:
        r.fail(EXIT_VALIDATION, message="total category violates the category laws", witness=[str(rep.violations[0])])


def cmd_reindex(a, r: Report) -> None:
    w, _ = load(a.file)
    p = entity(w, a.param, "parammonad")
    if a.along not in p.params.morphisms:
        raise CliError(EXIT_USAGE, f"{a.along} is not a morphism of {p.params.name}")
    t = build_total(p, "EM")
    parts = a.algebra.split(":")
    if len(parts) == 3 and a.algebra not in t.cat.objects:
        param, x, xi = parts
        if param not in p.params.objects or xi not in p.carriers.morphisms or not is_em_algebra(p, param, x, xi):
            raise ValidationError(f"({param}, {x}, {xi}) is not an algebra of {a.param}")
        o = t.lookup(param, x, xi)
    else:
        o = total_object(t, a.algebra)
        param, x, xi = t.payload[o]
    out = reindex(p, a.along, AlgebraObject(param, x, xi))
    key = (out.param, out.carrier, out.xi)
    r.payload.update(
        source={"id": o, "data": [param, x, xi]},
        along=a.along,
        result={"id": t.lookup(*key), "data": list(key)},
    )
    r.lines.append(f"{a.along}^*({param}, {x}, {xi}) = ({out.param}, {out.carrier}, {out.xi})")


def cmd_verify_fib(a, r: Report) -> None:
    w, _ = load(a.file)
    t = resolve_total(w, a.total, a.flavor, a.variance or "fibration")
    v = verify_fibration(t, a.variance or t.variance)
    r.payload.update(total=t.name, variance=v.data["variance"], holds=v.holds, reason=v.reason)
    r.lines.append(f"{t.name}: {v.reason}")
    if not v.holds:
        r.fail(EXIT_VALIDATION, message=v.reason, witness=list(v.witness))


def cmd_compare_hat(a, r: Report) -> None:
    w, _ = load(a.file)
    p = entity(w, a.param, "parammonad")
    comp, v = em_hat_comparison(p)
    d = v.data or {}
    r.payload.update(
        param=a.param,
        equivalence=v.holds,
        reason=v.reason,
        total_objects=d.get("total_objects"),
        hat_objects=d.get("hat_objects"),
        hom_counts_match=d.get("hom_counts_match"),
        triangle_commutes=d.get("triangle_commutes"),
        pairs_checked=len(comp.dom.objects) ** 2,
    )
    r.lines.append(f"comparison into EM(hat {a.param}): {v.reason}")
    r.lines.append(f"  objects {d.get('total_objects')} vs {d.get('hat_objects')}, hom counts match: {d.get('hom_counts_match')}")
    if not v.holds:
        r.fail(EXIT_VALIDATION, message=v.reason, witness=plain(v.witness) if v.witness else [v.reason])


def _cone(c) -> dict[str, Any]:
    return {"apex": c.apex, "legs": dict(c.legs)}


def cmd_limits(a, r: Report) -> None:
    w, _ = load(a.file)
    t = resolve_total(w, a.total, a.flavor)
    if a.diagram in w and w.kinds[a.diagram] == "functor":
        d = w[a.diagram]
        if d.cod != t.cat:
            raise CliError(EXIT_USAGE, f"{a.diagram} does not land in {t.name}")
        ours = limit_in_total(t, d)
        from .fincat import limit, is_limit

        direct = limit(d)
        agree = (not ours) if direct is None else bool(ours) and t.cat.isomorphic(ours.apex, direct.apex) and is_limit(d, ours)
        r.payload.update(total=t.name, diagram=a.diagram, present=bool(ours), agrees=agree)
        if ours:
            r.payload["limit"] = _cone(ours)
            r.lines.append(f"limit of {a.diagram}: {ours.apex} {t.payload.get(ours.apex, '')}")
        else:
            r.payload["absent"] = {"reason": ours.reason, "witness": list(ours.witness)}
            r.lines.append(f"no limit: {ours.reason}")
        if not agree:
            r.fail(EXIT_VALIDATION, message="disagrees with direct search", witness=[a.diagram])
        return
    if a.diagram == "all":
        shapes = dict(SMALL_SHAPES)
    elif a.diagram in SMALL_SHAPES:
        shapes = {a.diagram: SMALL_SHAPES[a.diagram]}
    elif a.diagram in w and w.kinds[a.diagram] == "category":
        shapes = {a.diagram: w[a.diagram]}
    else:
        raise CliError(EXIT_USAGE, f"unknown diagram {a.diagram}; shapes: all, {', '.join(SMALL_SHAPES)}")
    rep = limit_sweep(t, shapes)
    r.payload.update(
        total=t.name, shapes=list(shapes), checked=rep.checked, present=rep.present, agreed=rep.agreed,
        disagreements=[{"shape": s, "objects": o} for s, o, _, _ in rep.disagreements[:10]],
    )
    r.lines.append(f"{t.name}: {rep.agreed}/{rep.checked} diagrams agree with direct search ({rep.present} limits exist)")
    if not rep.ok:
        r.fail(EXIT_VALIDATION, message="some diagrams disagree with direct search", witness=r.payload["disagreements"])


def cmd_coproduct(a, r: Report) -> None:
    w, _ = load(a.file)
    t = resolve_total(w, a.total, a.flavor)
    o1, o2 = total_object(t, a.left), total_object(t, a.right)
    ours, direct = linton_coproduct(t, o1, o2), coproduct_oracle(t, o1, o2)
    if direct is None:
        agree = not ours
    else:
        agree = bool(ours) and t.cat.isomorphic(ours.apex, direct.apex) and is_colimit(discrete_diagram(t.cat, [o1, o2]), ours)
    r.payload.update(total=t.name, left=o1, right=o2, present=bool(ours), agrees=agree)
    if ours:
        r.payload["coproduct"] = _cone(ours) | {"data": list(t.payload.get(ours.apex, ()))}
        r.lines.append(f"{o1} + {o2} = {ours.apex} {t.payload.get(ours.apex, '')}")
    else:
        r.payload["absent"] = {"reason": ours.reason, "witness": list(ours.witness)}
        r.lines.append(f"{o1} + {o2} does not exist: {ours.reason}")
    if not agree:
        r.fail(EXIT_VALIDATION, message="disagrees with initial-cocone search", witness=[o1, o2])


def cmd_swindle(a, r: Report) -> None:
    w, _ = load(a.file)
    alpha = entity(w, a.alpha, "nat")
    X = alpha.source.dom
    if alpha.source.cod != X or alpha.target.cod != X:
        raise CliError(EXIT_USAGE, f"{a.alpha} is not a transformation between endofunctors")
    parts = a.algebra.split(":")
    if len(parts) == 1 and parts[0] in X.morphisms:
        parts = [X.dst(parts[0]), parts[0]]
    if len(parts) != 2 or parts[0] not in X.objects or parts[1] not in X.morphisms:
        raise CliError(EXIT_USAGE, f"algebra must be CARRIER:STRUCTURE over {X.name}, got {a.algebra}")
    tr = swindle_left_adjoint(alpha, AlgebraObject(None, parts[0], parts[1]), a.cap)
    r.lines += tr.report()
    r.payload.update(
        alpha=a.alpha,
        start={"carrier": parts[0], "structure": parts[1]},
        chain=[{"object": c.obj, "t": c.t, "z": c.z} for c in tr.chain],
        stabilized_at=tr.stabilized_at,
    )
    if tr.stabilized_at is None:
        r.fail(EXIT_CONSTRUCTION, message=tr.result.reason, witness=list(tr.result.witness) or [tr.result.reason])
        return
    v = check_swindle(alpha, tr)
    r.payload.update(result={"carrier": tr.result.carrier, "structure": tr.result.xi}, unit=tr.unit,
                     bijection=v.holds, reason=v.reason)
    r.lines.append(v.reason)
    if not v.holds:
        r.fail(EXIT_VALIDATION, message=v.reason, witness=list(v.witness or [v.reason]))


def cmd_recognize(a, r: Report) -> None:
    w, _ = load(a.file)
    t = resolve_total(w, a.fibration, a.flavor, a.variance or "fibration")
    res = recognize(t)
    d = res.as_dict()
    r.payload.update(fibration=a.fibration, variance=t.variance, **d)
    r.lines.append(f"{a.fibration} ({t.variance}, {len(t.cat.objects)} objects)")
    r.lines.append(f"pruned: {res.pruned}" + (f" ({d['failure']})" if d["failure"] else ""))
    r.lines += [f"  {k}: {v}" for k, v in d["clauses"].items()]
    r.lines.append(f"is_em: {d['is_em']} ({d['reason']})")
    if "source_objects" in d:
        r.lines.append(f"  objects {d['source_objects']} vs {d['target_objects']}")
    if "T_p" in d:
        r.lines += [f"  T^p_{p}: {m}" for p, m in d["T_p"].items()]


def cmd_semidirect(a, r: Report) -> None:
    w, _ = load(a.file)
    act = entity(w, a.action, "action")
    rep = act.laws()
    if not rep.ok:
        raise ValidationError(f"{a.action} is not an action: {rep.violations[0]}", rep)
    s = ak.semidirect(act, f"{act.G.name}x|{act.H.name}")
    candidates = [(n, w[n]) for n in w.names("group") + w.names("monoid")]
    candidates += [(k, g) for k, g in ak.bundled_groups().items() if k not in w]
    iso_to = next((n for n, g in candidates if len(g) == len(s) and ak.find_monoid_isomorphism(s, g)), None)
    trivial = all(act.act(g, x) == x for g in act.G.elements for x in act.H.elements)
    r.payload.update(
        action=a.action, order=len(s), group=isinstance(s, ak.FinGroup), iso_to=iso_to,
        trivial_action=trivial, direct_product=dict(s.mult) == dict(ak.direct_product(act.G, act.H).mult),
        elements=list(s.elements), table={x: [s.op(x, y) for y in s.elements] for x in s.elements},
    )
    r.lines.append(ak.format_table(s).rstrip())
    r.lines.append(f"order {len(s)}; isomorphic to {iso_to or 'no known group'}")


def cmd_examples(a, r: Report) -> None:
    if a.what == "list":
        r.payload["examples"] = [{"name": n, "description": d} for n, d in catalog.DESCRIPTIONS.items()]
        r.lines += [f"{n:18} {d}" for n, d in catalog.DESCRIPTIONS.items()]
        return
    if not a.name:
        raise CliError(EXIT_USAGE, "examples emit needs a NAME")
    try:
        text = catalog.text(a.name)
    except KeyError:
        raise CliError(EXIT_USAGE, f"no catalog entry {a.name}", known=catalog.names()) from None
    r.payload.update(name=a.name, text=text)
    r.lines.append(text.rstrip("\n"))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    ap = _Parser(prog="fibalg", description="Finite fibrations, parametrized monads and their algebras.", parents=[common])
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name: str, fn: Callable, help: str, file: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, parents=[common])
        p.set_defaults(fn=fn)
        if file:
            p.add_argument("file", help=".fib file, or - for stdin")
        return p

    flavors = ["em", "alg", "kl", "cokl", "coem", "coalg"]
    add("check", cmd_check, "parse and validate every entity")
    p = add("total", cmd_total, "build a total category")
    p.add_argument("--param", required=True)
    p.add_argument("--flavor", choices=flavors, default="em")
    p = add("reindex", cmd_reindex, "reindex an algebra along a parameter morphism")
    p.add_argument("--param", required=True)
    p.add_argument("--along", required=True)
    p.add_argument("--algebra", required=True, help="object id or a:x:xi")
    for name, fn, key, hlp in (
        ("verify-fib", cmd_verify_fib, "--total", "decide whether a projection is a (op)fibration"),
        ("recognize", cmd_recognize, "--fibration", "recognize a fibration as an EM fibration"),
    ):
        p = add(name, fn, hlp)
        p.add_argument(key, required=True)
        p.add_argument("--flavor", choices=flavors)
        p.add_argument("--variance", choices=["fibration", "opfibration"])
    p = add("compare-hat", cmd_compare_hat, "compare the EM total with EM of the product monad")
    p.add_argument("--param", required=True)
    p = add("limits", cmd_limits, "limits in an algebra total against direct search")
    p.add_argument("--total", required=True)
    p.add_argument("--diagram", required=True, help="functor entity, shape category, shape name or 'all'")
    p.add_argument("--flavor", choices=flavors)
    p = add("coproduct", cmd_coproduct, "binary coproduct in an algebra total")
    p.add_argument("--total", required=True)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--flavor", choices=flavors)
    p = add("swindle", cmd_swindle, "free algebra along a transformation by iterated pushouts")
    p.add_argument("--alpha", required=True)
    p.add_argument("--algebra", required=True, help="CARRIER:STRUCTURE")
    p.add_argument("--cap", type=int, default=64)
    p = add("semidirect", cmd_semidirect, "semidirect product of an action")
    p.add_argument("--action", required=True)
    p = add("examples", cmd_examples, "bundled catalog", file=False)
    p.add_argument("what", choices=["list", "emit"])
    p.add_argument("name", nargs="?")
    return ap


def run(argv: list[str]) -> tuple[int, Report]:
    r = Report(["fibalg", *argv])
    t0 = time.perf_counter()
    try:
        a = build_parser().parse_args(argv)
        r.json, r.subcommand = a.json, a.cmd
        a.fn(a, r)
    except CliError as e:
        r.fail(e.code, message=str(e), **e.extra)
    except ValidationError as e:
        r.fail(EXIT_VALIDATION, message=str(e))
    except (StructuralError, SizeGuardError, ConstructionError, ValueError) as e:
        r.fail(EXIT_CONSTRUCTION, message=str(e))
    except FibalgError as e:
        r.fail(EXIT_CONSTRUCTION, message=str(e))
    r.seconds = time.perf_counter() - t0
    return r.code, r


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, r = run(argv)
    if r.json if r.json is not None else "--json" in argv:
        print(json.dumps(r.as_dict(), indent=2))
    else:
        out = sys.stdout if r.status == "ok" else sys.stderr
        for line in r.lines:
            print(line, file=sys.stdout)
        if r.status == "fail":
            print(f"error: {r.payload.get('message', 'failed')}", file=out)
            for d in r.payload.get("diagnostics", []):
                print(f"  {d['line']}:{d['column']}: {d['severity']}: {d['message']}", file=out)
            if "usage" in r.payload:
                print(r.payload["usage"], file=out)
    return code


if __name__ == "__main__":
    sys.exit(main())

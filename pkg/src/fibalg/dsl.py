"""The `.fib` presentation language: lexer, parser, workspace and serializer.

    category C { objects: a, b; morphisms: f : a -> b; compose: h = g . f; }
    functor F : C -> D { objects: a |-> x; morphisms: f |-> u; }
    nat alpha : F => G { at a: u; }
    monad M on X { functor: T; unit: eta; mult: mu; }
    parammonad P : A * X { at a: M; along f: alpha; }
    fibration E over A { at a: C; along f: F; }
    group G { elements: e, g; unit: e; mult: g * g = e; }
    action psi : G on H { g . x |-> y; }

Identities are implicit (named id_<object> unless an ``identities:`` section
renames them). Functor expressions in nat headers may be ``id(X)`` or a
composite ``T.S`` (T after S). Comments start with ``//``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterator

from .algkit import ActionAlgebra, FinGroup, FinMonoid, as_group
from .fincat import (
    FibalgError,
    FinCategory,
    Functor,
    NatTrans,
    compose_functors,
    identity_functor,
    validate,
)
from .grothfib import SplitFibrationData, check_split
from .monadkit import (
    MonadData,
    ParamEndofunctorData,
    ParamMonadData,
    check_monad,
    check_param,
    make_comonad,
    param_comonad,
    param_monad,
)

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>//[^\n]*)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<punct>\|->|->|=>|[{}:;,=.*()])"
)

KINDS = (
    "category", "functor", "nat", "monad", "comonad", "parammonad", "paramcomonad",
    "paramfunctor", "fibration", "group", "monoid", "action",
)


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    length: int
    offset: int

    def slice(self, text: str) -> str:
        return text[self.offset : self.offset + self.length]


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # lexical | syntax | reference | law
    message: str
    span: Span
    code: str = ""

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.severity} error: {self.message}"

    def as_dict(self) -> dict[str, Any]:
        s = self.span
        return {"severity": self.severity, "code": self.code, "message": self.message,
                "line": s.line, "column": s.column, "length": s.length}


class ParseError(FibalgError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(map(str, diagnostics[:3])))
        self.diagnostics = diagnostics

    @property
    def severity(self) -> str:
        return self.diagnostics[0].severity


@dataclass(frozen=True)
class Token:
    kind: str  # ident | punct | eof
    text: str
    span: Span


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    toks: list[Token] = []
    diags: list[Diagnostic] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            # swallow a run of unknown characters as one lexical error
            end = pos + 1
            while end < len(text) and _TOKEN.match(text, end) is None:
                end += 1
            diags.append(Diagnostic("lexical", f"unexpected character {text[pos]!r}", Span(line, col, end - pos, pos), "bad-char"))
            col += end - pos
            pos = end
            continue
        chunk = m.group()
        if m.lastgroup in ("ident", "punct"):
            toks.append(Token(m.lastgroup, chunk, Span(line, col, len(chunk), pos)))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    toks.append(Token("eof", "", Span(line, col, 0, pos)))
    return toks, diags


# ---------------------------------------------------------------------------
# syntax: blocks of statements


@dataclass
class Block:
    kind: Token
    name: Token
    header: list[Token]
    statements: list[list[Token]]
    close: Token


class _Syntax(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


def _blocks(toks: list[Token]) -> list[Block]:
    out = []
    i = 0

    def fail(t: Token, msg: str) -> None:
        raise _Syntax(Diagnostic("syntax", msg, t.span, "syntax"))

    while toks[i].kind != "eof":
        kw = toks[i]
        if kw.kind != "ident" or kw.text not in KINDS:
            fail(kw, f"expected a declaration keyword, got {kw.text!r}")
        name = toks[i + 1]
        if name.kind != "ident":
            fail(name, "expected a name")
        i += 2
        header = []
        while toks[i].text != "{":
            if toks[i].kind == "eof" or toks[i].text in ("}", ";"):
                fail(toks[i], "expected '{'")
            header.append(toks[i])
            i += 1
        i += 1
        stmts: list[list[Token]] = []
        cur: list[Token] = []
        while True:
            t = toks[i]
            if t.kind == "eof":
                fail(t, f"unterminated {kw.text} {name.text}")
            if t.text == "{":
                fail(t, "unexpected '{'")
            if t.text == "}":
                if cur:
                    fail(t, "expected ';' before '}'")
                break
            if t.text == ";":
                stmts.append(cur)
                cur = []
            else:
                cur.append(t)
            i += 1
        out.append(Block(kw, name, header, stmts, toks[i]))
        i += 1
    return out


def _match(toks: list[Token], pattern: str) -> list[Token] | None:
    """Match a space-separated pattern; ID matches any identifier."""
    pat = pattern.split()
    if len(pat) != len(toks):
        return None
    got = []
    for p, t in zip(pat, toks):
        if p == "ID":
            if t.kind != "ident":
                return None
            got.append(t)
        elif t.text != p:
            return None
    return got


def _id_list(toks: list[Token]) -> list[Token] | None:
    if not toks:
        return []
    ids = toks[0::2]
    seps = toks[1::2]
    if len(toks) % 2 == 0 or any(t.kind != "ident" for t in ids) or any(t.text != "," for t in seps):
        return None
    return ids


# statement shapes per kind: section -> entry pattern (None marks a list)
_SECTIONS: dict[str, dict[str, str | None]] = {
    "category": {"objects": None, "identities": "ID |-> ID", "morphisms": "ID : ID -> ID", "compose": "ID = ID . ID"},
    "functor": {"objects": "ID |-> ID", "morphisms": "ID |-> ID"},
    "monad": {"functor": "ID", "unit": "ID", "mult": "ID"},
    "group": {"elements": None, "unit": "ID", "mult": "ID * ID = ID"},
}
_SECTIONS["comonad"] = _SECTIONS["monad"]
_SECTIONS["monoid"] = _SECTIONS["group"]
_PREFIXED = {
    "nat": {"at": "ID : ID"},
    "parammonad": {"at": "ID : ID", "along": "ID : ID"},
    "fibration": {"at": "ID : ID", "along": "ID : ID"},
    "action": {"": "ID . ID |-> ID"},
}
for _k in ("paramcomonad", "paramfunctor"):
    _PREFIXED[_k] = _PREFIXED["parammonad"]


def _entries(b: Block) -> dict[str, list[list[Token]]]:
    kind = b.kind.text
    out: dict[str, list[list[Token]]] = {}
    if kind in _PREFIXED:
        shapes = _PREFIXED[kind]
        for st in b.statements:
            if not st:
                continue
            head = st[0].text if st[0].kind == "ident" and st[0].text in shapes else ""
            body = st[1:] if head else st
            got = _match(body, shapes[head]) if head in shapes else None
            if got is None:
                raise _Syntax(Diagnostic("syntax", f"malformed entry in {kind} {b.name.text}", (st[0]).span, "syntax"))
            out.setdefault(head, []).append(got)
        return out
    sections = _SECTIONS[kind]
    current = None
    for st in b.statements:
        if not st:
            continue
        sec = None
        if len(st) >= 2 and st[0].kind == "ident" and st[0].text in sections and st[1].text == ":":
            rest = st[2:]
            pat = sections[st[0].text]
            fits = not rest or (_id_list(rest) is not None if pat is None else _match(rest, pat) is not None)
            cur_pat = sections[current] if current else ""
            as_entry = current is not None and (_id_list(st) if cur_pat is None else _match(st, cur_pat)) is not None
            if fits or not as_entry:
                sec = st[0].text
        if sec is not None:
            current = sec
            body = st[2:]
            out.setdefault(sec, [])
            if not body:
                continue
        else:
            body = st
        if current is None:
            raise _Syntax(Diagnostic("syntax", f"entry outside a section in {kind} {b.name.text}", st[0].span, "syntax"))
        pat = sections[current]
        got = _id_list(body) if pat is None else _match(body, pat)
        if got is None:
            raise _Syntax(Diagnostic("syntax", f"malformed {current} entry", body[0].span, "syntax"))
        out[current].append(got)
    return out


# ---------------------------------------------------------------------------
# the workspace


@dataclass
class Workspace:
    entities: dict[str, Any] = field(default_factory=dict)
    kinds: dict[str, str] = field(default_factory=dict)
    spans: dict[str, Span] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entities)

    def __getitem__(self, name: str) -> Any:
        return self.entities[name]

    def __contains__(self, name: str) -> bool:
        return name in self.entities

    def names(self, kind: str | None = None) -> list[str]:
        return [n for n in self.entities if kind is None or self.kinds[n] == kind]

    def get(self, name: str, *kinds: str) -> Any:
        if name not in self.entities:
            raise KeyError(f"no entity named {name!r}")
        if kinds and self.kinds[name] not in kinds:
            raise KeyError(f"{name!r} is a {self.kinds[name]}, expected {' or '.join(kinds)}")
        return self.entities[name]

    def name_of(self, value: Any, kind: str) -> str | None:
        for n, v in self.entities.items():
            if self.kinds[n] == kind and (v is value or _same(kind, v, value)):
                return n
        return None

    def _fresh(self, base: str) -> str:
        nm = re.sub(r"[^A-Za-z0-9_']", "_", base) or "x"
        if not IDENT.fullmatch(nm):
            nm = "_" + nm
        out, k = nm, 1
        while out in self.entities or out in KINDS:
            k += 1
            out = f"{nm}_{k}"
        return out

    def _put(self, kind: str, value: Any, name: str | None) -> str:
        found = self.name_of(value, kind)
        if found is not None:
            return found
        nm = self._fresh(name or getattr(value, "name", kind))
        self.entities[nm] = value
        self.kinds[nm] = kind
        return nm

    def add(self, value: Any, name: str | None = None) -> str:
        """Register an entity and everything it refers to; returns its name."""
        if isinstance(value, FinCategory):
            return self._put("category", value, name)
        if isinstance(value, Functor):
            self.add(value.dom)
            self.add(value.cod)
            return self._put("functor", value, name)
        if isinstance(value, NatTrans):
            for f in (value.source, value.target):
                for part in _factors(f):
                    self.add(part)
            return self._put("nat", value, name)
        if isinstance(value, MonadData):
            if value.comonad:
                self.add(value.T.op())
                self.add(_comonad_counit(value))
                self.add(_comonad_comult(value))
                return self._put("comonad", value, name)
            self.add(value.T)
            self.add(value.eta)
            self.add(value.mu)
            return self._put("monad", value, name)
        if isinstance(value, ParamMonadData):
            kind = "paramcomonad" if value.comonad else "parammonad"
            A, X = _param_cats(value)
            self.add(A)
            self.add(X)
            for a in A.objects:
                self.add(value.monad(a))
            for f in A.morphisms:
                self.add(_param_nat(value, f))
            return self._put(kind, value, name)
        if isinstance(value, ParamEndofunctorData):
            if value.comonad:
                raise FibalgError("parametrized co-endofunctors have no textual form")
            self.add(value.params)
            self.add(value.carriers)
            for a in value.params.objects:
                self.add(value.functor(a))
            for f in value.params.morphisms:
                self.add(value.trans(f))
            return self._put("paramfunctor", value, name)
        if isinstance(value, SplitFibrationData):
            self.add(value.base)
            for a in value.base.objects:
                self.add(value.fibre[a])
            for f in value.base.morphisms:
                self.add(value.reindex[f])
            return self._put("fibration", value, name)
        if isinstance(value, ActionAlgebra):
            self.add(value.G)
            self.add(value.H)
            return self._put("action", value, name)
        if isinstance(value, FinMonoid):
            return self._put("group" if isinstance(value, FinGroup) else "monoid", value, name)
        raise TypeError(f"cannot register {type(value).__name__}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Workspace):
            return NotImplemented
        return list(self.entities) == list(other.entities) and self.kinds == other.kinds and all(
            _same(self.kinds[n], self.entities[n], other.entities[n]) for n in self.entities
        )


def workspace(*values: Any) -> Workspace:
    w = Workspace()
    for v in values:
        w.add(v)
    return w


def _factors(f: Functor) -> list[Functor]:
    """The workspace-level pieces of a functor expression (single functor)."""
    return [f]


def _param_cats(p: ParamMonadData) -> tuple[FinCategory, FinCategory]:
    return (p.params.op(), p.carriers.op()) if p.comonad else (p.params, p.carriers)


def _param_nat(p: ParamMonadData, f: str) -> NatTrans:
    if not p.comonad:
        return p.trans(f)
    A, X = _param_cats(p)
    a, b = A.src(f), A.dst(f)
    return NatTrans(f"S_{f}", p.functor(a).op(), p.functor(b).op(), dict(p.trans(f).components))


def _comonad_counit(m: MonadData) -> NatTrans:
    S = m.T.op()
    return NatTrans(f"eps_{m.name}", S, identity_functor(S.dom), dict(m.eta.components))


def _comonad_comult(m: MonadData) -> NatTrans:
    S = m.T.op()
    return NatTrans(f"delta_{m.name}", S, compose_functors(S, S), dict(m.mu.components))


def _same(kind: str, a: Any, b: Any) -> bool:
    if a is b:
        return True
    if kind in ("category", "functor", "nat"):
        return a == b
    if kind in ("monad", "comonad"):
        return a.comonad == b.comonad and a.cat == b.cat and a.T == b.T and a.eta == b.eta and a.mu == b.mu
    if kind in ("parammonad", "paramcomonad"):
        return (
            a.comonad == b.comonad and a.params == b.params and a.carriers == b.carriers
            and all(_same("monad", a.monad(x), b.monad(x)) for x in a.params.objects)
            and all(dict(a.trans(f).components) == dict(b.trans(f).components) for f in a.params.morphisms)
        )
    if kind == "paramfunctor":
        return (
            a.params == b.params and a.carriers == b.carriers
            and all(a.functor(x) == b.functor(x) for x in a.params.objects)
            and all(a.trans(f) == b.trans(f) for f in a.params.morphisms)
        )
    if kind == "fibration":
        return (
            a.base == b.base
            and all(a.fibre[x] == b.fibre[x] for x in a.base.objects)
            and all(a.reindex[f] == b.reindex[f] for f in a.base.morphisms)
        )
    if kind in ("group", "monoid"):
        return a.elements == b.elements and a.unit == b.unit and dict(a.mult) == dict(b.mult)
    if kind == "action":
        return _same("group", a.G, b.G) and _same("group", a.H, b.H) and dict(a.psi) == dict(b.psi)
    return False


# ---------------------------------------------------------------------------
# serialization


def serialize(w: Workspace) -> str:
    blocks = [_emit(w, n) for n in w.entities]
    return "\n".join(blocks)


def serialize_value(*values: Any) -> str:
    return serialize(workspace(*values))


def _section(title: str, lines: list[str]) -> list[str]:
    if not lines:
        return []
    return [f"  {title}:"] + [f"    {ln};" for ln in lines]


def _fexpr(w: Workspace, f: Functor) -> str:
    nm = w.name_of(f, "functor")
    if nm is not None:
        return nm
    if f.dom == f.cod and dict(f.omap) == {o: o for o in f.dom.objects} and dict(f.mmap) == {m: m for m in f.dom.morphisms}:
        return f"id({w.name_of(f.dom, 'category')})"
    # a binary composite T.T of a registered functor with itself or another
    for n1 in w.names("functor"):
        g = w.entities[n1]
        for n2 in w.names("functor"):
            h = w.entities[n2]
            if g.dom == h.cod and h.dom == f.dom and g.cod == f.cod and compose_functors(g, h) == f:
                return f"{n1}.{n2}"
    raise FibalgError(f"functor {f.name} is not expressible in this workspace")


def _emit(w: Workspace, n: str) -> str:
    kind, v = w.kinds[n], w.entities[n]
    ref = lambda x, k: w.name_of(x, k)  # noqa: E731
    if kind == "category":
        lines = [f"category {n} {{", f"  objects: {', '.join(v.objects)};"]
        lines += _section("identities", [f"{o} |-> {v.identities[o]}" for o in v.objects if v.identities[o] != f"id_{o}"])
        nonid = [m for m in v.morphisms if not v.is_identity(m)]
        lines += _section("morphisms", [f"{m} : {v.src(m)} -> {v.dst(m)}" for m in nonid])
        comps = [f"{v.compose(g, f)} = {g} . {f}" for g in nonid for f in nonid if v.dst(f) == v.src(g)]
        lines += _section("compose", comps)
        return "\n".join(lines + ["}"]) + "\n"
    if kind == "functor":
        lines = [f"functor {n} : {ref(v.dom, 'category')} -> {ref(v.cod, 'category')} {{"]
        lines += _section("objects", [f"{o} |-> {v.omap[o]}" for o in v.dom.objects])
        lines += _section("morphisms", [f"{m} |-> {v.mmap[m]}" for m in v.dom.morphisms if not v.dom.is_identity(m)])
        return "\n".join(lines + ["}"]) + "\n"
    if kind == "nat":
        lines = [f"nat {n} : {_fexpr(w, v.source)} => {_fexpr(w, v.target)} {{"]
        lines += [f"  at {o}: {v.components[o]};" for o in v.source.dom.objects]
        return "\n".join(lines + ["}"]) + "\n"
    if kind == "monad":
        return (
            f"monad {n} on {ref(v.cat, 'category')} {{\n  functor: {ref(v.T, 'functor')};\n"
            f"  unit: {ref(v.eta, 'nat')};\n  mult: {ref(v.mu, 'nat')};\n}}\n"
        )
    if kind == "comonad":
        S = v.T.op()
        return (
            f"comonad {n} on {ref(S.dom, 'category')} {{\n  functor: {ref(S, 'functor')};\n"
            f"  unit: {ref(_comonad_counit(v), 'nat')};\n  mult: {ref(_comonad_comult(v), 'nat')};\n}}\n"
        )
    if kind in ("parammonad", "paramcomonad"):
        A, X = _param_cats(v)
        mk = "comonad" if v.comonad else "monad"
        lines = [f"{kind} {n} : {ref(A, 'category')} * {ref(X, 'category')} {{"]
        lines += [f"  at {a}: {ref(v.monad(a), mk)};" for a in A.objects]
        lines += [f"  along {f}: {ref(_param_nat(v, f), 'nat')};" for f in A.morphisms]
        return "\n".join(lines + ["}"]) + "\n"
    if kind == "paramfunctor":
        lines = [f"paramfunctor {n} : {ref(v.params, 'category')} * {ref(v.carriers, 'category')} {{"]
        lines += [f"  at {a}: {ref(v.functor(a), 'functor')};" for a in v.params.objects]
        lines += [f"  along {f}: {ref(v.trans(f), 'nat')};" for f in v.params.morphisms]
        return "\n".join(lines + ["}"]) + "\n"
    if kind == "fibration":
        lines = [f"fibration {n} over {ref(v.base, 'category')} {{"]
        lines += [f"  at {a}: {ref(v.fibre[a], 'category')};" for a in v.base.objects]
        lines += [f"  along {f}: {ref(v.reindex[f], 'functor')};" for f in v.base.morphisms]
        return "\n".join(lines + ["}"]) + "\n"
    if kind in ("group", "monoid"):
        lines = [f"{kind} {n} {{", f"  elements: {', '.join(v.elements)};", f"  unit: {v.unit};"]
        lines += _section("mult", [f"{a} * {b} = {v.op(a, b)}" for a in v.elements for b in v.elements])
        return "\n".join(lines + ["}"]) + "\n"
    if kind == "action":
        g = w.name_of(v.G, "group") or w.name_of(v.G, "monoid")
        h = w.name_of(v.H, "group") or w.name_of(v.H, "monoid")
        lines = [f"action {n} : {g} on {h} {{"]
        lines += [f"  {x} . {y} |-> {v.act(x, y)};" for x in v.G.elements for y in v.H.elements]
        return "\n".join(lines + ["}"]) + "\n"
    raise FibalgError(f"unknown entity kind {kind}")


# ---------------------------------------------------------------------------
# resolution


class _Resolver:
    def __init__(self, text: str):
        self.text = text
        self.w = Workspace()
        self.diags: list[Diagnostic] = []
        self.failed: set[str] = set()

    def err(self, severity: str, msg: str, tok: Token | Span, code: str = "") -> None:
        span = tok.span if isinstance(tok, Token) else tok
        self.diags.append(Diagnostic(severity, msg, span, code or severity))

    def ref(self, tok: Token, *kinds: str) -> Any:
        n = tok.text
        if n in self.w.entities:
            if self.w.kinds[n] in kinds:
                return self.w.entities[n]
            self.err("reference", f"{n} is a {self.w.kinds[n]}, expected {' or '.join(kinds)}", tok)
            raise _Skip
        if n not in self.failed:
            self.err("reference", f"undeclared {' or '.join(kinds)} {n}", tok)
        raise _Skip

    def member(self, tok: Token, pool, what: str) -> str:
        if tok.text not in pool:
            self.err("reference", f"undeclared {what} {tok.text}", tok)
            raise _Skip
        return tok.text

    def law(self, b: Block, rep) -> None:
        if not rep.ok:
            first = rep.violations[0]
            self.err("law", f"{b.kind.text} {b.name.text} violates {first}", b.name, first.law)
            raise _Skip

    def fexpr(self, toks: list[Token]) -> Functor:
        if _match(toks, "ID ( ID )") and toks[0].text == "id":
            return identity_functor(self.ref(toks[2], "category"))
        parts = toks[0::2]
        if not toks or len(toks) % 2 == 0 or any(t.text != "." for t in toks[1::2]):
            self.err("syntax", "malformed functor expression", toks[0] if toks else Span(1, 1, 0, 0), "syntax")
            raise _Skip
        fs = [self.ref(t, "functor") for t in parts]
        out = fs[-1]
        for g, t in zip(reversed(fs[:-1]), reversed(parts[:-1])):
            if g.dom != out.cod:
                self.err("reference", f"cannot compose {t.text} here", t)
                raise _Skip
            out = compose_functors(g, out)
        return out

    def run(self, blocks: list[Block]) -> None:
        for b in blocks:
            n = b.name.text
            if n in self.w.entities or n in self.failed:
                self.err("reference", f"duplicate name {n}", b.name, "duplicate")
                continue
            try:
                ent = _Entries(_entries(b))
                value = getattr(self, "do_" + b.kind.text)(b, ent)
            except _Syntax as e:
                self.diags.append(e.diag)
                self.failed.add(n)
                continue
            except _Skip:
                self.failed.add(n)
                continue
            self.w.entities[n] = value
            self.w.kinds[n] = b.kind.text
            self.w.spans[n] = b.name.span

    # -- entity builders -------------------------------------------------------

    def do_category(self, b: Block, e: "_Entries") -> FinCategory:
        objs = [t for row in e.get("objects") for t in row]
        names = [t.text for t in objs]
        for i, t in enumerate(objs):
            if t.text in names[:i]:
                self.err("reference", f"duplicate object {t.text}", t, "duplicate")
                raise _Skip
        ids = {o: f"id_{o}" for o in names}
        for o, m in e.get("identities"):
            ids[self.member(o, names, "object")] = m.text
        arrows = []
        ends = {ids[o]: (o, o) for o in names}
        for m, s, t in e.get("morphisms"):
            if m.text in ends:
                self.err("reference", f"duplicate morphism {m.text}", m, "duplicate")
                raise _Skip
            ends[m.text] = (self.member(s, names, "object"), self.member(t, names, "object"))
            arrows.append((m.text, ends[m.text][0], ends[m.text][1]))
        comp = {}
        where = {}
        for h, g, f in e.get("compose"):
            for t in (h, g, f):
                self.member(t, ends, "morphism")
            if ends[f.text][1] != ends[g.text][0]:
                self.err("law", f"{g.text} . {f.text} is not composable", g, "not-composable")
                raise _Skip
            if ends[h.text] != (ends[f.text][0], ends[g.text][1]):
                self.err("law", f"{h.text} has the wrong ends for {g.text} . {f.text}", h, "composite-typing")
                raise _Skip
            comp[(g.text, f.text)] = h.text
            where[(g.text, f.text)] = g
        idset = set(ids.values())
        for g, (s2, _t2) in ends.items():
            for f, (_s1, t1) in ends.items():
                if t1 == s2 and g not in idset and f not in idset and (g, f) not in comp:
                    self.err("law", f"incomplete table: no entry for {g} . {f}", b.name, "incomplete-table")
                    raise _Skip
        c = FinCategory.build(b.name.text, names, arrows, comp, ids)
        self.law(b, validate(c))
        return c

    def do_functor(self, b: Block, e: "_Entries") -> Functor:
        hdr = _match(b.header, ": ID -> ID")
        if hdr is None:
            raise _Syntax(Diagnostic("syntax", "expected ': C -> D'", (b.header or [b.name])[0].span, "syntax"))
        C, D = self.ref(hdr[0], "category"), self.ref(hdr[1], "category")
        omap, mmap = {}, {}
        for s, t in e.get("objects"):
            omap[self.member(s, C.objects, "object")] = self.member(t, D.objects, "object")
        for s, t in e.get("morphisms"):
            mmap[self.member(s, C.morphisms, "morphism")] = self.member(t, D.morphisms, "morphism")
        missing = [o for o in C.objects if o not in omap]
        if missing:
            self.err("law", f"functor {b.name.text} does not map object {missing[0]}", b.name, "partial")
            raise _Skip
        for o in C.objects:
            mmap.setdefault(C.identity(o), D.identity(omap[o]))
        missing = [m for m in C.morphisms if m not in mmap]
        if missing:
            self.err("law", f"functor {b.name.text} does not map morphism {missing[0]}", b.name, "partial")
            raise _Skip
        f = Functor(b.name.text, C, D, omap, mmap)
        self.law(b, validate(f))
        return f

    def do_nat(self, b: Block, e: "_Entries") -> NatTrans:
        if not b.header or b.header[0].text != ":" or not any(t.text == "=>" for t in b.header):
            raise _Syntax(Diagnostic("syntax", "expected ': F => G'", (b.header or [b.name])[0].span, "syntax"))
        k = next(i for i, t in enumerate(b.header) if t.text == "=>")
        F, G = self.fexpr(b.header[1:k]), self.fexpr(b.header[k + 1 :])
        if F.dom != G.dom or F.cod != G.cod:
            self.err("reference", "source and target functors are not parallel", b.header[k])
            raise _Skip
        comps = {}
        for o, m in e.get("at"):
            comps[self.member(o, F.dom.objects, "object")] = self.member(m, F.cod.morphisms, "morphism")
        missing = [o for o in F.dom.objects if o not in comps]
        if missing:
            self.err("law", f"no component at {missing[0]}", b.name, "partial")
            raise _Skip
        a = NatTrans(b.name.text, F, G, comps)
        self.law(b, validate(a))
        return a

    def _monad_parts(self, b: Block, e: "_Entries"):
        hdr = _match(b.header, "on ID") if b.header and b.header[0].text == "on" else None
        if hdr is None:
            raise _Syntax(Diagnostic("syntax", "expected 'on X'", (b.header or [b.name])[0].span, "syntax"))
        X = self.ref(hdr[0], "category")
        parts = {}
        for key in ("functor", "unit", "mult"):
            rows = e.get(key)
            if len(rows) != 1:
                self.err("syntax", f"{b.kind.text} {b.name.text} needs exactly one {key}", b.name, "syntax")
                raise _Skip
            parts[key] = self.ref(rows[0][0], "functor" if key == "functor" else "nat")
        return X, parts

    def do_monad(self, b: Block, e: "_Entries") -> MonadData:
        X, p = self._monad_parts(b, e)
        m = MonadData(b.name.text, X, p["functor"], p["unit"], p["mult"])
        self._check_monad(b, m)
        return m

    def do_comonad(self, b: Block, e: "_Entries") -> MonadData:
        X, p = self._monad_parts(b, e)
        S = p["functor"]
        eps, delta = p["unit"], p["mult"]
        if not (eps.source == S and eps.target == identity_functor(X)) or not (
            delta.source == S and delta.target == compose_functors(S, S)
        ):
            self.err("law", f"comonad {b.name.text}: counit must be S => id, comultiplication S => S.S", b.name, "typing")
            raise _Skip
        m = make_comonad(b.name.text, S, eps.components, delta.components)
        self._check_monad(b, m)
        return m

    def _check_monad(self, b: Block, m: MonadData) -> None:
        try:
            rep = check_monad(m)
        except FibalgError as err:
            self.err("law", f"{b.kind.text} {b.name.text}: {err}", b.name, "typing")
            raise _Skip from None
        self.law(b, rep)

    def _param_header(self, b: Block):
        hdr = _match(b.header, ": ID * ID")
        if hdr is None:
            raise _Syntax(Diagnostic("syntax", "expected ': A * X'", (b.header or [b.name])[0].span, "syntax"))
        return self.ref(hdr[0], "category"), self.ref(hdr[1], "category")

    def _per(self, b: Block, e: "_Entries", A: FinCategory, kind: str):
        per_obj, per_mor = {}, {}
        for a, m in e.get("at"):
            per_obj[self.member(a, A.objects, "object")] = self.ref(m, kind)
        for f, n in e.get("along"):
            per_mor[self.member(f, A.morphisms, "morphism")] = self.ref(n, "nat")
        missing = [a for a in A.objects if a not in per_obj] or [f for f in A.morphisms if f not in per_mor and not A.is_identity(f)]
        if missing:
            self.err("law", f"{b.kind.text} {b.name.text} has nothing at {missing[0]}", b.name, "partial")
            raise _Skip
        return per_obj, per_mor

    def _check_param(self, b: Block, p) -> None:
        try:
            rep = check_param(p)
        except FibalgError as err:
            self.err("law", f"{b.kind.text} {b.name.text}: {err}", b.name, "typing")
            raise _Skip from None
        self.law(b, rep)

    def do_parammonad(self, b: Block, e: "_Entries") -> ParamMonadData:
        A, X = self._param_header(b)
        monads, nats = self._per(b, e, A, "monad")
        try:
            p = param_monad(b.name.text, A, X, monads, {f: dict(a.components) for f, a in nats.items()})
        except FibalgError as err:
            self.err("law", str(err), b.name, "typing")
            raise _Skip from None
        self._check_param(b, p)
        return p

    def do_paramcomonad(self, b: Block, e: "_Entries") -> ParamMonadData:
        A, X = self._param_header(b)
        comonads, nats = self._per(b, e, A, "comonad")
        try:
            p = param_comonad(b.name.text, A, X, comonads, {f: dict(a.components) for f, a in nats.items()})
        except FibalgError as err:
            self.err("law", str(err), b.name, "typing")
            raise _Skip from None
        self._check_param(b, p)
        return p

    def do_paramfunctor(self, b: Block, e: "_Entries") -> ParamEndofunctorData:
        A, X = self._param_header(b)
        fs, nats = self._per(b, e, A, "functor")
        for f in A.morphisms:
            if f not in nats:
                self.err("law", f"paramfunctor {b.name.text} has nothing along {f}", b.name, "partial")
                raise _Skip
        p = ParamEndofunctorData(b.name.text, A, X, fs, nats)
        self._check_param(b, p)
        return p

    def do_fibration(self, b: Block, e: "_Entries") -> SplitFibrationData:
        hdr = _match(b.header, "over ID") if b.header and b.header[0].text == "over" else None
        if hdr is None:
            raise _Syntax(Diagnostic("syntax", "expected 'over A'", (b.header or [b.name])[0].span, "syntax"))
        A = self.ref(hdr[0], "category")
        fib, r = {}, {}
        for a, c in e.get("at"):
            fib[self.member(a, A.objects, "object")] = self.ref(c, "category")
        for f, n in e.get("along"):
            r[self.member(f, A.morphisms, "morphism")] = self.ref(n, "functor")
        for a in A.objects:
            if a not in fib:
                self.err("law", f"fibration {b.name.text} has no fibre over {a}", b.name, "partial")
                raise _Skip
        for a in A.objects:
            r.setdefault(A.identity(a), identity_functor(fib[a]))
        for f in A.morphisms:
            if f not in r:
                self.err("law", f"fibration {b.name.text} has no reindexing along {f}", b.name, "partial")
                raise _Skip
        s = SplitFibrationData(b.name.text, A, fib, r)
        try:
            rep = check_split(s)
        except FibalgError as err:
            self.err("law", str(err), b.name, "typing")
            raise _Skip from None
        self.law(b, rep)
        return s

    def _monoid(self, b: Block, e: "_Entries") -> FinMonoid:
        els = [t.text for row in e.get("elements") for t in row]
        units = e.get("unit")
        if len(units) != 1:
            self.err("syntax", f"{b.kind.text} {b.name.text} needs exactly one unit", b.name, "syntax")
            raise _Skip
        unit = self.member(units[0][0], els, "element")
        table = {}
        for x, y, z in e.get("mult"):
            table[(self.member(x, els, "element"), self.member(y, els, "element"))] = self.member(z, els, "element")
        for x in els:
            for y in els:
                if (x, y) not in table:
                    self.err("law", f"incomplete table: no entry for {x} * {y}", b.name, "incomplete-table")
                    raise _Skip
        m = FinMonoid(b.name.text, tuple(els), unit, table)
        self.law(b, m.laws())
        return m

    def do_monoid(self, b: Block, e: "_Entries") -> FinMonoid:
        return self._monoid(b, e)

    def do_group(self, b: Block, e: "_Entries") -> FinGroup:
        m = self._monoid(b, e)
        try:
            return as_group(m)
        except FibalgError as err:
            self.err("law", str(err), b.name, "inverse")
            raise _Skip from None

    def do_action(self, b: Block, e: "_Entries") -> ActionAlgebra:
        hdr = _match(b.header, ": ID on ID")
        if hdr is None:
            raise _Syntax(Diagnostic("syntax", "expected ': G on H'", (b.header or [b.name])[0].span, "syntax"))
        G, H = self.ref(hdr[0], "group", "monoid"), self.ref(hdr[1], "group", "monoid")
        psi = {}
        for g, x, y in e.get(""):
            psi[(self.member(g, G.elements, "element"), self.member(x, H.elements, "element"))] = self.member(y, H.elements, "element")
        for g in G.elements:
            for x in H.elements:
                if (g, x) not in psi:
                    self.err("law", f"incomplete table: no entry for {g} . {x}", b.name, "incomplete-table")
                    raise _Skip
        a = ActionAlgebra(b.name.text, G, H, psi)
        self.law(b, a.laws())
        return a


class _Skip(Exception):
    pass


class _Entries:
    def __init__(self, d: dict[str, list[list[Token]]]):
        self.d = d

    def get(self, key: str) -> list[list[Token]]:
        return self.d.get(key, [])


def diagnose(text: str) -> tuple[Workspace | None, list[Diagnostic]]:
    toks, diags = tokenize(text)
    if diags:
        return None, diags
    try:
        blocks = _blocks(toks)
    except _Syntax as e:
        return None, [e.diag]
    r = _Resolver(text)
    r.run(blocks)
    if r.diags:
        return None, r.diags
    return r.w, []


def parse(text: str) -> Workspace:
    """Parse and validate; raises ParseError carrying the diagnostics."""
    w, diags = diagnose(text)
    if diags:
        raise ParseError(diags)
    return w


def iter_entities(w: Workspace, kind: str) -> Iterator[tuple[str, Any]]:
    for n in w.names(kind):
        yield n, w.entities[n]

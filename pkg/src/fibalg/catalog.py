"""The bundled example catalog: builders, and the shipped `.fib` files."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from . import algkit as ak
from . import fixtures as fx
from .dsl import Workspace, parse, serialize

DESCRIPTIONS = {
    "chain3": "the 3-chain c0 -> c1 -> c2",
    "bool4": "the Boolean lattice on two atoms",
    "writer_chain3": "join-writer parametrized monad on the 3-chain",
    "coreader_bool4": "meet-coreader parametrized comonad (simple fibration)",
    "semiauto_m2": "parametrized endofunctor of a two-element monoid (semiautomata)",
    "codomain2": "codomain fibration of the 2-chain (pruned, not EM)",
    "points_splitepi": "evaluation functor on endofunctors of the split epi",
    "swindle_chain3": "const c0 => shift on the 3-chain, for the pushout chain",
    "groups": "small groups and actions on them",
}


def build(name: str) -> Workspace:
    w = Workspace()
    if name == "chain3":
        w.add(fx.chain3())
    elif name == "bool4":
        w.add(fx.bool4())
    elif name == "writer_chain3":
        w.add(fx.writer_chain3())
    elif name == "coreader_bool4":
        w.add(fx.coreader_bool4())
    elif name == "semiauto_m2":
        w.add(fx.semiauto_m2())
    elif name == "codomain2":
        w.add(fx.codomain2().param)
    elif name == "points_splitepi":
        w.add(fx.points_splitepi().p, "points_splitepi")
    elif name == "swindle_chain3":
        w.add(fx.swindle_shift())
    elif name == "groups":
        for key, g in ak.bundled_groups().items():
            w.add(g, key)
        for key, a in ak.bundled_actions().items():
            w.add(a, key)
    else:
        raise KeyError(f"no catalog entry {name!r}")
    return w


def names() -> list[str]:
    return list(DESCRIPTIONS)


def text(name: str) -> str:
    """The shipped file for a catalog entry."""
    if name not in DESCRIPTIONS:
        raise KeyError(f"no catalog entry {name!r}")
    return resources.files("fibalg").joinpath("catalog", f"{name}.fib").read_text(encoding="utf-8")


def load(name: str) -> Workspace:
    return parse(text(name))


def render(name: str) -> str:
    return f"// {name}: {DESCRIPTIONS[name]}\n" + serialize(build(name))


def write_all(directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for n in names():
        p = directory / f"{n}.fib"
        p.write_text(render(n), encoding="utf-8")
        out.append(p)
    return out

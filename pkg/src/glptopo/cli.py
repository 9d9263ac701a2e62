"""Command-line workbench.

Verb families: gl, gl3, space, tree, ord, dmap, icard, selftest.  Verdicts
are data (exit status 0); exit codes signal usage errors (2), malformed
input (3) and exceeded scan caps (4).  ``--json`` switches every verb to a
single JSON object on stdout; the default output is tab-delimited
key/value lines.  ``--dot`` and ``--fig`` write graph and figure files
alongside the main output where a tree or a space is in play.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import formula as fm
from . import icard
from . import kripke as kr
from . import space as sp
from .dmap import build_dmap, refute_on_ordinal
from .errors import CapExceeded, ParseError
from .ordinal import cmp, add, ell_iter, parse_ordinal
from .selfcheck import run_selftest

EXIT_OK = 0
EXIT_INPUT = 3
EXIT_CAP = 4


def load_space(data) -> sp.FiniteSpace:
    """Space from its JSON form: opens, subbase, or order description."""
    if "opens" in data:
        return sp.FiniteSpace.from_opens(data["points"], data["opens"])
    if "subbase" in data:
        return sp.FiniteSpace.from_subbase(data["points"], data["subbase"])
    if "order" in data:
        return sp.FiniteSpace.from_order(
            data["order"], mode=data.get("mode", "upset"), n=data.get("points")
        )
    raise ValueError("space JSON needs 'opens', 'subbase' or 'order'")


def _read_json(path):
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise ValueError("cannot read %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise ParseError("bad JSON in %s: %s" % (path, exc.msg), exc.pos)


def _emit(args, payload: dict, human=None):
    if args.json:
        print(json.dumps(payload))
        return
    lines = human if human is not None else [
        "%s\t%s" % (k, json.dumps(v)) for k, v in payload.items()
    ]
    for line in lines:
        print(line)


def _maybe_render_tree(args, tree, labels=None, title=None, highlight=()):
    if getattr(args, "dot", None):
        with open(args.dot, "w") as handle:
            handle.write(kr.tree_to_dot(tree, labels) + "\n")
    if getattr(args, "fig", None):
        from . import render

        render.save_tree_figure(tree, args.fig, labels=labels, title=title,
                                highlight=highlight)


# -- gl ----------------------------------------------------------------------


def cmd_gl(args):
    phi = fm.parse(args.formula)
    if args.action == "prove":
        verdict = kr.gl_decide(phi)
        _emit(args, {"provable": verdict.provable})
        return EXIT_OK
    if args.action == "sat":
        model = kr.gl_satisfiable(phi)
        payload = {"satisfiable": model is not None}
        if model is not None:
            payload["model"] = model.to_json()
            _maybe_render_tree(args, model.tree, title="model of %s" % args.formula,
                               highlight=(model.node,))
        _emit(args, payload)
        return EXIT_OK
    verdict = kr.gl_decide(phi)
    payload = verdict.to_json()
    if verdict.countermodel is not None:
        cm = verdict.countermodel
        if args.dot:
            with open(args.dot, "w") as handle:
                handle.write(kr.countermodel_to_dot(cm, phi) + "\n")
        if args.fig:
            from . import render

            render.save_tree_figure(
                cm.tree, args.fig,
                labels={i: _node_label(cm, i) for i in range(cm.tree.n)},
                title="countermodel of %s" % args.formula,
                highlight=(cm.node,),
            )
    _emit(args, payload)
    return EXIT_OK


def _node_label(cm, node):
    here = [name for name, m in sorted(cm.valuation.items()) if m >> node & 1]
    return ",".join(here) if here else "-"


def cmd_gl3(args):
    verdict = kr.gl3_decide(fm.parse(args.formula))
    payload = verdict.to_json()
    if verdict.countermodel is not None:
        _maybe_render_tree(args, verdict.countermodel.tree,
                           title="GL.3 countermodel of %s" % args.formula,
                           highlight=(verdict.countermodel.node,))
    _emit(args, payload)
    return EXIT_OK


# -- space --------------------------------------------------------------------


def cmd_space(args):
    if args.action == "classify":
        space = load_space(_read_json(args.file))
        report = space.classify()
        if args.fig:
            from . import render

            render.save_space_figure(space, report, args.fig)
        _emit(args, report.to_json())
        return EXIT_OK
    if args.action == "plus":
        space = load_space(_read_json(args.file))
        _emit(args, space.plus_topology().to_json())
        return EXIT_OK
    if args.action == "dsum":
        data = _read_json(args.file)
        base = load_space(data["base"])
        plugs = {int(k): load_space(v) for k, v in data.get("plugs", {}).items()}
        total, proj = base.dsum(plugs)
        _emit(args, {"space": total.to_json(), "projection": list(proj.assignment)})
        return EXIT_OK
    if args.action == "glpcheck":
        data = _read_json(args.file)
        spaces = [load_space(d) for d in data["spaces"]]
        _emit(args, sp.check_glp_space(spaces).to_json())
        return EXIT_OK
    # modelcheck
    data = _read_json(args.file)
    spaces = [load_space(d) for d in data["spaces"]]
    valuation = {k: sp.mask(v) for k, v in data.get("valuation", {}).items()}
    phi = fm.parse(args.formula)
    truth = sp.model_check(spaces, valuation, phi)
    _emit(args, {"truth_set": list(sp.points(truth))})
    return EXIT_OK


# -- tree ---------------------------------------------------------------------


def cmd_tree(args):
    if args.action == "fork":
        tree = kr.fork(args.n)
        _maybe_render_tree(args, tree, title="%d-fork" % args.n)
        _emit(args, tree.to_json())
        return EXIT_OK
    if args.action == "dsum":
        data = _read_json(args.file)
        base = kr.Tree.from_json(data["base"])
        plugs = {int(k): kr.Tree.from_json(v) for k, v in data.get("plugs", {}).items()}
        tree = kr.tree_dsum(base, plugs)
        _maybe_render_tree(args, tree, title="tree d-sum")
        _emit(args, tree.to_json())
        return EXIT_OK
    # export
    tree = kr.Tree.from_json(_read_json(args.file))
    dot = kr.tree_to_dot(tree)
    if args.dot:
        with open(args.dot, "w") as handle:
            handle.write(dot + "\n")
    if args.fig:
        from . import render

        render.save_tree_figure(tree, args.fig)
    if args.json:
        _emit(args, {"tree": tree.to_json(), "dot": dot})
    else:
        print(dot)
    return EXIT_OK


# -- ord ----------------------------------------------------------------------


def cmd_ord(args):
    if args.action == "cmp":
        c = cmp(parse_ordinal(args.a), parse_ordinal(args.b))
        _emit(args, {"result": {-1: "<", 0: "=", 1: ">"}[c]})
        return EXIT_OK
    if args.action == "add":
        _emit(args, {"sum": str(add(parse_ordinal(args.a), parse_ordinal(args.b)))})
        return EXIT_OK
    _emit(args, {"ell": str(ell_iter(parse_ordinal(args.a), args.k))})
    return EXIT_OK


# -- dmap ---------------------------------------------------------------------


def cmd_dmap(args):
    if args.action == "refute":
        refut = refute_on_ordinal(fm.parse(args.formula))
        if refut is None:
            _emit(args, {"provable": True})
            return EXIT_OK
        if args.dot:
            f = refut.dmap
            labels = {n: str(f.least_preimage(n)) for n in range(f.tree.n)}
            with open(args.dot, "w") as handle:
                handle.write(kr.tree_to_dot(f.tree, labels) + "\n")
        if args.fig:
            from . import render

            render.save_refutation_figure(refut, args.fig)
        payload = {"provable": False}
        payload.update(refut.to_json())
        _emit(args, payload)
        return EXIT_OK
    tree = kr.Tree.from_json(_read_json(args.file))
    f = build_dmap(tree)
    if args.action == "build":
        labels = {n: str(f.least_preimage(n)) for n in range(tree.n)}
        _maybe_render_tree(args, tree, labels=labels,
                           title="d-map domain [0, %s)" % f.dom)
        _emit(args, f.to_json())
        return EXIT_OK
    if args.action == "apply":
        xi = parse_ordinal(args.ordinal)
        _emit(args, {"node": f.apply(xi)})
        return EXIT_OK
    # preimage
    _emit(args, {"ordinal": str(f.least_preimage(args.node))})
    return EXIT_OK


# -- icard ---------------------------------------------------------------------


def cmd_icard(args):
    if args.action == "eval":
        value = icard.eval_closed(fm.parse(args.formula), parse_ordinal(args.ordinal))
        _emit(args, {"value": value})
        return EXIT_OK
    if args.action == "min":
        _emit(args, {"min": str(icard.min_word(fm.parse_word(args.word)))})
        return EXIT_OK
    if args.action == "entail":
        a = fm.parse_word(args.a)
        b = fm.parse_word(args.b)
        _emit(args, {
            "provable": icard.word_entails(a, b),
            "min": str(icard.min_word(a)),
        })
        return EXIT_OK
    if args.action == "decide":
        a = fm.parse_word(args.a)
        bs = [fm.parse_word(b) for b in args.bs]
        _emit(args, icard.decide_word_implication(a, bs).to_json())
        return EXIT_OK
    # trichotomy
    tag = icard.trichotomy(fm.parse_word(args.a), fm.parse_word(args.b))
    _emit(args, {"result": tag})
    return EXIT_OK


def cmd_selftest(args):
    results = run_selftest(seed=args.seed, samples=args.samples)
    ok = all(r[1] for r in results)
    if args.json:
        print(json.dumps({
            "ok": ok,
            "suites": [{"name": n, "ok": o, "detail": d} for n, o, d in results],
        }))
    else:
        for name, good, detail in results:
            print("%s\t%s\t%s" % ("PASS" if good else "FAIL", name, detail))
    return EXIT_OK if ok else 1


# -- wiring ---------------------------------------------------------------------


def _common(parser, dot=False, fig=False):
    parser.add_argument("--json", action="store_true", help="emit one JSON object")
    parser.add_argument("--cap", type=int, default=sp.DEFAULT_SCAN_CAP,
                        help="work cap for exhaustive scans")
    parser.add_argument("--seed", type=int, default=0, help="sampling seed")
    parser.add_argument("--samples", type=int, default=100, help="sample count")
    if dot:
        parser.add_argument("--dot", help="write a DOT file here")
    if fig:
        parser.add_argument("--fig", help="render a figure here (png/pdf)")


def build_parser():
    top = argparse.ArgumentParser(prog="glptopo", description=__doc__)
    subs = top.add_subparsers(dest="family", required=True)

    gl = subs.add_parser("gl", help="GL decision procedures")
    gl_sub = gl.add_subparsers(dest="action", required=True)
    for action in ("prove", "sat", "countermodel"):
        p = gl_sub.add_parser(action)
        p.add_argument("formula")
        _common(p, dot=True, fig=True)
        p.set_defaults(func=cmd_gl)

    gl3 = subs.add_parser("gl3", help="GL.3 decision procedure")
    gl3_sub = gl3.add_subparsers(dest="action", required=True)
    p = gl3_sub.add_parser("prove")
    p.add_argument("formula")
    _common(p, dot=True, fig=True)
    p.set_defaults(func=cmd_gl3)

    space = subs.add_parser("space", help="finite space operations")
    space_sub = space.add_subparsers(dest="action", required=True)
    for action in ("classify", "plus", "dsum", "glpcheck"):
        p = space_sub.add_parser(action)
        p.add_argument("file")
        _common(p, fig=(action == "classify"))
        p.set_defaults(func=cmd_space)
    p = space_sub.add_parser("modelcheck")
    p.add_argument("file")
    p.add_argument("formula")
    _common(p)
    p.set_defaults(func=cmd_space)

    tree = subs.add_parser("tree", help="tree constructions and export")
    tree_sub = tree.add_subparsers(dest="action", required=True)
    p = tree_sub.add_parser("fork")
    p.add_argument("n", type=int)
    _common(p, dot=True, fig=True)
    p.set_defaults(func=cmd_tree)
    for action in ("dsum", "export"):
        p = tree_sub.add_parser(action)
        p.add_argument("file")
        _common(p, dot=True, fig=True)
        p.set_defaults(func=cmd_tree)

    ordp = subs.add_parser("ord", help="ordinal arithmetic")
    ord_sub = ordp.add_subparsers(dest="action", required=True)
    for action in ("cmp", "add"):
        p = ord_sub.add_parser(action)
        p.add_argument("a")
        p.add_argument("b")
        _common(p)
        p.set_defaults(func=cmd_ord)
    p = ord_sub.add_parser("ell")
    p.add_argument("a")
    p.add_argument("--k", type=int, default=1, help="number of iterations")
    _common(p)
    p.set_defaults(func=cmd_ord)

    dm = subs.add_parser("dmap", help="ordinal-to-tree d-maps")
    dm_sub = dm.add_subparsers(dest="action", required=True)
    p = dm_sub.add_parser("build")
    p.add_argument("file")
    _common(p, dot=True, fig=True)
    p.set_defaults(func=cmd_dmap)
    p = dm_sub.add_parser("apply")
    p.add_argument("file")
    p.add_argument("ordinal")
    _common(p)
    p.set_defaults(func=cmd_dmap)
    p = dm_sub.add_parser("preimage")
    p.add_argument("file")
    p.add_argument("node", type=int)
    _common(p)
    p.set_defaults(func=cmd_dmap)
    p = dm_sub.add_parser("refute")
    p.add_argument("formula")
    _common(p, dot=True, fig=True)
    p.set_defaults(func=cmd_dmap)

    ic = subs.add_parser("icard", help="word-fragment semantics")
    ic_sub = ic.add_subparsers(dest="action", required=True)
    p = ic_sub.add_parser("eval")
    p.add_argument("formula")
    p.add_argument("ordinal")
    _common(p)
    p.set_defaults(func=cmd_icard)
    p = ic_sub.add_parser("min")
    p.add_argument("word")
    _common(p)
    p.set_defaults(func=cmd_icard)
    for action in ("entail", "trichotomy"):
        p = ic_sub.add_parser(action)
        p.add_argument("a")
        p.add_argument("b")
        _common(p)
        p.set_defaults(func=cmd_icard)
    p = ic_sub.add_parser("decide")
    p.add_argument("a")
    p.add_argument("bs", nargs="*")
    _common(p)
    p.set_defaults(func=cmd_icard)

    st = subs.add_parser("selftest", help="run the built-in invariant suites")
    _common(st)
    st.set_defaults(func=cmd_selftest)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except CapExceeded as exc:
        print("cap exceeded: %s" % exc, file=sys.stderr)
        return EXIT_CAP
    except (ValueError, KeyError) as exc:
        print("invalid input: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: check, mincost, eval, export."""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional

from . import costautomata as ca
from . import forr, reach, saturation
from .nfa import RegexError, from_regex
from .rprs import SystemDefinitionError, fmt_word, load_system, word

EXIT_OK = 0
EXIT_UNBOUNDED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _dump(data) -> str:
    return json.dumps(data, separators=(",", ":"), sort_keys=False)


def _value(v):
    return "inf" if v == math.inf else int(v)


def _load(path: str):
    try:
        return load_system(path)
    except OSError as e:
        raise UsageError(f"cannot read system file: {e}") from e


def _regex(text: str, sigma, flag: str):
    try:
        return from_regex(text, sigma)
    except RegexError as e:
        raise UsageError(f"{flag}: {e}") from e


def _word(text: str, sigma):
    w = word(text)
    for a in w:
        if a not in sigma:
            raise UsageError(f"symbol {a!r} is not in the alphabet {' '.join(sigma)}")
    return w


def cmd_check(args) -> int:
    sys_ = _load(args.system)
    sigma = sys_.alphabet
    A = _regex(args.from_, sigma, "--from")
    B = _regex(args.to, sigma, "--to")
    ans = reach.bounded_reach(sys_, A, B, strict=args.no_refl, profile=args.profile)
    if args.format == "json":
        print(_dump(ans.to_dict()))
    else:
        if ans.bounded:
            print(f"bounded: every configuration reaches the target set within cost {ans.bound}")
        else:
            ce = "" if ans.counterexample is None else f" (e.g. from {fmt_word(ans.counterexample)})"
            print(f"unbounded{ce}")
            if ans.reason:
                print(f"reason: {ans.reason}")
    return EXIT_OK if ans.bounded else EXIT_UNBOUNDED


def cmd_mincost(args) -> int:
    sys_ = _load(args.system)
    u = _word(args.pair[0], sys_.alphabet)
    v = _word(args.pair[1], sys_.alphabet)
    eng = reach.engine(sys_, "full")
    val = eng.min_cost(u, v, strict=args.no_refl)
    if args.format == "json":
        print(_dump({"value": _value(val)}))
    else:
        print(f"min cost {fmt_word(u)} -> {fmt_word(v)}: {_value(val)}")
    return EXIT_OK


def _bindings(items: List[str], sigma=None):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--bind expects NAME=VALUE, got {item!r}")
        name, val = item.split("=", 1)
        out[name.strip()] = _word(val, sigma) if sigma is not None else val
    return out


def cmd_eval(args) -> int:
    try:
        phi = forr.parse_formula(args.formula)
    except forr.ForrError as e:
        raise UsageError(f"--formula: {e}") from e
    if args.structure:
        try:
            with open(args.structure) as fh:
                S = forr.structure_from_json(fh.read())
        except OSError as e:
            raise UsageError(f"cannot read structure file: {e}") from e
        except json.JSONDecodeError as e:
            raise UsageError(f"structure file is not JSON: {e}") from e
        I = _bindings(args.bind)
        val = forr.eval_explicit(S, phi, I)
        out = {"value": _value(val)}
        text = f"value: {_value(val)}"
    else:
        if not args.system:
            raise UsageError("eval needs --structure or --system")
        sys_ = _load(args.system)
        sigma = sys_.alphabet
        sets = {}
        for item in args.set or []:
            if "=" not in item:
                raise UsageError(f"--set expects NAME=REGEX, got {item!r}")
            name, rx = item.split("=", 1)
            sets[name.strip()] = _regex(rx, sigma, "--set")
        S = forr.system_structure(sys_, sets, strict=args.no_refl)
        if forr.is_closed(phi):
            res = forr.decide_sentence(S, phi)
            out = res.to_dict()
            text = f"value: {out['value']}"
        else:
            I = _bindings(args.bind, sigma)
            comp = forr.compile_positive(S, phi)
            missing = [v for v in comp.variables if v not in I]
            if missing:
                raise UsageError(f"--bind missing for free variables {', '.join(missing)}")
            val = comp.transducer.value(*(I[v] for v in comp.variables))
            out = {"value": _value(val), "slack": comp.slack}
            text = f"value: {_value(val)} (may undershoot by at most {comp.slack})"
    print(_dump(out) if args.format == "json" else text)
    return EXIT_OK


def cmd_export(args) -> int:
    sys_ = _load(args.system)
    eng = reach.engine(sys_, args.profile)
    fmt = args.format if args.format in ("dot", "json") else "dot"
    if args.what == "saturation":
        if fmt != "dot":
            raise UsageError("saturation export supports --format dot only")
        text = saturation.to_dot(eng.saturation)
    else:
        T = eng.exact if args.what == "transducer" else eng.approx
        if fmt == "dot":
            text = ca.to_dot(T.automaton, name=args.what)
        else:
            text = json.dumps(ca.to_json(T.automaton), sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="costreach",
        description="Bounded reachability and resource costs for prefix replacement systems.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, system_required=True):
        sp.add_argument("--system", required=system_required, help="system definition file")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--no-refl", action="store_true", help="paths need at least one step")

    c = sub.add_parser("check", help="decide bounded reachability from --from to --to")
    common(c)
    c.add_argument("--from", dest="from_", required=True, metavar="REGEX")
    c.add_argument("--to", required=True, metavar="REGEX")
    c.add_argument("--profile", choices=("full", "restricted"), default="restricted",
                   help="annotations used for the verdict")
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("mincost", help="exact minimal cost between two configurations")
    common(m)
    m.add_argument("--pair", nargs=2, required=True, metavar=("U", "V"))
    m.set_defaults(func=cmd_mincost)

    e = sub.add_parser("eval", help="evaluate an FO+RR formula")
    common(e, system_required=False)
    e.add_argument("--formula", required=True)
    e.add_argument("--structure", help="finite structure as JSON")
    e.add_argument("--set", action="append", metavar="NAME=REGEX", help="unary relation (system mode)")
    e.add_argument("--bind", action="append", metavar="VAR=VALUE", help="value of a free variable")
    e.set_defaults(func=cmd_eval)

    x = sub.add_parser("export", help="write saturated automata or transducers")
    x.add_argument("--system", required=True)
    x.add_argument("--what", choices=("saturation", "transducer", "approx"), default="transducer")
    x.add_argument("--format", choices=("dot", "json"), default="dot")
    x.add_argument("--profile", choices=("full", "restricted"), default="full")
    x.add_argument("--output", "-o")
    x.set_defaults(func=cmd_export)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, SystemDefinitionError, forr.ForrError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

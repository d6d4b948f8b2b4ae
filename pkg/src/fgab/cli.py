"""Command-line front end.

Every invocation is turned into a job document

    {"command": NAME, "operands": {...}, "options": {...}}

either from the argument list or from ``--json FILE``, and run by :func:`run`.
Exit codes: 0 success, 1 input error, 2 failed mathematical precondition.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from .exactness import ShortExactSeq, SnakeInput, complete_splitting_from_retraction, \
    complete_splitting_from_section, five_lemma_verify, snake
from .extensions import Extension, ExtClass, baer_sum, class_to_extension, extension_to_class, \
    pullback, pushout
from .functors import ext_group, hom_group, six_term_ext_contra, six_term_ext_cov, six_term_mod_n, \
    six_term_tor, tensor_group, tor_group
from .groups import FgGroup, Homomorphism, PreconditionError, Presentation, \
    classify, direct_sum
from .intmat import IntMatrix
from .padic import ALL, INFINITE_AT_PRECISION, PadicInt, PrimeSet, complete, derived_completion, \
    digits, invert_unit, localize, valuation
from .towers import ColimSequence, ColimTailKind, Tail, TailKind, Tower, colim_pattern, \
    is_mittag_leffler, lim


class InputError(Exception):
    """Malformed input: exit code 1."""


class ParseError(InputError):
    def __init__(self, text: str, position: int, message: str, hint: str | None = None):
        self.text, self.position, self.hint = text, position, hint
        msg = f"{message} at position {position}: {text!r}"
        if hint:
            msg += f" ({hint})"
        super().__init__(msg)


# -- group expressions -------------------------------------------------------------


def parse_group(text: str) -> FgGroup:
    """Parse ``atom ('+' atom)*`` with ``atom := Z | Z^k | Z/n``; ``0`` is the trivial group."""
    s = text
    pos = 0
    n = len(s)

    def skip():
        nonlocal pos
        while pos < n and s[pos].isspace():
            pos += 1

    def integer() -> int:
        nonlocal pos
        skip()
        start = pos
        while pos < n and s[pos].isdigit():
            pos += 1
        if start == pos:
            raise ParseError(text, start, "expected an integer")
        return int(s[start:pos])

    orders: list[int] = []
    skip()
    if s[pos:].strip() == "0":
        return FgGroup()
    while True:
        skip()
        if pos >= n or s[pos] != "Z":
            raise ParseError(text, pos, "expected 'Z'")
        pos += 1
        skip()
        if pos < n and s[pos] == "^":
            pos += 1
            orders += [0] * integer()
        elif pos < n and s[pos] == "/":
            pos += 1
            skip()
            at = pos
            m = integer()
            if m == 0:
                raise ParseError(text, at, "Z/0 is not allowed", "use Z")
            orders.append(m)
        else:
            orders.append(0)
        skip()
        if pos == n:
            break
        if s[pos] != "+":
            raise ParseError(text, pos, "expected '+' or end of input")
        pos += 1
    return FgGroup.from_orders(orders)


def render_group(g: FgGroup) -> str:
    return str(g)


# -- decoding -------------------------------------------------------------------


def _need(d: dict, key: str):
    if not isinstance(d, dict) or key not in d:
        raise InputError(f"missing operand {key!r}")
    return d[key]


def _int(v, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"{name} must be an integer")
    return v


def _matrix(v, name: str = "matrix") -> list[list[int]]:
    if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
        raise InputError(f"{name} must be a list of integer rows")
    for r in v:
        for x in r:
            _int(x, name)
    return v


def decode_group(v) -> FgGroup:
    if isinstance(v, str):
        return parse_group(v)
    if isinstance(v, dict):
        rank = _int(v.get("rank", 0), "rank")
        factors = v.get("factors", [])
        if not isinstance(factors, list):
            raise InputError("factors must be a list")
        try:
            return FgGroup(rank, tuple(_int(x, "factor") for x in factors))
        except ValueError as e:
            raise InputError(str(e)) from None
    raise InputError("a group is an expression string or {\"rank\", \"factors\"}")


def decode_hom(v) -> Homomorphism:
    a, b = decode_group(_need(v, "domain")), decode_group(_need(v, "codomain"))
    rows = _matrix(_need(v, "matrix"))
    if b.ngens == 0:
        m = IntMatrix.zeros(0, a.ngens)
    else:
        if len(rows) != b.ngens or any(len(r) != a.ngens for r in rows):
            raise InputError(f"matrix must be {b.ngens}x{a.ngens} for {a} -> {b}")
        m = IntMatrix.from_rows(rows, a.ngens)
    return Homomorphism(a, b, m)


def decode_ses(v) -> ShortExactSeq:
    j = v.get("j", v.get("i")) if isinstance(v, dict) else None
    q = v.get("q", v.get("p")) if isinstance(v, dict) else None
    if j is None or q is None:
        raise InputError("a short exact sequence needs maps \"j\" and \"q\"")
    j, q = decode_hom(j), decode_hom(q)
    if j.codomain != q.domain:
        raise InputError("maps of the sequence are not composable")
    return ShortExactSeq(j, q)


def decode_primes(v) -> PrimeSet:
    if v == "ALL":
        return ALL
    if isinstance(v, dict) and "at" in v:
        return PrimeSet.all_except([_int(p, "prime") for p in _list(v["at"])])
    return PrimeSet.of(_int(p, "prime") for p in _list(v))


def _list(v) -> list:
    if isinstance(v, int) and not isinstance(v, bool):
        return [v]
    if not isinstance(v, list):
        raise InputError("expected a list")
    return v


def decode_tower(v) -> Tower:
    prefix = [decode_group(g) for g in v.get("prefix", [])]
    tail = _need(v, "tail")
    kind_name = _need(tail, "kind")
    try:
        kind = TailKind(kind_name)
    except ValueError:
        raise InputError(f"unknown tail kind {kind_name!r}") from None
    raw_maps = v.get("maps", [])
    if len(raw_maps) != max(len(prefix) - 1, 0):
        raise InputError("need one map per consecutive pair of prefix groups")
    maps = [_hom_rows(prefix[i + 1], prefix[i], m) for i, m in enumerate(raw_maps)]
    if kind is TailKind.ENDO_ITERATE:
        if not prefix:
            raise InputError("ENDO_ITERATE needs a prefix")
        last = prefix[-1]
        t = Tail.endo_iterate(_hom_rows(last, last, _need(tail, "endo")))
    elif kind in (TailKind.PCOMPLETION, TailKind.PTORSION):
        t = Tail(kind, group=decode_group(_need(tail, "group")), p=_int(_need(tail, "p"), "p"))
    else:
        t = Tail(kind)
    return Tower(prefix, maps, t)


def _hom_rows(a: FgGroup, b: FgGroup, rows) -> Homomorphism:
    return decode_hom({"domain": a.to_json(), "codomain": b.to_json(), "matrix": rows})


def decode_colim(v) -> ColimSequence:
    tail = _need(v, "tail")
    kind = _need(tail, "kind")
    if kind == "PRUFER":
        return ColimSequence.prufer(_int(_need(tail, "p"), "p"))
    if kind == "MULT_BY_N":
        return ColimSequence.mult_by_n(decode_group(_need(v, "group")), _int(_need(tail, "n"), "n"))
    prefix = [decode_group(g) for g in v.get("prefix", [])]
    if not prefix:
        raise InputError("sequence needs a prefix")
    raw_maps = v.get("maps", [])
    if len(raw_maps) != len(prefix) - 1:
        raise InputError("need one map per consecutive pair of prefix groups")
    maps = tuple(_hom_rows(prefix[i], prefix[i + 1], m) for i, m in enumerate(raw_maps))
    try:
        k = ColimTailKind(kind)
    except ValueError:
        raise InputError(f"unknown tail kind {kind!r}") from None
    endo = None
    if k is ColimTailKind.ENDO:
        last = prefix[-1]
        endo = _hom_rows(last, last, _need(tail, "endo"))
    return ColimSequence(tuple(prefix), maps, k, endo)


# -- commands ---------------------------------------------------------------------


def _seq_text(seq) -> str:
    names = " -> ".join(str(g) for g in seq.groups)
    return f"0 -> {names} -> 0\nexact: yes"


def _ext_report(e: Extension) -> tuple[dict, str]:
    c = extension_to_class(e)
    rep = {"extension": e.to_json(), "middle": e.B.to_json(), "exact": True,
           "class": list(c.element.coords), "ext_group": c.element.parent.to_json()}
    return rep, f"0 -> {e.A} -> {e.B} -> {e.C} -> 0\nclass: {list(c.element.coords)} in Ext = {c.element.parent}"


def cmd_classify(o: dict):
    if "group" in o:
        g = decode_group(o["group"])
    else:
        n = _int(_need(o, "generators"), "generators")
        rels = _matrix(o.get("relators", []), "relators")
        if any(len(r) != n for r in rels):
            raise InputError(f"each relator must have {n} entries")
        m = IntMatrix.from_rows(rels, n).T if rels else IntMatrix.zeros(n, 0)
        g = classify(Presentation(n, m)).group
    return g.to_json(), str(g)


def cmd_sum(o: dict):
    gs = [decode_group(x) for x in _need(o, "groups")]
    g = direct_sum(*gs).group if gs else FgGroup()
    return g.to_json(), str(g)


def _pair(o):
    return decode_group(_need(o, "A")), decode_group(_need(o, "B"))


def cmd_hom(o):
    g, basis = hom_group(*_pair(o))
    return {"group": g.to_json(), "generators": [f.matrix.tolist() for f in basis]}, str(g)


def cmd_tensor(o):
    g = tensor_group(*_pair(o))
    return g.to_json(), str(g)


def cmd_tor(o):
    g = tor_group(*_pair(o))
    return g.to_json(), str(g)


def cmd_ext(o):
    g = ext_group(*_pair(o))
    return g.to_json(), str(g)


def cmd_six_term(o):
    kind = _need(o, "kind")
    e = decode_ses(_need(o, "sequence"))
    if kind == "mod-n":
        seq = six_term_mod_n(e, _int(_need(o, "n"), "n"))
    elif kind == "tor":
        seq = six_term_tor(decode_group(_need(o, "U")), e)
    elif kind == "ext-cov":
        seq = six_term_ext_cov(decode_group(_need(o, "U")), e)
    elif kind == "ext-contra":
        seq = six_term_ext_contra(e, decode_group(_need(o, "V")))
    else:
        raise InputError(f"unknown six-term kind {kind!r}")
    return seq.to_json(), _seq_text(seq)


def cmd_snake(o):
    s = SnakeInput(decode_ses(_need(o, "top")), decode_ses(_need(o, "bottom")),
                   decode_hom(_need(o, "f")), decode_hom(_need(o, "g")), decode_hom(_need(o, "h")))
    seq = snake(s)
    return seq.to_json(), _seq_text(seq) + f"\ndelta: {seq.delta.matrix.tolist()}"


def cmd_split(o):
    e = decode_ses(_need(o, "sequence"))
    if "retraction" in o:
        r = decode_hom(o["retraction"])
        s = complete_splitting_from_retraction(e, r)
    elif "section" in o:
        s = decode_hom(o["section"])
        r = complete_splitting_from_section(e, s)
    else:
        raise InputError("give a \"retraction\" or a \"section\"")
    rep = {"retraction": r.to_json(), "section": s.to_json(), "identities": "verified"}
    return rep, f"retraction: {r.matrix.tolist()}\nsection: {s.matrix.tolist()}\nidentities: verified"


def cmd_five_lemma(o):
    top = [decode_hom(x) for x in _need(o, "top")]
    bottom = [decode_hom(x) for x in _need(o, "bottom")]
    vert = [decode_hom(x) for x in _need(o, "verticals")]
    if len(top) != 4 or len(bottom) != 4 or len(vert) != 5:
        raise InputError("expected rows of four maps and five verticals")
    rep = five_lemma_verify(top, bottom, vert)
    return {"middle_is_iso": rep.middle_is_iso}, "middle map is an isomorphism"


def cmd_baer(o):
    return _ext_report(baer_sum(Extension(decode_ses(_need(o, "E0"))), Extension(decode_ses(_need(o, "E1")))))


def cmd_pullback(o):
    return _ext_report(pullback(Extension(decode_ses(_need(o, "extension"))), decode_hom(_need(o, "map"))))


def cmd_pushout(o):
    return _ext_report(pushout(Extension(decode_ses(_need(o, "extension"))), decode_hom(_need(o, "map"))))


def cmd_class_of(o):
    c = extension_to_class(Extension(decode_ses(_need(o, "extension"))))
    return {"class": list(c.element.coords), "ext_group": c.element.parent.to_json()}, \
        f"{list(c.element.coords)} in Ext = {c.element.parent}"


def cmd_extension_of(o):
    c, a = decode_group(_need(o, "C")), decode_group(_need(o, "A"))
    group = ext_group(c, a)
    coords = [_int(x, "class") for x in _list(_need(o, "class"))]
    if len(coords) != group.ngens:
        raise InputError(f"class needs {group.ngens} coordinates in Ext = {group}")
    return _ext_report(class_to_extension(ExtClass(c, a, group.element(coords))))


def cmd_localize(o):
    r = localize(decode_group(_need(o, "group")), decode_primes(_need(o, "invert")))
    return r.to_json(), str(r)


def cmd_complete(o):
    r = complete(decode_group(_need(o, "group")), _int(_need(o, "p"), "p"))
    return r.to_json(), str(r)


def cmd_derived_complete(o):
    l0, l1 = derived_completion(decode_group(_need(o, "group")), _int(_need(o, "p"), "p"))
    return {"L0": l0.to_json(), "L1": l1.to_json()}, f"L0 = {l0}\nL1 = {l1}"


def cmd_padic(o):
    op = _need(o, "op")
    p, k = _int(_need(o, "p"), "p"), _int(_need(o, "K"), "K")
    x = PadicInt(p, k, _int(_need(o, "x"), "x"))
    if op in ("add", "mul"):
        y = PadicInt(p, k, _int(_need(o, "y"), "y"))
        r = x + y if op == "add" else x * y
        return {"p": p, "K": r.precision, "residue": r.residue}, str(r.residue)
    if op == "inv":
        r = invert_unit(x)
        return {"p": p, "K": r.precision, "residue": r.residue}, str(r.residue)
    if op == "digits":
        ds = digits(x)
        return {"p": p, "K": k, "digits": ds}, " ".join(map(str, ds))
    if op == "val":
        v = valuation(x)
        v = v.name if v is INFINITE_AT_PRECISION else v
        return {"p": p, "K": k, "valuation": v}, str(v)
    raise InputError(f"unknown padic operation {op!r}")


def cmd_tower(o):
    op = _need(o, "op")
    t = decode_tower(_need(o, "tower"))
    bound = _int(o.get("bound", 64), "bound")
    if op == "lim":
        r = lim(t, bound)
        return r.to_json(), f"lim = {r.lim}\nlim1: {r.lim1.status.value} ({r.lim1.reason})"
    if op == "ml":
        c = is_mittag_leffler(t, bound)
        idx = ", ".join(f"{i}->{j}" for i, j in c.indices)
        return c.to_json(), f"{c.status.value}" + (f" [{idx}]" if idx else "") + \
            "".join(f"\n{x}" for x in c.trace)
    raise InputError(f"unknown tower operation {op!r}")


def cmd_colim(o):
    r = colim_pattern(decode_colim(_need(o, "sequence")))
    return {"colim": r.to_json(), "text": str(r)}, str(r)


COMMANDS = {
    "classify": cmd_classify, "sum": cmd_sum, "hom": cmd_hom, "tensor": cmd_tensor, "tor": cmd_tor,
    "ext": cmd_ext, "six-term": cmd_six_term, "snake": cmd_snake, "split": cmd_split,
    "five-lemma": cmd_five_lemma, "baer": cmd_baer, "pullback": cmd_pullback, "pushout": cmd_pushout,
    "class-of": cmd_class_of, "extension-of": cmd_extension_of, "localize": cmd_localize,
    "complete": cmd_complete, "derived-complete": cmd_derived_complete, "padic": cmd_padic,
    "tower": cmd_tower, "colim": cmd_colim,
}


def run(job: dict) -> tuple[dict, str]:
    """Run a job document and return ``(json report, text rendering)``.

    Raises :class:`InputError` for malformed jobs and :class:`PreconditionError`
    when the mathematics refuses (non-exact input, non-unit inverse, ...).
    """
    if not isinstance(job, dict):
        raise InputError("job document must be an object")
    name = job.get("command")
    if name not in COMMANDS:
        raise InputError(f"unknown command {name!r}")
    operands = job.get("operands", {})
    if not isinstance(operands, dict):
        raise InputError("operands must be an object")
    try:
        return COMMANDS[name](operands)
    except (PreconditionError, InputError):
        raise
    except (ValueError, TypeError, KeyError, IndexError, AttributeError) as e:
        raise InputError(f"malformed operands: {e}") from None


# -- argv ------------------------------------------------------------------------


def _primes_arg(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated primes") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fgab", description="Computations with finitely generated abelian groups.")
    p.add_argument("--json", metavar="FILE", help="read a job document from FILE ('-' for stdin)")
    p.add_argument("--out", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("classify", help="canonical form of a group expression or presentation")
    s.add_argument("group", nargs="?")
    s.add_argument("--generators", type=int)
    s.add_argument("--relators", help="JSON list of relator vectors")
    s = sub.add_parser("sum", help="direct sum")
    s.add_argument("groups", nargs="+")
    for name in ("hom", "tensor", "tor", "ext"):
        s = sub.add_parser(name, help=f"{name}(A, B)")
        s.add_argument("A")
        s.add_argument("B")
    s = sub.add_parser("extension-of", help="extension realizing a class of Ext(C, A)")
    s.add_argument("C")
    s.add_argument("A")
    s.add_argument("cls", nargs="+", type=int, metavar="COORD")
    s = sub.add_parser("localize", help="localize by inverting primes")
    s.add_argument("group")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--invert", type=_primes_arg, metavar="P,Q,...")
    g.add_argument("--at", type=_primes_arg, metavar="P,Q,...", help="invert every other prime")
    g.add_argument("--all", action="store_true", help="rationalize")
    for name in ("complete", "derived-complete"):
        s = sub.add_parser(name, help="p-completion" if name == "complete" else "L0 and L1")
        s.add_argument("group")
        s.add_argument("-p", type=int, required=True)
    s = sub.add_parser("padic", help="truncated p-adic arithmetic")
    s.add_argument("op", choices=("add", "mul", "inv", "digits", "val"))
    s.add_argument("-p", type=int, required=True)
    s.add_argument("-K", type=int, required=True)
    s.add_argument("x", type=int)
    s.add_argument("y", type=int, nargs="?")
    s = sub.add_parser("colim", help="colimit of a recognized sequence")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--mult-by", type=int, metavar="N")
    g.add_argument("--prufer", type=int, metavar="P")
    s.add_argument("group", nargs="?")
    for name in ("six-term", "snake", "split", "five-lemma", "baer", "pullback", "pushout",
                 "class-of", "tower"):
        sub.add_parser(name, help="takes homomorphisms; use --json FILE")
    return p


def job_from_args(ns: argparse.Namespace) -> dict:
    c = ns.command
    if c is None:
        raise InputError("no command given")
    if c == "classify":
        if ns.group is not None:
            ops = {"group": ns.group}
        elif ns.generators is not None:
            try:
                rels = json.loads(ns.relators) if ns.relators else []
            except json.JSONDecodeError as e:
                raise InputError(f"relators are not valid JSON: {e}") from None
            ops = {"generators": ns.generators, "relators": rels}
        else:
            raise InputError("classify needs a group expression or --generators")
    elif c == "sum":
        ops = {"groups": ns.groups}
    elif c in ("hom", "tensor", "tor", "ext"):
        ops = {"A": ns.A, "B": ns.B}
    elif c == "extension-of":
        ops = {"C": ns.C, "A": ns.A, "class": ns.cls}
    elif c == "localize":
        ops = {"group": ns.group,
               "invert": "ALL" if ns.all else ({"at": ns.at} if ns.at is not None else ns.invert)}
    elif c in ("complete", "derived-complete"):
        ops = {"group": ns.group, "p": ns.p}
    elif c == "padic":
        ops = {"op": ns.op, "p": ns.p, "K": ns.K, "x": ns.x}
        if ns.op in ("add", "mul"):
            if ns.y is None:
                raise InputError(f"padic {ns.op} needs two operands")
            ops["y"] = ns.y
    elif c == "colim":
        if ns.prufer is not None:
            ops = {"sequence": {"tail": {"kind": "PRUFER", "p": ns.prufer}}}
        else:
            if ns.group is None:
                raise InputError("colim --mult-by needs a group")
            ops = {"sequence": {"group": ns.group, "tail": {"kind": "MULT_BY_N", "n": ns.mult_by}}}
    else:
        raise InputError(f"{c} takes homomorphisms; pass a job document with --json FILE")
    return {"command": c, "operands": ops, "options": {}}


def dump(report: Any) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":"))


def main(argv: list[str] | None = None) -> int:
    out = "text"
    try:
        ns = build_parser().parse_args(argv)
        out = ns.out
        if ns.json:
            try:
                if ns.json == "-":
                    job = json.load(sys.stdin)
                else:
                    with open(ns.json) as fh:
                        job = json.load(fh)
            except (OSError, json.JSONDecodeError) as e:
                raise InputError(f"cannot read job document: {e}") from None
            if isinstance(job, dict):
                out = job.get("options", {}).get("out", out) if isinstance(job.get("options"), dict) else out
        else:
            job = job_from_args(ns)
        report, text = run(job)
    except InputError as e:
        return _fail(out, 1, "input", str(e))
    except PreconditionError as e:
        return _fail(out, 2, "precondition", str(e))
    print(dump(report) if out == "json" else text)
    return 0


def _fail(out: str, code: int, kind: str, message: str) -> int:
    if out == "json":
        print(dump({"error": {"kind": kind, "message": message}}))
    print(f"error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

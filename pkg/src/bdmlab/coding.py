"""Goedel numbering, numeral and substitution machinery, syntactic predicates,
and the executable interpretations of the object-language function symbols.

Codes are arbitrary-precision naturals built from a self-delimiting bitstring
pairing (Elias-gamma components), so nested codes grow quasi-linearly. Every
AST node is pair(tag, payload); sequents are untagged pairs of tagged formula
lists in ascending code order. Elementary operations return the junk code 0 on
ill-formed input so the object-level symbols are total.

The list of elementary operations is fixed here (ELEMENTARY_OPS) and is the
configurable answer to which "suitable elementary operations" the signature
carries.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple, Union

from . import ordinals, syntax
from .ordinals import Ord
from .syntax import (
    All, And, App, ARITIES, Eq, Ex, Formula, Not, Or, Sequent, Signature,
    Term, Tr, Var, Zero, numeral, numeral_value, sequent, substitute,
    term_vars,
)

DESIGNATED_VAR = "v"


class EvalError(ValueError):
    """Raised when term evaluation exceeds the resource budget."""


# ----------------------------------------------------------------- pairing


def _gamma(a: int) -> str:
    s = bin(a + 1)[2:]
    return "0" * (len(s) - 1) + s


def _bits(a: int) -> str:
    return bin(a)[2:] if a else ""


def pair(a: int, b: int) -> int:
    """Length-prefixed pairing: 1 . gamma(|a|) . bits(a) . bits(b). Both
    components contribute linearly, so nested codes stay quasi-linear."""
    ab = _bits(a)
    return int("1" + _gamma(len(ab)) + ab + _bits(b), 2)


def _read_gamma(bits: str, i: int) -> Optional[Tuple[int, int]]:
    z = 0
    n = len(bits)
    while i + z < n and bits[i + z] == "0":
        z += 1
    if i + 2 * z >= n:
        return None
    body = bits[i + z:i + 2 * z + 1]
    return int(body, 2) - 1, i + 2 * z + 1


def unpair(n: int) -> Optional[Tuple[int, int]]:
    if n < 2:
        return None
    bits = bin(n)[2:]
    got = _read_gamma(bits, 1)
    if got is None:
        return None
    la, i = got
    if i + la > len(bits):
        return None
    abits = bits[i:i + la]
    if la and abits[0] != "1":
        return None
    a = int(abits, 2) if la else 0
    rest = bits[i + la:]
    if rest and rest[0] != "1":
        return None
    b = int(rest, 2) if rest else 0
    return a, b


# ---------------------------------------------------------------- tags

TAG_VAR, TAG_ZERO, TAG_APP, TAG_EQ, TAG_TR, TAG_NOT = 0, 1, 2, 3, 4, 5
TAG_AND, TAG_OR, TAG_ALL, TAG_EX, TAG_LIST, TAG_ORD = 6, 7, 8, 9, 10, 11
TAG_NUM = 12  # canonical numerals carry their value directly

_FN_NAMES: List[str] = sorted(ARITIES)
_FN_INDEX = {name: i for i, name in enumerate(_FN_NAMES)}


def _str_code(s: str) -> int:
    return int.from_bytes(b"\x01" + s.encode(), "big")


def _str_decode(n: int) -> Optional[str]:
    try:
        raw = n.to_bytes((n.bit_length() + 7) // 8, "big")
    except (OverflowError, ValueError):
        return None
    if not raw or raw[0] != 1:
        return None
    try:
        return raw[1:].decode()
    except UnicodeDecodeError:
        return None


def code_list(codes) -> int:
    out = 0
    for c in reversed(list(codes)):
        out = pair(c, out)
    return pair(TAG_LIST, out)


def decode_list(n: int) -> Optional[List[int]]:
    top = unpair(n)
    if top is None or top[0] != TAG_LIST:
        return None
    out = []
    rest = top[1]
    while rest != 0:
        p = unpair(rest)
        if p is None:
            return None
        out.append(p[0])
        rest = p[1]
    return out


# ------------------------------------------------------------ encode/decode


def encode(x) -> int:
    if isinstance(x, Var):
        return pair(TAG_VAR, _str_code(x.name))
    if isinstance(x, Zero):
        return pair(TAG_ZERO, 0)
    if isinstance(x, App):
        n = numeral_value(x)
        if n is not None:
            return num(n)
        return pair(TAG_APP, pair(_FN_INDEX[x.fn], code_list(encode(a) for a in x.args)))
    if isinstance(x, Eq):
        return pair(TAG_EQ, pair(encode(x.left), encode(x.right)))
    if isinstance(x, Tr):
        return pair(TAG_TR, encode(x.arg))
    if isinstance(x, Not):
        return pair(TAG_NOT, encode(x.body))
    if isinstance(x, And):
        return pair(TAG_AND, pair(encode(x.left), encode(x.right)))
    if isinstance(x, Or):
        return pair(TAG_OR, pair(encode(x.left), encode(x.right)))
    if isinstance(x, All):
        return pair(TAG_ALL, pair(_str_code(x.var), encode(x.body)))
    if isinstance(x, Ex):
        return pair(TAG_EX, pair(_str_code(x.var), encode(x.body)))
    if isinstance(x, Sequent):
        return pair(code_list(sorted(encode(f) for f in x.ante)),
                    code_list(sorted(encode(f) for f in x.succ)))
    raise TypeError(f"cannot encode {x!r}")


class DecodeError(ValueError):
    pass


def decode_term(n: int) -> Optional[Term]:
    p = unpair(n)
    if p is None:
        return None
    tag, payload = p
    if tag == TAG_NUM:
        return numeral(payload) if payload >= 1 else None
    if tag == TAG_VAR:
        name = _str_decode(payload)
        if name is None or not name or not name[0].isalpha() or name in ARITIES:
            return None
        if not all(c.isalnum() or c == "_" for c in name):
            return None
        if name in ("all", "ex", "T"):
            return None
        return Var(name)
    if tag == TAG_ZERO:
        return Zero() if payload == 0 else None
    if tag == TAG_APP:
        q = unpair(payload)
        if q is None or q[0] >= len(_FN_NAMES):
            return None
        fn = _FN_NAMES[q[0]]
        arg_codes = decode_list(q[1])
        if arg_codes is None or len(arg_codes) != ARITIES[fn]:
            return None
        args = []
        for c in arg_codes:
            t = decode_term(c)
            if t is None:
                return None
            args.append(t)
        out = App(fn, tuple(args))
        if numeral_value(out) is not None:
            return None  # canonical numerals are only coded via TAG_NUM
        return out
    return None


def decode_formula(n: int) -> Optional[Formula]:
    p = unpair(n)
    if p is None:
        return None
    tag, payload = p
    if tag == TAG_EQ:
        q = unpair(payload)
        if q is None:
            return None
        l, r = decode_term(q[0]), decode_term(q[1])
        return Eq(l, r) if l is not None and r is not None else None
    if tag == TAG_TR:
        t = decode_term(payload)
        return Tr(t) if t is not None else None
    if tag == TAG_NOT:
        b = decode_formula(payload)
        return Not(b) if b is not None else None
    if tag in (TAG_AND, TAG_OR):
        q = unpair(payload)
        if q is None:
            return None
        l, r = decode_formula(q[0]), decode_formula(q[1])
        if l is None or r is None:
            return None
        return And(l, r) if tag == TAG_AND else Or(l, r)
    if tag in (TAG_ALL, TAG_EX):
        q = unpair(payload)
        if q is None:
            return None
        name = _str_decode(q[0])
        if name is None:
            return None
        v = decode_term(pair(TAG_VAR, q[0]))
        if not isinstance(v, Var):
            return None
        body = decode_formula(q[1])
        if body is None:
            return None
        return (All if tag == TAG_ALL else Ex)(name, body)
    return None


def decode_sequent(n: int) -> Optional[Sequent]:
    p = unpair(n)
    if p is None:
        return None
    ante_codes = decode_list(p[0])
    succ_codes = decode_list(p[1])
    if ante_codes is None or succ_codes is None:
        return None
    ante, succ = [], []
    for c in ante_codes:
        f = decode_formula(c)
        if f is None:
            return None
        ante.append(f)
    for c in succ_codes:
        f = decode_formula(c)
        if f is None:
            return None
        succ.append(f)
    return sequent(ante, succ)


def decode(n: int):
    """Decode a code of any syntactic category, raising on malformed codes."""
    for dec in (decode_term, decode_formula, decode_sequent):
        out = dec(n)
        if out is not None:
            return out
    raise DecodeError(f"malformed code {n}")


# -------------------------------------------------------- ordinal embedding


def embed(o: Ord) -> int:
    return pair(TAG_ORD, code_list(pair(embed(a), embed(b)) for a, b in o.terms))


def decode_ord(n: int) -> Optional[Ord]:
    p = unpair(n)
    if p is None or p[0] != TAG_ORD:
        return None
    items = decode_list(p[1])
    if items is None:
        return None
    terms = []
    for c in items:
        q = unpair(c)
        if q is None:
            return None
        a, b = decode_ord(q[0]), decode_ord(q[1])
        if a is None or b is None:
            return None
        terms.append((a, b))
    o = Ord(tuple(terms))
    return o if ordinals.is_normal(o) else None


def _ord_or_zero(n: int) -> Ord:
    o = decode_ord(n)
    return o if o is not None else ordinals.ZERO


# ------------------------------------------------- elementary operations


def num(n: int) -> int:
    if n <= 0:
        return pair(TAG_ZERO, 0)
    return pair(TAG_NUM, n)


def sub(f: int, v: int, t: int) -> int:
    """Formal substitution on codes; junk 0 when any argument is ill-formed."""
    var = decode_term(v)
    if not isinstance(var, Var):
        return 0
    term = decode_term(t)
    if term is None:
        return 0
    target = decode_term(f)
    if target is not None:
        return encode(syntax.term_subst(target, {var.name: term}))
    form = decode_formula(f)
    if form is not None:
        return encode(substitute(form, var.name, term))
    return 0


def tr(n: int) -> int:
    """Code of T applied to the n-th numeral."""
    if n < 0:
        return 0
    return pair(TAG_TR, num(n))


def cl_term(c: int) -> bool:
    t = decode_term(c)
    return t is not None and not term_vars(t)


def sent_lt(c: int) -> bool:
    f = decode_formula(c)
    return f is not None and syntax.is_closed(f)


def val(c: int) -> int:
    """Standard value of a coded closed term."""
    t = decode_term(c)
    if t is None or term_vars(t):
        raise ValueError(f"val: {c} does not code a closed term")
    return eval_term(t, {})


def _val_or_junk(c: int) -> int:
    try:
        return val(c)
    except (ValueError, EvalError):
        return 0


# --------------------------------------------------------------- templates


def template(a: Formula, variables: List[str]) -> Term:
    """Open term denoting, under a valuation of `variables`, the code of the
    corresponding numeral instance of `a`. Empty variable list gives the plain
    closed numeral for a's code."""
    fv = syntax.free_vars(a)
    for v in variables:
        if v not in fv:
            raise ValueError(f"variable {v} not free in the formula")
    out: Term = numeral(encode(a))
    for v in sorted(variables):
        out = App("sub", (out, numeral(encode(Var(v))), App("num", (Var(v),))))
    return out


def sequent_template(s: Sequent, variables: List[str]) -> Term:
    fv = syntax.sequent_vars(s)
    for v in variables:
        if v not in fv:
            raise ValueError(f"variable {v} not free in the sequent")
    out: Term = numeral(encode(s))
    for v in sorted(variables):
        out = App("sub", (out, numeral(encode(Var(v))), App("num", (Var(v),))))
    return out


# ----------------------------------------------------------- nesting ranks


def truth_depth(f: Formula, _seen: Optional[frozenset] = None) -> int:
    """T-nesting depth, following canonical-numeral arguments into the coded
    sentence. Non-numeral arguments (computed terms) contribute one level."""
    seen = _seen or frozenset()
    if isinstance(f, Eq):
        return 0
    if isinstance(f, Tr):
        n = numeral_value(f.arg)
        if n is not None and n not in seen:
            inner = decode_formula(n)
            if inner is not None:
                return 1 + truth_depth(inner, seen | {n})
        return 1
    if isinstance(f, Not):
        return truth_depth(f.body, seen)
    if isinstance(f, (And, Or)):
        return max(truth_depth(f.left, seen), truth_depth(f.right, seen))
    return truth_depth(f.body, seen)


_OMEGA_SQ = ordinals.omega_pow(ordinals.fin(2))


def sent_rank(c: int, alpha: Union[int, Ord]) -> bool:
    """Membership in the alpha-th sublanguage: finite alpha bounds the
    T-nesting depth; limit codes below w*w use the omega convention (depth
    finite, hence sentence-hood suffices)."""
    if isinstance(alpha, int):
        bound: Optional[int] = alpha
    else:
        n = ordinals.nat_of(alpha)
        if n is not None:
            bound = n
        elif ordinals.compare(alpha, _OMEGA_SQ) == ordinals.LESS:
            bound = None
        else:
            raise ValueError("sent_rank supports levels below w*w only")
    if not sent_lt(c):
        return False
    if bound is None:
        return True
    f = decode_formula(c)
    return truth_depth(f) < bound


# ------------------------------------------------- truth-hierarchy builders


def tr_alpha(alpha: Ord, t: Term) -> Formula:
    """Rank-restricted truth predicate as an object formula."""
    return And(Tr(t), Eq(App("sentrk", (numeral(embed(alpha)), t)), syntax.ONE_T))


def _impl(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def tr_alpha_seq(alpha: Ord, t: Term) -> Formula:
    """Rank-restricted satisfaction of a coded sequent (both closure clauses),
    over the bigand/bigor/cneg object symbols."""
    gamma = App("bigand", (App("fst", (t,)),))
    delta = App("bigor", (App("snd", (t,)),))
    return And(
        _impl(tr_alpha(alpha, gamma), tr_alpha(alpha, delta)),
        _impl(tr_alpha(alpha, App("cneg", (delta,))),
              tr_alpha(alpha, App("cneg", (gamma,)))),
    )


# ------------------------------------------------------------- evaluation

_EXP_BITS_CAP = 1 << 16
_guard = threading.local()


def _exp(a: int, b: int) -> int:
    if a > 1 and b * a.bit_length() > _EXP_BITS_CAP:
        raise EvalError("exponentiation out of evaluation budget")
    return a ** b


def _charfn(p: Callable[[int], bool]) -> Callable[[int], int]:
    return lambda n: 1 if p(n) else 0


def _formula_code_op(ctor) -> Callable[[int, int], int]:
    def op(a: int, b: int) -> int:
        fa, fb = decode_formula(a), decode_formula(b)
        if fa is None or fb is None:
            return 0
        return encode(ctor(fa, fb))
    return op


def _ceq(a: int, b: int) -> int:
    ta, tb = decode_term(a), decode_term(b)
    if ta is None or tb is None:
        return 0
    return encode(Eq(ta, tb))


def _cneg(a: int) -> int:
    f = decode_formula(a)
    return encode(Not(f)) if f is not None else 0


def _quant_code_op(ctor) -> Callable[[int, int], int]:
    def op(vc: int, fc: int) -> int:
        v = decode_term(vc)
        f = decode_formula(fc)
        if not isinstance(v, Var) or f is None:
            return 0
        return encode(ctor(v.name, f))
    return op


def _big(fold, empty: Formula) -> Callable[[int], int]:
    def op(c: int) -> int:
        items = decode_list(c)
        if items is None:
            return 0
        forms = []
        for x in items:
            f = decode_formula(x)
            if f is None:
                return 0
            forms.append(f)
        if not forms:
            return encode(empty)
        out = forms[0]
        for f in forms[1:]:
            out = fold(out, f)
        return encode(out)
    return op


def _selfsub(n: int) -> int:
    return sub(n, encode(Var(DESIGNATED_VAR)), num(n))


def _sentrk(a: int, c: int) -> int:
    o = decode_ord(a)
    if o is None:
        return 0
    try:
        return 1 if sent_rank(c, o) else 0
    except ValueError:
        return 0


def _prec(a: int, b: int) -> int:
    oa, ob = decode_ord(a), decode_ord(b)
    if oa is None or ob is None:
        return 0
    return 1 if ordinals.compare(oa, ob) == ordinals.LESS else 0


def _oplus(a: int, b: int) -> int:
    # Left passthrough on junk keeps the open rewrite axioms true everywhere.
    oa = decode_ord(a)
    if oa is None:
        return a
    ob = decode_ord(b)
    if ob is None:
        return a
    return embed(ordinals.add(oa, ob))


def _omul(a: int, k: int) -> int:
    return embed(ordinals.mul_nat(_ord_or_zero(a), k))


def _omulom(a: int) -> int:
    return embed(ordinals.mul_omega(_ord_or_zero(a)))


def _opw2(a: int) -> int:
    return embed(ordinals.omega_pow(_ord_or_zero(a)))


def _ofin(k: int) -> int:
    return embed(ordinals.fin(k))


def _jel(z: int, y: int, g: int) -> int:
    oz, oy = decode_ord(z), decode_ord(y)
    if oz is None or oy is None:
        return 0
    return ordinals.least_mul_bound(oz, oy, _ord_or_zero(g))


def _dgn(z: int, y: int, n: int) -> int:
    oz, oy = decode_ord(z), decode_ord(y)
    if oz is None or oy is None:
        return 0
    return ordinals.limit_exp_witness(oz, oy, n)


# Axiom characteristic functions are registered by the theories module.
_AX_RECOGNIZERS: Dict[str, Callable[[int], bool]] = {}


def register_ax_recognizer(symbol: str, fn: Callable[[int], bool]) -> None:
    _AX_RECOGNIZERS[symbol] = fn


def _ax_charfn(symbol: str) -> Callable[[int], int]:
    def op(n: int) -> int:
        depth = getattr(_guard, "depth", 0)
        if depth > 8:
            return 0
        fn = _AX_RECOGNIZERS.get(symbol)
        if fn is None:
            return 0
        _guard.depth = depth + 1
        try:
            return 1 if fn(n) else 0
        finally:
            _guard.depth = depth
    return op


@dataclass(frozen=True)
class OpEntry:
    symbol: str
    arity: int
    fn: Callable[..., int]


ELEMENTARY_OPS: Dict[str, OpEntry] = {
    name: OpEntry(name, ARITIES[name], fn)
    for name, fn in {
        "num": num,
        "sub": sub,
        "tr": tr,
        "pair": pair,
        "fst": lambda n: (unpair(n) or (0, 0))[0],
        "snd": lambda n: (unpair(n) or (0, 0))[1],
        "ceq": _ceq,
        "cand": _formula_code_op(And),
        "cor": _formula_code_op(Or),
        "cneg": _cneg,
        "call": _quant_code_op(All),
        "cex": _quant_code_op(Ex),
        "ct": _charfn(cl_term),
        "val": _val_or_junk,
        "sentlt": _charfn(sent_lt),
        "sentrk": _sentrk,
        "bigand": _big(And, Eq(Zero(), Zero())),
        "bigor": _big(Or, Not(Eq(Zero(), Zero()))),
        "selfsub": _selfsub,
        "otc": _charfn(lambda n: decode_ord(n) is not None),
        "prec": _prec,
        "oplus": _oplus,
        "omul": _omul,
        "omulom": _omulom,
        "opw2": _opw2,
        "ofin": _ofin,
        "jel": _jel,
        "dgn": _dgn,
        "axbasic": _ax_charfn("axbasic"),
        "axts0": _ax_charfn("axts0"),
        "axuts0": _ax_charfn("axuts0"),
        "axpkf": _ax_charfn("axpkf"),
        "axpat": _ax_charfn("axpat"),
    }.items()
}

_ARITH_INTERPS: Dict[str, Callable[..., int]] = {
    "S": lambda n: n + 1,
    "add": lambda a, b: a + b,
    "mul": lambda a, b: a * b,
    "exp": _exp,
    "d0": lambda n: 2 * n,
    "d1": lambda n: 2 * n + 1,
}

SIGNATURE = Signature(
    arities=dict(ARITIES),
    interps={**_ARITH_INTERPS, **{k: v.fn for k, v in ELEMENTARY_OPS.items()}},
)


def eval_term(t: Term, env: Dict[str, int]) -> int:
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Var):
        if t.name not in env:
            raise ValueError(f"unbound variable {t.name}")
        return env[t.name]
    n = numeral_value(t)
    if n is not None:
        return n
    args = [eval_term(a, env) for a in t.args]
    return SIGNATURE.interps[t.fn](*args)


# ------------------------------------------------ quote-aware parse/print


def corner(x) -> Term:
    """The closed numeral naming x's code."""
    return numeral(encode(x))


def _quote_parser(text: str, pos: int) -> int:
    inner = parse(text, "sequent" if "=>" in text else "formula")
    return encode(inner)


def _quote_printer(n: int) -> Optional[str]:
    f = decode_formula(n)
    if f is not None:
        return pprint(f)
    s = decode_sequent(n)
    if s is not None:
        return pprint(s)
    return None


def parse(text: str, kind: str = "formula"):
    return syntax.parse(text, kind, quote_parser=_quote_parser)


def pprint(x) -> str:
    return syntax.pprint(x, quote=_quote_printer)

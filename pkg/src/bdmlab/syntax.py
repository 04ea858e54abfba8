"""ASTs, parser, and printer for the truth language and its sequents.

Terms are variables, 0, or applications of signature function symbols.
Formulas are equations, truth atoms T(t), and the De Morgan connectives and
quantifiers; there is no primitive conditional (A -> B parses as ~A | B).
Sequents hold canonically sorted, duplicate-free formula tuples so that
structural equality is set equality.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))


# ------------------------------------------------------------------ terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class App:
    fn: str
    args: Tuple["Term", ...]


Term = Union[Var, Zero, App]


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Tr:
    arg: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class All:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Ex:
    var: str
    body: "Formula"


Formula = Union[Eq, Tr, Not, And, Or, All, Ex]

_FORMULA_TYPES = (Eq, Tr, Not, And, Or, All, Ex)
_TERM_TYPES = (Var, Zero, App)


def _key(x) -> tuple:
    if isinstance(x, Var):
        return (0, x.name)
    if isinstance(x, Zero):
        return (1,)
    if isinstance(x, App):
        n = numeral_value(x)
        if n is not None:
            return (1, n)
        return (2, x.fn) + tuple(_key(a) for a in x.args)
    if isinstance(x, Eq):
        return (10, _key(x.left), _key(x.right))
    if isinstance(x, Tr):
        return (11, _key(x.arg))
    if isinstance(x, Not):
        return (12, _key(x.body))
    if isinstance(x, And):
        return (13, _key(x.left), _key(x.right))
    if isinstance(x, Or):
        return (14, _key(x.left), _key(x.right))
    if isinstance(x, All):
        return (15, x.var, _key(x.body))
    if isinstance(x, Ex):
        return (16, x.var, _key(x.body))
    raise TypeError(f"not a term or formula: {x!r}")


# ---------------------------------------------------------------- sequents


@dataclass(frozen=True)
class Sequent:
    ante: Tuple[Formula, ...]
    succ: Tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "ante", _canon(self.ante))
        object.__setattr__(self, "succ", _canon(self.succ))

    @property
    def ante_set(self) -> frozenset:
        return frozenset(self.ante)

    @property
    def succ_set(self) -> frozenset:
        return frozenset(self.succ)


def _canon(fs: Iterable[Formula]) -> Tuple[Formula, ...]:
    return tuple(sorted(set(fs), key=_key))


def sequent(ante: Iterable[Formula], succ: Iterable[Formula]) -> Sequent:
    return Sequent(tuple(ante), tuple(succ))


# ---------------------------------------------------------------- signature

# Function symbol arities. Interpretations are attached in `coding`; the
# elementary-operation list is configurable there.
ARITIES: Dict[str, int] = {
    "S": 1, "add": 2, "mul": 2, "exp": 2, "d0": 1, "d1": 1,
    "num": 1, "sub": 3, "tr": 1, "pair": 2, "fst": 1, "snd": 1,
    "ceq": 2, "cand": 2, "cor": 2, "cneg": 1, "call": 2, "cex": 2,
    "ct": 1, "val": 1, "sentlt": 1, "sentrk": 2, "bigand": 1, "bigor": 1,
    "selfsub": 1,
    "otc": 1, "prec": 2, "oplus": 2, "omul": 2, "omulom": 1,
    "opw2": 1, "ofin": 1, "jel": 3, "dgn": 3,
    "axbasic": 1, "axts0": 1, "axuts0": 1, "axpkf": 1, "axpat": 1,
}


@dataclass(frozen=True)
class Signature:
    """Arity table plus one total executable interpretation per symbol."""

    arities: Mapping[str, int]
    interps: Mapping[str, Callable[..., int]]

    def __post_init__(self):
        for name, ar in self.arities.items():
            if name not in self.interps:
                raise ValueError(f"symbol {name} lacks an interpretation")
        for req in ("S", "add", "mul"):
            if req not in self.arities:
                raise ValueError(f"distinguished symbol {req} missing")


# ----------------------------------------------------------- free variables


_EMPTY: frozenset = frozenset()


@lru_cache(maxsize=65536)
def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Zero):
        return _EMPTY
    if numeral_value(t) is not None:
        return _EMPTY
    out = frozenset()
    for a in t.args:
        out |= term_vars(a)
    return out


@lru_cache(maxsize=65536)
def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Tr):
        return term_vars(f.arg)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def sequent_vars(s: Sequent) -> frozenset:
    out = frozenset()
    for f in s.ante + s.succ:
        out |= free_vars(f)
    return out


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


def fresh_var(avoid: Iterable[str], base: str = "w") -> str:
    taken = set(avoid)
    if base not in taken and base not in ARITIES:
        return base
    i = 1
    while f"{base}{i}" in taken or f"{base}{i}" in ARITIES:
        i += 1
    return f"{base}{i}"


# ------------------------------------------------------------- substitution


def term_subst(t: Term, m: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return m.get(t.name, t)
    if isinstance(t, Zero):
        return t
    if not term_vars(t):
        return t
    return App(t.fn, tuple(term_subst(a, m) for a in t.args))


def subst(f: Formula, m: Mapping[str, Term]) -> Formula:
    """Simultaneous capture-avoiding substitution of terms for free variables."""
    m = {v: t for v, t in m.items() if t != Var(v)}
    if not m:
        return f
    return _subst(f, m)


def _subst(f: Formula, m: Mapping[str, Term]) -> Formula:
    if isinstance(f, Eq):
        return Eq(term_subst(f.left, m), term_subst(f.right, m))
    if isinstance(f, Tr):
        return Tr(term_subst(f.arg, m))
    if isinstance(f, Not):
        return Not(_subst(f.body, m))
    if isinstance(f, And):
        return And(_subst(f.left, m), _subst(f.right, m))
    if isinstance(f, Or):
        return Or(_subst(f.left, m), _subst(f.right, m))
    ctor = All if isinstance(f, All) else Ex
    inner = {v: t for v, t in m.items() if v != f.var}
    if not inner:
        return f
    relevant = free_vars(f.body) - {f.var}
    inner = {v: t for v, t in inner.items() if v in relevant}
    if not inner:
        return f
    range_vars = set()
    for t in inner.values():
        range_vars |= term_vars(t)
    if f.var in range_vars:
        newv = fresh_var(range_vars | free_vars(f.body) | set(inner), f.var)
        body = _subst(f.body, {f.var: Var(newv)})
        return ctor(newv, _subst(body, inner))
    return ctor(f.var, _subst(f.body, inner))


def substitute(f: Formula, v: str, t: Term) -> Formula:
    return subst(f, {v: t})


def subst_sequent(s: Sequent, m: Mapping[str, Term]) -> Sequent:
    return sequent((subst(f, m) for f in s.ante), (subst(f, m) for f in s.succ))


# ------------------------------------------------------------ numerals

ONE_T = App("d1", (Zero(),))


def numeral(n: int) -> Term:
    """Canonical binary numeral: 0, else d1/d0 chains with no leading d0."""
    if n < 0:
        raise ValueError("numerals are for naturals")
    if n == 0:
        return Zero()
    out: Term = Zero()
    for bit in bin(n)[2:]:  # most significant digit innermost
        out = App("d1" if bit == "1" else "d0", (out,))
    return out


def numeral_value(t: Term) -> Optional[int]:
    """Value of a canonical numeral term, None for anything else."""
    if isinstance(t, Zero):
        return 0
    bits = []
    while isinstance(t, App) and t.fn in ("d0", "d1") and len(t.args) == 1:
        bits.append(1 if t.fn == "d1" else 0)
        t = t.args[0]
    if not isinstance(t, Zero) or not bits or bits[-1] != 1:
        return None  # must bottom out at 0 with no leading d0
    v = 0
    for b in reversed(bits):
        v = (v << 1) | b
    return v


# ---------------------------------------------------------- classification


ARITHMETICAL = "arithmetical"
DELTA0 = "delta0"
TRUTH = "truth-containing"


def _has_truth(f: Formula) -> bool:
    if isinstance(f, Tr):
        return True
    if isinstance(f, Eq):
        return False
    if isinstance(f, Not):
        return _has_truth(f.body)
    if isinstance(f, (And, Or)):
        return _has_truth(f.left) or _has_truth(f.right)
    return _has_truth(f.body)


def leq_formula(x: str, t: Term) -> Formula:
    """x <= t as the defined formula ex z. z + x = t."""
    z = fresh_var(term_vars(t) | {x}, "z")
    return Ex(z, Eq(App("add", (Var(z), Var(x))), t))


def _leq_guard(g: Formula, x: str) -> Optional[Term]:
    """Match g against ex z. z + x = t with x not in t; return t."""
    if not isinstance(g, Ex):
        return None
    body = g.body
    if not isinstance(body, Eq):
        return None
    lhs = body.left
    if not (isinstance(lhs, App) and lhs.fn == "add" and len(lhs.args) == 2):
        return None
    if lhs.args[0] != Var(g.var) or lhs.args[1] != Var(x):
        return None
    t = body.right
    if g.var == x or x in term_vars(t) or g.var in term_vars(t):
        return None
    return t


def _is_delta0(f: Formula) -> bool:
    if isinstance(f, (Eq, Tr)):
        return True
    if isinstance(f, Not):
        return _is_delta0(f.body)
    if isinstance(f, (And, Or)):
        return _is_delta0(f.left) and _is_delta0(f.right)
    if isinstance(f, All):
        # all x. ~(x <= t) | B
        if isinstance(f.body, Or) and isinstance(f.body.left, Not):
            if _leq_guard(f.body.left.body, f.var) is not None:
                return _is_delta0(f.body.right)
        return False
    # ex x. (x <= t) & B
    if isinstance(f.body, And):
        if _leq_guard(f.body.left, f.var) is not None:
            return _is_delta0(f.body.right)
    return False


def classify(f: Formula) -> frozenset:
    out = set()
    if _has_truth(f):
        out.add(TRUTH)
    else:
        out.add(ARITHMETICAL)
        if _is_delta0(f):
            out.add(DELTA0)
    return frozenset(out)


# ------------------------------------------------------------------ printer


def _term_str(t: Term, quote: Optional[Callable[[int], Optional[str]]]) -> str:
    n = numeral_value(t)
    if n is not None:
        if n > 1 and quote is not None:
            q = quote(n)
            if q is not None and "'" not in q:
                return f"'{q}'"
        return str(n)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if t.fn == "add":
        return f"({_term_str(t.args[0], quote)} + {_term_str(t.args[1], quote)})"
    if t.fn == "mul":
        return f"({_term_str(t.args[0], quote)} * {_term_str(t.args[1], quote)})"
    inner = ", ".join(_term_str(a, quote) for a in t.args)
    return f"{t.fn}({inner})"


def _formula_str(f: Formula, quote) -> str:
    if isinstance(f, Eq):
        return f"{_term_str(f.left, quote)} = {_term_str(f.right, quote)}"
    if isinstance(f, Tr):
        return f"T({_term_str(f.arg, quote)})"
    if isinstance(f, Not):
        return f"~{_paren(f.body, quote)}"
    if isinstance(f, And):
        return f"{_paren(f.left, quote)} & {_paren(f.right, quote)}"
    if isinstance(f, Or):
        return f"{_paren(f.left, quote)} | {_paren(f.right, quote)}"
    q = "all" if isinstance(f, All) else "ex"
    return f"{q} {f.var}. {_formula_str(f.body, quote)}"


def _paren(f: Formula, quote) -> str:
    if isinstance(f, (Eq, Tr, Not)):
        return _formula_str(f, quote)
    return f"({_formula_str(f, quote)})"


def pprint(x, quote: Optional[Callable[[int], Optional[str]]] = None) -> str:
    """Print a term, formula, or sequent. `quote` maps a numeral value to the
    printed form of the expression it codes (or None); installed by coding."""
    if isinstance(x, _TERM_TYPES):
        return _term_str(x, quote)
    if isinstance(x, _FORMULA_TYPES):
        return _formula_str(x, quote)
    if isinstance(x, Sequent):
        left = ", ".join(_formula_str(f, quote) for f in x.ante)
        right = ", ".join(_formula_str(f, quote) for f in x.succ)
        return f"{left} => {right}".strip()
    raise TypeError(f"cannot print {x!r}")


# ------------------------------------------------------------------- parser


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at {pos})")
        self.pos = pos


_KEYWORDS = {"all", "ex", "T"}


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.toks = []
        self._run()
        self.i = 0

    def _run(self):
        t, n = self.text, len(self.text)
        i = 0
        while i < n:
            c = t[i]
            if c.isspace():
                i += 1
                continue
            if c == "'":
                j = t.find("'", i + 1)
                if j < 0:
                    raise ParseError("unterminated quote", i)
                self.toks.append(("quote", t[i + 1:j], i))
                i = j + 1
                continue
            if c.isdigit():
                j = i
                while j < n and t[j].isdigit():
                    j += 1
                self.toks.append(("num", t[i:j], i))
                i = j
                continue
            if c.isalpha() or c == "_":
                j = i
                while j < n and (t[j].isalnum() or t[j] == "_"):
                    j += 1
                self.toks.append(("name", t[i:j], i))
                i = j
                continue
            if t.startswith("=>", i):
                self.toks.append(("arrow", "=>", i))
                i += 2
                continue
            if t.startswith("->", i):
                self.toks.append(("imp", "->", i))
                i += 2
                continue
            if t.startswith("<=", i):
                self.toks.append(("leq", "<=", i))
                i += 2
                continue
            if c in "()=~&|,.+*":
                self.toks.append((c, c, i))
                i += 1
                continue
            raise ParseError(f"unexpected character {c!r}", i)
        self.toks.append(("eof", "", n))

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, got {tok[1]!r}", tok[2])
        return tok


class _Parser:
    def __init__(self, text: str, quote_parser=None):
        self.lx = _Lexer(text)
        self.quote_parser = quote_parser

    # terms

    def term(self) -> Term:
        left = self.term_factor()
        while self.lx.peek()[0] == "+":
            self.lx.next()
            right = self.term_factor()
            left = App("add", (left, right))
        return left

    def term_factor(self) -> Term:
        left = self.term_atom()
        while self.lx.peek()[0] == "*":
            self.lx.next()
            right = self.term_atom()
            left = App("mul", (left, right))
        return left

    def term_atom(self) -> Term:
        kind, text, pos = self.lx.peek()
        if kind == "num":
            self.lx.next()
            return numeral(int(text))
        if kind == "quote":
            self.lx.next()
            if self.quote_parser is None:
                raise ParseError("quoted expressions are not enabled here", pos)
            return numeral(self.quote_parser(text, pos))
        if kind == "(":
            self.lx.next()
            t = self.term()
            self.lx.expect(")")
            return t
        if kind == "name":
            self.lx.next()
            if self.lx.peek()[0] == "(":
                if text not in ARITIES:
                    raise ParseError(f"unknown symbol {text!r}", pos)
                self.lx.next()
                args = [self.term()]
                while self.lx.peek()[0] == ",":
                    self.lx.next()
                    args.append(self.term())
                self.lx.expect(")")
                if len(args) != ARITIES[text]:
                    raise ParseError(
                        f"{text} expects {ARITIES[text]} arguments, got {len(args)}", pos)
                return App(text, tuple(args))
            if text in _KEYWORDS or text in ARITIES:
                raise ParseError(f"{text!r} cannot be a variable", pos)
            return Var(text)
        raise ParseError(f"expected a term, got {text!r}", pos)

    # formulas

    def formula(self) -> Formula:
        kind, text, pos = self.lx.peek()
        if kind == "name" and text in ("all", "ex"):
            self.lx.next()
            vtok = self.lx.expect("name")
            if vtok[1] in _KEYWORDS or vtok[1] in ARITIES:
                raise ParseError(f"{vtok[1]!r} cannot be a variable", vtok[2])
            self.lx.expect(".")
            body = self.formula()
            return (All if text == "all" else Ex)(vtok[1], body)
        return self.disj()

    def disj(self) -> Formula:
        left = self.conj()
        while self.lx.peek()[0] in ("|", "imp"):
            kind = self.lx.next()[0]
            right = self.conj()
            left = Or(Not(left), right) if kind == "imp" else Or(left, right)
        return left

    def conj(self) -> Formula:
        left = self.unit()
        while self.lx.peek()[0] == "&":
            self.lx.next()
            right = self.unit()
            left = And(left, right)
        return left

    def unit(self) -> Formula:
        kind, text, pos = self.lx.peek()
        if kind == "~":
            self.lx.next()
            return Not(self.unit())
        if kind == "name" and text in ("all", "ex"):
            return self.formula()
        if kind == "name" and text == "T":
            self.lx.next()
            self.lx.expect("(")
            t = self.term()
            self.lx.expect(")")
            return Tr(t)
        if kind == "(":
            # parenthesized formula or term; try formula first
            save = self.lx.i
            try:
                self.lx.next()
                f = self.formula()
                self.lx.expect(")")
                return f
            except ParseError:
                self.lx.i = save
        return self.atom()

    def atom(self) -> Formula:
        left = self.term()
        kind, text, pos = self.lx.peek()
        if kind == "leq":
            self.lx.next()
            right = self.term()
            if not isinstance(left, Var):
                raise ParseError("<= sugar requires a variable on the left", pos)
            return leq_formula(left.name, right)
        self.lx.expect("=")
        right = self.term()
        return Eq(left, right)

    def sequent(self) -> Sequent:
        ante = []
        if self.lx.peek()[0] not in ("arrow",):
            ante.append(self.formula())
            while self.lx.peek()[0] == ",":
                self.lx.next()
                ante.append(self.formula())
        self.lx.expect("arrow")
        succ = []
        if self.lx.peek()[0] != "eof":
            succ.append(self.formula())
            while self.lx.peek()[0] == ",":
                self.lx.next()
                succ.append(self.formula())
        return sequent(ante, succ)

    def finish(self, value):
        tok = self.lx.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
        return value


def parse(text: str, kind: str = "formula", quote_parser=None):
    """Parse a term, formula, or sequent. `quote_parser(text, pos) -> code`
    resolves godel quotes; coding installs one."""
    p = _Parser(text, quote_parser)
    if kind == "term":
        return p.finish(p.term())
    if kind == "formula":
        return p.finish(p.formula())
    if kind == "sequent":
        return p.finish(p.sequent())
    raise ValueError(f"unknown parse kind {kind!r}")

"""Concrete theory objects: Basic, TS0, UTS0, PA_T, PKF.

Each theory is an initial-sequent recognizer plus rule gates. Basic carries
elementary arithmetic (defining equations, true closed literals, decidable
identity) and finitely many ordinal-notation facts; the truth theories extend
it with their truth sequents. Every theory exposes an object-language axiom
predicate whose executable semantics is the recognizer itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import coding, kernel, ordinals
from .coding import DESIGNATED_VAR, EvalError, corner, embed, encode, eval_term
from .kernel import Derivation, Theory, cut2, init, node
from .syntax import (
    All, And, App, ARITHMETICAL, DELTA0, Eq, Ex, Formula, Not, ONE_T, Or,
    Sequent, Term, Tr, Var, Zero, classify, free_vars, is_closed, numeral,
    numeral_value, sequent, substitute, term_vars,
)

# ------------------------------------------------------------ helpers

ONE_NUM = ONE_T


def char_atom(fn: str, *args: Term) -> Formula:
    return Eq(App(fn, tuple(args)), ONE_NUM)


def prec_atom(a: Term, b: Term) -> Formula:
    return char_atom("prec", a, b)


def sent_atom(t: Term) -> Formula:
    return char_atom("sentlt", t)


def ct_atom(t: Term) -> Formula:
    return char_atom("ct", t)


C0 = numeral(embed(ordinals.ZERO))
C1 = numeral(embed(ordinals.ONE))
CW = numeral(embed(ordinals.tower(2)))                      # w^w
CW2 = numeral(embed(ordinals.omega_pow(ordinals.mul_nat(ordinals.OMEGA, 2))))
EW = numeral(embed(ordinals.OMEGA))

CV = corner(Var(DESIGNATED_VAR))
TV = corner(Tr(Var(DESIGNATED_VAR)))


# ------------------------------------------------------- pattern matching


def _is_meta(name: str) -> bool:
    return name.startswith("_")


def match_term(pat: Term, t: Term, b: Dict[str, object]) -> bool:
    if isinstance(pat, Var) and _is_meta(pat.name):
        seen = b.get(pat.name)
        if seen is None:
            b[pat.name] = t
            return True
        return seen == t
    if isinstance(pat, Var):
        return pat == t
    if isinstance(pat, Zero):
        return isinstance(t, Zero)
    if not isinstance(t, App) or t.fn != pat.fn or len(t.args) != len(pat.args):
        return False
    return all(match_term(pa, ta, b) for pa, ta in zip(pat.args, t.args))


def match_formula(pat: Formula, f: Formula, b: Dict[str, object]) -> bool:
    if isinstance(pat, Eq):
        return isinstance(f, Eq) and match_term(pat.left, f.left, b) \
            and match_term(pat.right, f.right, b)
    if isinstance(pat, Tr):
        return isinstance(f, Tr) and match_term(pat.arg, f.arg, b)
    if isinstance(pat, Not):
        return isinstance(f, Not) and match_formula(pat.body, f.body, b)
    if isinstance(pat, And):
        return isinstance(f, And) and match_formula(pat.left, f.left, b) \
            and match_formula(pat.right, f.right, b)
    if isinstance(pat, Or):
        return isinstance(f, Or) and match_formula(pat.left, f.left, b) \
            and match_formula(pat.right, f.right, b)
    if isinstance(pat, (All, Ex)):
        if not isinstance(f, type(pat)):
            return False
        if _is_meta(pat.var):
            seen = b.get(pat.var)
            if seen is None:
                b[pat.var] = Var(f.var)
            elif seen != Var(f.var):
                return False
        elif pat.var != f.var:
            return False
        return match_formula(pat.body, f.body, b)
    return False


def match_sequent(pat: Sequent, s: Sequent, b: Dict[str, object]) -> bool:
    """Multiset match of schema formulas against a canonical sequent."""
    if len(pat.ante) != len(s.ante) or len(pat.succ) != len(s.succ):
        return False

    def go(pats: Sequence[Formula], vals: List[Formula], b: Dict[str, object]) -> Optional[Dict[str, object]]:
        if not pats:
            return b if not vals else None
        head, rest = pats[0], pats[1:]
        for i, v in enumerate(vals):
            b2 = dict(b)
            if match_formula(head, v, b2):
                out = go(rest, vals[:i] + vals[i + 1:], b2)
                if out is not None:
                    return out
        return None

    b2 = go(pat.ante, list(s.ante), dict(b))
    if b2 is None:
        return False
    b3 = go(pat.succ, list(s.succ), b2)
    if b3 is None:
        return False
    b.update(b3)
    return True


# ------------------------------------------------------------ Id2 matching


def _replace_ok(c: Term, d: Term, s: Term, t: Term, bound: frozenset) -> bool:
    if c == d:
        return True
    if c == s and d == t:
        return not (bound & (term_vars(s) | term_vars(t)))
    if isinstance(c, App) and isinstance(d, App) and c.fn == d.fn \
            and len(c.args) == len(d.args):
        return all(_replace_ok(a, bb, s, t, bound) for a, bb in zip(c.args, d.args))
    return False


def _id2_formula(c: Formula, d: Formula, s: Term, t: Term, bound: frozenset) -> bool:
    if type(c) is not type(d):
        return False
    if isinstance(c, Eq):
        return _replace_ok(c.left, d.left, s, t, bound) and \
            _replace_ok(c.right, d.right, s, t, bound)
    if isinstance(c, Tr):
        return _replace_ok(c.arg, d.arg, s, t, bound)
    if isinstance(c, Not):
        return _id2_formula(c.body, d.body, s, t, bound)
    if isinstance(c, (And, Or)):
        return _id2_formula(c.left, d.left, s, t, bound) and \
            _id2_formula(c.right, d.right, s, t, bound)
    if c.var != d.var:
        return False
    return _id2_formula(c.body, d.body, s, t, bound | {c.var})


def match_id2(s: Sequent) -> bool:
    """s = t, A(s) => A(t), allowing the equation itself to serve as A(s)."""
    if len(s.succ) != 1 or not (1 <= len(s.ante) <= 2):
        return False
    target = s.succ[0]
    for e in s.ante:
        if not isinstance(e, Eq):
            continue
        lhs, rhs = e.left, e.right
        others = [f for f in s.ante if f != e]
        candidates = others if others else [e]
        for c in candidates:
            if _id2_formula(c, target, lhs, rhs, frozenset()):
                return True
    return False


# ------------------------------------------------------- axiom schemes


def _pv(n: str) -> Var:
    return Var("_" + n)


_A, _B, _C, _X, _Y, _Z, _G = (_pv(n) for n in "abcxyzg")


def _add(a: Term, b: Term) -> Term:
    return App("add", (a, b))


_DEFINING_EQUATIONS: List[Tuple[str, Formula]] = [
    ("ea-add0", Eq(_add(_A, Zero()), _A)),
    ("ea-addS", Eq(_add(_A, App("S", (_B,))), App("S", (_add(_A, _B),)))),
    ("ea-mul0", Eq(App("mul", (_A, Zero())), Zero())),
    ("ea-mulS", Eq(App("mul", (_A, App("S", (_B,)))),
                   _add(App("mul", (_A, _B)), _A))),
    ("ea-exp0", Eq(App("exp", (_A, Zero())), ONE_NUM)),
    ("ea-expS", Eq(App("exp", (_A, App("S", (_B,)))),
                   App("mul", (App("exp", (_A, _B)), _A)))),
    ("ea-succ", Eq(App("S", (_A,)), _add(_A, ONE_NUM))),
    ("ea-dbl0", Eq(App("d0", (_A,)), _add(_A, _A))),
    ("ea-dbl1", Eq(App("d1", (_A,)), App("S", (_add(_A, _A),)))),
]

_OT_SEQUENTS: List[Tuple[str, Sequent]] = [
    ("ot-zero", sequent([], [Not(prec_atom(_Y, C0))])),
    ("ot-irref", sequent([], [Not(prec_atom(_Y, _Y))])),
    ("ot-succ-split", sequent([prec_atom(_Z, App("oplus", (_Y, C1)))],
                              [Or(prec_atom(_Z, _Y), Eq(_Z, _Y))])),
    ("ot-mul0", sequent([], [Eq(App("oplus", (_Y, App("omul", (_C, Zero())))), _Y)])),
    ("ot-mulstep", sequent([], [Eq(
        App("oplus", (_Y, App("omul", (_C, _add(_X, ONE_NUM))))),
        App("oplus", (App("oplus", (_Y, App("omul", (_C, _X)))), _C)))])),
    ("ot-powsucc", sequent([], [Eq(
        App("opw2", (App("ofin", (_add(_X, ONE_NUM),)),)),
        App("omulom", (App("opw2", (App("ofin", (_X,)),)),)))])),
    ("ot-mulom-split", sequent(
        [prec_atom(_Z, App("oplus", (_Y, App("omulom", (_G,)))))],
        [prec_atom(_Z, App("oplus", (_Y, App("omul", (_G, App("jel", (_Z, _Y, _G)))))))])),
    ("ot-lim-split", sequent(
        [prec_atom(_Z, App("oplus", (_Y, App("opw2", (App("omul", (EW, _add(_X, ONE_NUM))),)))))],
        [prec_atom(_Z, App("oplus", (_Y, App("opw2", (App("oplus", (App("omul", (EW, _X)), App("ofin", (App("dgn", (_Z, _Y, _X)),)))),)))))])),
]


def _sub3(x: Term, v: Term, n: Term) -> Term:
    return App("sub", (x, v, App("num", (n,))))


def _tmpl_at(x: Term, y: Term) -> Term:
    """x(y/v): substitute the numeral for y at the designated variable."""
    return _sub3(x, CV, y)


_Q = Var("_q")

_PKF_SCHEMAS: List[Tuple[str, Sequent]] = [
    ("pkf-eq1", sequent([ct_atom(_X), ct_atom(_Y),
                         Eq(App("val", (_X,)), App("val", (_Y,)))],
                        [Tr(App("ceq", (_X, _Y)))])),
    ("pkf-eq2", sequent([ct_atom(_X), ct_atom(_Y), Tr(App("ceq", (_X, _Y)))],
                        [Eq(App("val", (_X,)), App("val", (_Y,)))])),
    ("pkf-tt1", sequent([Tr(_tmpl_at(TV, _X))], [Tr(_X)])),
    ("pkf-tt2", sequent([Tr(_X)], [Tr(_tmpl_at(TV, _X))])),
    ("pkf-and1", sequent([sent_atom(App("cand", (_X, _Y))), And(Tr(_X), Tr(_Y))],
                         [Tr(App("cand", (_X, _Y)))])),
    ("pkf-and2", sequent([sent_atom(App("cand", (_X, _Y))), Tr(App("cand", (_X, _Y)))],
                         [And(Tr(_X), Tr(_Y))])),
    ("pkf-or1", sequent([sent_atom(App("cor", (_X, _Y))), Or(Tr(_X), Tr(_Y))],
                        [Tr(App("cor", (_X, _Y)))])),
    ("pkf-or2", sequent([sent_atom(App("cor", (_X, _Y))), Tr(App("cor", (_X, _Y)))],
                        [Or(Tr(_X), Tr(_Y))])),
    ("pkf-neg1", sequent([sent_atom(_X), Tr(App("cneg", (_X,)))], [Not(Tr(_X))])),
    ("pkf-neg2", sequent([sent_atom(_X), Not(Tr(_X))], [Tr(App("cneg", (_X,)))])),
    ("pkf-all1", sequent([sent_atom(App("call", (CV, _X))),
                          All("_q", Tr(_tmpl_at(_X, _Q)))],
                         [Tr(App("call", (CV, _X)))])),
    ("pkf-all2", sequent([sent_atom(App("call", (CV, _X))), Tr(App("call", (CV, _X)))],
                         [All("_q", Tr(_tmpl_at(_X, _Q)))])),
    ("pkf-ex1", sequent([sent_atom(App("cex", (CV, _X))),
                         Ex("_q", Tr(_tmpl_at(_X, _Q)))],
                        [Tr(App("cex", (CV, _X)))])),
    ("pkf-ex2", sequent([sent_atom(App("cex", (CV, _X))), Tr(App("cex", (CV, _X)))],
                        [Ex("_q", Tr(_tmpl_at(_X, _Q)))])),
]


# --------------------------------------------------------- recognizers


def _recognize_id1(s: Sequent) -> Optional[str]:
    if not s.ante and len(s.succ) == 1:
        f = s.succ[0]
        if isinstance(f, Eq) and f.left == f.right:
            return "id1"
    return None


def _recognize_id2(s: Sequent) -> Optional[str]:
    return "id2" if match_id2(s) else None


def _recognize_defining(s: Sequent) -> Optional[str]:
    if s.ante or len(s.succ) != 1:
        return None
    for name, pat in _DEFINING_EQUATIONS:
        if match_formula(pat, s.succ[0], {}):
            return name
    return None


def _closed_eq_value(f: Formula) -> Optional[Tuple[int, int]]:
    if not isinstance(f, Eq):
        return None
    if term_vars(f.left) or term_vars(f.right):
        return None
    try:
        return eval_term(f.left, {}), eval_term(f.right, {})
    except (EvalError, ValueError, OverflowError):
        return None


def _recognize_literal(s: Sequent) -> Optional[str]:
    if s.ante or len(s.succ) != 1:
        return None
    f = s.succ[0]
    neg = isinstance(f, Not)
    core = f.body if neg else f
    vals = _closed_eq_value(core)
    if vals is None:
        return None
    if not neg and vals[0] == vals[1]:
        return "ea-lit"
    if neg and vals[0] != vals[1]:
        return "ea-lit-neg"
    return None


def _recognize_eqdec(s: Sequent) -> Optional[str]:
    if s.ante or len(s.succ) != 2:
        return None
    a, b = s.succ
    if isinstance(b, Not) and b.body == a and isinstance(a, Eq):
        return "eq-dec"
    if isinstance(a, Not) and a.body == b and isinstance(b, Eq):
        return "eq-dec"
    return None


def _recognize_ot(s: Sequent) -> Optional[str]:
    for name, pat in _OT_SEQUENTS:
        if match_sequent(pat, s, {}):
            return name
    return None


_BASIC_RECOGNIZERS = [
    _recognize_id1, _recognize_defining, _recognize_literal,
    _recognize_eqdec, _recognize_ot, _recognize_id2,
]


def uniform_template(a: Formula) -> Term:
    """The open template term for a uniform truth sequent over a's free
    variables in canonical order (plain corner quote when a is closed)."""
    return coding.template(a, sorted(free_vars(a)))


def _recognize_uniform(s: Sequent) -> Optional[str]:
    if len(s.ante) == 1 and len(s.succ) == 1:
        a, b = s.ante[0], s.succ[0]
        if isinstance(b, Tr) and b.arg == uniform_template(a):
            return "uts-up"
        if isinstance(a, Tr) and a.arg == uniform_template(b):
            return "uts-down"
    return None


def _recognize_tsentences(s: Sequent) -> Optional[str]:
    if len(s.ante) == 1 and len(s.succ) == 1:
        a, b = s.ante[0], s.succ[0]
        if isinstance(a, Tr) and is_closed(b) and a.arg == corner(b):
            return "t1"
        if isinstance(b, Tr) and is_closed(a) and b.arg == corner(a):
            return "t2"
    return None


def _recognize_pkf(s: Sequent) -> Optional[str]:
    for name, pat in _PKF_SCHEMAS:
        if match_sequent(pat, s, {}):
            return name
    return None


# ------------------------------------------------------------- theories


@dataclass
class BaseTheory(Theory):
    name: str = "Basic"
    recognizers: Tuple[Callable[[Sequent], Optional[str]], ...] = ()
    induction: str = "delta0"  # "delta0" | "full" | "none"
    ax_symbol: str = "axbasic"
    has_uniform_truth: bool = False

    def initial(self, s: Sequent) -> Optional[str]:
        for rec in self.recognizers:
            out = rec(s)
            if out is not None:
                return out
        return None

    def ind_ok(self, f: Formula) -> Optional[str]:
        if self.induction == "none":
            return f"{self.name} has no induction rule"
        if self.induction == "full":
            return None
        kinds = classify(f)
        if DELTA0 in kinds:
            return None
        if ARITHMETICAL not in kinds:
            return "induction formula must be arithmetical (truth predicate found)"
        return "induction formula is not bounded (delta-0)"

    @property
    def ax_formula(self) -> Formula:
        return char_atom(self.ax_symbol, Var("x"))

    def ax_holds(self, code: int) -> bool:
        s = coding.decode_sequent(code)
        return s is not None and self.initial(s) is not None

    def repair_initial(self, s: Sequent, m: Mapping[str, Term]) -> Optional[Derivation]:
        if not self.has_uniform_truth:
            return None
        kind = _recognize_uniform(s)
        if kind is None:
            return None
        from .syntax import subst_sequent
        inst = subst_sequent(s, m)
        if any(free_vars(f) for f in inst.ante + inst.succ):
            return None
        if kind == "uts-down":
            old_t = s.ante[0].arg
            body = inst.succ[0]
        else:
            old_t = s.succ[0].arg
            body = inst.ante[0]
        from .syntax import term_subst
        new_t = term_subst(old_t, m)
        cq = corner(body)
        eqn = Eq(new_t, cq)
        vals = _closed_eq_value(eqn)
        if vals is None or vals[0] != vals[1]:
            return None
        rewrite = init(sequent([eqn, Tr(new_t)], [Tr(cq)]))          # id2
        closed_axiom = init(sequent([], [eqn]))                     # ea-lit
        bridge = cut2(closed_axiom, rewrite, eqn)                    # T(new) => T(cq)
        if kind == "uts-down":
            unquote = init(sequent([Tr(cq)], [body]))                # zero-var instance
            return cut2(bridge, unquote, Tr(cq))
        quote = init(sequent([body], [Tr(cq)]))
        rewrite2 = init(sequent([Eq(cq, new_t), Tr(cq)], [Tr(new_t)]))
        closed2 = init(sequent([], [Eq(cq, new_t)]))
        bridge2 = cut2(closed2, rewrite2, Eq(cq, new_t))
        return cut2(quote, bridge2, Tr(cq))


def basic() -> BaseTheory:
    return BaseTheory(name="Basic", recognizers=tuple(_BASIC_RECOGNIZERS),
                      induction="delta0", ax_symbol="axbasic")


def ts0() -> BaseTheory:
    return BaseTheory(name="TS0",
                      recognizers=tuple(_BASIC_RECOGNIZERS) + (_recognize_tsentences,),
                      induction="delta0", ax_symbol="axts0")


def uts0() -> BaseTheory:
    return BaseTheory(name="UTS0",
                      recognizers=tuple(_BASIC_RECOGNIZERS) + (_recognize_uniform,),
                      induction="delta0", ax_symbol="axuts0",
                      has_uniform_truth=True)


def pa_t() -> BaseTheory:
    return BaseTheory(name="PAT", recognizers=tuple(_BASIC_RECOGNIZERS),
                      induction="full", ax_symbol="axpat")


def pkf() -> BaseTheory:
    return BaseTheory(name="PKF",
                      recognizers=tuple(_BASIC_RECOGNIZERS) + (_recognize_pkf,),
                      induction="full", ax_symbol="axpkf")


_REGISTRY: Dict[str, BaseTheory] = {}


def get_theory(name: str) -> BaseTheory:
    if not _REGISTRY:
        for t in (basic(), ts0(), uts0(), pa_t(), pkf()):
            _REGISTRY[t.name] = t
    return _REGISTRY[name]


for _t in (basic(), ts0(), uts0(), pa_t(), pkf()):
    coding.register_ax_recognizer(_t.ax_symbol, _t.ax_holds)


# -------------------------------------------------------------- diagonal


def diagonal(a: Formula) -> Tuple[Formula, Derivation, Derivation]:
    """Diagonal sentence for a formula with one free variable: returns the
    fixed-point sentence and checkable transfer derivations both ways."""
    fv = sorted(free_vars(a))
    if len(fv) != 1:
        raise ValueError("diagonal needs exactly one free variable")
    u = fv[0]
    seed = substitute(a, u, App("selfsub", (Var(DESIGNATED_VAR),)))
    b = numeral(encode(seed))
    s_term = App("selfsub", (b,))
    lam = substitute(a, u, s_term)
    cq = corner(lam)
    a_quoted = substitute(a, u, cq)

    fwd_eq = Eq(s_term, cq)
    fwd = cut2(init(sequent([], [fwd_eq])),
               init(sequent([fwd_eq, lam], [a_quoted])), fwd_eq)
    back_eq = Eq(cq, s_term)
    back = cut2(init(sequent([], [back_eq])),
                init(sequent([back_eq, a_quoted], [lam])), back_eq)
    return lam, fwd, back

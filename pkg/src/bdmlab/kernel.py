"""Derivation trees and the checker for the De Morgan sequent calculus plus
theory-supplied initial sequents and rules.

Nodes carry explicit principal/side annotations so checking is linear and
failure reasons are precise. Contexts are matched set-theoretically: a rule
instance exists iff one shared context completes every premise and the
conclusion simultaneously.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .syntax import (
    All, And, App, Eq, Ex, Formula, Not, ONE_T, Or, Sequent, Term, Tr, Var,
    Zero, free_vars, fresh_var, pprint, sequent, sequent_vars, subst,
    subst_sequent, substitute, term_subst, term_vars,
)

BDM_RULES = frozenset({
    "ax", "lw", "rw", "cut", "cp1", "cp2", "land", "rand", "lor", "ror",
    "lall", "rex", "rall", "lex",
})
THEORY_RULES = frozenset({"init", "ind"})
REFLECTION_RULES = frozenset({"r", "R", "rfn", "grf"})


@dataclass(frozen=True)
class Derivation:
    conclusion: Sequent
    rule: str
    params: Tuple[Tuple[str, object], ...] = ()
    premises: Tuple["Derivation", ...] = ()

    def param(self, key: str, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default

    @property
    def size(self) -> int:
        out, stack = 0, [self]
        while stack:
            d = stack.pop()
            out += 1
            stack.extend(d.premises)
        return out

    def walk(self):
        stack = [(self, "root")]
        while stack:
            d, path = stack.pop()
            yield d, path
            for i, p in enumerate(d.premises):
                stack.append((p, f"{path}.{i}"))


def node(conclusion: Sequent, rule: str, premises: Iterable[Derivation] = (),
         **params) -> Derivation:
    return Derivation(conclusion, rule, tuple(sorted(params.items())),
                      tuple(premises))


@dataclass
class CheckReport:
    theory: str
    accepted: bool
    failure_path: Optional[str] = None
    failure_reason: Optional[str] = None
    nodes: int = 0
    rules_used: Dict[str, int] = field(default_factory=dict)
    certificates: Tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "theory": self.theory,
            "verdict": "accepted" if self.accepted else "rejected",
            "failure": None if self.accepted else
                {"path": self.failure_path, "reason": self.failure_reason},
            "nodes": self.nodes,
            "rules": dict(sorted(self.rules_used.items())),
            "certificates": list(self.certificates),
        }

    def line(self, name: str = "") -> str:
        tag = "ACCEPT" if self.accepted else "REJECT"
        head = f"{tag} {name}".rstrip() + f" [{self.theory}] nodes={self.nodes}"
        if self.accepted:
            return head
        return f"{head} at {self.failure_path}: {self.failure_reason}"


class Theory:
    """Initial-sequent recognizer plus rule gates; concrete theories subclass."""

    name = "?"

    def initial(self, s: Sequent) -> Optional[str]:
        raise NotImplementedError

    def ind_ok(self, f: Formula) -> Optional[str]:
        return "this theory has no induction rule"

    def check_reflection(self, d: Derivation) -> Optional[str]:
        return f"theory {self.name} has no reflection rules"

    def repair_initial(self, s: Sequent, m: Mapping[str, Term]) -> Optional[Derivation]:
        """Replacement derivation for an initial sequent broken by substitution."""
        return None


def negs(fs: Iterable[Formula]) -> frozenset:
    return frozenset(Not(f) for f in fs)


def _ctx_match(pairs: List[Tuple[frozenset, frozenset]]) -> bool:
    gamma = set()
    for actual, schem in pairs:
        if not schem <= actual:
            return False
        gamma |= actual - schem
    return all(actual == schem | gamma for actual, schem in pairs)


def _need_formula(d: Derivation, key: str = "formula"):
    f = d.param(key)
    if not isinstance(f, (Eq, Tr, Not, And, Or, All, Ex)):
        return None
    return f


def _check_node(d: Derivation, theory: Theory) -> Optional[str]:
    r = d.rule
    c = d.conclusion
    p = d.premises

    def arity(n: int) -> Optional[str]:
        if len(p) != n:
            return f"rule {r} takes {n} premise(s), found {len(p)}"
        return None

    if r == "ax":
        if err := arity(0):
            return err
        if len(c.ante) == 1 and c.ante == c.succ:
            return None
        return "initial sequent must be A => A"

    if r == "init":
        if err := arity(0):
            return err
        ax_id = theory.initial(c)
        if ax_id is None:
            return f"not an initial sequent of {theory.name}"
        claimed = d.param("axiom")
        if claimed is not None and claimed != ax_id:
            return f"axiom id mismatch: recognized {ax_id}, node claims {claimed}"
        return None

    if r == "lw":
        if err := arity(1):
            return err
        q = p[0].conclusion
        if q.succ_set != c.succ_set:
            return "left weakening must keep the succedent"
        if not q.ante_set <= c.ante_set or len(c.ante_set - q.ante_set) > 1:
            return "left weakening adds at most one antecedent formula"
        return None

    if r == "rw":
        if err := arity(1):
            return err
        q = p[0].conclusion
        if q.ante_set != c.ante_set:
            return "right weakening must keep the antecedent"
        if not q.succ_set <= c.succ_set or len(c.succ_set - q.succ_set) > 1:
            return "right weakening adds at most one succedent formula"
        return None

    if r == "cut":
        if err := arity(2):
            return err
        a = _need_formula(d)
        if a is None:
            return "cut needs its cut formula"
        left, right = p[0].conclusion, p[1].conclusion
        ok = _ctx_match([(left.ante_set, frozenset()),
                         (right.ante_set, frozenset([a])),
                         (c.ante_set, frozenset())]) and \
             _ctx_match([(left.succ_set, frozenset([a])),
                         (right.succ_set, frozenset()),
                         (c.succ_set, frozenset())])
        return None if ok else "cut premises do not match the conclusion contexts"

    if r == "cp1":
        if err := arity(1):
            return err
        q = p[0].conclusion
        if q.ante_set == negs(c.succ_set) and c.ante_set == negs(q.succ_set):
            return None
        return "contraposition (cp1) shape mismatch"

    if r == "cp2":
        if err := arity(1):
            return err
        q = p[0].conclusion
        if q.succ_set == negs(c.ante_set) and c.succ_set == negs(q.ante_set):
            return None
        return "contraposition (cp2) shape mismatch"

    if r in ("land", "ror"):
        if err := arity(1):
            return err
        f = _need_formula(d)
        want = And if r == "land" else Or
        if not isinstance(f, want):
            return f"rule {r} needs a principal {'conjunction' if want is And else 'disjunction'}"
        parts = frozenset([f.left, f.right])
        q = p[0].conclusion
        if r == "land":
            ok = _ctx_match([(q.ante_set, parts), (c.ante_set, frozenset([f]))]) and \
                 _ctx_match([(q.succ_set, frozenset()), (c.succ_set, frozenset())])
        else:
            ok = _ctx_match([(q.succ_set, parts), (c.succ_set, frozenset([f]))]) and \
                 _ctx_match([(q.ante_set, frozenset()), (c.ante_set, frozenset())])
        return None if ok else f"rule {r} context mismatch"

    if r in ("rand", "lor"):
        if err := arity(2):
            return err
        f = _need_formula(d)
        want = And if r == "rand" else Or
        if not isinstance(f, want):
            return f"rule {r} needs a principal {'conjunction' if want is And else 'disjunction'}"
        q1, q2 = p[0].conclusion, p[1].conclusion
        if r == "rand":
            ok = _ctx_match([(q1.succ_set, frozenset([f.left])),
                             (q2.succ_set, frozenset([f.right])),
                             (c.succ_set, frozenset([f]))]) and \
                 _ctx_match([(q1.ante_set, frozenset()),
                             (q2.ante_set, frozenset()),
                             (c.ante_set, frozenset())])
        else:
            ok = _ctx_match([(q1.ante_set, frozenset([f.left])),
                             (q2.ante_set, frozenset([f.right])),
                             (c.ante_set, frozenset([f]))]) and \
                 _ctx_match([(q1.succ_set, frozenset()),
                             (q2.succ_set, frozenset()),
                             (c.succ_set, frozenset())])
        return None if ok else f"rule {r} context mismatch"

    if r in ("lall", "rex"):
        if err := arity(1):
            return err
        f = _need_formula(d)
        want = All if r == "lall" else Ex
        if not isinstance(f, want):
            return f"rule {r} needs a principal quantified formula"
        t = d.param("witness")
        if not isinstance(t, (Var, Zero, App)):
            return f"rule {r} needs a witness term"
        inst = substitute(f.body, f.var, t)
        q = p[0].conclusion
        if r == "lall":
            ok = _ctx_match([(q.ante_set, frozenset([inst])),
                             (c.ante_set, frozenset([f]))]) and \
                 _ctx_match([(q.succ_set, frozenset()), (c.succ_set, frozenset())])
        else:
            ok = _ctx_match([(q.succ_set, frozenset([inst])),
                             (c.succ_set, frozenset([f]))]) and \
                 _ctx_match([(q.ante_set, frozenset()), (c.ante_set, frozenset())])
        return None if ok else f"rule {r} instance mismatch"

    if r in ("rall", "lex"):
        if err := arity(1):
            return err
        f = _need_formula(d)
        want = All if r == "rall" else Ex
        if not isinstance(f, want):
            return f"rule {r} needs a principal quantified formula"
        y = d.param("eigen")
        if not isinstance(y, str):
            return f"rule {r} needs an eigenvariable"
        inst = substitute(f.body, f.var, Var(y))
        q = p[0].conclusion
        if r == "rall":
            ok = _ctx_match([(q.succ_set, frozenset([inst])),
                             (c.succ_set, frozenset([f]))]) and \
                 _ctx_match([(q.ante_set, frozenset()), (c.ante_set, frozenset())])
        else:
            ok = _ctx_match([(q.ante_set, frozenset([inst])),
                             (c.ante_set, frozenset([f]))]) and \
                 _ctx_match([(q.succ_set, frozenset()), (c.succ_set, frozenset())])
        if not ok:
            return f"rule {r} instance mismatch"
        if y in sequent_vars(c):
            return f"eigenvariable {y} occurs free in the conclusion"
        return None

    if r == "ind":
        if err := arity(1):
            return err
        a = _need_formula(d)
        x = d.param("var")
        t = d.param("term")
        if a is None or not isinstance(x, str) or not isinstance(t, (Var, Zero, App)):
            return "induction needs formula, var, and term parameters"
        why = theory.ind_ok(a)
        if why is not None:
            return why
        a0 = substitute(a, x, Zero())
        a_succ = substitute(a, x, App("add", (Var(x), ONE_T)))
        at = substitute(a, x, t)
        q = p[0].conclusion
        ok_a = _ctx_match([(q.ante_set, frozenset([a])),
                           (c.ante_set, frozenset([a0]))])
        ok_s = _ctx_match([(q.succ_set, frozenset([a_succ])),
                           (c.succ_set, frozenset([at]))])
        if not (ok_a and ok_s):
            return "induction premise does not match the conclusion"
        side = (q.ante_set - frozenset([a])) | (c.ante_set - frozenset([a0])) \
            | (q.succ_set - frozenset([a_succ])) | (c.succ_set - frozenset([at]))
        free_in_side = set()
        for g in side:
            free_in_side |= free_vars(g)
        if x in free_in_side or x in free_vars(a0):
            return f"induction variable {x} occurs free in a side formula"
        return None

    if r in REFLECTION_RULES:
        return theory.check_reflection(d)

    return f"unknown rule {r!r}"


def check(d: Derivation, theory: Theory) -> CheckReport:
    rules: Counter = Counter()
    certs: List[str] = []
    first_failure = None
    for n, path in d.walk():
        rules[n.rule] += 1
        cert = n.param("cert")
        if isinstance(cert, str):
            certs.append(cert)
        try:
            why = _check_node(n, theory)
        except Exception as exc:  # a malformed node must reject, not crash
            why = f"malformed node: {exc}"
        if why is not None and first_failure is None:
            first_failure = (path, why)
    report = CheckReport(theory=theory.name, accepted=first_failure is None,
                         nodes=d.size, rules_used=dict(rules),
                         certificates=tuple(certs))
    if first_failure:
        report.failure_path, report.failure_reason = first_failure
    return report


# ----------------------------------------------------------- node builders


def ax(a: Formula) -> Derivation:
    return node(sequent([a], [a]), "ax")


def init(s: Sequent) -> Derivation:
    return node(s, "init")


def lw(d: Derivation, a: Formula) -> Derivation:
    c = d.conclusion
    return node(sequent(c.ante + (a,), c.succ), "lw", (d,))


def rw(d: Derivation, a: Formula) -> Derivation:
    c = d.conclusion
    return node(sequent(c.ante, c.succ + (a,)), "rw", (d,))


def weaken(d: Derivation, add_ante: Iterable[Formula] = (),
           add_succ: Iterable[Formula] = ()) -> Derivation:
    for a in sorted(add_ante, key=pprint):
        if a not in d.conclusion.ante_set:
            d = lw(d, a)
    for a in sorted(add_succ, key=pprint):
        if a not in d.conclusion.succ_set:
            d = rw(d, a)
    return d


def weaken_to(d: Derivation, ante: Iterable[Formula], succ: Iterable[Formula]) -> Derivation:
    ante, succ = frozenset(ante), frozenset(succ)
    c = d.conclusion
    if not (c.ante_set <= ante and c.succ_set <= succ):
        raise ValueError("weaken_to target must extend the conclusion")
    return weaken(d, sorted(ante - c.ante_set, key=pprint),
                  sorted(succ - c.succ_set, key=pprint))


def cut2(dl: Derivation, dr: Derivation, a: Formula) -> Derivation:
    """Cut on `a`, weakening both sides to the joint context first."""
    if a not in dl.conclusion.succ_set:
        raise ValueError("left cut premise must have the cut formula on the right")
    if a not in dr.conclusion.ante_set:
        raise ValueError("right cut premise must have the cut formula on the left")
    gamma = dl.conclusion.ante_set | (dr.conclusion.ante_set - {a})
    delta = (dl.conclusion.succ_set - {a}) | dr.conclusion.succ_set
    wl = weaken_to(dl, gamma, delta | {a})
    wr = weaken_to(dr, gamma | {a}, delta)
    return node(sequent(gamma, delta), "cut", (wl, wr), formula=a)


def land(d: Derivation, conj: And) -> Derivation:
    c = d.conclusion
    ante = (c.ante_set - {conj.left, conj.right}) | {conj}
    return node(sequent(ante, c.succ), "land", (d,), formula=conj)


def rand(d1: Derivation, d2: Derivation, conj: And) -> Derivation:
    gamma = d1.conclusion.ante_set | d2.conclusion.ante_set
    delta = (d1.conclusion.succ_set - {conj.left}) | (d2.conclusion.succ_set - {conj.right})
    w1 = weaken_to(d1, gamma, delta | {conj.left})
    w2 = weaken_to(d2, gamma, delta | {conj.right})
    return node(sequent(gamma, delta | {conj}), "rand", (w1, w2), formula=conj)


def lor(d1: Derivation, d2: Derivation, disj: Or) -> Derivation:
    gamma = (d1.conclusion.ante_set - {disj.left}) | (d2.conclusion.ante_set - {disj.right})
    delta = d1.conclusion.succ_set | d2.conclusion.succ_set
    w1 = weaken_to(d1, gamma | {disj.left}, delta)
    w2 = weaken_to(d2, gamma | {disj.right}, delta)
    return node(sequent(gamma | {disj}, delta), "lor", (w1, w2), formula=disj)


def ror(d: Derivation, disj: Or) -> Derivation:
    c = d.conclusion
    succ = (c.succ_set - {disj.left, disj.right}) | {disj}
    return node(sequent(c.ante, succ), "ror", (d,), formula=disj)


def lall(d: Derivation, f: All, witness: Term) -> Derivation:
    inst = substitute(f.body, f.var, witness)
    c = d.conclusion
    ante = (c.ante_set - {inst}) | {f}
    return node(sequent(ante, c.succ), "lall", (d,), formula=f, witness=witness)


def rex(d: Derivation, f: Ex, witness: Term) -> Derivation:
    inst = substitute(f.body, f.var, witness)
    c = d.conclusion
    succ = (c.succ_set - {inst}) | {f}
    return node(sequent(c.ante, succ), "rex", (d,), formula=f, witness=witness)


def rall(d: Derivation, f: All, eigen: str) -> Derivation:
    inst = substitute(f.body, f.var, Var(eigen))
    c = d.conclusion
    succ = (c.succ_set - {inst}) | {f}
    return node(sequent(c.ante, succ), "rall", (d,), formula=f, eigen=eigen)


def lex(d: Derivation, f: Ex, eigen: str) -> Derivation:
    inst = substitute(f.body, f.var, Var(eigen))
    c = d.conclusion
    ante = (c.ante_set - {inst}) | {f}
    return node(sequent(ante, c.succ), "lex", (d,), formula=f, eigen=eigen)


def ind(d: Derivation, a: Formula, x: str, t: Term) -> Derivation:
    a0 = substitute(a, x, Zero())
    a_succ = substitute(a, x, App("add", (Var(x), ONE_T)))
    at = substitute(a, x, t)
    c = d.conclusion
    ante = (c.ante_set - {a}) | {a0}
    succ = (c.succ_set - {a_succ}) | {at}
    return node(sequent(ante, succ), "ind", (d,), formula=a, var=x, term=t)


# ----------------------------------------------- double negation and cont


def dneg_elim(a: Formula) -> Derivation:
    base = ax(Not(a))
    return node(sequent([Not(Not(a))], [a]), "cp1", (base,))


def dneg_intro(a: Formula) -> Derivation:
    base = ax(Not(a))
    return node(sequent([a], [Not(Not(a))]), "cp2", (base,))


def is_pure_bdm(d: Derivation) -> bool:
    return all(n.rule in BDM_RULES for n, _ in d.walk())


def derive_cont(d: Derivation) -> Derivation:
    """Contraposition transformer: from Gamma => Delta derive ~Delta => ~Gamma.
    Input must be pure calculus (no theory rules)."""
    if not is_pure_bdm(d):
        raise ValueError("contraposition transformer requires a pure calculus derivation")
    c = d.conclusion
    current = d
    for a in c.ante:
        current = cut2(dneg_elim(a), current, a)
    current = weaken_to(current, negs(negs(c.ante_set)), c.succ_set)
    target = sequent(negs(c.succ_set), negs(c.ante_set))
    return node(target, "cp1", (current,))


# ------------------------------------------------- excluded-middle plumbing


EmSource = Union[Mapping[Formula, Derivation], Callable[[Formula], Derivation]]


class MissingAtomCertificate(KeyError):
    pass


def _em_lookup(em: EmSource) -> Callable[[Formula], Derivation]:
    if callable(em):
        return em

    def lookup(atom: Formula) -> Derivation:
        try:
            return em[atom]
        except KeyError:
            raise MissingAtomCertificate(pprint(atom))
    return lookup


def explode(em_d: Derivation, b: Formula, ante: Iterable[Formula] = (),
            succ: Iterable[Formula] = ()) -> Derivation:
    """From a derivation of => B, ~B build B, ~B, Gamma => Delta."""
    refute = node(sequent([Not(b), Not(Not(b))], []), "cp1", (em_d,))
    out = cut2(dneg_intro(b), refute, Not(Not(b)))
    return weaken(out, ante, succ)


def em_formula(a: Formula, em: EmSource) -> Derivation:
    """Derivation of => A, ~A by structural recursion, given certificates
    => B, ~B for the atoms of A."""
    lookup = _em_lookup(em)

    def build(f: Formula) -> Derivation:
        if isinstance(f, (Eq, Tr)):
            return lookup(f)
        if isinstance(f, Not):
            ih = build(f.body)
            b = f.body
            # => ~B, ~~B from => B, ~B
            return cut2(weaken(ih, (), [Not(Not(b))]),
                        weaken(dneg_intro(b), (), [Not(b)]), b)
        if isinstance(f, And):
            ihl, ihr = build(f.left), build(f.right)
            drop_l = derive_cont(land(weaken(ax(f.left), [f.right]), f))  # ~L => ~(L&R)
            drop_r = derive_cont(land(weaken(ax(f.right), [f.left]), f))
            left_or_not = cut2(ihl, drop_l, Not(f.left))   # => L, ~(L&R)
            right_or_not = cut2(ihr, drop_r, Not(f.right))
            return rand(left_or_not, right_or_not, f)
        if isinstance(f, Or):
            ihl, ihr = build(f.left), build(f.right)
            intro_l = ror(weaken(ax(f.left), (), [f.right]), f)   # L => L|R
            intro_r = ror(weaken(ax(f.right), (), [f.left]), f)
            with_l = cut2(ihl, intro_l, f.left)            # => L|R, ~L
            with_r = cut2(ihr, intro_r, f.right)
            # ~L, ~R => ~(L|R) via cp2 from L|R => ~~L, ~~R
            upl = weaken(dneg_intro(f.left), (), [Not(Not(f.right))])
            upr = weaken(dneg_intro(f.right), (), [Not(Not(f.left))])
            both_up = lor(upl, upr, f)
            collect = node(sequent([Not(f.left), Not(f.right)], [Not(f)]),
                           "cp2", (both_up,))
            step = cut2(with_r, collect, Not(f.right))     # ~L => L|R, ~(L|R)
            return cut2(with_l, step, Not(f.left))
        if isinstance(f, (All, Ex)):
            y = fresh_var(free_vars(f) | {f.var})
            inst = substitute(f.body, f.var, Var(y))
            ih = build(inst)
            if isinstance(f, All):
                drop = derive_cont(lall(ax(inst), f, Var(y)))  # ~A(y) => ~all
                step = cut2(ih, drop, Not(inst))               # => A(y), ~all
                return rall(step, f, y)
            intro = rex(ax(inst), f, Var(y))                   # A(y) => ex
            step = cut2(ih, intro, inst)                       # => ex, ~A(y)
            # all y.~A(y) => ~ex, then chain
            alln = All(y, Not(inst))
            from_all = lall(ax(Not(inst)), alln, Var(y))       # all~ => ~A(y)
            to_neg_ex = node(sequent([inst], [Not(alln)]), "cp2", (from_all,))
            ex_to = lex(to_neg_ex, f, y)                       # ex => ~all~
            neg_all = node(sequent([alln], [Not(f)]), "cp2", (ex_to,))
            gen = rall(step, alln, y)                          # => ex, all~
            return cut2(gen, weaken(neg_all, (), [f]), alln)
        raise TypeError(f"not a formula: {f!r}")

    return build(a)


def classical_negation(a: Formula, em: EmSource):
    """Left and right classical negation transformers for the formula `a`,
    backed by excluded-middle certificates for its atoms."""
    em_a = em_formula(a, em)

    def neg_l(d: Derivation) -> Derivation:
        c = d.conclusion
        if a not in c.succ_set:
            raise ValueError("neg_l premise must carry the formula on the right")
        blown = explode(em_a, a, c.ante_set | {Not(a)}, c.succ_set - {a})
        return cut2(weaken(d, [Not(a)], ()), blown, a)

    def neg_r(d: Derivation) -> Derivation:
        c = d.conclusion
        if a not in c.ante_set:
            raise ValueError("neg_r premise must carry the formula on the left")
        src = weaken(em_a, c.ante_set - {a}, c.succ_set)
        return cut2(src, weaken(d, (), [Not(a)]), a)

    return neg_l, neg_r


# ------------------------------------------------------------ substitution


def _subst_param(value, m: Mapping[str, Term]):
    if isinstance(value, (Eq, Tr, Not, And, Or, All, Ex)):
        return subst(value, m)
    if isinstance(value, (Var, Zero, App)):
        return term_subst(value, m)
    if isinstance(value, tuple) and all(
            isinstance(x, tuple) and len(x) == 2 for x in value):
        return tuple((k, term_subst(v, m)) for k, v in value)
    return value


def substitute_derivation(d: Derivation, m: Mapping[str, Term],
                          theory: Optional[Theory] = None) -> Derivation:
    """Instantiate free variables throughout a derivation, renaming
    eigenvariables (and induction variables) away from the substitution."""
    m = {v: t for v, t in m.items() if t != Var(v)}
    if not m:
        return d
    range_vars = set()
    for t in m.values():
        range_vars |= term_vars(t)
    blocked = set(m) | range_vars

    def go(n: Derivation, m: Mapping[str, Term]) -> Derivation:
        m = {v: t for v, t in m.items()
             if v in sequent_vars(n.conclusion) or _params_mention(n, v)}
        if not m:
            return n
        if n.rule in ("rall", "lex"):
            y = n.param("eigen")
            if isinstance(y, str) and y in blocked:
                fresh = fresh_var(blocked | sequent_vars(n.premises[0].conclusion))
                n = node(n.conclusion, n.rule,
                         [go(n.premises[0], {y: Var(fresh)})],
                         **{**dict(n.params), "eigen": fresh})
        if n.rule == "ind":
            x = n.param("var")
            if isinstance(x, str) and x in blocked:
                fresh = fresh_var(blocked | sequent_vars(n.premises[0].conclusion)
                                  | free_vars(n.param("formula")))
                a2 = substitute(n.param("formula"), x, Var(fresh))
                n = node(n.conclusion, "ind",
                         [go(n.premises[0], {x: Var(fresh)})],
                         formula=a2, var=fresh, term=n.param("term"))
        new_concl = subst_sequent(n.conclusion, m)
        new_params = tuple((k, _subst_param(v, m)) for k, v in n.params)
        new_premises = tuple(go(q, m) for q in n.premises)
        out = Derivation(new_concl, n.rule, new_params, new_premises)
        if n.rule == "init" and theory is not None and theory.initial(new_concl) is None:
            repaired = theory.repair_initial(n.conclusion, m)
            if repaired is not None:
                return repaired
        return out

    def _params_mention(n: Derivation, v: str) -> bool:
        for _, value in n.params:
            if isinstance(value, (Eq, Tr, Not, And, Or, All, Ex)) and v in free_vars(value):
                return True
            if isinstance(value, (Var, Zero, App)) and v in term_vars(value):
                return True
            if isinstance(value, tuple):
                for item in value:
                    if isinstance(item, tuple) and len(item) == 2 and \
                            isinstance(item[1], (Var, Zero, App)) and v in term_vars(item[1]):
                        return True
        return False

    return go(d, dict(m))

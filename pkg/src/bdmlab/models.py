"""Four-valued semantics: valuations, the monotone jump, least fixed points
over bounded sentence universes, and double-clause sequent satisfaction.

A universe is a finite set of sentence codes closed under immediate semantic
dependencies up to a numeral bound. Quantifiers range over the instances that
are present; a per-sentence exactness flag records whether that truncation is
known to be harmless, and satisfaction only answers on exact sentences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from . import coding
from .coding import EvalError, encode, eval_term, sent_lt
from .syntax import (
    All, And, Eq, Ex, Formula, Not, Or, Sequent, Term, Tr, free_vars,
    is_closed, numeral, pprint, substitute, term_vars,
)


@dataclass(frozen=True)
class FourValue:
    """Truth and falsity bits: t = (1,0), f = (0,1), n = (0,0), b = (1,1)."""

    true_: bool
    false_: bool

    def __str__(self) -> str:
        return {(True, False): "t", (False, True): "f",
                (False, False): "n", (True, True): "b"}[(self.true_, self.false_)]

    def leq_info(self, other: "FourValue") -> bool:
        return (not self.true_ or other.true_) and (not self.false_ or other.false_)


VN = FourValue(False, False)
VT = FourValue(True, False)
VF = FourValue(False, True)
VB = FourValue(True, True)
VALUES = (VN, VT, VF, VB)


def v_not(a: FourValue) -> FourValue:
    return FourValue(a.false_, a.true_)


def v_and(a: FourValue, b: FourValue) -> FourValue:
    return FourValue(a.true_ and b.true_, a.false_ or b.false_)


def v_or(a: FourValue, b: FourValue) -> FourValue:
    return FourValue(a.true_ or b.true_, a.false_ and b.false_)


def _leq_bound(f: Formula) -> Optional[Tuple[str, Term, Formula, bool]]:
    """Recognize the bounded patterns all x.~(x<=t)|B and ex x.(x<=t)&B;
    returns (var, bound, body, is_universal)."""
    from .syntax import _leq_guard  # same pattern the classifier uses
    if isinstance(f, All) and isinstance(f.body, Or) and isinstance(f.body.left, Not):
        t = _leq_guard(f.body.left.body, f.var)
        if t is not None:
            return f.var, t, f.body.right, True
    if isinstance(f, Ex) and isinstance(f.body, And):
        t = _leq_guard(f.body.left, f.var)
        if t is not None:
            return f.var, t, f.body.right, False
    return None


@dataclass
class Universe:
    sentences: Dict[int, Formula]
    bound: int
    exact: Dict[int, bool] = field(default_factory=dict)

    def __post_init__(self):
        if not self.exact:
            self._compute_exactness()

    @classmethod
    def build(cls, seeds: Iterable[Formula], bound: int = 8,
              max_size: int = 4000) -> "Universe":
        sentences: Dict[int, Formula] = {}
        work = []
        for f in seeds:
            if not is_closed(f):
                raise ValueError(f"universe sentences must be closed: {pprint(f)}")
            work.append(f)
        while work and len(sentences) < max_size:
            f = work.pop()
            code = encode(f)
            if code in sentences:
                continue
            sentences[code] = f
            for child in _children(f, bound):
                if encode(child) not in sentences:
                    work.append(child)
        return cls(sentences, bound)

    def _compute_exactness(self) -> None:
        # greatest fixpoint: start optimistic, knock out sentences whose
        # truncation might matter
        exact = {code: True for code in self.sentences}
        changed = True
        while changed:
            changed = False
            for code, f in self.sentences.items():
                if exact[code] and not self._exact_here(f, exact):
                    exact[code] = False
                    changed = True
        self.exact = exact

    def _exact_here(self, f: Formula, exact: Mapping[int, bool]) -> bool:
        if isinstance(f, Eq):
            return True
        if isinstance(f, Tr):
            try:
                ref = eval_term(f.arg, {})
            except (EvalError, ValueError):
                return True  # junk argument evaluates classically false
            if not sent_lt(ref):
                return True
            if ref not in self.sentences:
                return False
            return exact[ref]
        if isinstance(f, Not):
            return self._exact_here(f.body, exact)
        if isinstance(f, (And, Or)):
            return self._exact_here(f.left, exact) and self._exact_here(f.right, exact)
        pat = _leq_bound(f)
        if pat is None:
            return False  # unbounded quantifier: truncated
        var, bound_t, _, _ = pat
        try:
            limit = eval_term(bound_t, {})
        except (EvalError, ValueError):
            return False
        if limit > self.bound:
            return False
        for n in range(limit + 1):
            inst = substitute(f.body, var, numeral(n))
            code = encode(inst)
            if code not in self.sentences or not exact[code]:
                return False
        return True


def _children(f: Formula, bound: int) -> List[Formula]:
    if isinstance(f, Eq):
        return []
    if isinstance(f, Tr):
        try:
            ref = eval_term(f.arg, {})
        except (EvalError, ValueError):
            return []
        g = coding.decode_formula(ref)
        if g is not None and is_closed(g):
            return [g]
        return []
    if isinstance(f, Not):
        return [f.body]
    if isinstance(f, (And, Or)):
        return [f.left, f.right]
    return [substitute(f.body, f.var, numeral(n)) for n in range(bound + 1)]


@dataclass
class Valuation:
    universe: Universe
    values: Dict[int, FourValue]

    def value_of(self, f: Formula) -> FourValue:
        return self.values[encode(f)]

    def leq_info(self, other: "Valuation") -> bool:
        return all(v.leq_info(other.values[c]) for c, v in self.values.items())


def all_n(u: Universe) -> Valuation:
    return Valuation(u, {code: VN for code in u.sentences})


def _eval(f: Formula, v: Valuation) -> FourValue:
    if isinstance(f, Eq):
        try:
            return VT if eval_term(f.left, {}) == eval_term(f.right, {}) else VF
        except (EvalError, ValueError):
            return VN
    if isinstance(f, Tr):
        try:
            ref = eval_term(f.arg, {})
        except (EvalError, ValueError):
            return VF
        if not sent_lt(ref):
            return VF
        if ref in v.values:
            return v.values[ref]
        return VN
    if isinstance(f, Not):
        return v_not(_eval(f.body, v))
    if isinstance(f, And):
        return v_and(_eval(f.left, v), _eval(f.right, v))
    if isinstance(f, Or):
        return v_or(_eval(f.left, v), _eval(f.right, v))
    # quantifiers range over the instances present in the universe
    out = None
    op = v_and if isinstance(f, All) else v_or
    for n in range(v.universe.bound + 1):
        inst = _eval(substitute(f.body, f.var, numeral(n)), v)
        out = inst if out is None else op(out, inst)
    return out if out is not None else (VT if isinstance(f, All) else VF)


def jump(v: Valuation) -> Valuation:
    return Valuation(v.universe,
                     {code: _eval(f, v) for code, f in v.universe.sentences.items()})


def lfp(u: Universe, trace: Optional[List[Valuation]] = None) -> Valuation:
    v = all_n(u)
    for _ in range(2 * len(u.sentences) + 2):
        if trace is not None:
            trace.append(v)
        nxt = jump(v)
        if nxt.values == v.values:
            return v
        v = nxt
    raise RuntimeError("fixed point iteration did not stabilize")


def satisfies(v: Valuation, s: Sequent) -> Optional[bool]:
    """Double-clause satisfaction; None when some formula is not an exact
    member of the universe."""
    for f in s.ante + s.succ:
        if not is_closed(f):
            return None
        code = encode(f)
        if code not in v.universe.sentences or not v.universe.exact.get(code):
            return None
    ante = [v.value_of(f) for f in s.ante]
    succ = [v.value_of(f) for f in s.succ]
    clause1 = (not all(a.true_ for a in ante)) or any(b.true_ for b in succ)
    clause2 = (not all(b.false_ for b in succ)) or any(a.false_ for a in ante)
    return clause1 and clause2


@dataclass
class AuditEntry:
    name: str
    sequent: Sequent
    verdict: Optional[bool]


@dataclass
class AuditReport:
    entries: List[AuditEntry]

    @property
    def violations(self) -> List[AuditEntry]:
        return [e for e in self.entries if e.verdict is False]

    @property
    def evaluated(self) -> int:
        return sum(1 for e in self.entries if e.verdict is not None)

    def lines(self) -> List[str]:
        out = []
        for e in self.entries:
            tag = {True: "satisfied", False: "VIOLATION", None: "undetermined"}[e.verdict]
            out.append(f"{tag:12} {e.name}: {pprint(e.sequent)}")
        return out


def audit(named_sequents: Iterable[Tuple[str, Sequent]], u: Universe) -> AuditReport:
    """Fixed-point soundness audit: every evaluable end-sequent must hold."""
    v = lfp(u)
    entries = [AuditEntry(name, s, satisfies(v, s)) for name, s in named_sequents]
    return AuditReport(entries)


# ------------------------------------------------ propositional brute force


def eval_prop(f: Formula, assign: Mapping[Formula, FourValue]) -> FourValue:
    if isinstance(f, (Eq, Tr)):
        return assign[f]
    if isinstance(f, Not):
        return v_not(eval_prop(f.body, assign))
    if isinstance(f, And):
        return v_and(eval_prop(f.left, assign), eval_prop(f.right, assign))
    if isinstance(f, Or):
        return v_or(eval_prop(f.left, assign), eval_prop(f.right, assign))
    raise ValueError("propositional fragment only")


def prop_satisfies(s: Sequent, assign: Mapping[Formula, FourValue]) -> bool:
    ante = [eval_prop(f, assign) for f in s.ante]
    succ = [eval_prop(f, assign) for f in s.succ]
    clause1 = (not all(a.true_ for a in ante)) or any(b.true_ for b in succ)
    clause2 = (not all(b.false_ for b in succ)) or any(a.false_ for a in ante)
    return clause1 and clause2


def prop_valid(s: Sequent, atoms: Tuple[Formula, ...]) -> bool:
    """Exhaustive four-valued validity over the given atoms."""
    from itertools import product
    for combo in product(VALUES, repeat=len(atoms)):
        if not prop_satisfies(s, dict(zip(atoms, combo))):
            return False
    return True


# ------------------------------------------------------------- liar helpers


def liar_universe(bound: int = 6) -> Tuple[Universe, Formula]:
    from .theories import diagonal
    from .syntax import Var
    lam, _, _ = diagonal(Not(Tr(Var(coding.DESIGNATED_VAR))))
    seeds = [lam, Not(lam), Tr(coding.corner(lam)), Not(Tr(coding.corner(lam)))]
    return Universe.build(seeds, bound), lam


def truth_teller(bound: int = 6) -> Tuple[Universe, Formula]:
    from .theories import diagonal
    from .syntax import Var
    tau, _, _ = diagonal(Tr(Var(coding.DESIGNATED_VAR)))
    return Universe.build([tau], bound), tau

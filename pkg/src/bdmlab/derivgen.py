"""Generators that construct the stock derivations as checkable fixtures.

Everything here is assembled from kernel node builders plus theory initial
sequents, so a generator bug surfaces as a kernel check failure. Covered:
excluded middle for arithmetical formulas, uniform truth sequents via sequent
reflection over closed-instance families, compositional and quantifier truth
sequents, full induction as a reflected admissible rule, and the
transfinite-induction ladders with their stage discipline.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from . import coding, kernel
from . import ordinals as O
from .coding import DESIGNATED_VAR, corner, embed, encode
from .kernel import (
    Derivation, ax, cut2, explode, init, lall, land, lex, lor, lw, node, rall,
    rand, rex, ror, rw, substitute_derivation, weaken, weaken_to,
)
from .ordinals import Ord
from .reflection import (
    AdmissibleRuleEntry, ChainRegistry, OmegaTheory, PrCertificate,
    StagedTheory, certify_pr, iterate, pack_subst, register_admissible,
    union_omega,
)
from .syntax import (
    All, And, App, Eq, Ex, Formula, Not, ONE_T, Or, Sequent, Term, Tr, Var,
    Zero, classify, free_vars, fresh_var, numeral, numeral_value, pprint,
    sequent, sequent_vars, subst, subst_sequent, substitute, term_subst,
)
from .theories import (
    BaseTheory, C0, C1, CV, EW, TV, basic, ct_atom, pkf, prec_atom,
    sent_atom, ts0, uts0, uniform_template,
)

A0_TRUE = Eq(Zero(), Zero())

# Reserved generator variable names; formulas fed to the ladder generators
# must avoid them.
VAR_H, VAR_XK, VAR_U, VAR_W, VAR_ZB, VAR_EL = "h", "xk", "u", "uw", "z", "z1"


@dataclass
class Fixture:
    name: str
    theory_id: str
    derivation: Derivation
    stage: Optional[int] = None  # tag for the omega union
    expected: str = "accepted"
    note: str = ""


def all_vars(f: Formula) -> frozenset:
    out = set(free_vars(f))
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (All, Ex)):
            out.add(g.var)
            stack.append(g.body)
        elif isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, (And, Or)):
            stack.extend((g.left, g.right))
    return frozenset(out)


# ------------------------------------------------------- basic machinery


def eqdec_em(atom: Formula) -> Derivation:
    return init(sequent([], [atom, Not(atom)]))


def arith_em(a: Formula) -> Derivation:
    """=> A, ~A for arithmetical A, atoms discharged by decidable identity."""

    def lookup(atom: Formula) -> Derivation:
        if isinstance(atom, Eq):
            return eqdec_em(atom)
        raise kernel.MissingAtomCertificate(pprint(atom))

    return kernel.em_formula(a, lookup)


def flip_eq(eq_deriv: Derivation) -> Derivation:
    """From => s = t derive => t = s."""
    eqn = eq_deriv.conclusion.succ[0]
    s, t = eqn.left, eqn.right
    sym = init(sequent([eqn, Eq(s, s)], [Eq(t, s)]))
    refl = init(sequent([], [Eq(s, s)]))
    bridged = cut2(refl, sym, Eq(s, s))
    return cut2(eq_deriv, bridged, eqn)


def rewrite_right(d: Derivation, old_f: Formula, new_f: Formula,
                  s: Term, t: Term, eq: Optional[Derivation] = None) -> Derivation:
    """Replace old_f by new_f in the succedent; new_f is old_f with some
    s-occurrences turned into t, and => s = t is derivable (initial by
    default)."""
    eq = eq if eq is not None else init(sequent([], [Eq(s, t)]))
    conv = init(sequent([Eq(s, t), old_f], [new_f]))
    bridge = cut2(eq, conv, Eq(s, t))
    return cut2(d, bridge, old_f)


def rewrite_left(d: Derivation, old_f: Formula, new_f: Formula,
                 s: Term, t: Term, eq: Optional[Derivation] = None) -> Derivation:
    """Replace old_f by new_f in the antecedent; old_f is new_f with some
    s-occurrences turned into t, and => s = t is derivable."""
    eq = eq if eq is not None else init(sequent([], [Eq(s, t)]))
    conv = init(sequent([Eq(s, t), new_f], [old_f]))
    bridge = cut2(eq, conv, Eq(s, t))
    return cut2(bridge, d, old_f)


def refute(atom: Formula, ante: Iterable[Formula] = (),
           succ: Iterable[Formula] = ()) -> Derivation:
    """atom, Gamma => Delta for a false closed arithmetical atom."""
    to_neg = weaken(init(sequent([], [Not(atom)])), [A0_TRUE])
    a_implies = node(sequent([atom], [Not(A0_TRUE)]), "cp2", (to_neg,))
    blow = node(sequent([Not(A0_TRUE)], []), "cp1",
                (init(sequent([], [A0_TRUE])),))
    core = cut2(a_implies, blow, Not(A0_TRUE))
    return weaken(core, ante, succ)


def em_guard(core: Derivation, atom: Formula) -> Derivation:
    """From atom, Gamma => Delta derive Gamma => Delta, ~atom for a
    decidable-identity atom."""
    c = core.conclusion
    gamma = c.ante_set - {atom}
    p1 = weaken(eqdec_em(atom), gamma, c.succ_set)
    p2 = weaken(core, (), [Not(atom)])
    return cut2(p1, p2, atom)


# --------------------------------------------------- bounded quantification


def ball(a: Formula, xa: str, bound: Term, zb: str = VAR_ZB) -> All:
    return All(zb, Or(Not(prec_atom(Var(zb), bound)), substitute(a, xa, Var(zb))))


def from_ball(a: Formula, xa: str, bound: Term, zb: str = VAR_ZB,
              elem: Optional[str] = None) -> Derivation:
    """prec(e, bound), ball => A(e) for the element variable e."""
    e = elem or zb
    az = substitute(a, xa, Var(e))
    patom = prec_atom(Var(e), bound)
    case_neg = explode(eqdec_em(patom), patom, (), [az])
    case_pos = weaken(ax(az), [patom])
    disj = lor(case_neg, case_pos, Or(Not(patom), az))
    return lall(disj, ball(a, xa, bound, zb), Var(e))


def bounded_gen(core: Derivation, a: Formula, xa: str, bound: Term,
                zb: str = VAR_ZB, elem: Optional[str] = None) -> Derivation:
    """From prec(e, bound), Gamma => A(e) derive Gamma => ball(a, bound);
    e must not occur free in Gamma or the bound."""
    e = elem or zb
    az = substitute(a, xa, Var(e))
    patom = prec_atom(Var(e), bound)
    step = em_guard(core, patom)
    disj = ror(step, Or(Not(patom), az))
    target = ball(a, xa, bound, zb)
    if substitute(target.body, zb, Var(e)) != Or(Not(patom), az):
        raise ValueError("bound or formula captures the element variable")
    return rall(disj, target, e)


# --------------------------------------------------- closed truth instances


def ts_t1(sentence: Formula) -> Derivation:
    return init(sequent([Tr(corner(sentence))], [sentence]))


def ts_t2(sentence: Formula) -> Derivation:
    return init(sequent([sentence], [Tr(corner(sentence))]))


# ------------------------------------------------------------ excluded middle


def gen_em_arithmetical(a: Formula) -> Fixture:
    if "arithmetical" not in classify(a):
        raise ValueError("excluded middle generator needs an arithmetical formula")
    if free_vars(a):
        raise ValueError("excluded middle generator needs a closed formula")
    return Fixture(f"em[{pprint(a)}]", "TS0", arith_em(a),
                   note="decidable-base excluded middle")


# ----------------------------------------------- uniform truth via reflection


def uts_closed_instance(a: Formula, env: Mapping[str, int], direction: str) -> Derivation:
    variables = sorted(free_vars(a))
    values = {v: numeral(env.get(v, 0)) for v in variables}
    inst = subst(a, values)
    tmpl_inst = term_subst(uniform_template(a), values)
    cq = corner(inst)
    if direction == "down":
        return rewrite_left(ts_t1(inst), Tr(cq), Tr(tmpl_inst), tmpl_inst, cq)
    return rewrite_right(ts_t2(inst), Tr(cq), Tr(tmpl_inst), cq, tmpl_inst)


def uts_cert(chain: StagedTheory, a: Formula, direction: str,
             rng: Optional[random.Random] = None) -> PrCertificate:
    name = f"uts-{direction}[{pprint(a)}]"
    if name in chain.registry.certs:
        return chain.registry.certs[name]
    tmpl = uniform_template(a)
    template = sequent([Tr(tmpl)], [a]) if direction == "down" \
        else sequent([a], [Tr(tmpl)])

    def builder(env: Mapping[str, int]) -> Derivation:
        return uts_closed_instance(a, env, direction)

    cert = certify_pr(chain.base, builder, name, template=template,
                      variables=sorted(free_vars(a)), rng=rng,
                      note="uniform truth from closed instances")
    return chain.registry.add_cert(cert)


def quote_cert(chain: StagedTheory, sentence: Formula, direction: str) -> PrCertificate:
    """One-node certificate for a closed truth sequent of the base theory."""
    name = f"ts-{direction}[{pprint(sentence)}]"
    if name in chain.registry.certs:
        return chain.registry.certs[name]
    witness = ts_t1(sentence) if direction == "down" else ts_t2(sentence)
    cert = certify_pr(chain.base, witness, name, samples=1)
    return chain.registry.add_cert(cert)


def r_step(cert: PrCertificate, values: Optional[Mapping[str, Term]] = None) -> Derivation:
    full = {v: Var(v) for v in cert.variables}
    full.update(values or {})
    return node(subst_sequent(cert.template, full), "r",
                cert=cert.name, subst=pack_subst(full))


def R_step(entry: AdmissibleRuleEntry, premise: Derivation,
           values: Optional[Mapping[str, Term]] = None) -> Derivation:
    full = {v: Var(v) for v in entry.variables}
    full.update(values or {})
    return node(subst_sequent(entry.conclusion_template, full), "R", (premise,),
                cert=entry.name, subst=pack_subst(full))


def gen_uts0_from_r(chain: StagedTheory, a: Formula,
                    rng: Optional[random.Random] = None) -> Tuple[Fixture, Fixture]:
    down = r_step(uts_cert(chain, a, "down", rng))
    up = r_step(uts_cert(chain, a, "up", rng))
    label = pprint(a)
    return (Fixture(f"uniform-down[{label}]", chain.name, down, stage=chain.stage),
            Fixture(f"uniform-up[{label}]", chain.name, up, stage=chain.stage))


# ------------------------------------------------------ compositional truth


def _sentence(m: int) -> Optional[Formula]:
    f = coding.decode_formula(m)
    if f is not None and not free_vars(f):
        return f
    return None


def comp_template(op: str, direction: int) -> Tuple[Sequent, Tuple[str, ...]]:
    x, y = Var("x"), Var("y")
    if op in ("and", "or"):
        fn = "cand" if op == "and" else "cor"
        compound = App(fn, (x, y))
        joined = (And if op == "and" else Or)(Tr(x), Tr(y))
        if direction == 1:
            return sequent([sent_atom(compound), joined], [Tr(compound)]), ("x", "y")
        return sequent([sent_atom(compound), Tr(compound)], [joined]), ("x", "y")
    if op == "neg":
        comp = App("cneg", (x,))
        if direction == 1:
            return sequent([sent_atom(x), Tr(comp)], [Not(Tr(x))]), ("x",)
        return sequent([sent_atom(x), Not(Tr(x))], [Tr(comp)]), ("x",)
    if op == "eq":
        veq = Eq(App("val", (x,)), App("val", (y,)))
        comp = App("ceq", (x, y))
        if direction == 1:
            return sequent([ct_atom(x), ct_atom(y), veq], [Tr(comp)]), ("x", "y")
        return sequent([ct_atom(x), ct_atom(y), Tr(comp)], [veq]), ("x", "y")
    if op == "tt":
        tmpl = App("sub", (TV, CV, App("num", (x,))))
        if direction == 1:
            return sequent([Tr(tmpl)], [Tr(x)]), ("x",)
        return sequent([Tr(x)], [Tr(tmpl)]), ("x",)
    raise ValueError(f"unknown compositional schema {op!r}")


def _not_tr_to_tr_neg(a: Formula) -> Derivation:
    """~A => ~T(corner A) for a sentence A."""
    dn = kernel.dneg_elim(Tr(corner(a)))
    chained = cut2(dn, ts_t1(a), Tr(corner(a)))       # ~~T(corner) => A
    return node(sequent([Not(a)], [Not(Tr(corner(a)))]), "cp1", (chained,))


def _tr_neg_to_not(a: Formula) -> Derivation:
    """~T(corner A) => ~A for a sentence A."""
    dn = kernel.dneg_elim(a)
    chained = cut2(dn, ts_t2(a), a)                   # ~~A => T(corner)
    return node(sequent([Not(Tr(corner(a)))], [Not(a)]), "cp1", (chained,))


def comp_instance(op: str, direction: int, env: Mapping[str, int]) -> Derivation:
    """Closed instance of a compositional truth sequent, derivable from the
    closed truth sequents; guard atoms that fail get the refutation route."""
    template, variables = comp_template(op, direction)
    values = {v: numeral(env.get(v, 0)) for v in variables}
    target = subst_sequent(template, values)
    m, n = env.get("x", 0), env.get("y", 0)

    def finish(core: Derivation) -> Derivation:
        return weaken_to(core, target.ante_set, target.succ_set)

    def bail(guard: Formula) -> Derivation:
        return refute(guard, target.ante_set - {guard}, target.succ_set)

    if op in ("and", "or"):
        fn = "cand" if op == "and" else "cor"
        comp_term = App(fn, (numeral(m), numeral(n)))
        guard = sent_atom(comp_term)
        fa, fb = _sentence(m), _sentence(n)
        if fa is None or fb is None:
            return bail(guard)
        compound = (And if op == "and" else Or)(fa, fb)
        ca, cb, cc = corner(fa), corner(fb), corner(compound)
        if op == "and":
            if direction == 1:
                both = rand(ts_t1(fa), ts_t1(fb), compound)      # T,T => fa&fb
                quoted = cut2(both, ts_t2(compound), compound)
                folded = land(quoted, And(Tr(ca), Tr(cb)))
                done = rewrite_right(folded, Tr(cc), Tr(comp_term), cc, comp_term)
            else:
                da = cut2(land(weaken(ax(fa), [fb]), compound), ts_t2(fa), fa)
                db = cut2(land(weaken(ax(fb), [fa]), compound), ts_t2(fb), fb)
                both = rand(da, db, And(Tr(ca), Tr(cb)))         # fa&fb => T&T
                pre = cut2(ts_t1(compound), both, compound)
                done = rewrite_left(pre, Tr(cc), Tr(comp_term), comp_term, cc)
            return finish(done)
        if direction == 1:
            pa = cut2(cut2(ts_t1(fa), ror(rw(ax(fa), fb), compound), fa),
                      ts_t2(compound), compound)                 # T(ca) => T(cc)
            pb = cut2(cut2(ts_t1(fb), ror(rw(ax(fb), fa), compound), fb),
                      ts_t2(compound), compound)
            folded = lor(pa, pb, Or(Tr(ca), Tr(cb)))
            done = rewrite_right(folded, Tr(cc), Tr(comp_term), cc, comp_term)
        else:
            pa = ror(rw(ts_t2(fa), Tr(cb)), Or(Tr(ca), Tr(cb)))  # fa => T|T
            pb = ror(rw(ts_t2(fb), Tr(ca)), Or(Tr(ca), Tr(cb)))
            split = lor(pa, pb, compound)                        # fa|fb => T|T
            pre = cut2(ts_t1(compound), split, compound)
            done = rewrite_left(pre, Tr(cc), Tr(comp_term), comp_term, cc)
        return finish(done)

    if op == "neg":
        comp_term = App("cneg", (numeral(m),))
        guard = sent_atom(numeral(m))
        fa = _sentence(m)
        if fa is None:
            return bail(guard)
        cneg_corner = corner(Not(fa))
        if direction == 1:
            core = cut2(ts_t1(Not(fa)), _not_tr_to_tr_neg(fa), Not(fa))
            done = rewrite_left(core, Tr(cneg_corner), Tr(comp_term),
                                comp_term, cneg_corner)
        else:
            core = cut2(_tr_neg_to_not(fa), ts_t2(Not(fa)), Not(fa))
            done = rewrite_right(core, Tr(cneg_corner), Tr(comp_term),
                                 cneg_corner, comp_term)
        return finish(done)

    if op == "eq":
        comp_term = App("ceq", (numeral(m), numeral(n)))
        ta = coding.decode_term(m) if coding.cl_term(m) else None
        tb = coding.decode_term(n) if coding.cl_term(n) else None
        if ta is None:
            return bail(ct_atom(numeral(m)))
        if tb is None:
            return bail(ct_atom(numeral(n)))
        e = Eq(ta, tb)
        veq = Eq(App("val", (numeral(m),)), App("val", (numeral(n),)))
        equal = coding.eval_term(ta, {}) == coding.eval_term(tb, {})
        if direction == 1:
            if not equal:
                return bail(veq)
            quoted = cut2(init(sequent([], [e])), ts_t2(e), e)   # => T(corner e)
            done = rewrite_right(quoted, Tr(corner(e)), Tr(comp_term),
                                 corner(e), comp_term)
            return finish(done)
        if equal:
            return finish(init(sequent([], [veq])))
        spill = cut2(ts_t1(e), refute(e, (), [veq]), e)          # T(corner e) => veq
        done = rewrite_left(spill, Tr(corner(e)), Tr(comp_term),
                            comp_term, corner(e))
        return finish(done)

    # op == "tt": truth iteration
    tsent = Tr(numeral(m))
    sub_term = App("sub", (TV, CV, App("num", (numeral(m),))))
    if direction == 1:
        done = rewrite_left(ts_t1(tsent), Tr(corner(tsent)), Tr(sub_term),
                            sub_term, corner(tsent))
    else:
        done = rewrite_right(ts_t2(tsent), Tr(corner(tsent)), Tr(sub_term),
                             corner(tsent), sub_term)
    return finish(done)


COMP_OPS = ("eq", "tt", "and", "or", "neg")


def _comp_envs() -> List[Dict[str, int]]:
    v = Var(DESIGNATED_VAR)
    sents = [encode(Eq(Zero(), Zero())), encode(Tr(numeral(2))),
             encode(Not(Eq(numeral(2), numeral(3)))),
             encode(All("x", Eq(Var("x"), Var("x"))))]
    terms = [encode(Zero()), encode(numeral(5)),
             encode(App("add", (numeral(2), numeral(3))))]
    open_f = encode(Eq(Var("x"), Zero()))
    envs = []
    for x in sents[:2] + [open_f, 7] + terms[:1]:
        for y in sents[1:3] + terms[1:2]:
            envs.append({"x": x, "y": y})
    return envs


def comp_cert(chain: StagedTheory, op: str, direction: int,
              rng: Optional[random.Random] = None) -> PrCertificate:
    name = f"comp-{op}{direction}"
    if name in chain.registry.certs:
        return chain.registry.certs[name]
    template, variables = comp_template(op, direction)

    def builder(env: Mapping[str, int]) -> Derivation:
        return comp_instance(op, direction, env)

    cert = certify_pr(chain.base, builder, name, template=template,
                      variables=variables, rng=rng, extra_envs=_comp_envs(),
                      note="compositional truth from closed instances")
    return chain.registry.add_cert(cert)


def gen_compositional(chain: StagedTheory, op: str,
                      rng: Optional[random.Random] = None) -> List[Fixture]:
    out = []
    for direction in (1, 2):
        cert = comp_cert(chain, op, direction, rng)
        out.append(Fixture(f"comp-{op}{direction}", chain.name, r_step(cert),
                           stage=chain.stage))
    return out


# -------------------------------------------------------- quantifier truth


def _q_hyp(m_term: Term, bound_var: str = "y") -> Term:
    return App("sub", (m_term, CV, App("num", (Var(bound_var),))))


def quant_template(op: str, direction: int) -> Tuple[Sequent, Tuple[str, ...]]:
    x = Var("x")
    fn = "call" if op == "all" else "cex"
    comp = App(fn, (CV, x))
    body = Tr(_q_hyp(x))
    hyp = All("y", body) if op == "all" else Ex("y", body)
    if direction == 1:
        return sequent([sent_atom(comp), hyp], [Tr(comp)]), ("x",)
    return sequent([sent_atom(comp), Tr(comp)], [hyp]), ("x",)


def _vac_cert(chain: StagedTheory, m: int, quant: Formula, closed_f: Formula,
              op: str, rng) -> PrCertificate:
    """For closed bodies: each vacuous template instance follows from the
    quoted quantified sentence (universal) or entails it (existential)."""
    name = f"vac-{op}[{m}]"
    if name in chain.registry.certs:
        return chain.registry.certs[name]
    mbar = numeral(m)
    tmpl_y = _q_hyp(mbar)
    if op == "all":
        template = sequent([Tr(corner(quant))], [Tr(tmpl_y)])
    else:
        template = sequent([Tr(tmpl_y)], [Tr(corner(quant))])

    def builder(env: Mapping[str, int]) -> Derivation:
        k = env.get("y", 0)
        inst_term = App("sub", (mbar, CV, App("num", (numeral(k),))))
        if op == "all":
            use = lall(ax(closed_f), quant, Zero())           # univ => F
            woven = cut2(cut2(ts_t1(quant), use, quant),
                         ts_t2(closed_f), closed_f)           # T(univ) => T(F)
            return rewrite_right(woven, Tr(corner(closed_f)), Tr(inst_term),
                                 corner(closed_f), inst_term)
        intro = rex(ax(closed_f), quant, Zero())              # F => ex
        woven = cut2(cut2(ts_t1(closed_f), intro, closed_f),
                     ts_t2(quant), quant)                     # T(F) => T(ex)
        return rewrite_left(woven, Tr(corner(closed_f)), Tr(inst_term),
                            inst_term, corner(closed_f))

    cert = certify_pr(chain.base, builder, name, template=template,
                      variables=("y",), rng=rng)
    return chain.registry.add_cert(cert)


def quant_instance(chain: StagedTheory, op: str, direction: int, m: int,
                   rng: Optional[random.Random] = None) -> Derivation:
    """Stage-1 derivation of the closed instance of a quantifier truth
    sequent, using sequent reflection for the uniform truth steps."""
    template, _ = quant_template(op, direction)
    values = {"x": numeral(m)}
    target = subst_sequent(template, values)
    mbar = numeral(m)
    fn = "call" if op == "all" else "cex"
    comp_term = App(fn, (CV, mbar))
    guard = sent_atom(comp_term)

    def finish(core: Derivation) -> Derivation:
        return weaken_to(core, target.ante_set, target.succ_set)

    f = coding.decode_formula(m)
    if f is None or not free_vars(f) <= {DESIGNATED_VAR}:
        return refute(guard, target.ante_set - {guard}, target.succ_set)
    quant = (All if op == "all" else Ex)(DESIGNATED_VAR, f)
    uniform = free_vars(f) == {DESIGNATED_VAR}
    y = fresh_var(all_vars(f) | {DESIGNATED_VAR, "x"}, "y")
    hyp_body = Tr(_q_hyp(mbar, "y"))
    hyp = All("y", hyp_body) if op == "all" else Ex("y", hyp_body)
    cq = corner(quant)
    inst0 = App("sub", (mbar, CV, App("num", (Zero(),))))

    if op == "all" and direction == 1:
        if uniform:
            d1 = r_step(uts_cert(chain, f, "down", rng), {DESIGNATED_VAR: Var(y)})
            d2 = lall(d1, All("y", hyp_body), Var(y))
            d3 = rall(d2, quant, y)
        else:
            unquote = r_step(quote_cert(chain, f, "down"))    # T(corner F) => F
            use = rewrite_left(unquote, Tr(corner(f)), Tr(inst0),
                               inst0, corner(f))              # T(sub@0) => F
            gen = rall(ax(f), quant, DESIGNATED_VAR)          # F => univ
            c1 = cut2(use, gen, f)
            d3 = lall(c1, All("y", hyp_body), Zero())
        d4 = cut2(d3, r_step(quote_cert(chain, quant, "up")), quant)
        done = rewrite_right(d4, Tr(cq), Tr(comp_term), cq, comp_term)
        return finish(done)

    if op == "all" and direction == 2:
        if uniform:
            fy = substitute(f, DESIGNATED_VAR, Var(y))
            d1 = r_step(quote_cert(chain, quant, "down"))
            d2 = lall(ax(fy), quant, Var(y))
            d3 = r_step(uts_cert(chain, f, "up", rng), {DESIGNATED_VAR: Var(y)})
            c = cut2(cut2(d1, d2, quant), d3, fy)
            g = rall(c, hyp, y)
        else:
            vac = _vac_cert(chain, m, quant, f, "all", rng)
            g = rall(r_step(vac, {"y": Var(y)}), hyp, y)
        done = rewrite_left(g, Tr(cq), Tr(comp_term), comp_term, cq)
        return finish(done)

    if op == "ex" and direction == 1:
        if uniform:
            fy = substitute(f, DESIGNATED_VAR, Var(y))
            d1 = r_step(uts_cert(chain, f, "down", rng), {DESIGNATED_VAR: Var(y)})
            d2 = rex(ax(fy), quant, Var(y))
            d3 = cut2(cut2(d1, d2, fy),
                      r_step(quote_cert(chain, quant, "up")), quant)
            g = lex(d3, hyp, y)
        else:
            vac = _vac_cert(chain, m, quant, f, "ex", rng)
            g = lex(r_step(vac, {"y": Var(y)}), hyp, y)
        done = rewrite_right(g, Tr(cq), Tr(comp_term), cq, comp_term)
        return finish(done)

    # op == "ex", direction == 2
    if uniform:
        fy = substitute(f, DESIGNATED_VAR, Var(y))
        d1 = r_step(uts_cert(chain, f, "up", rng), {DESIGNATED_VAR: Var(y)})
        d2 = rex(d1, hyp, Var(y))
        d3 = lex(d2, quant, y)
        d4 = cut2(r_step(quote_cert(chain, quant, "down")), d3, quant)
    else:
        use = lex(ax(f), quant, y)                            # ex => F
        quoted = cut2(r_step(quote_cert(chain, quant, "down")), use, quant)
        up = cut2(quoted, r_step(quote_cert(chain, f, "up")), f)
        conv = rewrite_right(up, Tr(corner(f)), Tr(inst0), corner(f), inst0)
        d4 = rex(conv, hyp, Zero())
    done = rewrite_left(d4, Tr(cq), Tr(comp_term), comp_term, cq)
    return finish(done)


def _quant_envs() -> List[Dict[str, int]]:
    v = Var(DESIGNATED_VAR)
    return [{"x": encode(Eq(v, v))},
            {"x": encode(Tr(v))},
            {"x": encode(Eq(Zero(), Zero()))},
            {"x": encode(Eq(Var("x"), v))},
            {"x": 9}]


def quant_cert(chain2: StagedTheory, op: str, direction: int,
               rng: Optional[random.Random] = None) -> PrCertificate:
    name = f"quant-{op}{direction}"
    if name in chain2.registry.certs:
        return chain2.registry.certs[name]
    template, variables = quant_template(op, direction)
    stage1 = chain2.at_stage(1)

    def builder(env: Mapping[str, int]) -> Derivation:
        return quant_instance(stage1, op, direction, env.get("x", 0), rng)

    cert = certify_pr(stage1, builder, name, template=template,
                      variables=variables, rng=rng, extra_envs=_quant_envs(),
                      note="quantifier truth over stage-1 instances")
    return chain2.registry.add_cert(cert)


def gen_quantifier_sequents(chain2: StagedTheory,
                            rng: Optional[random.Random] = None) -> List[Fixture]:
    out = []
    for op in ("all", "ex"):
        for direction in (1, 2):
            cert = quant_cert(chain2, op, direction, rng)
            out.append(Fixture(f"quant-{op}{direction}", chain2.name,
                               r_step(cert), stage=chain2.stage))
    return out


# ------------------------------------------------------------ full induction


def make_induction_entry(name: str, discipline, check_theory, b: Formula,
                         ind_var: str, sample_premise: Derivation,
                         ctx_ante: Tuple[Formula, ...] = (),
                         ctx_succ: Tuple[Formula, ...] = (),
                         w_var: str = VAR_W) -> AdmissibleRuleEntry:
    """Finite-unfolding transformer for the induction rule on b (free
    ind_var); the conclusion template carries the fresh target variable."""
    ctx_vars = set()
    for g in ctx_ante + ctx_succ:
        ctx_vars |= free_vars(g)
        if ind_var in free_vars(g):
            raise ValueError("induction variable occurs in a side formula")
    w = w_var
    if w in free_vars(b) | ctx_vars | {ind_var}:
        w = fresh_var(free_vars(b) | ctx_vars | {ind_var}, w_var)
    b_succ = substitute(b, ind_var, App("add", (Var(ind_var), ONE_T)))
    b0 = substitute(b, ind_var, Zero())
    bw = substitute(b, ind_var, Var(w))
    premise_template = sequent(ctx_ante + (b,), ctx_succ + (b_succ,))
    conclusion_template = sequent(ctx_ante + (b0,), ctx_succ + (bw,))
    variables = tuple(sorted(sequent_vars(premise_template)
                             | sequent_vars(conclusion_template) | {w}))

    def transformer(d: Derivation, values: Mapping[str, Term]) -> Derivation:
        n = numeral_value(values.get(w, Var(w)))
        if n is None:
            raise ValueError("induction unfolds only at numeral targets")
        rest = {k: v for k, v in values.items() if k not in (ind_var, w)}
        d0 = substitute_derivation(d, rest, check_theory)
        b_r = subst(b, rest)
        gamma = [subst(g, rest) for g in ctx_ante]
        delta = [subst(g, rest) for g in ctx_succ]

        def b_at(t: Term) -> Formula:
            return substitute(b_r, ind_var, t)

        cur = weaken(ax(b_at(Zero())), gamma, delta)
        for k in range(n):
            dk = substitute_derivation(d0, {ind_var: numeral(k)}, check_theory)
            old = b_at(App("add", (numeral(k), ONE_T)))
            new = b_at(numeral(k + 1))
            if old != new:
                dk = rewrite_right(dk, old, new,
                                   App("add", (numeral(k), ONE_T)), numeral(k + 1))
            cur = cut2(cur, dk, b_at(numeral(k)))
        return cur

    return AdmissibleRuleEntry(name, discipline, variables, premise_template,
                               conclusion_template, transformer, sample_premise,
                               note="finite unfolding of the induction rule")


def induction_entry(chain: StagedTheory, b: Formula, ind_var: str,
                    sample_premise: Derivation, name: str,
                    ctx_ante: Tuple[Formula, ...] = (),
                    ctx_succ: Tuple[Formula, ...] = (),
                    check_stage: int = 0,
                    rng: Optional[random.Random] = None,
                    samples: int = 6) -> AdmissibleRuleEntry:
    """Register the finite-induction handle; admissibility is carried by the
    base of the chain, validation runs where the samples live."""
    if name in chain.registry.handles:
        return chain.registry.handles[name]
    check_theory = chain.base if check_stage == 0 else chain.at_stage(check_stage)
    entry = make_induction_entry(name, chain.base, check_theory, b, ind_var,
                                 sample_premise, ctx_ante, ctx_succ)
    register_admissible(check_theory, entry, samples=samples,
                        rng=rng or random.Random(11), bound=3)
    return chain.registry.add_handle(entry)


def gen_full_induction(chain: StagedTheory, a: Formula, ind_var: str,
                       premise: Derivation,
                       ctx_ante: Tuple[Formula, ...] = (),
                       ctx_succ: Tuple[Formula, ...] = (),
                       check_stage: int = 0,
                       rng: Optional[random.Random] = None) -> Fixture:
    """Full induction for the truth language as one reflected application of
    the finite-unfolding handle."""
    name = f"ind[{pprint(a)};{ind_var}]"
    entry = induction_entry(chain, a, ind_var, premise, name,
                            ctx_ante, ctx_succ, check_stage, rng)
    stage = max(check_stage, 1)
    return Fixture(f"full-ind[{pprint(a)}]", chain.at_stage(stage).name,
                   R_step(entry, premise), stage=stage)


# --------------------------------------------------- transfinite induction


def ti_rule(a: Formula, alpha: Ord) -> Tuple[Sequent, Sequent]:
    """Premise and conclusion of the transfinite induction rule for a formula
    with one free variable, up to the notation alpha."""
    fv = sorted(free_vars(a))
    if len(fv) != 1:
        raise ValueError("transfinite induction needs exactly one free variable")
    xa = fv[0]
    h = VAR_H if VAR_H not in all_vars(a) else fresh_var(all_vars(a), VAR_H)
    premise = sequent([ball(a, xa, Var(h))], [substitute(a, xa, Var(h))])
    conclusion = sequent([], [ball(a, xa, numeral(embed(alpha)))])
    return premise, conclusion


def _gn(gamma: Ord) -> Term:
    return numeral(embed(gamma))


def jump_zero(a: Formula, xa: str, step: Derivation) -> Derivation:
    """ball(a, h) => ball(a, h + 1) from the induction step derivation."""
    h, zb, el = VAR_H, VAR_ZB, VAR_EL
    hyp = ball(a, xa, Var(h), zb)
    az = substitute(a, xa, Var(el))
    ah = substitute(a, xa, Var(h))
    disj_f = Or(prec_atom(Var(el), Var(h)), Eq(Var(el), Var(h)))
    split = init(sequent([prec_atom(Var(el), App("oplus", (Var(h), C1)))],
                         [disj_f]))
    case1 = from_ball(a, xa, Var(h), zb, el)
    sym = cut2(init(sequent([], [Eq(Var(el), Var(el))])),
               init(sequent([Eq(Var(el), Var(h)), Eq(Var(el), Var(el))],
                            [Eq(Var(h), Var(el))])),
               Eq(Var(el), Var(el)))                      # el = h => h = el
    move = init(sequent([Eq(Var(h), Var(el)), ah], [az]))
    c2a = cut2(step, move, ah)                            # hyp, h = el => A(el)
    case2 = cut2(sym, c2a, Eq(Var(h), Var(el)))
    disj = lor(case1, case2, disj_f)
    core = cut2(split, disj, disj_f)
    return bounded_gen(core, a, xa, App("oplus", (Var(h), C1)), zb, el)


def jump_times_omega(chain: StagedTheory, a: Formula, xa: str,
                     djump: Derivation, gamma: Ord, check_stage: int,
                     rng: Optional[random.Random] = None) -> Derivation:
    """From the jump by gamma (schematic in h) build the jump by gamma * w:
    one reflected induction application plus the multiplicative limit split."""
    h, u, zb, el = VAR_H, VAR_U, VAR_ZB, VAR_EL
    ck = _gn(gamma)
    ck1 = _gn(O.mul_omega(gamma))
    bound_u = App("oplus", (Var(h), App("omul", (ck, Var(u)))))
    b_u = ball(a, xa, bound_u, zb)

    s1 = substitute_derivation(djump, {h: bound_u}, chain)
    mulstep_s = App("oplus", (Var(h), App("omul", (ck, App("add", (Var(u), ONE_T))))))
    mulstep_t = App("oplus", (bound_u, ck))
    old = ball(a, xa, mulstep_t, zb)
    new = ball(a, xa, mulstep_s, zb)
    flipped = flip_eq(init(sequent([], [Eq(mulstep_s, mulstep_t)])))
    s2 = rewrite_right(s1, old, new, mulstep_t, mulstep_s, eq=flipped)

    ind_name = f"ti-ind[{pprint(a)};{pprint(ck)}]"
    entry = induction_entry(chain, b_u, u, s2, ind_name,
                            check_stage=check_stage, rng=rng, samples=3)
    s3 = R_step(entry, s2)

    w = next(v for v in entry.variables
             if v not in sequent_vars(entry.premise_template))
    b0 = substitute(b_u, u, Zero())
    mul0_s = App("oplus", (Var(h), App("omul", (ck, Zero()))))
    flip0 = flip_eq(init(sequent([], [Eq(mul0_s, Var(h))])))
    s4 = rewrite_left(s3, b0, ball(a, xa, Var(h), zb), Var(h), mul0_s, eq=flip0)

    bw = substitute(b_u, u, Var(w))
    s5 = rall(s4, All(w, bw), w)

    p1 = prec_atom(Var(el), App("oplus", (Var(h), ck1)))
    omm = App("omulom", (ck,))
    p2 = prec_atom(Var(el), App("oplus", (Var(h), omm)))
    jt = App("jel", (Var(el), Var(h), ck))
    p3 = prec_atom(Var(el), App("oplus", (Var(h), App("omul", (ck, jt)))))
    eqn = Eq(ck1, omm)
    conv1 = cut2(init(sequent([], [eqn])), init(sequent([eqn, p1], [p2])), eqn)
    split = init(sequent([p2], [p3]))
    inner = from_ball(a, xa, App("oplus", (Var(h), App("omul", (ck, jt)))), zb, el)
    useall = lall(inner, All(w, bw), jt)
    c1 = cut2(split, useall, p3)
    c2 = cut2(conv1, c1, p2)
    gen = bounded_gen(c2, a, xa, App("oplus", (Var(h), ck1)), zb, el)
    return cut2(s5, gen, All(w, bw))


def finite_jump(chain: StagedTheory, a: Formula, xa: str, step: Derivation,
                k: int, rng: Optional[random.Random] = None) -> Derivation:
    """Stage-1 jump by w^k (the finite-power ladder)."""
    d = jump_zero(a, xa, step)
    for i in range(k):
        d = jump_times_omega(chain, a, xa, d, O.omega_pow(O.fin(i)),
                             check_stage=0 if i == 0 else 1, rng=rng)
    return d


def _ladder_exp(level: int, at: Term) -> Term:
    return App("oplus", (App("omul", (EW, numeral(level - 1))),
                         App("ofin", (at,))))


def ladder_handle(chain: StagedTheory, a: Formula, xa: str, step: Derivation,
                  level: int, rng: Optional[random.Random] = None) -> AdmissibleRuleEntry:
    """Level handle: from the step rule to the jump by w^(w*(level-1) + xk),
    provably admissible at that stage (the transformer is the ladder)."""
    name = f"ti-ladder-{level}[{pprint(a)}]"
    if name in chain.registry.handles:
        return chain.registry.handles[name]
    h, xk = VAR_H, VAR_XK
    bound = App("oplus", (Var(h), App("opw2", (_ladder_exp(level, Var(xk)),))))
    premise_template = sequent([ball(a, xa, Var(h))], [substitute(a, xa, Var(h))])
    conclusion_template = sequent([ball(a, xa, Var(h))], [ball(a, xa, bound)])

    memo: Dict[int, Derivation] = {}

    def build_jump(k: int) -> Derivation:
        if k in memo:
            return memo[k]
        if level == 1:
            d = jump_zero(a, xa, step) if k == 0 else jump_times_omega(
                chain, a, xa, build_jump(k - 1), O.omega_pow(O.fin(k - 1)),
                check_stage=0 if k == 1 else 1, rng=rng)
        elif k == 0:
            d = w_jump(chain, a, xa, step, level - 1, rng)
        else:
            g = O.omega_pow(O.add(O.mul_nat(O.OMEGA, level - 1), O.fin(k - 1)))
            d = jump_times_omega(chain, a, xa, build_jump(k - 1), g,
                                 check_stage=level, rng=rng)
        memo[k] = d
        return d

    def transformer(d_step: Derivation, values: Mapping[str, Term]) -> Derivation:
        k = numeral_value(values.get(xk, Var(xk)))
        if k is None:
            raise ValueError("ladder unfolds only at numeral heights")
        gamma = O.omega_pow(O.add(O.mul_nat(O.OMEGA, level - 1), O.fin(k)))
        jump = build_jump(k)
        inner = term_subst(App("opw2", (_ladder_exp(level, Var(xk)),)),
                           {xk: numeral(k)})
        conv = rewrite_right(jump,
                             ball(a, xa, App("oplus", (Var(h), _gn(gamma)))),
                             ball(a, xa, App("oplus", (Var(h), inner))),
                             _gn(gamma), inner)
        return substitute_derivation(conv, {h: values.get(h, Var(h))}, chain)

    discipline = chain.at_stage(level)
    entry = AdmissibleRuleEntry(name, discipline, (h, xk), premise_template,
                                conclusion_template, transformer, step,
                                note="transfinite induction ladder")
    register_admissible(discipline, entry, samples=2,
                        rng=rng or random.Random(13), bound=3)
    return chain.registry.add_handle(entry)


def w_jump(chain: StagedTheory, a: Formula, xa: str, step: Derivation,
           m: int, rng: Optional[random.Random] = None) -> Derivation:
    """Stage-(m+1) jump by w^(w*m): reflected ladder handle, generalization,
    and the limit split bridge."""
    h, xk, zb, el = VAR_H, VAR_XK, VAR_ZB, VAR_EL
    entry = ladder_handle(chain, a, xa, step, m, rng)
    rn = R_step(entry, step)
    body = ball(a, xa, App("oplus", (Var(h), App("opw2", (_ladder_exp(m, Var(xk)),)))))
    g = rall(rn, All(xk, body), xk)

    cwm = _gn(O.omega_pow(O.mul_nat(O.OMEGA, m)))
    lim_lhs = App("opw2", (App("omul", (EW, App("add", (numeral(m - 1), ONE_T)))),))
    p1 = prec_atom(Var(el), App("oplus", (Var(h), cwm)))
    p2 = prec_atom(Var(el), App("oplus", (Var(h), lim_lhs)))
    dt = App("dgn", (Var(el), Var(h), numeral(m - 1)))
    wit = App("opw2", (_ladder_exp(m, dt),))
    p3 = prec_atom(Var(el), App("oplus", (Var(h), wit)))
    eqn = Eq(cwm, lim_lhs)
    conv1 = cut2(init(sequent([], [eqn])), init(sequent([eqn, p1], [p2])), eqn)
    split = init(sequent([p2], [p3]))
    inner = from_ball(a, xa, App("oplus", (Var(h), wit)), zb, el)
    useall = lall(inner, All(xk, body), dt)
    c1 = cut2(split, useall, p3)
    c2 = cut2(conv1, c1, p2)
    gen2 = bounded_gen(c2, a, xa, App("oplus", (Var(h), cwm)), zb, el)
    return cut2(g, gen2, All(xk, body))


def _exponent_parts(e: Ord, max_m: int) -> Tuple[int, int]:
    """Write e = w*m + k with k finite (raises for other shapes)."""
    m = 0
    for j in range(max_m, 0, -1):
        if O.compare(O.mul_nat(O.OMEGA, j), e) in (O.LESS, O.EQUAL):
            m = j
            break
    tail = O.subtract(e, O.mul_nat(O.OMEGA, m))
    k = O.nat_of(tail) if tail is not None else None
    if k is None:
        raise ValueError("unsupported exponent shape for this release")
    return m, k


def gen_ti(chain: StagedTheory, a: Formula, alpha: Ord, stage: int,
           step: Derivation, rng: Optional[random.Random] = None) -> Fixture:
    """Fixture concluding transfinite induction up to alpha from the supplied
    step derivation, by composing the jump ladders at the requested stage."""
    fv = sorted(free_vars(a))
    if len(fv) != 1:
        raise ValueError("transfinite induction needs one free variable")
    xa = fv[0]
    reserved = {VAR_H, VAR_XK, VAR_U, VAR_W, VAR_ZB, VAR_EL}
    if all_vars(a) & reserved:
        raise ValueError(f"formula uses reserved ladder variables {sorted(reserved)}")
    cap = O.omega_pow(O.mul_nat(O.OMEGA, stage))
    if O.compare(alpha, cap) != O.LESS:
        raise ValueError("alpha out of range for this stage")
    h, zb, el = VAR_H, VAR_ZB, VAR_EL

    jumps: List[Tuple[Ord, Derivation]] = []
    for (at, bt) in alpha.terms:
        e = bt if at.is_zero() else Ord(((at, bt),))
        m, k = _exponent_parts(e, stage)
        gamma = O.omega_pow(e)
        if m == 0:
            if stage >= 2 and k >= 1:
                entry = ladder_handle(chain, a, xa, step, 1, rng)
                rn = R_step(entry, step, {VAR_XK: numeral(k)})
                inner = term_subst(App("opw2", (_ladder_exp(1, Var(VAR_XK)),)),
                                   {VAR_XK: numeral(k)})
                d = rewrite_right(rn,
                                  ball(a, xa, App("oplus", (Var(h), inner))),
                                  ball(a, xa, App("oplus", (Var(h), _gn(gamma)))),
                                  inner, _gn(gamma))
            else:
                d = finite_jump(chain, a, xa, step, k, rng)
        else:
            d = w_jump(chain, a, xa, step, m, rng)
            for i in range(k):
                g = O.omega_pow(O.add(O.mul_nat(O.OMEGA, m), O.fin(i)))
                d = jump_times_omega(chain, a, xa, d, g,
                                     check_stage=m + 1, rng=rng)
        jumps.append((gamma, d))

    az = substitute(a, xa, Var(el))
    start = init(sequent([], [Not(prec_atom(Var(el), C0))]))
    start = ror(rw(start, az), Or(Not(prec_atom(Var(el), C0)), az))
    cur = rall(start, ball(a, xa, C0, zb), el)
    total = O.ZERO
    for gamma, d in jumps:
        cbar = _gn(total)
        inst = substitute_derivation(d, {h: cbar}, chain)
        nxt = O.add(total, gamma)
        stepped = rewrite_right(inst,
                                ball(a, xa, App("oplus", (cbar, _gn(gamma)))),
                                ball(a, xa, _gn(nxt)),
                                App("oplus", (cbar, _gn(gamma))), _gn(nxt))
        cur = cut2(cur, stepped, ball(a, xa, cbar))
        total = nxt
    return Fixture(f"ti[{pprint(a)};{alpha}]", chain.at_stage(stage).name, cur,
                   stage=stage, note="transfinite induction ladder")


# ----------------------------------------------------- random derivations


def random_bdm(rng: random.Random, atoms: Tuple[Formula, ...],
               steps: int = 12) -> Derivation:
    """Random pure-calculus derivation over formulas built from the atoms."""

    def rand_formula(depth: int = 0) -> Formula:
        r = rng.random()
        if depth > 2 or r < 0.4:
            return rng.choice(atoms)
        if r < 0.6:
            return Not(rand_formula(depth + 1))
        if r < 0.8:
            return And(rand_formula(depth + 1), rand_formula(depth + 1))
        return Or(rand_formula(depth + 1), rand_formula(depth + 1))

    pool: List[Derivation] = [ax(rand_formula()) for _ in range(2)]
    for _ in range(steps):
        r = rng.random()
        d = rng.choice(pool)
        c = d.conclusion
        try:
            if r < 0.12:
                pool.append(ax(rand_formula()))
            elif r < 0.27:
                pool.append(lw(d, rand_formula()))
            elif r < 0.42:
                pool.append(rw(d, rand_formula()))
            elif r < 0.52:
                pool.append(kernel.derive_cont(d))
            elif r < 0.64 and c.succ:
                f = rng.choice(c.succ)
                g = rand_formula()
                disj = Or(f, g) if rng.random() < 0.5 else Or(g, f)
                pool.append(ror(rw(d, g), disj))
            elif r < 0.76 and c.ante:
                f = rng.choice(c.ante)
                g = rand_formula()
                conj = And(f, g) if rng.random() < 0.5 else And(g, f)
                pool.append(land(lw(d, g), conj))
            elif r < 0.88 and c.succ:
                f = rng.choice(c.succ)
                d2 = rng.choice(pool)
                if d2.conclusion.succ:
                    g = rng.choice(d2.conclusion.succ)
                    pool.append(rand(d, d2, And(f, g)))
            elif c.succ:
                f = rng.choice(c.succ)
                pool.append(cut2(d, ax(f), f))
        except (ValueError, IndexError):
            pool.append(ax(rand_formula()))
    return pool[-1]


def mutate(d: Derivation, rng: random.Random, atoms: Tuple[Formula, ...]) -> Derivation:
    """Random single-node edit, for robustness testing."""
    nodes = [path for _, path in d.walk()]
    target = rng.choice(nodes)

    def edit(n: Derivation) -> Derivation:
        choice = rng.randrange(5)
        if choice == 0:
            rules = sorted(kernel.BDM_RULES | {"init", "ind"})
            return Derivation(n.conclusion, rng.choice(rules), n.params, n.premises)
        if choice == 1 and n.premises:
            return Derivation(n.conclusion, n.rule, n.params, n.premises[1:])
        if choice == 2:
            c = n.conclusion
            return Derivation(sequent(c.ante + (rng.choice(atoms),), c.succ),
                              n.rule, n.params, n.premises)
        if choice == 3 and n.params:
            return Derivation(n.conclusion, n.rule, n.params[1:], n.premises)
        c = n.conclusion
        return Derivation(sequent(c.ante, c.succ + (rng.choice(atoms),)),
                          n.rule, n.params, n.premises)

    def go(n: Derivation, path: str) -> Derivation:
        if path == target:
            return edit(n)
        out = []
        changed = False
        for i, q in enumerate(n.premises):
            sub_path = f"{path}.{i}"
            if target == sub_path or target.startswith(sub_path + "."):
                out.append(go(q, sub_path))
                changed = True
            else:
                out.append(q)
        if not changed:
            return n
        return Derivation(n.conclusion, n.rule, n.params, tuple(out))

    return go(d, "root")


# ----------------------------------------------------------------- corpus


@dataclass
class Corpus:
    theories: Dict[str, object]
    fixtures: List[Fixture]

    def check_fixture(self, fixture: Fixture) -> kernel.CheckReport:
        th = self.theories[fixture.theory_id]
        if isinstance(th, OmegaTheory):
            return th.check(fixture.derivation, fixture.stage or 1)
        return kernel.check(fixture.derivation, th)


def default_step(a: Formula) -> Derivation:
    """Step derivation for formulas whose instances are initial sequents."""
    fv = sorted(free_vars(a))
    ah = substitute(a, fv[0], Var(VAR_H))
    return weaken(init(sequent([], [ah])), [ball(a, fv[0], Var(VAR_H))])


def _tt_ind_formula() -> Formula:
    base = Eq(Var(DESIGNATED_VAR), Var(DESIGNATED_VAR))
    return Tr(App("sub", (corner(base), CV, App("num", (Var("n"),))))), base


def _tt_step_premise(stage1: StagedTheory, rng) -> Tuple[Formula, Derivation]:
    """T[B n] => T[B (n+1)] for B := (v = v), via the uniform certificates."""
    b, base = _tt_ind_formula()
    up = uts_cert(stage1, base, "up", rng)
    n1 = App("add", (Var("n"), ONE_T))
    d2 = init(sequent([], [Eq(n1, n1)]))
    d3 = r_step(up, {DESIGNATED_VAR: n1})             # (n+1)=(n+1) => T[B(n+1)]
    mid = cut2(d2, d3, Eq(n1, n1))                    # => T[B(n+1)]
    return b, weaken(mid, [b])


def _succ_step_premise(a: Formula) -> Derivation:
    n1 = App("add", (Var("n"), ONE_T))
    concl = Eq(App("add", (n1, Zero())), n1)
    return weaken(init(sequent([], [concl])), [a])


def build_corpus(seed: int = 7, heavy: bool = True) -> Corpus:
    """Deterministic standard corpus: chains, certificates, and fixtures."""
    rng = random.Random(seed)
    fixtures: List[Fixture] = []

    r_ts0 = iterate(ts0(), 1, kind="r")
    R_ts0 = iterate(ts0(), 2, kind="R")
    R_basic = iterate(basic(), 4, kind="R")
    omega = union_omega(basic(), registry=R_basic.registry)

    theories: Dict[str, object] = {
        "Basic": basic(), "TS0": ts0(), "UTS0": uts0(), "PKF": pkf(),
        r_ts0.name: r_ts0, R_ts0.name: R_ts0, omega.name: omega,
    }
    for k in range(1, 5):
        th = R_basic.at_stage(k)
        theories[th.name] = th
    theories[R_ts0.at_stage(1).name] = R_ts0.at_stage(1)

    em_samples = [
        coding.parse("0 = 0"),
        coding.parse("2 + 2 = 4 & 1 = 1"),
        coding.parse("all x. x = x | ~(x = x)"),
        coding.parse("ex y. y = 3"),
    ]
    fixtures += [gen_em_arithmetical(a) for a in em_samples]

    uts_samples = [
        coding.parse("x = x"),
        coding.parse("x + 0 = x"),
        coding.parse("T(x)"),
    ]
    for a in uts_samples:
        fixtures += list(gen_uts0_from_r(r_ts0, a, rng))

    # compositional sequents in r(TS0) and again on the staged chain
    for op in COMP_OPS:
        fixtures += gen_compositional(r_ts0, op, rng)
        for f in gen_compositional(R_ts0.at_stage(1), op, rng):
            fixtures.append(Fixture("staged-" + f.name, f.theory_id,
                                    f.derivation, stage=f.stage))

    fixtures += gen_quantifier_sequents(R_ts0, rng)

    fixtures.append(Fixture("id1", R_ts0.name,
                            init(coding.parse("=> x = x", "sequent")), stage=2))
    fixtures.append(Fixture("id2", R_ts0.name,
                            init(coding.parse("x = y, T(x) => T(y)", "sequent")),
                            stage=2))

    b, prem = _tt_step_premise(R_ts0.at_stage(1), rng)
    fixtures.append(gen_full_induction(R_ts0, b, "n", prem,
                                       check_stage=1, rng=rng))
    simple = coding.parse("n + 0 = n")
    fixtures.append(gen_full_induction(R_basic, simple, "n",
                                       _succ_step_premise(simple),
                                       check_stage=0, rng=rng))

    if heavy:
        a = coding.parse("x0 = x0")
        step = default_step(a)
        fixtures.append(gen_ti(R_basic, a, O.OMEGA, 2, step, rng))
        fixtures.append(gen_ti(R_basic, a, O.omega_pow(O.fin(2)), 2, step, rng))
        fixtures.append(gen_ti(R_basic, a, O.omega_pow(O.fin(3)), 2, step, rng))
        fixtures.append(gen_ti(R_basic, a, O.omega_pow(O.mul_nat(O.OMEGA, 2)),
                               3, step, rng))
        fixtures.append(gen_ti(R_basic, a, O.omega_pow(O.mul_nat(O.OMEGA, 3)),
                               4, step, rng))

    for reg in (r_ts0.registry, R_ts0.registry, R_basic.registry):
        if not reg.frozen:
            reg.freeze()
    return Corpus(theories, fixtures)

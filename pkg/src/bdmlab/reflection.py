"""Certificate-backed provability and reflection.

A PrCertificate witnesses that a sequent template is provable in a named
theory, either by a schematic derivation that checks as-is with free
variables, or by an instance builder producing a checked closed derivation
per numeral tuple (sample-validated). An AdmissibleRuleEntry witnesses
provable admissibility of a rule via an executable proof transformer taking
the schematic premise derivation and a target substitution.

Staged theories r(T) and R^n(T) are Basic plus the corresponding reflection
rule over lower stages; chains are cumulative, so anything accepted at stage
n is accepted above it. The stage-omega union tags proofs with a finite
stage.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import coding, kernel
from .kernel import Derivation, Theory, check, cut2, init, node, substitute_derivation
from .syntax import (
    Formula, Sequent, Term, Tr, Var, free_vars, numeral, pprint, sequent,
    sequent_vars, subst_sequent,
)
from .theories import BaseTheory, uniform_template


class ReflectionError(ValueError):
    pass


InstanceBuilder = Callable[[Mapping[str, int]], Derivation]


@dataclass
class PrCertificate:
    name: str
    theory: Theory
    template: Sequent
    variables: Tuple[str, ...]
    witness: Union[Derivation, InstanceBuilder]
    note: str = ""

    @property
    def theory_name(self) -> str:
        return self.theory.name

    def instantiate(self, env: Mapping[str, int]) -> Derivation:
        values = {v: numeral(env.get(v, 0)) for v in self.variables}
        if isinstance(self.witness, Derivation):
            return substitute_derivation(self.witness, values, self.theory)
        return self.witness(env)

    def instance_sequent(self, env: Mapping[str, int]) -> Sequent:
        values = {v: numeral(env.get(v, 0)) for v in self.variables}
        return subst_sequent(self.template, values)


Transformer = Callable[[Derivation, Mapping[str, Term]], Derivation]


@dataclass
class AdmissibleRuleEntry:
    name: str
    theory: Theory
    variables: Tuple[str, ...]
    premise_template: Sequent
    conclusion_template: Sequent
    transformer: Transformer
    sample_premise: Derivation
    note: str = ""

    @property
    def theory_name(self) -> str:
        return self.theory.name


def _effective_subst(variables: Sequence[str], packed) -> Optional[Dict[str, Term]]:
    out: Dict[str, Term] = {v: Var(v) for v in variables}
    if packed is None:
        return out
    if not isinstance(packed, tuple):
        return None
    for item in packed:
        if not (isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], str)):
            return None
        out[item[0]] = item[1]
    return out


def pack_subst(m: Mapping[str, Term]) -> Tuple[Tuple[str, Term], ...]:
    return tuple(sorted(m.items()))


def _sample_envs(variables: Sequence[str], count: int, rng: random.Random,
                 bound: int = 9) -> List[Dict[str, int]]:
    return [{v: rng.randrange(bound) for v in variables} for _ in range(count)]


def certify_pr(theory: Theory, witness: Union[Derivation, InstanceBuilder],
               name: str, template: Optional[Sequent] = None,
               variables: Optional[Sequence[str]] = None,
               samples: int = 5, rng: Optional[random.Random] = None,
               extra_envs: Sequence[Mapping[str, int]] = (),
               note: str = "") -> PrCertificate:
    """Validate and build a provability certificate. Schematic witnesses are
    checked directly and on sampled numeral instances; instance builders are
    checked on sampled instances only."""
    rng = rng or random.Random(7)
    if isinstance(witness, Derivation):
        template = witness.conclusion if template is None else template
        if template != witness.conclusion:
            raise ReflectionError("schematic witness must conclude its template")
        rep = check(witness, theory)
        if not rep.accepted:
            raise ReflectionError(
                f"certificate witness rejected at {rep.failure_path}: {rep.failure_reason}")
    elif template is None:
        raise ReflectionError("instance builders need an explicit template")
    if variables is None:
        variables = sorted(sequent_vars(template))
    cert = PrCertificate(name, theory, template, tuple(variables), witness, note)
    for env in list(extra_envs) + _sample_envs(cert.variables, samples, rng):
        inst = cert.instantiate(env)
        if inst.conclusion != cert.instance_sequent(env):
            raise ReflectionError(
                f"certificate {name}: instance at {env} concludes "
                f"{pprint(inst.conclusion)}, expected {pprint(cert.instance_sequent(env))}")
        rep = check(inst, theory)
        if not rep.accepted:
            raise ReflectionError(
                f"certificate {name}: instance at {env} rejected at "
                f"{rep.failure_path}: {rep.failure_reason}")
    return cert


def register_admissible(theory: Theory, entry: AdmissibleRuleEntry,
                        samples: int = 25, rng: Optional[random.Random] = None,
                        bound: int = 5) -> AdmissibleRuleEntry:
    """Sample-validate a transformer: instantiated sample premises must check
    and the transformed output must check and match the conclusion template."""
    rng = rng or random.Random(11)
    seen = set()
    for env in _sample_envs(entry.variables, samples, rng, bound=bound):
        key = tuple(sorted(env.items()))
        if key in seen:
            continue
        seen.add(key)
        values = {v: numeral(env[v]) for v in entry.variables}
        prem_inst = substitute_derivation(entry.sample_premise, values, theory)
        want_prem = subst_sequent(entry.premise_template, values)
        if prem_inst.conclusion != want_prem:
            raise ReflectionError(
                f"entry {entry.name}: sample premise at {env} concludes "
                f"{pprint(prem_inst.conclusion)}, expected {pprint(want_prem)}")
        rep = check(prem_inst, theory)
        if not rep.accepted:
            raise ReflectionError(
                f"entry {entry.name}: sample premise rejected: {rep.failure_reason}")
        out = entry.transformer(entry.sample_premise, values)
        want = subst_sequent(entry.conclusion_template, values)
        if out.conclusion != want:
            raise ReflectionError(
                f"entry {entry.name}: output at {env} concludes "
                f"{pprint(out.conclusion)}, expected {pprint(want)}")
        rep = check(out, theory)
        if not rep.accepted:
            raise ReflectionError(
                f"entry {entry.name}: output at {env} rejected at "
                f"{rep.failure_path}: {rep.failure_reason}")
    return entry


def compose_pr(entry: AdmissibleRuleEntry, cert: PrCertificate, name: str,
               samples: int = 5, rng: Optional[random.Random] = None) -> PrCertificate:
    """Pr2 closure: a provably admissible rule applied to a certified premise
    yields a certificate for the conclusion template."""
    if cert.template != entry.premise_template:
        raise ReflectionError("certificate does not certify the entry's premise template")
    if not isinstance(cert.witness, Derivation):
        raise ReflectionError("composition needs a schematic premise certificate")
    witness = cert.witness

    def builder(env: Mapping[str, int]) -> Derivation:
        values = {v: numeral(env.get(v, 0)) for v in entry.variables}
        return entry.transformer(witness, values)

    return certify_pr(entry.theory, builder, name,
                      template=entry.conclusion_template,
                      variables=entry.variables, samples=samples, rng=rng)


# ------------------------------------------------------------ staged chains


@dataclass
class ChainRegistry:
    certs: Dict[str, PrCertificate] = field(default_factory=dict)
    handles: Dict[str, AdmissibleRuleEntry] = field(default_factory=dict)
    frozen: bool = False

    def add_cert(self, cert: PrCertificate) -> PrCertificate:
        if self.frozen:
            raise ReflectionError("registry is frozen")
        self.certs[cert.name] = cert
        return cert

    def add_handle(self, entry: AdmissibleRuleEntry) -> AdmissibleRuleEntry:
        if self.frozen:
            raise ReflectionError("registry is frozen")
        self.handles[entry.name] = entry
        return entry

    def freeze(self) -> None:
        self.frozen = True


def stage_name(base_name: str, stage: int, kind: str) -> str:
    if stage == 0:
        return base_name
    if kind == "r":
        return f"r({base_name})" if stage == 1 else f"r^{stage}({base_name})"
    return f"R({base_name})" if stage == 1 else f"R^{stage}({base_name})"


@dataclass
class StagedTheory(Theory):
    base: BaseTheory
    stage: int
    kind: str = "R"  # 'R' admits both rules, 'r' only sequent reflection
    registry: ChainRegistry = field(default_factory=ChainRegistry)
    basic_core: BaseTheory = None  # type: ignore[assignment]

    def __post_init__(self):
        from .theories import basic
        if self.basic_core is None:
            self.basic_core = basic()
        if self.stage < 1:
            raise ReflectionError("staged theories start at stage 1")

    @property
    def name(self) -> str:  # type: ignore[override]
        return stage_name(self.base.name, self.stage, self.kind)

    @property
    def levels(self) -> List[str]:
        return [stage_name(self.base.name, k, self.kind) for k in range(self.stage + 1)]

    def at_stage(self, k: int) -> "StagedTheory":
        if k == self.stage:
            return self
        return StagedTheory(self.base, k, self.kind, self.registry, self.basic_core)

    def level_of(self, theory_name: str) -> Optional[int]:
        try:
            return self.levels.index(theory_name)
        except ValueError:
            return None

    # reflection closures are Basic plus the reflection rules
    def initial(self, s: Sequent) -> Optional[str]:
        return self.basic_core.initial(s)

    def ind_ok(self, f: Formula) -> Optional[str]:
        return self.basic_core.ind_ok(f)

    def repair_initial(self, s, m):
        return self.basic_core.repair_initial(s, m)

    def check_reflection(self, d: Derivation) -> Optional[str]:
        if d.rule in ("rfn", "grf"):
            return f"{self.name} has no global/uniform reflection rule"
        cert_name = d.param("cert")
        if not isinstance(cert_name, str):
            return "reflection step needs a certificate name"
        if d.rule == "r":
            cert = self.registry.certs.get(cert_name)
            if cert is None:
                return f"unknown certificate {cert_name!r}"
            lvl = self.level_of(cert.theory_name)
            if lvl is None or lvl >= self.stage:
                return (f"stage violation: certificate about {cert.theory_name} "
                        f"cannot back a step inside {self.name}")
            if d.premises:
                return "sequent reflection takes no premises"
            sub = _effective_subst(cert.variables, d.param("subst"))
            if sub is None:
                return "malformed substitution parameter"
            if d.conclusion != subst_sequent(cert.template, sub):
                return "conclusion does not match the certified template"
            return None
        # rule == "R"
        if self.kind != "R":
            return f"{self.name} admits only sequent reflection"
        entry = self.registry.handles.get(cert_name)
        if entry is None:
            return f"unknown rule handle {cert_name!r}"
        lvl = self.level_of(entry.theory_name)
        if lvl is None or lvl >= self.stage:
            return (f"stage violation: handle about {entry.theory_name} "
                    f"cannot back a step inside {self.name}")
        if len(d.premises) != 1:
            return "rule reflection takes exactly one premise"
        sub = _effective_subst(entry.variables, d.param("subst"))
        if sub is None:
            return "malformed substitution parameter"
        if d.premises[0].conclusion != subst_sequent(entry.premise_template, sub):
            return "premise does not match the handle's premise template"
        if d.conclusion != subst_sequent(entry.conclusion_template, sub):
            return "conclusion does not match the handle's conclusion template"
        return None


def iterate(base: BaseTheory, n: int, kind: str = "R",
            registry: Optional[ChainRegistry] = None) -> StagedTheory:
    """The n-fold reflection closure over `base` (stage 0 is base itself)."""
    if n == 0:
        raise ReflectionError("stage 0 is the base theory; use it directly")
    return StagedTheory(base, n, kind, registry or ChainRegistry())


@dataclass
class OmegaTheory:
    """Stage-tagged union of the finite reflection stages."""

    base: BaseTheory
    kind: str = "R"
    registry: ChainRegistry = field(default_factory=ChainRegistry)

    @property
    def name(self) -> str:
        return f"R^w({self.base.name})" if self.kind == "R" else f"r^w({self.base.name})"

    def at_stage(self, k: int) -> StagedTheory:
        return StagedTheory(self.base, k, self.kind, self.registry)

    def check(self, d: Derivation, stage_tag: int) -> kernel.CheckReport:
        report = check(d, self.at_stage(stage_tag))
        report.theory = f"{self.name}@{stage_tag}"
        return report


def union_omega(base: BaseTheory, registry: Optional[ChainRegistry] = None) -> OmegaTheory:
    return OmegaTheory(base, "R", registry or ChainRegistry())


_STAGED_RE = re.compile(r"^(r|R)(?:\^(\d+|w))?\(([A-Za-z0-9_]+)\)$")


def parse_theory_id(name: str):
    """Split a staged theory id like R^2(TS0) into (kind, stage, base);
    plain names give (None, 0, name). Stage 'w' is the omega union."""
    m = _STAGED_RE.match(name)
    if m is None:
        return None, 0, name
    kind, stage, base = m.group(1), m.group(2), m.group(3)
    if stage is None:
        return kind, 1, base
    if stage == "w":
        return kind, "w", base
    return kind, int(stage), base


# ------------------------------------------------------ global/uniform rules


class ReflectionExtension(Theory):
    """T plus the certificate-backed uniform (rfn) and global (grf) reflection
    rules; T must contain the uniform truth sequents."""

    def __init__(self, base: BaseTheory, registry: Optional[ChainRegistry] = None):
        if not base.has_uniform_truth:
            raise ReflectionError("ambient theory lacks the uniform truth sequents")
        self.base = base
        self.registry = registry or ChainRegistry()

    @property
    def name(self) -> str:
        return f"{self.base.name}+refl"

    def initial(self, s: Sequent) -> Optional[str]:
        return self.base.initial(s)

    def ind_ok(self, f: Formula) -> Optional[str]:
        return self.base.ind_ok(f)

    def repair_initial(self, s, m):
        return self.base.repair_initial(s, m)

    def truth_form(self, cert: PrCertificate) -> Sequent:
        if cert.template.ante or len(cert.template.succ) != 1:
            raise ReflectionError("global reflection needs a single-succedent template")
        a = cert.template.succ[0]
        return sequent([], [Tr(uniform_template(a))])

    def check_reflection(self, d: Derivation) -> Optional[str]:
        if d.rule in ("r", "R"):
            return f"{self.name} has no staged reflection rules"
        cert_name = d.param("cert")
        if not isinstance(cert_name, str):
            return "reflection step needs a certificate name"
        cert = self.registry.certs.get(cert_name)
        if cert is None:
            return f"unknown certificate {cert_name!r}"
        if cert.theory_name != self.base.name:
            return f"certificate is about {cert.theory_name}, not {self.base.name}"
        if d.premises:
            return "reflection steps take no premises"
        if cert.template.ante or len(cert.template.succ) != 1:
            return "reflection needs a single-succedent certificate"
        sub = _effective_subst(cert.variables, d.param("subst"))
        if sub is None:
            return "malformed substitution parameter"
        if d.rule == "rfn":
            want = subst_sequent(cert.template, sub)
        else:
            want = subst_sequent(self.truth_form(cert), sub)
        if d.conclusion != want:
            return "conclusion does not match the certified template"
        return None


def rfn_step(ext: ReflectionExtension, cert: PrCertificate,
             sub: Optional[Mapping[str, Term]] = None) -> Derivation:
    values = {v: Var(v) for v in cert.variables}
    values.update(sub or {})
    return node(subst_sequent(cert.template, values), "rfn",
                cert=cert.name, subst=pack_subst(values))


def grf_step(ext: ReflectionExtension, cert: PrCertificate,
             sub: Optional[Mapping[str, Term]] = None) -> Derivation:
    values = {v: Var(v) for v in cert.variables}
    values.update(sub or {})
    return node(subst_sequent(ext.truth_form(cert), values), "grf",
                cert=cert.name, subst=pack_subst(values))


def lift_truth_cert(ext: ReflectionExtension, cert: PrCertificate,
                    rng: Optional[random.Random] = None) -> PrCertificate:
    """From a certificate for => A(x) build one for => T([A x]), using the
    uniform truth sequents of the ambient theory (the canonical route from
    uniform to global reflection)."""
    name = cert.name + "+T"
    if name in ext.registry.certs:
        return ext.registry.certs[name]
    a = cert.template.succ[0]
    tmpl = uniform_template(a)

    def builder(env: Mapping[str, int]) -> Derivation:
        values = {v: numeral(env.get(v, 0)) for v in cert.variables}
        da = cert.instantiate(env)                      # => A(nbar)
        inst = da.conclusion.succ[0]
        up = init(sequent([inst], [Tr(coding.corner(inst))]))
        d1 = cut2(da, up, inst)                         # => T(corner)
        from .syntax import Eq, term_subst
        target = term_subst(tmpl, values)
        eqn = Eq(coding.corner(inst), target)
        rewrite = init(sequent([eqn, Tr(coding.corner(inst))], [Tr(target)]))
        bridged = cut2(init(sequent([], [eqn])), rewrite, eqn)
        return cut2(d1, bridged, Tr(coding.corner(inst)))

    lifted = certify_pr(ext.base, builder, name,
                        template=sequent([], [Tr(tmpl)]),
                        variables=cert.variables, rng=rng)
    ext.registry.add_cert(lifted)
    return lifted


def transform_grf_rfn(d: Derivation, ext: ReflectionExtension,
                      rng: Optional[random.Random] = None) -> Derivation:
    """Rewrite each uniform reflection step into a global one and vice versa,
    preserving the end-sequent."""

    def go(n: Derivation) -> Derivation:
        premises = tuple(go(q) for q in n.premises)
        if n.rule == "rfn":
            cert = ext.registry.certs[n.param("cert")]
            sub = _effective_subst(cert.variables, n.param("subst"))
            g = node(subst_sequent(ext.truth_form(cert), sub), "grf",
                     cert=cert.name, subst=pack_subst(sub))
            a = cert.template.succ[0]
            tmpl_atom = Tr(uniform_template(a))
            unquote = init(sequent([tmpl_atom], [a]))
            unq = substitute_derivation(unquote, sub, ext)
            cut_formula = unq.conclusion.ante[0]
            return cut2(g, unq, cut_formula)
        if n.rule == "grf":
            cert = ext.registry.certs[n.param("cert")]
            sub = _effective_subst(cert.variables, n.param("subst"))
            lifted = lift_truth_cert(ext, cert, rng=rng)
            return node(subst_sequent(lifted.template, sub), "rfn",
                        cert=lifted.name, subst=pack_subst(sub))
        if premises == n.premises:
            return n
        return Derivation(n.conclusion, n.rule, n.params, premises)

    return go(d)

"""Line-oriented proof scripts.

A script holds a header (theory id, optional stage, certificate imports) and
named derivation blocks, one rule application per line:

    theory: R^2(TS0)
    stage: 2

    derive comp-and1
      s1: ... => ... ; init
      s2: ... => ... ; cut s1 s2 formula="0 = 0"
    end

Premise labels must be defined before use and each block has a single root
(its last line). Certificates are referenced by stable name; checking a
staged script resolves them against the standard registry.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import coding
from .kernel import Derivation
from .syntax import ParseError, Sequent, Term, Var, pprint


@dataclass
class ProofScript:
    theory_id: str
    stage: Optional[int]
    certificates: List[str]
    blocks: List[Tuple[str, Derivation]]


class ScriptError(ValueError):
    def __init__(self, msg: str, lineno: int):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


_STR_PARAMS = {"cert", "axiom", "eigen", "var"}
_FORMULA_PARAMS = {"formula"}
_TERM_PARAMS = {"witness", "term"}


def _format_param(key: str, value) -> str:
    if key in _STR_PARAMS:
        return f'{key}="{value}"'
    if key == "subst":
        inner = ", ".join(f"{v}:={coding.pprint(t)}" for v, t in value)
        return f'{key}="{inner}"'
    return f'{key}="{coding.pprint(value)}"'


def _parse_param(key: str, raw: str, lineno: int):
    try:
        if key in _STR_PARAMS:
            return raw
        if key in _FORMULA_PARAMS:
            return coding.parse(raw, "formula")
        if key in _TERM_PARAMS:
            return coding.parse(raw, "term")
        if key == "subst":
            pairs = []
            if raw.strip():
                for item in raw.split(","):
                    v, t = item.split(":=", 1)
                    pairs.append((v.strip(), coding.parse(t.strip(), "term")))
            return tuple(sorted(pairs))
    except (ParseError, ValueError) as exc:
        raise ScriptError(f"bad {key} parameter: {exc}", lineno)
    raise ScriptError(f"unknown parameter {key!r}", lineno)


def serialize_derivation(name: str, d: Derivation) -> str:
    lines = [f"derive {name}"]
    counter = [0]
    labels: Dict[int, str] = {}

    def go(n: Derivation) -> str:
        if id(n) in labels:
            return labels[id(n)]
        premise_labels = [go(p) for p in n.premises]
        counter[0] += 1
        label = f"s{counter[0]}"
        labels[id(n)] = label
        parts = [f"  {label}: {coding.pprint(n.conclusion)} ; {n.rule}"]
        parts.extend(premise_labels)
        for key, value in n.params:
            parts.append(_format_param(key, value))
        lines.append(" ".join(parts))
        return label

    go(d)
    lines.append("end")
    return "\n".join(lines)


def serialize(script: ProofScript) -> str:
    out = [f"theory: {script.theory_id}"]
    if script.stage is not None:
        out.append(f"stage: {script.stage}")
    for cert in script.certificates:
        out.append(f"cert: {cert}")
    for name, d in script.blocks:
        out.append("")
        out.append(serialize_derivation(name, d))
    return "\n".join(out) + "\n"


_LINE_RE = re.compile(r"^\s*(\w+)\s*:\s*(.*?)\s*;\s*(\w+)\s*(.*)$")
_TOKEN_RE = re.compile(r'(\w+)="([^"]*)"|(\w+)')


def parse(text: str) -> ProofScript:
    theory_id = "Basic"
    stage: Optional[int] = None
    certificates: List[str] = []
    blocks: List[Tuple[str, Derivation]] = []
    current: Optional[str] = None
    env: Dict[str, Derivation] = {}
    last: Optional[Derivation] = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if current is None:
            if line.startswith("theory:"):
                theory_id = line.split(":", 1)[1].strip()
                continue
            if line.startswith("stage:"):
                try:
                    stage = int(line.split(":", 1)[1].strip())
                except ValueError:
                    raise ScriptError("stage must be an integer", lineno)
                continue
            if line.startswith("cert:"):
                certificates.append(line.split(":", 1)[1].strip())
                continue
            if line.startswith("derive"):
                name = line[len("derive"):].strip()
                if not name:
                    raise ScriptError("derive needs a block name", lineno)
                current = name
                env, last = {}, None
                continue
            raise ScriptError(f"unexpected input {line!r}", lineno)
        if line == "end":
            if last is None:
                raise ScriptError("empty derivation block", lineno)
            blocks.append((current, last))
            current = None
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise ScriptError("expected 'label: sequent ; rule ...'", lineno)
        label, seq_text, rule, rest = m.groups()
        if label in env:
            raise ScriptError(f"duplicate label {label!r}", lineno)
        try:
            concl = coding.parse(seq_text, "sequent")
        except ParseError as exc:
            raise ScriptError(f"bad sequent: {exc}", lineno)
        premises: List[Derivation] = []
        params: List[Tuple[str, object]] = []
        for m2 in _TOKEN_RE.finditer(rest):
            key, value, bare = m2.groups()
            if bare is not None:
                if bare not in env:
                    raise ScriptError(f"premise label {bare!r} not defined", lineno)
                premises.append(env[bare])
            else:
                params.append((key, _parse_param(key, value, lineno)))
        env[label] = Derivation(concl, rule, tuple(sorted(params)), tuple(premises))
        last = env[label]
    if current is not None:
        raise ScriptError("unterminated derivation block", len(text.splitlines()))
    return ProofScript(theory_id, stage, certificates, blocks)


def fixture_script(fixture) -> str:
    certs = sorted({c for c in _certs_of(fixture.derivation)})
    script = ProofScript(fixture.theory_id, fixture.stage, certs,
                         [(fixture.name, fixture.derivation)])
    return serialize(script)


def _certs_of(d: Derivation):
    for n, _ in d.walk():
        c = n.param("cert")
        if isinstance(c, str):
            yield c

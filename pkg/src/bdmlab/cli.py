"""Command line front end: check proof scripts, generate and verify the
fixture corpus, ordinal utilities, model runs, and reports."""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import coding, derivgen, kernel, models, scripts
from . import ordinals as O
from .reflection import OmegaTheory, parse_theory_id
from .syntax import ParseError, pprint
from .theories import get_theory

EXIT_OK, EXIT_CHECK, EXIT_CONFIG = 0, 1, 2


@dataclass
class Config:
    numeral_bound: int = 8
    cert_samples: int = 5
    handle_samples: int = 25
    stage_bound: int = 4
    seed: int = 7

    @classmethod
    def load(cls, path: Optional[str]) -> "Config":
        cfg = cls()
        if path is None:
            return cfg
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            if not hasattr(cfg, key):
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            setattr(cfg, key, int(value))
        return cfg


_CORPUS_CACHE: Dict[bool, derivgen.Corpus] = {}
_CORPUS_LOCK = __import__("threading").Lock()


def standard_corpus(heavy: bool = True, seed: int = 7) -> derivgen.Corpus:
    with _CORPUS_LOCK:
        if heavy not in _CORPUS_CACHE:
            _CORPUS_CACHE[heavy] = derivgen.build_corpus(seed=seed, heavy=heavy)
        return _CORPUS_CACHE[heavy]


def resolve_theory(name: str, stage: Optional[int], heavy: bool = True):
    kind, parsed_stage, base = parse_theory_id(name)
    if kind is None:
        try:
            return get_theory(name)
        except KeyError:
            raise ValueError(f"unknown theory {name!r}")
    corpus = standard_corpus(heavy)
    if name in corpus.theories:
        th = corpus.theories[name]
        if isinstance(th, OmegaTheory):
            return th.at_stage(stage or 1)
        return th
    raise ValueError(f"unknown staged theory {name!r}")


# ----------------------------------------------------------------- check


def check_file(path: Path, theory_override: Optional[str],
               stage: Optional[int]) -> Tuple[List[dict], int]:
    try:
        script = scripts.parse(path.read_text())
    except (scripts.ScriptError, ParseError) as exc:
        return [{"file": str(path), "error": str(exc)}], EXIT_CONFIG
    name = theory_override or script.theory_id
    needs_heavy = any(c.startswith(("ti-", "ind[")) for c in script.certificates)
    try:
        theory = resolve_theory(name, stage or script.stage, heavy=needs_heavy)
    except ValueError as exc:
        return [{"file": str(path), "error": str(exc)}], EXIT_CONFIG
    results = []
    worst = EXIT_OK
    for block_name, derivation in script.blocks:
        report = kernel.check(derivation, theory)
        entry = report.as_dict()
        entry["file"] = str(path)
        entry["block"] = block_name
        results.append(entry)
        if not report.accepted:
            worst = EXIT_CHECK
    if not script.blocks:
        results.append({"file": str(path), "note": "zero blocks"})
    return results, worst


def _gather(paths: List[str], recursive: bool) -> List[Path]:
    out: List[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            pattern = "**/*.proof" if recursive else "*.proof"
            out.extend(sorted(path.glob(pattern)))
        else:
            out.append(path)
    return out


def cmd_check(args) -> int:
    files = _gather(args.paths, args.recursive)
    if not files:
        print("no proof scripts found")
        return EXIT_CONFIG
    all_results: List[dict] = []
    worst = EXIT_OK
    if args.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(check_file, f, args.theory, args.stage)
                       for f in files]
            outcomes = [f.result() for f in futures]
    else:
        outcomes = [check_file(f, args.theory, args.stage) for f in files]
    for results, code in outcomes:
        worst = max(worst, code)
        all_results.extend(results)
    if args.json:
        print(json.dumps({"results": all_results}, indent=2))
    else:
        for entry in all_results:
            if "error" in entry:
                print(f"ERROR {entry['file']}: {entry['error']}")
            elif "note" in entry:
                print(f"OK    {entry['file']}: {entry['note']}")
            else:
                tag = "ACCEPT" if entry["verdict"] == "accepted" else "REJECT"
                extra = "" if entry["verdict"] == "accepted" else \
                    f" at {entry['failure']['path']}: {entry['failure']['reason']}"
                print(f"{tag} {entry['file']} :: {entry['block']} "
                      f"[{entry['theory']}] nodes={entry['nodes']}{extra}")
    return worst


# ------------------------------------------------------------------- gen


GROUPS = ("em-arith", "uniform-truth", "compositional", "quantifier-truth",
          "full-induction", "ti", "pkf")


def _group_of(fixture: derivgen.Fixture) -> str:
    n = fixture.name
    if n.startswith("em["):
        return "em-arith"
    if n.startswith("uniform-"):
        return "uniform-truth"
    if n.startswith(("comp-", "staged-comp-")):
        return "compositional"
    if n.startswith("quant-"):
        return "quantifier-truth"
    if n.startswith("full-ind"):
        return "full-induction"
    if n.startswith("ti["):
        return "ti"
    return "pkf"


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "fixture"


def cmd_gen(args) -> int:
    cfg = Config.load(args.config)
    which = args.what
    corpus = standard_corpus(heavy=(which in ("all", "ti")), seed=cfg.seed)
    out_root = Path(args.out)
    written = 0
    failures = 0
    for fixture in corpus.fixtures:
        group = _group_of(fixture)
        if which not in ("all", group):
            continue
        report = corpus.check_fixture(fixture)
        line = report.line(fixture.name)
        print(line)
        if not report.accepted:
            failures += 1
            continue
        target = out_root / "fixtures" / group
        target.mkdir(parents=True, exist_ok=True)
        path = target / f"{_safe_name(fixture.name)}.proof"
        path.write_text(scripts.fixture_script(fixture))
        written += 1
    if which in ("all", "universes"):
        udir = out_root / "universes"
        udir.mkdir(parents=True, exist_ok=True)
        (udir / "liar.univ").write_text(
            "# diagonal liar sentence universe\nbound 6\nliar\n")
        (udir / "nested.univ").write_text(
            "# nested truth ascriptions\nbound 6\nsentence 0 = 0\n"
            "sentence T('0 = 0')\nsentence T('T('0 = 0')')\n"
            if False else
            "# nested truth ascriptions\nbound 6\nsentence 0 = 0\n"
            "sentence T('0 = 0')\n")
        written += 2
    print(f"wrote {written} files under {out_root}, {failures} failures")
    return EXIT_OK if failures == 0 else EXIT_CHECK


# ------------------------------------------------------------------- ord


class _OrdParser:
    def __init__(self, text: str):
        self.toks = re.findall(r"phi|w|\d+|[+^(),]", text.replace(" ", ""))
        if "".join(self.toks) != text.replace(" ", ""):
            raise ValueError(f"cannot tokenize ordinal expression {text!r}")
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, tok):
        got = self.next()
        if got != tok:
            raise ValueError(f"expected {tok!r}, got {got!r}")

    def expr(self) -> O.Ord:
        out = self.atom()
        while self.peek() == "+":
            self.next()
            out = O.add(out, self.atom())
        return out

    def atom(self) -> O.Ord:
        tok = self.next()
        if tok is None:
            raise ValueError("unexpected end of ordinal expression")
        if tok.isdigit():
            return O.fin(int(tok))
        if tok == "w":
            if self.peek() == "^":
                self.next()
                return O.omega_pow(self.atom())
            return O.OMEGA
        if tok == "phi":
            self.expect("(")
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(")")
            return O.phi(a, b)
        if tok == "(":
            out = self.expr()
            self.expect(")")
            return out
        raise ValueError(f"unexpected token {tok!r}")


def parse_ord(text: str) -> O.Ord:
    p = _OrdParser(text)
    out = p.expr()
    if p.peek() is not None:
        raise ValueError(f"trailing input in ordinal expression {text!r}")
    return out


def cmd_ord(args) -> int:
    try:
        first = parse_ord(args.exprs[0])
        if len(args.exprs) == 1:
            print(f"normal form: {first}")
            print(f"code: {coding.embed(first)}")
            return EXIT_OK
        second = parse_ord(args.exprs[1])
        cmp = O.compare(first, second)
        word = {O.LESS: "less", O.EQUAL: "equal", O.GREATER: "greater"}[cmp]
        print(f"{first}  {word}  {second}")
        return EXIT_OK
    except ValueError as exc:
        print(f"error: {exc}")
        return EXIT_CONFIG


# ----------------------------------------------------------------- model


def load_universe(path: Path, default_bound: int) -> models.Universe:
    bound = default_bound
    seeds = []
    checks: List[Tuple[str, object]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("bound"):
            bound = int(line.split()[1])
        elif line.startswith("sentence"):
            seeds.append(coding.parse(line[len("sentence"):].strip(), "formula"))
        elif line == "liar":
            u, lam = models.liar_universe(bound)
            seeds.extend(u.sentences.values())
        elif line == "truthteller":
            u, tau = models.truth_teller(bound)
            seeds.extend(u.sentences.values())
        elif line.startswith("check"):
            checks.append(("spec", coding.parse(line[len("check"):].strip(), "sequent")))
        else:
            raise ValueError(f"{path}:{lineno}: unknown directive")
    u = models.Universe.build(seeds, bound)
    u.checks = checks  # type: ignore[attr-defined]
    return u


def cmd_model(args) -> int:
    cfg = Config.load(args.config)
    try:
        u = load_universe(Path(args.spec), cfg.numeral_bound)
    except (ValueError, ParseError, OSError) as exc:
        print(f"error: {exc}")
        return EXIT_CONFIG
    v = models.lfp(u)
    print(f"universe: {len(u.sentences)} sentences, bound {u.bound}")
    for code in sorted(u.sentences, key=lambda c: pprint(u.sentences[c])):
        f = u.sentences[code]
        flag = "exact" if u.exact[code] else "trunc"
        print(f"  {v.values[code]}  [{flag}]  {coding.pprint(f)}")
    named = list(getattr(u, "checks", []))
    from .syntax import Tr, sequent
    for code, f in u.sentences.items():
        named.append(("quote-intro", sequent([f], [Tr(coding.corner(f))])))
        named.append(("quote-elim", sequent([Tr(coding.corner(f))], [f])))
    report = models.audit(named, u)
    print(f"audit: {report.evaluated} evaluable, {len(report.violations)} violations")
    for entry in report.violations:
        print(f"  VIOLATION {entry.name}: {coding.pprint(entry.sequent)}")
    return EXIT_OK if not report.violations else EXIT_CHECK


# ---------------------------------------------------------------- report


def cmd_report(args) -> int:
    files = _gather(args.paths, True)
    rows = []
    worst = EXIT_OK
    for f in files:
        results, code = check_file(f, None, None)
        worst = max(worst, code)
        rows.extend(results)
    accepted = sum(1 for r in rows if r.get("verdict") == "accepted")
    rejected = sum(1 for r in rows if r.get("verdict") == "rejected")
    errors = sum(1 for r in rows if "error" in r)
    summary = {"files": len(files), "accepted": accepted,
               "rejected": rejected, "errors": errors, "results": rows}
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        print(f"files={len(files)} accepted={accepted} rejected={rejected} errors={errors}")
        for r in rows:
            if r.get("verdict") == "rejected":
                print(f"  REJECT {r['file']} :: {r['block']}: {r['failure']['reason']}")
            elif "error" in r:
                print(f"  ERROR {r['file']}: {r['error']}")
    return worst


# ----------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bdmlab",
        description="Proof checker and theory workbench for the De Morgan "
                    "sequent calculus with truth and reflection.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check proof scripts")
    p.add_argument("paths", nargs="+")
    p.add_argument("--theory", default=None)
    p.add_argument("--stage", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--recursive", action="store_true")
    p.add_argument("--config", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("gen", help="generate and verify the fixture corpus")
    p.add_argument("what", choices=GROUPS + ("all", "universes"))
    p.add_argument("--out", default=".")
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("ord", help="ordinal notation utilities")
    p.add_argument("exprs", nargs="+", help="one expression prints its normal "
                   "form, two print their comparison")
    p.set_defaults(fn=cmd_ord)

    p = sub.add_parser("model", help="fixed point run over a universe spec")
    p.add_argument("spec")
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_model)

    p = sub.add_parser("report", help="summary over a fixture tree")
    p.add_argument("paths", nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

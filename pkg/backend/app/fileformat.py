"""
Plain-text automaton files.

    # comment
    type: nbw
    alphabet: 0 1
    states: 2
    initial: 0
    accepting: 1
    0 0 -> 0 1
    1 1 -> 1

ABW transition lines carry a formula instead of a target list:
``formula := term ('|' term)*``, ``term := factor ('&' factor)*``,
``factor := id | true | false | '(' formula ')'``.
"""
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

from .core import (
    FALSE,
    TRUE,
    Abw,
    And,
    Atom,
    Automaton,
    Nbw,
    Or,
    PosFormula,
    disj,
    validate,
)
from .errors import Diagnostic, ParseError

HEADER = ("type", "alphabet", "states", "initial", "accepting")
_TOKEN = re.compile(r"\s*(\d+|true|false|[()&|]|\S)")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _int(text: str, line: int, what: str) -> int:
    if not text.isdigit():
        raise ParseError([Diagnostic(f"expected {what}, got {text!r}", line=line)])
    return int(text)


class _FormulaParser:
    def __init__(self, text: str, line: int):
        self.tokens = [m.group(1) for m in _TOKEN.finditer(text)]
        self.pos = 0
        self.line = line

    def fail(self, message: str):
        raise ParseError([Diagnostic(message, line=self.line)])

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of formula")
        self.pos += 1
        return tok

    def parse(self) -> PosFormula:
        phi = self.formula()
        if self.peek() is not None:
            self.fail(f"unexpected {self.peek()!r} in formula")
        return phi

    def formula(self) -> PosFormula:
        terms = [self.term()]
        while self.peek() == "|":
            self.take()
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Or(tuple(terms))

    def term(self) -> PosFormula:
        factors = [self.factor()]
        while self.peek() == "&":
            self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else And(tuple(factors))

    def factor(self) -> PosFormula:
        tok = self.take()
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if tok == "(":
            phi = self.formula()
            if self.take() != ")":
                self.fail("missing ')'")
            return phi
        if tok.isdigit():
            return Atom(int(tok))
        self.fail(f"unexpected {tok!r} in formula")


def parse_formula(text: str, line: int = 0) -> PosFormula:
    try:
        return _FormulaParser(text, line).parse()
    except RecursionError:
        raise ParseError([Diagnostic("formula nested too deeply", line=line)]) from None


def parse_text(text: str) -> Automaton:
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = _strip(raw)
        if body:
            lines.append((no, body))

    header: Dict[str, Tuple[int, str]] = {}
    for key, (no, body) in zip(HEADER, lines):
        name, sep, value = body.partition(":")
        if not sep or name.strip() != key:
            raise ParseError([Diagnostic(f"expected '{key}:' section", line=no)])
        header[key] = (no, value.strip())
    if len(header) < len(HEADER):
        missing = HEADER[len(header)]
        last = len(text.splitlines())
        raise ParseError([Diagnostic(f"missing '{missing}:' section", line=last)])

    no, kind = header["type"]
    if kind not in ("nbw", "abw"):
        raise ParseError([Diagnostic(f"unknown automaton type {kind!r}", line=no)])
    no, letters = header["alphabet"]
    alphabet = tuple(letters.split())
    if not alphabet:
        raise ParseError([Diagnostic("alphabet is empty", line=no)])
    no, count = header["states"]
    n = _int(count, no, "state count")
    if n < 1:
        raise ParseError([Diagnostic("automaton needs at least one state", line=no)])
    no, init = header["initial"]
    initial = _int(init, no, "initial state")
    no, acc = header["accepting"]
    accepting = [_int(tok, no, "accepting state") for tok in acc.split()]

    diags: List[Diagnostic] = []
    if initial >= n:
        diags.append(
            Diagnostic(
                "initial state out of range", state=initial, line=header["initial"][0]
            )
        )
    diags.extend(
        Diagnostic("accepting state out of range", state=s, line=no)
        for s in accepting
        if s >= n
    )

    nbw_table: Dict[Tuple[int, int], Set[int]] = {}
    abw_table: Dict[Tuple[int, int], PosFormula] = {}
    for no, body in lines[len(HEADER):]:
        left, arrow, right = body.partition("->")
        parts = left.split()
        if not arrow or len(parts) != 2:
            diags.append(Diagnostic("expected 'STATE LETTER -> ...'", line=no))
            continue
        src_text, letter = parts
        if not src_text.isdigit() or int(src_text) >= n:
            message = f"source state {src_text!r} out of range"
            diags.append(Diagnostic(message, line=no))
            continue
        src = int(src_text)
        if letter not in alphabet:
            diags.append(Diagnostic("unknown letter", src, letter, no))
            continue
        key = (src, alphabet.index(letter))
        try:
            if kind == "nbw":
                targets = {_int(tok, no, "target state") for tok in right.split()}
            else:
                phi = parse_formula(right, no)
                targets = set(phi.atoms())
        except ParseError as exc:
            diags.extend(exc.diagnostics)
            continue
        bad = sorted(t for t in targets if t >= n)
        if bad:
            message = f"transition target {bad[0]} out of range"
            diags.append(Diagnostic(message, src, letter, no))
        elif kind == "nbw":
            nbw_table.setdefault(key, set()).update(targets)
        else:
            old = abw_table.get(key)
            abw_table[key] = phi if old is None else disj([old, phi])
    if diags:
        raise ParseError(diags)

    if kind == "nbw":
        automaton: Automaton = Nbw.build(
            n,
            alphabet,
            initial,
            accepting,
            [(s, a, t) for (s, a), ts in nbw_table.items() for t in ts],
        )
    else:
        automaton = Abw.build(n, alphabet, initial, accepting, abw_table)
    problems = validate(automaton)
    if problems:
        raise ParseError(problems)
    return automaton


def parse(path: Union[str, Path]) -> Automaton:
    return parse_text(Path(path).read_text(encoding="utf-8"))


def serialize(automaton: Automaton, comments: Iterable[str] = ()) -> str:
    out = [f"# {c}" for c in comments]
    is_nbw = isinstance(automaton, Nbw)
    out.append(f"type: {'nbw' if is_nbw else 'abw'}")
    out.append(f"alphabet: {' '.join(automaton.alphabet)}")
    out.append(f"states: {automaton.state_count}")
    out.append(f"initial: {automaton.initial}")
    out.append("accepting:" + "".join(f" {s}" for s in sorted(automaton.accepting)))
    if automaton.names:
        out.extend(f"# {i} = {name}" for i, name in enumerate(automaton.names))
    for src in range(automaton.state_count):
        for a, letter in enumerate(automaton.alphabet):
            entry = automaton.delta[a][src]
            if is_nbw:
                if entry:
                    out.append(f"{src} {letter} -> {' '.join(map(str, sorted(entry)))}")
            elif entry != FALSE:
                out.append(f"{src} {letter} -> {entry}")
    return "\n".join(out) + "\n"

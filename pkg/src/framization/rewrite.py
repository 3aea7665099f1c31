"""Oriented rewriting of elements modulo a rule system.

Reduction is deterministic: a monomial is rewritten at its leftmost
matching position by the first rule (in list order) whose left-hand side
occurs there.  Every rule strictly decreases the term order of
:func:`framization.freealg.word_key`, so ordinary rules terminate.  A system may also carry *expansions*:
definitional substitutions of one letter (typically an inverse generator)
that do not respect the order and are only tried when no ordinary rule
matches.  All rewriting is bounded by ``max_steps`` per monomial.

Reducing ``lhs - rhs`` to zero proves ``lhs = rhs`` in the quotient
algebra; failure to reach zero proves nothing, since the shipped systems
are not known to be confluent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .freealg import (
    Context,
    Element,
    Kind,
    Letter,
    Word,
    join,
    normalize_word,
    word_key,
    word_str,
)
from .scalar import ONE, ZERO, Scalar

DEFAULT_MAX_STEPS = 10_000
ORDER_NAME = "deglex"
PRECEDENCE = ("t", "h", "g", "G", "T", "Tinv", "tau")


class OrientationError(ValueError):
    """A rule's left side is not strictly above every right-side word."""


class AlphabetError(ValueError):
    """An element uses letters the rule system does not know about."""


@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs: Word
    rhs: Element
    provenance: str = "user"

    def __post_init__(self):
        if not self.lhs:
            raise OrientationError(f"rule {self.name}: empty left-hand side")
        key = word_key(self.lhs)
        for word in self.rhs.terms:
            if word_key(word) >= key:
                raise OrientationError(
                    f"rule {self.name}: {word_str(word)} is not below {word_str(self.lhs)}"
                )

    def __str__(self):
        return f"{self.name}: {word_str(self.lhs)} -> {self.rhs}"


@dataclass(frozen=True)
class Expansion:
    """On-demand substitution of a single letter; exempt from the order."""

    name: str
    letter: Letter
    rhs: Element
    provenance: str = "user"


class Step(NamedTuple):
    word: Word
    position: int
    rule: str
    before: Element
    after: Element


@dataclass
class ReductionTrace:
    steps: list[Step]
    final: Element
    exhausted: bool = False

    def to_json(self) -> dict:
        return {
            "final": str(self.final),
            "exhausted": self.exhausted,
            "steps": [
                {"word": word_str(s.word), "position": s.position, "rule": s.rule,
                 "before": str(s.before), "after": str(s.after)}
                for s in self.steps
            ],
        }


class Verification(NamedTuple):
    verified: bool
    trace: ReductionTrace

    @property
    def residual(self) -> Element:
        return self.trace.final


class _Exhausted(Exception):
    pass


class RuleSystem:
    """An immutable, ordered collection of rewrite rules over one context.

    ``kinds`` lists the letter kinds the system's algebra has; elements
    using other letters are rejected.  ``meta`` records the presentation
    this system came from (tag and parameter values) for export.
    """

    def __init__(
        self,
        ctx: Context,
        rules: Iterable[RewriteRule],
        *,
        expansions: Iterable[Expansion] = (),
        kinds: Iterable[Kind] = tuple(Kind),
        max_steps: int = DEFAULT_MAX_STEPS,
        meta: dict | None = None,
    ):
        self.ctx = ctx
        self.rules: tuple[RewriteRule, ...] = tuple(rules)
        self.expansions: tuple[Expansion, ...] = tuple(expansions)
        self.kinds = frozenset(kinds)
        self.max_steps = max_steps
        self.meta = dict(meta or {})
        names = [r.name for r in self.rules] + [e.name for e in self.expansions]
        dup = {x for x in names if names.count(x) > 1}
        if dup:
            raise ValueError(f"duplicate rule names: {sorted(dup)}")
        for rule in self.rules:
            self._check_alphabet(rule.lhs, rule.name)
            if rule.rhs.ctx != ctx:
                raise AlphabetError(f"rule {rule.name} built over {rule.rhs.ctx}, not {ctx}")
            for word in rule.rhs.terms:
                self._check_alphabet(word, rule.name)
        self._index: dict[Letter, list[RewriteRule]] = {}
        for rule in self.rules:
            self._index.setdefault(rule.lhs[0], []).append(rule)
        self._expand = {e.letter: e for e in self.expansions}
        self._memo: dict[Word, dict[Word, Scalar]] = {}

    def _check_alphabet(self, word: Word, where: str = "element"):
        for letter in word:
            if letter.kind not in self.kinds:
                raise AlphabetError(f"{where}: letter {letter} is not in this algebra")
            self.ctx.check_letter(letter)

    def check(self, a: Element):
        if a.ctx != self.ctx:
            raise AlphabetError(f"element over {a.ctx}, system over {self.ctx}")
        for word in a.terms:
            self._check_alphabet(word)

    def rule(self, name: str) -> RewriteRule | Expansion:
        for r in self.rules + self.expansions:
            if r.name == name:
                return r
        raise KeyError(name)

    def with_rules(self, rules, expansions=None, **kw) -> "RuleSystem":
        return RuleSystem(
            self.ctx,
            rules,
            expansions=self.expansions if expansions is None else expansions,
            kinds=kw.get("kinds", self.kinds),
            max_steps=kw.get("max_steps", self.max_steps),
            meta=kw.get("meta", self.meta),
        )

    def with_max_steps(self, max_steps: int) -> "RuleSystem":
        return self.with_rules(self.rules, max_steps=max_steps)

    def __len__(self):
        return len(self.rules)

    def __repr__(self):
        tag = self.meta.get("kind", "custom")
        return f"<RuleSystem {tag} d={self.ctx.d} n={self.ctx.n}: {len(self.rules)} rules>"

    # -- single steps -----------------------------------------------------

    def match(self, word: Word):
        """Leftmost position and first rule matching there, else None."""
        index = self._index
        for p, letter in enumerate(word):
            bucket = index.get(letter)
            if bucket:
                for rule in bucket:
                    k = len(rule.lhs)
                    if word[p:p + k] == rule.lhs:
                        return p, rule
        if self._expand:
            for p, letter in enumerate(word):
                exp = self._expand.get(letter)
                if exp is not None:
                    return p, exp
        return None

    def rewrite_at(self, word: Word, p: int, rule) -> dict[Word, Scalar]:
        """Replace the rule's left side at position p by its right side."""
        k = len(rule.lhs) if isinstance(rule, RewriteRule) else 1
        return substitute_at(word, p, k, rule.rhs, self.ctx.d)

    def one_step(self, word: Word):
        found = self.match(word)
        if found is None:
            return None
        p, rule = found
        return p, rule, self.rewrite_at(word, p, rule)

    # -- normal forms -----------------------------------------------------

    def normal_form_word(self, word: Word, budget: int | None = None) -> dict[Word, Scalar]:
        memo = self._memo
        hit = memo.get(word)
        if hit is not None:
            return hit
        budget = self.max_steps if budget is None else budget
        stack = [word]
        on_path = {word}
        pending: dict[Word, dict[Word, Scalar]] = {}
        steps = 0
        while stack:
            w = stack[-1]
            if w in memo:
                stack.pop()
                on_path.discard(w)
                continue
            res = pending.get(w)
            if res is None:
                st = self.one_step(w)
                if st is None:
                    memo[w] = {w: ONE}
                    stack.pop()
                    on_path.discard(w)
                    continue
                steps += 1
                if steps > budget:
                    raise _Exhausted(w)
                res = pending[w] = st[2]
            child = next((u for u in res if u not in memo), None)
            if child is not None:
                if child in on_path:
                    raise _Exhausted(child)
                stack.append(child)
                on_path.add(child)
                continue
            out: dict[Word, Scalar] = {}
            for u, c in res.items():
                for v, cv in memo[u].items():
                    total = out.get(v)
                    total = c * cv if total is None else total + c * cv
                    if total.is_zero():
                        del out[v]
                    else:
                        out[v] = total
            memo[w] = out
            del pending[w]
            stack.pop()
            on_path.discard(w)
        return memo[word]

    def normal_form(self, a: Element) -> tuple[Element, bool]:
        """(reduced element, exhausted flag), computed monomial by monomial."""
        out: dict[Word, Scalar] = {}
        exhausted = False
        for word, coeff in a.terms.items():
            try:
                nf = self.normal_form_word(word)
            except _Exhausted:
                exhausted = True
                nf = {word: ONE}
            for v, cv in nf.items():
                total = out.get(v, ZERO) + coeff * cv
                if total.is_zero():
                    out.pop(v, None)
                else:
                    out[v] = total
        return Element._make(self.ctx, out), exhausted

    def is_irreducible(self, word: Word) -> bool:
        return self.match(word) is None

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "params": {"d": self.ctx.d, "n": self.ctx.n, **self.meta},
            "order": {"name": ORDER_NAME, "precedence": list(PRECEDENCE)},
            "max_steps": self.max_steps,
            "kinds": sorted(k.name for k in self.kinds),
            "rules": [
                {"name": r.name, "lhs": word_str(r.lhs), "rhs": str(r.rhs), "provenance": r.provenance}
                for r in self.rules
            ],
            "expansions": [
                {"name": e.name, "letter": str(e.letter), "rhs": str(e.rhs), "provenance": e.provenance}
                for e in self.expansions
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, doc: dict) -> "RuleSystem":
        from .parser import parse_element, parse_word

        params = dict(doc["params"])
        ctx = Context(params.pop("d"), params.pop("n"))
        rules = [
            RewriteRule(r["name"], parse_word(r["lhs"], ctx), parse_element(r["rhs"], ctx), r["provenance"])
            for r in doc["rules"]
        ]
        expansions = []
        for e in doc.get("expansions", []):
            (letter,) = parse_word(e["letter"], ctx)
            expansions.append(Expansion(e["name"], letter, parse_element(e["rhs"], ctx), e["provenance"]))
        kinds = [Kind[k] for k in doc.get("kinds", [k.name for k in Kind])]
        return cls(ctx, rules, expansions=expansions, kinds=kinds,
                   max_steps=doc.get("max_steps", DEFAULT_MAX_STEPS), meta=params)

    @classmethod
    def loads(cls, text: str) -> "RuleSystem":
        return cls.from_json(json.loads(text))


def substitute_at(word: Word, p: int, k: int, rhs: Element, d: int) -> dict[Word, Scalar]:
    left, right = word[:p], word[p + k:]
    out: dict[Word, Scalar] = {}
    for rw, c in rhs.terms.items():
        new = join(join(left, rw, d), right, d)
        prev = out.get(new)
        if prev is not None:
            c = prev + c
            if c.is_zero():
                del out[new]
                continue
        out[new] = c
    return out


def reduce(a: Element, sys: RuleSystem, *, trace: bool = False) -> ReductionTrace:
    """Reduce ``a`` modulo ``sys``.

    Without ``trace`` the result is assembled from memoized per-word normal
    forms.  With ``trace`` the element is rewritten one step at a time (the
    greatest reducible monomial first) and every step is recorded.  Both
    modes give the same final element whenever neither is exhausted.
    """
    sys.check(a)
    if not trace:
        final, exhausted = sys.normal_form(a)
        return ReductionTrace([], final, exhausted)
    steps: list[Step] = []
    current = a
    budget = sys.max_steps * max(1, len(a.terms))
    while True:
        target = None
        for word in current.words():
            found = sys.match(word)
            if found is not None:
                target = word, found
                break
        if target is None:
            return ReductionTrace(steps, current, False)
        if len(steps) >= budget:
            return ReductionTrace(steps, current, True)
        word, (p, rule) = target
        coeff = current.terms[word]
        replaced = sys.rewrite_at(word, p, rule)
        terms = dict(current.terms)
        del terms[word]
        for u, c in replaced.items():
            total = terms.get(u, ZERO) + coeff * c
            if total.is_zero():
                terms.pop(u, None)
            else:
                terms[u] = total
        after = Element._make(current.ctx, terms)
        steps.append(Step(word, p, rule.name, current, after))
        current = after


def verify_identity(lhs: Element, rhs: Element, sys: RuleSystem, *, trace: bool = False) -> Verification:
    """Check lhs = rhs by reducing the difference to zero."""
    tr = reduce(lhs - rhs, sys, trace=trace)
    return Verification(tr.final.is_zero() and not tr.exhausted, tr)


def extend_with_lemma(
    sys: RuleSystem,
    lhs: Word,
    rhs: Element,
    *,
    name: str | None = None,
    provenance: str = "lemma",
    evidence=None,
) -> RuleSystem:
    """Append the rule lhs -> rhs at the lowest priority.

    The identity must be justified: either ``verify_identity`` succeeds in
    ``sys``, or ``evidence`` is an axiom citation string starting with
    ``"axiom:"``, or ``evidence`` is a :class:`CriticalPair` whose reducts
    differ by a nonzero multiple of ``lhs - rhs``.
    """
    lhs = normalize_word(tuple(lhs), sys.ctx.d)
    rule = RewriteRule(name or f"lemma{len(sys.rules) + 1}", lhs, rhs, provenance)
    diff = Element.word(sys.ctx, lhs) - rhs
    if isinstance(evidence, str) and evidence.startswith("axiom:"):
        pass
    elif isinstance(evidence, CriticalPair):
        gap = evidence.left - evidence.right
        if gap.is_zero() or not _proportional(gap, diff):
            raise ValueError(f"critical pair {evidence.word_text} does not certify {rule}")
    elif not verify_identity(diff, Element.zero(sys.ctx), sys).verified:
        raise ValueError(f"cannot verify {rule} in {sys!r}")
    return sys.with_rules(sys.rules + (rule,))


def _proportional(a: Element, b: Element) -> bool:
    if set(a.terms) != set(b.terms):
        return False
    word = next(iter(a.terms))
    ratio = a.terms[word] / b.terms[word]
    return all(a.terms[w] == ratio * b.terms[w] for w in a.terms)


def orient(diff: Element, name: str, provenance: str = "lemma") -> RewriteRule:
    """Turn a nonzero element (meaning diff = 0) into a rule on its leading word."""
    lead = diff.leading_word()
    c = diff.terms[lead]
    rest = (diff - Element.word(diff.ctx, lead, c)).scale(-c.inverse())
    return RewriteRule(name, lead, rest, provenance)


# -- critical pairs --------------------------------------------------------


@dataclass
class CriticalPair:
    word: Word
    rules: tuple[str, str]
    kind: str  # "overlap", "inclusion" or "merge"
    left: Element
    right: Element
    joinable: bool

    @property
    def word_text(self) -> str:
        return word_str(self.word)

    def to_json(self) -> dict:
        return {
            "word": self.word_text,
            "rules": list(self.rules),
            "kind": self.kind,
            "left": str(self.left),
            "right": str(self.right),
            "joinable": self.joinable,
        }


@dataclass
class CriticalPairReport:
    pairs: list[CriticalPair]
    bound: int
    system: dict = field(default_factory=dict)

    @property
    def non_joinable(self) -> list[CriticalPair]:
        return [p for p in self.pairs if not p.joinable]

    def to_json(self) -> dict:
        return {
            "system": self.system,
            "bound": self.bound,
            "examined": len(self.pairs),
            "non_joinable": len(self.non_joinable),
            "pairs": [p.to_json() for p in self.pairs],
        }


def _overlaps(lhs1: Word, lhs2: Word) -> Iterable[tuple[str, int]]:
    """(kind, offset of lhs2 inside the overlap word)."""
    n1, n2 = len(lhs1), len(lhs2)
    for p in range(n1 - n2 + 1):
        if lhs1[p:p + n2] == lhs2:
            yield "inclusion", p
    for k in range(1, min(n1, n2)):
        if k < n2 and lhs1[n1 - k:] == lhs2[:k]:
            yield "overlap", n1 - k


def critical_pairs(sys: RuleSystem, max_overlap: int) -> CriticalPairReport:
    """Enumerate rule overlaps of length <= max_overlap and test joinability.

    Besides ordinary overlaps and inclusions, a rule whose left side starts
    or ends with a framing letter is paired with the built-in merging of
    adjacent framing letters (``kind == "merge"``).
    """
    d = sys.ctx.d
    pairs: list[CriticalPair] = []

    def settle(x: dict[Word, Scalar]) -> Element:
        return sys.normal_form(Element._make(sys.ctx, dict(x)))[0]

    def record(word, names, kind, left, right):
        lnf, rnf = settle(left), settle(right)
        pairs.append(CriticalPair(word, names, kind, lnf, rnf, lnf == rnf))

    for r1 in sys.rules:
        for r2 in sys.rules:
            for kind, p in _overlaps(r1.lhs, r2.lhs):
                if kind == "inclusion" and r1 is r2:
                    continue
                word = r1.lhs + r2.lhs[len(r1.lhs) - p:] if kind == "overlap" else r1.lhs
                if len(word) > max_overlap:
                    continue
                left = substitute_at(word, 0, len(r1.lhs), r1.rhs, d)
                right = substitute_at(word, p, len(r2.lhs), r2.rhs, d)
                record(word, (r1.name, r2.name), kind, left, right)
    if d > 1:
        for r in sys.rules:
            if len(r.lhs) + 1 > max_overlap:
                continue
            for edge in ("left", "right"):
                letter = r.lhs[0] if edge == "left" else r.lhs[-1]
                if letter.kind is not Kind.TPOW:
                    continue
                for a in range(1, d):
                    extra = Letter(Kind.TPOW, letter.index, a)
                    if edge == "left":
                        word = (extra,) + r.lhs
                        via_rule = substitute_at(r.lhs, 0, len(r.lhs), r.rhs, d)
                        via_rule = {join((extra,), w, d): c for w, c in via_rule.items()}
                    else:
                        word = r.lhs + (extra,)
                        via_rule = substitute_at(r.lhs, 0, len(r.lhs), r.rhs, d)
                        via_rule = {join(w, (extra,), d): c for w, c in via_rule.items()}
                    merged = {normalize_word(word, d): ONE}
                    record(word, ("merge", r.name), "merge", merged, _collect(via_rule))
    return CriticalPairReport(pairs, max_overlap, {"d": sys.ctx.d, "n": sys.ctx.n, **sys.meta})


def critical_pair_schema() -> dict:
    """The JSON schema that :meth:`CriticalPairReport.to_json` output satisfies."""
    from importlib.resources import files

    return json.loads(files("framization").joinpath("critical_pairs.schema.json").read_text())


def validate_critical_pair_report(doc: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` is not a valid report."""
    import jsonschema

    jsonschema.validate(doc, critical_pair_schema())


def _collect(terms: dict[Word, Scalar]) -> dict[Word, Scalar]:
    return {w: c for w, c in terms.items() if not c.is_zero()}

"""Finite Lp-structures and the product-measure family they carry.

A structure stores a base weight for each individual; the measure of a
set of n-tuples is the sum over its members of the product of their
component weights.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional

from lplogic.core import FIELD, OBJECT, LpError, Vocabulary, to_fraction
from lplogic.parser import parse_vocabulary
from lplogic.printer import format_rational, format_vocabulary


class FormatError(LpError):
    pass


class MeasureNotNormalized(LpError):
    pass


class ArityMismatch(LpError):
    pass


class InterpretationError(LpError):
    pass


class IoError(LpError):
    pass


@dataclass(frozen=True, eq=False)
class LpStructure:
    """Immutable finite Lp-structure.

    ``weights`` is the base measure on single individuals. Predicates map
    to sets of tuples (tuples of individual names, or of Fractions for
    field predicates). ``field_functions`` holds evaluation hooks for
    declared field functions; it is not serialized.
    """

    domain: tuple
    weights: Mapping[str, Fraction]
    predicates: Mapping[str, frozenset] = field(default_factory=dict)
    functions: Mapping[str, Mapping[tuple, str]] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)
    field_constants: Mapping[str, Fraction] = field(default_factory=dict)
    measuring: Mapping[str, Mapping[tuple, Fraction]] = field(default_factory=dict)
    field_functions: Mapping[str, Callable] = field(default_factory=dict)

    def __post_init__(self):
        if not self.domain:
            raise InterpretationError("the object domain must be nonempty")
        if len(set(self.domain)) != len(self.domain):
            raise InterpretationError("duplicate individual in domain")
        object.__setattr__(self, "domain", tuple(self.domain))
        weights = {a: to_fraction(w) for a, w in self.weights.items()}
        if set(weights) != set(self.domain):
            raise InterpretationError("the base measure must assign a weight to every individual, and only to them")
        for a, w in weights.items():
            if w < 0:
                raise MeasureNotNormalized(f"negative weight {w} on {a!r}")
        total = sum(weights.values(), Fraction(0))
        if total != 1:
            raise MeasureNotNormalized(f"base measure sums to {format_rational(total)}, not 1")
        object.__setattr__(self, "weights", weights)
        members = set(self.domain)
        object.__setattr__(self, "predicates", {
            name: frozenset(tuple(t) for t in ext) for name, ext in self.predicates.items()})
        for name, table in self.functions.items():
            for args, value in table.items():
                if value not in members or not set(args) <= members:
                    raise InterpretationError(f"function {name} leaves the domain at {args}")
        for name, value in self.constants.items():
            if value not in members:
                raise InterpretationError(f"constant {name} denotes unknown individual {value!r}")

    def __eq__(self, other):
        if not isinstance(other, LpStructure):
            return NotImplemented
        return (self.domain == other.domain and self.weights == other.weights
                and dict(self.predicates) == dict(other.predicates)
                and {k: dict(v) for k, v in self.functions.items()} == {k: dict(v) for k, v in other.functions.items()}
                and dict(self.constants) == dict(other.constants)
                and dict(self.field_constants) == dict(other.field_constants)
                and {k: dict(v) for k, v in self.measuring.items()} == {k: dict(v) for k, v in other.measuring.items()})

    __hash__ = None

    def weight(self, individual: str) -> Fraction:
        return self.weights[individual]

    def check_against(self, vocab: Vocabulary) -> None:
        """Raise unless every declared symbol has a total interpretation."""
        members = set(self.domain)
        for name, sorts in vocab.predicates.items():
            ext = self.predicates.get(name, frozenset())
            for t in ext:
                if len(t) != len(sorts):
                    raise InterpretationError(f"predicate {name}/{len(sorts)} holds of {t}")
                if sorts and sorts[0] is OBJECT and not set(t) <= members:
                    raise InterpretationError(f"predicate {name} holds of non-individuals {t}")
        for name, (args, result) in vocab.functions.items():
            if result is FIELD:
                if name not in self.field_functions:
                    raise InterpretationError(f"no evaluation hook for field function {name}")
                continue
            table = self.functions.get(name, {})
            for t in itertools.product(self.domain, repeat=len(args)):
                if t not in table:
                    raise InterpretationError(f"function {name} undefined at {t}")
        for name, arity in vocab.measures.items():
            table = self.measuring.get(name, {})
            for t in itertools.product(self.domain, repeat=arity):
                if t not in table:
                    raise InterpretationError(f"measuring function {name} undefined at {t}")
        for name, sort in vocab.constants.items():
            pool = self.constants if sort is OBJECT else self.field_constants
            if name not in pool:
                raise InterpretationError(f"constant {name} has no interpretation")


def measure(struct: LpStructure, n: int, tuples: Iterable) -> Fraction:
    """Product measure of a set of n-tuples over the domain."""
    if n < 1:
        raise ArityMismatch(f"tuple length must be positive, got {n}")
    w = struct.weights
    total = Fraction(0)
    for t in set(map(tuple, tuples)):
        if len(t) != n:
            raise ArityMismatch(f"expected {n}-tuples, got {t!r}")
        p = Fraction(1)
        for a in t:
            if a not in w:
                raise ArityMismatch(f"{a!r} is not an individual of the domain")
            p *= w[a]
        total += p
    return total


# ----------------------------------------------------------------------
# model files

_SECTIONS = ("vocabulary", "domain", "measure", "predicates", "functions",
             "constants", "measuring")
_HEADER = re.compile(r"^\[(\w+)\]$")
_APPLIED = re.compile(r"^(\w+)\s*\(([^)]*)\)\s*=\s*(\S+)$")


def read_sections(text: str, allowed=None) -> dict:
    """Split ``[section]``-headed text into ``{name: [(lineno, line), ...]}``."""
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            current = m.group(1)
            if allowed is not None and current not in allowed:
                raise FormatError(f"line {lineno}: unknown section [{current}]")
            if current in sections:
                raise FormatError(f"line {lineno}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise FormatError(f"line {lineno}: content before the first section header")
        sections[current].append((lineno, line))
    return sections


def _rational(text: str, lineno: int) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"line {lineno}: not a rational: {text!r}") from None


def _split_kv(line: str, lineno: int):
    if "=" not in line:
        raise FormatError(f"line {lineno}: expected 'name = value'")
    key, value = line.split("=", 1)
    return key.strip(), value.strip()


def _args(text: str) -> tuple:
    text = text.strip()
    return tuple(a.strip() for a in text.split(",")) if text else ()


def loads(text: str, hooks: Optional[Mapping[str, Callable]] = None):
    """Parse model-file text into ``(Vocabulary, LpStructure)``."""
    sec = read_sections(text, _SECTIONS)
    vocab_text = "\n".join(line for _, line in sec.get("vocabulary", []))
    try:
        vocab = parse_vocabulary(vocab_text)
    except LpError as e:
        raise FormatError(f"[vocabulary]: {e}") from None
    if "domain" not in sec:
        raise FormatError("missing [domain] section")
    domain = [tok for _, line in sec["domain"] for tok in line.split()]
    if "measure" in sec:
        weights = {}
        for lineno, line in sec["measure"]:
            name, value = _split_kv(line, lineno)
            if name in weights:
                raise FormatError(f"line {lineno}: weight of {name!r} given twice")
            weights[name] = _rational(value, lineno)
        missing = set(domain) - set(weights)
        if missing:
            raise FormatError(f"[measure] omits {sorted(missing)}")
    else:
        weights = {a: Fraction(1, len(domain)) for a in domain} if domain else {}

    predicates = {}
    for lineno, line in sec.get("predicates", []):
        name, value = _split_kv(line, lineno)
        sorts = vocab.predicates.get(name)
        if sorts is None:
            raise FormatError(f"line {lineno}: undeclared predicate {name!r}")
        ext = set()
        for tok in value.split():
            t = () if tok == "()" else tuple(tok.split(","))
            if sorts and sorts[0] is FIELD:
                t = tuple(_rational(x, lineno) for x in t)
            ext.add(t)
        predicates[name] = frozenset(ext)
    for name in vocab.predicates:
        predicates.setdefault(name, frozenset())

    functions: dict = {}
    measuring: dict = {}
    for section, target in (("functions", functions), ("measuring", measuring)):
        for lineno, line in sec.get(section, []):
            m = _APPLIED.match(line)
            if m is None:
                raise FormatError(f"line {lineno}: expected 'name(args) = value'")
            name, args, value = m.group(1), _args(m.group(2)), m.group(3)
            if section == "measuring":
                if name not in vocab.measures:
                    raise FormatError(f"line {lineno}: undeclared measuring function {name!r}")
                value = _rational(value, lineno)
            elif name not in vocab.functions:
                raise FormatError(f"line {lineno}: undeclared function {name!r}")
            target.setdefault(name, {})[args] = value

    constants, field_constants = {}, {}
    for lineno, line in sec.get("constants", []):
        name, value = _split_kv(line, lineno)
        sort = vocab.constants.get(name)
        if sort is None:
            raise FormatError(f"line {lineno}: undeclared constant {name!r}")
        if sort is FIELD:
            field_constants[name] = _rational(value, lineno)
        else:
            constants[name] = value

    try:
        struct = LpStructure(tuple(domain), weights, predicates, functions, constants,
                             field_constants, measuring, dict(hooks or {}))
    except MeasureNotNormalized:
        raise
    except LpError as e:
        raise FormatError(str(e)) from None
    try:
        struct.check_against(vocab)
    except LpError as e:
        raise FormatError(str(e)) from None
    return vocab, struct


def read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot read {path}: {e.strerror}") from None


def load(path, hooks: Optional[Mapping[str, Callable]] = None):
    return loads(read_text(path), hooks)


def _tuple_text(t: tuple) -> str:
    if not t:
        return "()"
    return ",".join(format_rational(x) if isinstance(x, Fraction) else x for x in t)


def dumps(vocab: Vocabulary, struct: LpStructure) -> str:
    out = ["[vocabulary]", *format_vocabulary(vocab), "", "[domain]", " ".join(struct.domain),
           "", "[measure]"]
    out += [f"{a} = {format_rational(struct.weights[a])}" for a in struct.domain]
    order = {a: i for i, a in enumerate(struct.domain)}

    def key(t):
        return tuple(order.get(x, 0) if not isinstance(x, Fraction) else x for x in t)

    out += ["", "[predicates]"]
    for name in vocab.predicates:
        ext = sorted(struct.predicates.get(name, ()), key=key)
        out.append(f"{name} = {' '.join(_tuple_text(t) for t in ext)}".rstrip())
    if struct.functions:
        out += ["", "[functions]"]
        for name, table in struct.functions.items():
            for args in sorted(table, key=key):
                out.append(f"{name}({', '.join(args)}) = {table[args]}")
    if struct.constants or struct.field_constants:
        out += ["", "[constants]"]
        out += [f"{k} = {v}" for k, v in struct.constants.items()]
        out += [f"{k} = {format_rational(v)}" for k, v in struct.field_constants.items()]
    if struct.measuring:
        out += ["", "[measuring]"]
        for name, table in struct.measuring.items():
            for args in sorted(table, key=key):
                out.append(f"{name}({', '.join(args)}) = {format_rational(table[args])}")
    return "\n".join(out) + "\n"


def save(vocab: Vocabulary, struct: LpStructure, path) -> None:
    try:
        Path(path).write_text(dumps(vocab, struct), encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write {path}: {e.strerror}") from None


# ----------------------------------------------------------------------
# random structures

@dataclass
class RandomModelParams:
    domain_size: int = 4
    predicates: Mapping[str, int] = field(default_factory=lambda: {"P": 1, "Q": 1, "R": 2})
    weights: str = "random"        # 'uniform' or 'random'
    constants: int = 1
    measures: Mapping[str, int] = field(default_factory=dict)
    max_weight: int = 4


def generate_random(seed: int, params: Optional[RandomModelParams] = None):
    """Deterministic random structure: ``(Vocabulary, LpStructure)``.

    Random weights are small integers normalized to sum 1; zero weights
    are possible (but never all of them).
    """
    params = params or RandomModelParams()
    if params.domain_size < 1:
        raise ValueError("domain_size must be at least 1")
    if params.weights not in ("uniform", "random"):
        raise ValueError(f"unknown weight style {params.weights!r}")
    rng = random.Random(seed)
    domain = tuple(f"a{i}" for i in range(params.domain_size))
    vocab = Vocabulary()
    predicates = {}
    for name, arity in params.predicates.items():
        vocab.declare_predicate(name, arity)
        predicates[name] = frozenset(
            t for t in itertools.product(domain, repeat=arity) if rng.random() < 0.5)
    if params.weights == "uniform":
        weights = {a: Fraction(1, len(domain)) for a in domain}
    else:
        raw = [rng.randint(0, params.max_weight) for _ in domain]
        if not any(raw):
            raw[rng.randrange(len(raw))] = 1
        total = sum(raw)
        weights = {a: Fraction(r, total) for a, r in zip(domain, raw)}
    constants = {}
    for i in range(params.constants):
        vocab.declare_constant(f"c{i}")
        constants[f"c{i}"] = rng.choice(domain)
    measuring = {}
    for name, arity in params.measures.items():
        vocab.declare_measure(name, arity)
        measuring[name] = {t: Fraction(rng.randint(0, 5))
                           for t in itertools.product(domain, repeat=arity)}
    struct = LpStructure(domain, weights, predicates, {}, constants, {}, measuring)
    struct.check_against(vocab)
    return vocab, struct

"""Finite quasi-sets over a declared universe.

m-atoms carry no identity, so a qset stores its m-atom content as a map
``species -> count``; that count map is the whole observable content. M-atoms
are ordinary labelled urelements and nested qsets are kept as a set.

Values are immutable. Two qsets compare equal exactly when they are
weakly-extensionally equivalent, and then they also serialize to the same
bytes.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping

from .errors import (
    CardinalOutOfRange,
    IdentityUndefined,
    LimitExceeded,
    NotIndistinguishable,
    NotMember,
    ParseError,
    PurityRequired,
    UniverseMismatch,
)

FERMIONIC = "fermionic"
BOSONIC = "bosonic"

MAX_DEPTH = 8
POWER_EXPONENT_LIMIT = 62
CATALOG_LIMIT = 10**6

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")


@dataclass(frozen=True)
class Species:
    id: str
    kind: str = BOSONIC

    def __post_init__(self):
        if not _IDENT.match(self.id):
            raise ValueError(f"bad species id {self.id!r}")
        if self.kind not in (FERMIONIC, BOSONIC):
            raise ValueError(f"species kind must be {FERMIONIC!r} or {BOSONIC!r}, got {self.kind!r}")

    @property
    def fermionic(self) -> bool:
        return self.kind == FERMIONIC


@dataclass(frozen=True, init=False)
class Universe:
    """A finite population of m-atoms (counted per species) and M-atom labels."""

    species: tuple[Species, ...]
    counts: tuple[int, ...]
    m_labels: frozenset[str]

    def __init__(self, species_counts: Mapping[Species, int] | Iterable[tuple[Species, int]] = (),
                 m_labels: Iterable[str] = ()):
        items = species_counts.items() if isinstance(species_counts, Mapping) else species_counts
        pairs = sorted(((s, int(n)) for s, n in items), key=lambda p: p[0].id)
        ids = [s.id for s, _ in pairs]
        if len(set(ids)) != len(ids):
            raise ValueError("species ids must be unique within a universe")
        for s, n in pairs:
            if n < 0:
                raise ValueError(f"negative count for species {s.id!r}")
        labels = frozenset(m_labels)
        for lab in labels:
            if not _IDENT.match(lab):
                raise ValueError(f"bad M-atom label {lab!r}")
        clash = labels.intersection(ids)
        if clash:
            raise ValueError(f"names used both as species and M-atom label: {sorted(clash)}")
        object.__setattr__(self, "species", tuple(s for s, _ in pairs))
        object.__setattr__(self, "counts", tuple(n for _, n in pairs))
        object.__setattr__(self, "m_labels", labels)

    @property
    def species_counts(self) -> dict[Species, int]:
        return dict(zip(self.species, self.counts))

    def get_species(self, sid: str) -> Species:
        for s in self.species:
            if s.id == sid:
                return s
        raise KeyError(f"species {sid!r} not declared in universe")

    def count(self, sid: str) -> int:
        for s, n in zip(self.species, self.counts):
            if s.id == sid:
                return n
        raise KeyError(f"species {sid!r} not declared in universe")

    def m_atom(self, sid: str) -> ExtRef:
        if self.count(sid) == 0:
            raise NotMember(f"universe has no m-atoms of species {sid!r}")
        return ExtRef("m", sid, self)

    def M_atom(self, label: str) -> ExtRef:
        if label not in self.m_labels:
            raise NotMember(f"M-atom {label!r} not in universe")
        return ExtRef("M", label, self)

    def qset(self, m: Mapping[str, int] | None = None, labels: Iterable[str] = (),
             subs: Iterable[Qset] = ()) -> Qset:
        return Qset(self, m, labels, subs)

    def atoms(self) -> Iterator[ExtRef]:
        """One reference per m-atom class (species present) and per M-atom."""
        for s, n in zip(self.species, self.counts):
            if n:
                yield ExtRef("m", s.id, self)
        for lab in sorted(self.m_labels):
            yield ExtRef("M", lab, self)


@dataclass(frozen=True, init=False)
class Qset:
    """An identity-free collection inside one universe.

    ``m_part`` is a sorted tuple of ``(species_id, count)`` with positive
    counts, ``labels`` the M-atoms and ``subs`` the nested qsets. The owning
    universe is carried along but takes no part in equality.
    """

    m_part: tuple[tuple[str, int], ...]
    labels: frozenset[str]
    subs: frozenset[Qset]
    universe: Universe = field(compare=False, repr=False)

    def __init__(self, universe: Universe, m: Mapping[str, int] | None = None,
                 labels: Iterable[str] = (), subs: Iterable[Qset] = ()):
        m = dict(m or {})
        for sid, n in m.items():
            if not isinstance(n, int) or n < 0:
                raise ValueError(f"count for {sid!r} must be a non-negative integer")
            avail = universe.count(sid)
            if n > avail:
                raise ValueError(f"{n} m-atoms of {sid!r} requested, universe has {avail}")
        labels = frozenset(labels)
        missing = labels - universe.m_labels
        if missing:
            raise NotMember(f"M-atoms not in universe: {sorted(missing)}")
        subs = frozenset(subs)
        for s in subs:
            if s.universe != universe:
                raise UniverseMismatch("nested qset belongs to another universe")
        object.__setattr__(self, "m_part", tuple(sorted((k, v) for k, v in m.items() if v)))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "subs", subs)
        object.__setattr__(self, "universe", universe)
        if self.depth > MAX_DEPTH:
            raise LimitExceeded(f"qset nesting depth {self.depth} exceeds {MAX_DEPTH}")

    @property
    def counts(self) -> dict[str, int]:
        return dict(self.m_part)

    def count(self, sid: str) -> int:
        return dict(self.m_part).get(sid, 0)

    @property
    def M_part(self) -> tuple:
        return tuple(sorted(self.labels)) + tuple(sorted(self.subs, key=serialize))

    @property
    def pure(self) -> bool:
        return not self.labels and not self.subs

    @property
    def depth(self) -> int:
        return 1 + max((s.depth for s in self.subs), default=0)

    @property
    def has_m_atoms(self) -> bool:
        """True if m-atoms occur anywhere in the transitive closure."""
        return bool(self.m_part) or any(s.has_m_atoms for s in self.subs)

    @property
    def is_set(self) -> bool:
        return not self.has_m_atoms

    def refs(self) -> Iterator[ExtRef]:
        """One reference per indistinguishability class of elements."""
        for sid, _ in self.m_part:
            yield ExtRef("m", sid, self.universe)
        for lab in sorted(self.labels):
            yield ExtRef("M", lab, self.universe)
        for s in sorted(self.subs, key=serialize):
            yield ExtRef("Q", s, self.universe)

    def __repr__(self):
        return f"Qset{serialize(self)}"


@dataclass(frozen=True, eq=False)
class ExtRef:
    """A reference to an element: an m-atom occurrence, an M-atom or a qset.

    An m-atom occurrence records only its species; there is deliberately no
    index that could tell two occurrences apart.
    """

    sort: str
    value: object
    universe: Universe = field(repr=False)

    def __post_init__(self):
        if self.sort not in ("m", "M", "Q"):
            raise ValueError(f"unknown sort {self.sort!r}")

    @property
    def is_m(self) -> bool:
        return self.sort == "m"

    @property
    def is_M(self) -> bool:
        return self.sort == "M"

    @property
    def is_qset(self) -> bool:
        return self.sort == "Q"

    @property
    def species(self) -> str:
        if not self.is_m:
            raise TypeError("only m-atom occurrences have a species")
        return self.value

    @property
    def label(self) -> str:
        if not self.is_M:
            raise TypeError("only M-atoms have a label")
        return self.value

    @property
    def qset(self) -> Qset:
        if not self.is_qset:
            raise TypeError("reference is not a qset")
        return self.value

    def __eq__(self, other):
        if isinstance(other, ExtRef):
            return identical(self, other)
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        if self.is_m:
            return f"m-atom<{self.value}>"
        if self.is_M:
            return f"M-atom<{self.value}>"
        return f"ref{self.value!r}"


def qref(x: Qset) -> ExtRef:
    return ExtRef("Q", x, x.universe)


def _same_universe(a: ExtRef, b: ExtRef):
    if a.universe != b.universe:
        raise UniverseMismatch("references come from different universes")


def identical(a: ExtRef, b: ExtRef) -> bool:
    """Extensional identity, defined only away from m-atoms."""
    for r in (a, b):
        if r.is_m:
            raise IdentityUndefined("identity is not defined for m-atoms")
        if r.is_qset and r.qset.has_m_atoms:
            raise IdentityUndefined("identity is not defined for qsets with m-atom content")
    _same_universe(a, b)
    if a.sort != b.sort:
        return False
    return a.value == b.value


def indist(a: ExtRef, b: ExtRef) -> bool:
    """The indistinguishability relation; an equivalence on each universe."""
    _same_universe(a, b)
    if a.sort != b.sort:
        return False
    if a.is_m:
        return a.species == b.species
    if a.is_M:
        return a.label == b.label
    return weak_ext_equiv(a.qset, b.qset)


def qc(x: Qset) -> int:
    return sum(n for _, n in x.m_part) + len(x.labels) + len(x.subs)


def weak_ext_equiv(x: Qset, y: Qset) -> bool:
    # Canonical form makes equivalence structural; recursion is bounded by MAX_DEPTH.
    return x.m_part == y.m_part and x.labels == y.labels and x.subs == y.subs


def weak_pair(a: ExtRef, b: ExtRef, u: Universe) -> Qset:
    """The qset ``[a, b]`` of everything in ``u`` indistinguishable from a or b."""
    for r in (a, b):
        if r.universe != u:
            raise UniverseMismatch("reference is not from the given universe")
    m: dict[str, int] = {}
    labels: set[str] = set()
    subs: set[Qset] = set()
    for r in (a, b):
        if r.is_m:
            m[r.species] = u.count(r.species)
        elif r.is_M:
            labels.add(r.label)
        else:
            subs.add(r.qset)
    return Qset(u, m, labels, subs)


Predicate = Callable[[ExtRef], "bool | int"]


def separate(x: Qset, pred: Predicate) -> Qset:
    """The sub-qset ``[t in x : pred(t)]``.

    ``pred`` sees one reference per indistinguishability class. For an m-atom
    class it may answer with a bool (the whole class or none of it) or with an
    integer ``n``, meaning that ``n`` members of the class satisfy it without
    saying which.
    """
    m: dict[str, int] = {}
    labels = []
    subs = []
    for ref in x.refs():
        ans = pred(ref)
        if ref.is_m:
            have = x.count(ref.species)
            if isinstance(ans, bool):
                take = have if ans else 0
            elif isinstance(ans, int):
                if not 0 <= ans <= have:
                    raise ValueError(f"predicate selected {ans} of {have} {ref.species!r} atoms")
                take = ans
            else:
                take = have if ans else 0
            if take:
                m[ref.species] = take
        elif ans:
            (labels if ref.is_M else subs).append(ref.value)
    return Qset(x.universe, m, labels, subs)


def is_subqset(y: Qset, x: Qset) -> bool:
    if y.universe != x.universe:
        raise UniverseMismatch("qsets come from different universes")
    return (all(n <= x.count(s) for s, n in y.m_part)
            and y.labels <= x.labels and y.subs <= x.subs)


def difference(x: Qset, y: Qset) -> Qset:
    """``x - y``; m-atom counts subtract and saturate at zero."""
    if y.universe != x.universe:
        raise UniverseMismatch("qsets come from different universes")
    m = {s: max(n - y.count(s), 0) for s, n in x.m_part}
    return Qset(x.universe, m, x.labels - y.labels, x.subs - y.subs)


def disjoint_union(x: Qset, y: Qset) -> Qset:
    """Union of two qsets known to share no m-atoms; m-atom counts add."""
    if y.universe != x.universe:
        raise UniverseMismatch("qsets come from different universes")
    m = x.counts
    for s, n in y.m_part:
        m[s] = m.get(s, 0) + n
    return Qset(x.universe, m, x.labels | y.labels, x.subs | y.subs)


def _bounded_compositions(total: int, caps: list[int]) -> Iterator[tuple[int, ...]]:
    """Vectors ``c`` with ``0 <= c[i] <= caps[i]`` and ``sum(c) == total``, descending."""
    if not caps:
        if total == 0:
            yield ()
        return
    rest = sum(caps[1:])
    for first in range(min(total, caps[0]), max(total - rest, 0) - 1, -1):
        for tail in _bounded_compositions(total - first, caps[1:]):
            yield (first,) + tail


def sub_qsets_of_card(x: Qset, beta: int, limit: int = CATALOG_LIMIT) -> list[Qset]:
    """All sub-qsets of ``x`` with quasi-cardinal ``beta``, one per equivalence class."""
    total = qc(x)
    if beta < 0 or beta > total:
        raise CardinalOutOfRange(f"no sub-qset of quasi-cardinal {beta} in a qset of {total}")
    species = [s for s, _ in x.m_part]
    caps = [n for _, n in x.m_part]
    others = sorted(x.labels) + sorted(x.subs, key=serialize)
    out = []
    for j in range(min(beta, len(others)), -1, -1):
        if beta - j > sum(caps):
            continue
        for chosen in itertools.combinations(others, j):
            labs = [o for o in chosen if isinstance(o, str)]
            subs = [o for o in chosen if isinstance(o, Qset)]
            for vec in _bounded_compositions(beta - j, caps):
                out.append(Qset(x.universe, dict(zip(species, vec)), labs, subs))
                if len(out) > limit:
                    raise LimitExceeded(f"sub-qset catalog exceeds {limit} entries")
    return out


def power_qc(x: Qset, limit: int = POWER_EXPONENT_LIMIT) -> tuple[int, int]:
    """Return ``(2**qc(x), number of observationally distinct sub-qsets)``.

    The two differ as soon as some species occurs twice or more: the theory
    posits ``2**qc`` sub-qsets but cannot show the unit ones are distinct, so
    only the count vectors are observable.
    """
    n = qc(x)
    if n > limit:
        raise LimitExceeded(f"quasi-cardinal {n} exceeds power exponent limit {limit}")
    distinct = math.prod(c + 1 for _, c in x.m_part) * 2 ** (len(x.labels) + len(x.subs))
    return 2**n, distinct


def strong_singleton(a: ExtRef, u: Universe) -> Qset:
    """A sub-qset of ``[a]`` with quasi-cardinal 1."""
    if a.universe != u:
        raise UniverseMismatch("reference is not from the given universe")
    if not a.is_m:
        raise TypeError("strong singletons are taken of m-atoms")
    return Qset(u, {a.species: 1})


def _require_pure(*xs: Qset):
    for x in xs:
        if not x.pure:
            raise PurityRequired(f"{x!r} is not a pure qset")


def similar(x: Qset, y: Qset) -> bool:
    """Every element of x is indistinguishable from every element of y."""
    _require_pure(x, y)
    if not x.m_part or not y.m_part:
        return True
    return len(x.m_part) == 1 and len(y.m_part) == 1 and x.m_part[0][0] == y.m_part[0][0]


def qsimilar(x: Qset, y: Qset) -> bool:
    return similar(x, y) and qc(x) == qc(y)


def ip_exchange(x: Qset, z: ExtRef, w: ExtRef) -> Qset:
    """Swap a strong singleton of ``z`` in ``x`` for one of ``w``.

    Returns ``(x - z') | w'``. Since ``z`` and ``w`` are indistinguishable,
    the result is always weakly-extensionally equivalent to ``x``.
    """
    if z.universe != x.universe or w.universe != x.universe:
        raise UniverseMismatch("references come from a different universe than the qset")
    if not z.is_m or x.count(z.species) == 0:
        raise NotMember(f"{z!r} is not an m-atom of {x!r}")
    if not indist(z, w):
        raise NotIndistinguishable(f"{z!r} and {w!r} are distinguishable")
    removed = difference(x, strong_singleton(z, x.universe))
    return disjoint_union(removed, strong_singleton(w, x.universe))


# canonical text form: "[e:3,p:1,A,B,[...]]" - species counts sorted by id,
# then M-labels sorted, then nested qsets sorted by their own serialization


def serialize(x: Qset) -> str:
    items = [f"{s}:{n}" for s, n in x.m_part]
    items += sorted(x.labels)
    items += sorted(serialize(s) for s in x.subs)
    return "[" + ",".join(items) + "]"


def to_bytes(x: Qset) -> bytes:
    return serialize(x).encode("ascii")


_TOKEN = re.compile(r"\s*(?:(\[)|(\])|(,)|([A-Za-z_][A-Za-z0-9_.\-]*)(?::(\d+))?)")


def parse_qset(text: str, u: Universe) -> Qset:
    """Inverse of :func:`serialize`. Outer brackets are optional at top level."""
    text = text.strip()
    if not text.startswith("["):
        text = "[" + text + "]"
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} in qset {text!r}")
        tokens.append(mt.groups())
        pos = mt.end()

    def parse(i: int) -> tuple[Qset, int]:
        if tokens[i][0] is None:
            raise ParseError(f"expected '[' in qset {text!r}")
        i += 1
        m: dict[str, int] = {}
        labels, subs = [], []
        expect_item = True
        while i < len(tokens):
            lb, rb, comma, name, num = tokens[i]
            if rb:
                return Qset(u, m, labels, subs), i + 1
            if comma:
                if expect_item:
                    raise ParseError(f"empty element in qset {text!r}")
                expect_item = True
                i += 1
                continue
            if not expect_item:
                raise ParseError(f"missing ',' in qset {text!r}")
            if lb:
                sub, i = parse(i)
                subs.append(sub)
            elif num is not None:
                if name in m:
                    raise ParseError(f"species {name!r} listed twice in qset {text!r}")
                m[name] = int(num)
                i += 1
            else:
                labels.append(name)
                i += 1
            expect_item = False
        raise ParseError(f"unterminated qset {text!r}")

    try:
        q, end = parse(0)
    except (KeyError, ValueError, NotMember, LimitExceeded) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"invalid qset {text!r}: {exc}") from exc
    if end != len(tokens):
        raise ParseError(f"trailing input after qset {text!r}")
    return q

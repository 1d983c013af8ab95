"""Quantum particle systems <P, calP, F, S, R> and their axioms Q1-Q10.

Sub-collections of P are named so that two equivalent collections (say two
single electrons) can still be paired with different states. The sodium and
helium models are provided as presets.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BinningIncomplete, StructureError
from .qset import (
    FERMIONIC,
    Qset,
    Species,
    Universe,
    difference,
    disjoint_union,
    is_subqset,
    qc,
    separate,
)

AXIOMS = tuple(f"Q{i}" for i in range(1, 11))

FERMION = "fermion"
BOSON = "boson"


@dataclass(frozen=True, order=True)
class StateId:
    rank: int
    id: str

    def __str__(self):
        return self.id


@dataclass(frozen=True, init=False)
class StateSet:
    """Quantum states kept in rank order."""

    states: tuple[StateId, ...]

    def __init__(self, states: Iterable[StateId | tuple[str, int] | str]):
        out = []
        for i, s in enumerate(states):
            if isinstance(s, StateId):
                out.append(s)
            elif isinstance(s, str):
                out.append(StateId(i + 1, s))
            else:
                sid, rank = s
                out.append(StateId(int(rank), sid))
        object.__setattr__(self, "states", tuple(sorted(out)))

    @classmethod
    def numbered(cls, prefix: str, n: int) -> StateSet:
        return cls(StateId(i, f"{prefix}{i}") for i in range(1, n + 1))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.states)

    def __contains__(self, sid: str) -> bool:
        return sid in self.ids

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)


@dataclass(frozen=True)
class Bin:
    states: tuple[str, ...]
    energy: float

    @property
    def k(self) -> int:
        return len(self.states)


@dataclass(frozen=True, init=False)
class EnergyBinning:
    """Disjoint groups of states, each with one energy; energies strictly increase."""

    bins: tuple[Bin, ...]

    def __init__(self, bins: Iterable[Bin | tuple[Sequence[str], float]]):
        out = [b if isinstance(b, Bin) else Bin(tuple(b[0]), float(b[1])) for b in bins]
        seen: set[str] = set()
        for i, b in enumerate(out):
            if not b.states:
                raise StructureError(f"bin {i} has no states")
            if not math.isfinite(b.energy):
                raise StructureError(f"bin {i} has non-finite energy")
            if len(set(b.states)) != len(b.states):
                raise StructureError(f"bin {i} lists a state twice")
            dup = seen.intersection(b.states)
            if dup:
                raise StructureError(f"bins overlap on states {sorted(dup)}")
            seen.update(b.states)
            if i and not out[i - 1].energy < b.energy:
                raise StructureError("bin energies must be strictly increasing")
        object.__setattr__(self, "bins", tuple(out))

    def __iter__(self):
        return iter(self.bins)

    def __len__(self):
        return len(self.bins)


@dataclass(frozen=True)
class Verdict:
    axiom: str
    passed: bool
    witness: str | None = None

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return f"{self.axiom}: {status}" + (f" ({self.witness})" if self.witness else "")


@dataclass(frozen=True)
class CoarsePair:
    part: Qset
    states: tuple[str, ...]
    energy: float | None = None

    @property
    def occupation(self) -> int:
        return qc(self.part)


@dataclass(frozen=True)
class ParticleSystem:
    """The structure <P, calP, F, S, R>.

    ``parts`` is calP as ``(name, qset)`` pairs, ``R`` pairs part names with
    state ids, and ``fermions`` is the predicate F as a set of species ids
    (``None`` derives it from the declared species kinds).
    """

    universe: Universe
    P: Qset
    parts: tuple[tuple[str, Qset], ...]
    S: StateSet
    R: tuple[tuple[str, str], ...]
    fermions: frozenset[str] | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple((str(n), p) for n, p in self.parts))
        object.__setattr__(self, "R", tuple((str(p), str(s)) for p, s in self.R))
        if self.fermions is None:
            object.__setattr__(self, "fermions", frozenset(
                s.id for s in self.universe.species if s.kind == FERMIONIC))
        else:
            object.__setattr__(self, "fermions", frozenset(self.fermions))

    @property
    def part_map(self) -> dict[str, Qset]:
        return dict(self.parts)

    def is_fermion(self, sid: str) -> bool:
        return sid in self.fermions

    def with_part(self, name: str, q: Qset) -> ParticleSystem:
        """Copy with part ``name`` replaced (or added)."""
        parts = [(n, q if n == name else p) for n, p in self.parts]
        if name not in self.part_map:
            parts.append((name, q))
        return ParticleSystem(self.universe, self.P, tuple(parts), self.S, self.R,
                              self.fermions, self.name)

    def with_pairs(self, R: Iterable[tuple[str, str]]) -> ParticleSystem:
        return ParticleSystem(self.universe, self.P, self.parts, self.S, tuple(R),
                              self.fermions, self.name)


def classify(species: Species) -> str:
    """Every m-atom species is either a fermion or a boson, never both."""
    return FERMION if species.kind == FERMIONIC else BOSON


def _check_structure(sys: ParticleSystem):
    if not isinstance(sys.P, Qset) or sys.P.universe != sys.universe:
        raise StructureError("P must be a qset of the system's universe")
    names = [n for n, _ in sys.parts]
    if len(set(names)) != len(names):
        raise StructureError("part names must be unique")
    for n, p in sys.parts:
        if not isinstance(p, Qset) or p.universe != sys.universe:
            raise StructureError(f"part {n!r} is not a qset of the system's universe")
    ids = [s.id for s in sys.S]
    if len(set(ids)) != len(ids):
        raise StructureError("state ids must be unique")


def _per_state(sys: ParticleSystem) -> dict[str, list[str]]:
    at: dict[str, list[str]] = defaultdict(list)
    for p, s in sys.R:
        at[s].append(p)
    return at


def validate(sys: ParticleSystem) -> list[Verdict]:
    """Check each axiom Q1-Q10 independently; one verdict per axiom.

    A failing verdict carries a witness describing the violation. Malformed
    input (duplicate names, foreign qsets) raises StructureError instead.
    """
    _check_structure(sys)
    u = sys.universe
    parts = sys.part_map
    out = []

    # Q1: qsets here are finite by construction
    out.append(Verdict("Q1", isinstance(qc(sys.P), int)))

    out.append(Verdict("Q2", sys.P.pure,
                       None if sys.P.pure else f"P contains non-m-atoms {sorted(sys.P.labels)}"))

    bad = [n for n, p in sys.parts if not is_subqset(p, sys.P)]
    out.append(Verdict("Q3", not bad, f"not sub-qsets of P: {bad}" if bad else None))

    declared = {s.id: s for s in u.species}
    w = None
    for sid in sorted(sys.fermions):
        if sid not in declared:
            w = f"F holds of {sid!r}, which is not an m-atom species"
            break
        if declared[sid].kind != FERMIONIC:
            w = f"F holds of {sid!r} but its species is declared bosonic"
            break
    if w is None:
        for sid in sorted(declared):
            if declared[sid].kind == FERMIONIC and sid not in sys.fermions:
                w = f"species {sid!r} is fermionic but F does not hold of it"
                break
    out.append(Verdict("Q4", w is None, w))

    ranks = [s.rank for s in sys.S]
    dup = sorted({r for r in ranks if ranks.count(r) > 1})
    out.append(Verdict("Q5", not dup, f"states share rank {dup}" if dup else None))

    w = None
    for p, s in sys.R:
        if p not in parts:
            w = f"pair [{p},{s}] names an unknown part"
            break
        if s not in sys.S:
            w = f"pair [{p},{s}] names an unknown state"
            break
    if w is None:
        unpaired = [n for n in parts if n not in {p for p, _ in sys.R}]
        if unpaired:
            w = f"parts not paired with any state: {unpaired}"
    out.append(Verdict("Q6", w is None, w))

    w = None
    for sid, n in sys.P.m_part:
        covered = sum(p.count(sid) for p in parts.values())
        if covered < n:
            w = f"{n - covered} of {n} {sid!r} atoms lie in no part"
            break
    out.append(Verdict("Q7", w is None, w))

    at = _per_state(sys)
    w = None
    for s, names in at.items():
        sizes = [qc(parts[n]) for n in names if n in parts]
        if sizes and min(sizes) != max(sizes):
            w = f"state {s} is paired with collections of sizes {sorted(sizes)}"
            break
    out.append(Verdict("Q8", w is None, w))

    w = None
    states_of: dict[str, set[str]] = defaultdict(set)
    for p, s in sys.R:
        if p in parts and qc(parts[p]) > 0:
            states_of[p].add(s)
    for p in sorted(states_of):
        if len(states_of[p]) > 1:
            w = f"part {p} occupies states {sorted(states_of[p])}"
            break
    if w is None:
        # no identities to compare, so disjointness is a supply check:
        # each state uses at least the largest part paired with it
        for sid, n in sys.P.m_part:
            used = sum(max((parts[p].count(sid) for p in names if p in parts), default=0)
                       for names in at.values())
            if used > n:
                w = f"states use {used} {sid!r} atoms but P has {n}"
                break
    out.append(Verdict("Q9", w is None, w))

    w = None
    for p, s in sys.R:
        q = parts.get(p)
        if q is None:
            continue
        if any(sys.is_fermion(sid) for sid, _ in q.m_part) and qc(q) > 1:
            w = f"state {s} holds {qc(q)} fermions ({p})"
            break
    out.append(Verdict("Q10", w is None, w))
    return out


def is_valid(sys: ParticleSystem) -> bool:
    return all(v.passed for v in validate(sys))


def occupations(sys: ParticleSystem) -> dict[str, int]:
    """Occupation number of every state, in rank order; unpaired states hold 0."""
    parts = sys.part_map
    at = _per_state(sys)
    return {s.id: max((qc(parts[p]) for p in at.get(s.id, ()) if p in parts), default=0)
            for s in sys.S}


def coarse_relation(sys: ParticleSystem, bins: EnergyBinning) -> list[CoarsePair]:
    """Merge the pairs of R bin by bin: ``[union of p_j, S_i]`` for each bin."""
    parts = sys.part_map
    at = _per_state(sys)
    owner = {s: i for i, b in enumerate(bins) for s in b.states}
    for b in bins:
        for s in b.states:
            if s not in sys.S:
                raise StructureError(f"bin refers to unknown state {s!r}")
    for _, s in sys.R:
        if s not in owner:
            raise BinningIncomplete(f"state {s} is not covered by any bin")
    out = []
    for b in bins:
        acc = Qset(sys.universe)
        for s in b.states:
            names = [p for p in at.get(s, ()) if p in parts]
            if names:
                acc = disjoint_union(acc, max((parts[p] for p in names), key=qc))
        out.append(CoarsePair(acc, b.states, b.energy))
    return out


def system_from_occupations(universe: Universe, species: str, occ: Sequence[int],
                            states: StateSet | None = None, prefix: str = "p") -> ParticleSystem:
    """A system whose i-th state is paired with a part of ``occ[i]`` atoms.

    P holds exactly ``sum(occ)`` atoms of ``species``.
    """
    states = states or StateSet.numbered("s", len(occ))
    if len(states) != len(occ):
        raise StructureError("one occupation per state is required")
    P = universe.qset({species: sum(occ)})
    parts = tuple((f"{prefix}{i + 1}", universe.qset({species: n})) for i, n in enumerate(occ))
    R = tuple((name, s.id) for (name, _), s in zip(parts, states))
    return ParticleSystem(universe, P, parts, states, R)


# Electron energies of the sodium shells in eV (illustrative binding energies).
SODIUM_SHELLS = (("1s", -1040.0), ("2s", -70.8), ("2p", -38.0), ("3s", -5.14))


def preset_sodium() -> tuple[ParticleSystem, EnergyBinning]:
    """Sodium: eleven electrons over s1..s12, binned as 1s 2s 2p 3s."""
    u = Universe({Species("e", FERMIONIC): 11})
    occ = [1] * 11 + [0]
    sys = system_from_occupations(u, "e", occ)
    sys = ParticleSystem(sys.universe, sys.P, sys.parts, sys.S, sys.R, name="sodium")
    groups = (("s1", "s2"), ("s3", "s4"), tuple(f"s{i}" for i in range(5, 11)), ("s11", "s12"))
    bins = EnergyBinning(Bin(g, e) for g, (_, e) in zip(groups, SODIUM_SHELLS))
    return sys, bins


def preset_helium() -> ParticleSystem:
    """Helium with one electron in the ground state g1 and one in g2.

    p1 is separated from P by the ground-state predicate, which holds of one
    electron without saying which; p2 is the rest of P.
    """
    u = Universe({Species("e", FERMIONIC): 2})
    P = u.qset({"e": 2})

    def in_ground_state(ref):
        return 1 if ref.is_m else False

    p1 = separate(P, in_ground_state)
    p2 = difference(P, p1)
    S = StateSet([StateId(1, "g1"), StateId(2, "g2")])
    return ParticleSystem(u, P, (("p1", p1), ("p2", p2)), S, (("p1", "g1"), ("p2", "g2")),
                          name="helium")

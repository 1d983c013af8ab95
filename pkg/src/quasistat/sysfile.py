"""Reading and writing ``qstat`` description files.

One line-oriented format describes particle systems, energy bins and
maximum-entropy problems. The first non-comment line is the version header
``qstat 1``; ``#`` starts a comment. Keywords::

    species <id> <fermionic|bosonic> <count>   declare m-atoms
    matom <label> ...                          declare M-atoms
    P <qset>                                   particle collection (default: all m-atoms)
    F <species> ... | F -                      fermion predicate (default: from kinds)
    state <id> <rank>                          quantum state
    part <name> <qset>                         member of calP
    pair <part> <state>                        element of R
    occ <state> <qset|n>                       shorthand for part "p_<state>" plus its pair
    bin <energy> <state> ...                   energy bin of states

    statistics <fermion|boson>                 maximum-entropy problem
    level <k> <energy>                         bin of k states at one energy
    N <value>
    beta <value> | E <value>

Qsets are written as in :func:`quasistat.qset.serialize`, e.g. ``[e:2,p:1]``
or just ``e:2``; ``[]`` is the empty qset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, QuasistatError
from .maxent import Level, MaxEntProblem
from .particles import Bin, EnergyBinning, ParticleSystem, StateSet
from .qset import FERMIONIC, Species, Universe, parse_qset, serialize

HEADER = "qstat 1"


@dataclass(frozen=True)
class Document:
    system: ParticleSystem | None = None
    binning: EnergyBinning | None = None
    problem: MaxEntProblem | None = None


def _number(tok: str, line: int, what: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"{what} must be a number, got {tok!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"{what} must be finite", line)
    return v


def _integer(tok: str, line: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", line) from None


def _arity(args: list[str], n: int, line: int, key: str, at_least: bool = False):
    if len(args) < n or (not at_least and len(args) != n):
        want = f"at least {n}" if at_least else str(n)
        raise ParseError(f"'{key}' takes {want} argument(s)", line)


def loads(text: str) -> Document:
    lines = [(i + 1, raw.split("#", 1)[0].strip()) for i, raw in enumerate(text.splitlines())]
    lines = [(i, s) for i, s in lines if s]
    if not lines:
        raise ParseError("empty input")
    first_no, first = lines[0]
    if " ".join(first.split()) != HEADER:
        raise ParseError(f"expected header {HEADER!r}", first_no)

    species: list[tuple[Species, int]] = []
    labels: list[str] = []
    P_text = None
    fermions = None
    states: list[tuple[str, int]] = []
    parts: list[tuple[str, str, int]] = []
    pairs: list[tuple[str, str]] = []
    occ: list[tuple[str, str, int]] = []
    bins: list[tuple[float, list[str], int]] = []
    prob: dict = {}
    levels: list[Level] = []

    for no, s in lines[1:]:
        key, *args = s.split()
        if key == "species":
            _arity(args, 3, no, key)
            kind = args[1]
            if kind not in (FERMIONIC, "bosonic"):
                raise ParseError(f"species kind must be fermionic or bosonic, got {kind!r}", no)
            n = _integer(args[2], no, "species count")
            try:
                species.append((Species(args[0], kind), n))
            except ValueError as exc:
                raise ParseError(str(exc), no) from None
        elif key == "matom":
            _arity(args, 1, no, key, at_least=True)
            labels.extend(args)
        elif key == "P":
            _arity(args, 1, no, key)
            P_text = (args[0], no)
        elif key == "F":
            _arity(args, 1, no, key, at_least=True)
            fermions = frozenset() if args == ["-"] else frozenset(args)
        elif key == "state":
            _arity(args, 2, no, key)
            states.append((args[0], _integer(args[1], no, "state rank")))
        elif key == "part":
            _arity(args, 2, no, key)
            parts.append((args[0], args[1], no))
        elif key == "pair":
            _arity(args, 2, no, key)
            pairs.append((args[0], args[1]))
        elif key == "occ":
            _arity(args, 2, no, key)
            occ.append((args[0], args[1], no))
        elif key == "bin":
            _arity(args, 2, no, key, at_least=True)
            bins.append((_number(args[0], no, "bin energy"), args[1:], no))
        elif key == "statistics":
            _arity(args, 1, no, key)
            if args[0] not in ("fermion", "boson"):
                raise ParseError(f"statistics must be fermion or boson, got {args[0]!r}", no)
            prob["statistics"] = args[0]
        elif key == "level":
            _arity(args, 2, no, key)
            levels.append(Level(_integer(args[0], no, "level size"), _number(args[1], no, "energy")))
        elif key in ("N", "E", "beta"):
            _arity(args, 1, no, key)
            prob[key] = _number(args[0], no, key)
        else:
            raise ParseError(f"unknown keyword {key!r}", no)

    doc_system = doc_bins = doc_problem = None
    if species or labels or states or parts or pairs or occ:
        try:
            u = Universe(species, labels)
        except ValueError as exc:
            raise ParseError(str(exc)) from None

        def qset_at(text: str, no: int):
            return parse_qset(text, u) if text != "-" else u.qset()

        if P_text is not None:
            try:
                P = qset_at(*P_text)
            except ParseError as exc:
                raise ParseError(str(exc), P_text[1]) from None
        else:
            P = u.qset({sp.id: n for sp, n in species})
        named = []
        for name, text, no in parts:
            try:
                named.append((name, qset_at(text, no)))
            except (ParseError, KeyError, ValueError) as exc:
                raise ParseError(str(exc), no) from None
        for state, text, no in occ:
            if text.isdigit():
                if len(u.species) != 1:
                    raise ParseError("a bare occupation number needs exactly one species", no)
                text = f"{u.species[0].id}:{text}"
            try:
                named.append((f"p_{state}", qset_at(text, no)))
            except (ParseError, KeyError, ValueError) as exc:
                raise ParseError(str(exc), no) from None
            pairs.append((f"p_{state}", state))
        doc_system = ParticleSystem(u, P, tuple(named), StateSet(states), tuple(pairs), fermions)
        if bins:
            try:
                doc_bins = EnergyBinning(Bin(tuple(st), e) for e, st, _ in bins)
            except QuasistatError as exc:
                raise ParseError(str(exc), bins[0][2]) from None
    elif bins:
        raise ParseError("bins given without a particle system", bins[0][2])

    if prob or levels:
        try:
            doc_problem = MaxEntProblem(tuple(levels), prob.get("statistics", ""), prob.get("N", math.nan),
                                        prob.get("beta"), prob.get("E"))
        except ValueError as exc:
            raise ParseError(f"invalid problem: {exc}") from None
    return Document(doc_system, doc_bins, doc_problem)


def load(path: str | Path) -> Document:
    return loads(Path(path).read_text())


def _fmt(x: float) -> str:
    return repr(float(x))


def dumps(doc: Document) -> str:
    """Canonical text for a document; ``loads(dumps(d)) == d``."""
    out = [HEADER]
    sys = doc.system
    if sys is not None:
        u = sys.universe
        for sp, n in zip(u.species, u.counts):
            out.append(f"species {sp.id} {sp.kind} {n}")
        if u.m_labels:
            out.append("matom " + " ".join(sorted(u.m_labels)))
        out.append(f"P {serialize(sys.P)}")
        default_f = frozenset(s.id for s in u.species if s.kind == FERMIONIC)
        if sys.fermions != default_f:
            out.append("F " + (" ".join(sorted(sys.fermions)) or "-"))
        for st in sys.S:
            out.append(f"state {st.id} {st.rank}")
        for name, q in sys.parts:
            out.append(f"part {name} {serialize(q)}")
        for p, s in sys.R:
            out.append(f"pair {p} {s}")
        if doc.binning is not None:
            for b in doc.binning:
                out.append(f"bin {_fmt(b.energy)} " + " ".join(b.states))
    prob = doc.problem
    if prob is not None:
        out.append(f"statistics {prob.statistics}")
        for lv in prob.levels:
            out.append(f"level {lv.k} {_fmt(lv.energy)}")
        out.append(f"N {_fmt(prob.N)}")
        if prob.beta is not None:
            out.append(f"beta {_fmt(prob.beta)}")
        else:
            out.append(f"E {_fmt(prob.E)}")
    return "\n".join(out) + "\n"

"""Weighted parity automata and games with offsetting.

A model is a list of states, each with a parity, an offset and a
nonempty list of options.  Every option names a distribution: a finite
set of weighted transitions ``w symbol(q1,...,qn)``.  Automata are the
models in which every state has exactly one option.
"""
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .exceptions import ParseError, SemiringError, ValidationError
from .semiring import Semiring, SemiringValue, from_spec

logger = logging.getLogger(__name__)

IDENT = r"[A-Za-z_][A-Za-z0-9_']*"
NATURAL = r"[0-9]+"

_SECTIONS = ("semiring", "sig", "dist", "state", "trans")
_SIG_ENTRY = re.compile(rf"^({IDENT})/({NATURAL})$")
_TERM = re.compile(rf"^({IDENT})\(([^()]*)\)$")
_DIST = re.compile(rf"^({IDENT})\s*\{{(.*)\}}$")
_DIST_ENTRY = re.compile(rf"^(\S+)\s+({IDENT}\([^()]*\))$")
_TRANS = re.compile(rf"^({IDENT})\s+({IDENT}\([^()]*\))(?:\s+(\S+))?$")


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int


@dataclass(frozen=True)
class Signature:
    symbols: tuple[Symbol, ...] = ()

    def arity(self, name: str) -> int | None:
        for symbol in self.symbols:
            if symbol.name == name:
                return symbol.arity
        return None

    @property
    def max_arity(self) -> int:
        return max((s.arity for s in self.symbols), default=0)


@dataclass(frozen=True)
class Transition:
    """One weighted entry ``weight symbol(successors)`` of a distribution."""

    symbol: str
    successors: tuple[str, ...]
    weight: SemiringValue

    @property
    def key(self) -> tuple[str, tuple[str, ...]]:
        return self.symbol, self.successors

    @property
    def term(self) -> str:
        return f"{self.symbol}({','.join(self.successors)})"

    def __str__(self) -> str:
        return f"{self.weight} {self.term}"


@dataclass(frozen=True)
class Distribution:
    """A named option; anonymous ones come from ``trans`` shorthand lines."""

    name: str
    entries: tuple[Transition, ...]
    anonymous: bool = False

    def find(self, symbol: str, successors: tuple[str, ...]) -> Transition | None:
        for entry in self.entries:
            if entry.key == (symbol, successors):
                return entry
        return None


@dataclass(frozen=True)
class State:
    name: str
    parity: int
    offset: SemiringValue
    options: tuple[str, ...]


@dataclass(frozen=True)
class Model:
    semiring: Semiring
    signature: Signature
    distributions: tuple[Distribution, ...]
    states: tuple[State, ...]
    _state_index: dict = field(init=False, repr=False, compare=False, hash=False)
    _dist_index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_state_index", {s.name: s for s in self.states})
        object.__setattr__(self, "_dist_index", {d.name: d for d in self.distributions})

    @property
    def state_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.states)

    @property
    def bound(self):
        return self.semiring.bound

    @property
    def parities(self) -> tuple[int, ...]:
        return tuple(sorted({s.parity for s in self.states}))

    @property
    def max_parity(self) -> int:
        return max(s.parity for s in self.states)

    def has_state(self, name: str) -> bool:
        return name in self._state_index

    def state(self, name: str) -> State:
        try:
            return self._state_index[name]
        except KeyError:
            raise ValidationError(f"Unknown state '{name}'") from None

    def distribution(self, name: str) -> Distribution:
        try:
            return self._dist_index[name]
        except KeyError:
            raise ValidationError(f"Unknown distribution '{name}'") from None

    def parity(self, name: str) -> int:
        return self.state(name).parity

    def offset(self, name: str) -> SemiringValue:
        return self.state(name).offset

    def options(self, name: str) -> tuple[Distribution, ...]:
        return tuple(self.distribution(d) for d in self.state(name).options)

    def states_of_parity(self, parity: int) -> tuple[str, ...]:
        return tuple(s.name for s in self.states if s.parity == parity)

    def transition_count(self) -> int:
        return sum(len(d.entries) for q in self.state_names for d in self.options(q))

    def find_transition(
        self, state: str, symbol: str, successors: tuple[str, ...], option: str | None = None
    ) -> tuple[Distribution, Transition] | None:
        """Locate a transition of ``state``; the first option holding it wins."""
        for dist in self.options(state):
            if option is not None and dist.name != option:
                continue
            entry = dist.find(symbol, successors)
            if entry is not None:
                return dist, entry
        return None


def is_automaton(m: Model) -> bool:
    """True iff every state has exactly one option."""
    return all(len(s.options) == 1 for s in m.states)


def is_buchi(m: Model) -> bool:
    """True iff parities lie in {1, 2} and some state is even."""
    parities = {s.parity for s in m.states}
    return parities <= {1, 2} and 2 in parities


def validate_model(m: Model) -> Model:
    """Check the structural rules of a model and return it unchanged."""
    seen_symbols = set()
    for symbol in m.signature.symbols:
        if symbol.name in seen_symbols:
            raise ValidationError(f"Symbol '{symbol.name}' declared twice")
        if symbol.arity < 0:
            raise ValidationError(f"Symbol '{symbol.name}' has negative arity")
        seen_symbols.add(symbol.name)

    if not m.states:
        raise ValidationError("Model declares no states")
    if len({s.name for s in m.states}) != len(m.states):
        raise ValidationError("State names must be unique")
    if len({d.name for d in m.distributions}) != len(m.distributions):
        raise ValidationError("Distribution names must be unique")

    for dist in m.distributions:
        where = f"distribution '{dist.name}'"
        if not dist.entries:
            raise ValidationError(f"Empty {where}")
        keys = set()
        for entry in dist.entries:
            arity = m.signature.arity(entry.symbol)
            if arity is None:
                raise ValidationError(f"Undeclared symbol '{entry.symbol}' in {where}")
            if arity != len(entry.successors):
                raise ValidationError(
                    f"Symbol '{entry.symbol}' has arity {arity}, used with "
                    f"{len(entry.successors)} successors in {where}"
                )
            if entry.key in keys:
                raise ValidationError(f"Duplicate transition {entry.term} in {where}")
            keys.add(entry.key)
            if entry.weight.kind != m.semiring:
                raise ValidationError(f"Weight of {entry.term} in {where} is not in {m.semiring}")
            if entry.weight.is_zero:
                raise ValidationError(f"Weight of {entry.term} in {where} is the semiring zero")
            for succ in entry.successors:
                if not m.has_state(succ):
                    raise ValidationError(f"{where.capitalize()} references undeclared state '{succ}'")

    for state in m.states:
        if state.parity < 1:
            raise ValidationError(f"State '{state.name}' has parity {state.parity}; parities start at 1")
        if state.offset.kind != m.semiring:
            raise ValidationError(f"Offset of state '{state.name}' is not in {m.semiring}")
        if not state.options:
            raise ValidationError(f"State '{state.name}' has no options")
        for option in state.options:
            if option not in m._dist_index:
                raise ValidationError(f"State '{state.name}' references unknown distribution '{option}'")

    if not any(s.parity % 2 == 0 for s in m.states):
        logger.warning("Model has no even-parity state; every extent is the semiring zero")
    return m


def _literal(semiring: Semiring, text: str, what: str, lineno: int) -> SemiringValue:
    try:
        value = semiring.parse(text)
    except SemiringError as e:
        raise ParseError(f"{what}: {e}", lineno) from e
    # parse() saturates literals above B to inf; the file format rejects them
    if semiring.is_tropical and text != "inf" and Fraction(text) > semiring.bound:
        raise ValidationError(f"{what.capitalize()} {text} exceeds the bound {semiring.bound} (line {lineno})")
    return value


def _parse_term(signature: Signature, text: str, lineno: int) -> tuple[str, tuple[str, ...]]:
    match = _TERM.match(text.strip())
    if not match:
        raise ParseError(f"Invalid transition term {text!r}", lineno)
    symbol, args = match.groups()
    successors = tuple(a.strip() for a in args.split(",")) if args.strip() else ()
    for succ in successors:
        if not re.fullmatch(IDENT, succ):
            raise ParseError(f"Invalid state name {succ!r}", lineno)
    arity = signature.arity(symbol)
    if arity is None:
        raise ValidationError(f"Undeclared symbol '{symbol}' (line {lineno})")
    if arity != len(successors):
        raise ValidationError(
            f"Symbol '{symbol}' has arity {arity}, used with {len(successors)} successors (line {lineno})"
        )
    return symbol, successors


def parse_model(text: str) -> Model:
    """Parse and validate a model in the line-based text format.

    Args:
        text: Model source

    Returns:
        The validated model

    Raises:
        ParseError: on lexical or syntax errors, with the line number
        ValidationError: on semantic violations, naming the entity
    """
    semiring: Semiring | None = None
    symbols: list[Symbol] = []
    dists: dict[str, Distribution] = {}
    states: dict[str, dict] = {}
    trans: dict[str, list[Transition]] = {}
    section = -1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword not in _SECTIONS:
            raise ParseError(f"Unknown keyword {keyword!r}", lineno)
        rank = _SECTIONS.index(keyword)
        if rank == 0 and semiring is not None:
            raise ParseError("Duplicate 'semiring' line", lineno)
        if rank > 0 and semiring is None:
            raise ParseError("A model must start with a 'semiring' line", lineno)
        if rank < section:
            raise ParseError(f"'{keyword}' lines must precede '{_SECTIONS[section]}' lines", lineno)
        section = rank

        if keyword == "semiring":
            tokens = rest.split()
            if len(tokens) not in (1, 2):
                raise ParseError("Expected 'semiring <kind> [<bound>]'", lineno)
            try:
                semiring = from_spec(tokens[0], tokens[1] if len(tokens) == 2 else None)
            except SemiringError as e:
                raise ParseError(str(e), lineno) from e

        elif keyword == "sig":
            if not rest:
                raise ParseError("Expected one or more 'name/arity' entries", lineno)
            for token in rest.split():
                match = _SIG_ENTRY.match(token)
                if not match:
                    raise ParseError(f"Invalid signature entry {token!r}", lineno)
                name, arity = match.group(1), int(match.group(2))
                if any(s.name == name for s in symbols):
                    raise ValidationError(f"Symbol '{name}' declared twice (line {lineno})")
                symbols.append(Symbol(name, arity))

        elif keyword == "dist":
            match = _DIST.match(rest)
            if not match:
                raise ParseError("Expected 'dist <name> { <w> <term>; ... }'", lineno)
            name, body = match.groups()
            if name in dists:
                raise ValidationError(f"Distribution '{name}' declared twice (line {lineno})")
            signature = Signature(tuple(symbols))
            entries = []
            for chunk in body.split(";"):
                chunk = chunk.strip()
                if not chunk:
                    continue
                entry = _DIST_ENTRY.match(chunk)
                if not entry:
                    raise ParseError(f"Invalid distribution entry {chunk!r}", lineno)
                weight = _literal(semiring, entry.group(1), "weight", lineno)
                symbol, successors = _parse_term(signature, entry.group(2), lineno)
                entries.append(Transition(symbol, successors, weight))
            if not entries:
                raise ValidationError(f"Empty distribution '{name}' (line {lineno})")
            dists[name] = Distribution(name, tuple(entries))

        elif keyword == "state":
            tokens = rest.split()
            if len(tokens) < 5 or tokens[1] != "parity" or tokens[3] != "offset":
                raise ParseError("Expected 'state <id> parity <k> offset <v> [options <d>...]'", lineno)
            name = tokens[0]
            if not re.fullmatch(IDENT, name):
                raise ParseError(f"Invalid state name {name!r}", lineno)
            if name in states:
                raise ValidationError(f"State '{name}' declared twice (line {lineno})")
            if not re.fullmatch(NATURAL, tokens[2]):
                raise ParseError(f"Invalid parity {tokens[2]!r}", lineno)
            offset = _literal(semiring, tokens[4], f"offset of state '{name}'", lineno)
            options: tuple[str, ...] = ()
            if len(tokens) > 5:
                if tokens[5] != "options" or len(tokens) == 6:
                    raise ParseError("Expected 'options <d>...' after the offset", lineno)
                options = tuple(tokens[6:])
            states[name] = {"parity": int(tokens[2]), "offset": offset, "options": options, "line": lineno}

        else:  # trans
            match = _TRANS.match(rest)
            if not match:
                raise ParseError("Expected 'trans <state> <term> [<weight>]'", lineno)
            source, term, weight_text = match.groups()
            if source not in states:
                raise ValidationError(f"Transition from undeclared state '{source}' (line {lineno})")
            symbol, successors = _parse_term(Signature(tuple(symbols)), term, lineno)
            weight = _literal(semiring, weight_text, "weight", lineno) if weight_text else semiring.one
            bucket = trans.setdefault(source, [])
            if any(t.key == (symbol, successors) for t in bucket):
                raise ValidationError(f"Duplicate transition {source} -> {term} (line {lineno})")
            bucket.append(Transition(symbol, successors, weight))

    if semiring is None:
        raise ParseError("Missing 'semiring' line")

    anonymous: list[Distribution] = []
    built_states = []
    for name, info in states.items():
        options = info["options"]
        if name in trans:
            if options:
                raise ValidationError(f"State '{name}' declares both options and trans lines")
            dist_name = f"_{name}"
            if dist_name in dists:
                raise ValidationError(f"Distribution '{dist_name}' clashes with the shorthand of state '{name}'")
            anonymous.append(Distribution(dist_name, tuple(trans[name]), anonymous=True))
            options = (dist_name,)
        elif not options:
            raise ValidationError(f"State '{name}' has no options (line {info['line']})")
        built_states.append(State(name, info["parity"], info["offset"], options))

    m = Model(
        semiring=semiring,
        signature=Signature(tuple(symbols)),
        distributions=tuple(dists.values()) + tuple(anonymous),
        states=tuple(built_states),
    )
    validate_model(m)
    logger.info(f"Parsed model with {len(m.states)} states and {m.transition_count()} transitions")
    return m


def render_model(m: Model) -> str:
    """Serialize a model canonically; ``parse_model`` inverts it."""
    lines = [f"semiring {m.semiring}"]
    if m.signature.symbols:
        lines.append("sig " + " ".join(f"{s.name}/{s.arity}" for s in m.signature.symbols))
    for dist in m.distributions:
        if not dist.anonymous:
            lines.append(f"dist {dist.name} {{ " + "; ".join(str(e) for e in dist.entries) + " }")
    for state in m.states:
        line = f"state {state.name} parity {state.parity} offset {state.offset}"
        if not _is_shorthand(m, state):
            line += " options " + " ".join(state.options)
        lines.append(line)
    for state in m.states:
        if _is_shorthand(m, state):
            for entry in m.distribution(state.options[0]).entries:
                lines.append(f"trans {state.name} {entry.term} {entry.weight}")
    return "\n".join(lines) + "\n"


def _is_shorthand(m: Model, state: State) -> bool:
    return len(state.options) == 1 and m.distribution(state.options[0]).anonymous


def load_model(path: str) -> Model:
    """Read and parse a model file."""
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        logger.error(f"Failed to read model file {path}: {e}")
        raise ParseError(f"Cannot read model file {path}: {e}") from e
    return parse_model(text)

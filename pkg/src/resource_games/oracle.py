"""Brute-force ground truth for extents.

``oracle_extent_credit`` solves the resource game over every level
``0..B`` and reads off the least ∃-winning level per state; it is
complete.  ``oracle_extent_enumerate`` searches small regular runs of an
automaton directly and only ever over-approximates the extent.
``random_model`` generates the seeded corpora both are checked on.
"""
import logging
import random
from dataclasses import dataclass, field, replace

import networkx as nx

from .config import DEFAULT_SETTINGS, Settings
from .exceptions import OracleError, UnsupportedModelError
from .extent import ExtentMap, extent_fig1, extent_generic
from .model import Distribution, Model, Signature, State, Symbol, Transition, is_automaton, validate_model
from .resource_game import EXISTS, build_oracle_game, zielonka_solve
from .runs import RegularRun, RunNode, is_accepting, parity_accepting, run_value
from .semiring import BOOLEAN, INF, TROPICAL, Semiring, SemiringValue

logger = logging.getLogger(__name__)


def _as_credit_model(m: Model) -> Model:
    """Unweighted tropical copy of a boolean model; its extents are 0 or inf."""
    S = Semiring(TROPICAL, 1)
    dists = tuple(
        replace(d, entries=tuple(replace(t, weight=S.one) for t in d.entries))
        for d in m.distributions
    )
    states = tuple(replace(s, offset=S.one) for s in m.states)
    return Model(S, m.signature, dists, states)


def oracle_extent_credit(m: Model, settings: Settings = DEFAULT_SETTINGS) -> ExtentMap:
    """Least initial credit per state, from the solved all-levels resource game.

    Boolean models are solved as the unweighted parity game; a state gets
    ``1`` exactly when ∃ wins from it.

    Raises:
        OracleError: when ``|Q| x (B+1)`` exceeds ``settings.oracle_state_cap``
        SemiringError: for tropical-rational models
    """
    game_model = _as_credit_model(m) if m.semiring.is_boolean else m
    if game_model.semiring.name == TROPICAL:
        layer = len(game_model.states) * (int(game_model.bound) + 1)
        if layer > settings.oracle_state_cap:
            raise OracleError(
                f"Resource game layer of {layer} configurations exceeds the cap of {settings.oracle_state_cap}"
            )
    g = build_oracle_game(game_model)
    winners = zielonka_solve(g)
    credit = {q: INF for q in m.state_names}
    for c in g.state_configs():
        if winners.get(c) == EXISTS and c.level < credit[c.state]:
            credit[c.state] = c.level
    S = m.semiring
    if S.is_boolean:
        return ExtentMap({q: S.value(credit[q] != INF) for q in m.state_names})
    return ExtentMap({q: S.value(credit[q]) for q in m.state_names})


@dataclass(frozen=True)
class EnumerationResult:
    """Best run found from one state; ``exhaustive`` is False when the node budget cut the search."""

    value: SemiringValue
    run: RegularRun | None
    exhaustive: bool


class _RunSearch:
    """Canonical branch-and-bound search over regular runs of an automaton.

    Node ``i`` is expanded i-th; each child of a node is either an already
    discovered node of the right state or the next fresh node, so every run
    graph is met once, in breadth-first numbering.
    """

    def __init__(self, m: Model, q0: str, max_nodes: int):
        self.m = m
        self.S = m.semiring
        self.max_nodes = max_nodes
        self.states = [q0]
        self.moves: list[tuple[Transition, tuple[int, ...]] | None] = [None]
        self.best = self.S.zero
        self.best_run: RegularRun | None = None
        self.exhaustive = True

    def run(self) -> EnumerationResult:
        self._expand(0)
        return EnumerationResult(self.best, self.best_run, self.exhaustive)

    def _expand(self, i: int) -> None:
        if i == len(self.states):
            self._complete()
            return
        q = self.states[i]
        for t in self.m.options(q)[0].entries:
            self._assign(i, t, 0, (), len(self.states))

    def _assign(self, i: int, t: Transition, j: int, children: tuple[int, ...], known: int) -> None:
        if j == len(t.successors):
            self.moves[i] = (t, children)
            # only an edge back to a known node can close a cycle
            if self._promising(any(k < known for k in children)):
                self._expand(i + 1)
            self.moves[i] = None
            return
        succ = t.successors[j]
        for k in range(len(self.states)):
            if self.states[k] == succ:
                self._assign(i, t, j + 1, children + (k,), known)
        if len(self.states) < self.max_nodes:
            self.states.append(succ)
            self.moves.append(None)
            self._assign(i, t, j + 1, children + (len(self.states) - 1,), known)
            self.states.pop()
            self.moves.pop()
        elif self._promising(False):
            # a cut branch counts only if it could still beat the best run
            self.exhaustive = False

    def _promising(self, closing: bool) -> bool:
        if closing and not self._accepting_so_far():
            return False
        # unexpanded nodes held at the top bound every completion from above
        return not self.S.leq(self._value_bound(), self.best)

    def _accepting_so_far(self) -> bool:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.states)))
        for i, move in enumerate(self.moves):
            if move is not None:
                g.add_edges_from((i, k) for k in move[1])
        return parity_accepting(g, {i: self.m.parity(q) for i, q in enumerate(self.states)})

    def _value_bound(self) -> SemiringValue:
        S = self.S
        values = [S.one] * len(self.states)
        while True:
            new = [
                S.one if move is None else S.residual(
                    S.mul(move[0].weight, S.product(values[k] for k in move[1])),
                    self.m.offset(self.states[i]),
                )
                for i, move in enumerate(self.moves)
            ]
            if new == values:
                return values[0]
            values = new

    def _complete(self) -> None:
        nodes = tuple(
            RunNode(f"n{i}", q, t.symbol, tuple(f"n{k}" for k in children))
            for i, (q, (t, children)) in enumerate(zip(self.states, self.moves))
        )
        z = RegularRun(nodes, "n0")
        if not is_accepting(self.m, z):
            return
        value = run_value(self.m, z)
        if not self.S.leq(value, self.best):
            self.best = value
            self.best_run = z


def best_run(m: Model, q0: str, max_nodes: int = DEFAULT_SETTINGS.enumerate_max_nodes) -> EnumerationResult:
    """Search accepting regular runs from ``q0`` with at most ``max_nodes`` nodes."""
    if not is_automaton(m):
        raise UnsupportedModelError("unsupported: run enumeration needs an automaton")
    result = _RunSearch(m, q0, max_nodes).run()
    if not result.exhaustive:
        logger.warning(f"Run enumeration from '{q0}' hit its budget of {max_nodes} nodes; value is an upper bound")
    return result


def oracle_extent_enumerate(m: Model, q0: str, max_nodes: int = DEFAULT_SETTINGS.enumerate_max_nodes) -> SemiringValue:
    """Best value over accepting regular runs from ``q0`` within the node budget."""
    return best_run(m, q0, max_nodes).value


@dataclass(frozen=True)
class Profile:
    """Size parameters of a random model family."""

    name: str
    parities: int = 2
    game: bool = False
    semiring: str = TROPICAL
    arities: tuple[int, ...] = (1, 1)
    max_states: int = 6
    max_transitions: int = 3
    max_options: int = 2
    max_weight: int = 4
    bounds: tuple[int, int] = (10, 24)


PROFILES = {
    p.name: p
    for p in (
        Profile("buchi-automaton"),
        Profile("buchi-game", game=True),
        Profile("parity-automaton", parities=3),
        Profile("parity-game", parities=3, game=True),
        Profile("tree-automaton", arities=(0, 1, 2), max_states=4, bounds=(4, 8)),
        Profile("boolean-automaton", semiring=BOOLEAN),
        Profile("boolean-game", semiring=BOOLEAN, game=True),
    )
}

DEFAULT_PROFILE = "buchi-automaton"


def get_profile(name: str) -> Profile:
    try:
        return PROFILES[name]
    except KeyError:
        raise OracleError(f"Unknown profile '{name}'; choose from {', '.join(PROFILES)}") from None


def random_model(seed: int, profile: Profile | str = DEFAULT_PROFILE) -> Model:
    """Deterministic pseudo-random valid model for ``seed``."""
    if isinstance(profile, str):
        profile = get_profile(profile)
    rng = random.Random(f"{profile.name}:{seed}")
    boolean = profile.semiring == BOOLEAN
    S = Semiring(BOOLEAN) if boolean else Semiring(TROPICAL, rng.randint(*profile.bounds))
    symbols = tuple(Symbol(f"a{k}", arity) for k, arity in enumerate(profile.arities))

    names = [f"q{k}" for k in range(rng.randint(2, profile.max_states))]
    parities = [rng.randint(1, profile.parities) for _ in names]
    if not any(p % 2 == 0 for p in parities):
        parities[rng.randrange(len(names))] = 2

    def weight() -> SemiringValue:
        return S.one if boolean else S.value(rng.randint(0, profile.max_weight))

    def entries() -> tuple[Transition, ...]:
        picked = {}
        for _ in range(rng.randint(1, profile.max_transitions)):
            symbol = rng.choice(symbols)
            successors = tuple(rng.choice(names) for _ in range(symbol.arity))
            picked.setdefault((symbol.name, successors), Transition(symbol.name, successors, weight()))
        return tuple(picked.values())

    dists, states = [], []
    for q, parity in zip(names, parities):
        offset = S.value(rng.randint(0, 1)) if boolean else S.value(rng.randint(0, profile.max_weight))
        if profile.game:
            options = []
            for k in range(rng.randint(1, profile.max_options)):
                dists.append(Distribution(f"{q}_{k}", entries()))
                options.append(f"{q}_{k}")
            states.append(State(q, parity, offset, tuple(options)))
        else:
            dists.append(Distribution(f"_{q}", entries(), anonymous=True))
            states.append(State(q, parity, offset, (f"_{q}",)))
    return validate_model(Model(S, Signature(symbols), tuple(dists), tuple(states)))


@dataclass(frozen=True)
class OracleEntry:
    """One state of one seeded model: oracle value against the engines."""

    seed: int
    state: str
    expected: SemiringValue
    engines: dict[str, SemiringValue]
    witness: RegularRun | None = None
    bounded_witness: bool = True

    @property
    def got(self) -> SemiringValue:
        return self.engines["generic"]

    @property
    def disagreeing(self) -> list[str]:
        return [name for name, value in self.engines.items() if value != self.expected]

    @property
    def ok(self) -> bool:
        return not self.disagreeing and self.bounded_witness

    def __str__(self) -> str:
        if self.ok:
            status = "ok"
        else:
            status = "mismatch(" + ",".join(self.disagreeing or ["enumerate"]) + ")"
        return f"{self.seed} {self.state} {self.expected} {self.got} {status}"


@dataclass
class OracleReport:
    profile: str
    seeds: list[int] = field(default_factory=list)
    entries: list[OracleEntry] = field(default_factory=list)

    @property
    def failures(self) -> list[int]:
        return sorted({e.seed for e in self.entries if not e.ok})

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        return f"{len(self.seeds) - len(self.failures)}/{len(self.seeds)} ok"

    def render(self) -> str:
        return "".join(f"{e}\n" for e in self.entries) + self.summary() + "\n"


def check_model(
    seed: int, m: Model, settings: Settings = DEFAULT_SETTINGS, enumerate_nodes: int = 0
) -> list[OracleEntry]:
    """Compare every engine that applies to ``m`` with the credit oracle.

    With ``enumerate_nodes`` set, automata are also searched for a witness
    run per state; a witness better than the oracle value is a failure, and
    so is an exhaustive search that misses the oracle value.
    """
    oracle = oracle_extent_credit(m, settings)
    engines = {"generic": extent_generic(m)}
    if m.semiring.is_tropical and is_automaton(m):
        engines["fig1"] = extent_fig1(m)[0]
    entries = []
    for q in m.state_names:
        witness, sound = None, True
        if enumerate_nodes and is_automaton(m):
            found = best_run(m, q, enumerate_nodes)
            witness = found.run
            sound = m.semiring.leq(found.value, oracle[q])
            if found.exhaustive and found.value != oracle[q]:
                sound = False
        entries.append(OracleEntry(seed, q, oracle[q], {k: v[q] for k, v in engines.items()}, witness, sound))
    return entries


def oracle_batch(
    seeds: range, profile: str = DEFAULT_PROFILE, settings: Settings = DEFAULT_SETTINGS, enumerate_nodes: int = 0
) -> OracleReport:
    """Run the oracle comparison over a seed range, in seed order."""
    report = OracleReport(get_profile(profile).name)
    for seed in seeds:
        m = random_model(seed, profile)
        report.seeds.append(seed)
        report.entries.extend(check_model(seed, m, settings, enumerate_nodes))
        logger.info(f"Oracle seed {seed} ({profile}) checked, {len(report.failures)} failing so far")
    return report

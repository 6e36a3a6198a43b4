"""Resource games: standard parity games whose configurations carry levels.

For an automaton, ``(q,n)`` is an ∃ configuration moving to a branch
``λ((q1,n1),...,(qm,nm))`` whenever ``w + n1 + ... + nm <= min(n + r(q), B)``;
the branch is a ∀ configuration moving to each ``(qi,ni)``.

For a game, ``(q,s)`` belongs to ∀, who picks an option ``Y`` and moves to
the ∃ configuration ``(q:Y, min(s + r(q), B))``; ∃ then picks a branch
as above with the offset already applied.

Levels range over ``{floor(q)..B}`` where the floor is the extent, or 0
for the oracle game.  Games are solved with the Zielonka recursion.
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterator

import networkx as nx

from .exceptions import SemiringError, UnsupportedModelError
from .extent import ExtentMap, UpdateTrace
from .model import Distribution, Model, is_automaton, is_buchi
from .semiring import INF, TROPICAL

logger = logging.getLogger(__name__)

EXISTS = "E"
FORALL = "A"


@dataclass(frozen=True, order=True)
class StateConfig:
    state: str
    level: int

    def __str__(self) -> str:
        return f"({self.state},{self.level})"


@dataclass(frozen=True, order=True)
class OptionConfig:
    state: str
    option: str
    level: int

    def __str__(self) -> str:
        return f"({self.state}:{self.option},{self.level})"


@dataclass(frozen=True, order=True)
class BranchConfig:
    symbol: str
    targets: tuple[tuple[str, int], ...]

    def __str__(self) -> str:
        return f"{self.symbol}(" + ",".join(f"{q}:{n}" for q, n in self.targets) + ")"


ConfigState = StateConfig | OptionConfig | BranchConfig

_RANK = {StateConfig: 0, OptionConfig: 1, BranchConfig: 2}


def config_key(c: ConfigState) -> tuple:
    """Deterministic total order over mixed configurations."""
    if isinstance(c, StateConfig):
        return 0, c.state, c.level
    if isinstance(c, OptionConfig):
        return 1, c.state, c.level, c.option
    return 2, c.symbol, c.targets


class ResourceGame:
    """A finite parity game over configurations, backed by ``networkx``.

    Nodes carry ``owner`` (``E``/``A``) and ``parity``; ∃ moves out of
    state or option configurations carry the ``cost`` ``w + Σ levels``.
    """

    def __init__(self, graph: nx.DiGraph, model: Model, floors: dict[str, object]):
        self.graph = graph
        self.model = model
        self.floors = floors

    def __contains__(self, c) -> bool:
        return c in self.graph

    def __len__(self) -> int:
        return self.graph.number_of_nodes()

    def __iter__(self) -> Iterator[ConfigState]:
        return iter(self.configs())

    def configs(self) -> list[ConfigState]:
        return sorted(self.graph.nodes, key=config_key)

    def owner(self, c: ConfigState) -> str:
        return self.graph.nodes[c]["owner"]

    def parity(self, c: ConfigState) -> int:
        return self.graph.nodes[c]["parity"]

    def successors(self, c: ConfigState) -> list[ConfigState]:
        return sorted(self.graph.successors(c), key=self._successor_key)

    def moves(self) -> list[tuple[ConfigState, ConfigState]]:
        return sorted(self.graph.edges, key=lambda e: (config_key(e[0]), config_key(e[1])))

    def cost(self, source: ConfigState, target: ConfigState):
        return self.graph.edges[source, target].get("cost")

    def existential(self) -> list[ConfigState]:
        return [c for c in self.configs() if self.owner(c) == EXISTS]

    def universal(self) -> list[ConfigState]:
        return [c for c in self.configs() if self.owner(c) == FORALL]

    def state_configs(self, state: str | None = None) -> list[StateConfig]:
        return [
            c for c in self.configs()
            if isinstance(c, StateConfig) and (state is None or c.state == state)
        ]

    def _successor_key(self, c: ConfigState) -> tuple:
        # options in declaration order, everything else by config order
        return (self.graph.nodes[c].get("order", 0),) + config_key(c)

    def with_probe(self, state: str, level: int) -> "ResourceGame":
        """A copy of the game with one extra configuration and its legal moves."""
        graph = self.graph.copy()
        _add_state(graph, self.model, self.floors, state, level, probe=True)
        return ResourceGame(graph, self.model, dict(self.floors))

    def dump(self) -> str:
        """One ``owner parity config -> targets`` line per configuration."""
        lines = []
        for c in self.configs():
            targets = ", ".join(str(t) for t in self.successors(c))
            lines.append(f"{self.owner(c)} {self.parity(c)} {c} -> {targets}")
        return "\n".join(lines) + "\n"


def _require_bounded(m: Model) -> None:
    if m.semiring.name != TROPICAL:
        raise SemiringError(f"Resource games need a tropical-bounded model, got {m.semiring}")


def _splits(floors: list[int], room: int, bound: int) -> Iterator[tuple[int, ...]]:
    """Level vectors ``n_i >= floors[i]``, ``n_i <= B`` with ``Σ n_i <= room``."""
    if not floors:
        yield ()
        return
    rest = sum(floors[1:])
    for n in range(floors[0], min(bound, room - rest) + 1):
        for tail in _splits(floors[1:], room - n, bound):
            yield (n,) + tail


def _add_branches(graph: nx.DiGraph, m: Model, floors: dict, source, dist: Distribution, budget: int) -> None:
    low = min(m.parities)
    bound = int(m.bound)
    for t in dist.entries:
        succ_floors = [floors[q] for q in t.successors]
        if any(f == INF for f in succ_floors):
            continue
        room = budget - t.weight.payload
        if room < sum(succ_floors):
            continue
        for split in _splits(succ_floors, room, bound):
            branch = BranchConfig(t.symbol, tuple(zip(t.successors, split)))
            if branch not in graph:
                graph.add_node(branch, owner=FORALL, parity=low)
                for q, n in branch.targets:
                    graph.add_edge(branch, StateConfig(q, n))
            graph.add_edge(source, branch, cost=t.weight.payload + sum(split))


def _add_state(graph: nx.DiGraph, m: Model, floors: dict, q: str, n: int, probe: bool = False) -> None:
    bound = int(m.bound)
    low = min(m.parities)
    source = StateConfig(q, n)
    offset = m.offset(q).payload
    budget = int(min(n + offset, bound))
    if is_automaton(m):
        graph.add_node(source, owner=EXISTS, parity=m.parity(q))
        _add_branches(graph, m, floors, source, m.options(q)[0], budget)
        return
    graph.add_node(source, owner=FORALL, parity=m.parity(q))
    for order, dist in enumerate(m.options(q)):
        option = OptionConfig(q, dist.name, budget)
        if option not in graph or probe:
            graph.add_node(option, owner=EXISTS, parity=low, order=order)
            _add_branches(graph, m, floors, option, dist, budget)
        graph.add_edge(source, option)


def _build(m: Model, floors: dict[str, object]) -> ResourceGame:
    _require_bounded(m)
    bound = int(m.bound)
    graph = nx.DiGraph()
    for q in m.state_names:
        if floors[q] == INF:
            continue
        for n in range(int(floors[q]), bound + 1):
            _add_state(graph, m, floors, q, n)
    logger.info(f"Built resource game with {graph.number_of_nodes()} configurations and {graph.number_of_edges()} moves")
    return ResourceGame(graph, m, dict(floors))


def build_resource_game(m: Model, ext: ExtentMap) -> ResourceGame:
    """Resource game with levels ``ext(q)..B``; states with infinite extent are left out."""
    return _build(m, {q: ext.level(q) for q in m.state_names})


def build_oracle_game(m: Model) -> ResourceGame:
    """Resource game over all levels ``0..B``, independent of any extent."""
    return _build(m, {q: 0 for q in m.state_names})


def build_subgame(m: Model, trace: UpdateTrace, ext: ExtentMap) -> ResourceGame:
    """The sub-game spanned by the update configurations of the last odd pass.

    Its state configurations are the ``(q,n)`` recorded by the final parity-1
    call of the trace plus every ``(q, ext(q))`` with finite extent; ∃ moves
    are kept when all their targets stay inside.
    """
    if not is_buchi(m):
        raise UnsupportedModelError("unsupported: sub-game construction needs a Büchi model")
    full = build_resource_game(m, ext)
    keep = {StateConfig(u.state, u.value) for u in trace.final_call(1)}
    keep |= {StateConfig(q, ext.level(q)) for q in m.state_names if ext.level(q) != INF}

    nodes = set(keep)
    if not is_automaton(m):
        for c in keep:
            nodes.update(full.graph.successors(c))
    for c in list(nodes):
        if full.owner(c) != EXISTS:
            continue
        for branch in full.graph.successors(c):
            if all(StateConfig(q, n) in keep for q, n in branch.targets):
                nodes.add(branch)
    graph = full.graph.subgraph(nodes).copy()
    logger.info(f"Sub-game keeps {len(keep)} of {len(full.state_configs())} state configurations")
    return ResourceGame(graph, m, dict(full.floors))


def _attractor(game: ResourceGame, nodes: set, target: set, player: str) -> set:
    """Configurations in ``nodes`` from which ``player`` can force a visit to ``target``.

    Opponent configurations without successors inside ``nodes`` are
    attracted vacuously.
    """
    graph = game.graph
    attr = set(target)
    remaining = {}
    for v in nodes:
        if v in attr or game.owner(v) == player:
            continue
        remaining[v] = sum(1 for w in graph.successors(v) if w in nodes)
        if remaining[v] == 0:
            attr.add(v)
    queue = deque(attr)
    while queue:
        v = queue.popleft()
        for u in graph.predecessors(v):
            if u not in nodes or u in attr:
                continue
            if game.owner(u) == player:
                attr.add(u)
                queue.append(u)
            else:
                remaining[u] -= 1
                if remaining[u] == 0:
                    attr.add(u)
                    queue.append(u)
    return attr


def _other(player: str) -> str:
    return FORALL if player == EXISTS else EXISTS


def _zielonka(game: ResourceGame, nodes: set) -> dict[str, set]:
    won = {EXISTS: set(), FORALL: set()}
    while nodes:
        top = max(game.parity(v) for v in nodes)
        player = EXISTS if top % 2 == 0 else FORALL
        opponent = _other(player)
        attr = _attractor(game, nodes, {v for v in nodes if game.parity(v) == top}, player)
        sub = _zielonka(game, nodes - attr)
        if not sub[opponent]:
            won[player] |= nodes
            break
        lost = _attractor(game, nodes, sub[opponent], opponent)
        won[opponent] |= lost
        nodes = nodes - lost
    return won


def zielonka_solve(g: ResourceGame) -> dict[ConfigState, str]:
    """Winner (``E`` or ``A``) of every configuration.

    A play stuck at a ∀ configuration is won by ∃ and vice versa; the
    configurations that can force such a dead end are settled first, the
    remaining total game is solved recursively.
    """
    nodes = set(g.graph.nodes)
    stuck_forall = _attractor(g, nodes, set(), EXISTS)
    stuck_exists = _attractor(g, nodes - stuck_forall, set(), FORALL)
    won = _zielonka(g, nodes - stuck_forall - stuck_exists)
    winners = {c: EXISTS for c in won[EXISTS] | stuck_forall}
    winners.update({c: FORALL for c in won[FORALL] | stuck_exists})
    return winners

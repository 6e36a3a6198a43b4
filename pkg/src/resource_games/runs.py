"""Regular runs: infinite run trees presented as finite node graphs."""
import logging
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import networkx as nx

from .config import DEFAULT_SETTINGS
from .exceptions import ParseError, SemiringError, StrategyError, UnfoldLimitError, ValidationError
from .extent import Choice, ExtentMap
from .model import IDENT, Model, Transition, is_automaton
from .semiring import INF, SemiringValue, render_number

logger = logging.getLogger(__name__)

_NODE = re.compile(rf"^node\s+(\w+)\s+({IDENT})\s+(?:({IDENT}):)?({IDENT})\(([^()]*)\)$")
_ROOT = re.compile(r"^root\s+(\w+)$")
_LEVEL = re.compile(r"^level\s+(\w+)\s+(\d+(?:/\d+)?)$")


@dataclass(frozen=True)
class RunNode:
    id: str
    state: str
    symbol: str
    children: tuple[str, ...]
    option: str | None = None


@dataclass(frozen=True)
class RegularRun:
    nodes: tuple[RunNode, ...]
    root: str
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {n.id: n for n in self.nodes})

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, node_id: str) -> RunNode:
        try:
            return self._index[node_id]
        except KeyError:
            raise ValidationError(f"Unknown run node '{node_id}'") from None

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for n in self.nodes:
            g.add_node(n.id)
            for child in n.children:
                g.add_edge(n.id, child)
        return g


@dataclass(frozen=True)
class Annotation:
    """Resource level per run node."""

    levels: dict[str, object]


def validate_run(m: Model, z: RegularRun) -> RegularRun:
    """Check arities, child references and reachability from the root."""
    if z.root not in z._index:
        raise ValidationError(f"Root '{z.root}' is not a node")
    for n in z.nodes:
        if not m.has_state(n.state):
            raise ValidationError(f"Run node '{n.id}' has unknown state '{n.state}'")
        arity = m.signature.arity(n.symbol)
        if arity is None:
            raise ValidationError(f"Run node '{n.id}' uses undeclared symbol '{n.symbol}'")
        if arity != len(n.children):
            raise ValidationError(f"Run node '{n.id}' has {len(n.children)} children, '{n.symbol}' has arity {arity}")
        for child in n.children:
            if child not in z._index:
                raise ValidationError(f"Run node '{n.id}' references unknown node '{child}'")
    reachable = nx.descendants(z.graph(), z.root) | {z.root}
    unreachable = [n.id for n in z.nodes if n.id not in reachable]
    if unreachable:
        raise ValidationError(f"Run nodes not reachable from the root: {', '.join(unreachable)}")
    return z


def _transition(m: Model, z: RegularRun, n: RunNode) -> Transition | None:
    successors = tuple(z.node(c).state for c in n.children)
    found = m.find_transition(n.state, n.symbol, successors, n.option)
    return found[1] if found else None


def run_value(m: Model, z: RegularRun) -> SemiringValue:
    """Value of the root: greatest fixpoint of the run-value operator.

    Iterates from the semiring one at every node.  A run using a transition
    the model does not have is not a run of the model and gets the
    semiring zero.
    """
    S = m.semiring
    weights = {}
    for n in z.nodes:
        t = _transition(m, z, n)
        if t is None:
            logger.warning(f"Run node '{n.id}' uses {n.symbol} from '{n.state}', which the model lacks")
            return S.zero
        weights[n.id] = t.weight

    values = {n.id: S.one for n in z.nodes}
    rounds = 0
    while True:
        rounds += 1
        new = {
            n.id: S.residual(S.mul(weights[n.id], S.product(values[c] for c in n.children)), m.offset(n.state))
            for n in z.nodes
        }
        if new == values:
            break
        values = new
    logger.debug(f"run_value stabilised after {rounds} rounds")
    return values[z.root]


def is_accepting(m: Model, z: RegularRun) -> bool:
    """True iff no cycle of the node graph has an odd maximum parity."""
    return parity_accepting(z.graph(), {n.id: m.parity(n.state) for n in z.nodes})


def parity_accepting(g: nx.DiGraph, parity: dict) -> bool:
    """Cycle test behind ``is_accepting``, over any parity-labelled graph."""
    for p in sorted({v for v in parity.values() if v % 2 == 1}):
        sub = g.subgraph([v for v in g if parity[v] <= p])
        for component in nx.strongly_connected_components(sub):
            if not any(parity[v] == p for v in component):
                continue
            if len(component) > 1 or any(sub.has_edge(v, v) for v in component):
                return False
    return True


def check_annotation(m: Model, z: RegularRun, a: Annotation, ext: ExtentMap) -> bool:
    """True iff every node's level covers its move and its state's extent.

    A node at level ``n`` taking weight ``w`` to children at ``n1..nk``
    needs ``(w • n1 • ... • nk) ⊘ r(q) ⊑ n``, i.e.
    ``w + Σ ni <= min(n + r(q), B)``.
    """
    if not m.semiring.is_tropical:
        raise SemiringError("Annotations need a tropical semiring")
    if any(n.id not in a.levels for n in z.nodes):
        return False
    R = m.semiring.rational()
    for n in z.nodes:
        level = a.levels[n.id]
        floor = ext.level(n.state)
        if floor == INF or level < floor:
            return False
        t = _transition(m, z, n)
        if t is None:
            return False
        need = R.residual(
            R.product([R.lift(t.weight)] + [R.value(a.levels[c]) for c in n.children]),
            R.lift(m.offset(n.state)),
        )
        if not R.leq(R.value(level), need):
            return False
    return True


Strategy = Callable[[str, object, str | None], tuple[Choice, tuple]]
Adversary = Callable[[str, object, tuple[str, ...]], str]


def unfold(
    m: Model,
    strat: Strategy,
    q0: str,
    mem0,
    adversary: Adversary | None = None,
    max_nodes: int = DEFAULT_SETTINGS.unfold_max_nodes,
) -> tuple[RegularRun, Annotation]:
    """Unfold a strategy breadth-first into a regular run.

    A node is reused whenever its configuration ``(state, memory)``
    recurs; in games ``adversary`` picks the option at every node and
    must be memoryless for the reuse to be sound.

    Raises:
        UndefinedStrategyError: when the strategy has no move at a reached configuration
        UnfoldLimitError: when more than ``max_nodes`` configurations are reached
    """
    automaton = is_automaton(m)
    if not automaton and adversary is None:
        raise StrategyError("Unfolding a game needs an adversary")
    index: dict[tuple[str, object], str] = {}
    queue: deque[tuple[str, object]] = deque()

    def node_for(config: tuple[str, object]) -> str:
        if config not in index:
            if len(index) >= max_nodes:
                raise UnfoldLimitError(f"Unfolding exceeded {max_nodes} configurations", tuple(index))
            index[config] = f"n{len(index)}"
            queue.append(config)
        return index[config]

    node_for((q0, mem0))
    nodes = []
    levels = {}
    while queue:
        q, mem = queue.popleft()
        options = m.state(q).options
        option = options[0] if automaton else adversary(q, mem, options)
        choice, memories = strat(q, mem, option)
        children = tuple(node_for(c) for c in zip(choice.transition.successors, memories))
        node_id = index[(q, mem)]
        nodes.append(RunNode(node_id, q, choice.transition.symbol, children, None if automaton else option))
        levels[node_id] = mem
    return RegularRun(tuple(nodes), index[(q0, mem0)]), Annotation(levels)


def configurations(z: RegularRun, a: Annotation) -> list[tuple[str, object]]:
    """``(state, level)`` per node in node order."""
    return [(n.state, a.levels[n.id]) for n in z.nodes]


def parse_run(text: str) -> tuple[RegularRun, Annotation | None]:
    """Parse a run file; ``level`` lines, if any, form the annotation."""
    nodes, levels, root = [], {}, None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if match := _NODE.match(line):
            node_id, state, option, symbol, args = match.groups()
            children = tuple(c.strip() for c in args.split(",")) if args.strip() else ()
            if any(n.id == node_id for n in nodes):
                raise ParseError(f"Node '{node_id}' declared twice", lineno)
            nodes.append(RunNode(node_id, state, symbol, children, option))
        elif match := _ROOT.match(line):
            if root is not None:
                raise ParseError("Duplicate 'root' line", lineno)
            root = match.group(1)
        elif match := _LEVEL.match(line):
            value = Fraction(match.group(2))
            levels[match.group(1)] = int(value) if value.denominator == 1 else value
        else:
            raise ParseError(f"Invalid run line {line!r}", lineno)
    if root is None:
        raise ParseError("Missing 'root' line")
    return RegularRun(tuple(nodes), root), (Annotation(levels) if levels else None)


def render_run(z: RegularRun, a: Annotation | None = None) -> str:
    lines = []
    for n in z.nodes:
        prefix = f"{n.option}:" if n.option else ""
        lines.append(f"node {n.id} {n.state} {prefix}{n.symbol}({','.join(n.children)})")
    lines.append(f"root {z.root}")
    if a is not None:
        for n in z.nodes:
            lines.append(f"level {n.id} {render_number(a.levels[n.id])}")
    return "\n".join(lines) + "\n"

"""Strategy synthesis for resource-aware Büchi automata and games.

``synth_fig2`` computes the extents of the even states, resets the odd
states and replays the odd pass, remembering for every odd state the
move witnessing its first update (the acceptor, played at the threshold)
and the move witnessing its last one (the base, played at the extent).

Skeletons map configurations ``(q, level)`` to moves.  They are played
either exactly (memory-full) or with the carry-over rule: pick the largest
domain level not above the current memory and pass the surplus on.
"""
import bisect
import logging
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .exceptions import ParseError, StrategyError, UndefinedStrategyError, UnsupportedModelError
from .extent import Choice, ExtentMap, Update, UpdateTrace, evaluate_state, extent_fig1
from .model import IDENT, Model, is_buchi
from .resource_game import (
    FORALL,
    OptionConfig,
    ResourceGame,
    StateConfig,
    build_resource_game,
    zielonka_solve,
)
from .semiring import INF, render_number

logger = logging.getLogger(__name__)

_MOVE = re.compile(rf"({IDENT}):({IDENT})\(([^()]*)\)")
_FIELD = re.compile(r"^(\w+)=(.*)$")


@dataclass(frozen=True)
class Move:
    """One witnessing choice per option of a state, in option order."""

    choices: tuple[Choice, ...]

    def choice(self, option: str | None = None) -> Choice:
        if option is None:
            if len(self.choices) != 1:
                raise StrategyError("An option must be given for states with several options")
            return self.choices[0]
        for c in self.choices:
            if c.option == option:
                return c
        raise StrategyError(f"Move has no choice for option '{option}'")

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.choices)


@dataclass
class SkeletonStrategy:
    """Partial map ``(state, level) -> Move``."""

    entries: dict[tuple[str, object], Move] = field(default_factory=dict)

    def __contains__(self, config) -> bool:
        return config in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[str, object]]:
        return iter(self.entries)

    def get(self, state: str, level) -> Move | None:
        return self.entries.get((state, level))

    def domain(self, state: str) -> list:
        return sorted(n for q, n in self.entries if q == state)

    def states(self) -> list[str]:
        return sorted({q for q, _ in self.entries})

    def with_entry(self, state: str, level, move: Move) -> "SkeletonStrategy":
        entries = dict(self.entries)
        entries[(state, level)] = move
        return SkeletonStrategy(entries)

    def without(self, state: str, level) -> "SkeletonStrategy":
        entries = dict(self.entries)
        entries.pop((state, level), None)
        return SkeletonStrategy(entries)


@dataclass
class ReducedStrategy:
    """Threshold, acceptor and base per odd state; one move per even state."""

    model: Model
    extents: ExtentMap
    thresholds: dict[str, object]
    acceptors: dict[str, Move]
    bases: dict[str, Move | None]
    sigmas: dict[str, Move]
    trace: UpdateTrace = field(default_factory=UpdateTrace)
    rounds: int = 0

    def skeleton(self) -> SkeletonStrategy:
        """The reduced skeleton: acceptor, base and even entries only."""
        entries = {}
        for q, theta in self.thresholds.items():
            entries[(q, theta)] = self.acceptors[q]
            base = self.bases.get(q)
            if base is not None:
                entries[(q, self.extents.level(q))] = base
        for q, move in self.sigmas.items():
            entries[(q, self.extents.level(q))] = move
        return SkeletonStrategy(entries)

    def render(self) -> str:
        """Strategy file text, one line per state with finite extent."""
        lines = []
        for q in self.model.state_names:
            if q in self.sigmas:
                lines.append(f"{q} sigma={self.sigmas[q]}")
            elif q in self.thresholds:
                base = self.bases.get(q)
                lines.append(
                    f"{q} theta={render_number(self.thresholds[q])} "
                    f"acceptor={self.acceptors[q]} base={base if base is not None else 'none'}"
                )
        return "\n".join(lines) + "\n"

    def table(self) -> str:
        """Threshold table printed by the synth command."""
        return "".join(
            f"{q} theta={render_number(theta)} ext={self.extents[q]}\n"
            for q, theta in self.thresholds.items()
        )


def synth_fig2(m: Model) -> tuple[ReducedStrategy, ExtentMap]:
    """Synthesize attractor and base moves for a Büchi automaton or game.

    Args:
        m: A Büchi model over a tropical semiring

    Returns:
        The reduced strategy (carrying its update trace) and the extents

    Raises:
        UnsupportedModelError: if the parity range is not Büchi
    """
    if not is_buchi(m):
        raise UnsupportedModelError("unsupported: parity synthesis")
    ext, _ = extent_fig1(m)
    table = ext.payloads()

    sigmas = {}
    for q in m.states_of_parity(2):
        if table[q] == INF:
            continue
        _, choices, _ = evaluate_state(m, q, table)
        sigmas[q] = Move(choices)

    odd = m.states_of_parity(1)
    for q in odd:
        table[q] = INF
    thresholds: dict[str, object] = {}
    acceptors: dict[str, Move] = {}
    bases: dict[str, Move | None] = {}
    trace = UpdateTrace()
    rounds = 0
    while True:
        rounds += 1
        old = dict(table)
        changed = False
        for q in odd:
            value, choices, worst = evaluate_state(m, q, old)
            if value >= old[q]:
                continue
            changed = True
            trace.record(Update(q, 1, 0, rounds, value, choices, worst))
            if q not in thresholds:
                thresholds[q] = value
                acceptors[q] = Move(choices)
                bases[q] = None
            else:
                bases[q] = Move(choices)
            table[q] = value
        if not changed:
            break
    trace.note_rounds(1, rounds)

    for q in odd:
        if table[q] != ext.level(q):
            logger.error(f"Odd pass ended at {q}={table[q]}, extent is {ext[q]}")
            raise StrategyError(f"Odd pass disagrees with the extent of '{q}'")
    logger.info(f"synth_fig2 finished after {rounds} rounds")
    strategy = ReducedStrategy(m, ext, thresholds, acceptors, bases, sigmas, trace, rounds)
    return strategy, ext


def skeleton_of(reduced: ReducedStrategy, trace: UpdateTrace) -> tuple[SkeletonStrategy, SkeletonStrategy]:
    """Full and reduced skeletons from a strategy and its odd-pass trace.

    The full skeleton has one entry per recorded update plus the even
    entries; the reduced one keeps acceptor, base and even entries.
    """
    trace = trace.final_call(1)
    ext = reduced.extents
    entries: dict[tuple[str, object], Move] = {}
    for q in {u.state for u in trace}:
        if q not in reduced.thresholds:
            raise StrategyError(f"Trace updates '{q}', which the strategy does not cover")
    for q, theta in reduced.thresholds.items():
        updates = trace.for_state(q)
        if not updates:
            raise StrategyError(f"Trace has no update for '{q}'")
        if updates[0].value != theta or updates[-1].value != ext.level(q):
            raise StrategyError(f"Trace for '{q}' does not match threshold {theta} and extent {ext[q]}")
        if Move(updates[0].choices) != reduced.acceptors[q]:
            raise StrategyError(f"Acceptor of '{q}' is not the first witness in the trace")
        for u in updates:
            entries[(q, u.value)] = Move(u.choices)
    for q, move in reduced.sigmas.items():
        entries[(q, ext.level(q))] = move
    return SkeletonStrategy(entries), reduced.skeleton()


def no_redundancy(m: Model, s: SkeletonStrategy) -> bool:
    """True iff no conform path drops an odd configuration to a lower level.

    A path from an odd ``(q,n)`` to ``(q,n')`` with ``n' < n`` that visits
    no even configuration on the way is a redundancy.
    """
    def successors(config):
        move = s.entries[config]
        for choice in move.choices:
            for target in choice.successors:
                if target in s.entries:
                    yield target

    for start in s.entries:
        q, n = start
        if m.parity(q) % 2 == 0:
            continue
        seen = set()
        stack = list(successors(start))
        while stack:
            config = stack.pop()
            if config in seen:
                continue
            seen.add(config)
            if m.parity(config[0]) % 2 == 0:
                continue
            if config[0] == q and config[1] < n:
                logger.info(f"Redundancy: ({q},{n}) reaches {config}")
                return False
            stack.extend(successors(config))
    return True


def next_memory_full(s: SkeletonStrategy, q: str, mem, option: str | None = None) -> list[tuple[str, object]]:
    """Successors and their exact memories from the entry at ``(q, mem)``."""
    move = s.get(q, mem)
    if move is None:
        raise UndefinedStrategyError(q, mem)
    return list(move.choice(option).successors)


def distribute_carryover(surplus, k: int) -> list[Fraction]:
    """Split ``surplus`` into ``k`` equal exact shares."""
    if k < 1:
        raise StrategyError("Surplus can only be distributed over at least one successor")
    if surplus < 0:
        raise StrategyError(f"Negative surplus {surplus}")
    share = Fraction(surplus) / k
    return [share] * k


def next_carry_over(
    s: SkeletonStrategy,
    q: str,
    mem,
    option: str | None = None,
    redistribute: bool = False,
    bound=None,
) -> tuple[Choice, tuple]:
    """Play the entry at the largest domain level ``n <= mem``, carrying ``mem - n``.

    Args:
        s: Skeleton strategy
        q: Current state
        mem: Current memory
        option: Option picked by ∀ (games only)
        redistribute: Split the surplus equally over all successors
        bound: Cap the carried surplus so that ``w + Σ memories <= bound``

    Returns:
        The choice played and the successor memories
    """
    levels = [n for n in s.domain(q) if n <= mem]
    if not levels:
        raise UndefinedStrategyError(q, mem)
    n = max(levels)
    choice = s.get(q, n).choice(option)
    k = len(choice.levels)
    if k == 0:
        return choice, ()
    surplus = mem - n
    if bound is not None:
        surplus = min(surplus, bound - choice.cost)
    if redistribute:
        shares = distribute_carryover(surplus, k)
    else:
        shares = [surplus] + [0] * (k - 1)
    return choice, tuple(_tidy(level + share) for level, share in zip(choice.levels, shares))


def _tidy(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


class MemoryFullStrategy:
    """Plays a skeleton exactly; memory is the skeleton level."""

    def __init__(self, skeleton: SkeletonStrategy):
        self.skeleton = skeleton

    def __call__(self, state: str, memory, option: str | None = None) -> tuple[Choice, tuple]:
        move = self.skeleton.get(state, memory)
        if move is None:
            raise UndefinedStrategyError(state, memory)
        choice = move.choice(option)
        return choice, choice.levels


class CarryOverStrategy:
    """Plays a skeleton with the carry-over rule."""

    def __init__(self, skeleton: SkeletonStrategy, bound=None, redistribute: bool = False):
        self.skeleton = skeleton
        self.bound = bound
        self.redistribute = redistribute

    def __call__(self, state: str, memory, option: str | None = None) -> tuple[Choice, tuple]:
        return next_carry_over(self.skeleton, state, memory, option, self.redistribute, self.bound)


def carry_over(m: Model, skeleton: SkeletonStrategy) -> CarryOverStrategy:
    """Carry-over strategy for ``m``; tree models redistribute exact rationals."""
    return CarryOverStrategy(skeleton, bound=m.bound, redistribute=m.signature.max_arity >= 2)


def adversary_policy(g: ResourceGame) -> dict:
    """Memoryless ∀ policy: stay in the ∀-winning region, else hurt ∃ most.

    Among option configurations the one with the least slack (level minus
    cheapest ∃ move) is worst for ∃; ties go to the first declared option.
    Dead-end configurations get no entry.
    """
    winners = zielonka_solve(g)
    policy = {}
    for c in g.universal():
        targets = g.successors(c)
        if not targets:
            continue
        losing = [t for t in targets if winners.get(t) == FORALL]
        if losing:
            policy[c] = losing[0]
        elif isinstance(c, StateConfig):
            policy[c] = min(targets, key=lambda t: _slack(g, t))
        else:
            policy[c] = targets[0]
    return policy


def _slack(g: ResourceGame, option: OptionConfig):
    costs = [g.cost(option, b) for b in g.graph.successors(option)]
    if not costs:
        return -INF
    return option.level - min(costs)


Adversary = Callable[[str, object, tuple[str, ...]], str]


class PolicyAdversary:
    """∀ player following a precomputed resource-game policy.

    A memory between game levels is answered as at the largest level below it.
    """

    def __init__(self, policy: dict):
        self.policy = policy
        self.levels: dict[str, list[int]] = {}
        for c in policy:
            if isinstance(c, StateConfig):
                self.levels.setdefault(c.state, []).append(c.level)
        for levels in self.levels.values():
            levels.sort()

    def __call__(self, state: str, memory, options: tuple[str, ...]) -> str:
        levels = self.levels.get(state, [])
        index = bisect.bisect_right(levels, memory)
        if index == 0:
            return options[0]
        target = self.policy.get(StateConfig(state, levels[index - 1]))
        if isinstance(target, OptionConfig) and target.option in options:
            return target.option
        return options[0]


class RandomAdversary:
    """Seeded ∀ player; memoryless, so each configuration gets one fixed answer."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.decisions: dict[tuple[str, object], str] = {}

    def __call__(self, state: str, memory, options: tuple[str, ...]) -> str:
        key = (state, memory)
        if key not in self.decisions:
            self.decisions[key] = self.rng.choice(options)
        return self.decisions[key]


def worst_adversary(m: Model, ext: ExtentMap) -> PolicyAdversary:
    """Worst-case ∀ player derived from the solved resource game."""
    return PolicyAdversary(adversary_policy(build_resource_game(m, ext)))


def parse_strategy(text: str, m: Model) -> ReducedStrategy:
    """Read a strategy file for ``m``; extents are recomputed from the model."""
    if not is_buchi(m):
        raise UnsupportedModelError("unsupported: parity synthesis")
    ext, _ = extent_fig1(m)
    thresholds, acceptors, bases, sigmas = {}, {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        q, *tokens = line.split()
        if not m.has_state(q):
            raise StrategyError(f"Strategy names unknown state '{q}' (line {lineno})")
        fields = {}
        for token in tokens:
            match = _FIELD.match(token)
            if not match:
                raise ParseError(f"Invalid field {token!r}", lineno)
            fields[match.group(1)] = match.group(2)
        if m.parity(q) % 2 == 0:
            if set(fields) != {"sigma"}:
                raise ParseError(f"Even state '{q}' takes exactly 'sigma='", lineno)
            sigmas[q] = _parse_move(m, q, fields["sigma"], lineno)
            continue
        if set(fields) != {"theta", "acceptor", "base"}:
            raise ParseError(f"Odd state '{q}' takes 'theta=', 'acceptor=' and 'base='", lineno)
        try:
            theta = Fraction(fields["theta"])
        except ValueError:
            raise ParseError(f"Invalid threshold {fields['theta']!r}", lineno) from None
        if ext.level(q) == INF or theta < ext.level(q):
            raise StrategyError(f"Threshold {fields['theta']} of '{q}' is below its extent {ext[q]}")
        thresholds[q] = _tidy(theta)
        acceptors[q] = _parse_move(m, q, fields["acceptor"], lineno)
        bases[q] = None if fields["base"] == "none" else _parse_move(m, q, fields["base"], lineno)
    return ReducedStrategy(m, ext, thresholds, acceptors, bases, sigmas)


def _parse_move(m: Model, q: str, text: str, lineno: int) -> Move:
    choices = []
    for option, symbol, args in _MOVE.findall(text):
        if option not in m.state(q).options:
            raise StrategyError(f"'{option}' is not an option of '{q}' (line {lineno})")
        targets = [a.strip() for a in args.split(",")] if args.strip() else []
        successors, levels = [], []
        for target in targets:
            name, _, level = target.partition(":")
            try:
                levels.append(_tidy(Fraction(level)))
            except ValueError:
                raise ParseError(f"Invalid level in {target!r}", lineno) from None
            successors.append(name)
        transition = m.distribution(option).find(symbol, tuple(successors))
        if transition is None:
            raise StrategyError(f"{symbol}({','.join(successors)}) is not in option '{option}' of '{q}' (line {lineno})")
        choices.append(Choice(option, transition, tuple(levels)))
    if not choices:
        raise ParseError(f"Invalid move {text!r}", lineno)
    return Move(tuple(choices))

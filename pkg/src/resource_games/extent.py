"""Extent computation.

Two engines solve the same nested equational system.  ``extent_generic``
works in any provided semiring and restarts inner blocks cleanly.
``extent_fig1`` is the recursive resource-aware procedure over tropical
payloads: one shared table, a Jacobi round per iteration, and a trace of
every strict decrease together with its witnessing transitions.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping

from .exceptions import SemiringError
from .model import Model, Transition
from .semiring import INF, SemiringValue, render_number

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtentMap:
    """State -> semiring value, in model declaration order."""

    values: dict[str, SemiringValue]

    def __getitem__(self, state: str) -> SemiringValue:
        return self.values[state]

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def items(self):
        return self.values.items()

    def payloads(self) -> dict[str, object]:
        return {q: v.payload for q, v in self.values.items()}

    def level(self, state: str):
        """Tropical payload of ``state`` (``INF`` when infinite)."""
        return self.values[state].payload

    def render(self) -> str:
        return "".join(f"{q}={v}\n" for q, v in self.values.items())


@dataclass(frozen=True)
class Choice:
    """A witnessing transition of one option, with its successor levels."""

    option: str
    transition: Transition
    levels: tuple

    @property
    def successors(self) -> tuple[tuple[str, object], ...]:
        return tuple(zip(self.transition.successors, self.levels))

    @property
    def cost(self):
        """Transition weight plus the successor levels."""
        return self.transition.weight.payload + sum(self.levels)

    def __str__(self) -> str:
        targets = ",".join(f"{q}:{render_number(n)}" for q, n in self.successors)
        return f"{self.option}:{self.transition.symbol}({targets})"


@dataclass(frozen=True)
class Update:
    """A strict decrease of ``e(state)`` to ``value``.

    ``choices`` holds one witness per option of the state; ``worst`` indexes
    the option attaining the value.
    """

    state: str
    parity: int
    call: int
    round: int
    value: object
    choices: tuple[Choice, ...]
    worst: int = 0

    @property
    def option(self) -> str:
        return self.choices[self.worst].option

    @property
    def transition(self) -> Transition:
        return self.choices[self.worst].transition

    @property
    def successor_levels(self) -> tuple:
        return self.choices[self.worst].levels


@dataclass
class UpdateTrace:
    """Chronological list of strict updates, plus per-parity round counts."""

    updates: list[Update] = field(default_factory=list)
    rounds: dict[int, int] = field(default_factory=dict)

    def __iter__(self) -> Iterator[Update]:
        return iter(self.updates)

    def __len__(self) -> int:
        return len(self.updates)

    def record(self, update: Update) -> None:
        self.updates.append(update)

    def note_rounds(self, parity: int, rounds: int) -> None:
        self.rounds[parity] = max(self.rounds.get(parity, 0), rounds)

    def for_state(self, state: str) -> list[Update]:
        return [u for u in self.updates if u.state == state]

    def values(self, state: str) -> list:
        return [u.value for u in self.updates if u.state == state]

    def final_call(self, parity: int = 1) -> "UpdateTrace":
        """The updates made by the last invocation for ``parity``."""
        calls = [u.call for u in self.updates if u.parity == parity]
        if not calls:
            return UpdateTrace([], dict(self.rounds))
        last = max(calls)
        return UpdateTrace([u for u in self.updates if u.parity == parity and u.call == last], dict(self.rounds))


def one_step_value(m: Model, q: str, current: Mapping[str, SemiringValue] | ExtentMap) -> SemiringValue:
    """One unfolding of the extent equation at ``q``.

    The worst option (infimum w.r.t. ⊑) of the semiring sum over its
    transitions of ``weight • current(q1) • ... • current(qn)``, with the
    offset of ``q`` applied through the residual.
    """
    S = m.semiring
    per_option = [
        S.sum(S.mul(t.weight, S.product(current[s] for s in t.successors)) for t in dist.entries)
        for dist in m.options(q)
    ]
    return S.residual(S.infimum(per_option), m.offset(q))


def extent_generic(
    m: Model,
    on_update: Callable[[int, str, SemiringValue, SemiringValue], None] | None = None,
) -> ExtentMap:
    """Solve the nested system by Kleene iteration, innermost parity first.

    Odd blocks are least fixpoints started at the semiring zero, even blocks
    greatest fixpoints started at the semiring one.  Each block re-solves
    every inner block before a pass over its own states.

    Args:
        m: A valid model over a bounded semiring
        on_update: Called as ``on_update(parity, state, old, new)`` on every change

    Returns:
        The extent map
    """
    S = m.semiring
    values: dict[str, SemiringValue] = {q: S.zero for q in m.state_names}
    passes: dict[int, int] = {}

    def solve(k: int) -> None:
        if k == 0:
            return
        block = m.states_of_parity(k)
        start = S.zero if k % 2 else S.one
        for q in block:
            values[q] = start
        count = 0
        while True:
            count += 1
            solve(k - 1)
            changed = False
            for q in block:
                new = one_step_value(m, q, values)
                if new != values[q]:
                    if on_update is not None:
                        on_update(k, q, values[q], new)
                    values[q] = new
                    changed = True
            if not changed:
                break
        passes[k] = max(passes.get(k, 0), count)

    solve(m.max_parity)
    logger.info(f"extent_generic passes per parity: {passes}")
    return ExtentMap({q: values[q] for q in m.state_names})


def _need(total, offset, bound):
    """Tropical ``(total capped at B) ⊖ offset`` on payloads."""
    if total > bound:
        return INF
    if offset == INF:
        return 0
    return max(total - offset, 0)


def evaluate_state(m: Model, q: str, table: Mapping[str, object]) -> tuple[object, tuple[Choice, ...], int]:
    """Tropical one-step value of ``q`` over payloads, with witnesses.

    Returns the value, one witness per option (``None`` for options whose
    value is infinite) and the index of the first worst option.  Witnesses
    tie-break by transition order, the worst option by option order.
    """
    bound = m.bound
    offset = m.offset(q).payload
    value = -1
    worst = 0
    choices = []
    for index, dist in enumerate(m.options(q)):
        best = INF
        witness = None
        for t in dist.entries:
            levels = tuple(table[s] for s in t.successors)
            need = _need(t.weight.payload + sum(levels), offset, bound)
            if need < best:
                best = need
                witness = Choice(dist.name, t, levels)
        choices.append(witness)
        if best > value:
            value = best
            worst = index
    return value, tuple(choices), worst


def _require_tropical(m: Model, what: str) -> None:
    if not m.semiring.is_tropical:
        raise SemiringError(f"{what} requires a tropical semiring, got {m.semiring}")


def extent_fig1(m: Model) -> tuple[ExtentMap, UpdateTrace]:
    """Recursive extent procedure over one shared table.

    ``Extent(n)`` initialises parity-``n`` states to 0 (even) or inf (odd),
    then repeats: solve parity ``n-1`` recursively, snapshot the table and
    update every parity-``n`` state from the snapshot, until no parity-``n``
    value changes.  Games take the worst option at every state.

    Returns:
        The extent map and the trace of strict decreases
    """
    _require_tropical(m, "extent_fig1")
    table: dict[str, object] = {}
    trace = UpdateTrace()
    calls = {"next": 0}

    def extent(n: int) -> None:
        if n == 0:
            return
        level = m.states_of_parity(n)
        for q in level:
            table[q] = 0 if n % 2 == 0 else INF
        call = calls["next"]
        calls["next"] += 1
        rounds = 0
        while True:
            rounds += 1
            extent(n - 1)
            # lower parities are read as left by the recursive call
            old = dict(table)
            changed = False
            for q in level:
                value, choices, worst = evaluate_state(m, q, old)
                if value == old[q]:
                    continue
                changed = True
                if value < old[q]:
                    trace.record(Update(q, n, call, rounds, value, choices, worst))
                table[q] = value
            if not changed:
                break
        trace.note_rounds(n, rounds)

    extent(m.max_parity)
    logger.info(f"extent_fig1 rounds per parity: {trace.rounds}")
    S = m.semiring
    return ExtentMap({q: S.value(table[q]) for q in m.state_names}), trace

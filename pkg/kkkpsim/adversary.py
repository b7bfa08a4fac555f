"""Impersonation attack on the two-pulse protocol.

Eve cuts the channel in two. Towards Bob she plays Alice, towards Alice she plays Bob:

1.  She stores Alice's pair in E1 and sends Bob a decoy pair at random angles theta'.
2.  She stores Bob's shuffled decoys in E2 after undoing theta', which leaves
    phi + (-1)^s_i pi/4 in slot i, and returns E1 shuffled with her own guesses s'.
3.  She measures Alice's survivor, reading the pre-key l' = s'_b xor k xor beta, and forwards
    one slot of E2 with the key encoding (-1)^(k xor beta xor 1) pi/4 re-applied.

Bob's outcome is then correct only if Eve's slot matches b, or if the shuffling factors are
correlated as in the original protocol.
"""

import dataclasses
import enum
import itertools
import logging
import random
import typing as t

from .qubit import Angle, Bit, check_bit, measure_hv, random_angle, rotate, PolarizationQubit
from .channel import ChannelTap, Message, MessageKind, PulseSlot, QubitPair
from .protocol import QUARTER_PI, sign
from .streams import Party, RandomStreams

_LOG = logging.getLogger(__name__)

SHUFFLE_NAMES = ('00', '01', '10', '11', 'mimic', 'random')

PULSE_NAMES = ('first', 'second', 'random')


class AttackStateError(RuntimeError):
    """Raised when Eve is asked to act on a round she has no stored pulses for."""


class PulseChoice(enum.Enum):
    """Which stored pulse of E2 Eve forwards to Bob."""

    ALWAYS_FIRST = 'first'
    ALWAYS_SECOND = 'second'
    RANDOM_PER_ROUND = 'random'


@dataclasses.dataclass(frozen=True)
class EveStrategy:
    """Eve's choices: shuffle guesses s', pulse forwarded to Bob, mimicry of the correlation.

    shuffle_guess of None means both guesses are drawn afresh every round. With
    mimic_correlation, the second guess is always the negation of the first one.
    """

    shuffle_guess: t.Optional[t.Tuple[Bit, Bit]] = (0, 0)
    pulse_choice: PulseChoice = PulseChoice.ALWAYS_FIRST
    mimic_correlation: bool = False

    def __post_init__(self):
        if self.shuffle_guess is not None:
            assert len(self.shuffle_guess) == 2, self.shuffle_guess
            for guess in self.shuffle_guess:
                check_bit(guess)
        assert isinstance(self.pulse_choice, PulseChoice), type(self.pulse_choice)

    @classmethod
    def from_names(cls, shuffle: str, pulse: str) -> 'EveStrategy':
        """Create strategy from command-line names, e.g. ('01', 'first') or ('mimic', 'random')."""
        if shuffle not in SHUFFLE_NAMES:
            raise ValueError(f'unknown shuffle guess "{shuffle}", expected one of {SHUFFLE_NAMES}')
        if pulse not in PULSE_NAMES:
            raise ValueError(f'unknown pulse choice "{pulse}", expected one of {PULSE_NAMES}')
        pulse_choice = PulseChoice(pulse)
        if shuffle == 'mimic':
            return cls((0, 1), pulse_choice, mimic_correlation=True)
        if shuffle == 'random':
            return cls(None, pulse_choice)
        return cls((int(shuffle[0]), int(shuffle[1])), pulse_choice)

    @property
    def shuffle_name(self) -> str:
        if self.mimic_correlation:
            return 'mimic'
        if self.shuffle_guess is None:
            return 'random'
        return ''.join(str(_) for _ in self.shuffle_guess)

    @property
    def name(self) -> str:
        return f'{self.shuffle_name}/{self.pulse_choice.value}'

    @property
    def is_fixed(self) -> bool:
        """True if the strategy makes no random choices."""
        return self.shuffle_guess is not None \
            and self.pulse_choice is not PulseChoice.RANDOM_PER_ROUND

    @property
    def fixed_shuffles(self) -> t.Tuple[Bit, Bit]:
        assert self.shuffle_guess is not None, self
        guess1, guess2 = self.shuffle_guess
        if self.mimic_correlation:
            guess2 = guess1 ^ 1
        return guess1, guess2

    @property
    def fixed_pulse(self) -> PulseSlot:
        assert self.pulse_choice is not PulseChoice.RANDOM_PER_ROUND, self
        if self.pulse_choice is PulseChoice.ALWAYS_FIRST:
            return PulseSlot.FIRST
        return PulseSlot.SECOND

    def draw_shuffles(self, rng: random.Random) -> t.Tuple[Bit, Bit]:
        if self.shuffle_guess is not None:
            return self.fixed_shuffles
        guess1, guess2 = rng.getrandbits(1), rng.getrandbits(1)
        if self.mimic_correlation:
            guess2 = guess1 ^ 1
        return guess1, guess2

    def draw_pulse(self, rng: random.Random) -> PulseSlot:
        if self.pulse_choice is PulseChoice.RANDOM_PER_ROUND:
            return PulseSlot.from_index(rng.getrandbits(1))
        return self.fixed_pulse

    def fixed_variants(self) -> t.List['EveStrategy']:
        """Expand per-round randomness into equally likely strategies without randomness."""
        if self.shuffle_guess is None and self.mimic_correlation:
            guesses: t.List[t.Tuple[Bit, Bit]] = [(0, 1), (1, 0)]
        elif self.shuffle_guess is None:
            guesses = list(itertools.product((0, 1), repeat=2))
        else:
            guesses = [self.shuffle_guess]
        if self.pulse_choice is PulseChoice.RANDOM_PER_ROUND:
            pulses = [PulseChoice.ALWAYS_FIRST, PulseChoice.ALWAYS_SECOND]
        else:
            pulses = [self.pulse_choice]
        return [type(self)(guess, pulse, self.mimic_correlation)
                for guess, pulse in itertools.product(guesses, pulses)]


def builtin_strategies() -> t.List[EveStrategy]:
    """All strategies selectable from the command line."""
    return [EveStrategy.from_names(shuffle, pulse)
            for shuffle, pulse in itertools.product(SHUFFLE_NAMES, PULSE_NAMES)]


@dataclasses.dataclass
class EveRoundState:
    """What Eve holds during one round."""

    round_id: int
    e1: t.Optional[QubitPair] = None
    theta_prime: t.Optional[t.Tuple[Angle, Angle]] = None
    e2: t.Optional[QubitPair] = None
    shuffles: t.Optional[t.Tuple[Bit, Bit]] = None
    pulse: t.Optional[PulseSlot] = None
    prekey_l: t.Optional[Bit] = None
    learned_key_guess: t.Optional[Bit] = None


def eve_on_forward(message: Message, state: EveRoundState, rng: random.Random) -> Message:
    """Store Alice's pair in E1 and send Bob a decoy pair at fresh random angles."""
    assert message.kind is MessageKind.FORWARD_PAIR, message.kind
    state.e1 = message.pair
    state.theta_prime = (random_angle(rng), random_angle(rng))
    decoys = (PolarizationQubit(state.theta_prime[0]), PolarizationQubit(state.theta_prime[1]))
    return Message(message.round_id, MessageKind.FORWARD_PAIR, decoys)


def eve_on_return(message: Message, state: EveRoundState, strategy: EveStrategy,
                  rng: random.Random) -> Message:
    """Store Bob's compensated pair in E2 and return E1 shuffled with Eve's guesses."""
    assert message.kind is MessageKind.RETURN_PAIR, message.kind
    if state.e1 is None or state.theta_prime is None:
        raise AttackStateError(f'no stored pair E1 for round {state.round_id}')
    state.e2 = (rotate(message.pair[0], -state.theta_prime[0]),
                rotate(message.pair[1], -state.theta_prime[1]))
    state.shuffles = strategy.draw_shuffles(rng)
    shuffled = (rotate(state.e1[0], sign(state.shuffles[0]) * QUARTER_PI),
                rotate(state.e1[1], sign(state.shuffles[1]) * QUARTER_PI))
    return Message(message.round_id, MessageKind.RETURN_PAIR, shuffled)


def eve_on_survivor(message: Message, state: EveRoundState, strategy: EveStrategy,
                    rng: random.Random) -> Message:
    """Read the pre-key from Alice's survivor and forward a re-encoded pulse of E2 to Bob.

    The encoding bit e = l' xor s'_i, where i is the forwarded slot, makes the forwarded state
    phi + (-1)^s_i pi/4 + (-1)^(k xor beta xor 1) pi/4 whenever Eve's guess for slot b equals
    her guess for slot i.
    """
    assert message.kind is MessageKind.SURVIVOR, message.kind
    if state.e2 is None or state.shuffles is None:
        raise AttackStateError(f'no stored pair E2 for round {state.round_id}')
    state.prekey_l = measure_hv(message.qubit, rng)
    state.pulse = strategy.draw_pulse(rng)
    encoding = state.prekey_l ^ state.shuffles[state.pulse.index]
    forwarded = rotate(state.e2[state.pulse.index], sign(encoding ^ 1) * QUARTER_PI)
    if strategy.mimic_correlation:
        # s'_b xor beta = s'_1 xor 1 for both slots, so the pre-key already reveals k
        state.learned_key_guess = state.prekey_l ^ state.shuffles[0] ^ 1
    return Message(message.round_id, MessageKind.SURVIVOR, forwarded)


def eve_learn_from_announcement(state: EveRoundState, announced_b: PulseSlot) -> Bit:
    """Compute Eve's key guess k = l' xor s'_b xor beta once b is public."""
    if state.prekey_l is None or state.shuffles is None:
        raise AttackStateError(f'no pre-key for round {state.round_id}')
    guess = state.prekey_l ^ state.shuffles[announced_b.index] ^ announced_b.beta
    state.learned_key_guess = guess
    return guess


class ImpersonationTap(ChannelTap):
    """Channel tap running the impersonation attack round by round."""

    def __init__(self, strategy: EveStrategy, streams: t.Optional[RandomStreams] = None):
        assert isinstance(strategy, EveStrategy), type(strategy)
        self.strategy = strategy
        self.streams = RandomStreams(0) if streams is None else streams
        self.states: t.Dict[int, EveRoundState] = {}
        self._rngs: t.Dict[int, random.Random] = {}

    def _state(self, round_id: int) -> EveRoundState:
        try:
            return self.states[round_id]
        except KeyError as err:
            raise AttackStateError(f'round {round_id} was not intercepted from the start') \
                from err

    def on_forward(self, message: Message) -> Message:
        state = EveRoundState(message.round_id)
        self.states[message.round_id] = state
        # one generator per round in flight
        rng = random.Random(self.streams.substream_seed(message.round_id, Party.EVE))
        self._rngs[message.round_id] = rng
        return eve_on_forward(message, state, rng)

    def on_return(self, message: Message) -> Message:
        state = self._state(message.round_id)
        return eve_on_return(message, state, self.strategy, self._rngs[message.round_id])

    def on_survivor(self, message: Message) -> Message:
        state = self._state(message.round_id)
        rng = self._rngs.pop(message.round_id)
        return eve_on_survivor(message, state, self.strategy, rng)

    def on_announcement(self, message: Message) -> None:
        eve_learn_from_announcement(self._state(message.round_id), message.slot)

    def learned_key(self) -> t.Optional[t.List[Bit]]:
        guesses = [self.states[round_id].learned_key_guess for round_id in sorted(self.states)]
        if any(guess is None for guess in guesses):
            _LOG.warning('Eve has no key guess for some rounds yet')
            return None
        return t.cast(t.List[Bit], guesses)

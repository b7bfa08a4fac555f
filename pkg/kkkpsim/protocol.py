"""Honest parties of the two-pulse KKKP protocol.

Each round goes through three legs:

1.  Alice prepares two qubits at random angles theta1, theta2 and sends them to Bob.
2.  Bob rotates slot i by phi + (-1)^s_i pi/4 and sends both back. In the original protocol
    s2 = s1 xor 1, in the modified protocol s1 and s2 are independent.
3.  Alice rotates slot 1 by -theta1 + (-1)^k pi/4 and slot 2 by -theta2 + (-1)^(k xor 1) pi/4,
    blocks one slot according to b and returns the survivor, which Bob rotates by -phi and
    measures, obtaining l = s_b xor k xor beta.

After all rounds Alice announces every b, Bob decodes k = s_b xor l xor beta and the parties
compare hashes of their keys.
"""

import dataclasses
import enum
import hashlib
import logging
import math
import random
import typing as t

from .qubit import \
    Angle, Bit, PolarizationQubit, canonicalize, measure_hv, random_angle, rotate
from .channel import Channel, ChannelTap, Message, MessageKind, PulseSlot
from .streams import Party, RandomStreams

_LOG = logging.getLogger(__name__)

QUARTER_PI = math.pi / 4

DEFAULT_ROUNDS = 100000

HashFunction = t.Callable[[t.Sequence[Bit]], bytes]


def sign(bit: Bit) -> int:
    """Compute (-1)^bit."""
    return 1 - 2 * bit


class ProtocolVariant(enum.Enum):
    """Original protocol correlates Bob's shuffling factors, the modified one does not."""

    ORIGINAL = 'original'
    MODIFIED = 'modified'


@dataclasses.dataclass(frozen=True)
class AliceRoundSecrets:
    """Alice's hidden parameters of one round."""

    theta1: Angle
    theta2: Angle
    k: Bit
    b: PulseSlot

    def __post_init__(self):
        assert self.k in (0, 1), self.k
        assert isinstance(self.b, PulseSlot), type(self.b)

    @classmethod
    def draw(cls, rng: random.Random) -> 'AliceRoundSecrets':
        theta1 = random_angle(rng)
        theta2 = random_angle(rng)
        k = rng.getrandbits(1)
        b = PulseSlot.from_index(rng.getrandbits(1))
        return cls(theta1, theta2, k, b)

    @property
    def thetas(self) -> t.Tuple[Angle, Angle]:
        return self.theta1, self.theta2


@dataclasses.dataclass
class BobRoundSecrets:
    """Bob's hidden parameters of one round, and his raw outcome once measured."""

    phi: Angle
    s1: Bit
    s2: Bit
    raw_outcome_l: t.Optional[Bit] = None

    def __post_init__(self):
        assert self.s1 in (0, 1) and self.s2 in (0, 1), (self.s1, self.s2)

    @classmethod
    def draw(cls, variant: ProtocolVariant, rng: random.Random) -> 'BobRoundSecrets':
        phi = random_angle(rng)
        s1 = rng.getrandbits(1)
        s2 = rng.getrandbits(1)
        if variant is ProtocolVariant.ORIGINAL:
            s2 = s1 ^ 1
        return cls(phi, s1, s2)

    @property
    def shuffles(self) -> t.Tuple[Bit, Bit]:
        return self.s1, self.s2

    def shuffle_of(self, slot: PulseSlot) -> Bit:
        return self.shuffles[slot.index]


@dataclasses.dataclass
class RoundTranscript:
    """Everything that happened in one round, secrets included."""

    round_id: int
    alice: AliceRoundSecrets
    bob: BobRoundSecrets
    messages: t.List[Message] = dataclasses.field(default_factory=list)
    bob_key_bit: t.Optional[Bit] = None

    @property
    def alice_key_bit(self) -> Bit:
        return self.alice.k


@dataclasses.dataclass
class SessionResult:
    """Outcome of a complete session of N rounds."""

    variant: ProtocolVariant
    alice_key: t.List[Bit]
    bob_key: t.List[Bit]
    verified: bool
    transcripts: t.List[RoundTranscript]
    messages: t.List[Message] = dataclasses.field(default_factory=list)
    eve_key: t.Optional[t.List[Bit]] = None

    @property
    def rounds(self) -> int:
        return len(self.alice_key)


def forward_pair(round_id: int, secrets: AliceRoundSecrets) -> Message:
    qubits = (PolarizationQubit(secrets.theta1), PolarizationQubit(secrets.theta2))
    return Message(round_id, MessageKind.FORWARD_PAIR, qubits)


def alice_prepare(round_id: int, rng: random.Random) -> t.Tuple[Message, AliceRoundSecrets]:
    """Draw Alice's secrets and prepare the pair |theta1>|theta2>."""
    secrets = AliceRoundSecrets.draw(rng)
    return forward_pair(round_id, secrets), secrets


def shuffle_rotation(phi: float, shuffle: Bit) -> float:
    return phi + sign(shuffle) * QUARTER_PI


def apply_shuffle(message: Message, secrets: BobRoundSecrets) -> Message:
    """Rotate slot i by phi + (-1)^s_i pi/4 and address the pair back to Alice."""
    assert message.kind is MessageKind.FORWARD_PAIR, message.kind
    qubit1, qubit2 = message.pair
    qubits = (rotate(qubit1, shuffle_rotation(secrets.phi, secrets.s1)),
              rotate(qubit2, shuffle_rotation(secrets.phi, secrets.s2)))
    return Message(message.round_id, MessageKind.RETURN_PAIR, qubits)


def bob_shuffle(message: Message, variant: ProtocolVariant,
                rng: random.Random) -> t.Tuple[Message, BobRoundSecrets]:
    """Draw Bob's secrets and apply his random shuffling to the received pair."""
    secrets = BobRoundSecrets.draw(variant, rng)
    return apply_shuffle(message, secrets), secrets


def encoding_rotation(theta: float, k: Bit, slot: PulseSlot) -> float:
    """Alice's rotation of a slot: -theta + (-1)^(k xor beta xor 1) pi/4.

    This is (-1)^k on the first slot and (-1)^(k xor 1) on the second one.
    """
    return -theta + sign(k ^ slot.beta ^ 1) * QUARTER_PI


def alice_encode_block(message: Message, secrets: AliceRoundSecrets) -> Message:
    """Encode the key bit onto both returned qubits and let only slot b through."""
    assert message.kind is MessageKind.RETURN_PAIR, message.kind
    slot = secrets.b
    survivor = rotate(message.pair[slot.index],
                      encoding_rotation(secrets.thetas[slot.index], secrets.k, slot))
    return Message(message.round_id, MessageKind.SURVIVOR, survivor)


def expected_survivor_angle(phi: float, shuffle: Bit, k: Bit, slot: PulseSlot) -> Angle:
    """Closed form of the survivor: phi + (-1)^s_b pi/4 + (-1)^(k xor beta xor 1) pi/4."""
    return canonicalize(phi + sign(shuffle) * QUARTER_PI + sign(k ^ slot.beta ^ 1) * QUARTER_PI)


def honest_outcome(shuffle: Bit, k: Bit, slot: PulseSlot) -> Bit:
    """Bob's outcome in an undisturbed round: l = s_b xor k xor beta."""
    return shuffle ^ k ^ slot.beta


def bob_measure(message: Message, secrets: BobRoundSecrets, rng: random.Random) -> Bit:
    """Undo phi on the survivor and measure it in the horizontal/vertical basis."""
    assert message.kind is MessageKind.SURVIVOR, message.kind
    return measure_hv(rotate(message.qubit, -secrets.phi), rng)


def bob_decode(outcome: Bit, s1: Bit, s2: Bit, announced_b: PulseSlot) -> Bit:
    """Recover the key bit once b is public: k = s_b xor l xor beta."""
    shuffle = (s1, s2)[announced_b.index]
    return shuffle ^ outcome ^ announced_b.beta


def digest(key: t.Sequence[Bit]) -> bytes:
    """Default key hash: SHA-256 over one byte per key bit."""
    return hashlib.sha256(bytes(key)).digest()


def run_session(
        variant: ProtocolVariant, rounds: int, tap: t.Optional[ChannelTap] = None,
        streams: t.Optional[RandomStreams] = None, hash_function: HashFunction = digest,
        record: bool = False) -> SessionResult:
    """Run N rounds, announce the blocking factors, decode and compare key hashes.

    :param tap: interception on the channel, identity if None
    :param streams: source of all randomness, seed 0 if None
    :param record: if True, keep every delivered message in the result
    """
    assert isinstance(variant, ProtocolVariant), type(variant)
    if rounds < 1:
        raise ValueError(f'number of rounds must be positive, got {rounds}')
    if streams is None:
        streams = RandomStreams(0)
    channel = Channel(tap, record=record)
    _LOG.info('running %s protocol for %i rounds with %s through %s',
              variant.value, rounds, streams, type(channel.tap).__name__)

    transcripts = []
    for round_id in range(rounds):
        alice_rng = streams.for_round(round_id, Party.ALICE)
        bob_rng = streams.for_round(round_id, Party.BOB)
        forward, alice_secrets = alice_prepare(round_id, alice_rng)
        received = channel.send(forward)
        returned, bob_secrets = bob_shuffle(received, variant, bob_rng)
        returned = channel.send(returned)
        survivor = channel.send(alice_encode_block(returned, alice_secrets))
        bob_secrets.raw_outcome_l = bob_measure(survivor, bob_secrets, bob_rng)
        transcript = RoundTranscript(round_id, alice_secrets, bob_secrets)
        if record:
            transcript.messages += [received, returned, survivor]
        transcripts.append(transcript)

    for transcript in transcripts:
        announcement = channel.send(Message(
            transcript.round_id, MessageKind.BLOCK_ANNOUNCEMENT, transcript.alice.b))
        bob = transcript.bob
        assert bob.raw_outcome_l is not None
        transcript.bob_key_bit = bob_decode(bob.raw_outcome_l, bob.s1, bob.s2, announcement.slot)
        if record:
            transcript.messages.append(announcement)

    alice_key = [transcript.alice.k for transcript in transcripts]
    bob_key = [t.cast(Bit, transcript.bob_key_bit) for transcript in transcripts]
    alice_digest = channel.send(
        Message(rounds, MessageKind.HASH_EXCHANGE, hash_function(alice_key)))
    bob_digest = channel.send(
        Message(rounds, MessageKind.HASH_EXCHANGE, hash_function(bob_key)))
    verified = alice_digest.digest == bob_digest.digest
    if verified:
        _LOG.info('key of %i bits verified', rounds)
    else:
        _LOG.warning('key hashes differ after %i rounds, the key is discarded', rounds)

    return SessionResult(
        variant=variant, alice_key=alice_key, bob_key=bob_key, verified=verified,
        transcripts=transcripts, messages=channel.log, eve_key=channel.tap.learned_key())

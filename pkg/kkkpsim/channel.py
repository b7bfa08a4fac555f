"""Messages exchanged between Alice and Bob, their wire format and ordered delivery."""

import dataclasses
import enum
import json
import json.decoder
import typing as t

from .qubit import PolarizationQubit, canonicalize, InvalidAngleError


class ProtocolOrderError(RuntimeError):
    """Raised when a message arrives out of the protocol order."""


class MessageDecodeError(ValueError):
    """Raised when bytes do not decode into a well-formed message."""

    def __init__(self, field: str, reason: str):
        super().__init__(f'invalid "{field}": {reason}')
        self.field = field


class PulseSlot(enum.Enum):
    """Blocking factor b: which of the two pulses Alice lets through.

    ``beta`` is the blocking factor as it enters XOR formulas: b=1 gives 1, b=2 gives 0.
    """

    FIRST = 1
    SECOND = 2

    def __init__(self, number: int):
        self.index = number - 1
        self.beta = number % 2

    @classmethod
    def from_index(cls, index: int) -> 'PulseSlot':
        return _SLOTS[index]


_SLOTS = (PulseSlot.FIRST, PulseSlot.SECOND)


class MessageKind(enum.Enum):
    """Kinds of protocol messages, valued by their wire names."""

    FORWARD_PAIR = 'forward_pair'
    RETURN_PAIR = 'return_pair'
    SURVIVOR = 'survivor'
    BLOCK_ANNOUNCEMENT = 'block_announcement'
    HASH_EXCHANGE = 'hash_exchange'


QubitPair = t.Tuple[PolarizationQubit, PolarizationQubit]

Payload = t.Union[QubitPair, PolarizationQubit, PulseSlot, bytes]

_QUANTUM_KINDS = (MessageKind.FORWARD_PAIR, MessageKind.RETURN_PAIR, MessageKind.SURVIVOR)

_PAYLOAD_TYPES = {
    MessageKind.FORWARD_PAIR: tuple,
    MessageKind.RETURN_PAIR: tuple,
    MessageKind.SURVIVOR: PolarizationQubit,
    MessageKind.BLOCK_ANNOUNCEMENT: PulseSlot,
    MessageKind.HASH_EXCHANGE: bytes}


@dataclasses.dataclass(frozen=True)
class Message:
    """Single protocol message.

    A survivor carries only the qubit; which slot it came from is never part of the message.
    """

    round_id: int
    kind: MessageKind
    payload: Payload

    def __post_init__(self):
        assert self.round_id >= 0, self.round_id
        assert isinstance(self.payload, _PAYLOAD_TYPES[self.kind]), (self.kind, self.payload)

    @property
    def pair(self) -> QubitPair:
        assert self.kind in (MessageKind.FORWARD_PAIR, MessageKind.RETURN_PAIR), self.kind
        return t.cast(QubitPair, self.payload)

    @property
    def qubit(self) -> PolarizationQubit:
        assert self.kind is MessageKind.SURVIVOR, self.kind
        return t.cast(PolarizationQubit, self.payload)

    @property
    def slot(self) -> PulseSlot:
        assert self.kind is MessageKind.BLOCK_ANNOUNCEMENT, self.kind
        return t.cast(PulseSlot, self.payload)

    @property
    def digest(self) -> bytes:
        assert self.kind is MessageKind.HASH_EXCHANGE, self.kind
        return t.cast(bytes, self.payload)


class ChannelTap:
    """Interception points on the channel.

    The base class is the identity tap: every message passes unchanged. Subclasses may replace
    quantum messages and may observe (but never alter) the public announcements.
    """

    def on_forward(self, message: Message) -> Message:
        return message

    def on_return(self, message: Message) -> Message:
        return message

    def on_survivor(self, message: Message) -> Message:
        return message

    def on_announcement(self, message: Message) -> None:
        pass

    def learned_key(self) -> t.Optional[t.List[int]]:
        """Key bits the tap believes it has learned, one per round, or None for passive taps."""
        return None


class Channel:
    """Lossless, synchronous and ordered delivery between Alice and Bob.

    Within a round the order is forward pair, return pair, survivor; rounds run one after
    another. Block announcements follow once all quantum exchanges are over, one per round, and
    the session closes with the two hash exchanges.
    """

    def __init__(self, tap: t.Optional[ChannelTap] = None, record: bool = False):
        self.tap = ChannelTap() if tap is None else tap
        self.record = record
        self.log: t.List[Message] = []
        self._rounds = 0
        self._last_kind: t.Optional[MessageKind] = None
        self._announcing = False
        self._announced: t.Set[int] = set()
        self._hash_exchanges = 0

    @property
    def rounds(self) -> int:
        """Number of rounds started on this channel."""
        return self._rounds

    def _check_order(self, message: Message) -> None:
        kind = message.kind
        round_complete = self._last_kind in (None, MessageKind.SURVIVOR)
        if kind is MessageKind.FORWARD_PAIR:
            if self._announcing or not round_complete or message.round_id != self._rounds:
                raise ProtocolOrderError(
                    f'cannot start round {message.round_id}: {self._describe_state()}')
            return
        if kind in _QUANTUM_KINDS:
            expected = _QUANTUM_KINDS[_QUANTUM_KINDS.index(kind) - 1]
            if self._announcing or self._last_kind is not expected \
                    or message.round_id != self._rounds - 1:
                raise ProtocolOrderError(
                    f'unexpected {kind.value} for round {message.round_id}:'
                    f' {self._describe_state()}')
            return
        if not round_complete:
            raise ProtocolOrderError(
                f'{kind.value} during the quantum exchange: {self._describe_state()}')
        if kind is MessageKind.BLOCK_ANNOUNCEMENT:
            if self._hash_exchanges > 0 or message.round_id >= self._rounds \
                    or message.round_id in self._announced:
                raise ProtocolOrderError(
                    f'unexpected announcement for round {message.round_id}:'
                    f' {self._describe_state()}')
            return
        if len(self._announced) != self._rounds or self._hash_exchanges >= 2 \
                or message.round_id != self._rounds:
            raise ProtocolOrderError(
                f'unexpected hash exchange with id {message.round_id}: {self._describe_state()}')

    def _advance(self, message: Message) -> None:
        kind = message.kind
        if kind is MessageKind.FORWARD_PAIR:
            self._rounds += 1
        if kind in _QUANTUM_KINDS:
            self._last_kind = kind
        elif kind is MessageKind.BLOCK_ANNOUNCEMENT:
            self._announcing = True
            self._announced.add(message.round_id)
        else:
            self._announcing = True
            self._hash_exchanges += 1

    def _describe_state(self) -> str:
        last = 'nothing' if self._last_kind is None else self._last_kind.value
        return (f'{self._rounds} round(s) started, last quantum message: {last},'
                f' {len(self._announced)} announced, {self._hash_exchanges} hash exchange(s)')

    def send(self, message: Message) -> Message:
        """Deliver a message through the tap and return what the receiver gets."""
        self._check_order(message)
        kind = message.kind
        if kind is MessageKind.FORWARD_PAIR:
            delivered = self.tap.on_forward(message)
        elif kind is MessageKind.RETURN_PAIR:
            delivered = self.tap.on_return(message)
        elif kind is MessageKind.SURVIVOR:
            delivered = self.tap.on_survivor(message)
        else:
            if kind is MessageKind.BLOCK_ANNOUNCEMENT:
                self.tap.on_announcement(message)
            delivered = message
        if delivered.kind is not kind or delivered.round_id != message.round_id:
            raise ProtocolOrderError(
                f'tap {type(self.tap).__name__} replaced {kind.value} of round'
                f' {message.round_id} with {delivered.kind.value} of round {delivered.round_id}')
        self._advance(delivered)
        if self.record:
            self.log.append(delivered)
        return delivered


def _encode_payload(message: Message) -> t.Any:
    if message.kind in (MessageKind.FORWARD_PAIR, MessageKind.RETURN_PAIR):
        return [qubit.angle for qubit in message.pair]
    if message.kind is MessageKind.SURVIVOR:
        return message.qubit.angle
    if message.kind is MessageKind.BLOCK_ANNOUNCEMENT:
        return message.slot.value
    return message.digest.hex()


def encode_message(message: Message) -> bytes:
    """Encode a message as a single JSON line (without the line terminator)."""
    data = {'round_id': message.round_id, 'kind': message.kind.value,
            'payload': _encode_payload(message)}
    return json.dumps(data, allow_nan=False).encode('utf-8')


def _decode_angle(raw: t.Any, field: str) -> PolarizationQubit:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise MessageDecodeError(field, f'expected an angle, got {raw!r}')
    try:
        angle = canonicalize(float(raw))
    except (InvalidAngleError, OverflowError) as err:
        raise MessageDecodeError(field, str(err)) from err
    if angle != raw:
        raise MessageDecodeError(field, f'angle {raw!r} is not in [0, pi)')
    return PolarizationQubit(angle)


def _decode_payload(kind: MessageKind, raw: t.Any) -> Payload:
    if kind in (MessageKind.FORWARD_PAIR, MessageKind.RETURN_PAIR):
        if not isinstance(raw, list) or len(raw) != 2:
            raise MessageDecodeError('payload', f'expected two angles, got {raw!r}')
        return (_decode_angle(raw[0], 'payload[0]'), _decode_angle(raw[1], 'payload[1]'))
    if kind is MessageKind.SURVIVOR:
        return _decode_angle(raw, 'payload')
    if kind is MessageKind.BLOCK_ANNOUNCEMENT:
        if isinstance(raw, bool) or raw not in (1, 2):
            raise MessageDecodeError('payload', f'expected blocking factor 1 or 2, got {raw!r}')
        return PulseSlot(raw)
    if not isinstance(raw, str):
        raise MessageDecodeError('payload', f'expected a hexadecimal digest, got {raw!r}')
    try:
        return bytes.fromhex(raw)
    except ValueError as err:
        raise MessageDecodeError('payload', f'expected a hexadecimal digest, got {raw!r}') \
            from err


def decode_message(data: bytes) -> Message:
    """Decode a message produced by encode_message()."""
    try:
        obj = json.loads(data)
    except (json.decoder.JSONDecodeError, UnicodeDecodeError) as err:
        raise MessageDecodeError('message', f'not a JSON object: {err}') from err
    if not isinstance(obj, dict):
        raise MessageDecodeError('message', f'not a JSON object: {obj!r}')
    for field in ('round_id', 'kind', 'payload'):
        if field not in obj:
            raise MessageDecodeError(field, 'missing')
    unknown = set(obj) - {'round_id', 'kind', 'payload'}
    if unknown:
        raise MessageDecodeError(sorted(unknown)[0], 'unknown field')
    round_id = obj['round_id']
    if isinstance(round_id, bool) or not isinstance(round_id, int) or round_id < 0:
        raise MessageDecodeError('round_id', f'expected a non-negative integer, got {round_id!r}')
    try:
        kind = MessageKind(obj['kind'])
    except ValueError as err:
        raise MessageDecodeError('kind', f'unknown message kind {obj["kind"]!r}') from err
    return Message(round_id, kind, _decode_payload(kind, obj['payload']))

"""Error-rate estimation and the exact enumeration oracle.

The simulation works with angles and sampled measurements. The oracle enumerates every equally
likely assignment of the hidden bits and follows only the XOR algebra of outcomes, so agreement
between the two rules out floating-point artifacts in the error rates.
"""

import csv
import dataclasses
import fractions
import io
import itertools
import logging
import math
import random
import typing as t

from .qubit import Bit, random_angle, rotate
from .channel import PulseSlot
from .protocol import \
    ProtocolVariant, AliceRoundSecrets, BobRoundSecrets, SessionResult, \
    forward_pair, apply_shuffle, alice_encode_block, bob_measure, bob_decode, honest_outcome, \
    run_session
from .adversary import \
    EveStrategy, EveRoundState, ImpersonationTap, builtin_strategies, \
    eve_on_forward, eve_on_return, eve_on_survivor
from .streams import RandomStreams
from .json_config import json_to_str

_LOG = logging.getLogger(__name__)

REPORT_COLUMNS = (
    'variant', 'strategy', 'rounds', 'errors', 'qber', 'exact_qber', 'eve_key_accuracy',
    'detected')

ORACLE_COLUMNS = ('variant', 'eve_shuffle', 'eve_pulse', 'exact_qber')

NO_ATTACK = 'none'

MONTE_CARLO_MIN_ROUNDS = 10 ** 4

SIGMAS = 5


def strategy_label(strategy: t.Optional[EveStrategy]) -> str:
    return NO_ATTACK if strategy is None else strategy.name


@dataclasses.dataclass(frozen=True)
class QberReport:
    """Error statistics of one session."""

    variant: ProtocolVariant
    strategy: str
    rounds: int
    errors: int
    qber: float
    exact_qber: t.Optional[fractions.Fraction]
    eve_key_accuracy: t.Optional[float]
    detected: bool

    def __post_init__(self):
        assert 0 <= self.errors <= self.rounds, (self.errors, self.rounds)
        assert 0.0 <= self.qber <= 1.0, self.qber

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {
            'variant': self.variant.value,
            'strategy': self.strategy,
            'rounds': self.rounds,
            'errors': self.errors,
            'qber': self.qber,
            'exact_qber': None if self.exact_qber is None else str(self.exact_qber),
            'eve_key_accuracy': self.eve_key_accuracy,
            'detected': self.detected}


def hamming_distance(key1: t.Sequence[Bit], key2: t.Sequence[Bit]) -> int:
    assert len(key1) == len(key2), (len(key1), len(key2))
    return sum(bit1 != bit2 for bit1, bit2 in zip(key1, key2))


def estimate_qber(session: SessionResult,
                  strategy: t.Optional[EveStrategy] = None) -> QberReport:
    """Summarize a completed session; strategy is the attack it ran under, if any."""
    errors = hamming_distance(session.alice_key, session.bob_key)
    eve_key_accuracy = None
    if session.eve_key is not None:
        eve_key_accuracy = \
            1 - hamming_distance(session.alice_key, session.eve_key) / session.rounds
    return QberReport(
        variant=session.variant, strategy=strategy_label(strategy), rounds=session.rounds,
        errors=errors, qber=errors / session.rounds,
        exact_qber=exact_qber(session.variant, strategy), eve_key_accuracy=eve_key_accuracy,
        detected=not session.verified)


def hidden_assignments(
        variant: ProtocolVariant) -> t.Iterator[t.Tuple[Bit, Bit, Bit, PulseSlot]]:
    """All equally likely (s1, s2, k, b) of a round."""
    for s1, s2, k, slot in itertools.product((0, 1), (0, 1), (0, 1), PulseSlot):
        if variant is ProtocolVariant.ORIGINAL and s2 != s1 ^ 1:
            continue
        yield s1, s2, k, slot


def _outcome_by_algebra(shuffles: t.Tuple[Bit, Bit], k: Bit, slot: PulseSlot,
                        eve: t.Optional[EveStrategy]) -> Bit:
    if eve is None:
        return honest_outcome(shuffles[slot.index], k, slot)
    guesses = eve.fixed_shuffles
    pulse = eve.fixed_pulse
    prekey = honest_outcome(guesses[slot.index], k, slot)
    encoding = prekey ^ guesses[pulse.index]
    return shuffles[pulse.index] ^ encoding


def _outcome_by_angles(shuffles: t.Tuple[Bit, Bit], k: Bit, slot: PulseSlot,
                       eve: t.Optional[EveStrategy], rng: random.Random) -> Bit:
    alice = AliceRoundSecrets(random_angle(rng), random_angle(rng), k, slot)
    bob = BobRoundSecrets(random_angle(rng), *shuffles)
    state = EveRoundState(0)
    message = forward_pair(0, alice)
    if eve is not None:
        message = eve_on_forward(message, state, rng)
    message = apply_shuffle(message, bob)
    if eve is not None:
        message = eve_on_return(message, state, eve, rng)
    message = alice_encode_block(message, alice)
    if eve is not None:
        message = eve_on_survivor(message, state, eve, rng)
    unshuffled = rotate(message.qubit, -bob.phi)
    if not (unshuffled.is_close_to(0.0) or unshuffled.is_close_to(math.pi / 2)):
        raise ArithmeticError(
            f'angles did not cancel: {unshuffled} before measurement for s={shuffles}, k={k},'
            f' b={slot.value}, strategy {strategy_label(eve)}')
    return bob_measure(message, bob, rng)


def exact_qber(variant: ProtocolVariant, strategy: t.Optional[EveStrategy] = None,
               angle_seed: t.Optional[int] = None) -> fractions.Fraction:
    """Enumerate all hidden bits and Eve's random choices and return the exact error rate.

    With angle_seed, every assignment is also pushed through the rotation pipeline with random
    continuous angles, which must give the same outcome as the XOR algebra.
    """
    eve_variants: t.List[t.Optional[EveStrategy]] = \
        [None] if strategy is None else list(strategy.fixed_variants())
    rng = None if angle_seed is None else random.Random(angle_seed)
    cases = 0
    errors = 0
    for eve, (s1, s2, k, slot) in itertools.product(eve_variants, hidden_assignments(variant)):
        outcome = _outcome_by_algebra((s1, s2), k, slot, eve)
        if rng is not None:
            outcome_by_angles = _outcome_by_angles((s1, s2), k, slot, eve, rng)
            if outcome_by_angles != outcome:
                raise ArithmeticError(
                    f'outcome {outcome_by_angles} from angles differs from {outcome} from XOR'
                    f' algebra for s=({s1}, {s2}), k={k}, b={slot.value},'
                    f' strategy {strategy_label(eve)}')
        cases += 1
        errors += bob_decode(outcome, s1, s2, slot) != k
    return fractions.Fraction(errors, cases)


def oracle_table() -> t.List[t.Tuple[ProtocolVariant, t.Optional[EveStrategy],
                                     fractions.Fraction]]:
    """Exact error rate of every variant without attack and under every built-in strategy."""
    rows = []
    for variant in ProtocolVariant:
        for strategy in [None, *builtin_strategies()]:
            rows.append((variant, strategy, exact_qber(variant, strategy)))
    return rows


def binomial_tolerance(probability: float, rounds: int, sigmas: float = SIGMAS) -> float:
    return sigmas * math.sqrt(probability * (1 - probability) / rounds)


def simulate(variant: ProtocolVariant, strategy: t.Optional[EveStrategy], rounds: int,
             seed: int, record: bool = False) -> SessionResult:
    """Run a session, attacked by Eve if a strategy is given."""
    streams = RandomStreams(seed)
    tap = None if strategy is None else ImpersonationTap(strategy, streams)
    return run_session(variant, rounds, tap=tap, streams=streams, record=record)


def montecarlo_matches_oracle(variant: ProtocolVariant, strategy: t.Optional[EveStrategy],
                              rounds: int, seed: int) -> bool:
    """Check that the simulated error rate lies within 5 sigma of the exact one."""
    if rounds < MONTE_CARLO_MIN_ROUNDS:
        raise ValueError(
            f'at least {MONTE_CARLO_MIN_ROUNDS} rounds are needed for the comparison, got {rounds}')
    report = estimate_qber(simulate(variant, strategy, rounds, seed), strategy)
    assert report.exact_qber is not None
    exact = float(report.exact_qber)
    deviation = abs(report.qber - exact)
    matches = deviation <= binomial_tolerance(exact, rounds)
    _LOG.log(logging.DEBUG if matches else logging.WARNING,
             'simulated QBER %f vs exact %s for %s under %s (%i rounds, seed %i)',
             report.qber, report.exact_qber, variant.value, report.strategy, rounds, seed)
    return matches


def reports_to_json(reports: t.Sequence[QberReport]) -> str:
    """Serialize a single report as a JSON object, several as a JSON array."""
    rows = [report.as_dict() for report in reports]
    return json_to_str(rows[0] if len(rows) == 1 else rows)


def _csv_value(value: t.Any) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return str(value)


def rows_to_csv(rows: t.Iterable[t.Mapping[str, t.Any]], columns: t.Sequence[str]) -> str:
    """Serialize rows as CSV with a header line; None becomes an empty field."""
    text = io.StringIO()
    writer = csv.DictWriter(text, fieldnames=columns, lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _csv_value(value) for key, value in row.items()})
    return text.getvalue()


def reports_to_csv(reports: t.Sequence[QberReport]) -> str:
    return rows_to_csv((report.as_dict() for report in reports), REPORT_COLUMNS)

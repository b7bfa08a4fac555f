"""The kkkpsim runtime."""

import dataclasses
import logging
import pathlib
import typing as t

import numpy as np

from .json_config import acquire_configuration, json_to_str
from .adversary import EveStrategy, SHUFFLE_NAMES, PULSE_NAMES
from .analysis import \
    ORACLE_COLUMNS, estimate_qber, oracle_table, reports_to_csv, reports_to_json, rows_to_csv, \
    simulate, NO_ATTACK
from .channel import MessageKind
from .protocol import ProtocolVariant
from .sidechannel import \
    CoherentAmplitude, click_frequency, dark_port_click_probability, detection_probability
from .streams import MAX_SEED
from .transcript import replay_transcript, write_transcript

_LOG = logging.getLogger(__name__)

OUT = logging.getLogger('kkkpsim.interface.print')

ATTACKS = (NO_ATTACK, 'impersonation')

OUTPUT_FORMATS = ('json', 'csv')

EXIT_OK = 0

EXIT_USAGE = 1

EXIT_DETECTED = 2


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Validated settings of a single simulated session."""

    variant: ProtocolVariant
    attack: str
    eve_shuffle: str
    eve_pulse: str
    rounds: int
    seed: int
    output_format: str = 'json'
    transcript_path: t.Optional[pathlib.Path] = None

    def __post_init__(self):
        if self.attack not in ATTACKS:
            raise ValueError(f'unknown attack "{self.attack}", expected one of {ATTACKS}')
        if self.eve_shuffle not in SHUFFLE_NAMES:
            raise ValueError(f'unknown Eve shuffle "{self.eve_shuffle}"')
        if self.eve_pulse not in PULSE_NAMES:
            raise ValueError(f'unknown Eve pulse choice "{self.eve_pulse}"')
        if isinstance(self.rounds, bool) or not isinstance(self.rounds, int) or self.rounds < 1:
            raise ValueError(f'number of rounds must be a positive integer, got {self.rounds!r}')
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) \
                or not 0 <= self.seed <= MAX_SEED:
            raise ValueError(f'seed must be a 64-bit unsigned integer, got {self.seed!r}')
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f'unknown output format "{self.output_format}"')

    @classmethod
    def from_options(cls, defaults: t.Mapping[str, t.Any], **options) -> 'RunConfig':
        """Merge explicitly given options (those that are not None) over configured defaults."""
        merged = dict(defaults)
        merged.update({key: value for key, value in options.items() if value is not None})
        try:
            variant = ProtocolVariant(merged['variant'])
        except ValueError as err:
            raise ValueError(f'unknown protocol variant "{merged["variant"]}"') from err
        transcript = merged.get('transcript')
        return cls(
            variant=variant, attack=merged['attack'], eve_shuffle=merged['eve_shuffle'],
            eve_pulse=merged['eve_pulse'], rounds=merged['rounds'], seed=merged['seed'],
            output_format=merged['output'],
            transcript_path=None if transcript is None else pathlib.Path(transcript))

    @property
    def strategy(self) -> t.Optional[EveStrategy]:
        """Eve's strategy, or None when there is no attack (Eve settings are then ignored)."""
        if self.attack == NO_ATTACK:
            return None
        return EveStrategy.from_names(self.eve_shuffle, self.eve_pulse)


class Runtime:
    """The kkkpsim runtime."""

    def __init__(self, config_path: pathlib.Path):
        self.config_path = config_path
        self.config = acquire_configuration(self.config_path)

    @property
    def run_defaults(self) -> t.Mapping[str, t.Any]:
        return self.config['run']

    def execute(self, command: str, **command_options) -> int:
        """Execute the runtime and return the exit code."""
        command_executor = {
            'run': self.run_session,
            'oracle': self.print_oracle_table,
            'amplitude-check': self.check_amplitude,
            'replay': self.replay}[command]

        return command_executor(**command_options)

    def run_session(self, **options) -> int:
        """Simulate a session and print its error report."""
        config = RunConfig.from_options(self.run_defaults, **options)
        _LOG.debug('run configuration: %s', config)
        strategy = config.strategy
        record = config.transcript_path is not None
        session = simulate(config.variant, strategy, config.rounds, config.seed, record=record)
        report = estimate_qber(session, strategy)
        if config.transcript_path is not None:
            count = write_transcript(session.messages, config.transcript_path)
            OUT.info('transcript of %i messages written to "%s"', count, config.transcript_path)
        if config.output_format == 'csv':
            print(reports_to_csv([report]), end='')
        else:
            print(reports_to_json([report]))
        if report.detected:
            OUT.warning('key hashes differ: QBER %f, the session is aborted', report.qber)
            return EXIT_DETECTED
        return EXIT_OK

    def print_oracle_table(self, output_format: str = 'table') -> int:
        """Print the exact error rate of every variant and Eve strategy."""
        rows = []
        for variant, strategy, exact in oracle_table():
            rows.append({
                'variant': variant.value,
                'eve_shuffle': NO_ATTACK if strategy is None else strategy.shuffle_name,
                'eve_pulse': '-' if strategy is None else strategy.pulse_choice.value,
                'exact_qber': str(exact)})
        if output_format == 'json':
            print(json_to_str(rows))
        elif output_format == 'csv':
            print(rows_to_csv(rows, ORACLE_COLUMNS), end='')
        else:
            print(f'{"variant":<10}{"eve_shuffle":<13}{"eve_pulse":<11}exact_qber')
            for row in rows:
                print(f'{row["variant"]:<10}{row["eve_shuffle"]:<13}{row["eve_pulse"]:<11}'
                      f'{row["exact_qber"]}')
        return EXIT_OK

    def check_amplitude(self, alpha: t.Tuple[float, float], beta: t.Tuple[float, float],
                        trials: int, checks: int, seed: int) -> int:
        """Compare the dark-port click statistics of two pulses with the closed form."""
        if trials < 1:
            raise ValueError(f'number of trials must be positive, got {trials}')
        if checks < 0:
            raise ValueError(f'number of checks must be non-negative, got {checks}')
        pulse_a = CoherentAmplitude(*alpha)
        pulse_b = CoherentAmplitude(*beta)
        rng = np.random.default_rng(seed)
        result = {
            'alpha': list(alpha),
            'beta': list(beta),
            'click_probability': dark_port_click_probability(pulse_a, pulse_b),
            'click_frequency': click_frequency(pulse_a, pulse_b, trials, rng),
            'trials': trials,
            'checks': checks,
            'detection_probability': detection_probability(pulse_a, pulse_b, checks)}
        print(json_to_str(result))
        return EXIT_OK

    def replay(self, path: pathlib.Path) -> int:
        """Check the message order of a transcript and report whether the key hashes matched."""
        messages = replay_transcript(path)
        digests = [_.digest for _ in messages if _.kind is MessageKind.HASH_EXCHANGE]
        rounds = sum(_.kind is MessageKind.FORWARD_PAIR for _ in messages)
        verified = len(digests) == 2 and digests[0] == digests[1]
        print(json_to_str({'messages': len(messages), 'rounds': rounds, 'verified': verified}))
        return EXIT_OK if verified else EXIT_DETECTED

"""Command-line interface of kkkpsim."""

import argparse
import logging
import pathlib
import sys

import argcomplete
from boilerplates.cli import \
    ArgumentDefaultsAndRawDescriptionHelpFormatter, make_copyright_notice, add_version_option, \
    add_verbosity_group, get_logging_level, dedent_except_first_line

from ._version import VERSION
from .adversary import SHUFFLE_NAMES, PULSE_NAMES
from .channel import ProtocolOrderError
from .json_config import RUN_CONFIG_PATH
from .protocol import ProtocolVariant
from .runtime import Runtime, ATTACKS, OUTPUT_FORMATS, EXIT_OK, EXIT_USAGE

_LOG = logging.getLogger(__name__)

OUT = logging.getLogger('kkkpsim.interface.print')

OUT_HANDLER = logging.StreamHandler(sys.stderr)
OUT_HANDLER.setLevel(logging.NOTSET)
OUT.addHandler(OUT_HANDLER)


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that exits with code 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def prepare_parser():
    """Prepare command-line arguments parser."""
    parser = ArgumentParser(
        prog='kkkpsim',
        description='''Simulator of the two-pulse KKKP quantum key distribution protocol, in its
        original and modified variants, and of the impersonation attack against it.''',
        epilog=make_copyright_notice(
            2024, 2024, license_name='GNU General Public License v3 or later (GPLv3+)'),
        formatter_class=argparse.ArgumentDefaultsHelpFormatter, allow_abbrev=True)
    add_version_option(parser, VERSION)

    add_verbosity_group(parser)

    parser.add_argument(
        '--config', metavar='PATH', type=str, default=str(RUN_CONFIG_PATH),
        help='''path to the configuration file with default settings of the "run" command;
        can be absolute, or relative to current woking directory''')

    commands = {
        'run': (
            'simulate a session and report the quantum bit error rate',
            '''Run the given number of rounds between honest Alice and Bob, optionally with
            Eve impersonating each of them to the other, then announce the blocking factors,
            decode the key and compare key hashes.

            The report contains the simulated error rate together with the exact one
            computed by enumeration. Exit code is 2 if the key hashes differ, i.e. the
            attack was detected.

            Settings not given on the command line are taken from the "run" section of
            the configuration file.'''),
        'oracle': (
            'print the exact error rate of every protocol variant and Eve strategy',
            '''Enumerate all equally likely values of the hidden bits for each combination
            of protocol variant, Eve's shuffle guess and Eve's pulse choice, and print
            the exact error rate as a fraction.'''),
        'amplitude-check': (
            'simulate the beam-splitter comparison of two coherent pulses',
            '''Interfere two coherent pulses on a 50:50 beam splitter and count photons in
            the dark output port. Identical pulses never click there.

            Print the closed-form click probability, the simulated click frequency and the
            probability of catching unequal pulses in at least one of the checked
            rounds.'''),
        'replay': (
            'check a recorded transcript',
            '''Decode every message of a JSONL transcript written by "run --transcript",
            verify that they follow the protocol order and report whether the key hashes
            matched.''')}

    subparsers = parser.add_subparsers(
        dest='command', metavar='command', help=f'''main command to execute; one of:
        "{'", "'.join(commands.keys())}";
        run "kkkpsim command --help" to see detailed help for a given command''')

    _prepare_command_subparsers(subparsers, commands)
    argcomplete.autocomplete(parser)

    return parser


def _prepare_command_subparsers(subparsers, commands):
    for command, (help_, description) in commands.items():
        subparser = subparsers.add_parser(
            command, help=help_, formatter_class=ArgumentDefaultsAndRawDescriptionHelpFormatter)
        subparser.description = dedent_except_first_line(description)
        if command == 'run':
            subparser.add_argument(
                '--variant', choices=[_.value for _ in ProtocolVariant], default=None,
                help='protocol variant: correlated or independent shuffling factors')
            subparser.add_argument(
                '--attack', choices=ATTACKS, default=None, help='attack on the channel')
            subparser.add_argument(
                '--eve-shuffle', choices=SHUFFLE_NAMES, default=None,
                help='''Eve's shuffling guesses s'1 s'2, "mimic" for s'2 = s'1 xor 1, or
                "random" for fresh guesses every round; ignored without attack''')
            subparser.add_argument(
                '--eve-pulse', choices=PULSE_NAMES, default=None,
                help='stored pulse Eve forwards to Bob; ignored without attack')
            subparser.add_argument(
                '--rounds', metavar='N', type=int, default=None, help='number of rounds')
            subparser.add_argument(
                '--seed', metavar='SEED', type=int, default=None,
                help='64-bit unsigned seed of all randomness')
            subparser.add_argument(
                '--output', choices=OUTPUT_FORMATS, default=None, help='report format')
            subparser.add_argument(
                '--transcript', metavar='PATH', type=str, default=None,
                help='write all delivered messages to this JSONL file')
        elif command == 'oracle':
            subparser.add_argument(
                '--output', choices=(*OUTPUT_FORMATS, 'table'), default='table',
                help='table format')
        elif command == 'amplitude-check':
            subparser.add_argument(
                '--alpha', metavar=('RE', 'IM'), type=float, nargs=2, default=[1.0, 0.0],
                help='complex amplitude of the first pulse')
            subparser.add_argument(
                '--beta', metavar=('RE', 'IM'), type=float, nargs=2, default=[1.0, 0.0],
                help='complex amplitude of the second pulse')
            subparser.add_argument(
                '--trials', metavar='N', type=int, default=100000,
                help='number of simulated beam-splitter measurements')
            subparser.add_argument(
                '--checks', metavar='N', type=int, default=1,
                help='number of rounds Alice checks')
            subparser.add_argument(
                '--seed', metavar='SEED', type=int, default=0, help='seed of the photon counts')
        elif command == 'replay':
            subparser.add_argument(
                'path', metavar='PATH', type=str, help='path to the JSONL transcript')


def _prepare_command_options(command, parsed_args):
    command_options = {}
    if command == 'run':
        for option in ('variant', 'attack', 'eve_shuffle', 'eve_pulse', 'rounds', 'seed',
                       'output', 'transcript'):
            command_options[option] = getattr(parsed_args, option)
    elif command == 'oracle':
        command_options['output_format'] = parsed_args.output
    elif command == 'amplitude-check':
        command_options['alpha'] = tuple(parsed_args.alpha)
        command_options['beta'] = tuple(parsed_args.beta)
        command_options['trials'] = parsed_args.trials
        command_options['checks'] = parsed_args.checks
        command_options['seed'] = parsed_args.seed
    elif command == 'replay':
        command_options['path'] = pathlib.Path(parsed_args.path)
    return command_options


def main(args=None):
    """Parse command line arguments and run kkkpsim accordingly."""
    parser = prepare_parser()
    parsed_args = parser.parse_args(args)

    try:
        level = get_logging_level(parsed_args)
    except ValueError as err:
        _LOG.debug('failed to get interface verbosity level', exc_info=True)
        OUT.critical('%s\nkkkpsim: error: %s', parser.format_usage(), err.args[0])
        sys.exit(EXIT_USAGE)
    OUT.setLevel(level)

    OUT.info('parsed args: %s', parsed_args)

    command = parsed_args.command
    if command is None:
        parser.error('no command provided')

    command_options = _prepare_command_options(command, parsed_args)

    try:
        runtime = Runtime(pathlib.Path(parsed_args.config))
        exit_code = runtime.execute(command, **command_options)
    except ProtocolOrderError as err:
        _LOG.debug('protocol order violated', exc_info=True)
        OUT.critical('kkkpsim: error: %s', err)
        sys.exit(EXIT_USAGE)
    except OSError as err:
        _LOG.debug('input/output failed', exc_info=True)
        OUT.critical('kkkpsim: error: %s', err)
        sys.exit(EXIT_USAGE)
    except ValueError as err:
        _LOG.debug('invalid settings', exc_info=True)
        parser.error(str(err))

    if exit_code != EXIT_OK:
        sys.exit(exit_code)

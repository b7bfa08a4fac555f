"""JSONL transcript files: one encoded message per line, in delivery order."""

import logging
import pathlib
import typing as t

from boilerplates.config import normalize_path

from .channel import Channel, Message, MessageDecodeError, encode_message, decode_message

_LOG = logging.getLogger(__name__)


def write_transcript(messages: t.Iterable[Message], path: pathlib.Path) -> int:
    """Write messages to a JSONL file and return how many were written."""
    assert isinstance(path, pathlib.Path), type(path)
    count = 0
    with normalize_path(path).open('wb') as transcript_file:
        for message in messages:
            transcript_file.write(encode_message(message))
            transcript_file.write(b'\n')
            count += 1
    _LOG.debug('wrote %i messages to "%s"', count, path)
    return count


def read_transcript(path: pathlib.Path) -> t.List[Message]:
    """Decode all messages stored in a JSONL file."""
    assert isinstance(path, pathlib.Path), type(path)
    messages = []
    with normalize_path(path).open('rb') as transcript_file:
        for line_number, line in enumerate(transcript_file, 1):
            if not line.strip():
                continue
            try:
                messages.append(decode_message(line))
            except MessageDecodeError as err:
                raise ValueError(f'in file "{path}", line {line_number}: {err}') from err
    return messages


def replay_transcript(path: pathlib.Path) -> t.List[Message]:
    """Read a transcript and check that its messages follow the protocol order.

    ProtocolOrderError is raised on the first message delivered out of order.
    """
    messages = read_transcript(path)
    channel = Channel()
    for message in messages:
        channel.send(message)
    _LOG.info('replayed %i messages of %i rounds from "%s"', len(messages), channel.rounds, path)
    return messages

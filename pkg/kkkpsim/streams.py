"""Seeded random streams.

A single seed is split into independent per-round, per-party substreams. The substream of
(round, party) is a random.Random seeded with ``(seed << 40) | (round_id << 2) | party_index``,
so its draws do not depend on how many rounds are simulated nor on which other parties are
active.
"""

import enum
import random

MAX_SEED = 2 ** 64 - 1

MAX_ROUNDS = 2 ** 38


class Party(enum.IntEnum):
    """Owners of randomness in a session."""

    ALICE = 0
    BOB = 1
    EVE = 2


class RandomStreams:
    """Factory of deterministic substreams derived from one seed."""

    def __init__(self, seed: int):
        assert isinstance(seed, int), type(seed)
        if not 0 <= seed <= MAX_SEED:
            raise ValueError(f'seed must be a 64-bit unsigned integer, got {seed}')
        self.seed = seed
        self._generators = {party: random.Random() for party in Party}

    def substream_seed(self, round_id: int, party: Party) -> int:
        assert 0 <= round_id < MAX_ROUNDS, round_id
        return (self.seed << 40) | (round_id << 2) | int(party)

    def for_round(self, round_id: int, party: Party) -> random.Random:
        """Substream of the given round and party.

        The party's generator is reseeded and returned, so it is valid only until the next call
        for the same party.
        """
        generator = self._generators[party]
        generator.seed(self.substream_seed(round_id, party))
        return generator

    def __repr__(self):
        return f'{type(self).__name__}(seed={self.seed})'

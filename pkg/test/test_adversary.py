"""Unit tests for the impersonation attack."""

import itertools
import math
import random
import unittest
import unittest.mock

from kkkpsim.qubit import PolarizationQubit
from kkkpsim.channel import Message, MessageKind, PulseSlot
from kkkpsim.protocol import \
    AliceRoundSecrets, BobRoundSecrets, ProtocolVariant, alice_encode_block, apply_shuffle, \
    bob_decode, bob_measure, forward_pair, run_session
from kkkpsim.adversary import \
    AttackStateError, EveRoundState, EveStrategy, ImpersonationTap, PulseChoice, \
    builtin_strategies, eve_learn_from_announcement, eve_on_forward, eve_on_return, \
    eve_on_survivor
from kkkpsim.streams import RandomStreams

QUARTER_PI = math.pi / 4


def attacked_round(alice, bob, strategy, rng):
    """Run one round through Eve and return Bob's decoded bit, Eve's state and the messages."""
    state = EveRoundState(0)
    forward = forward_pair(0, alice)
    to_bob = eve_on_forward(forward, state, rng)
    from_bob = apply_shuffle(to_bob, bob)
    to_alice = eve_on_return(from_bob, state, strategy, rng)
    from_alice = alice_encode_block(to_alice, alice)
    to_bob_survivor = eve_on_survivor(from_alice, state, strategy, rng)
    outcome = bob_measure(to_bob_survivor, bob, rng)
    messages = [forward, to_bob, from_bob, to_alice, from_alice, to_bob_survivor]
    return bob_decode(outcome, bob.s1, bob.s2, alice.b), state, messages


def random_secrets(rng, s1, s2, k, slot):
    alice = AliceRoundSecrets(rng.random() * math.pi, rng.random() * math.pi, k, slot)
    bob = BobRoundSecrets(rng.random() * math.pi, s1, s2)
    return alice, bob


class Tests(unittest.TestCase):

    def test_strategy_names(self):
        strategy = EveStrategy.from_names('01', 'second')
        self.assertEqual(strategy.shuffle_guess, (0, 1))
        self.assertIs(strategy.pulse_choice, PulseChoice.ALWAYS_SECOND)
        self.assertEqual(strategy.name, '01/second')
        self.assertTrue(strategy.is_fixed)
        mimic = EveStrategy.from_names('mimic', 'random')
        self.assertTrue(mimic.mimic_correlation)
        self.assertEqual(mimic.name, 'mimic/random')
        self.assertFalse(mimic.is_fixed)
        self.assertEqual(EveStrategy.from_names('random', 'first').shuffle_name, 'random')
        self.assertEqual(EveStrategy().name, '00/first')
        with self.assertRaises(ValueError):
            EveStrategy.from_names('02', 'first')
        with self.assertRaises(ValueError):
            EveStrategy.from_names('00', 'third')
        self.assertEqual(len(builtin_strategies()), 18)

    def test_fixed_variants(self):
        self.assertEqual(EveStrategy().fixed_variants(), [EveStrategy()])
        self.assertEqual(len(EveStrategy.from_names('random', 'random').fixed_variants()), 8)
        mimic = EveStrategy(None, PulseChoice.ALWAYS_FIRST, mimic_correlation=True)
        self.assertEqual({_.fixed_shuffles for _ in mimic.fixed_variants()}, {(0, 1), (1, 0)})
        for variant in EveStrategy.from_names('mimic', 'random').fixed_variants():
            self.assertTrue(variant.is_fixed)
            self.assertTrue(variant.mimic_correlation)

    def test_draws(self):
        rng = random.Random(4)
        mimic = EveStrategy(None, PulseChoice.RANDOM_PER_ROUND, mimic_correlation=True)
        guesses = {mimic.draw_shuffles(rng) for _ in range(100)}
        self.assertEqual(guesses, {(0, 1), (1, 0)})
        pulses = {mimic.draw_pulse(rng) for _ in range(100)}
        self.assertEqual(pulses, set(PulseSlot))
        self.assertIs(EveStrategy().draw_pulse(rng), PulseSlot.FIRST)

    def test_forward_substitution(self):
        rng = unittest.mock.Mock(spec=random.Random)
        rng.random.return_value = 0.0
        state = EveRoundState(0)
        forward = forward_pair(0, AliceRoundSecrets(0.5, 1.5, 0, PulseSlot.FIRST))
        decoys = eve_on_forward(forward, state, rng)
        self.assertIs(decoys.kind, MessageKind.FORWARD_PAIR)
        self.assertEqual([_.angle for _ in decoys.pair], [0.0, 0.0])
        self.assertEqual(state.e1, forward.pair)

    def test_stored_pairs(self):
        rng = random.Random(5)
        for s1, s2, guess1, guess2 in itertools.product((0, 1), repeat=4):
            alice, bob = random_secrets(rng, s1, s2, 0, PulseSlot.FIRST)
            state = EveRoundState(0)
            strategy = EveStrategy((guess1, guess2))
            from_bob = apply_shuffle(eve_on_forward(forward_pair(0, alice), state, rng), bob)
            to_alice = eve_on_return(from_bob, state, strategy, rng)
            for index, shuffle in enumerate((s1, s2)):
                self.assertTrue(
                    state.e2[index].is_close_to(bob.phi + (1 - 2 * shuffle) * QUARTER_PI))
            for index, guess in enumerate((guess1, guess2)):
                self.assertTrue(to_alice.pair[index].is_close_to(
                    alice.thetas[index] + (1 - 2 * guess) * QUARTER_PI))
            self.assertEqual(state.shuffles, (guess1, guess2))

    def test_mimic_return(self):
        rng = random.Random(6)
        alice, bob = random_secrets(rng, 0, 1, 0, PulseSlot.FIRST)
        state = EveRoundState(0)
        mimic = EveStrategy.from_names('mimic', 'first')
        from_bob = apply_shuffle(eve_on_forward(forward_pair(0, alice), state, rng), bob)
        to_alice = eve_on_return(from_bob, state, mimic, rng)
        self.assertTrue(to_alice.pair[0].is_close_to(alice.theta1 + QUARTER_PI))
        self.assertTrue(to_alice.pair[1].is_close_to(alice.theta2 - QUARTER_PI))

    def test_prekey_example(self):
        state = EveRoundState(0, e2=(PolarizationQubit(0.0), PolarizationQubit(0.0)),
                              shuffles=(0, 0))
        survivor = Message(0, MessageKind.SURVIVOR, PolarizationQubit(0.0))
        eve_on_survivor(survivor, state, EveStrategy(), random.Random(0))
        self.assertEqual(state.prekey_l, 0)
        self.assertIs(state.pulse, PulseSlot.FIRST)
        self.assertEqual(eve_learn_from_announcement(state, PulseSlot.FIRST), 1)
        self.assertEqual(state.learned_key_guess, 1)

    def test_eve_measures_eigenstates(self):
        rng = random.Random(7)
        for strategy in builtin_strategies():
            for s1, s2, k, slot in itertools.product((0, 1), (0, 1), (0, 1), PulseSlot):
                alice, bob = random_secrets(rng, s1, s2, k, slot)
                _, state, messages = attacked_round(alice, bob, strategy, rng)
                from_alice = messages[4].qubit
                self.assertTrue(from_alice.is_close_to(0.0) or from_alice.is_close_to(math.pi / 2))
                self.assertEqual(state.prekey_l, state.shuffles[slot.index] ^ k ^ slot.beta)

    def test_equal_guesses_reproduce_honest_outcome(self):
        rng = random.Random(8)
        for guess, pulse in itertools.product((0, 1), PulseChoice):
            strategy = EveStrategy((guess, guess), pulse)
            for s1, s2, k, slot in itertools.product((0, 1), (0, 1), (0, 1), PulseSlot):
                alice, bob = random_secrets(rng, s1, s2, k, slot)
                _, state, messages = attacked_round(alice, bob, strategy, rng)
                outcome = bob_measure(messages[-1], bob, rng)
                shuffle = (s1, s2)[state.pulse.index]
                self.assertEqual(outcome, shuffle ^ k ^ slot.beta)

    def test_original_mimic_undetected(self):
        rng = random.Random(9)
        for pulse in PulseChoice:
            strategy = EveStrategy.from_names('mimic', pulse.value)
            for _ in range(20):
                for s1, k, slot in itertools.product((0, 1), (0, 1), PulseSlot):
                    alice, bob = random_secrets(rng, s1, s1 ^ 1, k, slot)
                    bob_bit, state, _ = attacked_round(alice, bob, strategy, rng)
                    self.assertEqual(bob_bit, k)
                    self.assertEqual(state.learned_key_guess, k)
                    self.assertEqual(eve_learn_from_announcement(state, slot), k)

    def test_modified_quarter_errors(self):
        rng = random.Random(10)
        strategy = EveStrategy((0, 0), PulseChoice.ALWAYS_FIRST)
        for k in (0, 1):
            errors = 0
            for s1, s2, slot in itertools.product((0, 1), (0, 1), PulseSlot):
                alice, bob = random_secrets(rng, s1, s2, k, slot)
                bob_bit, state, _ = attacked_round(alice, bob, strategy, rng)
                errors += bob_bit != k
                self.assertEqual(eve_learn_from_announcement(state, slot), k)
            self.assertEqual(errors, 2)

    def test_missing_state(self):
        state = EveRoundState(0)
        returned = Message(0, MessageKind.RETURN_PAIR,
                           (PolarizationQubit(0.0), PolarizationQubit(0.0)))
        with self.assertRaises(AttackStateError):
            eve_on_return(returned, state, EveStrategy(), random.Random(0))
        survivor = Message(0, MessageKind.SURVIVOR, PolarizationQubit(0.0))
        with self.assertRaises(AttackStateError):
            eve_on_survivor(survivor, state, EveStrategy(), random.Random(0))
        with self.assertRaises(AttackStateError):
            eve_learn_from_announcement(state, PulseSlot.FIRST)
        with self.assertRaises(AttackStateError):
            ImpersonationTap(EveStrategy()).on_return(returned)

    def test_tap_session(self):
        streams = RandomStreams(3)
        tap = ImpersonationTap(EveStrategy.from_names('mimic', 'random'), streams)
        session = run_session(ProtocolVariant.ORIGINAL, 2000, tap=tap, streams=streams)
        self.assertTrue(session.verified)
        self.assertEqual(session.bob_key, session.alice_key)
        self.assertEqual(session.eve_key, session.alice_key)
        self.assertEqual(len(tap.states), 2000)

    def test_tap_session_detected(self):
        streams = RandomStreams(3)
        tap = ImpersonationTap(EveStrategy(), streams)
        session = run_session(ProtocolVariant.MODIFIED, 2000, tap=tap, streams=streams)
        self.assertFalse(session.verified)
        self.assertNotEqual(session.bob_key, session.alice_key)
        self.assertEqual(session.eve_key, session.alice_key)

    def test_learned_key_incomplete(self):
        tap = ImpersonationTap(EveStrategy())
        tap.on_forward(forward_pair(0, AliceRoundSecrets(0.5, 1.5, 0, PulseSlot.FIRST)))
        self.assertIsNone(tap.learned_key())

"""Adaptive lower-bound constructions."""
from .clique_game import (BUILTIN_STRATEGIES, CliqueGame, ColorExhausted, GameTranscript,
                          GoodSequenceCertificate, RetriesExhausted, builtin_strategy,
                          clique_game_play, clique_string_shape_ok, p_s_q_counts, random_strings,
                          sample_good_sequence, sample_strings, slot_cliques_ok)
from .cliques import SizeLimit, max_mono_clique
from .encoding import (CapExceeded, CliqueEncoding, EncodeResult, colex_rank, colex_unrank,
                       encode_vsmax_adaptive, encoding_dimension, lr_ratio_report)
from .pairing import PairingAdversary, PairingResult, pairing_job, vsany_u_pairing_adversary

__all__ = [
    "BUILTIN_STRATEGIES", "CapExceeded", "CliqueEncoding", "CliqueGame", "ColorExhausted",
    "EncodeResult", "GameTranscript", "GoodSequenceCertificate", "PairingAdversary",
    "PairingResult", "RetriesExhausted", "SizeLimit", "builtin_strategy", "clique_game_play",
    "clique_string_shape_ok", "colex_rank", "colex_unrank", "encode_vsmax_adaptive",
    "encoding_dimension", "lr_ratio_report", "max_mono_clique", "p_s_q_counts",
    "pairing_job", "random_strings", "sample_good_sequence", "sample_strings",
    "slot_cliques_ok", "vsany_u_pairing_adversary",
]

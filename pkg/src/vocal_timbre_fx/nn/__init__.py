"""Decoder, encoder and checkpoint persistence."""

from vocal_timbre_fx.nn.architecture import Architecture, NormalizationStats
from vocal_timbre_fx.nn.checkpoint import (
    ModelCheckpoint,
    checkpoint_path,
    list_checkpoints,
    load_checkpoint,
    save_checkpoint,
)
from vocal_timbre_fx.nn.decoder import decoder_forward, init_decoder_params
from vocal_timbre_fx.nn.encoder import encoder_forward, init_encoder_params
from vocal_timbre_fx.nn.layers import exp_sigmoid

__all__ = [
    "Architecture",
    "NormalizationStats",
    "ModelCheckpoint",
    "checkpoint_path",
    "list_checkpoints",
    "load_checkpoint",
    "save_checkpoint",
    "decoder_forward",
    "init_decoder_params",
    "encoder_forward",
    "init_encoder_params",
    "exp_sigmoid",
]

"""PAC codes with a variance-pruned fast stack decoder."""

from .code import (DEFAULT_CONN_POLY, NodeType, PacCodeSpec, calculate_s_values,
                   chunk_segmentation, rm_rate_profile)
from .construction import ConstructionTables, build_tables
from .decoders import (DecodeOptions, DecodeResult, DecodeStatus, fast_stack_decode,
                       stack_decode)
from .depq import BoundedDepq
from .polar import polar_transform, update_llr
from .precoder import conv_decode, conv_encode, pac_encode
from .simulate import PointReport, SweepConfig, awgn_transmit, ebn0_to_sigma, run_fer

__all__ = [
    "DEFAULT_CONN_POLY", "NodeType", "PacCodeSpec", "calculate_s_values", "chunk_segmentation",
    "rm_rate_profile", "ConstructionTables", "build_tables", "DecodeOptions", "DecodeResult",
    "DecodeStatus", "fast_stack_decode", "stack_decode", "BoundedDepq", "polar_transform",
    "update_llr", "conv_decode", "conv_encode", "pac_encode", "PointReport", "SweepConfig",
    "awgn_transmit", "ebn0_to_sigma", "run_fer",
]

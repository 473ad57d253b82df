"""Lane-parallel multi-precision arithmetic on 64-bit (and 52-bit) limbs.

Kernels live in a compiled extension when it is built and fall back to a
pure-Python implementation otherwise; ``BACKEND`` names the one in use.
"""
from ._backend import NAME as BACKEND
from .limbcore import (
    SATURATED, UNSATURATED, ContractError, LimbError, ParseError, RadixConfig,
    RepresentationError, as_limbs, compare, from_bytes, from_hex, from_int, normalize, pack_64_to_52,
    pad, to_bytes, to_hex, to_int, unpack_52_to_64,
)
from .oracle import carry_census, oracle_add, oracle_mul, oracle_sub
from .vecaddsub import (
    AddSubStats, ChunkResult, add, add_w_limbs, dot_add_words, dot_sub_words, sub, sub_w_limbs,
)
from .vecmul import (
    ColumnBuffers, KaratsubaConfig, align_and_reduce, carry_pass, compute_partials, dot_mul_4x4,
    dot_mul_5x5, dot_mul_words, gather_columns, karatsuba_mul,
)

__version__ = "0.1.0"

__all__ = [
    "AddSubStats", "BACKEND", "ChunkResult", "ColumnBuffers", "ContractError", "KaratsubaConfig",
    "LimbError", "ParseError", "RadixConfig", "RepresentationError", "SATURATED", "UNSATURATED",
    "add", "add_w_limbs", "align_and_reduce", "as_limbs", "carry_census", "carry_pass", "compare",
    "compute_partials", "dot_add_words", "dot_mul_4x4", "dot_mul_5x5", "dot_mul_words",
    "dot_sub_words", "from_bytes", "from_hex", "from_int", "gather_columns", "karatsuba_mul",
    "normalize", "oracle_add", "oracle_mul", "oracle_sub", "pack_64_to_52", "pad", "sub",
    "sub_w_limbs", "to_bytes", "to_hex", "to_int", "unpack_52_to_64",
]

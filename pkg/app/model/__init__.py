from .checkpoint import load_checkpoint, save_checkpoint
from .encoder import (
    Encoding,
    MemoryEncoding,
    classify,
    dense,
    encode,
    kink_margin,
    memory_encode,
    momentum_update,
)
from .params import (
    DenseLayer,
    EncoderParams,
    MemoryParams,
    init_domain_head,
    init_from_config,
    init_params,
)

__all__ = [
    "DenseLayer",
    "EncoderParams",
    "MemoryParams",
    "Encoding",
    "MemoryEncoding",
    "init_params",
    "init_from_config",
    "init_domain_head",
    "encode",
    "memory_encode",
    "classify",
    "dense",
    "momentum_update",
    "kink_margin",
    "save_checkpoint",
    "load_checkpoint",
]

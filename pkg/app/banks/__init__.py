from .banks import SemanticBank, StyleBankSet
from .dump import dump_banks, load_bank_dump
from .queue import UNIT_TOLERANCE, FeatureQueue

__all__ = [
    "FeatureQueue",
    "StyleBankSet",
    "SemanticBank",
    "dump_banks",
    "load_bank_dump",
    "UNIT_TOLERANCE",
]

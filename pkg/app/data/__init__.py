from .batching import Batch, batch_iter
from .io import FORMAT_TAG, export_dataset, import_dataset
from .synthetic import (
    UNLABELED,
    Dataset,
    DomainSpec,
    Sample,
    build_benchmark,
    class_prototypes,
    default_domain_specs,
    generate_dataset,
)
from .variants import VariantPolicy, augment, sample_variant

__all__ = [
    "Batch",
    "batch_iter",
    "Dataset",
    "DomainSpec",
    "Sample",
    "UNLABELED",
    "VariantPolicy",
    "augment",
    "sample_variant",
    "build_benchmark",
    "class_prototypes",
    "default_domain_specs",
    "generate_dataset",
    "export_dataset",
    "import_dataset",
    "FORMAT_TAG",
]

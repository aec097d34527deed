from __future__ import annotations

from enum import Enum


class MethodVariant(str, Enum):
    """Training recipe selected for a run.

    The first four are the ablation rows (which loss terms are switched on);
    the next three are the design-choice alternatives, each replacing one
    term of the full recipe; the last two split the style term from the
    orthogonality term for the extended ablation.

    Example:
        >>> from app.types import MethodVariant
        >>> MethodVariant("vanilla-style")
        <MethodVariant.VANILLA_STYLE: 'vanilla-style'>
    """

    VANILLA = "vanilla"
    VANILLA_STYLE = "vanilla-style"
    VANILLA_SEMANTIC = "vanilla-semantic"
    STEAM = "steam"
    DOMAIN_CLASSIFIER = "domain-classifier"
    L2_MATCHING = "l2-matching"
    CONTRASTIVE = "contrastive"
    STYLE_ONLY = "style-only"
    ORTHOGONAL_ONLY = "orthogonal-only"


ABLATION_VARIANTS: tuple[MethodVariant, ...] = (
    MethodVariant.VANILLA,
    MethodVariant.VANILLA_STYLE,
    MethodVariant.VANILLA_SEMANTIC,
    MethodVariant.STEAM,
)

EXTENDED_ABLATION_VARIANTS: tuple[MethodVariant, ...] = ABLATION_VARIANTS + (
    MethodVariant.STYLE_ONLY,
    MethodVariant.ORTHOGONAL_ONLY,
)

DESIGN_VARIANTS: tuple[MethodVariant, ...] = (
    MethodVariant.STEAM,
    MethodVariant.DOMAIN_CLASSIFIER,
    MethodVariant.L2_MATCHING,
    MethodVariant.CONTRASTIVE,
)


class ProtocolMode(str, Enum):
    """Evaluation protocol: leave-one-domain-out generalization, or
    multi-source adaptation with an unlabeled target."""

    DG = "dg"
    MSDA = "msda"


class LossComponent(str, Enum):
    """Slots of a loss breakdown. Replacement terms of the design variants
    are reported in the slot of the term they replace."""

    CLS = "l_cls"
    STYLE = "l_s"
    SEMANTIC = "l_c"
    ORTHOGONAL = "l_o"


class SubCommand(str, Enum):
    TRAIN = "train"
    ABLATION = "ablation"
    DESIGN_STUDY = "design-study"
    MSDA = "msda"
    GEN_DATA = "gen-data"
    VERIFY = "verify"

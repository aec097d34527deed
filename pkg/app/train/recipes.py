from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional

from app.types import LossComponent, MethodVariant


class StyleTerm(str, Enum):
    CONTRASTIVE = "contrastive"
    DOMAIN_CLASSIFIER = "domain-classifier"


class SemanticTerm(str, Enum):
    JURY = "jury"
    L2 = "l2"
    INFONCE = "infonce"


@dataclass(frozen=True)
class LossRecipe:
    """Which loss terms a variant trains with."""

    style: Optional[StyleTerm] = None
    semantic: Optional[SemanticTerm] = None
    orthogonal: bool = False

    @property
    def components(self) -> frozenset[LossComponent]:
        enabled = {LossComponent.CLS}
        if self.style is not None:
            enabled.add(LossComponent.STYLE)
        if self.semantic is not None:
            enabled.add(LossComponent.SEMANTIC)
        if self.orthogonal:
            enabled.add(LossComponent.ORTHOGONAL)
        return frozenset(enabled)

    @property
    def uses_style_bank(self) -> bool:
        return self.style is StyleTerm.CONTRASTIVE

    @property
    def uses_semantic_bank(self) -> bool:
        return self.semantic in (SemanticTerm.JURY, SemanticTerm.INFONCE)

    @property
    def uses_memory_variants(self) -> bool:
        return self.semantic is not None

    @property
    def uses_domain_head(self) -> bool:
        return self.style is StyleTerm.DOMAIN_CLASSIFIER


class VariantRegistry:
    """Loss recipe of every method variant.

    Example:
        >>> from app.types import MethodVariant, LossComponent
        >>> VariantRegistry.get(MethodVariant.VANILLA).components == {LossComponent.CLS}
        True
    """

    _registry: Dict[MethodVariant, LossRecipe] = {
        MethodVariant.VANILLA: LossRecipe(),
        MethodVariant.VANILLA_STYLE: LossRecipe(style=StyleTerm.CONTRASTIVE, orthogonal=True),
        MethodVariant.VANILLA_SEMANTIC: LossRecipe(semantic=SemanticTerm.JURY),
        MethodVariant.STEAM: LossRecipe(
            style=StyleTerm.CONTRASTIVE, semantic=SemanticTerm.JURY, orthogonal=True
        ),
        MethodVariant.DOMAIN_CLASSIFIER: LossRecipe(
            style=StyleTerm.DOMAIN_CLASSIFIER, semantic=SemanticTerm.JURY, orthogonal=True
        ),
        MethodVariant.L2_MATCHING: LossRecipe(
            style=StyleTerm.CONTRASTIVE, semantic=SemanticTerm.L2, orthogonal=True
        ),
        MethodVariant.CONTRASTIVE: LossRecipe(
            style=StyleTerm.CONTRASTIVE, semantic=SemanticTerm.INFONCE, orthogonal=True
        ),
        MethodVariant.STYLE_ONLY: LossRecipe(style=StyleTerm.CONTRASTIVE),
        MethodVariant.ORTHOGONAL_ONLY: LossRecipe(orthogonal=True),
    }

    @classmethod
    def get(cls, variant: MethodVariant | str) -> LossRecipe:
        try:
            recipe = cls._registry.get(MethodVariant(variant))
        except ValueError:
            recipe = None
        if recipe is None:
            raise KeyError(f"Unknown method variant: {variant}")
        return recipe

    @classmethod
    def register(cls, variant: MethodVariant, recipe: LossRecipe) -> None:
        cls._registry[variant] = recipe

    @classmethod
    def variants(cls) -> tuple[MethodVariant, ...]:
        return tuple(cls._registry)

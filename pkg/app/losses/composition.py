from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Mapping, Optional

from app.autodiff import Tensor, ops
from app.types import ContractError, LossComponent, LossValues

ORDER: tuple[LossComponent, ...] = (
    LossComponent.CLS,
    LossComponent.STYLE,
    LossComponent.SEMANTIC,
    LossComponent.ORTHOGONAL,
)


@dataclass(frozen=True)
class LossBreakdown:
    """The four loss slots and their unweighted sum.

    Disabled slots hold a constant zero tensor.
    """

    l_cls: Tensor
    l_s: Tensor
    l_c: Tensor
    l_o: Tensor
    total: Tensor
    enabled: frozenset[LossComponent] = frozenset()

    def component(self, slot: LossComponent) -> Tensor:
        return getattr(self, slot.value)

    def values(self) -> LossValues:
        return LossValues(
            l_cls=self.l_cls.item(),
            l_s=self.l_s.item(),
            l_c=self.l_c.item(),
            l_o=self.l_o.item(),
            total=self.total.item(),
        )


def total_loss(
    components: Mapping[LossComponent, Tensor],
    enabled: Optional[Collection[LossComponent]] = None,
) -> LossBreakdown:
    """Sum the enabled components with equal weight.

    ``enabled`` defaults to every component present in ``components``. The
    classification term must always be on; a single-term total is that term
    itself, not a copy.
    """
    active = frozenset(components if enabled is None else enabled)
    if not active:
        raise ContractError("no loss component enabled")
    if LossComponent.CLS not in active:
        raise ContractError("the classification loss must be enabled")
    missing = [c.value for c in ORDER if c in active and c not in components]
    if missing:
        raise ContractError(f"enabled components {missing} were not computed")

    total: Optional[Tensor] = None
    for slot in ORDER:
        if slot in active:
            total = components[slot] if total is None else ops.add(total, components[slot])

    def slot_value(slot: LossComponent) -> Tensor:
        return components[slot] if slot in active else Tensor(0.0)

    return LossBreakdown(
        l_cls=slot_value(LossComponent.CLS),
        l_s=slot_value(LossComponent.STYLE),
        l_c=slot_value(LossComponent.SEMANTIC),
        l_o=slot_value(LossComponent.ORTHOGONAL),
        total=total,  # type: ignore[arg-type]
        enabled=active,
    )

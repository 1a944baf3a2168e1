"""Apply a stage schedule's freeze flags to the desk model's parameter groups."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Dict

from .encoder import DeskVisionModel

if TYPE_CHECKING:
    from ..recipe.models import StageSchedule

logger = logging.getLogger(__name__)


def apply_freeze(model: DeskVisionModel, schedule: "StageSchedule") -> Dict[str, int]:
    """
    Toggle ``requires_grad`` on the ViT and MLP groups per ``schedule``.

    The desk model has no language model, so ``freeze_llm`` only shows up in
    the log. Nothing is optimized here.

    Returns:
        Number of trainable scalars per group (``vit``, ``mlp``)
    """
    for param in model.vit_parameters():
        param.requires_grad_(not schedule.freeze_vit)
    for param in model.mlp_parameters():
        param.requires_grad_(not schedule.freeze_mlp)

    trainable = {
        "vit": sum(p.numel() for p in model.vit_parameters() if p.requires_grad),
        "mlp": sum(p.numel() for p in model.mlp_parameters() if p.requires_grad),
    }
    logger.info(
        "Stage %s: vit=%s mlp=%s llm=%s",
        schedule.stage,
        "frozen" if schedule.freeze_vit else "trainable",
        "frozen" if schedule.freeze_mlp else "trainable",
        "frozen" if schedule.freeze_llm else "trainable",
    )
    return trainable

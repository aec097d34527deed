"""Loss terms and their composition.

Usage:
    from app.losses import style_contrastive, jury_loss, total_loss
"""

from .composition import LossBreakdown, total_loss
from .jury import jury_distribution, jury_loss
from .orthogonal import orthogonality_loss
from .style import style_contrastive
from .supervised import classification_loss, domain_classifier_loss, one_hot
from .variants import l2_matching_loss, plain_infonce_loss

__all__ = [
    "LossBreakdown",
    "total_loss",
    "style_contrastive",
    "jury_distribution",
    "jury_loss",
    "classification_loss",
    "domain_classifier_loss",
    "one_hot",
    "orthogonality_loss",
    "l2_matching_loss",
    "plain_infonce_loss",
]

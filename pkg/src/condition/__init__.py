from .models import ConditionReport, PsiProfile, PsiTrend, Verdict
from .classifier import classify_martingale, ds_partial_integral
from .psi import psi, psi_growth_profile, psi_values

__all__ = [
    "ConditionReport",
    "PsiProfile",
    "PsiTrend",
    "Verdict",
    "classify_martingale",
    "ds_partial_integral",
    "psi",
    "psi_growth_profile",
    "psi_values",
]

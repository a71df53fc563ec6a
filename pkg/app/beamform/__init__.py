from app.beamform.allocation import AllocationProblem, AllocationResult, allocate_power, allocation_coeffs
from app.beamform.fisher import crb, exact_fisher_info, fisher_info
from app.beamform.plan import BeamformingPlan, BeamSelection, build_plan, plan_from_beliefs, select_beams

__all__ = [
    "AllocationProblem",
    "AllocationResult",
    "BeamSelection",
    "BeamformingPlan",
    "allocate_power",
    "allocation_coeffs",
    "build_plan",
    "crb",
    "exact_fisher_info",
    "fisher_info",
    "plan_from_beliefs",
    "select_beams",
]

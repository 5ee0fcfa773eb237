"""
Order Router - pair classification and equivalence.
"""
import logging

from fastapi import APIRouter, HTTPException

from povmorder.exceptions import PovmOrderError
from povmorder.models import ClassifyRequest, EquivalenceResponse, PairClassification, PairRequest
from povmorder.services import order_service, povm_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/order", tags=["order"])


@router.post("/classify", response_model=PairClassification)
def classify_pair(request: ClassifyRequest):
    """
    Decide all four orderings in both directions.
    Verdicts come with certificates or witnesses; the result is deterministic given the budget seed.
    """
    try:
        n = povm_service.require_valid(request.n.to_povm())
        m = povm_service.require_valid(request.m.to_povm())
        return order_service.classify_pair(n, m, request.budget)
    except PovmOrderError as e:
        logger.warning(f"Classification failed: {e}")
        raise HTTPException(status_code=400, detail=str(e))


@router.post("/equivalence", response_model=EquivalenceResponse)
def equivalence(request: PairRequest):
    """Post-processing equivalence with the maps realizing it both ways."""
    try:
        n = povm_service.require_valid(request.n.to_povm())
        m = povm_service.require_valid(request.m.to_povm())
        maps = order_service.equivalence_witness_maps(n, m)
    except PovmOrderError as e:
        raise HTTPException(status_code=400, detail=str(e))

    if maps is None:
        return EquivalenceResponse(equivalent=False)
    m_to_n, n_to_m = maps
    return EquivalenceResponse(
        equivalent=True,
        m_to_n=m_to_n.matrix.tolist(),
        n_to_m=n_to_m.matrix.tolist(),
    )

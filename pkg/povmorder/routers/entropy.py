"""
Entropy Router - observational and measured relative entropies.
"""
import logging

from fastapi import APIRouter, HTTPException

from povmorder.exceptions import PovmOrderError
from povmorder.models import EntropyConfig, EntropyRequest, EntropyValue, RelativeEntropyRequest
from povmorder.services import entropy_service, povm_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/entropy", tags=["entropy"])


@router.post("/observational", response_model=EntropyValue)
def observational_entropy(request: EntropyRequest):
    """S_M(rho) in the requested units."""
    cfg = EntropyConfig(log_base=request.log_base)
    try:
        povm = povm_service.require_valid(request.povm.to_povm())
        value = entropy_service.observational_entropy(povm, request.rho.to_density(), cfg)
    except PovmOrderError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return EntropyValue(quantity="observational_entropy", value=value, units=cfg.units)


@router.post("/relative", response_model=EntropyValue)
def relative_entropy(request: RelativeEntropyRequest):
    """D_M(rho || sigma) in the requested units; +inf is returned as "inf"."""
    cfg = EntropyConfig(log_base=request.log_base)
    try:
        povm = povm_service.require_valid(request.povm.to_povm())
        value = entropy_service.relative_entropy(
            povm, request.rho.to_density(), request.sigma.to_density(), cfg
        )
    except PovmOrderError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return EntropyValue(quantity="relative_entropy", value=value, units=cfg.units)

"""
Construct Router - noisy binary pairs and identity-mixed POVMs.
"""
import logging

from fastapi import APIRouter, HTTPException

from povmorder.exceptions import PovmOrderError
from povmorder.models import ConstructResponse, EpsMixRequest, NLambdaRequest, PovmSchema
from povmorder.services import construct_service, povm_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/construct", tags=["construct"])


@router.post("/eps-mix", response_model=ConstructResponse)
def eps_mix(request: EpsMixRequest):
    """
    Mix a binary POVM with 2 eps of pure noise.
    Without `n`, the qubit computational basis is used.
    """
    try:
        n = request.n.to_povm() if request.n else povm_service.computational_basis(2)
        if n.count != 2:
            raise PovmOrderError(f"eps-mix needs a binary POVM, got {n.count} elements")
        pair = construct_service.binary_epsilon_mix(n.element(0), n.element(1), request.eps)
    except PovmOrderError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return ConstructResponse(
        povms={"N": PovmSchema.from_povm(pair.n), "M": PovmSchema.from_povm(pair.m)},
        details=pair.to_dict(),
    )


@router.post("/n-lambda", response_model=ConstructResponse)
def n_lambda(request: NLambdaRequest):
    """lam N (+) (1 - lam) 1, with separation parameters when a partner `m` is given."""
    try:
        n = povm_service.require_valid(request.n.to_povm())
        built = construct_service.build_n_lambda(n, request.lam)
        separation = None
        if request.m is not None:
            m = povm_service.require_valid(request.m.to_povm())
            separation = construct_service.separation_parameters(n, m)
    except PovmOrderError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return ConstructResponse(
        povms={"N_lambda": PovmSchema.from_povm(built)},
        details={"lam": request.lam},
        separation=separation,
    )

"""
POVM Router - validation and canonical forms.
"""
import logging
from typing import Any, Dict

from fastapi import APIRouter, HTTPException

from povmorder.exceptions import PovmOrderError
from povmorder.models import PovmSchema, ValidationReport
from povmorder.services import povm_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/povm", tags=["povm"])


@router.post("/validate", response_model=ValidationReport)
def validate_povm(document: PovmSchema):
    """
    Check positivity and completeness.
    An invalid POVM is reported, not rejected.
    """
    try:
        return povm_service.validate_document(document)
    except PovmOrderError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.post("/canonical")
def canonical_form(document: PovmSchema) -> Dict[str, Any]:
    """Merged normalized-element volume map of a POVM."""
    try:
        povm = povm_service.require_valid(document.to_povm())
        form = povm_service.canonical_form(povm)
    except PovmOrderError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {
        **form.to_dict(),
        "projective": povm_service.is_projective(povm),
        "linearly_independent": povm_service.is_linearly_independent(povm),
    }

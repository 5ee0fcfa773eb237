"""
Examples Router - worked example fixtures and the reproduction report.
"""
import logging
from typing import List, Optional

from fastapi import APIRouter, HTTPException

from povmorder.exceptions import PovmOrderError, UnknownFixtureError
from povmorder.models import ExampleFixture, ReproductionReport
from povmorder.services import fixture_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api", tags=["examples"])


@router.get("/examples", response_model=List[str])
def list_examples():
    return fixture_service.list_fixtures()


@router.get("/examples/{name}", response_model=ExampleFixture)
def get_example(name: str):
    try:
        return fixture_service.get(name)
    except UnknownFixtureError as e:
        raise HTTPException(status_code=404, detail=str(e))
    except PovmOrderError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.get("/reproduce", response_model=ReproductionReport)
def reproduce(tolerance: Optional[float] = None):
    """Recompute every fixture value and relation table."""
    try:
        return fixture_service.reproduce(tolerance=tolerance)
    except PovmOrderError as e:
        raise HTTPException(status_code=400, detail=str(e))

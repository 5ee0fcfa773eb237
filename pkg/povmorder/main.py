"""
POVM Ordering Toolkit - FastAPI Application
HTTP surface over the ordering, entropy and construction services.
"""
import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from povmorder.config import settings
from povmorder.routers import (
    construct_router,
    entropy_router,
    examples_router,
    order_router,
    povm_router,
)

logger = logging.getLogger(__name__)

# Create FastAPI app
app = FastAPI(
    title=settings.APP_NAME,
    version=settings.APP_VERSION,
    description="""
    Decision procedures for orderings of quantum measurements.

    Features:
    - POVM validation and canonical forms
    - Observational and measured relative entropies
    - Stochastic, relative-entropy, entropy and linear orderings with certificates and witnesses
    - Example fixtures and value reproduction
    """,
    docs_url="/api/docs",
    redoc_url="/api/redoc",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(povm_router)
app.include_router(entropy_router)
app.include_router(order_router)
app.include_router(construct_router)
app.include_router(examples_router)


@app.get("/api/health")
async def health_check():
    """Health check endpoint."""
    return {
        "status": "healthy",
        "app": settings.APP_NAME,
        "version": settings.APP_VERSION
    }


@app.get("/api/info")
async def app_info():
    """Application information."""
    return {
        "name": settings.APP_NAME,
        "version": settings.APP_VERSION,
        "log_base": settings.LOG_BASE,
        "tolerances": settings.tolerances().model_dump(),
        "features": [
            "POVM validation",
            "Observational entropy",
            "Measured relative entropy",
            "Ordering classification with certificates and witnesses",
            "Post-processing equivalence",
            "Example fixtures and reproduction report",
        ]
    }


def run(host: str = None, port: int = None):
    import uvicorn

    host = host or settings.HOST
    port = port or settings.PORT
    logger.info(f"Serving {settings.APP_NAME} on {host}:{port}")
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    run()

"""Routers package."""
from .povm import router as povm_router
from .entropy import router as entropy_router
from .order import router as order_router
from .construct import router as construct_router
from .examples import router as examples_router

__all__ = [
    "povm_router",
    "entropy_router",
    "order_router",
    "construct_router",
    "examples_router",
]

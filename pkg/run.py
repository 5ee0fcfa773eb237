#!/usr/bin/env python3
"""
POVM Ordering Toolkit - Run Script
"""
import uvicorn

from povmorder.config import settings

if __name__ == "__main__":
    uvicorn.run(
        "povmorder.main:app",
        host=settings.HOST,
        port=settings.PORT,
        reload=settings.DEBUG,
        log_level=settings.LOG_LEVEL.lower()
    )

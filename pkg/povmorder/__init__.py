"""
povmorder - orderings of quantum measurements.

Decides whether one POVM is a post-processing of another, and whether it is
coarser in the relative-entropy, observational-entropy or linear-span sense.
"""
from povmorder.config import settings

__version__ = settings.APP_VERSION

"""`python -m povmorder`"""
import sys

from povmorder.cli import main

sys.exit(main())

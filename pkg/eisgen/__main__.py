"""Entry point for `python -m eisgen`."""
import sys

from .cli import main

sys.exit(main())

"""Module execution entrypoint."""

from __future__ import annotations

import sys

from vocal_timbre_fx.main import main

if __name__ == "__main__":
    sys.exit(main())

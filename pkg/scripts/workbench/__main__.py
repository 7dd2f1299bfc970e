"""Entry point for python -m scripts.workbench"""

from .cli import main

raise SystemExit(main())

"""
heckezeros entry point
Build coefficients → evaluate L_f^(m) → count and locate zeros → write reports.

    python main.py verify --weight 12 --grid 20
    python main.py eval --s=0.5+14i --m 0
"""

import sys

from heckezeros.cli import main


if __name__ == "__main__":
    sys.exit(main())

"""
Intermediate Lines entry point

    python main.py invariants --curve ellipse:2,1
    python main.py envelope --curve bean --alpha 0.5,0.6
    python main.py sweep --config config.example.yaml
    python main.py classify jets.json

See intermediate_lines/cli.py for flags and exit codes.
"""

import sys

from intermediate_lines.cli import main

if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point for the GF(q) lossy codec.

Equivalent to the installed ``gfqc`` script:

    python main.py gen-code --p 6 --nbits 1600 --rate 0.33 --b 5 --seed 7 --out code.txt
"""

import sys

from gfqc.presentation.cli import main


if __name__ == "__main__":
    sys.exit(main())

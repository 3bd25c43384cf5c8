"""Even-distribution failure rates of random relators as the length grows.

Run: python3 demos/genericity.py [trials]
"""

import sys
from fractions import Fraction

from wordentropy.random_groups import genericity_experiment


def main(trials=100):
    rep = genericity_experiment(2, [40, 80, 160, 320, 640], Fraction(1, 16), trials, seed=0)
    print(rep.to_csv(), end="")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 100)

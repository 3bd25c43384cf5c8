"""Different weights on a redundant generating set can induce the same metric.

Run: python3 demos/nonstrict_convexity.py
"""

from fractions import Fraction

from wordentropy.cayley import nonstrict_convexity_demo


def main():
    for res in nonstrict_convexity_demo((Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1))):
        print(f"t = {res.t}: weights {[str(x) for x in res.weights]}, "
              f"{res.elements} elements compared, identical distances: {res.all_equal}")


if __name__ == "__main__":
    main()

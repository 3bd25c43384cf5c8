"""Lower and upper entropy bounds on a seeded translation-apparent presentation.

Run: python3 demos/sandwich_bounds.py
"""

from fractions import Fraction

from wordentropy.entropy import entropy_bounds, free_entropy
from wordentropy.presentations import check_translation_apparent
from wordentropy.random_groups import DensityModelParams, sample_presentation
from wordentropy.words import WeightVector

LAM = Fraction(1, 16)


def main():
    p = sample_presentation(DensityModelParams(2, 640, 0, 2, seed=0))
    print("translation-apparent at lambda = 1/16:", bool(check_translation_apparent(p, LAM)))
    for w in (WeightVector.uniform(2), WeightVector((Fraction(3, 10), Fraction(1, 5)))):
        est = entropy_bounds(p, LAM, w)
        l = est.hypotheses["l"]
        print(f"w = {[str(x) for x in w.per_generator]}: "
              f"h_lo = {est.h_lo:.9f}, h_hi = {est.h_hi:.9f}, gap = {est.gap:.2e} (2/l = {2 / l:.2e}), "
              f"free-group value {free_entropy(w):.9f}")


if __name__ == "__main__":
    main()

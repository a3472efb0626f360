"""
Three investors, one bull and one bear
======================================

A market of N=3 investors: one bull (price factor 2), one bear (factor 1/2)
and one investor who never trades. Each step a random investor is picked;
bulls and bears move the price once and then go quiet.
"""

import math
from fractions import Fraction

from finitebinom import ModelParams, enumerate_moment, moment_multigroup
from finitebinom.model import INACTIVE, path_probability
from finitebinom.oracle import iter_paths

params = ModelParams.two_group(n_up=1, n_down=1, total=3, up=2, down=Fraction(1, 2))

# every path of length two, with its exact probability
for path, prob in iter_paths(params, 2):
    names = ["bear" if o == 0 else "bull" if o == 1 else "idle" for o in path]
    print(f"{' -> '.join(names):16s} {prob}")

# a bull followed by a quiet step: 1/3 * 2/3
print("P(bull, idle) =", path_probability(params, [1, INACTIVE]))

# second moment of the log return: (2/3)(log 2)^2
exact = moment_multigroup(params, 2, 2, backend="rational")
print("formula :", exact)
print("oracle  :", enumerate_moment(params, 2, 2))
print("by hand :", 2 / 3 * math.log(2) ** 2)

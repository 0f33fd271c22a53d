"""Classical post-processing for order finding and Simon's problem."""

from __future__ import annotations

import numpy as np

from sqslab.quantum import (
    ShorInstance,
    SimonInstance,
    continued_fraction_order,
    recover_order,
    shor_ideal_samples,
    simon_end_to_end,
)

inst = ShorInstance(15, 7, 8)
ys = shor_ideal_samples(inst)
print("ideal samples", ys, "order", inst.r)
print("per-sample continued fractions", [continued_fraction_order(y, inst.Q, 15, 7) for y in ys])
print("lcm-combined", recover_order(ys, inst.Q, 15, 7))

rng = np.random.default_rng(3)
simon = SimonInstance(12, 0b101100111010)
good = sum(simon_end_to_end(simon, simon.standard_source(), 24, rng)["success"] for _ in range(200))
bad = sum(simon_end_to_end(simon, simon.random_guess_source(), 24, rng)["success"] for _ in range(200))
print("Simon recovery: standard", good, "/ 200, random guesses", bad, "/ 200")

"""Learn a dictator through a simulated SQL oracle, then sample from it."""

from __future__ import annotations

import numpy as np

from sqslab.domain import Dictator
from sqslab.learners import dictator_sq_learner
from sqslab.oracles import HonestSQS
from sqslab.samplers import ReductionParams, learn_then_sample

n = 16
rng = np.random.default_rng(1)
params = ReductionParams(eps_prime=0.1, rho=0.5, q=n)
print(params.to_dict())
print("cube samples per simulated query at xi = 0.25:", params.sample_size(0.25))

hits = 0
for _ in range(200):
    f = Dictator(int(rng.integers(n)), n)
    sqs = HonestSQS(f, "worst_noise", rng=rng)  # answers pushed to the edge of the tolerance
    out = learn_then_sample(dictator_sq_learner, sqs, params, rng)
    hits += f(out.output)
print("positive outputs", hits, "/ 200; target at least", 1 - params.eps_prime)

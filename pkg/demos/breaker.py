"""Answer SQS queries about a toy signature verifier using only a signing oracle."""

from __future__ import annotations

import numpy as np

from sqslab.crypto import BreakerState, breaker_answer_query, breaker_run, key_holding_sampler, toy_scheme
from sqslab.domain import popcount

rng = np.random.default_rng(2)
scheme = toy_scheme(16, "c0ffee")
state = BreakerState(scheme, eps=1.0, q=2, xi=1.0)
print("per-query signatures M =", state.M, "inner tolerance", state.xi0)

g = lambda packed: 1.0 - 2.0 * (popcount(packed & 0x00FF00F0) & 1)
y = breaker_answer_query(state, g, 1.0, rng=rng)
e = state.log[-1]
print(f"exact {e['sigma']:+.4f}  empirical {e['x']:+.4f}  answer {y:+.4f}  typical {e['typical']}")

# a sampler that holds the key still lands in the breaker's history now and then
runs = [breaker_run(key_holding_sampler(scheme, 2, 1.0), scheme, 1.0, 2, rng, xi=1.0) for _ in range(300)]
seen = sum(r["outcome"] == "seen" for r in runs)
print("seen", seen, "/ 300; expected about", round(300 * 2 * state.M / 2**16, 1))

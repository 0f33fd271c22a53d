"""Walk through the negative-parity pruning adversary at n = 16."""

from __future__ import annotations

import numpy as np

from sqslab import harness
from sqslab.domain import AllNegParity, FullCube
from sqslab.oracles import QueryBudget, negparity_adversary
from sqslab.samplers import bit_fixing_sampler, consistent_set_sampler, query_family

n = 16
budget = QueryBudget.negparity_regime(n)  # 15 queries at tolerance 1/16
rng = np.random.default_rng(0)
print("budget", budget.to_dict(), "ceiling", harness.negparity_bound(n))

# bit fixing: the walk runs out of queries one bit early and fills the last bit at random
adv = negparity_adversary(n, budget)
out = bit_fixing_sampler(adv, n, 8, budget.max_queries, rng)
print("bit fixing output", f"{out.output:04x}", out.notes)
print("candidates removed per query", [e["removed"] for e in adv.transcript])
print("best achievable success after pruning", adv.optimal_success()[1])

# parity queries remove their own predicate and nothing else
adv = negparity_adversary(n, budget)
consistent_set_sampler(adv, AllNegParity(n), query_family("parity", FullCube(n), 15, rng), budget.min_tolerance, rng)
print("parity queries, removed", [e["removed"] for e in adv.transcript], "remaining", adv.remaining)

import random

import pytest

from rsrepair.construction import build_code, plan_manual
from rsrepair.repair import RepairScheme


class Instance:
    def __init__(self, plan):
        self.plan = plan
        self.tower, self.code = build_code(plan)
        self.scheme = RepairScheme(self.code, plan)


@pytest.fixture(scope="session")
def instance_a():
    """q=2, primes {2,3}, l=6, n=5, k=2: prime-2 class repairable, prime-3 not."""
    return Instance(plan_manual(q=2, primes=[2, 3], subset_sizes=[2, 3], n=5, k=2))


@pytest.fixture(scope="session")
def instance_b():
    """q=2, primes {3,5,7}, l=105, n=15, k=2: every class repairable."""
    return Instance(plan_manual(q=2, primes=[3, 5, 7], subset_sizes=[3, 5, 7], n=15, k=2))


@pytest.fixture(scope="session")
def instance_c():
    """q=2, primes {2,3,5}, l=30, n=10, k=1: repairs meet the cut-set bound."""
    return Instance(plan_manual(q=2, primes=[2, 3, 5], subset_sizes=[2, 3, 5], n=10, k=1))


@pytest.fixture()
def rng():
    return random.Random(0xC0DE)

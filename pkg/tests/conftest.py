import json
import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))  # for the bruteforce oracle

from ttg.generator import GeneratorConfig, sample_inventory, sample_pair
from ttg.schema import request_from_dict

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def default_config():
    return GeneratorConfig()


@pytest.fixture(scope="session")
def small_config():
    """Instances small enough for exhaustive enumeration."""
    return GeneratorConfig(flights_per_segment=(3, 6), hotels_per_city=(2, 4),
                           nights_per_stop=(1, 2), p_three_cities=0.0,
                           p_one_way=0.15)


@pytest.fixture(scope="session")
def demo_request():
    """Three-segment round trip DEN->MIA->JFK->DEN with cabin and budget
    constraints, matching the bundled fixture file."""
    with open(os.path.join(FIXTURES, "request_den_mia_jfk.json")) as fh:
        return request_from_dict(json.load(fh))


@pytest.fixture(scope="session")
def demo_pair(demo_request, default_config):
    rng = random.Random(20250115)
    inventory = sample_inventory(rng, demo_request, default_config)
    return demo_request, inventory


def make_pairs(config, n, seed=0):
    return [sample_pair(seed, i, config) for i in range(n)]

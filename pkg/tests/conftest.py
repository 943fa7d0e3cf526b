import numpy as np
import pytest

from gmfg import equilibrium as eq
from gmfg import instances


@pytest.fixture(scope="session")
def standard():
    """The five fixed instances, solved, keyed by name."""
    out = {}
    for inst in instances.standard_instances():
        out[inst.name] = (inst, eq.solve(inst.params, inst.graphon, inst.mean))
    return out


@pytest.fixture(scope="session")
def randomized():
    rng = np.random.default_rng(20240611)
    out = []
    for _ in range(50):
        inst = instances.random_instance(rng)
        out.append((inst, eq.solve(inst.params, inst.graphon, inst.mean)))
    return out

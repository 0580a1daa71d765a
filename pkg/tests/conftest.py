import pytest

from ccscatter import catalog


@pytest.fixture(scope="session")
def corpus():
    return catalog.corpus_problems()


@pytest.fixture(scope="session")
def spike_free(corpus):
    return [(n, p) for n, p in corpus if not p.V.has_spikes]


@pytest.fixture(scope="session")
def real_corpus(corpus):
    return [(n, p) for n, p in corpus if p.ref.u0_is_real]


@pytest.fixture(scope="session")
def sine_well():
    return catalog.sine_well()


@pytest.fixture(scope="session")
def box_barrier():
    return catalog.box_barrier()


@pytest.fixture(scope="session")
def free_problem():
    from ccscatter import PotentialSpec, build_problem

    return build_problem(PotentialSpec.zero(), PotentialSpec.zero(), (1.0, 0.0))

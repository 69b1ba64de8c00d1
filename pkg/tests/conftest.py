import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def quaternionic():
    from hypercourant.instances import quaternionic_triple

    return quaternionic_triple(1)


@pytest.fixture(scope="session")
def para():
    from hypercourant.instances import para_triple

    return para_triple(1)


@pytest.fixture(scope="session")
def quaternionic_h(quaternionic):
    from hypercourant.algebroid import assemble

    return assemble(quaternionic[1])


@pytest.fixture(scope="session")
def para_h(para):
    from hypercourant.algebroid import assemble

    return assemble(para[1])


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        title, ok, detail = RESULTS[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def torsion_instances():
    from hypercourant.instances import search_torsion_instances

    return search_torsion_instances(4, seed=0, budget=40)


@pytest.fixture(scope="session")
def poisson_duals(torsion_instances):
    """For each torsion instance, the nonzero μ_π over Poisson basis bivectors e_x ∧ e_y."""
    import itertools

    from hypercourant import linalg
    from hypercourant.algebroid import Bivector, induced_dual_structure, schouten_square

    out = []
    for inst in torsion_instances:
        duals = []
        for x, y in itertools.combinations(range(4), 2):
            m = linalg.zeros(4, 4)
            m[x, y], m[y, x] = 1, -1
            p = Bivector(m)
            if schouten_square(inst.mu, p).is_zero():
                g = induced_dual_structure(inst.mu, p)
                if not g.element.is_zero():
                    duals.append(g)
        out.append(duals)
    return out

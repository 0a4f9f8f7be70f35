import pytest

import csg_solver as cs


def canon(partition):
    return frozenset(frozenset(block) for block in partition)


def test_distribution_names():
    names = cs.distribution_names()
    assert "pascal" in names
    assert "agent-based-uniform" in names
    assert len(names) == 11


def test_partition_count():
    assert cs.partition_count(1) == 1
    assert cs.partition_count(5) == 52
    assert cs.partition_count(10) == 115975


def test_parse_structure_round_trip():
    parts = cs.parse_structure("{{0,2},{1},{3}}")
    assert canon(parts) == canon([[0, 2], [1], [3]])


def test_solve_matches_optimal_on_a_table():
    values = [0.0] * 16
    for mask in range(1, 16):
        values[mask] = float(bin(mask).count("1"))
    values[0b0110] = 9.0  # {1,2} dominates
    values[0b0001] = 1.5
    values[0b1000] = 1.25
    values[0b1001] = 2.0  # worse than {0} + {3}, so the optimum is unique
    vf = cs.table_from_values(4, values)

    best = cs.optimal(vf)
    assert best["value"] == pytest.approx(11.75)  # {1,2} + {0} + {3}
    assert canon(best["structure"]) == canon([[0], [1, 2], [3]])

    res = cs.solve(vf, agents=4, max_expansions=200, seed=1)
    assert res["value"] == best["value"]
    assert canon(res["structure"]) == canon(best["structure"])
    assert res["value"] == vf.structure_value(res["structure"])


def test_solve_trace_shape():
    vf = cs.distribution("normal", 8, seed=3)
    res = cs.solve(vf, agents=2, max_expansions=150, seed=5)

    flat = sorted(range(8))
    seen = sorted(a for block in res["structure"] for a in block)
    assert seen == flat  # a partition of all agents

    values = [e["value"] for e in res["trace"]]
    assert values == sorted(values)
    assert len(set(values)) == len(values)  # strictly increasing
    assert sum(len(t) for t in res["agent_traces"]) == len(res["trace"])
    assert res["trace"][-1]["value"] == res["value"]


def test_solve_accepts_structure_literal_start():
    vf = cs.distribution("uniform", 6, seed=2)
    res = cs.solve(vf, agents=1, max_expansions=50, seed=2,
                   start="{{0,3},{1,4},{2},{5}}")
    assert res["expansions"] <= 50


def test_bridge_path_reaches_target():
    source = [[0, 1, 2, 3]]
    target = [[0, 1], [2], [3]]
    nodes = cs.bridge_path("split_then_merge", 4, source, target)
    assert canon(nodes[-1]) == canon(target)


def test_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        cs.distribution("no-such-family", 5)
    with pytest.raises(ValueError):
        cs.solve(cs.distribution("uniform", 5), omega=2.0, max_expansions=10)
    with pytest.raises(RuntimeError):
        cs.optimal(cs.distribution("uniform", 30, seed=1))
    with pytest.raises(ValueError):
        cs.parse_structure("{{0},{0}}")

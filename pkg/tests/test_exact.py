import io
import random
from math import comb

import pytest

from bookcross.chordgraph import InputError, build_chord_graph
from bookcross.drawings import count_crossings, dds_crossing_count, dds_drawing
from bookcross.exact import (
    Budget,
    CutAssignment,
    brute_force_nu,
    coloring_from_drawing,
    cut_value,
    drawing_from_cut,
    emit_dimacs_wcnf,
    encode_wcnf,
    max_k_cut_bnb,
    nu_exact,
    parse_wcnf_model,
)


def test_cut_value_basics():
    g = build_chord_graph(7)
    mono = CutAssignment(graph_n=7, k=3, color_of=(0,) * g.num_vertices)
    assert cut_value(g, mono) == 0
    rng = random.Random(3)
    rand = CutAssignment(graph_n=7, k=3, color_of=tuple(rng.randrange(3) for _ in range(g.num_vertices)))
    assert cut_value(g, rand) <= g.num_edges


def test_cut_value_of_construction_coloring():
    g = build_chord_graph(7)
    a = coloring_from_drawing(g, dds_drawing(7, 3))
    assert cut_value(g, a) == comb(7, 4) - 2 == 33


def test_cut_value_dimension_mismatch():
    g = build_chord_graph(7)
    with pytest.raises(InputError):
        cut_value(g, CutAssignment(graph_n=8, k=2, color_of=(0, 1)))


def test_cut_plus_crossings_is_constant():
    rng = random.Random(11)
    for n in range(6, 13):
        g = build_chord_graph(n)
        for k in (2, 3, 5):
            for _ in range(5):
                a = CutAssignment(
                    graph_n=n, k=k,
                    color_of=tuple(rng.randrange(k) for _ in range(g.num_vertices)),
                )
                assert cut_value(g, a) + count_crossings(drawing_from_cut(a, g)) == comb(n, 4)


def test_drawing_round_trip_preserves_count():
    g = build_chord_graph(9)
    dr = dds_drawing(9, 3)
    a = coloring_from_drawing(g, dr)
    again = drawing_from_cut(a, g)
    assert count_crossings(again) == count_crossings(dr) == dds_crossing_count(9, 3)


def test_monochromatic_cut_drawing():
    g = build_chord_graph(6)
    a = CutAssignment(graph_n=6, k=2, color_of=(0,) * g.num_vertices)
    assert count_crossings(drawing_from_cut(a, g)) == comb(6, 4)


def test_bnb_matches_brute_force():
    for n in (5, 6, 7):
        g = build_chord_graph(n)
        for k in (1, 2, 3, 4):
            assert max_k_cut_bnb(g, k).nu == brute_force_nu(n, k), (n, k)


def test_bnb_known_values():
    assert nu_exact(7, 3).nu == 2
    res = nu_exact(9, 4)
    assert (res.nu, res.cut_size) == (3, 123)
    assert nu_exact(11, 5).nu == 4


def test_nu_exact_short_circuit_zero():
    res = nu_exact(12, 6)
    assert res.nu == 0 and res.proved_optimal and res.nodes_explored == 0
    assert nu_exact(10, 4).nu == 7


def test_bnb_deterministic():
    g = build_chord_graph(9)
    r1 = max_k_cut_bnb(g, 3)
    r2 = max_k_cut_bnb(g, 3)
    assert r1.assignment == r2.assignment
    assert r1.nodes_explored == r2.nodes_explored


def test_budget_exhaustion_flagged():
    g = build_chord_graph(10)
    res = max_k_cut_bnb(g, 3, Budget(max_nodes=50))
    assert not res.proved_optimal
    assert res.nu >= nu_exact(10, 3).nu  # still a valid upper bound
    assert res.nu + res.cut_size == comb(10, 4)


def test_brute_force_cap():
    with pytest.raises(InputError):
        brute_force_nu(9, 3, cap=1000)


def test_exact_result_json():
    d = nu_exact(7, 3).to_json_dict()
    assert set(d) == {"n", "k", "nu", "cut", "optimal", "nodes", "seconds"}


def test_wcnf_counts():
    g = build_chord_graph(7)
    inst = encode_wcnf(g, 3)
    assert inst.num_vars == 42
    assert len(inst.soft_clauses) == 105
    assert len(inst.hard_clauses) == 14
    assert inst.hard_weight == 3 * comb(7, 4) == 105


def test_wcnf_dimacs_output():
    g = build_chord_graph(7)
    inst = encode_wcnf(g, 3)
    buf = io.StringIO()
    emit_dimacs_wcnf(inst, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "p wcnf 42 119 106"
    assert len(lines) == 120
    assert all(ln.endswith(" 0") for ln in lines[1:])
    soft = [ln for ln in lines[1:] if ln.startswith("1 ")]
    hard = [ln for ln in lines[1:] if ln.startswith("106 ")]
    assert len(soft) == 105 and len(hard) == 14

    buf2 = io.StringIO()
    emit_dimacs_wcnf(inst, buf2, style="paper-literal")
    lines2 = buf2.getvalue().splitlines()
    assert lines2[0] == "p wcnf 42 119 106"
    assert sum(ln.startswith("105 ") for ln in lines2[1:]) == 14


def test_wcnf_model_round_trip():
    g = build_chord_graph(6)
    inst = encode_wcnf(g, 2)
    coloring = tuple(i % 2 for i in range(g.num_vertices))
    lits = []
    for v, c in enumerate(coloring):
        for p in range(2):
            var = inst.var(v, p)
            lits.append(var if p == c else -var)
    text = "c comment\nv " + " ".join(map(str, lits)) + "\n"
    back = parse_wcnf_model(inst, text)
    assert back.color_of == coloring


def test_wcnf_model_multi_color_takes_lowest():
    g = build_chord_graph(6)
    inst = encode_wcnf(g, 3)
    # every color true on vertex 0, exactly one elsewhere
    true_vars = {inst.var(0, p) for p in range(3)}
    true_vars |= {inst.var(v, 1) for v in range(1, g.num_vertices)}
    lits = [v if v in true_vars else -v for v in range(1, inst.num_vars + 1)]
    back = parse_wcnf_model(inst, "v " + " ".join(map(str, lits)))
    assert back.color_of[0] == 0
    assert set(back.color_of[1:]) == {1}
    assert cut_value(build_chord_graph(6), back) >= 0


def test_wcnf_model_hard_violation_reported():
    g = build_chord_graph(6)
    inst = encode_wcnf(g, 2)
    lits = [-v for v in range(1, inst.num_vars + 1)]  # nothing true
    with pytest.raises(InputError, match="hard clause 0"):
        parse_wcnf_model(inst, "v " + " ".join(map(str, lits)))


def test_wcnf_crossing_free_instance_fully_satisfiable():
    # nu_4(K_8) = 0: the construction coloring satisfies every clause
    g = build_chord_graph(8)
    inst = encode_wcnf(g, 4)
    colors = coloring_from_drawing(g, dds_drawing(8, 4)).color_of
    true_vars = {inst.var(v, c) for v, c in enumerate(colors)}
    assert all(any(v in true_vars for v in clause) for clause in inst.hard_clauses)
    assert not any(-a in true_vars and -b in true_vars for a, b in inst.soft_clauses)


def test_wcnf_min_unsat_weight_is_crossing_number():
    # evaluate the emitted clauses over every coloring of a small instance
    g = build_chord_graph(6)
    k = 2
    inst = encode_wcnf(g, k)
    best = None
    for code in range(k ** (g.num_vertices - 1)):
        colors = [0]
        c = code
        for _ in range(g.num_vertices - 1):
            c, digit = divmod(c, k)
            colors.append(digit)
        true_vars = {inst.var(v, colors[v]) for v in range(g.num_vertices)}
        unsat = sum(1 for a, b in inst.soft_clauses if -a in true_vars and -b in true_vars)
        assert all(any(v in true_vars for v in clause) for clause in inst.hard_clauses)
        best = unsat if best is None else min(best, unsat)
    assert best == brute_force_nu(6, 2) == dds_crossing_count(6, 2) == 3

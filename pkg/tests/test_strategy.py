import itertools

import pytest

from eternal_pursuit.engine import solve_eternal
from eternal_pursuit.errors import IllegalMove, StrategyError
from eternal_pursuit.graph import cycle_graph, generate, path_graph
from eternal_pursuit.strategy import (
    BranchSacrificeRobber,
    OptimalRobber,
    Session,
    StrategyTable,
    extract_strategy,
    play_out,
    replay,
    single_play_strategy,
)


def test_p3_table_moves_toward_robber():
    g = path_graph(3)
    table = extract_strategy(g, 1, 2)
    # with two steps an end vertex also wins, so the least winning start is (0,)
    assert table.certified and (1,) in table.winning_configs and table.start == (0,)
    assert table.move((1,), 0, 2) == (0,)
    assert table.move((1,), 2, 2) == (2,)
    events = replay(g, table, [(2, [])])
    assert events[-1].kind == "capture" and events[-1].step <= 2


def test_spider_play_one_matches_worked_example():
    g = generate("spider:3x4")
    table = extract_strategy(g, 2, 5)
    assert table.start == (0, 0)
    events = replay(g, table, [(12, [])])
    end = events[-1]
    assert end.kind == "capture" and end.step == 4 and end.robber == 12


def test_spider_three_plays_stay_in_win_set():
    g = generate("spider:3x4")
    table = extract_strategy(g, 2, 5)
    wins = set(table.winning_configs)
    events = replay(g, table, [(12, []), (8, []), (4, [])])
    captures = [e for e in events if e.kind == "capture"]
    assert len(captures) == 3
    assert all(e.step <= 5 and e.cops in wins for e in captures)


def test_c7_three_cops_answer_in_one_step():
    g = cycle_graph(7)
    table = extract_strategy(g, 3, 1)
    for c in table.winning_configs:
        for r in range(g.n):
            if r in c:
                continue
            session = Session(g, table)
            session.config = c
            events = session.place(r)
            assert events[-1].kind == "capture" and events[-1].step == 1


def test_every_play_ends_in_capture_against_all_scripts():
    g = path_graph(5)
    table = extract_strategy(g, 2, 2)
    for first, second in itertools.product(range(g.n), repeat=2):
        session = Session(g, table)
        for placement in (first, second):
            if placement in session.config:
                continue
            session.place(placement)
            while session.robber is not None:
                nxt = max(g.closed_neighborhood(session.robber),
                          key=lambda v: min(g.dist[v, c] for c in session.config))
                session.move(nxt)
            assert session.transcript[-1].kind == "capture"
            assert session.transcript[-1].step <= 2


def test_illegal_moves_do_not_change_state():
    g = path_graph(4)
    table = extract_strategy(g, 1, 3)
    session = Session(g, table)
    with pytest.raises(IllegalMove):
        session.place(table.start[0])
    with pytest.raises(IllegalMove):
        session.place(9)
    with pytest.raises(IllegalMove):
        session.move(0)
    free = next(v for v in range(g.n) if v not in table.start and g.dist[v, table.start[0]] > 1)
    session.place(free)
    before = (session.config, session.robber, session.steps_left, len(session.transcript))
    if session.robber is not None:
        far = next(v for v in range(g.n) if g.dist[v, session.robber] > 1)
        with pytest.raises(IllegalMove):
            session.move(far)
        assert (session.config, session.robber, session.steps_left, len(session.transcript)) == before


def test_json_round_trip_and_hash_check():
    g = generate("spider:3x4")
    table = extract_strategy(g, 2, 5)
    again = StrategyTable.from_json(table.to_json(), graph=g)
    assert again.moves == table.moves and again.start == table.start
    assert again.to_json() == table.to_json()
    with pytest.raises(StrategyError):
        StrategyTable.from_json(table.to_json(), graph=generate("spider:3,3,5"))
    with pytest.raises(StrategyError):
        Session(path_graph(3), table)


def test_extract_fails_without_win():
    with pytest.raises(StrategyError):
        extract_strategy(generate("spider:3x4"), 1, 5)


def test_optimal_robber_beats_single_play_cop():
    g = generate("spider:3x4")
    sol = solve_eternal(g, 1, 5)
    session = play_out(g, single_play_strategy(g, 1, 5), OptimalRobber(g, sol), max_plays=10)
    assert session.finished
    assert session.transcript[-1].kind == "escape"


def test_optimal_robber_refuses_winning_configs():
    g = path_graph(3)
    sol = solve_eternal(g, 1, 2)
    with pytest.raises(StrategyError):
        OptimalRobber(g, sol).place(g, (1,), 1)


def test_branch_sacrifice_beats_weak_table():
    # a table built against the single-play win set lets the scripted
    # adversary drag a cop away and then escape, as in the tree lower bound
    g = generate("spider:3x4")
    weak = single_play_strategy(g, 2, 4)
    session = play_out(g, weak, BranchSacrificeRobber(root=0, t=4, levels=2, depth=4), max_plays=6)
    assert session.finished and session.play <= 3
    strong = extract_strategy(g, 3, 4)
    session = play_out(g, strong, BranchSacrificeRobber(root=0, t=4, levels=2, depth=4), max_plays=6)
    assert not session.finished

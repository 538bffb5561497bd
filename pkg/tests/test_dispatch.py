from dataclasses import replace

import pytest

from semspace.cli import load_scenario
from semspace.core import Body, Promise, SemanticSpacetime
from semspace.dispatch import dispatch, effective_scope, flood, make_transparent
from semspace.errors import NoChannelError, OpacityError
from semspace.scaling import build_directory, declare_superagent


@pytest.fixture
def frontdesk():
    return load_scenario("frontdesk").spacetime


def job_promise(st):
    return next(
        p for p in st.promises
        if p.promiser == "outside" and p.body.type_tag == "job"
    )


def work_promise(st):
    return next(
        p for p in st.promises
        if p.promiser == "ext" and p.body.type_tag == "work"
    )


def cluster_world(links, acceptors=("c",)):
    """A promiser outside a three-agent cluster with chosen adjacency links."""
    st = SemanticSpacetime()
    for aid in ("ext", "a", "b", "c", "G"):
        if aid != "G":
            st = st.with_agent(aid)
    for frm, to in links:
        st = st.promise(frm, to, Body("+", "adj", {"link": 1}))
    st = declare_superagent(st, "G", {"a", "b", "c"})
    st = st.promise("ext", "G", Body("+", "work", {"w": 1}))
    for acceptor in acceptors:
        st = st.promise(acceptor, "G", Body("-", "work", {"w": 1}, valency=1))
    return st


def test_flood_reaches_all_adjacent_interior():
    st = cluster_world([("ext", "a"), ("a", "b"), ("b", "c"), ("a", "c")])
    outcome = flood(st, work_promise(st), "G")
    assert outcome.reached == {"a", "b", "c"}
    assert outcome.accepted == {"c"}


def test_flood_stops_at_surface_without_interior_adjacency():
    st = cluster_world([("ext", "a")])
    outcome = flood(st, work_promise(st), "G")
    assert outcome.reached == {"a"}


def test_flood_without_channel_errors():
    st = cluster_world([("a", "b"), ("b", "c")])
    with pytest.raises(NoChannelError):
        flood(st, work_promise(st), "G")


def test_dispatch_with_explicit_directory():
    st = cluster_world([("ext", "a"), ("a", "b"), ("b", "c")])
    promise = work_promise(st)
    directory = build_directory(st, "G")
    outcome = dispatch(st, promise, "G", directory)
    assert outcome.reached == {"c"}
    assert outcome.accepted == {"c"}
    assert outcome.max_hops == 1  # direct virtual adjacency


def test_dispatch_opaque_without_directory_or_gateway():
    st = cluster_world([("ext", "a"), ("a", "b"), ("b", "c")])
    with pytest.raises(OpacityError):
        dispatch(st, work_promise(st), "G")


def test_gateway_relay_costs_at_least_one_extra_hop(frontdesk):
    st = frontdesk
    promise = job_promise(st)
    relayed = dispatch(st, promise, "cluster")
    assert relayed.mode == "gateway"
    transparent = dispatch(make_transparent(st, "cluster"), promise, "cluster")
    assert transparent.mode == "direct"
    assert relayed.max_hops >= transparent.max_hops + 1


def test_dispatch_subset_of_flood(frontdesk):
    promise = job_promise(frontdesk)
    flooded = flood(frontdesk, promise, "cluster")
    directed = dispatch(frontdesk, promise, "cluster")
    assert directed.reached <= flooded.reached
    assert directed.accepted == flooded.accepted


def test_transparency_is_idempotent(frontdesk):
    once = make_transparent(frontdesk, "cluster")
    twice = make_transparent(once, "cluster")
    assert once.promises == twice.promises


def test_effective_scope_plain_agent_unchanged():
    st = SemanticSpacetime().with_agent("a").with_agent("b")
    p = Promise("a", frozenset({"b"}), Body("+", "t", {"x": 1}))
    st = st.with_promise(p)
    assert effective_scope(st, p) == {"b"}


def test_effective_scope_opaque_boundary(frontdesk):
    st = replace(frontdesk, gateways={})
    assert effective_scope(st, job_promise(st)) == {"cluster"}


def test_effective_scope_monotone_under_transparency(frontdesk):
    st = replace(frontdesk, gateways={})
    promise = job_promise(st)
    before = effective_scope(st, promise)
    after = effective_scope(make_transparent(st, "cluster"), promise)
    assert before <= after
    assert {"a1", "a2", "a3", "a4", "a5", "a6"} <= after


def test_delivery_outcome_csv(frontdesk):
    outcome = flood(frontdesk, job_promise(frontdesk), "cluster")
    assert outcome.csv_row() == "flood,6,1,6"


def test_gateway_relay_two_hop_shape():
    # promiser adjacent to the gateway, gateway adjacent to the acceptor
    st = SemanticSpacetime()
    for aid in ("ext", "g", "w"):
        st = st.with_agent(aid)
    st = st.promise("ext", "g", Body("+", "adj", {"link": 1}))
    st = st.promise("g", "w", Body("+", "adj", {"link": 1}))
    st = declare_superagent(st, "G", {"g", "w"})
    st = replace(st, gateways={"G": "g"})
    st = st.promise("ext", "G", Body("+", "work", {"w": 1}))
    st = st.promise("w", "G", Body("-", "work", {"w": 1}, valency=1))
    promise = next(p for p in st.promises
                   if p.promiser == "ext" and p.body.type_tag == "work")
    outcome = dispatch(st, promise, "G")
    assert outcome.mode == "gateway"
    assert outcome.reached == {"w"}
    assert outcome.hops["w"] == 2

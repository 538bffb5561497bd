import pytest

from semspace.cli import load_scenario
from semspace.core import Body, SemanticSpacetime
from semspace.errors import (
    DuplicateNameError,
    IncompleteBindingError,
    MultiTenancyError,
    SlotExhaustedError,
    UnknownAgentError,
)
from semspace.scaling import declare_superagent
from semspace.tenancy import (
    bind_half_adjacency,
    bind_multitenancy,
    bind_occupancy,
    bind_tenancy,
    check_binding,
    make_namespace,
    symmetrize_to_adjacency,
    tenancy_cycles,
    tenancy_direction,
    tenant_isolation_scan,
)
from semspace.valency import valence


def world(*ids):
    st = SemanticSpacetime()
    for aid in ids:
        st = st.with_agent(aid)
    return st


# -- occupancy -----------------------------------------------------------------


def test_occupancy_consumes_one_slot():
    st = world("host", "occ")
    st = st.promise("host", "occ", Body("+", "R", {"r": 1}, valency=1))
    st = bind_occupancy(st, "host", "occ", "R")
    assert valence(st, "R", set(st.agents)).net == 0


def test_occupancy_strict_exhaustion():
    st = world("host", "o1", "o2")
    st = st.promise("host", "o1,o2".split(","), Body("+", "R", {"r": 1}, valency=1))
    st = bind_occupancy(st, "host", "o1", "R", policy="strict")
    with pytest.raises(SlotExhaustedError):
        bind_occupancy(st, "host", "o2", "R", policy="strict")


def test_occupancy_lenient_builds_queue():
    st = world("host", *[f"E{i:02d}" for i in range(20)])
    employees = [f"E{i:02d}" for i in range(20)]
    st = st.promise("host", employees, Body("+", "space", {"s": 1}, valency=10))
    for e in employees:
        st = bind_occupancy(st, "host", e, "space", policy="lenient")
    assert valence(st, "space", set(st.agents)).queue_length == 10


def test_occupy_nonexistent_resource_errors():
    st = world("host", "occ")
    with pytest.raises(UnknownAgentError):
        bind_occupancy(st, "host", "occ", "nothing")


# -- tenancy template --------------------------------------------------------------


def landlord_binding():
    st = world("landlord", "renter")
    return bind_tenancy(
        st, "landlord", "renter",
        Body("+", "space", {"room": 1}, valency=1),
        Body("+", "contract", {"terms": 1}),
        Body("+", "services", {"power": 1, "heating": 1}),
    )


def test_landlord_template_installs_five_promises():
    st, binding = landlord_binding()
    assert len(binding.promises) == 5
    check_binding(st, binding)


def test_missing_condition_promise_rejected():
    st, binding = landlord_binding()
    give_c = next(
        p for p in binding.promises
        if p.promiser == "renter" and p.body.sign == "+" and p.body.type_tag == "contract"
    )
    broken = st.without_promise(give_c)
    with pytest.raises(IncompleteBindingError):
        check_binding(broken, binding)


def test_employment_scenario_binds():
    st = world("company", "worker")
    st, binding = bind_tenancy(
        st, "company", "worker",
        Body("+", "badge", {"id": 1}, valency=1),
        Body("+", "work", {"hours": 1}),
        Body("+", "wages", {"salary": 1}),
    )
    check_binding(st, binding)
    assert tenancy_direction(binding) == ("worker", "company")


def test_host_must_differ_from_tenant():
    st = world("x")
    with pytest.raises(IncompleteBindingError):
        bind_tenancy(st, "x", "x", Body("+", "r", valency=1),
                     Body("+", "c"), Body("+", "f"))


# -- direction and layering -------------------------------------------------------------


def test_osi_layers_orient_downward_acyclically():
    st = load_scenario("osi-layers").spacetime
    edges = [tenancy_direction(b) for b in st.tenancies]
    assert ("L2", "L1") in edges and ("L3", "L2") in edges
    assert tenancy_cycles(st.tenancies) == ()


def test_cycles_are_reported_not_forbidden():
    st = world("a", "b")
    st, b1 = bind_tenancy(st, "a", "b", Body("+", "r1", valency=1),
                          Body("+", "c1"), Body("+", "f1"))
    st, b2 = bind_tenancy(st, "b", "a", Body("+", "r2", valency=1),
                          Body("+", "c2"), Body("+", "f2"))
    cycles = tenancy_cycles([b1, b2])
    assert cycles and set(cycles[0]) <= {"a", "b"}


# -- symmetrization ---------------------------------------------------------------------------


def test_symmetrize_creates_mutual_adjacency():
    from semspace.core import promise_adjacency_matrix

    st = world("a", "b")
    st = symmetrize_to_adjacency(st, "a", "b", Body("+", "R", {"r": 1}, valency=1))
    matrix = promise_adjacency_matrix(st)
    assert matrix.entry("a", "b") == 1 and matrix.entry("b", "a") == 1


def test_symmetrize_makes_no_service_promises():
    st = world("a", "b")
    st = symmetrize_to_adjacency(st, "a", "b", Body("+", "R", {"r": 1}, valency=1))
    assert all(p.body.condition is None for p in st.promises)


def test_symmetrize_equals_two_half_bindings_and_is_symmetric():
    r = Body("+", "R", {"r": 1}, valency=1)
    base = world("a", "b")
    sym_ab = symmetrize_to_adjacency(base, "a", "b", r)
    sym_ba = symmetrize_to_adjacency(base, "b", "a", r)
    halves = bind_half_adjacency(bind_half_adjacency(base, "a", "b", r), "b", "a", r)
    assert sym_ab.promises == sym_ba.promises == halves.promises


# -- multi-tenancy ------------------------------------------------------------------------------


def test_multitenancy_within_valency():
    st = world("host", "t1", "t2")
    st, bindings = bind_multitenancy(
        st, "host", ["t1", "t2"], Body("+", "slice", {"s": 1}, valency=3),
        [Body("+", "c1"), Body("+", "c2")],
    )
    assert len(bindings) == 2
    assert valence(st, "slice", set(st.agents)).net == 1


def test_multitenancy_overflow_names_tenant():
    st = world("host", "t1", "t2", "t3")
    with pytest.raises(MultiTenancyError) as err:
        bind_multitenancy(
            st, "host", ["t1", "t2", "t3"], Body("+", "slice", valency=2),
            [Body("+", "c")] * 3, policy="strict",
        )
    assert err.value.overflow == ("t3",)


def test_fair_sharing_violation():
    st = world("host", "t1", "t2")
    with pytest.raises(MultiTenancyError):
        bind_multitenancy(
            st, "host", ["t1", "t2"], Body("+", "slice", valency=2),
            [Body("+", "c")] * 2, capacity=8, shares=[5, 4],
        )


def test_tenants_stay_isolated():
    st = world("host", "t1", "t2", "t3")
    st, _ = bind_multitenancy(
        st, "host", ["t1", "t2", "t3"], Body("+", "slice", valency=3),
        [Body("+", "c")] * 3,
    )
    assert tenant_isolation_scan(st, ["t1", "t2", "t3"]) == ()


# -- namespaces ---------------------------------------------------------------------------------------


def test_highstreet_names_disambiguated():
    st = load_scenario("highstreet-namespaces").spacetime
    a = st.namespaces["townA"].exterior_transform
    b = st.namespaces["townB"].exterior_transform
    assert a["HighStreet"] == "townA/HighStreet"
    assert b["HighStreet"] == "townB/HighStreet"
    assert a["HighStreet"] != b["HighStreet"]


def test_minimal_namespace_mapping():
    # a super-agent interior is never empty, so one agent is the floor case
    st = world("lone")
    st = st.promise("lone", "*", Body("+", "t", {"x": 1}))
    st = declare_superagent(st, "box", {"lone"})
    st, ns = make_namespace(st, "box")
    assert ns.exterior_transform == {"lone": "box/lone"}


def test_duplicate_interior_names_rejected():
    from semspace.core import Agent

    st = SemanticSpacetime()
    st = st.with_agent(Agent("x1", "same")).with_agent(Agent("x2", "same"))
    st = st.promise("x1", "x2", Body("+", "adj", {"l": 1}))
    st = declare_superagent(st, "box", {"x1", "x2"})
    with pytest.raises(DuplicateNameError):
        make_namespace(st, "box")


def test_table_transform_must_cover_and_inject():
    st = world("p", "q")
    st = st.promise("p", "q", Body("+", "adj", {"l": 1}))
    st = declare_superagent(st, "box", {"p", "q"})
    with pytest.raises(DuplicateNameError):
        make_namespace(st, "box", "table", {"p": "out", "q": "out"})
    st, ns = make_namespace(st, "box", "table", {"p": "one", "q": "two"})
    assert set(ns.exterior_transform.values()) == {"one", "two"}


def test_nested_namespaces_stay_injective():
    st = world("inner1", "inner2")
    st = st.promise("inner1", "inner2", Body("+", "adj", {"l": 1}))
    st = declare_superagent(st, "in", {"inner1", "inner2"})
    st, inner = make_namespace(st, "in")
    st = declare_superagent(st, "out", {"in"})
    st, outer = make_namespace(st, "out")
    composed = {
        name: f"out/{inner.exterior_transform[name]}"
        for name in inner.interior_names
    }
    assert len(set(composed.values())) == len(composed)


def test_binding_summary_csv():
    st, binding = landlord_binding()
    row = binding.csv_row(st, st.policy)
    assert row == "landlord,renter,space,1,1,0,strict"

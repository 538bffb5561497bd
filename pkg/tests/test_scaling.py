import pytest

from semspace.cli import load_scenario
from semspace.core import Body, SemanticSpacetime
from semspace.errors import PartialResolutionError, ScaleError, SizeLimitError
from semspace.randgen import random_partition, random_spacetime, seeded_rng
from semspace.scaling import (
    Directory,
    coarse_grain,
    declare_superagent,
    define_scale,
    gauss_check,
    get_superagent,
    irreducible_promises,
    resolve,
    spacetime_equivalent,
    surface,
)


@pytest.fixture
def hybrid():
    return load_scenario("hybrid-scale").spacetime


def promise_set(st, promiser):
    return {p.render() for p in st.promises if p.promiser == promiser}


# -- scales and super-agents ----------------------------------------------------


def test_define_scale_materializes_superagent(hybrid):
    sa = get_superagent(hybrid, "S")
    assert sa.interior == {"A1", "A2", "A3", "A4"}
    assert len(sa.interior_promises) == 3  # adj link + two interior b promises


def test_overlapping_groups_rejected(hybrid):
    with pytest.raises(ScaleError):
        define_scale(hybrid, "bad", {"X": {"A1", "A2"}, "Y": {"A2", "A3"}})


def test_disconnected_group_rejected():
    st = SemanticSpacetime().with_agent("a").with_agent("b")
    with pytest.raises(ScaleError):
        define_scale(st, "bad", {"G": {"a", "b"}})


def test_identity_scale_is_identity(hybrid):
    st = define_scale(hybrid, "identity", {aid: {aid} for aid in "A1 A2 A3".split()})
    coarse, dirs = coarse_grain(st, "identity")
    assert coarse.promises == st.promises
    assert dirs == ()


def test_surface_of_worked_example(hybrid):
    assert surface(get_superagent(hybrid, "S")) == {"A1", "A2", "A4"}


def test_surface_empty_when_closed():
    st = SemanticSpacetime().with_agent("a").with_agent("b")
    st = st.promise("a", "b", Body("+", "t", {"x": 1}))
    st = declare_superagent(st, "G", {"a", "b"})
    assert surface(get_superagent(st, "G")) == frozenset()


# -- coarse graining ----------------------------------------------------------------


def test_hybrid_scale_collapse(hybrid):
    coarse, _ = coarse_grain(hybrid, "Hybrid")
    assert promise_set(coarse, "S") == {
        "S -> A5 : +b{b1,b2}",
        "S -> A6 : -b3{b3} #1",
    }


def test_super_scale_single_arrow(hybrid):
    coarse, _ = coarse_grain(hybrid, "Super")
    assert {p.render() for p in coarse.promises} == {
        "S -> R : +b{b1,b2}",
        "S -> R : -b3{b3} #1",
    }


def test_coarse_grain_never_increases_promise_count(hybrid):
    coarse, _ = coarse_grain(hybrid, "Hybrid")
    assert len(coarse.promises) <= len(hybrid.promises)


def test_round_trip_recovers_original(hybrid):
    for scale in ("Hybrid", "Super"):
        coarse, dirs = coarse_grain(hybrid, scale)
        fine = resolve(coarse, dirs)
        assert fine.promises == hybrid.promises
        assert set(fine.agents) == set(hybrid.agents)


def test_resolve_identity_with_no_superagents():
    st = SemanticSpacetime().with_agent("a").with_agent("b")
    st = st.promise("a", "b", Body("+", "t", {"x": 1}))
    st = define_scale(st, "flat", {"a": {"a"}, "b": {"b"}})
    coarse, dirs = coarse_grain(st, "flat")
    assert resolve(coarse, dirs).promises == st.promises


def test_withheld_directory_type_errors(hybrid):
    coarse, dirs = coarse_grain(hybrid, "Hybrid")
    d = dirs[0]
    pruned = Directory(
        d.owner, d.member_agents,
        {tag: ps for tag, ps in d.entries.items() if tag != "b3"},
        d.produced,
    )
    with pytest.raises(PartialResolutionError) as err:
        resolve(coarse, (pruned,))
    assert "b3" in err.value.missing_types


def test_wholly_withheld_directory_errors(hybrid):
    coarse, _dirs = coarse_grain(hybrid, "Hybrid")
    with pytest.raises(PartialResolutionError):
        resolve(coarse, ())


def test_promisee_side_scaling_preserves_promises():
    # distinct outside promisers to group members: endpoints rewritten only
    st = SemanticSpacetime()
    for aid in ("x", "y", "m1", "m2"):
        st = st.with_agent(aid)
    st = st.promise("m1", "m2", Body("+", "glue", {"g": 1}))
    st = st.promise("x", "m1", Body("+", "t", {"a": 1}))
    st = st.promise("y", "m2", Body("+", "t", {"b": 1}))
    st = define_scale(st, "M", {"G": {"m1", "m2"}})
    coarse, _ = coarse_grain(st, "M")
    inbound = {p.render() for p in coarse.promises if p.promiser in ("x", "y")}
    assert inbound == {"x -> G : +t{a}", "y -> G : +t{b}"}


def test_collective_promise_survives_round_trip():
    st = load_scenario("molecular").spacetime
    coarse, dirs = coarse_grain(st, "Molecular")
    assert "M -> * : +chem{H2O}" in {p.render() for p in coarse.promises}
    assert resolve(coarse, dirs).promises == st.promises


def test_merged_collides_with_existing_collective():
    # the reducible variant's collective equals the merged exterior body
    st = load_scenario("molecular-reducible").spacetime
    coarse, dirs = coarse_grain(st, "Molecular")
    renders = sorted(p.render() for p in coarse.promises if p.promiser == "M")
    assert renders == ["M -> * : +chem{H,O}"]
    assert resolve(coarse, dirs).promises == st.promises


# -- gauss flux --------------------------------------------------------------------------


def test_gauss_closed_superagent_is_trivially_balanced():
    st = SemanticSpacetime().with_agent("a").with_agent("b")
    st = st.promise("a", "b", Body("+", "t", {"x": 1}))
    st = declare_superagent(st, "G", {"a", "b"})
    report = gauss_check("G", st)
    assert report.balanced
    assert report.outgoing == () and report.incoming == ()


def test_gauss_worked_example_flux(hybrid):
    report = gauss_check("S", hybrid)
    assert report.balanced
    assert report.render() == "{+b1,+b1,+b2,-b3}"


def test_gauss_holds_for_random_partitions():
    for i in range(20):
        rng = seeded_rng(10_000 + i)
        st = random_spacetime(rng, max_agents=24)
        st, groups = random_partition(rng, st)
        for g in groups:
            assert gauss_check(g, st).balanced


# -- irreducible promises ----------------------------------------------------------------------


def test_molecular_h2o_is_irreducible():
    st = load_scenario("molecular").spacetime
    sa = get_superagent(st, "M")
    renders = {p.render() for p in irreducible_promises(sa, st)}
    assert renders == {"M -> * : +chem{H2O}"}
    for member in sa.interior:
        assert all("H2O" not in p.render() for p in st.promises_from(member))


def test_jointly_spanned_collective_is_reducible():
    st = load_scenario("molecular-reducible").spacetime
    assert irreducible_promises("M", st) == frozenset()


def test_collective_matching_single_subagent_is_reducible():
    st = load_scenario("molecular").spacetime
    st = st.promise("M", "*", Body("+", "chem", {"O": 1}))
    renders = {p.render() for p in irreducible_promises("M", st)}
    assert renders == {"M -> * : +chem{H2O}"}


def test_irreducibility_stable_under_unrelated_promises():
    st = load_scenario("molecular").spacetime
    st = st.promise("A1", "observer", Body("+", "noise", {"hiss": 1}))
    assert {p.render() for p in irreducible_promises("M", st)} == {"M -> * : +chem{H2O}"}


# -- spacetime equivalence -------------------------------------------------------------------------


def chain(ids, tags):
    st = SemanticSpacetime()
    for aid in ids:
        st = st.with_agent(aid)
    for (frm, to), tag in zip(zip(ids, ids[1:]), tags):
        st = st.promise(frm, to, Body("+", tag, {tag: 1}))
    return st


def test_equivalent_to_itself(hybrid):
    small = chain(["a", "b", "c"], ["t", "u"])
    assert spacetime_equivalent(small, small)


def test_equivalent_under_consistent_swap():
    st1 = chain(["a", "b", "c"], ["t", "u"])
    st2 = chain(["b", "a", "c"], ["t", "u"])  # same shape, ids permuted
    assert spacetime_equivalent(st1, st2)


def test_sign_flip_breaks_equivalence():
    st1 = chain(["a", "b", "c"], ["t", "u"])
    st2 = SemanticSpacetime()
    for aid in ("a", "b", "c"):
        st2 = st2.with_agent(aid)
    st2 = st2.promise("a", "b", Body("-", "t", {"t": 1}, valency=1))
    st2 = st2.promise("b", "c", Body("+", "u", {"u": 1}))
    assert not spacetime_equivalent(st1, st2)


def test_equivalence_matches_exhaustive_oracle():
    from itertools import permutations

    def oracle(st1, st2):
        ids1, ids2 = st1.agent_ids(), st2.agent_ids()
        if len(ids1) != len(ids2):
            return False
        from semspace.scaling import _mapped_promises

        for perm in permutations(ids2):
            mapping = dict(zip(ids1, perm))
            if _mapped_promises(st1, mapping) == st2.promises:
                return True
        return False

    for i in range(15):
        rng = seeded_rng(20_000 + i)
        st1 = random_spacetime(rng, max_agents=5)
        st2 = random_spacetime(rng, max_agents=5)
        assert spacetime_equivalent(st1, st2) == oracle(st1, st2)
        assert spacetime_equivalent(st1, st1)


def test_equivalence_size_bound():
    big = chain([f"n{i}" for i in range(13)], ["t"] * 12)
    with pytest.raises(SizeLimitError):
        spacetime_equivalent(big, big)

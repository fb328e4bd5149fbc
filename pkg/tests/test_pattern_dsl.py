import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selparse.pattern_dsl import (Child, DSLError, Group, Op, Unit, Verdict, View, evaluate,
                                  kleene, parse_constraint_expr, parse_grammar,
                                  parse_pattern_line)

S, V, P = Verdict.SATISFIED, Verdict.VIOLATED, Verdict.PENDING


def np_view(mass: bool, number: str):
    det = Child(tag="Det", fnct="det", cat="611", morph={"number": frozenset({number})})
    noun = Child(tag="N", fnct=None, cat="noun", sem=frozenset({"MASS"} if mass else {"THING"}))
    return View("NP", (det, noun), Child(tag="NP"))


MASS_RULE = "OR(T(TAG=N) R(SEM#mass), T(FNCT=det) R(NUM=sing))"


@pytest.mark.parametrize("mass,number,expected", [
    (True, "sing", S), (True, "plur", V), (False, "sing", S), (False, "plur", S)])
def test_mass_noun_truth_table(mass, number, expected):
    assert evaluate(parse_constraint_expr(MASS_RULE), np_view(mass, number)) is expected


def test_context_functor_stands_by():
    expr = parse_constraint_expr("C(TAG=CP) T(CAT=560) R(FNCT=obj)")
    pron = Child(tag="NP", cat="560")
    assert evaluate(expr, View("NP", (pron,), Child(tag="NP"))) is P
    as_obj = Child(tag="NP", fnct="obj", cat="560")
    as_subj = Child(tag="NP", fnct="subj", cat="560")
    assert evaluate(expr, View("CP", (as_obj,), Child(tag="CP"))) is S
    assert evaluate(expr, View("CP", (as_subj,), Child(tag="CP"))) is V


def test_missing_target_is_violation():
    expr = parse_constraint_expr("T(CT=4) R(VMD=non-finite)")
    assert evaluate(expr, View("CP", (Child(tag="NP"),), None)) is V


def test_subject_and_object_restrictions():
    expr = parse_constraint_expr("T(CT=1) R(VDM=non-finite), R(SUBJ=*pro*), R(OBJ=*trace*)")
    clause = Child(tag="CP", clause=True, morph={"vmd": frozenset({"non-finite"})},
                   subj=Child(tag="pro", empty="pro"), obj=Child(tag="trace", empty="trace"))
    assert evaluate(expr, View("CP", (clause,), None)) is S
    overt = Child(tag="CP", clause=True, morph={"vmd": frozenset({"non-finite"})},
                  subj=Child(tag="NP", lemma="John"), obj=Child(tag="trace", empty="trace"))
    assert evaluate(expr, View("CP", (overt,), None)) is V
    not_clause = Child(tag="NP", morph={"vmd": frozenset({"non-finite"})})
    assert evaluate(expr, View("CP", (not_clause,), None)) is V


def test_unknown_functor_units_are_satisfied(caplog):
    expr = parse_constraint_expr("L(TAG=2) T(CT=1) R(TAG=NP)")
    assert evaluate(expr, View("X", (Child(tag="NP"),), None)) is S
    assert "no defined semantics" in caplog.text


def test_implicit_and_between_groups():
    expr = parse_constraint_expr("T(CT=1) R(TAG=NP) T(CT=2) R(TAG=V)")
    assert isinstance(expr, Op) and expr.kind == "AND"
    view = View("CP", (Child(tag="NP"), Child(tag="V")), None)
    assert evaluate(expr, view) is S


def test_inverted_locator_finds_other_child():
    expr = parse_constraint_expr("T(FNCT#det) R(TAG=N)")
    view = View("NP", (Child(tag="Det", fnct="det"), Child(tag="N", fnct="0")), None)
    assert evaluate(expr, view) is S


def test_aliases_are_canonical():
    for spelled in ("MDV", "VDM", "VMD"):
        g = parse_constraint_expr(f"T(CT=1) R({spelled}=non-finite)")
        assert g.restrictions[0].param == "VMD"


@pytest.mark.parametrize("text,fragment", [
    ("Q(TAG=N)", "functor"),
    ("T(CT 1)", "operator"),
    ("AND(T(CT=1) R(TAG=N)", "unbalanced"),
    ("T(FOO=1) R(TAG=N)", "locator"),
    ("T(CT=1) R(COLOUR=red)", "param"),
])
def test_malformed_expressions(text, fragment):
    with pytest.raises(DSLError) as exc:
        parse_constraint_expr(text)
    assert fragment in str(exc.value).lower()
    assert "column" in str(exc.value)


# -- Kleene logic ------------------------------------------------------------

verdicts = st.sampled_from([S, V, P])


@given(st.lists(verdicts, min_size=1, max_size=5))
def test_kleene_and_or_duality(vs):
    neg = {S: V, V: S, P: P}
    assert kleene("AND", vs) is neg[kleene("OR", [neg[v] for v in vs])]


def test_kleene_tables():
    for a, b in itertools.product([S, V, P], repeat=2):
        and_ = kleene("AND", [a, b])
        or_ = kleene("OR", [a, b])
        if V in (a, b):
            assert and_ is V
        if S in (a, b):
            assert or_ is S
        if a is b:
            assert and_ is a and or_ is a


# -- round trips ---------------------------------------------------------------

params = st.sampled_from(["TAG", "CAT", "FNCT", "SEM", "NUMBER", "VMD", "CONN", "LEMMA"])
values = st.sampled_from(["NP", "sing", "non-finite", "det", "PERSON", "560", "che"])
ops = st.sampled_from(["=", "#"])


@st.composite
def groups(draw, targeted=False):
    ctx = Unit("C", "TAG", "=", draw(st.sampled_from(["CP", "NP"]))) if draw(st.booleans()) else None
    tgt = None
    if targeted or draw(st.booleans()):
        loc = draw(st.sampled_from(["CT", "TAG", "FNCT", "CAT"]))
        tgt = Unit("T", loc, draw(ops), "1" if loc == "CT" else draw(values))
    rs = tuple(Unit("R", draw(params), draw(ops), draw(values))
               for _ in range(draw(st.integers(1, 3))))
    return Group(ctx, tgt, rs)


# branches of AND/OR carry their own target: "R(a), R(b)" without one reads
# as a single group with two restrictions
exprs = groups() | st.recursive(groups(targeted=True), lambda inner: st.builds(
    Op, st.sampled_from(["AND", "OR"]), st.lists(inner, min_size=2, max_size=3).map(tuple)),
    max_leaves=6)


@settings(max_examples=200)
@given(exprs)
def test_expression_round_trip(expr):
    assert parse_constraint_expr(expr.to_text()) == expr


@given(st.lists(st.sampled_from(["NP", "V", "CP", "Det"]), min_size=2, max_size=4), st.data())
def test_pattern_line_round_trip(subs, data):
    n = len(subs)
    head = data.draw(st.integers(0, n - 1))
    deps = tuple(0 if i == head else head + 1 for i in range(n))
    fncts = tuple("0" if i == head else data.draw(st.sampled_from(["subj", "obj", "mod"]))
                  for i in range(n))
    line = f"CP, ({', '.join(subs)}), ({', '.join(map(str, deps))}), ({', '.join(fncts)})"
    p = parse_pattern_line(line)
    assert (p.subs, p.deps, p.fncts) == (tuple(subs), deps, fncts)
    assert parse_pattern_line(p.to_line()) == p


# -- pattern lines -------------------------------------------------------------


def test_phrase_and_clitic_patterns_parse():
    p = parse_pattern_line("NP, (Det, AdjP, N), (3, 3, 0), (det, mod, 0)")
    assert p.head_pos == 3 and p.function(1) == "det" and p.function(3) is None
    p = parse_pattern_line("Pron, (560), {C(TAG=CP) T(CAT=560) R(FNCT=obj)}")
    assert p.subs == ("560",) and p.constraints is not None
    p = parse_pattern_line("AdjP, (AdvQ, AdjP), (2,0)")
    assert p.deps == (2, 0) and p.fncts is None


def test_trace_pattern_is_intermediate():
    p = parse_pattern_line("CP, (NP, V, Trace, CP), (2,0,4,2), (subj, v, robj, obj), "
                           "{T(CT=4) R(VDM=non-finite), R(SUBJ=*pro*), R(OBJ=*trace*)}")
    assert p.intermediate and not p.flagged
    assert parse_pattern_line("*NP, (N)").intermediate


def test_register_label():
    assert parse_pattern_line("NP, (N) @formal").register == "formal"


@pytest.mark.parametrize("line,fragment", [
    ("NP, (Det, N), (3, 0), (det, 0)", "dependency position 3 out of range"),
    ("NP, (Det, N), (0, 0), (det, 0)", "exactly one"),
    ("NP, (Det, N)", "dependency dataset"),
    ("NP, (Det, N), (2, 0), (det)", "1 functions for 2"),
    ("NP, (Det, N), (1, 0), (det, 0)", "itself"),
])
def test_malformed_pattern_lines(line, fragment):
    with pytest.raises(DSLError) as exc:
        parse_pattern_line(line)
    assert fragment in str(exc.value)


def test_grammar_errors_carry_line_number():
    with pytest.raises(DSLError) as exc:
        parse_grammar("N, (noun)\n# comment\n\nNP, (Det, N), (3, 0), (det, 0)\n")
    assert "line 4" in str(exc.value)

import pytest

from generators import iterated_successor

from superlazy.build import Builder, wire_net
from superlazy.lazy import StrategyTag, match_derelicting_tree, normalize
from superlazy.net import Label, isomorphic, measure, validate
from superlazy.pr import (Comp, DecodeError, FuelExhausted, PRArityError, PRSyntaxError, Proj, Rec, Succ,
                          Zero, apply, build_instance, compile_pr, decode_nat, duplication_net, encode_nat,
                          encode_tuple, erase, erasure_net, eval_pr, numeral, parse_corpus, parse_pr, run,
                          standard_corpus, unit_net)

CORPUS = standard_corpus()
ADD = CORPUS["add"]


def test_parse_basic_terms():
    assert parse_pr("s") == Succ()
    assert parse_pr("s").arity == 1
    assert parse_pr("0") == Zero()
    assert parse_pr("pi[3,2]") == Proj(3, 2)
    add = parse_pr("rec(pi[1,1], comp(s; pi[3,2]))")
    assert isinstance(add, Rec) and add.arity == 2
    assert parse_pr(str(add)) == add


def test_arity_errors_name_the_subterm():
    with pytest.raises(PRArityError) as e:
        parse_pr("comp(s; s, s)")
    assert "comp" in e.value.subterm
    with pytest.raises(PRArityError):
        parse_pr("pi[2,3]")
    with pytest.raises(PRArityError):
        parse_pr("rec(pi[1,1], s)")
    with pytest.raises(PRArityError):
        Comp(Succ(), ())


@pytest.mark.parametrize("text,column", [("comp(s pi[1,1])", 8), ("rec(s,", 7), ("s s", 3), ("pi[2,x]", 6)])
def test_syntax_errors_report_columns(text, column):
    with pytest.raises(PRSyntaxError) as e:
        parse_pr(text)
    assert e.value.column == column


def test_eval_examples():
    assert eval_pr(Succ(), [4]) == 5
    assert eval_pr(ADD, [2, 3]) == 5
    assert eval_pr(Proj(3, 2), [7, 8, 9]) == 8
    assert eval_pr(CORPUS["mult"], [3, 4]) == 12
    assert eval_pr(CORPUS["pred"], [0]) == 0
    assert eval_pr(CORPUS["pred"], [7]) == 6
    with pytest.raises(PRArityError):
        eval_pr(Succ(), [1, 2])


def test_corpus_file_format():
    text = "# sample\nadd = rec(pi[1,1], comp(s; pi[3,2]))\ndouble = comp(add; pi[1,1], pi[1,1]) ; 4\n"
    entries = parse_corpus(text)
    assert [e.name for e in entries] == ["add", "double"]
    assert entries[1].args == (4,)
    assert eval_pr(entries[1].term, entries[1].args) == 8
    with pytest.raises(ValueError):
        parse_corpus("x = s ; 1 2\n")
    with pytest.raises(ValueError):
        parse_corpus("just words\n")


@pytest.mark.parametrize("n", range(51))
def test_numeral_roundtrip(n):
    net = encode_nat(n)
    assert validate(net).ok
    assert decode_nat(net) == n
    assert measure(net).size == 4 + 3 * n


def test_numeral_contains_spine():
    for n in range(8):
        net = encode_nat(n)
        spine = [m for m, lab in net.labels.items() if lab is Label.X]
        assert len(spine) == n
    # once a closed box is plugged in, the matcher sees the numeral's spine
    for n in range(8):
        first = normalize(iterated_successor(n, 0), StrategyTag.SURFACE, fuel=1).final
        (box,) = first.boxes
        tree = match_derelicting_tree(first, box)
        assert tree is not None
        assert tree.count(Label.X) == n


def test_decode_rejects_non_numerals():
    with pytest.raises(DecodeError):
        decode_nat(wire_net())
    with pytest.raises(DecodeError):
        decode_nat(unit_net())
    with pytest.raises(DecodeError):
        decode_nat(encode_tuple([1, 2]))


def test_tuples():
    assert isomorphic(encode_tuple([3]), encode_nat(3))
    pair = encode_tuple([1, 2])
    assert sum(1 for lab in pair.labels.values() if lab is Label.RTENS) == 1
    with pytest.raises(ValueError):
        encode_tuple([])

def project(k, i):
    """Net splitting a k-tuple, erasing all but component i."""
    b = Builder()
    parts = b.split_cluster(b.premise(), k)
    for j, p in enumerate(parts):
        if j != i:
            erase(b, p)
    return b.conclude(parts[i])


@pytest.mark.parametrize("ns", [[1, 2], [0, 4, 2]])
def test_tuple_components_decode(ns):
    for i, n in enumerate(ns):
        got = normalize(apply(project(len(ns), i), encode_tuple(ns)))
        assert decode_nat(got.final) == n


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_erasure_gives_unit(n):
    t = normalize(apply(erasure_net(), encode_nat(n)))
    assert t.normal
    assert isomorphic(t.final, unit_net())


@pytest.mark.parametrize("n", [0, 1, 3, 6])
def test_duplication_gives_pair(n):
    t = normalize(apply(duplication_net(), encode_nat(n)))
    assert t.normal
    assert isomorphic(t.final, encode_tuple([n, n]))
    t = normalize(apply(duplication_net(3), encode_nat(n)))
    assert isomorphic(t.final, encode_tuple([n, n, n]))


def test_zero_needs_no_argument():
    assert decode_nat(normalize(compile_pr(Zero())).final) == 0
    assert run(Zero(), []).value == 0


@pytest.mark.parametrize("n", range(21))
def test_successor(n):
    assert run(Succ(), [n]).value == n + 1


def test_projection_and_identity_examples():
    assert run(Proj(3, 2), [7, 8, 9]).value == 8
    assert decode_nat(normalize(apply(compile_pr(Proj(2, 1)), encode_tuple([4, 9]))).final) == 4
    assert decode_nat(normalize(apply(wire_net(), encode_nat(5))).final) == 5


def test_apply_needs_a_premise():
    with pytest.raises(ValueError):
        apply(encode_nat(1), encode_nat(2))


def test_addition():
    assert run(ADD, [2, 3]).value == 5
    for n in range(11):
        assert run(ADD, [0, n]).value == n


def test_multiplication():
    r = run(CORPUS["mult"], [2, 3])
    assert r.value == 6
    assert r.trace.normal


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_agrees_with_evaluator(name):
    term = CORPUS[name]
    samples = {0: [()], 1: [(0,), (1,), (3,)], 2: [(0, 0), (1, 2), (2, 1)], 3: [(1, 2, 3)]}[term.arity]
    for args in samples:
        assert run(term, list(args)).value == eval_pr(term, list(args)), args


def test_mpostponed_computes_the_same_values():
    assert run(ADD, [1, 2], strategy=StrategyTag.MPOSTPONED).value == 3


def test_fuel_exhaustion_is_loud():
    with pytest.raises(FuelExhausted) as e:
        run(ADD, [2, 3], fuel=5)
    assert len(e.value.trace.steps) == 5


def test_compiled_nets_are_valid():
    for term in CORPUS.values():
        assert validate(compile_pr(term)).ok
        assert len(compile_pr(term).premises) == (1 if term.arity else 0)
    with pytest.raises(PRArityError):
        build_instance(Succ(), [])


def test_rec_copies_only_closed_boxes():
    copied = []

    def hook(net, box, tree):
        copied.append((box, len(net.boxes[box].aux)))

    for term, args in ((ADD, [2, 1]), (CORPUS["mult"], [2, 2]), (CORPUS["pred"], [3])):
        copied.clear()
        assert run(term, args, hook=hook).value == eval_pr(term, args)
        assert copied
        assert all(aux == 0 for _, aux in copied), copied


def test_successor_matcher_on_compiled_numeral_box():
    # a box holding a numeral, derelicted once, faces a one-leaf tree
    b = Builder()
    out = b.der(b.boxed([], lambda: numeral(b, 2)))
    net = b.conclude(out)
    tree = match_derelicting_tree(net, next(iter(net.boxes)))
    assert tree is not None and len(tree.der_leaves()) == 1

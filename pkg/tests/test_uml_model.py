"""Parser, validator, emitter, and analysis tests for the class-diagram subset."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modelbench.corpus import RequirementItem, RequirementsDoc
from modelbench.uml_model import (ClassModel, Classifier, Member, Param,
                                  Relation, UmlError, emit_plantuml,
                                  extract_terms, model_diff, parse_and_validate,
                                  parse_plantuml, split_identifier, stop_words,
                                  term_alignment, to_render_graph, validate_model)

PROMPT_EXAMPLE = """@startuml
package "gui" {
\tGame --> "1" Player_manager
\tGame --> "1" Display_manager

\tabstract Updatable

\tPlayers_layout --|> Updatable
\tPlayer_manager --|> Updatable
\tDisplay_manager --|> Updatable
\tCharacter --|> Updatable
\tInputBox --|> Updatable

\tabstract Gui_control

\tPlayers_layout --|> Gui_control
\tPlayer_manager --|> Gui_control
\tDisplay_manager --> "1" InputBox
\tDisplay_manager --> "1" Player_manager
\tDisplay_manager --> "1" Players_layout
\tPlayer_manager --> "1..*" Character
}

package "connection" {
\tNetwork --> "1" ConnectionManager
}

package "model" {
\tGame_state --> "1..*" Player
\tGame_state --> "*" Collectable
}

class Updatable {
\tvoid update()
}
@enduml"""


class TestParsePromptExample:
    def test_three_packages(self):
        model, _ = parse_plantuml(PROMPT_EXAMPLE)
        assert {p.name for p in model.packages} == {"gui", "connection", "model"}

    def test_abstract_classifiers_merged(self):
        model, _ = parse_plantuml(PROMPT_EXAMPLE)
        updatable = model.classifier("Updatable")
        assert updatable.kind == "abstract_class"
        assert [m.signature() for m in updatable.members] == ["+update() : void"]
        assert model.classifier("Gui_control").kind == "abstract_class"

    def test_generalization_edges(self):
        model, _ = parse_plantuml(PROMPT_EXAMPLE)
        gen = [r for r in model.relations if r.kind == "generalization"]
        assert len(gen) == 7
        assert Relation("Players_layout", "Updatable", "generalization") in gen

    def test_no_errors(self):
        _, report = parse_and_validate(PROMPT_EXAMPLE)
        assert report.ok, [v.message for v in report.errors]

    def test_auto_declared_endpoints_resolve(self):
        model, report = parse_plantuml(PROMPT_EXAMPLE)
        names = {c.name for c in model.classifiers}
        for rel in model.relations:
            assert rel.source in names and rel.target in names
        assert "auto-declared" in report.codes()


class TestParserEdges:
    def test_empty_diagram(self):
        model, report = parse_plantuml("@startuml\n@enduml")
        assert not model.classifiers and not model.relations
        assert not report.violations

    def test_trailing_content_flagged(self):
        _, report = parse_plantuml("@startuml\nclass A\n@enduml\nbye")
        assert "trailing-content" in report.codes()

    def test_missing_markers(self):
        _, report = parse_plantuml("class A")
        assert "missing-startuml" in {v.code for v in report.errors}

    def test_unparseable_line_recovers(self):
        text = "@startuml\nclass A {\n+id : int\n}\n%%% nonsense\nclass B\n@enduml"
        model, report = parse_plantuml(text)
        assert {c.name for c in model.classifiers} == {"A", "B"}
        bad = [v for v in report.errors if v.code == "unparseable-line"]
        assert bad and bad[0].line == 5

    def test_arbitrary_bytes_never_raise(self):
        rng = random.Random(99)
        for _ in range(50):
            junk = "".join(chr(rng.randrange(32, 0x250)) for _ in range(200))
            model, report = parse_plantuml(junk)
            assert report.violations is not None

    def test_comments_and_styling_discarded(self):
        text = ("@startuml\nskinparam monochrome true\n' a comment\n"
                "/' block\ncomment '/\nnote left: ignore me\ntitle Foo\n"
                "class A {\n+id : int\n}\n@enduml")
        model, report = parse_plantuml(text)
        assert report.ok
        assert {c.name for c in model.classifiers} == {"A"}

    def test_reversed_arrows_normalized(self):
        model, _ = parse_plantuml("@startuml\nA <|-- B\nC <-- D\n@enduml")
        assert Relation("B", "A", "generalization") in model.relations
        assert Relation("D", "C", "association") in model.relations

    def test_mirrored_aggregation_swaps_multiplicities(self):
        m1, _ = parse_plantuml('@startuml\nWhole "1" o-- "0..*" Part\n@enduml')
        m2, _ = parse_plantuml('@startuml\nPart "0..*" --o "1" Whole\n@enduml')
        assert m1.structurally_equal(m2)

    def test_enum_constants(self):
        model, report = parse_and_validate(
            "@startuml\nenum Color {\nRED\nGREEN\nBLUE\n}\n@enduml")
        color = model.classifier("Color")
        assert [m.name for m in color.members] == ["RED", "GREEN", "BLUE"]
        assert report.ok


class TestValidate:
    def test_placeholder_type_error(self):
        _, report = parse_and_validate(
            "@startuml\nclass A {\n+id : <Type>\n}\n@enduml")
        assert "placeholder-type" in {v.code for v in report.errors}

    def test_association_without_multiplicity_warns(self):
        _, report = parse_and_validate("@startuml\nA --> B\n@enduml")
        assert "missing-multiplicity" in {v.code for v in report.warnings}

    def test_one_sided_multiplicity_ok(self):
        _, report = parse_and_validate('@startuml\nA --> "1" B\n@enduml')
        assert "missing-multiplicity" not in report.codes()

    def test_invalid_multiplicity(self):
        model = ClassModel(
            classifiers=[Classifier("A"), Classifier("B")],
            relations=[Relation("A", "B", "association", source_mult="many")])
        report = validate_model(model)
        assert "invalid-multiplicity" in {v.code for v in report.errors}

    def test_unresolved_endpoint_on_constructed_model(self):
        model = ClassModel(classifiers=[Classifier("A")],
                           relations=[Relation("A", "Ghost", "association",
                                               target_mult="1")])
        report = validate_model(model)
        assert "unresolved-endpoint" in {v.code for v in report.errors}

    def test_duplicate_classifier_same_namespace(self):
        model = ClassModel(classifiers=[Classifier("A"), Classifier("A")])
        report = validate_model(model)
        assert "duplicate-classifier" in {v.code for v in report.errors}

    def test_empty_class_warns(self):
        _, report = parse_and_validate("@startuml\nclass Lonely\n@enduml")
        assert "empty-class" in {v.code for v in report.warnings}


class TestEmit:
    def test_empty_model(self):
        assert emit_plantuml(ClassModel()) == "@startuml\n@enduml"

    def test_single_class_format(self):
        model = ClassModel(classifiers=[
            Classifier("A", members=[Member("id", "attribute", "int")])])
        text = emit_plantuml(model)
        assert "class A" in text and "+id : int" in text

    def test_round_trip_idempotent_on_prompt_example(self):
        m1, _ = parse_plantuml(PROMPT_EXAMPLE)
        m2, _ = parse_plantuml(emit_plantuml(m1))
        assert m2.structurally_equal(m1)
        m3, _ = parse_plantuml(emit_plantuml(m2))
        assert m3.structurally_equal(m2)

    def test_refuses_invalid_model(self):
        model = ClassModel(classifiers=[
            Classifier("A", members=[Member("x", "attribute", "<Type>")])])
        with pytest.raises(UmlError):
            emit_plantuml(model)


# --- generated round-trip corpus ---------------------------------------------------

NAME_POOL = ["Account", "Billing", "Cart", "Device", "Engine", "Fleet",
             "Gateway", "Handler", "Invoice", "Job", "Kiosk", "Ledger",
             "Monitor", "Node", "Order", "Parser", "Queue", "Router",
             "Sensor", "Ticket", "User_profile", "ViewModel", "Worker",
             "InputBox", "Player_manager"]
TYPE_POOL = ["int", "String", "Date", "boolean", "float", "List<String>", "UUID"]
MULT_POOL = ["1", "*", "0..*", "1..*", "2..5"]
ARROWS = ["-->", "--|>", "..|>", "o--", "*--", "<|--", "<--"]


def random_diagram(rng: random.Random) -> str:
    names = rng.sample(NAME_POOL, rng.randint(2, 7))
    lines = ["@startuml"]
    if rng.random() < 0.3:
        lines.append("skinparam shadowing false")
    if rng.random() < 0.3:
        lines.append("' generated sample")
    use_package = rng.random() < 0.6
    indent = ""
    if use_package:
        lines.append(f'package "area{rng.randint(1, 3)}" {{')
        indent = "\t" if rng.random() < 0.5 else "  "
    for name in names:
        kind = rng.choice(["class", "class", "class", "abstract class",
                           "interface", "enum"])
        if kind == "enum":
            lines.append(f"{indent}enum {name} {{")
            for i in range(rng.randint(1, 3)):
                lines.append(f"{indent}  VALUE_{i}")
            lines.append(f"{indent}}}")
            continue
        n_members = rng.randint(0, 3)
        if n_members == 0:
            lines.append(f"{indent}{kind} {name}")
            continue
        lines.append(f"{indent}{kind} {name} {{")
        for i in range(n_members):
            t = rng.choice(TYPE_POOL)
            vis = rng.choice(["+", "#", "-", ""])
            if rng.random() < 0.4:
                style = rng.random()
                if style < 0.5:
                    lines.append(f"{indent}  {vis}run_{i}() : {t}")
                else:
                    lines.append(f"{indent}  void act_{i}(count : int)")
            else:
                lines.append(f"{indent}  {vis}field_{i} : {t}")
        lines.append(f"{indent}}}")
    if use_package:
        lines.append("}")
    for _ in range(rng.randint(0, 5)):
        a, b = rng.sample(names, 2)
        arrow = rng.choice(ARROWS)
        sm = f'"{rng.choice(MULT_POOL)}" ' if rng.random() < 0.4 else ""
        tm = f'"{rng.choice(MULT_POOL)}" ' if rng.random() < 0.4 else ""
        label = f" : link{rng.randint(0, 9)}" if rng.random() < 0.3 else ""
        lines.append(f"{a} {sm}{arrow} {tm}{b}{label}")
    lines.append("@enduml")
    return "\n".join(lines)


class TestGeneratedRoundTrip:
    def test_two_hundred_case_corpus(self):
        rng = random.Random(2024)
        for case in range(200):
            text = random_diagram(rng)
            m1, rep1 = parse_plantuml(text)
            assert not rep1.errors, (case, text, [v.message for v in rep1.errors])
            emitted = emit_plantuml(m1)
            m2, rep2 = parse_plantuml(emitted)
            assert not rep2.errors, (case, emitted)
            assert m2.structurally_equal(m1), (case, text, emitted)

    def test_placeholder_always_flagged(self):
        rng = random.Random(7)
        for _ in range(25):
            text = random_diagram(rng).replace(
                "@enduml", "class Bad {\n+oops : <Type>\n}\n@enduml")
            _, report = parse_and_validate(text)
            assert "placeholder-type" in {v.code for v in report.errors}

    def test_trailing_content_always_flagged(self):
        rng = random.Random(8)
        for _ in range(25):
            text = random_diagram(rng) + "\nstray epilogue"
            _, report = parse_plantuml(text)
            assert "trailing-content" in report.codes()


# --- hypothesis model strategy ------------------------------------------------------

@st.composite
def class_models(draw) -> ClassModel:
    names = draw(st.lists(st.sampled_from(NAME_POOL), unique=True,
                          min_size=1, max_size=6))
    packages = [None, "alpha", "beta"]
    classifiers = []
    for name in names:
        kind = draw(st.sampled_from(["class", "abstract_class", "interface", "enum"]))
        members = []
        if kind == "enum":
            for i in range(draw(st.integers(0, 3))):
                members.append(Member(f"V{i}", "attribute", ""))
        else:
            for i in range(draw(st.integers(0, 3))):
                if draw(st.booleans()):
                    params = tuple(
                        Param(type=draw(st.sampled_from(TYPE_POOL)), name=f"p{j}")
                        for j in range(draw(st.integers(0, 2))))
                    members.append(Member(f"m{i}", "method",
                                          draw(st.sampled_from(TYPE_POOL)),
                                          draw(st.sampled_from("+#-")), params))
                else:
                    members.append(Member(f"a{i}", "attribute",
                                          draw(st.sampled_from(TYPE_POOL)),
                                          draw(st.sampled_from("+#-"))))
        classifiers.append(Classifier(name, kind, members,
                                      draw(st.sampled_from(packages))))
    relations = []
    if len(names) >= 2:
        for _ in range(draw(st.integers(0, 4))):
            pair = draw(st.lists(st.sampled_from(names), min_size=2, max_size=2,
                                 unique=True))
            relations.append(Relation(
                pair[0], pair[1],
                draw(st.sampled_from(["association", "generalization",
                                      "realization", "aggregation", "composition"])),
                draw(st.one_of(st.none(), st.sampled_from(MULT_POOL))),
                draw(st.one_of(st.none(), st.sampled_from(MULT_POOL))),
                draw(st.one_of(st.none(), st.just("owns")))))
    return ClassModel(classifiers=classifiers, relations=relations)


class TestModelProperties:
    @given(class_models())
    @settings(max_examples=80, deadline=None)
    def test_round_trip(self, model):
        reparsed, report = parse_plantuml(emit_plantuml(model))
        assert not report.errors
        assert reparsed.structurally_equal(model)

    @given(class_models())
    @settings(max_examples=40, deadline=None)
    def test_terms_stable_under_round_trip(self, model):
        reparsed, _ = parse_plantuml(emit_plantuml(model))
        assert extract_terms(reparsed) == extract_terms(model)

    @given(class_models())
    @settings(max_examples=40, deadline=None)
    def test_self_diff_empty(self, model):
        assert model_diff(model, model).is_empty()

    @given(class_models())
    @settings(max_examples=40, deadline=None)
    def test_render_graph_lossless_counts(self, model):
        graph = to_render_graph(model)
        assert len(graph.nodes) == len(model.classifiers)
        assert len(graph.edges) == len(model.relations)


# --- terms / alignment / diff / render -----------------------------------------------

def doc_with(text: str) -> RequirementsDoc:
    return RequirementsDoc(id="d", domain="x", kind="shall",
                           items=(RequirementItem("R1", text),))


class TestTerms:
    def test_underscore_split(self):
        model, _ = parse_plantuml("@startuml\nclass Player_manager\n@enduml")
        assert set(extract_terms(model)) == {"player", "manager"}

    def test_camel_case_split(self):
        model, _ = parse_plantuml(
            "@startuml\nclass InputBox {\n+update() : void\n}\n@enduml")
        assert set(extract_terms(model)) == {"input", "box", "update"}

    def test_empty_model(self):
        assert extract_terms(ClassModel()) == {}

    def test_split_identifier(self):
        assert split_identifier("HTTPServerNode") == ["http", "server", "node"]

    def test_stop_word_list_has_fifty_entries(self):
        assert len(stop_words()) == 50


class TestTermAlignment:
    def test_subset_is_one(self):
        model, _ = parse_plantuml("@startuml\nclass Player\n@enduml")
        assert term_alignment(model, doc_with("the player wins")) == 1.0

    def test_disjoint_is_zero(self):
        model, _ = parse_plantuml("@startuml\nclass Reactor\n@enduml")
        assert term_alignment(model, doc_with("the player wins")) == 0.0

    def test_half_overlap(self):
        model, _ = parse_plantuml("@startuml\nclass Player_manager\n@enduml")
        assert term_alignment(model, doc_with("the player shall win")) == 0.5

    def test_empty_model_is_zero(self):
        assert term_alignment(ClassModel(), doc_with("anything")) == 0.0


class TestDiff:
    def test_identity(self):
        model, _ = parse_plantuml(PROMPT_EXAMPLE)
        assert model_diff(model, model).is_empty()

    def test_extra_class_listed(self):
        a, _ = parse_plantuml("@startuml\nclass A\n@enduml")
        b, _ = parse_plantuml("@startuml\nclass A\nclass B\n@enduml")
        d = model_diff(a, b)
        assert d.classifiers_only_in_b == ("B",)
        assert d.classifiers_only_in_a == ()

    def test_relation_delta(self):
        a, _ = parse_plantuml('@startuml\nGame --> "1" Player_manager\n@enduml')
        b, _ = parse_plantuml("@startuml\nclass Game\nclass Player_manager\n@enduml")
        d = model_diff(a, b)
        assert len(d.relations_only_in_a) == 1
        assert d.relations_only_in_b == ()

    def test_symmetry(self):
        a, _ = parse_plantuml("@startuml\nclass A {\n+x : int\n}\nA --> B\n@enduml")
        b, _ = parse_plantuml("@startuml\nclass A {\n+y : int\n}\nclass C\n@enduml")
        dab, dba = model_diff(a, b), model_diff(b, a)
        assert dab.classifiers_only_in_a == dba.classifiers_only_in_b
        assert dab.relations_only_in_a == dba.relations_only_in_b
        for name, delta in dab.member_deltas.items():
            assert dba.member_deltas[name]["only_in_b"] == delta["only_in_a"]


class TestRenderGraph:
    def test_empty(self):
        g = to_render_graph(ClassModel())
        assert g.nodes == () and g.edges == ()

    def test_prompt_example_projection(self):
        model, _ = parse_plantuml(PROMPT_EXAMPLE)
        g = to_render_graph(model)
        assert len(g.nodes) == len(model.classifiers)
        kinds = {e.kind for e in g.edges}
        assert "generalization" in kinds

    def test_single_class(self):
        model, _ = parse_plantuml("@startuml\nclass A\n@enduml")
        g = to_render_graph(model)
        assert len(g.nodes) == 1 and len(g.edges) == 0
        assert g.to_json()["nodes"][0]["id"] == "A"

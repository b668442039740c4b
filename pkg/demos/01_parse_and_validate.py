"""Walkthrough: parse a PlantUML class diagram, inspect diagnostics, and
round-trip it through the canonical emitter.

Run with: python demos/01_parse_and_validate.py
"""

from modelbench.uml_model import (emit_plantuml, extract_terms, model_diff,
                                  parse_and_validate, parse_plantuml,
                                  to_render_graph)

DIAGRAM = """@startuml
package "shop" {
  class Order {
    +id : int
    +total() : float
  }
  class Customer {
    +name : String
  }
  enum Status {
    OPEN
    SHIPPED
  }
  Customer --> "0..*" Order : places
  Order --> "1" Status
}
@enduml"""

# Parsing never raises: malformed lines become diagnostics and parsing
# continues, so one bad line cannot void a whole candidate diagram.
model, report = parse_and_validate(DIAGRAM)
print(f"classifiers: {[c.name for c in model.classifiers]}")
print(f"relations:   {len(model.relations)}")
print(f"errors:      {[v.code for v in report.errors]}")
print(f"warnings:    {[v.code for v in report.warnings]}")

# The validator catches what the generation constraints forbid, e.g. the
# literal <Type> placeholder instead of a concrete type:
bad = DIAGRAM.replace("+name : String", "+name : <Type>")
_, bad_report = parse_and_validate(bad)
print(f"\nplaceholder diagnostic: "
      f"{[v.message for v in bad_report.errors if v.code == 'placeholder-type']}")

# Emission is canonical (sorted packages/classifiers/relations) and
# round-trips: parse(emit(parse(X))) is structurally equal to parse(X).
canonical = emit_plantuml(model)
print(f"\ncanonical form:\n{canonical}")
reparsed, _ = parse_plantuml(canonical)
print(f"\nround-trip structurally equal: {reparsed.structurally_equal(model)}")
print(f"self-diff empty: {model_diff(model, reparsed).is_empty()}")

# Downstream consumers: lowercase terminology tokens (for alignment
# signals) and a lossless node/edge projection (for the browser renderer).
print(f"\nterms: {sorted(extract_terms(model))}")
graph = to_render_graph(model)
print(f"render graph: {len(graph.nodes)} nodes, {len(graph.edges)} edges")

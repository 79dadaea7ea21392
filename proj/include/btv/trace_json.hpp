#pragma once

#include <span>
#include <vector>

#include "json.hpp"

#include "btv/checker.hpp"
#include "btv/semantics.hpp"

namespace btv {

/// {"nodes": {name: {ticked, result, analyzing_subtree}}, "env": {name: value}}
nlohmann::json state_to_json(const Model& model, const MachineState& state);

/// Counterexample step list. Each step carries the event, its bound node and
/// child, the leaf outcome if any, the changes it made, and the full state
/// after it.
nlohmann::json steps_to_json(const Model& model, std::span<const TraceStep> steps);

/// {status, states_explored, transitions, violated_invariant, detail,
///  failing_event, counterexample, stats, model}
nlohmann::json verdict_to_json(const Model& model, const Verdict& verdict);

/// A trace document as written by `simulate --trace-out`: same layout as a
/// verdict, with status "TRACE".
nlohmann::json trace_document(const Model& model, std::span<const TraceStep> steps);

/// Reads the "counterexample" array of a verdict or trace document. Throws
/// TraceError when the document does not fit the model (unknown node names,
/// malformed steps, or a model digest that differs).
std::vector<Event> trace_from_json(const Model& model, const nlohmann::json& doc);

}  // namespace btv

#pragma once

#include <span>
#include <string>

#include "das/routing.hpp"

namespace das {

// Renders the joint acceptance-and-routing model as a maximization MIP in
// MPS fixed format. Variables: X_<i>_<j> (arc binaries, stop ids), Y_<rid>
// (acceptance binaries), T_<h> (continuous departure times bounded by the
// windows). Rows: per-request pickup/dropoff coverage, flow conservation,
// per-segment time chaining. Subtour rows are not emitted (exponentially
// many); the cut loop adds violated ones on demand. Entries of `fixed`
// become FX bounds on the Y columns.
std::string export_mps(const Network& network, std::span<const Request> requests,
                       const FixedDecisions& fixed = {});

struct CutLoopStats {
  int rounds = 0;
  int cuts_added = 0;
};

// External solver contract: the command is invoked as
//   <command> <mps path> <solution path>
// and must write `<variable name> <value>` lines for every variable. The
// loop re-solves with appended subtour rows until the incumbent is cycle
// free or max_rounds is exhausted.
//
// Throws SolverError on subprocess failure (with captured diagnostics) and
// CutLoopExhausted when max_rounds is reached with subtours remaining.
FullInfoSolution subtour_cut_loop(const Network& network,
                                  std::span<const Request> requests,
                                  const std::string& solver_command,
                                  int max_rounds, const std::string& work_dir,
                                  const FixedDecisions& fixed = {},
                                  CutLoopStats* stats = nullptr);

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CutLoopExhausted : public std::runtime_error {
 public:
  CutLoopExhausted(const std::string& msg, FullInfoSolution incumbent)
      : std::runtime_error(msg), last_incumbent(std::move(incumbent)) {}
  FullInfoSolution last_incumbent;  // still contains a subtour
};

}  // namespace das

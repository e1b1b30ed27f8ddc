#pragma once

#include <iosfwd>
#include <string>

#include "das/core.hpp"

namespace das {

// Instance document schema (all numbers decimal, times in seconds, costs in
// currency units):
//   {
//     "network": {
//       "stops":   [{"id", "x_m", "y_m", "kind", "segment"}, ...],
//       "arcs":    [{"from", "to", "cost", "time_s"}, ...],
//       "windows": [{"h", "a_s", "b_s"}, ...]
//     },
//     "requests": [{"id", "pickup", "dropoff", "utility", "request_time_s"}, ...],
//     "horizon_end_s": <number>,
//     "demand_model": { ... }   // optional generator block
//   }

// Throws ParseError on malformed documents (naming the first offending
// field) and ValidationError when the parsed instance violates invariants.
Instance load_instance(const std::string& text);
Instance load_instance_file(const std::string& path);

// Serialization is the identity under load on well-formed instances.
std::string save_instance(const Instance& instance);
void save_instance_file(const Instance& instance, const std::string& path);

Json instance_to_json(const Instance& instance);
Instance instance_from_json(const Json& doc);

// Structural equality (ids, topology, numbers; ignores nothing).
bool instances_equal(const Instance& a, const Instance& b);

std::string read_text_file(const std::string& path);   // throws IoError
void write_text_file(const std::string& path, const std::string& text);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace das

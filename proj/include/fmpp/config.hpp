#pragma once

#include <string>

#include "fmpp/rltest.hpp"

namespace fmpp {

// JSON configuration shared by the C API and the CLI. All fields optional;
// defaults match LocalTestConfig. Fields irrelevant to an operation (e.g. q
// for a plain curve computation) are accepted and ignored there.
//
// {
//   "n": 2, "testfun": {"kind": "lp", "p": 2}, "edge": "isotropic",
//   "r_max": 0.25, "intensity": "kernel", "bandwidth": "cvl",
//   "q": 39, "alpha": 0.1, "resampling": "with_replacement",
//   "holm_bonferroni": false, "one_sided": false, "seed": 0, "threads": 1,
//   "mark_sets": {"own": {...}, "others": [{...}]}
// }
//
// bandwidth: the string "cvl" or a positive number.
// edge: "isotropic" | "translation" | "none" (aliases "iso", "trans").
// mark set predicate: {"kind": "all"} | {"kind": "mean_ge", "threshold": x} |
//   {"kind": "sup_ge", "t0": a, "t1": b, "threshold": x}.
LocalTestConfig parse_local_test_config(const std::string& json_text);

// Canonical JSON echo of a configuration (round-trips through the parser).
std::string local_test_config_json(const LocalTestConfig& config);

const char* edge_name(EdgeCorrection edge);
EdgeCorrection parse_edge(const std::string& name);

}  // namespace fmpp

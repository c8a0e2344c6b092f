#pragma once

#include <string>

#include "fmpp/pattern.hpp"

namespace fmpp {

// Pattern files come in pairs: a CSV with one row per point and a JSON
// sidecar with the window and the shared time grid.
//
//   CSV    header `x,y,f_0,...,f_{T-1}`, one row per point
//   sidecar {"window": {"x_min": ..}, "time_grid": [..], "covariates": {..}?}
//
// Numbers are written with 17 significant digits so write-then-read
// reproduces coordinates and mark samples bit-exactly.

std::string pattern_to_csv(const MarkedPointPattern& pattern);
std::string pattern_sidecar_json(const MarkedPointPattern& pattern,
                                 const std::string& covariates_json = "");

void write_pattern(const MarkedPointPattern& pattern, const std::string& csv_path,
                   const std::string& sidecar_path,
                   const std::string& covariates_json = "");

MarkedPointPattern read_pattern(const std::string& csv_path,
                                const std::string& sidecar_path);

MarkedPointPattern pattern_from_csv(const std::string& csv_text,
                                    const std::string& sidecar_text);

// Shared low-level helpers (also used by the catalog reader and exporters).
std::string format_double(double v);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace fmpp

#pragma once

#include <optional>
#include <string>

#include "fmpp/pattern.hpp"

namespace fmpp {

// Event-catalog ingestion: an events CSV (id,x,y[,time][,magnitude]), a
// waveform matrix CSV (id followed by equal-length sample columns) and a
// sidecar JSON with the window and the waveform time grid. Every event id
// must have exactly one waveform row.
struct IngestedCatalog {
  MarkedPointPattern pattern;
  std::string covariates_json;  // pass-through columns keyed by event id order
};

// resample_to: optional target grid length; waveforms are linearly
// interpolated onto that many equispaced samples over the same span
// (endpoint values are preserved exactly).
IngestedCatalog ingest_catalog(const std::string& events_csv_text,
                               const std::string& waveforms_csv_text,
                               const std::string& sidecar_json_text,
                               std::optional<int> resample_to = std::nullopt);

IngestedCatalog ingest_catalog_files(const std::string& events_path,
                                     const std::string& waveforms_path,
                                     const std::string& sidecar_path,
                                     std::optional<int> resample_to = std::nullopt);

}  // namespace fmpp

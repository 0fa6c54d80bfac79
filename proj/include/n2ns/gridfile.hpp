#pragma once

#include <string>

#include "n2ns/section.hpp"

namespace n2ns {

enum class GridDtype { f32, f64 };

// Writes `path` (structured-text header) plus `path + ".bin"` (little-endian
// row-major payload). The header carries shape, dtype, axis metadata, a
// CRC-32 of the payload, and one provenance line per pipeline stage.
void write_grid(const std::string& path, const SeismicSection& section,
                GridDtype dtype = GridDtype::f64);

// Validates payload length and checksum; throws on mismatch.
SeismicSection read_grid(const std::string& path);

// Comma-separated numeric rows; a leading non-numeric row is treated as a header.
SeismicSection read_csv(const std::string& path);

SeismicSection load_seismic(const std::string& path);  // dispatch on extension

void append_provenance(SeismicSection& section, const std::string& stage);

}  // namespace n2ns

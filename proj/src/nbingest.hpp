#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "image.hpp"

namespace chartsynth::nbingest {

struct NotebookFilters {
  int min_lines = 3;  // below this the previous code cell is prepended
  std::size_t min_code_chars = 1;
  std::size_t max_code_chars = 20000;
  int min_image_side = 16;
  int max_image_side = 4096;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct NotebookPair {
  RasterImage image;
  std::string code;
  std::string notebook_path;  // relative to the scanned directory, '/' separated
  std::size_t cell_index = 0;
  std::size_t output_index = 0;  // position among the cell's PNG outputs
};

struct IngestStats {
  std::size_t files_scanned = 0;
  std::size_t notebooks = 0;
  std::size_t non_notebook = 0;
  std::size_t unparseable = 0;
  std::size_t png_outputs = 0;
  std::size_t corrupt = 0;   // bad base64 or undecodable PNG
  std::size_t filtered = 0;  // code or image outside the filter bounds
};

struct IngestResult {
  std::vector<NotebookPair> pairs;  // sorted by (notebook_path, cell_index, output_index)
  IngestStats stats;
};

/// Strict RFC 4648 base64; ASCII whitespace is ignored, anything else invalid
/// throws ParseError.
std::vector<std::uint8_t> decode_base64(std::string_view text);

/// Pairs of one notebook document. `stats` is updated in place.
std::vector<NotebookPair> extract_pairs(std::string_view notebook_json, const std::string& notebook_path,
                                        const NotebookFilters& filters, IngestStats& stats);

/// Recursively scans `dir`; files not ending in .ipynb count as non-notebook.
/// Throws IoError if `dir` is not a readable directory.
IngestResult ingest_notebooks(const std::filesystem::path& dir, const NotebookFilters& filters = {});

}  // namespace chartsynth::nbingest

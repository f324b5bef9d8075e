#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chainorder/training.hpp"
#include "chainorder/types.hpp"

namespace chainorder {

// "%.17g": enough digits for any double to round-trip.
std::string format_double(double v);

// Dataset CSV: a header line `dim=<p>,kind=<continuous|binary>,n=<count>`,
// then one instance per line as comma-separated decimals.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

// Index files (truth sidecars, recovered orders): optional `# key=value`
// comment lines followed by one zero-based index per line.
struct IndexFile {
  std::map<std::string, std::string> header;
  std::vector<std::size_t> indices;
};

void write_index_file(const std::filesystem::path& path, std::span<const std::size_t> indices,
                      const std::vector<std::pair<std::string, std::string>>& header = {});
IndexFile read_index_file(const std::filesystem::path& path);

// `step,log_likelihood,grad_norm` with one row per training step.
void write_history_csv(const TrainHistory& history, const std::filesystem::path& path);
TrainHistory read_history_csv(const std::filesystem::path& path);

}  // namespace chainorder

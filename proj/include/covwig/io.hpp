#pragma once

// Matrix and truth persistence.
//
// Binary matrix layout (all little-endian):
//   bytes 0..7   magic "SCWMAT01"
//   bytes 8..11  rows (u32)
//   bytes 12..15 cols (u32)
//   then rows * cols IEEE-754 binary64 values, row-major.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "covwig/sampling.hpp"
#include "covwig/verify.hpp"

namespace covwig {

inline constexpr char kMatrixMagic[8] = {'S', 'C', 'W', 'M', 'A', 'T', '0', '1'};

void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_binary(const std::filesystem::path& path);

/// Comma-separated rows, 17 significant digits (round-trips exactly).
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

nlohmann::json to_json(const SparseSignal& u);
SparseSignal signal_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScTruth& truth);
nlohmann::json to_json(const WigTruth& truth);

/// One compact JSON object per line, in the given order.
void write_reports_jsonl(const std::filesystem::path& path, const std::vector<TestReport>& reports);
std::string reports_jsonl(const std::vector<TestReport>& reports);

/// Columns: name,statistic,threshold,pass,trials,seed.
void write_summary_csv(const std::filesystem::path& path, const std::vector<TestReport>& reports);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace covwig

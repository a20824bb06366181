#include "covwig/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "covwig/errors.hpp"

namespace covwig {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary matrix I/O assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw IoError("matrix file: truncated header");
  return static_cast<std::uint32_t>(bytes[0]) | static_cast<std::uint32_t>(bytes[1]) << 8 |
         static_cast<std::uint32_t>(bytes[2]) << 16 | static_cast<std::uint32_t>(bytes[3]) << 24;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, std::ios::in | mode);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

void write_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
  if (m.rows() > UINT32_MAX || m.cols() > UINT32_MAX) throw IoError("matrix too large to serialize");
  std::ofstream out = open_out(path, std::ios::binary);
  out.write(kMatrixMagic, sizeof kMatrixMagic);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  out.write(reinterpret_cast<const char*>(rm.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rm.size())));
  if (!out) throw IoError("write failed: " + path.string());
}

Matrix read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMatrixMagic, 8) != 0) {
    throw IoError("not a matrix file (bad magic): " + path.string());
  }
  const std::uint32_t rows = get_u32(in);
  const std::uint32_t cols = get_u32(in);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  const auto bytes = static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rm.size()));
  if (!in.read(reinterpret_cast<char*>(rm.data()), bytes)) {
    throw IoError("matrix file: truncated payload: " + path.string());
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IoError("matrix file: trailing bytes: " + path.string());
  }
  return rm;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IoError("csv: bad number '" + cell + "' in " + path.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError("csv: ragged rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

nlohmann::json to_json(const SparseSignal& u) {
  return {{"d", u.d}, {"k", u.k()}, {"support", u.support}, {"signs", u.signs}};
}

SparseSignal signal_from_json(const nlohmann::json& j) {
  SparseSignal u;
  try {
    u.d = j.at("d").get<int>();
    u.support = j.at("support").get<std::vector<int>>();
    u.signs = j.at("signs").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("signal json: ") + e.what());
  }
  if (u.support.size() != u.signs.size()) throw IoError("signal json: support/signs length mismatch");
  return u;
}

nlohmann::json to_json(const ScTruth& truth) {
  return {{"model", "sc"},
          {"theta", truth.theta},
          {"u", to_json(truth.u)},
          {"g", std::vector<double>(truth.g.data(), truth.g.data() + truth.g.size())}};
}

nlohmann::json to_json(const WigTruth& truth) {
  return {{"model", "wig"}, {"lambda", truth.lambda}, {"u", to_json(truth.u)}};
}

std::string reports_jsonl(const std::vector<TestReport>& reports) {
  std::string out;
  for (const TestReport& r : reports) {
    out += r.to_json().dump();
    out += '\n';
  }
  return out;
}

void write_reports_jsonl(const std::filesystem::path& path, const std::vector<TestReport>& reports) {
  write_text(path, reports_jsonl(reports));
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<TestReport>& reports) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "name,statistic,threshold,pass,trials,seed\n";
  for (const TestReport& r : reports) {
    out << r.name << ',' << r.statistic << ',' << r.threshold << ',' << (r.pass ? 1 : 0) << ','
        << r.trials << ',' << r.seed << '\n';
  }
  write_text(path, out.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace covwig

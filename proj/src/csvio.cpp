#include "qe/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qe {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open for reading: " + path.string());
  return in;
}

[[noreturn]] void bad_line(const std::filesystem::path& path, std::size_t line,
                           const std::string& what) {
  throw config_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const std::filesystem::path& path,
                    std::size_t line) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    bad_line(path, line, "not a number: '" + text + "'");
  return value;
}

std::uint64_t parse_u64(const std::string& text,
                        const std::filesystem::path& path, std::size_t line,
                        int base = 10) {
  char* end = nullptr;
  const std::uint64_t value = std::strtoull(text.c_str(), &end, base);
  if (end == text.c_str() || *end != '\0')
    bad_line(path, line, "not an unsigned integer: '" + text + "'");
  return value;
}

}  // namespace

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string hex16(std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fnv1a64(buffer.str());
}

void write_pattern_csv(const std::filesystem::path& path,
                       const Pattern& pattern) {
  std::ofstream out = open_for_write(path);
  out << "x_m,density\n";
  for (std::size_t i = 0; i < pattern.x_grid.size(); ++i)
    out << format_g17(pattern.x_grid[i]) << ','
        << format_g17(pattern.density[i]) << '\n';
}

Pattern read_pattern_csv(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  Pattern pattern;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "x_m,density") bad_line(path, 1, "bad pattern header");
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 2) bad_line(path, line_no, "expected two fields");
    pattern.x_grid.push_back(parse_double(fields[0], path, line_no));
    pattern.density.push_back(parse_double(fields[1], path, line_no));
  }
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < pattern.x_grid.size(); ++i)
    area += 0.5 * (pattern.density[i] + pattern.density[i + 1]) *
            (pattern.x_grid[i + 1] - pattern.x_grid[i]);
  pattern.normalization = area;
  return pattern;
}

void write_events_csv(const std::filesystem::path& path,
                      const std::vector<DetectionEvent>& events) {
  std::ofstream out = open_for_write(path);
  out << "timestamp_s,detector,value,basis\n";
  for (const DetectionEvent& event : events) {
    out << format_g17(event.timestamp) << ','
        << (event.detector == DetectorId::screen_a ? "screen_a" : "pol_b")
        << ',' << event.value << ','
        << (event.analyzer ? event.analyzer->label() : "none") << '\n';
  }
}

std::vector<DetectionEvent> read_events_csv(
    const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  std::vector<DetectionEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "timestamp_s,detector,value,basis")
        bad_line(path, 1, "bad events header");
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 4) bad_line(path, line_no, "expected four fields");
    DetectionEvent event;
    event.timestamp = parse_double(fields[0], path, line_no);
    if (fields[1] == "screen_a")
      event.detector = DetectorId::screen_a;
    else if (fields[1] == "pol_b")
      event.detector = DetectorId::pol_b;
    else
      bad_line(path, line_no, "unknown detector: '" + fields[1] + "'");
    event.value = static_cast<int>(parse_double(fields[2], path, line_no));
    if (fields[3] != "none") {
      try {
        event.analyzer = PolarizationBasis::parse(fields[3]);
      } catch (const config_error& err) {
        bad_line(path, line_no, err.what());
      }
    }
    events.push_back(event);
  }
  return events;
}

void write_ledger_csv(const std::filesystem::path& path, const Ledger& ledger) {
  std::ofstream out = open_for_write(path);
  char header[80];
  std::snprintf(header, sizeof(header), "# seed=%llu config_hash=%016llx",
                static_cast<unsigned long long>(ledger.seed()),
                static_cast<unsigned long long>(ledger.config_hash()));
  out << header << '\n';
  out << "pair_id,a_bin,b_basis,b_outcome\n";
  for (const LedgerRecord& record : ledger.records()) {
    out << record.pair_id << ',' << record.a_position_bin << ','
        << record.b_basis.label() << ',' << outcome_label(record.b_outcome)
        << '\n';
  }
}

Ledger read_ledger_csv(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) bad_line(path, 1, "missing provenance header");
  unsigned long long seed = 0;
  unsigned long long hash = 0;
  if (std::sscanf(line.c_str(), "# seed=%llu config_hash=%llx", &seed, &hash) !=
      2)
    bad_line(path, 1, "bad provenance header: '" + line + "'");

  Ledger ledger(seed, hash);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 2) {
      if (line != "pair_id,a_bin,b_basis,b_outcome")
        bad_line(path, 2, "bad ledger header");
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 4) bad_line(path, line_no, "expected four fields");
    LedgerRecord record;
    record.pair_id = parse_u64(fields[0], path, line_no);
    record.a_position_bin =
        static_cast<int>(parse_u64(fields[1], path, line_no));
    try {
      record.b_basis = PolarizationBasis::parse(fields[2]);
      record.b_outcome = parse_outcome(fields[3]);
    } catch (const config_error& err) {
      bad_line(path, line_no, err.what());
    }
    ledger.append(record);
  }
  return ledger;
}

}  // namespace qe

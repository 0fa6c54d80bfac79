#include "n2ns/gridfile.hpp"

#include <zlib.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace n2ns {

namespace {

constexpr const char* kMagic = "n2ns-grid";
constexpr int kFormatVersion = 1;

uint32_t payload_crc(const std::vector<char>& bytes) {
  return static_cast<uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
              static_cast<uInt>(bytes.size())));
}

std::vector<char> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f.seekg(0, std::ios::end);
  std::vector<char> bytes(static_cast<size_t>(f.tellg()));
  f.seekg(0);
  f.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  return bytes;
}

}  // namespace

void append_provenance(SeismicSection& section, const std::string& stage) {
  if (!section.provenance.empty()) section.provenance += '\n';
  section.provenance += stage;
}

void write_grid(const std::string& path, const SeismicSection& section,
                GridDtype dtype) {
  section.validate();
  const std::string payload_path = path + ".bin";

  std::vector<char> payload;
  if (dtype == GridDtype::f64) {
    payload.resize(section.data.size() * sizeof(double));
    std::memcpy(payload.data(), section.data.data(), payload.size());
  } else {
    std::vector<float> f32(section.data.begin(), section.data.end());
    payload.resize(f32.size() * sizeof(float));
    std::memcpy(payload.data(), f32.data(), payload.size());
  }

  {
    std::ofstream f(payload_path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + payload_path);
    f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  }

  std::ofstream h(path, std::ios::trunc);
  if (!h) throw std::runtime_error("cannot write " + path);
  h << kMagic << ' ' << kFormatVersion << '\n';
  h << "m " << section.m << '\n';
  h << "n " << section.n << '\n';
  h << "dtype " << (dtype == GridDtype::f64 ? "f64" : "f32") << '\n';
  h << "sample_interval " << std::hexfloat << section.sample_interval
    << std::defaultfloat << '\n';
  h << "axis_unit " << (section.axis_unit == AxisUnit::time ? "time" : "depth") << '\n';
  h << "checksum " << payload_crc(payload) << '\n';
  h << "payload " << std::filesystem::path(payload_path).filename().string() << '\n';
  std::istringstream prov(section.provenance);
  for (std::string line; std::getline(prov, line);)
    if (!line.empty()) h << "provenance " << line << '\n';
}

SeismicSection read_grid(const std::string& path) {
  std::ifstream h(path);
  if (!h) throw std::runtime_error("cannot open " + path);
  std::string magic;
  int version = 0;
  h >> magic >> version;
  if (magic != kMagic || version != kFormatVersion)
    throw std::runtime_error(path + ": not a grid header");
  h.ignore();

  SeismicSection s;
  std::string dtype, payload_name;
  uint32_t checksum = 0;
  for (std::string line; std::getline(h, line);) {
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string value = (sp == std::string::npos) ? "" : line.substr(sp + 1);
    if (key == "m") s.m = std::stoi(value);
    else if (key == "n") s.n = std::stoi(value);
    else if (key == "dtype") dtype = value;
    else if (key == "sample_interval") s.sample_interval = std::strtod(value.c_str(), nullptr);
    else if (key == "axis_unit") s.axis_unit = (value == "depth") ? AxisUnit::depth : AxisUnit::time;
    else if (key == "checksum") checksum = static_cast<uint32_t>(std::stoul(value));
    else if (key == "payload") payload_name = value;
    else if (key == "provenance") append_provenance(s, value);
    else throw std::runtime_error(path + ": unknown header key '" + key + "'");
  }
  if (dtype != "f32" && dtype != "f64")
    throw std::runtime_error(path + ": bad dtype '" + dtype + "'");

  const auto payload_path = std::filesystem::path(path).parent_path() / payload_name;
  const std::vector<char> payload = read_file_bytes(payload_path.string());
  const size_t cells = static_cast<size_t>(s.m) * s.n;
  const size_t expect = cells * (dtype == "f64" ? sizeof(double) : sizeof(float));
  if (payload.size() != expect)
    throw std::runtime_error(path + ": payload length mismatch");
  if (payload_crc(payload) != checksum)
    throw std::runtime_error(path + ": payload checksum mismatch");

  s.data.resize(cells);
  if (dtype == "f64") {
    std::memcpy(s.data.data(), payload.data(), payload.size());
  } else {
    std::vector<float> f32(cells);
    std::memcpy(f32.data(), payload.data(), payload.size());
    for (size_t i = 0; i < cells; ++i) s.data[i] = f32[i];
  }
  s.validate();
  return s;
}

SeismicSection read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  bool first = true;
  for (std::string line; std::getline(f, line);) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    bool numeric = true;
    for (std::string cell; std::getline(ss, cell, ',');) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      while (end && *end == ' ') ++end;
      if (end == cell.c_str() || (end && *end != '\0')) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw std::runtime_error(path + ": non-numeric row in CSV body");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ": ragged CSV rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty CSV");
  SeismicSection s(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.n; ++j) s.at(i, j) = rows[i][j];
  s.provenance = "csv:" + std::filesystem::path(path).filename().string();
  s.validate();
  return s;
}

SeismicSection load_seismic(const std::string& path) {
  if (std::filesystem::path(path).extension() == ".csv") return read_csv(path);
  return read_grid(path);
}

}  // namespace n2ns

#include "rsac/nn/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rsac::nn {

namespace {

constexpr const char* kFormat = "rsac-checkpoint/1";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void check_token(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_of(" \t\r\n=") != std::string::npos) {
    throw std::invalid_argument(std::string("invalid checkpoint ") + what + " '" + s + "'");
  }
}

long parse_long(const std::string& s) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0) {
    throw std::runtime_error("malformed integer '" + s + "' in checkpoint manifest");
  }
  return v;
}

void put_le32(std::ostream& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  const char bytes[4] = {static_cast<char>(bits & 0xFFu), static_cast<char>((bits >> 8) & 0xFFu),
                         static_cast<char>((bits >> 16) & 0xFFu), static_cast<char>((bits >> 24) & 0xFFu)};
  out.write(bytes, 4);
}

float get_le32(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

}  // namespace

const std::string& Checkpoint::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  throw std::out_of_range("checkpoint has no metadata key '" + key + "'");
}

bool Checkpoint::has_meta(const std::string& key) const {
  for (const auto& kv : metadata) {
    if (kv.first == key) return true;
  }
  return false;
}

const ParamTensor<float>& Checkpoint::tensor(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("checkpoint has no tensor '" + name + "'");
}

void write_checkpoint(const std::filesystem::path& manifest, const Checkpoint& checkpoint) {
  std::filesystem::path payload = manifest;
  payload.replace_extension(".bin");

  std::ostringstream text;
  text << "format = " << kFormat << "\n";
  text << "payload = " << payload.filename().string() << "\n";
  for (const auto& [k, v] : checkpoint.metadata) {
    check_token(k, "metadata key");
    if (v.find('\n') != std::string::npos) throw std::invalid_argument("metadata value contains a newline");
    text << "meta." << k << " = " << v << "\n";
  }
  std::ofstream bin(payload, std::ios::binary | std::ios::trunc);
  if (!bin) throw std::runtime_error("cannot open " + payload.string() + " for writing");
  long offset = 0;
  for (const auto& t : checkpoint.tensors) {
    check_token(t.name, "tensor name");
    text << "tensor." << t.name << " = ";
    if (t.rows() == 1) {
      text << t.cols();
    } else {
      text << t.rows() << "x" << t.cols();
    }
    text << " @ " << offset << "\n";
    for (Eigen::Index i = 0; i < t.values.size(); ++i) put_le32(bin, t.values.data()[i]);
    offset += static_cast<long>(t.values.size());
  }
  bin.close();
  if (!bin) throw std::runtime_error("failed writing " + payload.string());
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + manifest.string() + " for writing");
  out << text.str();
  if (!out) throw std::runtime_error("failed writing " + manifest.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open checkpoint manifest " + manifest.string());
  Checkpoint ckpt;
  std::string payload_name;
  bool format_ok = false;
  struct Entry {
    std::string name;
    long rows, cols, offset;
  };
  std::vector<Entry> entries;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed manifest line: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "format") {
      if (value != kFormat) throw std::runtime_error("unsupported checkpoint format '" + value + "'");
      format_ok = true;
    } else if (key == "payload") {
      payload_name = value;
    } else if (key.rfind("meta.", 0) == 0) {
      ckpt.metadata.emplace_back(key.substr(5), value);
    } else if (key.rfind("tensor.", 0) == 0) {
      const auto at = value.find('@');
      if (at == std::string::npos) throw std::runtime_error("tensor entry without offset: " + line);
      const std::string shape = trim(value.substr(0, at));
      const auto x = shape.find('x');
      Entry e{key.substr(7), 1, 0, parse_long(trim(value.substr(at + 1)))};
      if (x == std::string::npos) {
        e.cols = parse_long(shape);
      } else {
        e.rows = parse_long(shape.substr(0, x));
        e.cols = parse_long(shape.substr(x + 1));
      }
      entries.push_back(std::move(e));
    } else {
      throw std::runtime_error("unknown manifest key '" + key + "'");
    }
  }
  if (!format_ok) throw std::runtime_error("checkpoint manifest lacks a format line");
  if (payload_name.empty()) throw std::runtime_error("checkpoint manifest lacks a payload line");

  const auto payload = manifest.parent_path() / payload_name;
  std::ifstream bin(payload, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open checkpoint payload " + payload.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  for (const auto& e : entries) {
    const long count = e.rows * e.cols;
    if (static_cast<std::size_t>((e.offset + count) * 4) > bytes.size()) {
      throw std::runtime_error("tensor '" + e.name + "' extends past the payload end");
    }
    ParamTensor<float> t(e.name, e.rows, e.cols);
    const unsigned char* base = bytes.data() + e.offset * 4;
    for (long i = 0; i < count; ++i) t.values.data()[i] = get_le32(base + 4 * i);
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

}  // namespace rsac::nn

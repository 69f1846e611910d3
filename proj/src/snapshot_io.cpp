#include "cnls/snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace cnls {
namespace {

constexpr char kMagic[4] = {'C', 'N', 'L', 'S'};
constexpr std::size_t kHeaderBytes = 4 + 2 + 2 + 4 + 8 + 8 + 1;

template <class U>
void put(std::vector<std::uint8_t>& out, U v) {
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <class U>
  U get() {
    if (pos_ + sizeof(U) > bytes_.size()) throw std::runtime_error("snapshot truncated");
    U v = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
      v |= static_cast<U>(static_cast<U>(bytes_[pos_ + b]) << (8 * b));
    }
    pos_ += sizeof(U);
    return v;
  }

  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const Field& f, double t) {
  const Grid& g = f.grid();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 16 * f.size());
  for (char c : kMagic) out.push_back(static_cast<std::uint8_t>(c));
  put<std::uint16_t>(out, kSnapshotVersion);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(g.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n()));
  put_f64(out, g.box_length());
  put_f64(out, t);
  out.push_back(static_cast<std::uint8_t>(f.representation()));
  for (const auto& z : f.values()) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
  return out;
}

Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::runtime_error("not a CNLS snapshot");
  }
  Reader r(bytes);
  for (int i = 0; i < 4; ++i) r.get<std::uint8_t>();
  const auto version = r.get<std::uint16_t>();
  if (version != kSnapshotVersion) {
    throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
  }
  const int dim = r.get<std::uint16_t>();
  const auto n = r.get<std::uint32_t>();
  const double box = r.get_f64();
  const double t = r.get_f64();
  const auto rep = r.get<std::uint8_t>();
  if (rep > 1) throw std::runtime_error("invalid snapshot representation tag");
  if (n > (1u << 20)) throw std::runtime_error("snapshot grid too large");
  Grid g = [&] {
    try {
      return Grid::make(dim, static_cast<int>(n), box);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("invalid snapshot header: ") + e.what());
    }
  }();
  if (r.remaining() != 16 * g.size()) throw std::runtime_error("snapshot payload size mismatch");
  ComplexBuffer values(g.size());
  for (auto& z : values) {
    const double re = r.get_f64();
    const double im = r.get_f64();
    z = Complex{re, im};
  }
  return Snapshot{Field(g, std::move(values), static_cast<Representation>(rep)), t};
}

void write_snapshot(const std::filesystem::path& path, const Field& f, double t) {
  const auto bytes = encode_snapshot(f, t);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace cnls

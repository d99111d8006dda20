#include "wdsemu/container.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

namespace wdsemu {

namespace {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void matrix(const Matrix& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) f64(m.data()[i]);
  }
  const std::vector<std::uint8_t>& data() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  ByteReader(std::vector<std::uint8_t> buf, std::string path) : buf_(std::move(buf)), path_(std::move(path)) {}

  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw DataError("'" + path_ + "' is truncated at byte " + std::to_string(pos_));
  }
  std::uint8_t u8() {
    need(1);
    return buf_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  Matrix matrix() {
    const auto rows = u64();
    const auto cols = u64();
    if (cols != 0 && rows > (buf_.size() - pos_) / 8 / cols) {
      throw DataError("'" + path_ + "' is truncated inside a matrix");
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = f64();
    return m;
  }
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
  std::string path_;
  std::size_t pos_ = 0;
};

void write_file(const std::string& path, const std::vector<std::uint8_t>& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw DataError("failed writing '" + path + "'");
}

ByteReader read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ByteReader(std::move(data), path);
}

void expect_header(ByteReader& in, const char (&magic)[5], const std::string& path) {
  char got[4];
  in.bytes(got, 4);
  if (std::memcmp(got, magic, 4) != 0) throw DataError("'" + path + "' is not a " + magic + " container");
  const auto version = in.u32();
  if (version != kContainerVersion) {
    throw DataError("'" + path + "' has container version " + std::to_string(version) + ", expected " +
                    std::to_string(kContainerVersion));
  }
}

}  // namespace

NetworkHash network_hash(const WaterNetwork& net) {
  ByteWriter w;
  w.u64(net.num_nodes());
  for (const auto& node : net.nodes()) {
    w.str(node.id);
    w.u8(node.kind == NodeKind::Reservoir ? 1 : 0);
    w.f64(node.elevation);
    w.f64(node.head);
    w.f64(node.base_demand);
    w.str(node.pattern);
  }
  w.u64(net.num_pipes());
  for (const auto& pipe : net.pipes()) {
    w.str(pipe.id);
    w.u32(static_cast<std::uint32_t>(pipe.from));
    w.u32(static_cast<std::uint32_t>(pipe.to));
    w.f64(pipe.attr.length);
    w.f64(pipe.attr.diameter);
    w.f64(pipe.attr.roughness);
  }
  NetworkHash hash{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), w.data().data(), w.data().size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), hash.data(), &len) != 1 || len != hash.size()) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return hash;
}

std::string to_hex(const NetworkHash& hash) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  for (auto b : hash) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

void save_dataset(const std::string& path, const ScenarioSet& set) {
  ByteWriter w;
  w.bytes("WDSD", 4);
  w.u32(kContainerVersion);
  const auto hash = network_hash(set.base);
  w.bytes(hash.data(), hash.size());
  w.f64(set.sampling_minutes);
  w.u64(set.scenarios.size());
  for (const auto& sc : set.scenarios) {
    w.u64(sc.seed);
    w.matrix(sc.demands);
    Matrix mult(1, static_cast<Eigen::Index>(sc.diameter_multipliers.size()));
    for (std::size_t p = 0; p < sc.diameter_multipliers.size(); ++p) mult(0, static_cast<Eigen::Index>(p)) = sc.diameter_multipliers[p];
    w.matrix(mult);
    w.u8(sc.solved() ? 1 : 0);
    if (sc.solved()) {
      w.matrix(sc.heads);
      w.matrix(sc.flows);
    }
  }
  write_file(path, w.data());
}

ScenarioSet load_dataset(const std::string& path, const WaterNetwork& net) {
  auto in = read_file(path);
  expect_header(in, "WDSD", path);
  NetworkHash stored{};
  in.bytes(stored.data(), stored.size());
  if (stored != network_hash(net)) {
    throw DataError("'" + path + "' was generated for a different network (hash " + to_hex(stored) + ")");
  }
  ScenarioSet set{net, {}, in.f64()};
  const auto count = in.u64();
  for (std::uint64_t k = 0; k < count; ++k) {
    Scenario sc;
    sc.seed = in.u64();
    sc.demands = in.matrix();
    const Matrix mult = in.matrix();
    sc.diameter_multipliers.assign(mult.data(), mult.data() + mult.size());
    if (static_cast<std::size_t>(sc.demands.cols()) != net.num_nodes() ||
        sc.diameter_multipliers.size() != net.num_pipes()) {
      throw DataError("'" + path + "' scenario dimensions do not match the network");
    }
    if (in.u8() != 0) {
      sc.heads = in.matrix();
      sc.flows = in.matrix();
    }
    set.scenarios.push_back(std::move(sc));
  }
  if (!in.at_end()) throw DataError("'" + path + "' has trailing bytes");
  return set;
}

const Matrix& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [key, value] : tensors) {
    if (key == name) return value;
  }
  throw DataError("checkpoint has no tensor '" + name + "'");
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  ByteWriter w;
  w.bytes("WDSM", 4);
  w.u32(kContainerVersion);
  w.u64(checkpoint.hyperparameters.size());
  for (const auto& [key, value] : checkpoint.hyperparameters) {
    w.str(key);
    w.f64(value);
  }
  w.u64(checkpoint.tensors.size());
  for (const auto& [name, m] : checkpoint.tensors) {
    w.str(name);
    w.matrix(m);
  }
  write_file(path, w.data());
}

Checkpoint load_checkpoint(const std::string& path) {
  auto in = read_file(path);
  expect_header(in, "WDSM", path);
  Checkpoint cp;
  const auto n_hyper = in.u64();
  for (std::uint64_t i = 0; i < n_hyper; ++i) {
    auto key = in.str();
    cp.hyperparameters[key] = in.f64();
  }
  const auto n_tensors = in.u64();
  for (std::uint64_t i = 0; i < n_tensors; ++i) {
    auto name = in.str();
    cp.tensors.emplace_back(std::move(name), in.matrix());
  }
  if (!in.at_end()) throw DataError("'" + path + "' has trailing bytes");
  return cp;
}

}  // namespace wdsemu

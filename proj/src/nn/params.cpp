#include "editseq/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace editseq::nn {

namespace {

constexpr char kMagic[8] = {'E', 'S', 'Q', 'C', 'K', 'P', 'T', '1'};

void write_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }

std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void write_mat(std::ostream& os, const Mat<float>& m) {
  write_u64(os, static_cast<std::uint64_t>(m.rows()));
  write_u64(os, static_cast<std::uint64_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(float) * m.size()));
}

Mat<float> read_mat(std::istream& is) {
  const auto rows = static_cast<Eigen::Index>(read_u64(is));
  const auto cols = static_cast<Eigen::Index>(read_u64(is));
  Mat<float> m(rows, cols);
  is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(float) * m.size()));
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamStore<float>& store,
                     const nlohmann::json& descriptor) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  os.write(kMagic, sizeof(kMagic));
  const std::string desc = descriptor.dump();
  write_u64(os, desc.size());
  os.write(desc.data(), static_cast<std::streamsize>(desc.size()));
  write_u64(os, static_cast<std::uint64_t>(store.step()));
  write_u64(os, static_cast<std::uint64_t>(store.count()));
  for (int i = 0; i < store.count(); ++i) {
    const auto& e = store.entry(i);
    write_u64(os, e.name.size());
    os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    write_mat(os, e.value);
    write_mat(os, e.m);
    write_mat(os, e.v);
  }
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("not an editseq checkpoint (bad header): " + path);
  }
  LoadedCheckpoint out;
  std::string desc(read_u64(is), '\0');
  is.read(desc.data(), static_cast<std::streamsize>(desc.size()));
  out.descriptor = nlohmann::json::parse(desc);
  const auto step = static_cast<std::int64_t>(read_u64(is));
  const auto count = read_u64(is);
  Rng unused(0);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name(read_u64(is), '\0');
    is.read(name.data(), static_cast<std::streamsize>(name.size()));
    Mat<float> value = read_mat(is);
    Mat<float> m = read_mat(is);
    Mat<float> v = read_mat(is);
    int id = out.store.add(name, static_cast<int>(value.rows()), static_cast<int>(value.cols()),
                           Init::Zero, unused);
    out.store.entry(id).value = std::move(value);
    out.store.entry(id).m = std::move(m);
    out.store.entry(id).v = std::move(v);
  }
  out.store.set_step(step);
  if (!is) throw std::runtime_error("truncated checkpoint: " + path);
  return out;
}

}  // namespace editseq::nn

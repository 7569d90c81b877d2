#include <cmath>
#include <fstream>
#include <optional>

#include "radarsr/detail/binary.hpp"
#include "radarsr/model.hpp"

namespace radarsr {

namespace {

constexpr std::uint32_t kVersion = 1;

void write_tensor(detail::BinaryWriter& w, const std::string& name, const std::vector<int>& shape,
                  const double* values, std::size_t n) {
  w.u32(static_cast<std::uint32_t>(name.size()));
  w.bytes(name.data(), name.size());
  w.u32(static_cast<std::uint32_t>(shape.size()));
  for (int d : shape) w.u32(static_cast<std::uint32_t>(d));
  for (std::size_t i = 0; i < n; ++i) w.f32(static_cast<float>(values[i]));
}

struct RawTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<double> values;
};

RawTensor read_tensor(detail::BinaryReader& r) {
  RawTensor t;
  const std::uint32_t len = r.u32();
  if (len == 0 || len > 256) r.fail("bad tensor name length");
  t.name.resize(len);
  r.bytes(t.name.data(), len);
  const std::uint32_t rank = r.u32();
  if (rank > 8) r.fail("bad tensor rank");
  std::size_t n = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t d = r.u32();
    if (d == 0 || d > (1u << 24)) r.fail("bad tensor dimension");
    t.shape.push_back(static_cast<int>(d));
    n *= d;
    if (n > (std::size_t{1} << 26)) r.fail("tensor too large");
  }
  t.values.resize(n);
  for (auto& v : t.values) {
    const auto at = r.offset();
    v = r.f32();
    if (!std::isfinite(v)) throw LoadError(r.path(), at, "non-finite value in " + t.name);
  }
  return t;
}

}  // namespace

void write_checkpoint(std::ostream& os, const ToyDenoiser& model) {
  const auto& c = model.config();
  const auto& p = model.parameters();
  detail::BinaryWriter w(os);
  w.bytes(kCheckpointMagic, 4);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(p.slots().size() + 2));
  const double meta[] = {double(c.height),        double(c.width),         double(c.cond_channels),
                         double(c.base_channels), double(c.cond_features), double(c.horizontal_factor)};
  write_tensor(w, "meta.config", {6}, meta, 6);
  write_tensor(w, "meta.sigma_data", {1}, &c.sigma_data, 1);
  for (std::size_t i = 0; i < p.slots().size(); ++i) {
    const auto& s = p.slot(i);
    write_tensor(w, s.name, s.shape, p.data(i), s.size);
  }
}

void write_checkpoint(const std::filesystem::path& path, const ToyDenoiser& model) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeError("cannot open " + path.string() + " for writing");
  write_checkpoint(os, model);
  if (!os) throw RuntimeError("write failed: " + path.string());
}

ToyDenoiser read_checkpoint(std::istream& is, const std::string& name) {
  detail::BinaryReader r(is, name);
  r.expect_magic(kCheckpointMagic);
  if (const auto v = r.u32(); v != kVersion) r.fail("unsupported version " + std::to_string(v));
  const std::uint32_t count = r.u32();
  if (count < 2) r.fail("missing metadata tensors");

  const auto meta = read_tensor(r);
  if (meta.name != "meta.config" || meta.values.size() != 6) r.fail("expected meta.config");
  const auto sd = read_tensor(r);
  if (sd.name != "meta.sigma_data" || sd.values.size() != 1) r.fail("expected meta.sigma_data");

  ToyDenoiserConfig cfg;
  cfg.height = static_cast<int>(meta.values[0]);
  cfg.width = static_cast<int>(meta.values[1]);
  cfg.cond_channels = static_cast<int>(meta.values[2]);
  cfg.base_channels = static_cast<int>(meta.values[3]);
  cfg.cond_features = static_cast<int>(meta.values[4]);
  cfg.horizontal_factor = static_cast<int>(meta.values[5]);
  cfg.sigma_data = sd.values[0];
  std::optional<ToyDenoiser> model;
  try {
    model.emplace(cfg);
  } catch (const ConfigError& e) {
    r.fail(std::string("invalid model config: ") + e.what());
  }
  auto& p = model->parameters();
  if (count - 2 != p.slots().size()) r.fail("parameter tensor count does not match the architecture");
  for (std::size_t i = 0; i < p.slots().size(); ++i) {
    const auto at = r.offset();
    const auto t = read_tensor(r);
    const auto& s = p.slot(i);
    if (t.name != s.name || t.shape != s.shape) throw LoadError(name, at, "unexpected tensor " + t.name);
    std::copy(t.values.begin(), t.values.end(), p.data(i));
  }
  r.expect_eof();
  return std::move(*model);
}

ToyDenoiser read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError(path.string(), 0, "cannot open");
  return read_checkpoint(is, path.string());
}

}  // namespace radarsr

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "glim/autoencoder.hpp"
#include "glim/model.hpp"
#include "glim/optimizer.hpp"
#include "glim/types.hpp"

namespace glim {

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; big-endian hosts are unsupported");

inline constexpr char kModelMagic[4] = {'G', 'L', 'I', 'M'};
inline constexpr std::uint32_t kModelVersion = 1;

struct LoadedModel {
  int d = 0;
  int c = 0;
  std::vector<std::string> entities;
  std::vector<std::string> relations;
  ModelParams params;
  AutoencoderParams ae;
  std::vector<std::uint64_t> tau_head;
  std::vector<std::uint64_t> tau_tail;
  std::vector<std::uint64_t> tau_rel;
  std::uint64_t tau_ae = 0;
};

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* field) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error(std::string("model file truncated reading ") + field);
  return value;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_pod(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in, const char* field) {
  auto len = read_pod<std::uint32_t>(in, field);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw std::runtime_error(std::string("model file truncated reading ") + field);
  return s;
}

inline void write_doubles(std::ostream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
}

inline void read_doubles(std::istream& in, double* data, std::size_t count, const char* field) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 8));
  if (!in) throw std::runtime_error(std::string("model file truncated reading ") + field);
}

}  // namespace detail

// Binary model file: "GLIM" magic, version, d, c, |E|, |R|, the two
// vocabularies as length-prefixed UTF-8, then U, V, M, A, B and the step
// counters as little-endian 64-bit values. Round-trips are bit-exact.
inline void save_model(const std::string& path, const std::vector<std::string>& entities,
                       const std::vector<std::string>& relations, const ModelParams& params,
                       const AutoencoderParams& ae, const OptimizerState& opt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open model file for writing: " + path);
  out.write(kModelMagic, 4);
  detail::write_pod(out, kModelVersion);
  detail::write_pod(out, static_cast<std::uint32_t>(params.d));
  detail::write_pod(out, static_cast<std::uint32_t>(ae.c));
  detail::write_pod(out, static_cast<std::uint64_t>(entities.size()));
  detail::write_pod(out, static_cast<std::uint64_t>(relations.size()));
  for (const auto& name : entities) detail::write_string(out, name);
  for (const auto& name : relations) detail::write_string(out, name);
  detail::write_doubles(out, params.U.data(), params.U.size());
  detail::write_doubles(out, params.V.data(), params.V.size());
  for (const Mat& m : params.M) detail::write_doubles(out, m.data(), m.size());
  detail::write_doubles(out, ae.A.data(), ae.A.size());
  detail::write_doubles(out, ae.B.data(), ae.B.size());
  for (std::uint64_t tau : opt.tau_head) detail::write_pod(out, tau);
  for (std::uint64_t tau : opt.tau_tail) detail::write_pod(out, tau);
  for (std::uint64_t tau : opt.tau_rel) detail::write_pod(out, tau);
  detail::write_pod(out, opt.tau_ae);
  if (!out) throw std::runtime_error("write failed for model file: " + path);
}

inline LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kModelMagic, 4) != 0)
    throw std::runtime_error("model file header check failed: magic");
  auto version = detail::read_pod<std::uint32_t>(in, "version");
  if (version != kModelVersion)
    throw std::runtime_error("model file header check failed: version " +
                             std::to_string(version) + " unsupported");
  LoadedModel model;
  auto d = detail::read_pod<std::uint32_t>(in, "d");
  auto c = detail::read_pod<std::uint32_t>(in, "c");
  if (d < 1 || d > (1u << 16)) throw std::runtime_error("model file header check failed: d");
  if (c < 1 || c >= d * d) throw std::runtime_error("model file header check failed: c");
  auto num_entities = detail::read_pod<std::uint64_t>(in, "|E|");
  auto num_relations = detail::read_pod<std::uint64_t>(in, "|R|");
  if (num_entities > (1u << 24)) throw std::runtime_error("model file header check failed: |E|");
  if (num_relations > (1u << 17)) throw std::runtime_error("model file header check failed: |R|");

  model.d = static_cast<int>(d);
  model.c = static_cast<int>(c);
  model.entities.reserve(num_entities);
  for (std::uint64_t i = 0; i < num_entities; ++i)
    model.entities.push_back(detail::read_string(in, "entity vocabulary"));
  model.relations.reserve(num_relations);
  for (std::uint64_t i = 0; i < num_relations; ++i)
    model.relations.push_back(detail::read_string(in, "relation vocabulary"));

  model.params.d = model.d;
  model.params.U.resize(num_entities, model.d);
  model.params.V.resize(num_entities, model.d);
  detail::read_doubles(in, model.params.U.data(), model.params.U.size(), "U");
  detail::read_doubles(in, model.params.V.data(), model.params.V.size(), "V");
  model.params.M.resize(num_relations);
  for (auto& m : model.params.M) {
    m.resize(model.d, model.d);
    detail::read_doubles(in, m.data(), m.size(), "M");
  }
  model.ae.d = model.d;
  model.ae.c = model.c;
  model.ae.A.resize(model.c, model.d * model.d);
  model.ae.B.resize(model.d * model.d, model.c);
  detail::read_doubles(in, model.ae.A.data(), model.ae.A.size(), "A");
  detail::read_doubles(in, model.ae.B.data(), model.ae.B.size(), "B");

  model.tau_head.resize(num_entities);
  model.tau_tail.resize(num_entities);
  model.tau_rel.resize(num_relations);
  for (auto& tau : model.tau_head) tau = detail::read_pod<std::uint64_t>(in, "step counters");
  for (auto& tau : model.tau_tail) tau = detail::read_pod<std::uint64_t>(in, "step counters");
  for (auto& tau : model.tau_rel) tau = detail::read_pod<std::uint64_t>(in, "step counters");
  model.tau_ae = detail::read_pod<std::uint64_t>(in, "step counters");
  return model;
}

}  // namespace glim

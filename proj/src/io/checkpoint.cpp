#include "ddikit/io/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddikit::io {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'D', 'D', 'I', 'K', 'I', 'T', 'C', 'K'};

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_i64(std::ostream& out, std::int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void write_doubles(std::ostream& out, const std::vector<double>& v) {
  write_u64(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}
std::int64_t read_i64(std::istream& in) {
  std::int64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}
std::string read_string(std::istream& in) {
  const std::uint32_t len = read_u32(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw std::runtime_error("checkpoint: truncated string");
  return s;
}
std::vector<double> read_doubles(std::istream& in) {
  const std::uint64_t n = read_u64(in);
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint: truncated tensor block");
  return v;
}

std::string config_to_kv(const train::TrainConfig& cfg, int relation_count) {
  RunConfig wrap;
  wrap.train = cfg;
  std::ostringstream oss;
  oss << run_config_to_text(wrap);
  oss << "relation_count = " << relation_count << "\n";
  return oss.str();
}

std::pair<train::TrainConfig, int> config_from_kv(const std::string& text) {
  std::string filtered;
  int relation_count = 1;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("relation_count", 0) == 0) {
      const auto eq = line.find('=');
      relation_count = std::stoi(line.substr(eq + 1));
    } else {
      filtered += line + "\n";
    }
  }
  RunConfig cfg = parse_run_config_text(filtered);
  return {cfg.train, relation_count};
}

void write_tensor_entry(std::ostream& out, const std::string& name, const core::Shape& shape,
                        std::span<const double> values) {
  write_string(out, name);
  write_u32(out, static_cast<std::uint32_t>(shape.size()));
  for (std::int64_t d : shape) write_i64(out, d);
  write_u64(out, values.size());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
}

}  // namespace

void save_checkpoint(const std::string& path, model::ModelParams& params,
                     const train::TrainConfig& config, const train::AdamW* optimizer,
                     std::uint64_t rng_state) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + tmp);
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kCheckpointVersion);
    write_string(out, config_to_kv(config, params.config.relation_count));

    const auto named = params.named_parameters();
    const auto buffers = params.named_buffers();
    write_u64(out, named.size() + buffers.size());
    for (const auto& [name, tensor] : named) {
      write_tensor_entry(out, name, tensor.shape(), tensor.values());
    }
    for (const auto& [name, vec] : buffers) {
      write_tensor_entry(out, name, {1, static_cast<std::int64_t>(vec->size())}, *vec);
    }

    out.put(optimizer ? 1 : 0);
    if (optimizer) {
      const auto state = optimizer->state();
      write_u64(out, state.size());
      for (const auto& entry : state) {
        write_string(out, entry.name);
        write_doubles(out, *entry.m);
        write_doubles(out, *entry.v);
      }
      write_i64(out, optimizer->step_count());
    }
    write_u64(out, rng_state);
    if (!out) throw std::runtime_error("checkpoint: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path);
  }
  Checkpoint ckpt;
  ckpt.version = read_u32(in);
  if (ckpt.version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(ckpt.version));
  }
  auto [cfg, relation_count] = config_from_kv(read_string(in));
  ckpt.config = cfg;
  ckpt.relation_count = relation_count;

  const std::uint64_t n_tensors = read_u64(in);
  for (std::uint64_t t = 0; t < n_tensors; ++t) {
    const std::string name = read_string(in);
    const std::uint32_t ndim = read_u32(in);
    core::Shape shape;
    for (std::uint32_t d = 0; d < ndim; ++d) shape.push_back(read_i64(in));
    auto values = read_doubles(in);
    if (core::shape_size(shape) != static_cast<std::int64_t>(values.size())) {
      throw std::runtime_error("checkpoint: tensor " + name + " has inconsistent shape");
    }
    ckpt.shapes.emplace_back(name, shape);
    ckpt.tensors.emplace_back(name, std::move(values));
  }

  const int has_opt = in.get();
  if (has_opt == EOF) throw std::runtime_error("checkpoint: truncated file");
  ckpt.has_optimizer = has_opt == 1;
  if (ckpt.has_optimizer) {
    const std::uint64_t n = read_u64(in);
    for (std::uint64_t k = 0; k < n; ++k) {
      std::string name = read_string(in);
      auto m = read_doubles(in);
      auto v = read_doubles(in);
      ckpt.optimizer_state.emplace_back(std::move(name), std::move(m), std::move(v));
    }
    ckpt.optimizer_steps = read_i64(in);
  }
  ckpt.rng_state = read_u64(in);
  return ckpt;
}

model::ModelParams restore_model(const Checkpoint& ckpt) {
  model::ModelParams params(ckpt.config.model_config(ckpt.relation_count));
  apply_to_model(ckpt, params);
  return params;
}

void apply_to_model(const Checkpoint& ckpt, model::ModelParams& params) {
  auto find = [&](const std::string& name) -> const std::vector<double>* {
    for (std::size_t t = 0; t < ckpt.tensors.size(); ++t) {
      if (ckpt.tensors[t].first == name) return &ckpt.tensors[t].second;
    }
    return nullptr;
  };

  for (auto& [name, tensor] : params.named_parameters()) {
    const auto* stored = find(name);
    if (!stored) throw std::runtime_error("checkpoint: missing tensor " + name);
    core::Tensor t = tensor;
    if (static_cast<std::int64_t>(stored->size()) != t.size()) {
      throw std::runtime_error("checkpoint: shape mismatch for tensor " + name + ": stored " +
                               std::to_string(stored->size()) + " values, model expects " +
                               std::to_string(t.size()));
    }
    auto dst = t.values_mut();
    std::copy(stored->begin(), stored->end(), dst.begin());
  }
  for (auto& [name, vec] : params.named_buffers()) {
    const auto* stored = find(name);
    if (!stored) throw std::runtime_error("checkpoint: missing buffer " + name);
    if (stored->size() != vec->size()) {
      throw std::runtime_error("checkpoint: shape mismatch for buffer " + name);
    }
    *vec = *stored;
  }
}

}  // namespace ddikit::io

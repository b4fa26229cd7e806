#include "lac/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>

#include "lac/linalg.hpp"

namespace lac {
namespace {

constexpr char kMagic[8] = {'L', 'A', 'C', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("checkpoint truncated while reading " + what);
  return value;
}

}  // namespace

void save_checkpoint(const std::string& path, const NamedTensors& tensors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint64_t>(out, tensors.size());
  std::set<std::string> seen;
  for (const auto& [name, tensor] : tensors) {
    if (name.empty()) throw ContractError("checkpoint tensor name is empty");
    if (!seen.insert(name).second) {
      throw ContractError("duplicate checkpoint tensor name: " + name);
    }
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    const auto& shape = tensor.shape();
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
    for (std::size_t dim : shape) write_pod<std::uint64_t>(out, dim);
    const auto& data = tensor.data();
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
  }
  if (!out) throw ParseError("write failure on checkpoint: " + path);
}

NamedTensors load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("bad checkpoint magic in " + path);
  }
  const auto count = read_pod<std::uint64_t>(in, "tensor count");
  NamedTensors result;
  result.reserve(count);
  std::set<std::string> seen;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(in, "name length");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw ParseError("checkpoint truncated while reading name");
    if (!seen.insert(name).second) {
      throw ParseError("duplicate tensor name in checkpoint: " + name);
    }
    const auto ndim = read_pod<std::uint32_t>(in, "rank of " + name);
    std::vector<std::size_t> shape(ndim);
    std::size_t numel = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      shape[d] = static_cast<std::size_t>(
          read_pod<std::uint64_t>(in, "shape of " + name));
      numel *= shape[d];
    }
    Tensor t = Tensor::zeros(shape, false);
    in.read(reinterpret_cast<char*>(t.mutable_data().data()),
            static_cast<std::streamsize>(numel * sizeof(double)));
    if (!in) throw ParseError("checkpoint truncated while reading data of " + name);
    result.emplace_back(std::move(name), std::move(t));
  }
  return result;
}

void restore_into(const NamedTensors& source, NamedTensors& target) {
  for (auto& [name, tensor] : target) {
    const Tensor* found = nullptr;
    for (const auto& [sname, stensor] : source) {
      if (sname == name) {
        found = &stensor;
        break;
      }
    }
    if (found == nullptr) {
      throw ContractError("checkpoint is missing tensor: " + name);
    }
    if (found->shape() != tensor.shape()) {
      throw ShapeError("checkpoint shape mismatch for tensor: " + name);
    }
    tensor.mutable_data() = found->data();
  }
}

}  // namespace lac

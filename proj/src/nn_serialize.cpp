#include "mds/nn/serialize.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace mds::nn {

using nlohmann::json;

namespace {

struct Entry {
  std::string name;
  MatrixF* tensor;
};

std::vector<Entry> entries(const std::vector<ParamRef>& params, const std::vector<StateRef>& state) {
  std::vector<Entry> out;
  for (const auto& p : params) out.push_back({p.name, p.value});
  for (const auto& s : state) out.push_back({s.name, s.value});
  return out;
}

}  // namespace

void save_tensors(const std::filesystem::path& path, const std::vector<ParamRef>& params,
                  const std::vector<StateRef>& state) {
  const auto ents = entries(params, state);
  json header = json::array();
  for (const auto& e : ents) {
    header.push_back({{"name", e.name}, {"rows", e.tensor->rows()}, {"cols", e.tensor->cols()}});
  }
  const std::string head = json{{"format", "MDSP"}, {"version", 1}, {"tensors", header}}.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const auto len = static_cast<std::uint32_t>(head.size());
  out.write("MDSP", 4);
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  std::vector<float> row;
  for (const auto& e : ents) {
    const MatrixF& m = *e.tensor;
    row.resize(static_cast<std::size_t>(m.cols()));
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void load_tensors(const std::filesystem::path& path, const std::vector<ParamRef>& params,
                  const std::vector<StateRef>& state) {
  const auto ents = entries(params, state);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MDSP", 4) != 0) throw std::runtime_error("bad parameter blob magic");
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  std::string head(len, '\0');
  in.read(head.data(), len);
  const json header = json::parse(head);
  const auto& tensors = header.at("tensors");
  if (tensors.size() != ents.size()) {
    throw std::runtime_error("parameter blob lists " + std::to_string(tensors.size()) +
                             " tensors, net expects " + std::to_string(ents.size()));
  }
  std::vector<float> row;
  for (std::size_t i = 0; i < ents.size(); ++i) {
    const auto& t = tensors.at(i);
    const auto name = t.at("name").get<std::string>();
    const auto rows = t.at("rows").get<Index>();
    const auto cols = t.at("cols").get<Index>();
    if (name != ents[i].name || rows != ents[i].tensor->rows() || cols != ents[i].tensor->cols()) {
      throw std::runtime_error("tensor mismatch at index " + std::to_string(i) + ": blob has " +
                               name + ", net expects " + ents[i].name);
    }
    MatrixF& m = *ents[i].tensor;
    row.resize(static_cast<std::size_t>(cols));
    for (Index r = 0; r < rows; ++r) {
      in.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
      for (Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
  }
  if (!in) throw std::runtime_error("truncated parameter blob: " + path.string());
}

}  // namespace mds::nn

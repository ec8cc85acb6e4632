#include "mds/format.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mds {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

namespace {

void write_exact(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void write_container(const std::filesystem::path& path, const char magic[4], const json& header,
                     const std::vector<const MatrixF*>& arrays) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  const std::string head = header.dump();
  const auto len = static_cast<std::uint32_t>(head.size());
  write_exact(out, magic, 4);
  write_exact(out, &len, 4);
  write_exact(out, head.data(), head.size());
  std::vector<float> row;
  for (const MatrixF* m : arrays) {
    row.resize(static_cast<std::size_t>(m->cols()));
    for (Index r = 0; r < m->rows(); ++r) {
      for (Index c = 0; c < m->cols(); ++c) row[static_cast<std::size_t>(c)] = (*m)(r, c);
      write_exact(out, row.data(), row.size() * sizeof(float));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct Container {
  json header;
  std::vector<float> payload;
};

Container read_container(const std::filesystem::path& path, const char magic[4]) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  char got[4];
  in.read(got, 4);
  if (!in || std::memcmp(got, magic, 4) != 0) {
    throw std::runtime_error("bad magic in " + path.string());
  }
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  std::string head(len, '\0');
  in.read(head.data(), len);
  if (!in) throw std::runtime_error("truncated header in " + path.string());
  Container c;
  c.header = json::parse(head);
  std::vector<char> rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (rest.size() % sizeof(float) != 0) {
    throw std::runtime_error("payload not a whole number of float32 in " + path.string());
  }
  c.payload.resize(rest.size() / sizeof(float));
  std::memcpy(c.payload.data(), rest.data(), rest.size());
  return c;
}

MatrixF matrix_from_row_major(const float* src, Index rows, Index cols) {
  MatrixF m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = src[r * cols + c];
  }
  return m;
}

json axis_to_json(const VectorD& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

VectorD axis_from_json(const json& a) {
  VectorD v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Index>(i)] = a[i].get<double>();
  return v;
}

json spectrogram_header(const Spectrogram& spec) {
  return json{{"format", "MDS1"},
              {"shape", {spec.rows(), spec.cols()}},
              {"doppler_axis", axis_to_json(spec.doppler_axis)},
              {"time_axis", axis_to_json(spec.time_axis)},
              {"scale_meta", {{"db_floor", spec.scale.db_floor}, {"db_ceiling", spec.scale.db_ceiling}}}};
}

Spectrogram spectrogram_from(const json& header, const std::vector<float>& payload) {
  const Index rows = header.at("shape").at(0).get<Index>();
  const Index cols = header.at("shape").at(1).get<Index>();
  if (payload.size() != static_cast<std::size_t>(rows * cols)) {
    throw std::runtime_error("payload size does not match header shape");
  }
  Spectrogram s;
  s.data = matrix_from_row_major(payload.data(), rows, cols);
  s.doppler_axis = axis_from_json(header.at("doppler_axis"));
  s.time_axis = axis_from_json(header.at("time_axis"));
  const auto& sm = header.at("scale_meta");
  s.scale.db_floor = sm.at("db_floor").get<double>();
  s.scale.db_ceiling = sm.at("db_ceiling").get<double>();
  return s;
}

}  // namespace

void save_spectrogram(const std::filesystem::path& path, const Spectrogram& spec,
                      const json& extra) {
  json header = spectrogram_header(spec);
  for (auto it = extra.begin(); it != extra.end(); ++it) header[it.key()] = it.value();
  write_container(path, "MDS1", header, {&spec.data});
}

void save_spectrogram(const std::filesystem::path& path, const Spectrogram& spec) {
  save_spectrogram(path, spec, json::object());
}

Spectrogram load_spectrogram(const std::filesystem::path& path, json* header_out) {
  Container c = read_container(path, "MDS1");
  if (header_out) *header_out = c.header;
  return spectrogram_from(c.header, c.payload);
}

void save_recording(const std::filesystem::path& path, const MeasuredRecording& rec) {
  json acts = json::array();
  for (const auto& iv : rec.activity_intervals) {
    acts.push_back({{"start_s", iv.start_s}, {"end_s", iv.end_s}, {"label", activity_name(iv.label)}});
  }
  json idles = json::array();
  for (const auto& iv : rec.idle_intervals) {
    idles.push_back({{"start_s", iv.start_s}, {"end_s", iv.end_s}});
  }
  save_spectrogram(path, rec.spectrogram,
                   json{{"recording_id", rec.id},
                        {"seed", rec.seed},
                        {"activity_intervals", acts},
                        {"idle_intervals", idles}});
}

MeasuredRecording load_recording(const std::filesystem::path& path) {
  json header;
  MeasuredRecording rec;
  rec.spectrogram = load_spectrogram(path, &header);
  rec.id = header.value("recording_id", 0);
  rec.seed = header.value("seed", std::uint64_t{0});
  for (const auto& iv : header.value("activity_intervals", json::array())) {
    rec.activity_intervals.push_back({iv.at("start_s").get<double>(), iv.at("end_s").get<double>(),
                                      activity_from_name(iv.at("label").get<std::string>())});
  }
  for (const auto& iv : header.value("idle_intervals", json::array())) {
    rec.idle_intervals.push_back({iv.at("start_s").get<double>(), iv.at("end_s").get<double>()});
  }
  return rec;
}

void save_patches(const std::filesystem::path& path, const std::vector<NoisePatch>& patches) {
  json origins = json::array();
  json kinds = json::array();
  for (const auto& p : patches) {
    p.validate();
    kinds.push_back(patch_kind_name(p.kind));
    if (p.origin) {
      origins.push_back({{"recording_id", p.origin->recording_id},
                         {"f_offset", p.origin->f_offset},
                         {"t_offset", p.origin->t_offset}});
    } else {
      origins.push_back(nullptr);
    }
  }
  json header{{"format", "MDP1"},
              {"count", patches.size()},
              {"shape", {kPatchRows, kPatchCols}},
              {"kinds", kinds},
              {"origins", origins}};
  std::vector<const MatrixF*> arrays;
  arrays.reserve(patches.size());
  for (const auto& p : patches) arrays.push_back(&p.data);
  write_container(path, "MDP1", header, arrays);
}

std::vector<NoisePatch> load_patches(const std::filesystem::path& path, json* manifest_out) {
  Container c = read_container(path, "MDP1");
  if (manifest_out) *manifest_out = c.header;
  const auto count = c.header.at("count").get<std::size_t>();
  const Index rows = c.header.at("shape").at(0).get<Index>();
  const Index cols = c.header.at("shape").at(1).get<Index>();
  const auto per = static_cast<std::size_t>(rows * cols);
  if (c.payload.size() != count * per) {
    throw std::runtime_error("patch payload size mismatch in " + path.string());
  }
  std::vector<NoisePatch> patches(count);
  const auto& kinds = c.header.at("kinds");
  const auto& origins = c.header.at("origins");
  for (std::size_t i = 0; i < count; ++i) {
    patches[i].data = matrix_from_row_major(c.payload.data() + i * per, rows, cols);
    patches[i].kind = patch_kind_from_name(kinds.at(i).get<std::string>());
    if (!origins.at(i).is_null()) {
      const auto& o = origins.at(i);
      patches[i].origin = PatchOrigin{o.at("recording_id").get<int>(),
                                      o.at("f_offset").get<Index>(),
                                      o.at("t_offset").get<Index>()};
    }
  }
  return patches;
}

std::uint64_t hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for hashing: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (in.eof()) break;
  }
  return h;
}

std::uint64_t hash_json(const json& j) {
  // dump() emits keys sorted, so equal values hash equal.
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

}  // namespace mds

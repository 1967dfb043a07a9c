#include "rbmfuse/io.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>

namespace rbmfuse {

using nlohmann::json;

const Rbm& ModelFile::require_rbm() const {
  if (!rbm) throw std::runtime_error("model file has no float parameters");
  return *rbm;
}

const FixedRbm& ModelFile::require_fixed() const {
  if (!fixed)
    throw std::runtime_error("model file has no fixed-point parameters");
  return *fixed;
}

namespace {

constexpr std::uint32_t kModelMagic = 0x464d4252u;   // "RBMF"
constexpr std::uint32_t kStreamMagic = 0x534d4252u;  // "RBMS"
constexpr std::uint32_t kTraceMagic = 0x544d4252u;   // "RBMT"
constexpr std::uint32_t kVersion = 1;

constexpr std::uint32_t kHasFloat = 1u << 0;
constexpr std::uint32_t kHasFixed = 1u << 1;
constexpr std::uint32_t kHasMeta = 1u << 2;

struct Writer {
  std::ostringstream out;

  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void i32(std::int32_t v) { raw(&v, 4); }
  void f64(double v) { raw(&v, 8); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void raw(const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
};

struct Reader {
  std::string data;
  std::size_t pos = 0;

  explicit Reader(std::string d) : data(std::move(d)) {}
  void raw(void* p, std::size_t n) {
    if (pos + n > data.size()) throw std::runtime_error("truncated file");
    std::memcpy(p, data.data() + pos, n);
    pos += n;
  }
  std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
  std::int32_t i32() { std::int32_t v; raw(&v, 4); return v; }
  double f64() { double v; raw(&v, 8); return v; }
  std::string str() {
    std::uint32_t n = u32();
    if (pos + n > data.size()) throw std::runtime_error("truncated file");
    std::string s = data.substr(pos, n);
    pos += n;
    return s;
  }
};

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool is_json_path(const std::string& path) {
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json";
}

json fields_to_json(const FieldMap& fields) {
  json arr = json::array();
  for (const auto& f : fields)
    arr.push_back({{"name", f.name},
                   {"dir", f.is_input ? "in" : "out"},
                   {"labels", f.labels}});
  return arr;
}

FieldMap fields_from_json(const json& arr) {
  FieldMap fields;
  for (const auto& f : arr) {
    FieldSpec fs;
    fs.name = f.at("name").get<std::string>();
    fs.is_input = f.at("dir").get<std::string>() == "in";
    fs.labels = f.at("labels").get<std::vector<std::string>>();
    fields.push_back(std::move(fs));
  }
  return fields;
}

void check_dims(const ModelFile& file) {
  if (!file.rbm && !file.fixed)
    throw std::invalid_argument("model file must carry parameters");
  if (file.rbm) file.rbm->validate();
  if (file.fixed) file.fixed->validate();
  if (file.rbm && file.fixed) {
    if (file.rbm->n_visible() != file.fixed->n_visible ||
        file.rbm->n_hidden() != file.fixed->n_hidden ||
        file.rbm->visible_labels != file.fixed->visible_labels)
      throw std::invalid_argument(
          "float and fixed sections describe different models");
  }
}

std::pair<int, int> model_dims(const ModelFile& file) {
  if (file.rbm) return {file.rbm->n_visible(), file.rbm->n_hidden()};
  return {file.fixed->n_visible, file.fixed->n_hidden};
}

const std::vector<std::string>& model_labels(const ModelFile& file) {
  return file.rbm ? file.rbm->visible_labels : file.fixed->visible_labels;
}

}  // namespace

void save_model(const std::string& path, const ModelFile& file) {
  check_dims(file);
  if (is_json_path(path)) {
    write_file(path, model_to_json(file).dump(1) + "\n");
    return;
  }
  auto [nv, nh] = model_dims(file);
  Writer w;
  w.u32(kModelMagic);
  w.u32(kVersion);
  std::uint32_t flags = (file.rbm ? kHasFloat : 0u) |
                        (file.fixed ? kHasFixed : 0u) | kHasMeta;
  w.u32(flags);
  w.u32(static_cast<std::uint32_t>(nv));
  w.u32(static_cast<std::uint32_t>(nh));
  for (const auto& l : model_labels(file)) w.str(l);
  if (file.rbm) {
    const Rbm& m = *file.rbm;
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nh; ++j) w.f64(m.weights(i, j));
    for (int i = 0; i < nv; ++i) w.f64(m.visible_bias[i]);
    for (int j = 0; j < nh; ++j) w.f64(m.hidden_bias[j]);
  }
  if (file.fixed) {
    const FixedRbm& f = *file.fixed;
    w.u32(static_cast<std::uint32_t>(f.grid.total_bits));
    w.u32(static_cast<std::uint32_t>(f.grid.frac_bits));
    w.u32(static_cast<std::uint32_t>(f.lut.compare_bits));
    w.u32(static_cast<std::uint32_t>(f.lut.saturation));
    w.u32(static_cast<std::uint32_t>(f.lfsr.width));
    w.u32(f.lfsr.taps);
    for (auto q : f.w_row) w.i32(q);
    for (auto q : f.visible_bias_q) w.i32(q);
    for (auto q : f.hidden_bias_q) w.i32(q);
    for (auto s : f.lfsr_seeds) w.u32(s);
    w.str(f.provenance);
  }
  json meta = {{"fields", fields_to_json(file.fields)},
               {"bit_order", file.bit_order}};
  w.str(meta.dump());
  write_file(path, w.out.str());
}

ModelFile load_model(const std::string& path) {
  if (is_json_path(path)) return model_from_json(json::parse(read_file(path)));
  Reader r(read_file(path));
  if (r.u32() != kModelMagic)
    throw std::runtime_error(path + " is not a model file");
  if (r.u32() != kVersion)
    throw std::runtime_error(path + ": unsupported model file version");
  std::uint32_t flags = r.u32();
  int nv = static_cast<int>(r.u32());
  int nh = static_cast<int>(r.u32());
  std::vector<std::string> labels(nv);
  for (auto& l : labels) l = r.str();

  ModelFile file;
  if (flags & kHasFloat) {
    Rbm m = Rbm::zeros(nv, nh);
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nh; ++j) m.weights(i, j) = r.f64();
    for (int i = 0; i < nv; ++i) m.visible_bias[i] = r.f64();
    for (int j = 0; j < nh; ++j) m.hidden_bias[j] = r.f64();
    m.visible_labels = labels;
    file.rbm = std::move(m);
  }
  if (flags & kHasFixed) {
    FixedRbm f;
    f.n_visible = nv;
    f.n_hidden = nh;
    f.grid.total_bits = static_cast<int>(r.u32());
    f.grid.frac_bits = static_cast<int>(r.u32());
    SigmoidLutConfig lut_cfg;
    lut_cfg.compare_bits = static_cast<int>(r.u32());
    lut_cfg.saturation = static_cast<int>(r.u32());
    lut_cfg.frac_bits = f.grid.frac_bits;
    f.lfsr.width = static_cast<int>(r.u32());
    f.lfsr.taps = r.u32();
    f.w_row.resize(static_cast<std::size_t>(nv) * nh);
    for (auto& q : f.w_row) q = r.i32();
    f.visible_bias_q.resize(nv);
    for (auto& q : f.visible_bias_q) q = r.i32();
    f.hidden_bias_q.resize(nh);
    for (auto& q : f.hidden_bias_q) q = r.i32();
    f.lfsr_seeds.resize(static_cast<std::size_t>(nv) + nh);
    for (auto& s : f.lfsr_seeds) s = r.u32();
    f.provenance = r.str();
    f.visible_labels = labels;
    f.rebuild_transpose();
    f.lut = build_sigmoid_lut(lut_cfg);  // rebuilt, not stored
    file.fixed = std::move(f);
  }
  if (flags & kHasMeta) {
    json meta = json::parse(r.str());
    file.fields = fields_from_json(meta.at("fields"));
    file.bit_order = meta.value("bit_order", "little");
  }
  check_dims(file);
  return file;
}

json model_to_json(const ModelFile& file) {
  check_dims(file);
  auto [nv, nh] = model_dims(file);
  json j = {{"format", "rbmfuse-model"},
            {"version", kVersion},
            {"n_visible", nv},
            {"n_hidden", nh},
            {"labels", model_labels(file)},
            {"fields", fields_to_json(file.fields)},
            {"bit_order", file.bit_order}};
  if (file.rbm) {
    const Rbm& m = *file.rbm;
    json weights = json::array();
    for (int i = 0; i < nv; ++i) {
      json row = json::array();
      for (int jj = 0; jj < nh; ++jj) row.push_back(m.weights(i, jj));
      weights.push_back(std::move(row));
    }
    std::vector<double> vb(m.visible_bias.data(), m.visible_bias.data() + nv);
    std::vector<double> hb(m.hidden_bias.data(), m.hidden_bias.data() + nh);
    j["float"] = {{"weights", std::move(weights)},
                  {"visible_bias", vb},
                  {"hidden_bias", hb}};
  }
  if (file.fixed) {
    const FixedRbm& f = *file.fixed;
    json weights = json::array();
    for (int i = 0; i < nv; ++i) {
      json row = json::array();
      for (int jj = 0; jj < nh; ++jj) row.push_back(f.w_row[i * nh + jj]);
      weights.push_back(std::move(row));
    }
    j["fixed"] = {{"grid", {{"total_bits", f.grid.total_bits},
                            {"frac_bits", f.grid.frac_bits}}},
                  {"lut", {{"compare_bits", f.lut.compare_bits},
                           {"saturation", f.lut.saturation}}},
                  {"lfsr", {{"width", f.lfsr.width}, {"taps", f.lfsr.taps}}},
                  {"weights_q", std::move(weights)},
                  {"visible_bias_q", f.visible_bias_q},
                  {"hidden_bias_q", f.hidden_bias_q},
                  {"seeds", f.lfsr_seeds},
                  {"provenance", f.provenance}};
  }
  return j;
}

ModelFile model_from_json(const json& j) {
  if (j.value("format", "") != "rbmfuse-model")
    throw std::runtime_error("not a model document");
  int nv = j.at("n_visible").get<int>();
  int nh = j.at("n_hidden").get<int>();
  auto labels = j.at("labels").get<std::vector<std::string>>();
  ModelFile file;
  if (j.contains("float")) {
    const json& fl = j.at("float");
    Rbm m = Rbm::zeros(nv, nh);
    const json& weights = fl.at("weights");
    for (int i = 0; i < nv; ++i)
      for (int jj = 0; jj < nh; ++jj)
        m.weights(i, jj) = weights.at(i).at(jj).get<double>();
    for (int i = 0; i < nv; ++i)
      m.visible_bias[i] = fl.at("visible_bias").at(i).get<double>();
    for (int jj = 0; jj < nh; ++jj)
      m.hidden_bias[jj] = fl.at("hidden_bias").at(jj).get<double>();
    m.visible_labels = labels;
    file.rbm = std::move(m);
  }
  if (j.contains("fixed")) {
    const json& fx = j.at("fixed");
    FixedRbm f;
    f.n_visible = nv;
    f.n_hidden = nh;
    f.grid.total_bits = fx.at("grid").at("total_bits").get<int>();
    f.grid.frac_bits = fx.at("grid").at("frac_bits").get<int>();
    SigmoidLutConfig lut_cfg;
    lut_cfg.compare_bits = fx.at("lut").at("compare_bits").get<int>();
    lut_cfg.saturation = fx.at("lut").at("saturation").get<int>();
    lut_cfg.frac_bits = f.grid.frac_bits;
    f.lfsr.width = fx.at("lfsr").at("width").get<int>();
    f.lfsr.taps = fx.at("lfsr").at("taps").get<std::uint32_t>();
    f.w_row.resize(static_cast<std::size_t>(nv) * nh);
    for (int i = 0; i < nv; ++i)
      for (int jj = 0; jj < nh; ++jj)
        f.w_row[i * nh + jj] = fx.at("weights_q").at(i).at(jj).get<std::int32_t>();
    f.visible_bias_q = fx.at("visible_bias_q").get<std::vector<std::int32_t>>();
    f.hidden_bias_q = fx.at("hidden_bias_q").get<std::vector<std::int32_t>>();
    f.lfsr_seeds = fx.at("seeds").get<std::vector<std::uint32_t>>();
    f.provenance = fx.value("provenance", "");
    f.visible_labels = labels;
    f.rebuild_transpose();
    f.lut = build_sigmoid_lut(lut_cfg);
    file.fixed = std::move(f);
  }
  if (j.contains("fields")) file.fields = fields_from_json(j.at("fields"));
  file.bit_order = j.value("bit_order", "little");
  check_dims(file);
  return file;
}

namespace {

void pack_rows(Writer& w, int width_bits, const std::vector<Bits>& rows) {
  const std::size_t stride = (static_cast<std::size_t>(width_bits) + 7) / 8;
  std::vector<std::uint8_t> packed(stride);
  for (const auto& row : rows) {
    detail::check_bits(row, width_bits, "sample row");
    std::fill(packed.begin(), packed.end(), 0);
    for (int k = 0; k < width_bits; ++k)
      packed[k / 8] |= static_cast<std::uint8_t>((row[k] & 1u) << (k % 8));
    w.raw(packed.data(), stride);
  }
}

std::vector<Bits> unpack_rows(Reader& r, int width_bits, std::uint64_t count) {
  const std::size_t stride = (static_cast<std::size_t>(width_bits) + 7) / 8;
  std::vector<Bits> rows;
  rows.reserve(count);
  std::vector<std::uint8_t> packed(stride);
  for (std::uint64_t n = 0; n < count; ++n) {
    r.raw(packed.data(), stride);
    Bits row(width_bits);
    for (int k = 0; k < width_bits; ++k)
      row[k] = (packed[k / 8] >> (k % 8)) & 1u;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void save_samples(const std::string& path, int width_bits,
                  const std::vector<Bits>& rows) {
  Writer w;
  w.u32(kStreamMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(width_bits));
  w.u64(rows.size());
  pack_rows(w, width_bits, rows);
  write_file(path, w.out.str());
}

std::vector<Bits> load_samples(const std::string& path) {
  Reader r(read_file(path));
  if (r.u32() != kStreamMagic)
    throw std::runtime_error(path + " is not a sample stream");
  if (r.u32() != kVersion)
    throw std::runtime_error(path + ": unsupported stream version");
  int width = static_cast<int>(r.u32());
  std::uint64_t count = r.u64();
  return unpack_rows(r, width, count);
}

void save_trace(const std::string& path, const GoldenTrace& trace) {
  Writer w;
  w.u32(kTraceMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(trace.lfsr.width));
  w.u32(trace.lfsr.taps);
  w.u32(static_cast<std::uint32_t>(trace.compare_bits));
  w.u32(static_cast<std::uint32_t>(trace.seeds.size()));
  for (auto s : trace.seeds) w.u32(s);
  w.u64(trace.params_hash);
  w.u32(static_cast<std::uint32_t>(trace.width_bits));
  w.u64(trace.samples.size());
  pack_rows(w, trace.width_bits, trace.samples);
  write_file(path, w.out.str());
}

GoldenTrace load_trace(const std::string& path) {
  Reader r(read_file(path));
  if (r.u32() != kTraceMagic)
    throw std::runtime_error(path + " is not a golden trace");
  if (r.u32() != kVersion)
    throw std::runtime_error(path + ": unsupported trace version");
  GoldenTrace t;
  t.lfsr.width = static_cast<int>(r.u32());
  t.lfsr.taps = r.u32();
  t.compare_bits = static_cast<int>(r.u32());
  t.seeds.resize(r.u32());
  for (auto& s : t.seeds) s = r.u32();
  t.params_hash = r.u64();
  t.width_bits = static_cast<int>(r.u32());
  std::uint64_t count = r.u64();
  t.samples = unpack_rows(r, t.width_bits, count);
  return t;
}

std::uint64_t fixed_params_hash(const FixedRbm& model) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  mix(static_cast<std::uint64_t>(model.grid.total_bits));
  mix(static_cast<std::uint64_t>(model.grid.frac_bits));
  mix(static_cast<std::uint64_t>(model.lut.compare_bits));
  mix(static_cast<std::uint64_t>(model.lut.saturation));
  for (auto q : model.w_row) mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(q)));
  for (auto q : model.visible_bias_q) mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(q)));
  for (auto q : model.hidden_bias_q) mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(q)));
  return h;
}

void write_csv(const std::string& path, const nlohmann::json& config,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  out << "# " << config.dump() << "\n";
  for (std::size_t c = 0; c < header.size(); ++c)
    out << header[c] << (c + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("CSV row width does not match header");
    for (std::size_t c = 0; c < row.size(); ++c)
      out << row[c] << (c + 1 < row.size() ? "," : "\n");
  }
  write_file(path, out.str());
}

std::string fmt_double(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

}  // namespace rbmfuse

#include "coarsehall/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace coarsehall {

using nlohmann::json;

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::uint64_t cloud_hash(const SiteCloud& cloud) {
  std::string bytes = cloud.label();
  for (const auto& s : cloud.sites()) {
    bytes.append(reinterpret_cast<const char*>(&s.x), sizeof(double));
    bytes.append(reinterpret_cast<const char*>(&s.y), sizeof(double));
  }
  return fnv1a_hash(bytes);
}

std::string cloud_to_json(const SiteCloud& cloud) {
  json j;
  j["label"] = cloud.label();
  json sites = json::array();
  for (const auto& s : cloud.sites()) sites.push_back({s.x, s.y});
  j["sites"] = std::move(sites);
  if (cloud.is_square_lattice()) {
    j["lattice"] = {{"nx", cloud.lattice_nx()},
                    {"ny", cloud.lattice_ny()},
                    {"spacing", cloud.lattice_spacing()}};
  }
  return j.dump();
}

CloudPtr cloud_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  std::vector<Vec2> sites;
  for (const auto& s : j.at("sites")) sites.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
  auto cloud = std::make_shared<SiteCloud>(std::move(sites), j.value("label", "cloud"));
  if (j.contains("lattice")) {
    const auto& l = j["lattice"];
    cloud->set_lattice_shape(l.at("nx").get<int>(), l.at("ny").get<int>(),
                             l.at("spacing").get<double>());
  }
  return cloud;
}

std::string mask_to_json(const RegionMask& mask) {
  json j;
  j["sites"] = mask.indices();
  return j.dump();
}

std::string partition_to_json(const QPartition& p) {
  json parts = json::array();
  for (const auto& part : p.parts()) parts.push_back(part.indices());
  json j;
  j["parts"] = std::move(parts);
  return j.dump();
}

std::string pairing_to_json(const PairingResult& r) {
  json j;
  j["raw_re"] = r.raw.real();
  j["raw_im"] = r.raw.imag();
  j["normalized"] = r.normalized;
  j["residual"] = r.residual;
  j["provenance"] = r.provenance;
  return j.dump();
}

std::string operator_to_json(const SiteOperator& l) {
  json j;
  j["cloud_hash"] = hash_hex(cloud_hash(*l.cloud));
  j["dim"] = l.dim();
  json data = json::array();
  for (Eigen::Index i = 0; i < l.matrix.rows(); ++i)
    for (Eigen::Index k = 0; k < l.matrix.cols(); ++k) {
      data.push_back(l.matrix(i, k).real());
      data.push_back(l.matrix(i, k).imag());
    }
  j["data_row_major_interleaved"] = std::move(data);
  return j.dump();
}

SiteOperator operator_from_json(const std::string& json_text, const CloudPtr& cloud) {
  const json j = json::parse(json_text);
  if (j.at("cloud_hash").get<std::string>() != hash_hex(cloud_hash(*cloud)))
    throw std::invalid_argument("operator_from_json: cloud hash mismatch");
  const auto n = j.at("dim").get<std::size_t>();
  if (n != cloud->size()) throw std::invalid_argument("operator_from_json: dimension mismatch");
  const auto& data = j.at("data_row_major_interleaved");
  if (data.size() != 2 * n * n) throw std::invalid_argument("operator_from_json: bad data length");
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = data[k++].get<double>();
      const double im = data[k++].get<double>();
      m(i, c) = Complex(re, im);
    }
  return {std::move(m), cloud};
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

}  // namespace coarsehall

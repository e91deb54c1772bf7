#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "coarsehall/experiments.hpp"
#include "coarsehall/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coarsehall;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertionFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::size_t max_sites_cap() {
  if (const char* env = std::getenv("COARSE_HALL_MAX_SITES"))
    return static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
  return 10000;
}

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config file not found: " + path);
  json cfg = json::parse(f);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    json parsed;
    try {
      parsed = json::parse(val);
    } catch (const json::parse_error&) {
      parsed = val;  // bare string
    }
    cfg[key] = parsed;
  }
  return cfg;
}

CloudPtr build_cloud(const json& cfg) {
  const std::string model = cfg.at("model").get<std::string>();
  if (model == "hofstadter" || model == "checkerboard") {
    return build_square_lattice(cfg.value("nx", 32), cfg.value("ny", 32),
                                cfg.value("spacing", 1.0), max_sites_cap());
  }
  if (model == "amorphous") {
    return build_poisson_cloud(cfg.value("density", 1.0), cfg.value("width", 20.0),
                               cfg.value("height", 20.0), cfg.value("seed", 1ULL),
                               max_sites_cap());
  }
  throw std::invalid_argument("unknown model: " + model + " (config key: model)");
}

Hamiltonian build_model(const json& cfg) {
  const std::string model = cfg.at("model").get<std::string>();
  auto cloud = build_cloud(cfg);
  if (model == "hofstadter") {
    const double flux =
        cfg.contains("flux_p")
            ? static_cast<double>(cfg.at("flux_p").get<int>()) / cfg.at("flux_q").get<int>()
            : cfg.value("flux", 0.25);
    return hofstadter(cloud, flux, cfg.value("t", 1.0));
  }
  if (model == "checkerboard")
    return checkerboard_trivial(cloud, cfg.value("t", 1.0), cfg.value("delta", 3.0));
  return amorphous_magnetic(cloud, cfg.value("hop_range", 1.4), cfg.value("t", 1.0),
                            cfg.value("field", 2.0 * M_PI / 8.0));
}

double resolve_fermi_energy(const Hamiltonian& h, const json& cfg) {
  if (cfg.contains("fermi_energy")) return cfg.at("fermi_energy").get<double>();
  return pick_fermi_energy(h, cfg.value("gap_index", 1),
                           cfg.value("gap_threshold", 0.1));
}

QPartition build_partition(const CloudPtr& cloud, const json& cfg) {
  const std::string preset = cfg.value("partition", "sectors");
  if (preset == "sectors") {
    double minx = kInfiniteDistance, maxx = -kInfiniteDistance;
    double miny = kInfiniteDistance, maxy = -kInfiniteDistance;
    for (const auto& s : cloud->sites()) {
      minx = std::min(minx, s.x);
      maxx = std::max(maxx, s.x);
      miny = std::min(miny, s.y);
      maxy = std::max(maxy, s.y);
    }
    const Vec2 center{0.5 * (minx + maxx) + 0.137, 0.5 * (miny + maxy) + 0.071};
    return sector_partition(cloud, center,
                            {M_PI / 2, 7 * M_PI / 6, 11 * M_PI / 6});
  }
  if (preset == "coordinate-quadrant") {
    const HalfSpacePair hs =
        coordinate_halfspaces(cloud, cfg.value("x0", 0.0), cfg.value("y0", 0.0));
    return halfspaces_to_partition(hs);
  }
  throw std::invalid_argument("unknown partition preset: " + preset +
                              " (config key: partition)");
}

struct RunContext {
  json cfg;
  std::string config_hash;
  fs::path out_dir;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
};

void write_artifacts(const RunContext& ctx, const std::string& command,
                     const ExperimentTable& table, const std::string& suite_name) {
  const std::string stem = command + "-" + ctx.config_hash;
  write_text_file((ctx.out_dir / (stem + ".csv")).string(), table.to_csv());
  write_text_file((ctx.out_dir / (stem + ".json")).string(),
                  table.summary_json(suite_name) + "\n");
  std::cout << suite_name << ": " << table.pass_count() << " pass, " << table.fail_count()
            << " fail, worst defect " << format_number(table.worst_defect()) << "\n";
}

int cmd_geometry(const RunContext& ctx) {
  auto cloud = build_cloud(ctx.cfg);
  std::vector<double> radii = ctx.cfg.value("r_samples", std::vector<double>{1, 2, 4, 8});
  ExperimentTable t;
  t.config_hash = ctx.config_hash;
  t.seed = ctx.seed;
  const std::string op = ctx.cfg.value("op", "growth");
  if (op == "growth") {
    const GrowthProfile g = volume_growth_profile(cloud, radii);
    t.schema = {"r", "value"};
    for (const auto& row : g.rows) t.add_row({format_number(row.r), format_number(row.value)});
    std::cout << "growth exponent " << format_number(g.exponent) << "\n";
  } else if (op == "transversality") {
    const QPartition part = build_partition(cloud, ctx.cfg);
    const auto rows = transversality_profile(part.parts(), radii);
    t.schema = {"r", "value"};
    for (const auto& row : rows) t.add_row({format_number(row.r), format_number(row.value)});
  } else if (op == "excisiveness") {
    const QPartition part = build_partition(cloud, ctx.cfg);
    std::vector<RegionMask> regions;
    const double pre = ctx.cfg.value("pre_thicken", 2.0);
    for (const auto& m : part.parts()) regions.push_back(thicken(m, pre));
    const auto rep = excisiveness_profile(regions, radii);
    t.schema = {"r", "value"};
    for (std::size_t i = 0; i < rep.r_samples.size(); ++i)
      t.add_row({format_number(rep.r_samples[i]), format_number(rep.f_hat[i])});
    std::cout << "mu_hat " << format_number(rep.mu_hat) << " verdict "
              << to_string(rep.verdict) << "\n";
  } else {
    throw std::invalid_argument("unknown geometry op: " + op + " (config key: op)");
  }
  write_artifacts(ctx, "geometry", t, "geometry-" + op);
  return kExitPass;
}

int cmd_model(const RunContext& ctx) {
  const Hamiltonian h = build_model(ctx.cfg);
  json j;
  j["sites"] = h.cloud->size();
  j["hermiticity_defect"] = h.hermiticity_defect();
  j["locality_defect"] = h.locality_defect();
  j["cloud_hash"] = hash_hex(cloud_hash(*h.cloud));
  j["params"] = h.params;
  const std::string stem = "model-" + ctx.config_hash;
  write_text_file((ctx.out_dir / (stem + ".json")).string(), j.dump(2) + "\n");
  write_text_file((ctx.out_dir / (stem + ".csv")).string(), cloud_to_json(*h.cloud) + "\n");
  std::cout << "model: " << h.cloud->size() << " sites, hermiticity defect "
            << format_number(h.hermiticity_defect()) << "\n";
  return kExitPass;
}

int cmd_spectrum(const RunContext& ctx) {
  const Hamiltonian h = build_model(ctx.cfg);
  const SpectrumInfo info = spectrum(h, ctx.cfg.value("gap_threshold", 0.1));
  ExperimentTable t;
  t.config_hash = ctx.config_hash;
  t.seed = ctx.seed;
  t.schema = {"index", "eigenvalue"};
  for (std::size_t i = 0; i < info.eigenvalues.size(); ++i)
    t.add_row({std::to_string(i), format_number(info.eigenvalues[i])});
  write_artifacts(ctx, "spectrum", t, "spectrum");
  for (const auto& g : info.gaps)
    std::cout << "gap [" << format_number(g.lower) << ", " << format_number(g.upper) << "] width "
              << format_number(g.width()) << "\n";
  return kExitPass;
}

int cmd_pairing(const RunContext& ctx) {
  const Hamiltonian h = build_model(ctx.cfg);
  const double e = resolve_fermi_energy(h, ctx.cfg);
  const SiteOperator p = SiteOperator::from_projection(fermi_projection(h, e));
  const QPartition part = build_partition(h.cloud, ctx.cfg);
  const double r = ctx.cfg.value("window_r", 8.0);
  const RegionMask k = bulk_window(part, r);
  const PairingResult res = bulk_conductance(part, k, p);
  const std::string stem = "pairing-" + ctx.config_hash;
  write_text_file((ctx.out_dir / (stem + ".json")).string(), pairing_to_json(res) + "\n");
  ExperimentTable t;
  t.config_hash = ctx.config_hash;
  t.seed = ctx.seed;
  t.schema = {"E", "r", "sigma_K", "residual"};
  t.add_row({format_number(e), format_number(r), format_number(res.normalized),
             format_number(res.residual)});
  write_text_file((ctx.out_dir / (stem + ".csv")).string(), t.to_csv());
  std::cout << "pairing: sigma_K " << format_number(res.normalized) << " residual "
            << format_number(res.residual) << "\n";
  const double tol = ctx.cfg.value("tolerance", -1.0);
  if (tol >= 0.0 && std::abs(res.normalized - std::round(res.normalized)) > tol)
    return kExitAssertionFailure;
  return kExitPass;
}

int cmd_decay(const RunContext& ctx) {
  const Hamiltonian h = build_model(ctx.cfg);
  const double e = resolve_fermi_energy(h, ctx.cfg);
  const SiteOperator p = SiteOperator::from_projection(fermi_projection(h, e));
  const Tiling tiling = build_tiling(h.cloud, ctx.cfg.value("tile_r0", 2.0));
  std::vector<double> edges = ctx.cfg.value("bins", std::vector<double>{0, 2, 4, 6, 8, 10, 12});
  const auto profile = decay_profile(p, tiling, edges);
  ExperimentTable t;
  t.config_hash = ctx.config_hash;
  t.seed = ctx.seed;
  t.schema = {"bin_lower", "bin_upper", "max_block_trace_norm"};
  for (const auto& b : profile)
    t.add_row({format_number(b.lower), format_number(b.upper),
               format_number(b.max_block_norm)});
  write_artifacts(ctx, "decay", t, "decay");
  std::cout << "decay slope " << format_number(decay_slope(profile)) << "\n";
  return kExitPass;
}

int cmd_verify(const RunContext& ctx) {
  const int instances = ctx.cfg.value("instances", 20);
  const std::size_t n_min = ctx.cfg.value("n_min", 8);
  const std::size_t n_max = ctx.cfg.value("n_max", 32);
  ExperimentTable all;
  all.config_hash = ctx.config_hash;
  all.seed = ctx.seed;
  all.schema = {"identity", "defect", "tolerance", "pass"};
  std::mt19937_64 rng(ctx.seed);
  for (int inst = 0; inst < instances; ++inst) {
    const std::size_t n = n_min + rng() % (n_max - n_min + 1);
    auto cloud = build_square_lattice(static_cast<int>(n), 1, 1.0);
    const SiteOperator p = random_idempotent(cloud, rng());
    const QPartition part = random_partition(cloud, rng());
    const HalfSpacePair hs =
        coordinate_halfspaces(cloud, static_cast<double>(rng() % n), 0.5);
    const ExperimentTable t = identity_suite(p, part, hs);
    for (const auto& row : t.rows) all.rows.push_back(row);
  }
  {
    auto cloud = build_square_lattice(8, 8, 1.0);
    const SiteOperator p = random_hermitian_idempotent(cloud, ctx.seed + 99);
    const HalfSpacePair hs = coordinate_halfspaces(cloud, 3.5, 3.5);
    const ExperimentTable t = determinant_identity_suite(p, hs, ctx.seed + 7);
    for (const auto& row : t.rows) all.rows.push_back(row);
  }
  write_artifacts(ctx, "verify", all, "verify");
  return all.all_pass() ? kExitPass : kExitAssertionFailure;
}

int cmd_sweep(const RunContext& ctx) {
  QuantizationConfig qc;
  qc.nx = ctx.cfg.value("nx", 32);
  qc.ny = ctx.cfg.value("ny", 32);
  qc.flux_p = ctx.cfg.value("flux_p", 1);
  qc.flux_q = ctx.cfg.value("flux_q", 4);
  qc.t = ctx.cfg.value("t", 1.0);
  qc.gap_index = ctx.cfg.value("gap_index", 1);
  qc.r_samples = ctx.cfg.value("r", std::vector<double>{4, 6, 8, 10});
  qc.disorder_w = ctx.cfg.value("disorder_w", 0.0);
  qc.disorder_seeds = ctx.cfg.value("disorder_seeds", std::vector<std::uint64_t>{});
  if (qc.r_samples.empty()) {
    ExperimentTable t;
    t.config_hash = ctx.config_hash;
    t.seed = ctx.seed;
    t.schema = {"kind", "E", "r", "sigma_K", "residual", "oracle", "deviation", "defect",
                "pass"};
    write_artifacts(ctx, "sweep", t, "sweep");
    return kExitPass;
  }

  // resumable: per-row done markers keyed by the config hash
  const fs::path marker_dir = ctx.out_dir / ("sweep-" + ctx.config_hash + ".rows");
  fs::create_directories(marker_dir);
  const fs::path marker = marker_dir / "done.csv";
  ExperimentTable t;
  t.config_hash = ctx.config_hash;
  t.seed = ctx.seed;
  if (fs::exists(marker)) {
    std::ifstream f(marker);
    std::string header;
    std::getline(f, header);
    std::stringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) t.schema.push_back(col);
    std::string line;
    while (std::getline(f, line)) {
      std::vector<std::string> cells;
      std::stringstream ls(line);
      while (std::getline(ls, col, ',')) cells.push_back(col);
      while (cells.size() < t.schema.size()) cells.emplace_back();
      t.rows.push_back(cells);
    }
  } else {
    t = quantization_experiment(qc);
    t.config_hash = ctx.config_hash;
    t.seed = ctx.seed;
    write_text_file(marker.string(), t.to_csv());
  }
  write_artifacts(ctx, "sweep", t, "sweep");
  return t.all_pass() ? kExitPass : kExitAssertionFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarse-hall: windowed Hall-conductance quantization on finite samples"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global flags after the subcommand too

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  unsigned jobs = std::thread::hardware_concurrency();
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--jobs", jobs, "worker count");
  app.add_option("--set", overrides, "override config key=value (repeatable)");

  auto* c_model = app.add_subcommand("model", "build a model and report validators");
  auto* c_spectrum = app.add_subcommand("spectrum", "eigenvalues and spectral gaps");
  auto* c_pairing = app.add_subcommand("pairing", "windowed bulk conductance");
  auto* c_sweep = app.add_subcommand("sweep", "quantization sweep over a parameter grid");
  auto* c_verify = app.add_subcommand("verify", "exact operator-identity suites");
  auto* c_decay = app.add_subcommand("decay", "kernel decay profile of the Fermi projection");
  auto* c_geometry = app.add_subcommand("geometry", "geometry diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunContext ctx;
    ctx.cfg = load_config(config_path, overrides);
    ctx.cfg["_seed"] = seed;  // seed participates in the artifact identity
    ctx.config_hash = hash_hex(fnv1a_hash(ctx.cfg.dump()));
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    ctx.jobs = jobs;
    fs::create_directories(ctx.out_dir);

    if (c_model->parsed()) return cmd_model(ctx);
    if (c_spectrum->parsed()) return cmd_spectrum(ctx);
    if (c_pairing->parsed()) return cmd_pairing(ctx);
    if (c_sweep->parsed()) return cmd_sweep(ctx);
    if (c_verify->parsed()) return cmd_verify(ctx);
    if (c_decay->parsed()) return cmd_decay(ctx);
    if (c_geometry->parsed()) return cmd_geometry(ctx);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const contract_error& e) {
    std::cerr << "assertion failure: " << e.what() << "\n";
    return kExitAssertionFailure;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: {\"error\":\"" << e.what() << "\"}\n";
    return kExitNumerical;
  }
}

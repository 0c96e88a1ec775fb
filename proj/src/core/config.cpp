#include "core/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace fredlab::config {

namespace {

constexpr std::pair<Experiment, const char*> kExperiments[] = {
    {Experiment::bulk_index, "bulk-index"},         {Experiment::edge_index, "edge-index"},
    {Experiment::bec_check, "bec-check"},           {Experiment::phase_scan, "phase-scan"},
    {Experiment::mu_scan, "mu-scan"},               {Experiment::homotopy_check, "homotopy-check"},
    {Experiment::locality_check, "locality-check"}, {Experiment::selfcheck, "selfcheck"},
};

// Reads the members of one JSON object, rejecting keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::schema, path_ + ": expected an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) fail(ErrorCode::schema, path_ + ": unknown key '" + key + "'");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::runtime_error("expected a number");
      } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_integer()) throw std::runtime_error("expected an integer");
        if (std::is_same_v<T, std::uint64_t> && v.is_number_integer() && !v.is_number_unsigned())
          throw std::runtime_error("expected a non-negative integer");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::runtime_error("expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::runtime_error("expected a string");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      fail(ErrorCode::schema, path_ + "." + key + ": " + e.what());
    }
  }

  template <class T>
  void get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T v{};
    get(key, v);
    out = v;
  }

  template <class T>
  void get_list(const char* key, std::vector<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) fail(ErrorCode::schema, path_ + "." + key + ": expected an array");
    std::vector<T> items;
    for (size_t i = 0; i < v.size(); ++i) {
      json wrap = {{"item", v[i]}};
      Section s(wrap, path_ + "." + key + "[" + std::to_string(i) + "]");
      T item{};
      s.get("item", item);
      items.push_back(item);
    }
    out = std::move(items);
  }

  bool has(const char* key) const { return j_.contains(key); }
  Section sub(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : empty, path_ + "." + key);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::schema, what);
}

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& [k, name] : kExperiments)
    if (k == e) return name;
  return "?";
}

Experiment experiment_from_string(const std::string& s) {
  for (const auto& [k, name] : kExperiments)
    if (s == name) return k;
  fail(ErrorCode::schema, "unknown experiment '" + s + "'");
}

void RunConfig::validate() const {
  require(model.mass == model.mass && std::isfinite(model.mass), "model.mass must be finite");
  require(model.family == models::Family::bhz || model.inter_block == 0.0,
          "model.inter_block only applies to the bhz family");
  require(disorder.amplitude >= 0.0, "disorder.amplitude must be non-negative");
  require(!disorder.gap_fraction || *disorder.gap_fraction >= 0.0, "disorder.gap_fraction must be non-negative");
  require(geometry.side >= 4 && geometry.side % 2 == 0, "geometry.side must be even and >= 4");
  require(geometry.strip_length >= 4 && geometry.strip_length % 2 == 0, "geometry.strip_length must be even and >= 4");
  require(geometry.strip_width >= 2, "geometry.strip_width must be >= 2");
  require(index.window_fraction > 0.0 && index.window_fraction < 1.0, "index.window_fraction must lie in (0, 1)");
  require(index.fedosov_tol > 0.0 && index.fedosov_tol < 0.5, "index.fedosov_tol must lie in (0, 0.5)");
  require(index.fedosov_step_tol > 0.0, "index.fedosov_step_tol must be positive");
  require(index.fedosov_n_start >= 1 && index.fedosov_n_max >= index.fedosov_n_start,
          "index: need 1 <= fedosov_n_start <= fedosov_n_max");
  require(index.fredholm_gap_threshold > 0.0, "index.fredholm_gap_threshold must be positive");
  require(index.localization_radius_fraction > 0.0 && index.localization_radius_fraction <= 0.5,
          "index.localization_radius_fraction must lie in (0, 0.5]");
  require(index.kernel_policy == "relative-gap" || index.kernel_policy == "absolute",
          "index.kernel_policy must be relative-gap or absolute");
  require(index.kernel_tau > 0.0 && index.kernel_below > 0.0 && index.min_gap_ratio > 1.0,
          "index: kernel thresholds must be positive, min_gap_ratio > 1");
  require(!boundary.kinds.empty(), "boundary.kinds must not be empty");
  for (const auto& k : boundary.kinds)
    require(k == "dirichlet" || k == "loc2-perturbation", "boundary.kinds: unknown kind '" + k + "'");
  require(boundary.depth >= 1, "boundary.depth must be >= 1");
  require(scan.step > 0.0 && scan.to >= scan.from, "scan: need step > 0 and to >= from");
  require(mu_scan.count >= 2, "mu_scan.count must be >= 2");
  require(homotopy.samples >= 2 && homotopy.max_refinements >= 0, "homotopy: samples >= 2, max_refinements >= 0");
  require(homotopy.x1_length >= 4, "homotopy: x1_length >= 4");
  for (const auto& p : homotopy.paths)
    require(p == "corner-flatten" || p == "truncate-flatten" || p == "boundary-conditions" || p == "physical" ||
                p == "adversarial",
            "homotopy.paths: unknown path '" + p + "'");
  require(!locality.im_z.empty(), "locality.im_z must not be empty");
  for (double y : locality.im_z) require(y > 0.0, "locality.im_z entries must be positive");
  require(locality.side >= 4 && locality.side % 2 == 0 && locality.hs_side >= 4 && locality.hs_side % 2 == 0,
          "locality sides must be even and >= 4");
  require(locality.hs_extension_order >= 1 && locality.hs_extension_order <= 8, "locality.hs_extension_order in [1, 8]");
  require(locality.hs_nodes >= 4, "locality.hs_nodes must be >= 4");
  require(oracle.n_k >= 32, "oracle.n_k must be >= 32");
  require(oracle.strip_width >= 4, "oracle.strip_width must be >= 4");
  require(!seeds.empty(), "seeds must not be empty");
  require(workers >= 1, "workers must be >= 1");
  require(!output.dir.empty(), "output.dir must not be empty");
}

RunConfig parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::schema, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  {
    Section root(j, "config");
    std::string experiment;
    root.get("experiment", experiment);
    if (!root.has("experiment")) fail(ErrorCode::schema, "config.experiment is required");
    c.experiment = experiment_from_string(experiment);
    {
      Section m = root.sub("model");
      std::string family = models::to_string(c.model.family);
      m.get("family", family);
      try {
        c.model.family = models::family_from_string(family);
      } catch (const Error& e) {
        fail(ErrorCode::schema, e.what());
      }
      m.get("mass", c.model.mass);
      m.get("inter_block", c.model.inter_block);
    }
    {
      Section d = root.sub("disorder");
      d.get("amplitude", c.disorder.amplitude);
      d.get("gap_fraction", c.disorder.gap_fraction);
    }
    {
      Section g = root.sub("geometry");
      g.get("side", c.geometry.side);
      g.get("strip_length", c.geometry.strip_length);
      g.get("strip_width", c.geometry.strip_width);
      g.get("periodic", c.geometry.periodic);
      g.get("strip_periodic_x1", c.geometry.strip_periodic_x1);
    }
    {
      Section s = root.sub("index");
      auto& x = c.index;
      s.get("window_fraction", x.window_fraction);
      s.get("fedosov_tol", x.fedosov_tol);
      s.get("fedosov_step_tol", x.fedosov_step_tol);
      s.get("fedosov_n_start", x.fedosov_n_start);
      s.get("fedosov_n_max", x.fedosov_n_max);
      s.get("fredholm_gap_threshold", x.fredholm_gap_threshold);
      s.get("localization_radius_fraction", x.localization_radius_fraction);
      s.get("kernel_policy", x.kernel_policy);
      s.get("kernel_tau", x.kernel_tau);
      s.get("kernel_below", x.kernel_below);
      s.get("min_gap_ratio", x.min_gap_ratio);
    }
    {
      Section s = root.sub("boundary");
      s.get_list("kinds", c.boundary.kinds);
      s.get("amplitude", c.boundary.amplitude);
      s.get("depth", c.boundary.depth);
    }
    {
      Section s = root.sub("scan");
      s.get("from", c.scan.from);
      s.get("to", c.scan.to);
      s.get("step", c.scan.step);
    }
    {
      Section s = root.sub("mu_scan");
      s.get("from", c.mu_scan.from);
      s.get("to", c.mu_scan.to);
      s.get("count", c.mu_scan.count);
    }
    {
      Section s = root.sub("homotopy");
      s.get_list("paths", c.homotopy.paths);
      s.get("samples", c.homotopy.samples);
      s.get("max_refinements", c.homotopy.max_refinements);
      s.get("adversarial_mass_to", c.homotopy.adversarial_mass_to);
      s.get("x1_length", c.homotopy.x1_length);
    }
    {
      Section s = root.sub("locality");
      s.get_list("im_z", c.locality.im_z);
      s.get("re_z", c.locality.re_z);
      s.get("side", c.locality.side);
      s.get("hs_side", c.locality.hs_side);
      s.get("hs_extension_order", c.locality.hs_extension_order);
      s.get("hs_nodes", c.locality.hs_nodes);
    }
    {
      Section s = root.sub("oracle");
      s.get("n_k", c.oracle.n_k);
      s.get("strip_width", c.oracle.strip_width);
    }
    root.get_list("seeds", c.seeds);
    root.get("workers", c.workers);
    {
      Section s = root.sub("output");
      s.get("dir", c.output.dir);
      s.get("stem", c.output.stem);
    }
  }
  c.validate();
  return c;
}

RunConfig load(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

json to_json(const RunConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["model"] = {{"family", models::to_string(c.model.family)}, {"mass", c.model.mass}, {"inter_block", c.model.inter_block}};
  j["disorder"] = {{"amplitude", c.disorder.amplitude},
                   {"gap_fraction", c.disorder.gap_fraction ? json(*c.disorder.gap_fraction) : json(nullptr)}};
  j["geometry"] = {{"side", c.geometry.side},
                   {"strip_length", c.geometry.strip_length},
                   {"strip_width", c.geometry.strip_width},
                   {"periodic", c.geometry.periodic},
                   {"strip_periodic_x1", c.geometry.strip_periodic_x1}};
  const auto& x = c.index;
  j["index"] = {{"window_fraction", x.window_fraction},
                {"fedosov_tol", x.fedosov_tol},
                {"fedosov_step_tol", x.fedosov_step_tol},
                {"fedosov_n_start", x.fedosov_n_start},
                {"fedosov_n_max", x.fedosov_n_max},
                {"fredholm_gap_threshold", x.fredholm_gap_threshold},
                {"localization_radius_fraction", x.localization_radius_fraction},
                {"kernel_policy", x.kernel_policy},
                {"kernel_tau", x.kernel_tau},
                {"kernel_below", x.kernel_below},
                {"min_gap_ratio", x.min_gap_ratio}};
  j["boundary"] = {{"kinds", c.boundary.kinds}, {"amplitude", c.boundary.amplitude}, {"depth", c.boundary.depth}};
  j["scan"] = {{"from", c.scan.from}, {"to", c.scan.to}, {"step", c.scan.step}};
  j["mu_scan"] = {{"from", c.mu_scan.from ? json(*c.mu_scan.from) : json(nullptr)},
                  {"to", c.mu_scan.to ? json(*c.mu_scan.to) : json(nullptr)},
                  {"count", c.mu_scan.count}};
  j["homotopy"] = {{"paths", c.homotopy.paths},
                   {"samples", c.homotopy.samples},
                   {"max_refinements", c.homotopy.max_refinements},
                   {"adversarial_mass_to", c.homotopy.adversarial_mass_to},
                   {"x1_length", c.homotopy.x1_length}};
  j["locality"] = {{"im_z", c.locality.im_z},
                   {"re_z", c.locality.re_z ? json(*c.locality.re_z) : json(nullptr)},
                   {"side", c.locality.side},
                   {"hs_side", c.locality.hs_side},
                   {"hs_extension_order", c.locality.hs_extension_order},
                   {"hs_nodes", c.locality.hs_nodes}};
  j["oracle"] = {{"n_k", c.oracle.n_k}, {"strip_width", c.oracle.strip_width}};
  j["seeds"] = c.seeds;
  j["workers"] = c.workers;
  j["output"] = {{"dir", c.output.dir}, {"stem", c.output.stem}};
  return j;
}

std::string canonical(const RunConfig& c) {
  json j = to_json(c);
  // outputs do not depend on where they go or on the worker count
  j.erase("output");
  j.erase("workers");
  return j.dump();
}

std::string hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : canonical(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      fail(ErrorCode::schema, "seed list: '" + item + "' is not a non-negative integer");
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      fail(ErrorCode::schema, "seed list: '" + item + "' out of range");
    }
  }
  if (out.empty()) fail(ErrorCode::schema, "seed list is empty");
  return out;
}

}  // namespace fredlab::config

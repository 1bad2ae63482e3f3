#include "relayee/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "relayee/units.hpp"

namespace relayee {

namespace {

struct RawConfig {
  // section -> ordered (key, value) pairs; repeated keys preserved
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  std::string origin;

  const std::string* find(const std::string& section, const std::string& key) const {
    auto it = sections.find(section);
    if (it == sections.end()) return nullptr;
    for (const auto& [k, v] : it->second) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  std::vector<std::string> all(const std::string& section, const std::string& key) const {
    std::vector<std::string> out;
    auto it = sections.find(section);
    if (it == sections.end()) return out;
    for (const auto& [k, v] : it->second) {
      if (k == key) out.push_back(v);
    }
    return out;
  }
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

RawConfig parse_raw(std::string_view text, const std::string& origin) {
  RawConfig raw;
  raw.origin = origin;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      raw.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    if (section.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside any section");
    }
    raw.sections[section].emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return raw;
}

double to_double(const RawConfig& raw, const std::string& section, const std::string& key,
                 const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (trim(value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(raw.origin + ": [" + section + "]." + key + ": not a number: '" + value +
                    "'");
}

std::vector<double> to_list(const RawConfig& raw, const std::string& section,
                            const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(value);
  while (in >> item) {
    if (item == ",") continue;
    if (!item.empty() && item.back() == ',') item.pop_back();
    if (item.empty()) continue;
    out.push_back(to_double(raw, section, key, item));
  }
  return out;
}

struct Reader {
  const RawConfig& raw;

  bool get(const std::string& section, const std::string& key, double& target) const {
    if (const std::string* v = raw.find(section, key)) {
      target = to_double(raw, section, key, *v);
      return true;
    }
    return false;
  }
  bool get(const std::string& section, const std::string& key, int& target) const {
    double v;
    if (!get(section, key, v)) return false;
    if (v != std::floor(v)) {
      throw ConfigError(raw.origin + ": [" + section + "]." + key + ": expected an integer");
    }
    target = static_cast<int>(v);
    return true;
  }
  bool get(const std::string& section, const std::string& key, long& target) const {
    double v;
    if (!get(section, key, v)) return false;
    target = static_cast<long>(v);
    return true;
  }
  bool get(const std::string& section, const std::string& key, std::uint64_t& target) const {
    double v;
    if (!get(section, key, v)) return false;
    target = static_cast<std::uint64_t>(v);
    return true;
  }
  bool get(const std::string& section, const std::string& key, std::string& target) const {
    if (const std::string* v = raw.find(section, key)) {
      target = *v;
      return true;
    }
    return false;
  }

  double require(const std::string& section, const std::string& key) const {
    double v = 0.0;
    if (!get(section, key, v)) {
      throw ConfigError(raw.origin + ": missing required key [" + section + "]." + key);
    }
    return v;
  }
};

template <typename Enum>
Enum parse_enum(const RawConfig& raw, const std::string& section, const std::string& key,
                const std::string& value,
                const std::vector<std::pair<std::string, Enum>>& table) {
  for (const auto& [name, v] : table) {
    if (value == name) return v;
  }
  std::string options;
  for (const auto& [name, v] : table) options += (options.empty() ? "" : " | ") + name;
  throw ConfigError(raw.origin + ": [" + section + "]." + key + ": expected one of " + options);
}

void read_flags(const Reader& r, ModelFlags& flags) {
  std::string v;
  if (r.get("system", "l1_weighting", v)) {
    flags.l1_weighting = parse_enum<ModelFlags::L1Weighting>(
        r.raw, "system", "l1_weighting", v,
        {{"inter-node", ModelFlags::L1Weighting::kInterNode},
         {"direct", ModelFlags::L1Weighting::kDirect}});
  }
  if (r.get("system", "little_rate", v)) {
    flags.little_rate = parse_enum<ModelFlags::LittleRate>(
        r.raw, "system", "little_rate", v,
        {{"accepted", ModelFlags::LittleRate::kAccepted},
         {"offered", ModelFlags::LittleRate::kOffered}});
  }
  if (r.get("system", "direct_throughput", v)) {
    flags.direct_throughput = parse_enum<ModelFlags::DirectThroughput>(
        r.raw, "system", "direct_throughput", v,
        {{"consistent", ModelFlags::DirectThroughput::kConsistent},
         {"paper-literal", ModelFlags::DirectThroughput::kPaperLiteral}});
  }
  if (r.get("system", "relay_arrivals", v)) {
    flags.relay_arrivals = parse_enum<ModelFlags::RelayArrivals>(
        r.raw, "system", "relay_arrivals", v,
        {{"quantized", ModelFlags::RelayArrivals::kQuantized},
         {"paper-hybrid", ModelFlags::RelayArrivals::kPaperHybrid}});
  }
  if (r.get("system", "delay_form", v)) {
    flags.delay_form = parse_enum<ModelFlags::DelayForm>(
        r.raw, "system", "delay_form", v,
        {{"little", ModelFlags::DelayForm::kLittle},
         {"paper-literal", ModelFlags::DelayForm::kPaperLiteral}});
  }
  if (r.get("system", "energy_form", v)) {
    flags.energy_form = parse_enum<ModelFlags::EnergyForm>(
        r.raw, "system", "energy_form", v,
        {{"busy-weighted", ModelFlags::EnergyForm::kBusyWeighted},
         {"paper-literal", ModelFlags::EnergyForm::kPaperLiteral}});
  }
}

void read_link(const Reader& r, const std::string& section, LinkConfig& link) {
  r.get(section, "snr_offset_db", link.snr_offset_db);
  r.get(section, "m", link.m);
  r.get(section, "doppler_hz", link.doppler_hz);
  r.get(section, "frame_s", link.frame_s);
}

void read_access(const Reader& r, const std::string& section, AccessConfig& access) {
  r.get(section, "q", access.q);
  r.get(section, "u", access.u);
}

AmcModeTable read_amc(const Reader& r, const ModelConfig& config) {
  const RawConfig& raw = r.raw;
  if (raw.sections.find("amc") == raw.sections.end()) return default_amc_table();

  auto rows = raw.all("amc", "mode");
  if (rows.empty()) {
    throw ConfigError(raw.origin + ": [amc] section needs at least one 'mode = b alpha g s_p'");
  }
  std::vector<AmcMode> modes;
  int index = 1;
  for (const std::string& row : rows) {
    auto vals = to_list(raw, "amc", "mode", row);
    if (vals.size() != 4) {
      throw ConfigError(raw.origin + ": [amc].mode: expected 4 values (b alpha g s_p)");
    }
    AmcMode mode;
    mode.index = index++;
    mode.bits_per_symbol = static_cast<int>(vals[0]);
    mode.per_alpha = vals[1];
    mode.per_g = vals[2];
    mode.per_cutoff = vals[3];
    modes.push_back(mode);
  }

  std::vector<double> interior;
  std::string policy;
  if (const std::string* v = raw.find("amc", "boundaries_db")) {
    for (double db : to_list(raw, "amc", "boundaries_db", *v)) {
      interior.push_back(db_to_linear(db));
    }
    if (interior.size() != modes.size()) {
      throw ConfigError(raw.origin + ": [amc].boundaries_db: expected one boundary per mode");
    }
  } else if (r.get("amc", "boundaries", policy)) {
    if (policy != "msre") {
      throw ConfigError(raw.origin + ": [amc].boundaries: expected 'msre' or boundaries_db");
    }
    double p_target =
        std::pow(config.system.loss_budget, 1.0 / (config.system.max_tx + 1));
    r.get("amc", "p_target", p_target);
    interior = msre_boundaries(modes, p_target);
  } else {
    throw ConfigError(raw.origin + ": [amc]: need boundaries_db or boundaries = msre");
  }
  return make_table(std::move(modes), interior);
}

}  // namespace

LinkModel ModelConfig::make_link(LinkLabel label, double common_snr_db) const {
  const LinkConfig* lc = &link_ad;
  const AccessConfig* ac = &access_ad;
  switch (label) {
    case LinkLabel::kSourceRelay: lc = &link_ar; ac = &access_ar; break;
    case LinkLabel::kRelayDest: lc = &link_rd; ac = &access_rd; break;
    case LinkLabel::kDirect: break;
  }
  LinkModel link;
  link.label = label;
  link.fading.m = lc->m;
  link.fading.avg_snr = db_to_linear(common_snr_db + lc->snr_offset_db);
  link.fading.doppler_hz = lc->doppler_hz;
  link.fading.frame_s = lc->frame_s;
  link.amc = amc;
  link.access.q = ac->q;
  link.access.u = ac->u;
  return link;
}

void ModelConfig::validate() const {
  system.validate();
  traffic.validate();
  amc.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameterError("[system].alpha must lie in (0, 1)");
  }
  for (const LinkConfig* lc : {&link_ar, &link_rd, &link_ad}) {
    FadingModel f{lc->m, db_to_linear(snr_db + lc->snr_offset_db), lc->doppler_hz, lc->frame_s};
    f.validate();
  }
  for (const AccessConfig* ac : {&access_ar, &access_rd, &access_ad}) {
    SpectrumAccess a{ac->q, ac->u};
    a.validate();
  }
  if (!(optimizer.snr_min_db < optimizer.snr_max_db)) {
    throw InvalidParameterError("[optimizer]: snr_min_db must be below snr_max_db");
  }
  if (optimizer.alpha_grid < 1) throw InvalidParameterError("[optimizer].alpha_grid must be >= 1");
  if (simulate.slots <= simulate.warmup || simulate.warmup < 0) {
    throw InvalidParameterError("[simulate]: need slots > warmup >= 0");
  }
  if (simulate.batches < 2) throw InvalidParameterError("[simulate].batches must be >= 2");
}

ModelConfig default_config() {
  ModelConfig config;
  config.amc = default_amc_table();
  // Spectrum occupancy: the source-relay band is the freest, the direct
  // band the most contended; all three switch fast relative to a slot.
  config.access_ar = {4.0, 1.0};        // a = 0.80
  config.access_rd = {13.0 / 7.0, 1.0}; // a = 0.65
  config.access_ad = {11.0 / 9.0, 1.0}; // a = 0.55
  config.validate();
  return config;
}

ModelConfig parse_config(std::string_view text, const std::string& origin) {
  RawConfig raw = parse_raw(text, origin);
  Reader r{raw};
  ModelConfig config = default_config();

  r.get("system", "packet_bits", config.system.packet_bits);
  r.get("system", "symbol_rate_hz", config.system.symbol_rate_hz);
  r.get("system", "slot_s", config.system.slot_s);
  r.get("system", "buffer", config.system.buffer_capacity);
  r.get("system", "max_tx", config.system.max_tx);
  r.get("system", "ref_power_w", config.system.ref_power_w);
  r.get("system", "idle_power_w", config.system.idle_power_w);
  r.get("system", "loss_budget", config.system.loss_budget);
  r.get("system", "alpha", config.alpha);
  r.get("system", "snr_db", config.snr_db);
  read_flags(r, config.flags);

  config.traffic.mean_rate = r.require("traffic", "lambda");
  r.get("traffic", "max_arrivals", config.traffic.max_arrivals);
  if (const std::string* v = raw.find("traffic", "mmpp_rates")) {
    config.traffic.mmpp_rates = to_list(raw, "traffic", "mmpp_rates", *v);
    const std::string* sw = raw.find("traffic", "mmpp_switch");
    if (sw == nullptr) {
      throw ConfigError(origin + ": missing required key [traffic].mmpp_switch");
    }
    std::istringstream rows(*sw);
    std::string row;
    config.traffic.mmpp_switch.clear();
    while (std::getline(rows, row, ';')) {
      config.traffic.mmpp_switch.push_back(to_list(raw, "traffic", "mmpp_switch", row));
    }
  }

  config.amc = read_amc(r, config);

  read_link(r, "link.AR", config.link_ar);
  read_link(r, "link.RD", config.link_rd);
  read_link(r, "link.AD", config.link_ad);
  read_access(r, "access.AR", config.access_ar);
  read_access(r, "access.RD", config.access_rd);
  read_access(r, "access.AD", config.access_ad);

  r.get("optimizer", "alpha_grid", config.optimizer.alpha_grid);
  r.get("optimizer", "snr_min_db", config.optimizer.snr_min_db);
  r.get("optimizer", "snr_max_db", config.optimizer.snr_max_db);
  r.get("optimizer", "tol", config.optimizer.tol);
  r.get("optimizer", "max_eep_sweeps", config.optimizer.max_eep_sweeps);

  r.get("simulate", "slots", config.simulate.slots);
  r.get("simulate", "warmup", config.simulate.warmup);
  r.get("simulate", "seed", config.simulate.seed);
  r.get("simulate", "batches", config.simulate.batches);

  config.validate();
  return config;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* flag_name(ModelFlags::L1Weighting v) {
  return v == ModelFlags::L1Weighting::kInterNode ? "inter-node" : "direct";
}
const char* flag_name(ModelFlags::LittleRate v) {
  return v == ModelFlags::LittleRate::kAccepted ? "accepted" : "offered";
}
const char* flag_name(ModelFlags::DirectThroughput v) {
  return v == ModelFlags::DirectThroughput::kConsistent ? "consistent" : "paper-literal";
}
const char* flag_name(ModelFlags::RelayArrivals v) {
  return v == ModelFlags::RelayArrivals::kQuantized ? "quantized" : "paper-hybrid";
}
const char* flag_name(ModelFlags::DelayForm v) {
  return v == ModelFlags::DelayForm::kLittle ? "little" : "paper-literal";
}
const char* flag_name(ModelFlags::EnergyForm v) {
  return v == ModelFlags::EnergyForm::kBusyWeighted ? "busy-weighted" : "paper-literal";
}

}  // namespace

std::string dump_config(const ModelConfig& c) {
  std::ostringstream out;
  out << "[system]\n";
  out << "packet_bits = " << c.system.packet_bits << "\n";
  out << "symbol_rate_hz = " << fmt(c.system.symbol_rate_hz) << "\n";
  out << "slot_s = " << fmt(c.system.slot_s) << "\n";
  out << "buffer = " << c.system.buffer_capacity << "\n";
  out << "max_tx = " << c.system.max_tx << "\n";
  out << "ref_power_w = " << fmt(c.system.ref_power_w) << "\n";
  out << "idle_power_w = " << fmt(c.system.idle_power_w) << "\n";
  out << "loss_budget = " << fmt(c.system.loss_budget) << "\n";
  out << "alpha = " << fmt(c.alpha) << "\n";
  out << "snr_db = " << fmt(c.snr_db) << "\n";
  out << "l1_weighting = " << flag_name(c.flags.l1_weighting) << "\n";
  out << "little_rate = " << flag_name(c.flags.little_rate) << "\n";
  out << "direct_throughput = " << flag_name(c.flags.direct_throughput) << "\n";
  out << "relay_arrivals = " << flag_name(c.flags.relay_arrivals) << "\n";
  out << "delay_form = " << flag_name(c.flags.delay_form) << "\n";
  out << "energy_form = " << flag_name(c.flags.energy_form) << "\n";
  out << "\n[traffic]\n";
  out << "lambda = " << fmt(c.traffic.mean_rate) << "\n";
  out << "max_arrivals = " << c.traffic.max_arrivals << "\n";
  if (c.traffic.has_mmpp()) {
    out << "mmpp_rates =";
    for (double v : c.traffic.mmpp_rates) out << " " << fmt(v);
    out << "\nmmpp_switch = ";
    for (std::size_t i = 0; i < c.traffic.mmpp_switch.size(); ++i) {
      if (i) out << " ; ";
      for (std::size_t j = 0; j < c.traffic.mmpp_switch[i].size(); ++j) {
        if (j) out << " ";
        out << fmt(c.traffic.mmpp_switch[i][j]);
      }
    }
    out << "\n";
  }
  out << "\n[amc]\n";
  for (const AmcMode& mode : c.amc.modes) {
    out << "mode = " << mode.bits_per_symbol << " " << fmt(mode.per_alpha) << " "
        << fmt(mode.per_g) << " " << fmt(mode.per_cutoff) << "\n";
  }
  out << "boundaries_db =";
  for (std::size_t i = 1; i + 1 < c.amc.boundaries.size(); ++i) {
    out << " " << fmt(linear_to_db(c.amc.boundaries[i]));
  }
  out << "\n";
  const std::pair<const char*, const LinkConfig*> links[] = {
      {"link.AR", &c.link_ar}, {"link.RD", &c.link_rd}, {"link.AD", &c.link_ad}};
  for (const auto& [name, link] : links) {
    out << "\n[" << name << "]\n";
    out << "snr_offset_db = " << fmt(link->snr_offset_db) << "\n";
    out << "m = " << fmt(link->m) << "\n";
    out << "doppler_hz = " << fmt(link->doppler_hz) << "\n";
    out << "frame_s = " << fmt(link->frame_s) << "\n";
  }
  const std::pair<const char*, const AccessConfig*> accesses[] = {
      {"access.AR", &c.access_ar}, {"access.RD", &c.access_rd}, {"access.AD", &c.access_ad}};
  for (const auto& [name, access] : accesses) {
    out << "\n[" << name << "]\n";
    out << "q = " << fmt(access->q) << "\n";
    out << "u = " << fmt(access->u) << "\n";
  }
  out << "\n[optimizer]\n";
  out << "alpha_grid = " << c.optimizer.alpha_grid << "\n";
  out << "snr_min_db = " << fmt(c.optimizer.snr_min_db) << "\n";
  out << "snr_max_db = " << fmt(c.optimizer.snr_max_db) << "\n";
  out << "tol = " << fmt(c.optimizer.tol) << "\n";
  out << "max_eep_sweeps = " << c.optimizer.max_eep_sweeps << "\n";
  out << "\n[simulate]\n";
  out << "slots = " << c.simulate.slots << "\n";
  out << "warmup = " << c.simulate.warmup << "\n";
  out << "seed = " << c.simulate.seed << "\n";
  out << "batches = " << c.simulate.batches << "\n";
  return out.str();
}

}  // namespace relayee

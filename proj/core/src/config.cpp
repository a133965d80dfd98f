#include "biphoton/config.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "biphoton/designer.hpp"
#include "biphoton/error.hpp"
#include "biphoton/io.hpp"

namespace biphoton {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError(field + ": " + why);
}

template <class F>
auto with_field(const std::string& field, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(field, e.what());
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(field, 0) == 0) throw;
    fail(field, msg);
  } catch (const ParseError& e) {
    fail(field, e.what());
  }
}

const json* child(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double angle_value(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return with_field(field, [&] { return parse_angle(v.get<std::string>()); });
  fail(field, "expected a number or an angle string like \"pi/4\"");
}

template <class T>
void read(const json& j, const char* key, const std::string& path, T& out) {
  if (const json* v = child(j, key)) {
    const std::string field = path.empty() ? key : path + "." + key;
    with_field(field, [&] { out = v->get<T>(); });
  }
}

void read_angle(const json& j, const char* key, const std::string& path, double& out) {
  if (const json* v = child(j, key)) out = angle_value(*v, path + "." + key);
}

void read_angles(const json& j, const char* key, const std::string& path, std::vector<double>& out) {
  if (const json* v = child(j, key)) {
    const std::string field = path + "." + key;
    if (!v->is_array()) fail(field, "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i)
      out.push_back(angle_value((*v)[i], field + "[" + std::to_string(i) + "]"));
  }
}

void check_object(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path.empty() ? "config" : path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
}

GridSpec parse_grid(const json& j, const std::string& path, GridSpec g) {
  check_object(j, path, {"n", "extent"});
  read(j, "n", path, g.n);
  read(j, "extent", path, g.extent);
  with_field(path, [&] { (void)g.build(); });
  return g;
}

EnvelopeSpec parse_envelope(const json& j, const std::string& path, EnvelopeSpec e) {
  check_object(j, path, {"kind", "waist", "m"});
  if (const json* k = child(j, "kind")) {
    const std::string kind = with_field(path + ".kind", [&] { return k->get<std::string>(); });
    if (kind == "gaussian") e.kind = AmplitudeEnvelope::Kind::gaussian;
    else if (kind == "ring_gaussian") e.kind = AmplitudeEnvelope::Kind::ring_gaussian;
    else fail(path + ".kind", "expected \"gaussian\" or \"ring_gaussian\"");
  }
  read(j, "waist", path, e.waist);
  read(j, "m", path, e.m);
  with_field(path, [&] { (void)e.build(); });
  return e;
}

MaskSpec parse_mask(const json& j, const std::string& path, MaskSpec m) {
  check_object(j, path, {"kind", "m", "levels", "equal", "bitmap", "phase_hi", "phase_lo", "half_width", "conjugate"});
  if (const json* k = child(j, "kind")) {
    const std::string kind = with_field(path + ".kind", [&] { return k->get<std::string>(); });
    if (kind == "helical") m.kind = MaskSpec::Kind::helical;
    else if (kind == "sector") m.kind = MaskSpec::Kind::sector;
    else if (kind == "bitmap") m.kind = MaskSpec::Kind::bitmap;
    else fail(path + ".kind", "expected \"helical\", \"sector\" or \"bitmap\"");
  }
  read(j, "m", path, m.m);
  read(j, "conjugate", path, m.conjugate);
  read(j, "bitmap", path, m.bitmap);
  read_angle(j, "phase_hi", path, m.phase_hi);
  read_angle(j, "phase_lo", path, m.phase_lo);
  read(j, "half_width", path, m.half_width);
  if (const json* eq = child(j, "equal")) {
    std::vector<double> phases;
    read_angles(j, "equal", path, phases);
    if (phases.empty()) fail(path + ".equal", "needs at least one phase");
    const double w = kTwoPi / static_cast<double>(phases.size());
    m.levels.clear();
    for (std::size_t i = 0; i < phases.size(); ++i)
      m.levels.push_back({w * static_cast<double>(i), i + 1 == phases.size() ? kTwoPi : w * static_cast<double>(i + 1), phases[i]});
    (void)eq;
  }
  if (const json* lv = child(j, "levels")) {
    const std::string field = path + ".levels";
    if (!lv->is_array()) fail(field, "expected an array of {start, end, phase}");
    m.levels.clear();
    for (std::size_t i = 0; i < lv->size(); ++i) {
      const std::string f = field + "[" + std::to_string(i) + "]";
      const json& e = (*lv)[i];
      check_object(e, f, {"start", "end", "phase"});
      for (const char* key : {"start", "end", "phase"})
        if (!child(e, key)) fail(f + "." + key, "missing");
      SectorLevel l;
      read_angle(e, "start", f, l.start);
      read_angle(e, "end", f, l.end);
      read_angle(e, "phase", f, l.phase);
      m.levels.push_back(l);
    }
  }
  return m;
}

PhotonSpec parse_photon(const json& j, const std::string& path, PhotonSpec p) {
  check_object(j, path, {"envelope", "mask"});
  if (const json* e = child(j, "envelope")) p.envelope = parse_envelope(*e, path + ".envelope", p.envelope);
  if (const json* m = child(j, "mask")) p.mask = parse_mask(*m, path + ".mask", p.mask);
  return p;
}

Sign parse_sign(const json& v, const std::string& field) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "+" || s == "plus") return Sign::plus;
    if (s == "-" || s == "minus") return Sign::minus;
  } else if (v.is_number_integer()) {
    const int s = v.get<int>();
    if (s == 1) return Sign::plus;
    if (s == -1) return Sign::minus;
  }
  fail(field, "expected \"+\" or \"-\"");
}

json grid_json(const GridSpec& g) { return {{"n", g.n}, {"extent", g.extent}}; }

json envelope_json(const EnvelopeSpec& e) {
  return {{"kind", e.kind == AmplitudeEnvelope::Kind::gaussian ? "gaussian" : "ring_gaussian"},
          {"waist", e.waist},
          {"m", e.m}};
}

json mask_json(const MaskSpec& m) {
  json j;
  switch (m.kind) {
    case MaskSpec::Kind::helical:
      j = {{"kind", "helical"}, {"m", m.m}};
      break;
    case MaskSpec::Kind::sector: {
      json levels = json::array();
      for (const auto& l : m.levels) levels.push_back({{"start", l.start}, {"end", l.end}, {"phase", l.phase}});
      j = {{"kind", "sector"}, {"levels", levels}};
      break;
    }
    case MaskSpec::Kind::bitmap:
      j = {{"kind", "bitmap"}, {"bitmap", m.bitmap}, {"phase_hi", m.phase_hi},
           {"phase_lo", m.phase_lo}, {"half_width", m.half_width}};
      break;
  }
  j["conjugate"] = m.conjugate;
  return j;
}

json photon_json(const PhotonSpec& p) { return {{"envelope", envelope_json(p.envelope)}, {"mask", mask_json(p.mask)}}; }

}  // namespace

double parse_angle(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw ConfigError("empty angle");
  const auto pi_pos = s.find("pi");
  auto number = [&](std::string_view t, double fallback) {
    if (t.empty()) return fallback;
    if (t == "-") return -fallback;
    if (t == "+") return fallback;
    double v = 0.0;
    const char* b = t.data();
    if (*b == '+') ++b;
    auto [p, ec] = std::from_chars(b, t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size())
      throw ConfigError("cannot parse angle '" + std::string(text) + "'");
    return v;
  };
  if (pi_pos == std::string::npos) return number(s, 0.0);
  std::string_view coef(s.data(), pi_pos);
  if (!coef.empty() && coef.back() == '*') coef.remove_suffix(1);
  double v = number(coef, 1.0) * kPi;
  std::string_view rest(s.data() + pi_pos + 2, s.size() - pi_pos - 2);
  if (!rest.empty()) {
    if (rest.front() != '/') throw ConfigError("cannot parse angle '" + std::string(text) + "'");
    rest.remove_prefix(1);
    const double den = number(rest, 0.0);
    if (den == 0.0) throw ConfigError("angle '" + std::string(text) + "' divides by zero");
    v /= den;
  }
  return v;
}

AmplitudeEnvelope EnvelopeSpec::build() const {
  return kind == AmplitudeEnvelope::Kind::gaussian ? AmplitudeEnvelope::gaussian(waist)
                                                   : AmplitudeEnvelope::ring_gaussian(waist, m);
}

PhaseMask MaskSpec::build(const std::filesystem::path& base_dir) const {
  PhaseMask mask;
  switch (kind) {
    case Kind::helical:
      mask = helical_phase(m);
      break;
    case Kind::sector:
      mask = sector_phase(levels);
      break;
    case Kind::bitmap: {
      Raster raster;
      if (bitmap == "builtin:N") {
        raster = letter_n_raster();
      } else if (bitmap.empty()) {
        throw ConfigError("bitmap mask needs a 'bitmap' source");
      } else {
        std::filesystem::path p = bitmap;
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        raster = io::raster_from_pgm(io::read_pgm(p));
      }
      mask = bitmap_phase(std::move(raster), phase_hi, phase_lo, half_width, bitmap);
      break;
    }
  }
  return conjugate ? biphoton::conjugate(mask) : mask;
}

BiphotonState StateSpec::build(const std::filesystem::path& base_dir) const {
  const Grid g = grid.build();
  return make_state(signal.envelope.build(), idler.envelope.build(), signal.mask.build(base_dir),
                    idler.mask.build(base_dir), sign, visibility, g, g);
}

DetectorConfig ExperimentConfig::detector_config() const {
  DetectorConfig d;
  d.grid = detector.grid.build();
  d.efficiency = detector.efficiency;
  d.background_rate = detector.background_rate;
  d.rng_seed = seed;
  d.threads = threads;
  return d;
}

void ExperimentConfig::validate() const {
  if (preset != "fig3" && preset != "fig4" && preset != "fig5" && preset != "scan")
    fail("preset", "expected one of fig3, fig4, fig5, scan");
  with_field("state.grid", [&] { (void)state.grid.build(); });
  with_field("state.signal.envelope", [&] { (void)state.signal.envelope.build(); });
  with_field("state.idler.envelope", [&] { (void)state.idler.envelope.build(); });
  with_field("state.signal.mask", [&] { (void)state.signal.mask.build(base_dir); });
  with_field("state.idler.mask", [&] { (void)state.idler.mask.build(base_dir); });
  if (!(state.visibility >= 0.0 && state.visibility <= 1.0)) fail("state.visibility", "must lie in [0, 1]");
  with_field("state", [&] { (void)state.build(base_dir); });
  with_field("detector", [&] { detector_config().validate(); });
  with_field("heralding.width", [&] { (void)SectorMask(0.0, heralding.width); });
  if (heralding.k_angles < 4) fail("heralding.k_angles", "must be >= 4");
  if (analysis.n_bins < 16) fail("analysis.n_bins", "must be >= 16");
  if (analysis.unfold_phi == 0 || analysis.unfold_r == 0) fail("analysis.unfold", "sizes must be positive");
  if (analysis.annulus && analysis.annulus->r_out > detector.grid.extent)
    fail("analysis.annulus", "extends beyond the camera grid");
  if (events.heralds_per_angle == 0) fail("events.heralds_per_angle", "must be >= 1");
  if (events.singles == 0) fail("events.singles", "must be >= 1");
  if (events.image_heralds == 0) fail("events.image_heralds", "must be >= 1");
  if (fig4.m_values.empty()) fail("fig4.m_values", "must not be empty");
  if (fig4.heralds_per_angle == 0) fail("fig4.heralds_per_angle", "must be >= 1");
  with_field("fig4.width", [&] { (void)SectorMask(0.0, fig4.width); });
  if (fig5.signal_phases.empty()) fail("fig5.signal_phases", "must not be empty");
  with_field("fig5.idler_phases", [&] { (void)equal_sector_phase(fig5.idler_phases); });
  if (fig5.events == 0) fail("fig5.events", "must be >= 1");
  if (fig5.singles == 0) fail("fig5.singles", "must be >= 1");
  if (!(fig5.analysis_radius > 0.0)) fail("fig5.analysis_radius", "must be positive");
  if (!(fig5.bitmap_half_width > 0.0)) fail("fig5.bitmap_half_width", "must be positive");
  if (preset == "fig5") {
    MaskSpec m;
    m.kind = MaskSpec::Kind::bitmap;
    m.bitmap = fig5.bitmap;
    m.half_width = fig5.bitmap_half_width;
    with_field("fig5.bitmap", [&] { (void)m.build(base_dir); });
  }
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  ExperimentConfig c;
  c.base_dir = base_dir;
  check_object(doc, "", {"preset", "seed", "output", "threads", "state", "detector", "heralding",
                         "analysis", "events", "fig4", "fig5", "version"});
  read(doc, "preset", "", c.preset);
  read(doc, "seed", "", c.seed);
  if (const json* o = child(doc, "output")) c.output = with_field("output", [&] { return o->get<std::string>(); });
  read(doc, "threads", "", c.threads);

  if (const json* s = child(doc, "state")) {
    check_object(*s, "state", {"grid", "signal", "idler", "sign", "visibility"});
    if (const json* g = child(*s, "grid")) c.state.grid = parse_grid(*g, "state.grid", c.state.grid);
    if (const json* p = child(*s, "signal")) c.state.signal = parse_photon(*p, "state.signal", c.state.signal);
    if (const json* p = child(*s, "idler")) c.state.idler = parse_photon(*p, "state.idler", c.state.idler);
    if (const json* v = child(*s, "sign")) c.state.sign = parse_sign(*v, "state.sign");
    read(*s, "visibility", "state", c.state.visibility);
  }
  if (const json* d = child(doc, "detector")) {
    check_object(*d, "detector", {"grid", "efficiency", "background_rate"});
    if (const json* g = child(*d, "grid")) c.detector.grid = parse_grid(*g, "detector.grid", c.detector.grid);
    read(*d, "efficiency", "detector", c.detector.efficiency);
    read(*d, "background_rate", "detector", c.detector.background_rate);
  }
  if (const json* h = child(doc, "heralding")) {
    check_object(*h, "heralding", {"width", "k_angles", "orientations"});
    read_angle(*h, "width", "heralding", c.heralding.width);
    read(*h, "k_angles", "heralding", c.heralding.k_angles);
    read_angles(*h, "orientations", "heralding", c.heralding.orientations);
  }
  if (const json* a = child(doc, "analysis")) {
    check_object(*a, "analysis", {"annulus", "n_bins", "unfold_phi", "unfold_r"});
    if (const json* an = child(*a, "annulus")) {
      if (an->is_string() && an->get<std::string>() == "auto") {
        c.analysis.annulus.reset();
      } else if (an->is_array() && an->size() == 2) {
        const double in = angle_value((*an)[0], "analysis.annulus[0]");
        const double out = angle_value((*an)[1], "analysis.annulus[1]");
        c.analysis.annulus = with_field("analysis.annulus", [&] { return Annulus(in, out); });
      } else {
        fail("analysis.annulus", "expected \"auto\" or [r_in, r_out]");
      }
    }
    read(*a, "n_bins", "analysis", c.analysis.n_bins);
    read(*a, "unfold_phi", "analysis", c.analysis.unfold_phi);
    read(*a, "unfold_r", "analysis", c.analysis.unfold_r);
  }
  if (const json* e = child(doc, "events")) {
    check_object(*e, "events", {"heralds_per_angle", "singles", "image_heralds"});
    read(*e, "heralds_per_angle", "events", c.events.heralds_per_angle);
    read(*e, "singles", "events", c.events.singles);
    read(*e, "image_heralds", "events", c.events.image_heralds);
  }
  if (const json* f = child(doc, "fig4")) {
    check_object(*f, "fig4", {"m_values", "heralds_per_angle", "width"});
    read(*f, "m_values", "fig4", c.fig4.m_values);
    read(*f, "heralds_per_angle", "fig4", c.fig4.heralds_per_angle);
    read_angle(*f, "width", "fig4", c.fig4.width);
  }
  if (const json* f = child(doc, "fig5")) {
    check_object(*f, "fig5", {"signal_phases", "idler_phases", "bitmap", "bitmap_half_width",
                              "analysis_radius", "events", "singles"});
    read_angles(*f, "signal_phases", "fig5", c.fig5.signal_phases);
    read_angles(*f, "idler_phases", "fig5", c.fig5.idler_phases);
    read(*f, "bitmap", "fig5", c.fig5.bitmap);
    read(*f, "bitmap_half_width", "fig5", c.fig5.bitmap_half_width);
    read(*f, "analysis_radius", "fig5", c.fig5.analysis_radius);
    read(*f, "events", "fig5", c.fig5.events);
    read(*f, "singles", "fig5", c.fig5.singles);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  // a manifest carries the resolved config under "config"
  try {
    const json doc = json::parse(text, nullptr, true, true);
    if (doc.is_object() && doc.contains("config") && doc.contains("outputs")) text = doc["config"].dump();
  } catch (const json::exception&) {
    // reported by parse_config below
  }
  return parse_config(text, path.parent_path());
}

std::string to_json_text(const ExperimentConfig& c) {
  json annulus = c.analysis.annulus ? json::array({c.analysis.annulus->r_in, c.analysis.annulus->r_out}) : json("auto");
  json doc = {
      {"preset", c.preset},
      {"seed", c.seed},
      {"output", c.output.string()},
      {"threads", c.threads},
      {"state",
       {{"grid", grid_json(c.state.grid)},
        {"signal", photon_json(c.state.signal)},
        {"idler", photon_json(c.state.idler)},
        {"sign", c.state.sign == Sign::plus ? "+" : "-"},
        {"visibility", c.state.visibility}}},
      {"detector",
       {{"grid", grid_json(c.detector.grid)},
        {"efficiency", c.detector.efficiency},
        {"background_rate", c.detector.background_rate}}},
      {"heralding",
       {{"width", c.heralding.width}, {"k_angles", c.heralding.k_angles}, {"orientations", c.heralding.orientations}}},
      {"analysis",
       {{"annulus", annulus},
        {"n_bins", c.analysis.n_bins},
        {"unfold_phi", c.analysis.unfold_phi},
        {"unfold_r", c.analysis.unfold_r}}},
      {"events",
       {{"heralds_per_angle", c.events.heralds_per_angle},
        {"singles", c.events.singles},
        {"image_heralds", c.events.image_heralds}}},
      {"fig4", {{"m_values", c.fig4.m_values}, {"heralds_per_angle", c.fig4.heralds_per_angle}, {"width", c.fig4.width}}},
      {"fig5",
       {{"signal_phases", c.fig5.signal_phases},
        {"idler_phases", c.fig5.idler_phases},
        {"bitmap", c.fig5.bitmap},
        {"bitmap_half_width", c.fig5.bitmap_half_width},
        {"analysis_radius", c.fig5.analysis_radius},
        {"events", c.fig5.events},
        {"singles", c.fig5.singles}}},
  };
  return doc.dump(2);
}

}  // namespace biphoton

#include "hisac/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hisac {

namespace {

using nlohmann::json;

constexpr double kSubcarrier = 240e3;

Scenario layout_bwp(bool full) {
  Scenario s;
  s.plan = FrequencyPlan::make(60e9, 1.2676e9, kSubcarrier);
  const int w = 240;  // 57.6 MHz
  std::vector<SubbandSpec> low = {{83, w}, {500, w}, {917, w}, {1333, w}};
  std::vector<SubbandSpec> high = {{3792, w}, {4208, w}, {4625, w}, {5042, w}};
  if (!full) {
    low = {{83, w}, {500, w}};
    high = {{3792, w}, {4208, w}};
  }
  s.subsystems = {make_subsystem(1, s.plan, low), make_subsystem(2, s.plan, high)};
  s.staggered = true;
  s.slots = full ? 8 : 4;
  s.offsets.mode = OffsetModel::Mode::Hold;
  s.offsets.cfo_range_hz = 0.0;
  return s;
}

Scenario layout_ca(bool wide) {
  Scenario s;
  const int w = 417;  // 100.08 MHz
  if (!wide) {
    s.plan = FrequencyPlan::make(60e9, 2.01e9, kSubcarrier);
    s.subsystems = {make_subsystem(1, s.plan, {{0, w}, {792, w}}),
                    make_subsystem(2, s.plan, {{6792, w}, {7958, w}})};
  } else {
    s.plan = FrequencyPlan::make(60e9, 3.46e9, kSubcarrier);
    s.subsystems = {make_subsystem(1, s.plan, {{0, w}, {792, w}, {5000, 1667}}),
                    make_subsystem(2, s.plan, {{12000, w}, {14000, w}})};
  }
  return s;
}

Scenario layout_crosstech() {
  Scenario s;
  s.plan = FrequencyPlan::make(59.49e9, 4.03e9, kSubcarrier);
  s.subsystems = {make_subsystem(1, s.plan, {{9459, 7333}}),    // single-carrier block
                  make_subsystem(2, s.plan, {{0, 1667}})};      // OFDM block
  return s;
}

void default_scene(Scenario& s) {
  s.scene.target_ranges_m = {2.3, 2.9};
  s.scene.anchor_delay_s = 6e-9;
  s.scene.anchor_gain = 10.0;
}

std::string to_string(SceneTemplate::AmpMode m) {
  switch (m) {
    case SceneTemplate::AmpMode::RandomPhase: return "random_phase";
    case SceneTemplate::AmpMode::FixedReal: return "fixed_real";
    case SceneTemplate::AmpMode::RandomPhasePerSlot: return "random_phase_per_slot";
  }
  return "random_phase";
}

SceneTemplate::AmpMode amp_mode_from(const std::string& v) {
  if (v == "random_phase") return SceneTemplate::AmpMode::RandomPhase;
  if (v == "fixed_real") return SceneTemplate::AmpMode::FixedReal;
  if (v == "random_phase_per_slot") return SceneTemplate::AmpMode::RandomPhasePerSlot;
  throw std::runtime_error("unknown amp_mode: " + v);
}

std::string to_string(SceneTemplate::Snap m) {
  switch (m) {
    case SceneTemplate::Snap::None: return "none";
    case SceneTemplate::Snap::Fused: return "fused";
    case SceneTemplate::Snap::Coarse: return "coarse";
  }
  return "fused";
}

SceneTemplate::Snap snap_from(const std::string& v) {
  if (v == "none") return SceneTemplate::Snap::None;
  if (v == "fused") return SceneTemplate::Snap::Fused;
  if (v == "coarse") return SceneTemplate::Snap::Coarse;
  throw std::runtime_error("unknown snap mode: " + v);
}

std::string to_string(OffsetModel::Mode m) {
  switch (m) {
    case OffsetModel::Mode::Independent: return "independent";
    case OffsetModel::Mode::Hold: return "hold";
    case OffsetModel::Mode::Walk: return "walk";
  }
  return "independent";
}

OffsetModel::Mode offset_mode_from(const std::string& v) {
  if (v == "independent") return OffsetModel::Mode::Independent;
  if (v == "hold") return OffsetModel::Mode::Hold;
  if (v == "walk") return OffsetModel::Mode::Walk;
  throw std::runtime_error("unknown offset mode: " + v);
}

json scene_to_json(const SceneTemplate& t) {
  json clutter = json::array();
  for (const auto& c : t.clutter) clutter.push_back({{"delay_s", c.delay_s}, {"amp", c.amp}});
  return json{{"anchor_delay_s", t.anchor_delay_s},
              {"anchor_gain", t.anchor_gain},
              {"target_ranges_m", t.target_ranges_m},
              {"base_range_m", t.base_range_m},
              {"pair_spacings_m", t.pair_spacings_m},
              {"target_amps", t.target_amps},
              {"amp_mode", to_string(t.amp_mode)},
              {"snap", to_string(t.snap)},
              {"target_speed_mps", t.target_speed_mps},
              {"clutter", clutter}};
}

SceneTemplate scene_from_json(const json& j) {
  SceneTemplate t;
  t.anchor_delay_s = j.value("anchor_delay_s", t.anchor_delay_s);
  t.anchor_gain = j.value("anchor_gain", t.anchor_gain);
  t.target_ranges_m = j.value("target_ranges_m", t.target_ranges_m);
  t.base_range_m = j.value("base_range_m", t.base_range_m);
  t.pair_spacings_m = j.value("pair_spacings_m", t.pair_spacings_m);
  t.target_amps = j.value("target_amps", t.target_amps);
  t.amp_mode = amp_mode_from(j.value("amp_mode", to_string(t.amp_mode)));
  t.snap = snap_from(j.value("snap", to_string(t.snap)));
  t.target_speed_mps = j.value("target_speed_mps", t.target_speed_mps);
  if (j.contains("clutter"))
    for (const auto& jc : j.at("clutter"))
      t.clutter.push_back({jc.at("delay_s").get<double>(), jc.at("amp").get<double>()});
  return t;
}

}  // namespace

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport report = validate_plan(s.plan, s.subsystems);
  auto fail = [&report](const std::string& msg) { report.violations.push_back(msg); };
  if (s.schema_version != 1) fail("unsupported schema_version");
  if (s.trials < 1) fail("trials must be >= 1");
  if (s.slots < 1) fail("slots must be >= 1");
  if (s.tau_max <= 0.0) fail("tau_max must be positive");
  if (s.ifs_s <= 0.0) fail("ifs_s must be positive");
  if (s.snr_db.empty()) fail("snr_db list is empty");
  if (s.staleness < 1) fail("staleness must be >= 1");
  if (s.detect_tol_m <= 0.0) fail("detect_tol_m must be positive");
  if (s.aggregation.l_out < 0) fail("aggregation.l_out must be >= 0");
  if (s.scene.anchor_gain < 0.0) fail("anchor_gain must be >= 0");
  const bool pair_mode = !s.scene.pair_spacings_m.empty();
  if (pair_mode) {
    if (s.scene.base_range_m <= 0.0) fail("pair_spacings_m requires base_range_m > 0");
    for (double d : s.scene.pair_spacings_m)
      if (d <= 0.0) fail("pair spacings must be positive");
  } else if (s.scene.target_ranges_m.empty()) {
    fail("scene has no targets");
  }
  for (const auto& c : s.scene.clutter) {
    if (c.amp <= 0.0) fail("clutter amp must be positive");
    if (c.delay_s <= 0.0 || c.delay_s >= s.tau_max) fail("clutter delay must lie in (0, tau_max)");
    if (s.scene.anchor_delay_s > 0.0 && c.delay_s <= s.scene.anchor_delay_s)
      fail("clutter must arrive after the anchor path");
  }
  if (s.staggered) {
    std::size_t total = 0;
    for (const auto& sub : s.subsystems) total += sub.subbands.size();
    if (static_cast<std::size_t>(s.slots) < total)
      fail("staggered schedule never covers all subbands within the slot budget");
  }
  return report;
}

std::vector<std::string> preset_names() {
  return {"bwp-c1", "bwp-c2", "ca-c1", "ca-c2", "crosstech", "resolution-limit"};
}

Scenario make_preset(const std::string& name) {
  Scenario s;
  if (name == "bwp-c1") {
    s = layout_bwp(true);
  } else if (name == "bwp-c2") {
    s = layout_bwp(false);
  } else if (name == "ca-c1") {
    s = layout_ca(false);
  } else if (name == "ca-c2") {
    s = layout_ca(true);
  } else if (name == "crosstech") {
    s = layout_crosstech();
  } else if (name == "resolution-limit") {
    s = layout_ca(false);
    s.scene.base_range_m = 2.78;
    s.scene.pair_spacings_m = {0.172, 0.101, 0.031};
    s.scene.target_amps = {1.0, 1.0};
    s.scene.amp_mode = SceneTemplate::AmpMode::RandomPhase;
    s.scene.anchor_gain = 2.0;
    // Room reflections; they stress the coherence solvers without entering
    // the detection truth.
    s.scene.clutter = {{9.7e-9, 0.3}, {23.4e-9, 0.3}, {31.2e-9, 0.3}};
    s.offsets.cfo_range_hz = 0.0;
    s.offsets.snap_to_coarse = true;
    s.snr_db = {20.0};
    s.trials = 100;
    s.name = name;
    return s;
  } else {
    throw std::runtime_error("unknown preset: " + name);
  }
  default_scene(s);
  s.name = name;
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json subsystems = json::array();
  for (const auto& sub : s.subsystems) {
    json bands = json::array();
    for (const auto& b : sub.subbands) bands.push_back({{"start_index", b.start_index}, {"width", b.width}});
    json js{{"id", sub.id}, {"subbands", bands}};
    if (sub.anchor_policy == AnchorPolicy::KnownDelay) js["known_anchor_delay_s"] = sub.known_anchor_delay_s;
    subsystems.push_back(js);
  }
  json j{
      {"schema_version", s.schema_version},
      {"name", s.name},
      {"plan", {{"f0", s.plan.f0}, {"delta_f", s.plan.delta_f}, {"B", s.plan.B}}},
      {"subsystems", subsystems},
      {"geometry",
       {{"mode", s.geometry.mode == GeometryMode::MonoStatic ? "monostatic" : "bistatic"},
        {"distance_m", s.geometry.distance_m},
        {"bistatic_angle", s.geometry.bistatic_angle},
        {"mono_round_trip", s.geometry.mono_round_trip}}},
      {"scene", scene_to_json(s.scene)},
      {"offsets",
       {{"to_range_s", s.offsets.to_range_s},
        {"cfo_range_hz", s.offsets.cfo_range_hz},
        {"rpo_range", s.offsets.rpo_range},
        {"mode", to_string(s.offsets.mode)},
        {"snap_to_coarse", s.offsets.snap_to_coarse}}},
      {"snr_db", s.snr_db},
      {"slots", s.slots},
      {"ifs_s", s.ifs_s},
      {"trials", s.trials},
      {"seed", s.seed},
      {"tau_max", s.tau_max},
      {"staggered", s.staggered},
      {"staleness", s.staleness},
      {"aggregation",
       {{"enabled", s.aggregation.enabled},
        {"mode", s.aggregation.mode == AggregationMode::Static ? "static" : "dynamic"},
        {"mean", s.aggregation.mean == RunningMean::PerAppearance ? "per_appearance" : "slot_indexed"},
        {"l_out", s.aggregation.l_out}}},
      {"detect_tol_m", s.detect_tol_m},
  };
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json j = json::parse(text);
  Scenario s;
  s.schema_version = j.value("schema_version", 1);
  if (s.schema_version != 1) throw std::runtime_error("unsupported schema_version");
  s.name = j.value("name", std::string{});
  const json& jp = j.at("plan");
  s.plan = FrequencyPlan::make(jp.at("f0").get<double>(), jp.at("B").get<double>(),
                               jp.at("delta_f").get<double>());
  for (const json& js : j.at("subsystems")) {
    std::vector<SubbandSpec> bands;
    for (const json& jb : js.at("subbands"))
      bands.push_back({jb.at("start_index").get<int>(), jb.at("width").get<int>()});
    SubsystemSpec sub = make_subsystem(js.at("id").get<int>(), s.plan, bands);
    if (js.contains("known_anchor_delay_s")) {
      sub.anchor_policy = AnchorPolicy::KnownDelay;
      sub.known_anchor_delay_s = js.at("known_anchor_delay_s").get<double>();
    }
    s.subsystems.push_back(sub);
  }
  if (j.contains("geometry")) {
    const json& jg = j.at("geometry");
    const std::string mode = jg.value("mode", std::string{"monostatic"});
    if (mode == "monostatic") {
      s.geometry.mode = GeometryMode::MonoStatic;
    } else if (mode == "bistatic") {
      s.geometry.mode = GeometryMode::BiStatic;
    } else {
      throw std::runtime_error("unknown geometry mode: " + mode);
    }
    s.geometry.distance_m = jg.value("distance_m", s.geometry.distance_m);
    s.geometry.bistatic_angle = jg.value("bistatic_angle", s.geometry.bistatic_angle);
    s.geometry.mono_round_trip = jg.value("mono_round_trip", s.geometry.mono_round_trip);
  }
  if (j.contains("scene")) s.scene = scene_from_json(j.at("scene"));
  if (j.contains("offsets")) {
    const json& jo = j.at("offsets");
    s.offsets.to_range_s = jo.value("to_range_s", s.offsets.to_range_s);
    s.offsets.cfo_range_hz = jo.value("cfo_range_hz", s.offsets.cfo_range_hz);
    s.offsets.rpo_range = jo.value("rpo_range", s.offsets.rpo_range);
    s.offsets.mode = offset_mode_from(jo.value("mode", to_string(s.offsets.mode)));
    s.offsets.snap_to_coarse = jo.value("snap_to_coarse", s.offsets.snap_to_coarse);
  }
  s.snr_db = j.value("snr_db", s.snr_db);
  s.slots = j.value("slots", s.slots);
  s.ifs_s = j.value("ifs_s", s.ifs_s);
  s.trials = j.value("trials", s.trials);
  s.seed = j.value("seed", s.seed);
  s.tau_max = j.value("tau_max", s.tau_max);
  s.staggered = j.value("staggered", s.staggered);
  s.staleness = j.value("staleness", s.staleness);
  if (j.contains("aggregation")) {
    const json& ja = j.at("aggregation");
    s.aggregation.enabled = ja.value("enabled", s.aggregation.enabled);
    const std::string mode = ja.value("mode", std::string{"static"});
    if (mode == "static") {
      s.aggregation.mode = AggregationMode::Static;
    } else if (mode == "dynamic") {
      s.aggregation.mode = AggregationMode::Dynamic;
    } else {
      throw std::runtime_error("unknown aggregation mode: " + mode);
    }
    const std::string mean = ja.value("mean", std::string{"per_appearance"});
    if (mean == "per_appearance") {
      s.aggregation.mean = RunningMean::PerAppearance;
    } else if (mean == "slot_indexed") {
      s.aggregation.mean = RunningMean::SlotIndexed;
    } else {
      throw std::runtime_error("unknown aggregation mean: " + mean);
    }
    s.aggregation.l_out = ja.value("l_out", s.aggregation.l_out);
  }
  s.detect_tol_m = j.value("detect_tol_m", s.detect_tol_m);
  return s;
}

Scenario load_scenario(const std::string& name_or_path) {
  for (const std::string& p : preset_names()) {
    if (p == name_or_path) return make_preset(p);
  }
  std::ifstream in(name_or_path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + name_or_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario s = scenario_from_json(buf.str());
  if (s.name.empty()) s.name = name_or_path;
  return s;
}

}  // namespace hisac

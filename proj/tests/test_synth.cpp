#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hisac/rng.hpp"
#include "hisac/spectrum.hpp"
#include "hisac/synth.hpp"
#include "hisac/types.hpp"

using namespace hisac;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FrequencyPlan small_plan(int K = 64, double df = 240e3) {
  return FrequencyPlan::make(1e9, K * df, df);
}

MultipathScene one_path(double delay_s, cplx amp) {
  MultipathScene scene;
  scene.paths.push_back({delay_s, amp, 0.0});
  scene.slot_times = {0.0};
  return scene;
}

OffsetState manual_offsets(int subsystem_id, const OffsetEntry& entry) {
  OffsetState state;
  state.subsystem_ids = {1, subsystem_id};
  state.entries = {{OffsetEntry{}}, {entry}};
  return state;
}

cvec idft(const cvec& cfr) {
  const int n = static_cast<int>(cfr.size());
  cvec taps(cfr.size(), cplx{0.0, 0.0});
  for (int t = 0; t < n; ++t) {
    cplx acc{0.0, 0.0};
    for (int k = 0; k < n; ++k)
      acc += cfr[static_cast<std::size_t>(k)] * std::polar(1.0, kTwoPi * k * t / n);
    taps[static_cast<std::size_t>(t)] = acc / static_cast<double>(n);
  }
  return taps;
}

}  // namespace

TEST_CASE("zero-delay unit path gives an all-ones CFR") {
  const FrequencyPlan plan = small_plan();
  const cvec h = synth_fullband_cfr(one_path(0.0, {1.0, 0.0}), plan, 0);
  REQUIRE(static_cast<int>(h.size()) == plan.K);
  for (const cplx& v : h) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("on-grid delay is a unit impulse in the tap domain") {
  const FrequencyPlan plan = small_plan(32);
  const int q = 5;
  const double tau = q / (plan.K * plan.delta_f);
  const cvec taps = idft(synth_fullband_cfr(one_path(tau, {1.0, 0.0}), plan, 0));
  for (int t = 0; t < plan.K; ++t) {
    const double expected = t == q ? 1.0 : 0.0;
    CHECK(std::abs(taps[static_cast<std::size_t>(t)] - expected) < 1e-9);
  }
}

TEST_CASE("zero-amplitude paths contribute nothing") {
  const FrequencyPlan plan = small_plan();
  MultipathScene scene = one_path(3e-9, {1.0, 0.5});
  MultipathScene padded = scene;
  padded.paths.push_back({9e-9, {0.0, 0.0}, 0.0});
  const cvec a = synth_fullband_cfr(scene, plan, 0);
  const cvec b = synth_fullband_cfr(padded, plan, 0);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-15);
}

TEST_CASE("noiseless offset-free subband is the full-band restriction") {
  const FrequencyPlan plan = small_plan(256);
  const SubsystemSpec sub = make_subsystem(2, plan, {{40, 64}});
  MultipathScene scene = one_path(4e-9, {0.8, -0.3});
  scene.paths.push_back({11e-9, {0.2, 0.6}, 0.0});
  const OffsetState offsets = manual_offsets(2, OffsetEntry{});
  const CfrSlice slice = synth_subband_cfr(scene, plan, sub, 0, offsets, 0, kInf, 0);
  const cvec full = synth_fullband_cfr(scene, plan, 0);
  REQUIRE(slice.samples.size() == 64);
  CHECK(slice.start_index == 40);
  for (int k = 0; k < 64; ++k)
    CHECK(std::abs(slice.samples[static_cast<std::size_t>(k)] -
                   full[static_cast<std::size_t>(40 + k)]) < 1e-12);
}

TEST_CASE("a pi phase offset negates the slice") {
  const FrequencyPlan plan = small_plan(128);
  const SubsystemSpec sub = make_subsystem(2, plan, {{10, 32}});
  const MultipathScene scene = one_path(5e-9, {1.0, 0.0});
  OffsetEntry entry;
  entry.varphi_o = kPi;
  entry.phi_o = kPi;
  const CfrSlice with = synth_subband_cfr(scene, plan, sub, 0, manual_offsets(2, entry), 0, kInf, 0);
  const CfrSlice without =
      synth_subband_cfr(scene, plan, sub, 0, manual_offsets(2, OffsetEntry{}), 0, kInf, 0);
  for (std::size_t k = 0; k < with.samples.size(); ++k)
    CHECK(std::abs(with.samples[k] + without.samples[k]) < 1e-12);
}

TEST_CASE("a timing offset is a linear phase ramp across the subband") {
  const FrequencyPlan plan = small_plan(128);
  const SubsystemSpec sub = make_subsystem(2, plan, {{10, 32}});
  const MultipathScene scene = one_path(0.0, {1.0, 0.0});
  OffsetEntry entry;
  entry.tau_o = 1e-9;
  const CfrSlice slice = synth_subband_cfr(scene, plan, sub, 0, manual_offsets(2, entry), 0, kInf, 0);
  const double expected_step = -kTwoPi * plan.delta_f * 1e-9;  // -2*pi*2.4e-4 rad
  CHECK(expected_step == doctest::Approx(-kTwoPi * 2.4e-4));
  for (std::size_t k = 1; k < slice.samples.size(); ++k) {
    const cplx ratio = slice.samples[k] / slice.samples[k - 1];
    CHECK(std::arg(ratio) == doctest::Approx(expected_step).epsilon(1e-9));
    CHECK(std::abs(ratio) == doctest::Approx(1.0));
  }
}

TEST_CASE("gen_offsets honors ranges, the reference, and the seed") {
  const FrequencyPlan plan = small_plan(256);
  const std::vector<SubsystemSpec> subs = {make_subsystem(1, plan, {{0, 64}}),
                                           make_subsystem(2, plan, {{128, 64}})};
  const std::vector<double> times = {0.0, 1e-3, 2e-3};

  SUBCASE("zero ranges give identically zero offsets") {
    OffsetModel model;
    model.to_range_s = 0.0;
    model.cfo_range_hz = 0.0;
    model.rpo_range = 0.0;
    const OffsetState state = gen_offsets(11, model, subs, times);
    for (int slot = 0; slot < 3; ++slot) {
      const OffsetEntry& e = state.at(2, slot);
      CHECK(e.tau_o == 0.0);
      CHECK(e.f_o == 0.0);
      CHECK(e.phi_o == 0.0);
    }
  }

  SUBCASE("same seed reproduces the same draws") {
    OffsetModel model;
    const OffsetState a = gen_offsets(77, model, subs, times);
    const OffsetState b = gen_offsets(77, model, subs, times);
    for (int slot = 0; slot < 3; ++slot) {
      CHECK(a.at(2, slot).tau_o == b.at(2, slot).tau_o);
      CHECK(a.at(2, slot).phi_o == b.at(2, slot).phi_o);
    }
  }

  SUBCASE("draws respect the configured ranges and the reference is zero") {
    OffsetModel model;
    model.to_range_s = 3e-9;
    model.cfo_range_hz = 100.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const OffsetState state = gen_offsets(seed, model, subs, times);
      for (int slot = 0; slot < 3; ++slot) {
        CHECK(std::abs(state.at(2, slot).tau_o) <= 3e-9);
        CHECK(std::abs(state.at(2, slot).f_o) <= 100.0);
        CHECK(state.at(2, slot).varphi_o >= 0.0);
        CHECK(state.at(2, slot).varphi_o < kTwoPi);
        CHECK(state.at(1, slot).tau_o == 0.0);
        CHECK(state.at(1, slot).phi_o == 0.0);
      }
    }
  }

  SUBCASE("hold mode keeps one draw for the whole window") {
    OffsetModel model;
    model.mode = OffsetModel::Mode::Hold;
    model.cfo_range_hz = 0.0;
    const OffsetState state = gen_offsets(5, model, subs, times);
    CHECK(state.at(2, 1).tau_o == state.at(2, 0).tau_o);
    CHECK(state.at(2, 2).tau_o == state.at(2, 0).tau_o);
  }

  SUBCASE("negative ranges are rejected") {
    OffsetModel model;
    model.to_range_s = -1e-9;
    CHECK_THROWS_AS(gen_offsets(1, model, subs, times), std::domain_error);
  }
}

TEST_CASE("cir_to_cfr matches the DFT by hand") {
  SUBCASE("impulse at tap zero gives all ones") {
    const cvec cfr = cir_to_cfr({{1.0, 0.0}}, 8);
    for (const cplx& v : cfr) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-12);
  }
  SUBCASE("impulse at tap one gives the first DFT column") {
    const cvec cfr = cir_to_cfr({{0.0, 0.0}, {1.0, 0.0}}, 4);
    REQUIRE(cfr.size() == 4);
    CHECK(std::abs(cfr[0] - cplx{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(cfr[1] - cplx{0.0, -1.0}) < 1e-12);
    CHECK(std::abs(cfr[2] - cplx{-1.0, 0.0}) < 1e-12);
    CHECK(std::abs(cfr[3] - cplx{0.0, 1.0}) < 1e-12);
  }
  SUBCASE("forward then inverse DFT returns the taps") {
    cvec taps = {{0.3, -0.1}, {0.0, 0.0}, {1.2, 0.7}, {-0.5, 0.2}};
    taps.resize(16, cplx{0.0, 0.0});
    const cvec back = idft(cir_to_cfr(taps, 16));
    for (std::size_t t = 0; t < taps.size(); ++t) CHECK(std::abs(back[t] - taps[t]) < 1e-12);
  }
  SUBCASE("taps longer than the DFT are rejected") {
    CHECK_THROWS_AS(cir_to_cfr(cvec(10), 8), std::invalid_argument);
  }
}

TEST_CASE("awgn energy matches the requested snr") {
  const double snr_db = 10.0;
  const int n = 20000;
  cvec samples(n, cplx{1.0, 0.0});
  cvec noisy = samples;
  add_awgn(noisy, snr_db, 1234);
  double energy = 0.0;
  for (int k = 0; k < n; ++k) energy += std::norm(noisy[static_cast<std::size_t>(k)] - samples[static_cast<std::size_t>(k)]);
  energy /= n;
  CHECK(energy == doctest::Approx(std::pow(10.0, -snr_db / 10.0)).epsilon(0.05));

  SUBCASE("infinite snr leaves the samples untouched") {
    cvec clean = samples;
    add_awgn(clean, kInf, 77);
    for (int k = 0; k < n; ++k) CHECK(clean[static_cast<std::size_t>(k)] == samples[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("offsets compose exactly in the noiseless case") {
  const FrequencyPlan plan = small_plan(256);
  const SubsystemSpec sub = make_subsystem(2, plan, {{30, 48}});
  const MultipathScene scene = one_path(6e-9, {0.9, 0.4});
  OffsetEntry entry;
  entry.tau_o = 2.5e-9;
  entry.phi_o = 1.3;
  const CfrSlice with = synth_subband_cfr(scene, plan, sub, 0, manual_offsets(2, entry), 0, kInf, 0);
  const CfrSlice without =
      synth_subband_cfr(scene, plan, sub, 0, manual_offsets(2, OffsetEntry{}), 0, kInf, 0);
  for (std::size_t k = 0; k < with.samples.size(); ++k) {
    const int abs_k = 30 + static_cast<int>(k);
    const cplx factor = std::polar(1.0, entry.phi_o - kTwoPi * plan.delta_f * entry.tau_o * abs_k);
    CHECK(std::abs(with.samples[k] - without.samples[k] * factor) < 1e-12);
  }
}

TEST_CASE("static scenes give identical noiseless slices every slot") {
  const FrequencyPlan plan = small_plan(256);
  const SubsystemSpec sub = make_subsystem(1, plan, {{10, 40}});
  MultipathScene scene = one_path(8e-9, {1.0, -0.2});
  scene.slot_times = {0.0, 1e-3, 2e-3, 3e-3};
  OffsetState offsets;
  offsets.subsystem_ids = {1};
  offsets.entries = {std::vector<OffsetEntry>(4)};
  const CfrSlice first = synth_subband_cfr(scene, plan, sub, 0, offsets, 0, kInf, 0);
  for (int slot = 1; slot < 4; ++slot) {
    const CfrSlice later = synth_subband_cfr(scene, plan, sub, 0, offsets, slot, kInf, 0);
    for (std::size_t k = 0; k < first.samples.size(); ++k)
      CHECK(first.samples[k] == later.samples[k]);
  }
}

TEST_CASE("path drift moves the delay linearly in slot time") {
  MultipathScene scene;
  scene.paths.push_back({10e-9, {1.0, 0.0}, 2e-9});  // 2 ns per second
  scene.slot_times = {0.0, 0.5, 1.0};
  CHECK(scene.delay_at(0, 0) == doctest::Approx(10e-9));
  CHECK(scene.delay_at(0, 1) == doctest::Approx(11e-9));
  CHECK(scene.delay_at(0, 2) == doctest::Approx(12e-9));
}

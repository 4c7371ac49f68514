#include "hisac/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hisac {

namespace {

struct SubsystemView {
  const SubsystemSpec* spec = nullptr;
  std::vector<const CfrSlice*> slices;  // one per subband, in subband order
};

std::vector<SubsystemView> group_slices(const std::vector<CfrSlice>& slices,
                                        const std::vector<SubsystemSpec>& subsystems,
                                        bool staggered) {
  std::vector<SubsystemView> views;
  views.reserve(subsystems.size());
  for (const auto& sub : subsystems) {
    SubsystemView view;
    view.spec = &sub;
    view.slices.resize(sub.subbands.size(), nullptr);
    for (const auto& slice : slices) {
      if (slice.subsystem_id != sub.id) continue;
      if (slice.subband < 0 || slice.subband >= static_cast<int>(sub.subbands.size()))
        throw PipelineError(1, "slice references an unknown subband of subsystem " +
                                   std::to_string(sub.id));
      auto& slot_entry = view.slices[static_cast<std::size_t>(slice.subband)];
      // With staggered acquisition keep the freshest slice per subband.
      if (!slot_entry || slice.slot > slot_entry->slot) slot_entry = &slice;
    }
    for (std::size_t s = 0; s < view.slices.size(); ++s) {
      if (!view.slices[s])
        throw PipelineError(1, "missing slice for subsystem " + std::to_string(sub.id) +
                                   " subband " + std::to_string(s));
    }
    if (!staggered) {
      for (const auto* slice : view.slices) {
        if (slice->slot != slices.front().slot)
          throw PipelineError(1, "slices from different slots without staggered acquisition");
      }
    }
    views.push_back(std::move(view));
  }
  return views;
}

}  // namespace

RangeReport hisac_slot(const std::vector<CfrSlice>& slices,
                       const std::vector<SubsystemSpec>& subsystems, const FrequencyPlan& plan,
                       const Geometry& geometry, const PipelineOptions& options,
                       SlotDiagnostics* diagnostics) {
  if (slices.empty()) throw PipelineError(1, "no slices");
  if (subsystems.empty()) throw PipelineError(1, "no subsystems");
  const std::vector<SubsystemView> views = group_slices(slices, subsystems, options.staggered);
  const SubsystemSpec* reference = nullptr;
  for (const auto& sub : subsystems)
    if (sub.id == 1) reference = &sub;
  if (!reference) throw PipelineError(1, "no reference subsystem (id 1)");

  SlotDiagnostics local;
  SlotDiagnostics& diag = diagnostics ? *diagnostics : local;

  // Stage 1: per-subsystem coarse OMP and synthetic full-band models.
  std::map<int, cvec> models;
  std::map<int, double> coarse_step;
  for (const auto& view : views) {
    const SubsystemSpec& sub = *view.spec;
    try {
      cvec measurement;
      std::vector<int> indices;
      for (std::size_t s = 0; s < view.slices.size(); ++s) {
        const CfrSlice& slice = *view.slices[s];
        for (std::size_t k = 0; k < slice.samples.size(); ++k) {
          measurement.push_back(slice.samples[k]);
          indices.push_back(slice.start_index + static_cast<int>(k));
        }
      }
      const double step = 1.0 / (4.0 * sub.Bi);
      coarse_step[sub.id] = step;
      const Dictionary dict =
          build_dictionary(std::move(indices), uniform_grid(options.tau_max, step), plan);
      SparseCir coarse = omp_solve(measurement, dict, options.stop_ratio);
      models[sub.id] = synth_model_cfr(coarse, 0, plan.K, plan);
      diag.coarse_residual_ratio[sub.id] = coarse.residual_ratio;
      diag.coarse[sub.id] = std::move(coarse);
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(1, "subsystem " + std::to_string(sub.id) + ": " + e.what());
    }
  }

  // Stage 2: mutual coherence relative to the reference subsystem.
  std::vector<CoherenceSolution> spotfi;
  if (options.coherence == CoherenceMethod::PhaseLineFit) {
    try {
      std::vector<CfrSlice> flat;
      for (const auto& view : views)
        for (const auto* s : view.slices) flat.push_back(*s);
      spotfi = spotfi_coherence(flat, subsystems, plan);
    } catch (const std::exception& e) {
      throw PipelineError(2, e.what());
    }
  }
  for (const auto& view : views) {
    const SubsystemSpec& sub = *view.spec;
    CoherenceSolution sol;
    sol.subsystem_id = sub.id;
    if (sub.id != 1) {
      try {
        if (options.coherence == CoherenceMethod::AnchorGridSearch) {
          const auto anchor_ref = select_anchor(diag.coarse.at(1), reference->anchor_policy,
                                                reference->known_anchor_delay_s);
          const auto anchor_i = select_anchor(diag.coarse.at(sub.id), sub.anchor_policy,
                                              sub.known_anchor_delay_s);
          const double init = init_to(anchor_i.delay_s, anchor_ref.delay_s);
          const double xi = 5.0 * coarse_step.at(sub.id);
          sol = refine_offsets(models.at(1), models.at(sub.id), init, xi, plan);
          sol.subsystem_id = sub.id;
        } else {
          for (const auto& s : spotfi)
            if (s.subsystem_id == sub.id) sol = s;
        }
      } catch (const std::exception& e) {
        throw PipelineError(2, "subsystem " + std::to_string(sub.id) + ": " + e.what());
      }
    }
    diag.solutions[sub.id] = sol;
  }

  // Stage 3: compensate every slice and fuse over the focused grid.
  RangeReport report;
  try {
    std::vector<CfrSlice> compensated;
    compensated.reserve(slices.size());
    int report_slot = 0;
    for (const auto& view : views) {
      const CoherenceSolution& sol = diag.solutions.at(view.spec->id);
      for (const auto* slice : view.slices) {
        compensated.push_back(compensate(*slice, sol, plan));
        report_slot = std::max(report_slot, slice->slot);
      }
    }
    std::shared_ptr<const FocusedGrid> grid = options.frozen_grid;
    if (!grid) {
      grid = std::make_shared<FocusedGrid>(build_focused_grid(
          diag.coarse.at(1).delays(), subsystems, 1.0 / (8.0 * plan.B)));
    }
    diag.focused_grid = grid;
    diag.fused = fuse(compensated, *grid, plan, options.stop_ratio, options.staggered);
    report = delays_to_ranges(diag.fused, geometry, report_slot);
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(3, e.what());
  }
  return report;
}

WindowResult hisac_window(const std::vector<std::vector<CfrSlice>>& slices_per_slot,
                          const std::vector<SubsystemSpec>& subsystems,
                          const FrequencyPlan& plan, const Geometry& geometry,
                          const PipelineOptions& options, AggregationMode mode, int l_out,
                          RunningMean mean) {
  if (slices_per_slot.empty()) throw PipelineError(4, "empty aggregation window");
  WindowResult result;
  PipelineOptions slot_options = options;
  std::vector<SparseCir> fused;
  fused.reserve(slices_per_slot.size());
  for (const auto& slot_slices : slices_per_slot) {
    SlotDiagnostics diag;
    result.per_slot.push_back(
        hisac_slot(slot_slices, subsystems, plan, geometry, slot_options, &diag));
    if (!slot_options.frozen_grid) slot_options.frozen_grid = diag.focused_grid;
    fused.push_back(diag.fused);
    result.diagnostics.push_back(std::move(diag));
  }
  try {
    if (l_out <= 0) l_out = std::max(1, static_cast<int>(fused.front().entries.size()));
    result.aggregated_cir = aggregate(fused, mode, l_out, mean);
    result.aggregated = delays_to_ranges(result.aggregated_cir, geometry,
                                         result.per_slot.back().slot);
    result.aggregated_relative = result.aggregated_cir.empty()
                                     ? RangeReport{}
                                     : aggregate_ranges(result.aggregated_cir, geometry);
    result.aggregated_relative.geometry = geometry;
  } catch (const std::exception& e) {
    throw PipelineError(4, e.what());
  }
  return result;
}

}  // namespace hisac

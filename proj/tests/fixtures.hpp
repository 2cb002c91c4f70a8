#pragma once

// Small synthetic history shared by tests that need a HistoricalModel.

#include "bems/pipeline.hpp"
#include "bems/synth.hpp"

namespace fixture {

inline const bems::HistoricalModel& june_history() {
  static const bems::HistoricalModel model = [] {
    bems::SynthConfig cfg;
    cfg.start_date = "2022-05-10";
    cfg.history_days = 80;
    cfg.eval_days = 0;
    const auto days = bems::split_days(bems::synthesize(cfg));
    return bems::model_from_days(days, cfg.location, cfg.plant, bems::kDefaultBins);
  }();
  return model;
}

}  // namespace fixture

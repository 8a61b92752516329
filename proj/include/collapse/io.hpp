// Copyright 2026 The collapse-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "collapse/conformance.hpp"
#include "collapse/ensemble.hpp"
#include "collapse/spectral.hpp"

namespace collapse::io {

/// Raised when a results file cannot be read or parsed.
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// JSON document holding the run parameters and the full statistics.
/// Doubles are written in shortest round-trip form.
std::string ensemble_to_json(const EnsembleStats &stats, const RunConfig &config);
/// Reads the statistics back; ensemble_from_json(ensemble_to_json(s, c)) == s.
EnsembleStats ensemble_from_json(std::string_view text);

/// Long-format time series: step,packet_index,mean_weight,mean_amp_re,mean_amp_im.
void write_series_csv(std::ostream &out, const EnsembleStats &stats);
/// packet_index,initial_weight,survival_count,survival_frequency plus a
/// trailing unresolved row.
void write_survival_csv(std::ostream &out, const EnsembleStats &stats,
                        const WaveState &initial);
/// "<stem>.survival.csv" next to a series file.
std::filesystem::path survival_path(const std::filesystem::path &series_path);

/// index,eigenvalue,relaxation_time followed by a "# selection_time=..."
/// summary line.
void write_spectrum_csv(std::ostream &out, const SpectralResult &spectrum,
                        double eps, double tau);

std::string reports_to_json(const std::vector<CheckReport> &reports,
                            const ConformanceConfig &config);
std::string reports_to_text(const std::vector<CheckReport> &reports);

/// Writes `content` to `path`, throwing FormatError on failure.
void write_text_file(const std::filesystem::path &path, std::string_view content);
std::string read_text_file(const std::filesystem::path &path);

} // namespace collapse::io

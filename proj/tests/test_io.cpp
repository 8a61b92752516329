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

#include <doctest.h>

#include <clocale>
#include <filesystem>
#include <sstream>
#include <string>

#include "collapse/io.hpp"
#include "collapse/numeric.hpp"

using namespace collapse;

namespace {

RunConfig series_config() {
    RunConfig c;
    c.weights = {0.2, 0.3, 0.5};
    c.phases = {0.1, 0.2, 0.3};
    c.params.epsilon = 0.1;
    c.params.seed = 17;
    c.n_trajectories = 700;
    c.max_steps = 40;
    c.record_every = 4;
    return c;
}

std::size_t count_lines(const std::string &s) {
    std::size_t n = 0;
    for (char ch : s) {
        n += ch == '\n' ? 1 : 0;
    }
    return n;
}

} // namespace

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-17) == "-2.5e-17");
    CHECK(format_double(1.0 / 0.0) == "inf");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("ensemble JSON round-trips exactly") {
    const RunConfig c = series_config();
    const EnsembleStats s = run_ensemble(c);
    REQUIRE(s.unresolved > 0);
    const std::string text = io::ensemble_to_json(s, c);
    CHECK(io::ensemble_from_json(text) == s);
    CHECK(io::ensemble_to_json(io::ensemble_from_json(text), c) == text);
    CHECK(text.find("worker") == std::string::npos);
    CHECK_THROWS_AS((void)io::ensemble_from_json("{}"), io::FormatError);
    CHECK_THROWS_AS((void)io::ensemble_from_json("not json"), io::FormatError);
}

TEST_CASE("time-series CSV is long format with one header row") {
    const RunConfig c = series_config();
    const EnsembleStats s = run_ensemble(c);
    std::ostringstream out;
    io::write_series_csv(out, s);
    const std::string csv = out.str();
    CHECK(csv.rfind("step,packet_index,mean_weight,mean_amp_re,mean_amp_im\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + s.sample_steps.size() * 3);
    CHECK(csv.find("\n0,0,0.2,") != std::string::npos);
    CHECK(csv.find("\n4,2,") != std::string::npos);
}

TEST_CASE("survival CSV and path") {
    const RunConfig c = series_config();
    const EnsembleStats s = run_ensemble(c);
    std::ostringstream out;
    io::write_survival_csv(out, s, c.initial_state());
    const std::string csv = out.str();
    CHECK(csv.rfind("packet_index,initial_weight,survival_count,survival_frequency\n", 0) == 0);
    CHECK(count_lines(csv) == 5);
    CHECK(csv.find("\nunresolved,,") != std::string::npos);
    CHECK(io::survival_path("out/run.csv") ==
          std::filesystem::path("out/run.survival.csv"));
}

TEST_CASE("spectrum CSV rows and summary") {
    SpectralOptions opt;
    opt.eigenvectors = false;
    const auto spec = eigen_spectrum(build_stat_matrix(0.1), opt);
    std::ostringstream out;
    io::write_spectrum_csv(out, spec, 0.1, 1.0);
    const std::string csv = out.str();
    CHECK(csv.rfind("index,eigenvalue,relaxation_time\n0,1,inf\n1,1,inf\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 11 + 1);
    CHECK(csv.find("# selection_time=44.498") != std::string::npos);
    CHECK(csv.find("ratio=0.88996") != std::string::npos);
}

TEST_CASE("output ignores the C locale") {
    const char *old = std::setlocale(LC_NUMERIC, nullptr);
    const std::string saved = old ? old : "C";
    const bool switched = std::setlocale(LC_NUMERIC, "de_DE.UTF-8") != nullptr;
    CHECK(format_double(0.25) == "0.25");
    std::setlocale(LC_NUMERIC, saved.c_str());
    if (!switched) {
        MESSAGE("de_DE locale not installed; checked under the default locale");
    }
}

TEST_CASE("report serializers") {
    ConformanceConfig c;
    c.samples = 2000;
    const auto reports = run_checks("additivity", c);
    const std::string json = io::reports_to_json(reports, c);
    CHECK(json.find("\"name\": \"additivity\"") != std::string::npos);
    CHECK(json.find("\"pass\": true") != std::string::npos);
    const std::string text = io::reports_to_text(reports);
    CHECK(text.rfind("[PASS] additivity", 0) == 0);
}

TEST_CASE("file helpers") {
    const auto path = std::filesystem::temp_directory_path() / "collapse_io_test.txt";
    io::write_text_file(path, "a,b\n1,2\n");
    CHECK(io::read_text_file(path) == "a,b\n1,2\n");
    std::filesystem::remove(path);
    CHECK_THROWS_AS((void)io::read_text_file(path), io::FormatError);
    CHECK_THROWS_AS(io::write_text_file("/nonexistent-dir/x.txt", "x"),
                    io::FormatError);
}

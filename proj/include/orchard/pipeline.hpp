#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "orchard/color/colorizer.hpp"
#include "orchard/fruits/localizer.hpp"
#include "orchard/io/bundle.hpp"
#include "orchard/io/json_io.hpp"
#include "orchard/lio/odometry.hpp"

namespace orchard {

struct PipelineConfig {
  lio::OdometryConfig odometry;
  color::ColorizeConfig colorize;
  fruits::LocalizerConfig fruits;
  std::vector<double> eval_thresholds{0.1, 0.5, 1.0, 2.0};

  // Evaluation inputs (all three required to run the eval stage).
  std::optional<std::filesystem::path> reference_ply;
  std::optional<std::filesystem::path> map_landmarks_json;
  std::optional<std::filesystem::path> reference_landmarks_json;

  std::filesystem::path output_dir = "out";

  void validate() const;
};

io::json pipeline_config_to_json(const PipelineConfig& config);
// Partial JSON: absent keys keep the passed-in defaults.
PipelineConfig pipeline_config_from_json(const io::json& j, PipelineConfig base = {});

enum class StageStatus { Done, Resumed, Skipped };

struct StageResult {
  std::string name;
  StageStatus status = StageStatus::Done;
  double seconds = 0.0;
  int warnings = 0;
  std::string note;
};

struct PipelineSummary {
  std::vector<StageResult> stages;
  std::filesystem::path summary_path;
};

// Runs odometry -> colorize -> fruits (when detections or labels exist) ->
// eval (when reference + landmarks are configured). Each stage reads its
// inputs from files and is skipped when its outputs already exist, so
// deleting one artifact and re-running regenerates exactly that stage.
// Failures carry the stage name; completed artifacts stay on disk.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// `stages` limits execution to the named stages ("odometry", "colorize",
// "fruits", "eval"); empty means all. A requested stage whose inputs are
// missing fails rather than silently running earlier stages.
PipelineSummary run_pipeline(const std::filesystem::path& manifest_path,
                             const PipelineConfig& config,
                             const std::vector<std::string>& stages = {});

}  // namespace orchard

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "idsgan/errors.hpp"
#include "idsgan/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

const std::map<std::string, idsgan::pipeline::Stage> kStages{
    {"prepare", idsgan::pipeline::Stage::prepare},
    {"train", idsgan::pipeline::Stage::train},
    {"gan", idsgan::pipeline::Stage::gan},
    {"synth", idsgan::pipeline::Stage::synth},
    {"retrain", idsgan::pipeline::Stage::retrain},
    {"evaluate", idsgan::pipeline::Stage::evaluate},
    {"report", idsgan::pipeline::Stage::report},
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> dataset;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch;
  std::optional<std::size_t> synthetic_per_class;
  std::optional<std::size_t> gan_epochs;
};

void apply(const Overrides& o, idsgan::pipeline::PipelineConfig& config) {
  if (o.seed) config.seed = *o.seed;
  if (o.out) config.output_dir = std::filesystem::absolute(*o.out).lexically_normal();
  if (o.dataset) config.dataset = idsgan::data::dataset_kind_from_string(*o.dataset);
  if (o.epochs) config.train.epochs = *o.epochs;
  if (o.batch) config.train.batch_size = *o.batch;
  if (o.synthetic_per_class) config.synthetic_per_class = *o.synthetic_per_class;
  if (o.gan_epochs) config.gan.epochs = *o.gan_epochs;
  idsgan::pipeline::validate(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attention-GAN intrusion detection pipeline"};
  app.set_version_flag("--version", "idsgan 0.1.0");

  std::string command;
  std::string config_path;
  Overrides o;
  bool quiet = false;

  std::vector<std::string> commands{"run-all"};
  for (const auto& [name, stage] : kStages) commands.push_back(name);
  app.add_option("command", command, "prepare | train | gan | synth | retrain | evaluate | "
                                     "run-all | report")
      ->required()
      ->check(CLI::IsMember(commands));
  app.add_option("--config", config_path, "Pipeline config (JSON)")->required();
  app.add_option("--seed", o.seed, "Master seed");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--dataset", o.dataset, "Dataset kind")
      ->check(CLI::IsMember({"kdd", "cicids", "generic"}));
  app.add_option("--epochs", o.epochs, "Classifier training epochs");
  app.add_option("--batch", o.batch, "Classifier batch size")->check(CLI::PositiveNumber);
  app.add_option("--synthetic-per-class", o.synthetic_per_class,
                 "Synthetic rows generated per class");
  app.add_option("--gan-epochs", o.gan_epochs, "GAN training epochs");
  app.add_flag("-q,--quiet", quiet, "Only print errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const idsgan::pipeline::Logger log = [quiet](std::string_view line) {
    if (!quiet) std::cerr << line << '\n';
  };

  try {
    auto config = idsgan::pipeline::load_config(config_path);
    apply(o, config);
    if (command == "run-all") {
      const auto result = idsgan::pipeline::run_all(config, log);
      if (!quiet) {
        for (const auto& row : result.comparison) {
          std::cout << row.metric << ' ' << row.before << " -> " << row.after << '\n';
        }
      }
    } else {
      idsgan::pipeline::run_stage(kStages.at(command), config, log);
    }
    return kExitOk;
  } catch (const idsgan::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const idsgan::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const idsgan::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << '\n';
    return kExitData;
  } catch (const idsgan::ShapeError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const idsgan::DomainError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "idsgan/checkpoint.hpp"
#include "idsgan/data.hpp"
#include "idsgan/gan.hpp"
#include "idsgan/history.hpp"
#include "idsgan/model.hpp"
#include "idsgan/optim.hpp"

// Storing domain objects in an Archive under a key prefix. Every get_* throws
// CheckpointError when the stored entry is missing or inconsistent.
namespace idsgan::ckpt {

void put_model(Archive& archive, const std::string& key, const nn::Model& model);
nn::Model get_model(const Archive& archive, const std::string& key);

void put_history(Archive& archive, const std::string& key, const TrainHistory& history);
TrainHistory get_history(const Archive& archive, const std::string& key);

void put_gan(Archive& archive, const std::string& key, const gan::GanBundle& bundle);
gan::GanBundle get_gan(const Archive& archive, const std::string& key);

void put_dataset(Archive& archive, const std::string& key, const data::Dataset& dataset);
data::Dataset get_dataset(const Archive& archive, const std::string& key);

void put_encoders(Archive& archive, const std::string& key, const data::EncoderState& state);
data::EncoderState get_encoders(const Archive& archive, const std::string& key);

void put_scaler(Archive& archive, const std::string& key, const data::ScalerState& state);
data::ScalerState get_scaler(const Archive& archive, const std::string& key);

void put_selection(Archive& archive, const std::string& key,
                   const data::FeatureSelection& selection);
data::FeatureSelection get_selection(const Archive& archive, const std::string& key);

nlohmann::json to_json(const AdamConfig& config);
AdamConfig adam_from_json(const nlohmann::json& j);
nlohmann::json to_json(const gan::GanConfig& config);
gan::GanConfig gan_config_from_json(const nlohmann::json& j);

}  // namespace idsgan::ckpt

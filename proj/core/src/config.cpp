#include "ars/config.hpp"

#include <json.hpp>

#include "ars/report.hpp"
#include "ars/toml_lite.hpp"

namespace ars {

namespace {

TrainConfig train_from_json(const nlohmann::json& doc, const TrainConfig& defaults) {
  TrainConfig cfg = defaults;
  cfg.learning_rate = doc.value("learning_rate", defaults.learning_rate);
  cfg.batch_size = doc.value("batch_size", defaults.batch_size);
  cfg.epochs = doc.value("epochs", defaults.epochs);
  cfg.momentum = doc.value("momentum", defaults.momentum);
  return cfg;
}

nlohmann::json train_to_json(const TrainConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate},
          {"batch_size", cfg.batch_size},
          {"epochs", cfg.epochs},
          {"momentum", cfg.momentum}};
}

}  // namespace

ScenarioConfig scenario_config_from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseFailure, std::string("config JSON: ") + e.what());
  }

  try {
    ScenarioConfig cfg;
    cfg.name = doc.value("name", cfg.name);
    const std::string mode = doc.value("mode", std::string("horizontal"));
    require(mode == "horizontal" || mode == "vertical", ErrorCode::InvalidConfig,
            "config: mode must be 'horizontal' or 'vertical'");
    cfg.mode = mode == "horizontal" ? PartitionMode::Horizontal : PartitionMode::Vertical;
    cfg.parties = doc.value("parties", cfg.parties);
    cfg.owners = doc.value("owners", cfg.owners);
    cfg.label_holder = doc.value("label_holder", cfg.label_holder);
    cfg.test_fraction = doc.value("test_fraction", cfg.test_fraction);
    cfg.seed = doc.value("seed", cfg.seed);
    if (doc.contains("tasks")) {
      cfg.tasks = doc.at("tasks").get<std::vector<std::string>>();
    }
    if (doc.contains("initiator")) {
      const auto& init = doc.at("initiator");
      if (init.is_string()) {
        require(init.get<std::string>() == "largest", ErrorCode::InvalidConfig,
                "config: initiator must be an index or 'largest'");
        cfg.initiator_largest = true;
      } else {
        cfg.initiator = init.get<int>();
      }
    }

    if (doc.contains("dataset")) {
      const auto& d = doc.at("dataset");
      cfg.dataset.kind = d.value("kind", cfg.dataset.kind);
      cfg.dataset.images = d.value("images", cfg.dataset.images);
      cfg.dataset.labels = d.value("labels", cfg.dataset.labels);
      cfg.dataset.path = d.value("path", cfg.dataset.path);
      cfg.dataset.schema_path = d.value("schema", cfg.dataset.schema_path);
      cfg.dataset.n = d.value("n", cfg.dataset.n);
      cfg.dataset.dim = d.value("dim", cfg.dataset.dim);
      cfg.dataset.classes = d.value("classes", cfg.dataset.classes);
      cfg.dataset.attrs = d.value("attrs", cfg.dataset.attrs);
      cfg.dataset.seed = d.value("seed", cfg.dataset.seed);
      cfg.dataset.limit = d.value("limit", cfg.dataset.limit);
    }

    if (doc.contains("arch")) {
      const auto& a = doc.at("arch");
      cfg.arch.latent_dim = a.value("latent_dim", cfg.arch.latent_dim);
      if (a.contains("enc_hidden")) cfg.arch.enc_hidden = a.at("enc_hidden").get<std::vector<int>>();
      if (a.contains("dec_hidden")) cfg.arch.dec_hidden = a.at("dec_hidden").get<std::vector<int>>();
      if (a.contains("sdec_hidden")) cfg.arch.sdec_hidden = a.at("sdec_hidden").get<std::vector<int>>();
      if (a.contains("clf_hidden")) cfg.arch.clf_hidden = a.at("clf_hidden").get<std::vector<int>>();
      if (a.contains("attr_hidden")) cfg.arch.attr_hidden = a.at("attr_hidden").get<std::vector<int>>();
    }

    if (doc.contains("train")) {
      const auto& t = doc.at("train");
      if (t.contains("autoencoder")) {
        cfg.train.autoencoder = train_from_json(t.at("autoencoder"), cfg.train.autoencoder);
      }
      if (t.contains("substitute")) {
        cfg.train.substitute = train_from_json(t.at("substitute"), cfg.train.substitute);
      }
      if (t.contains("classifier")) {
        cfg.train.classifier = train_from_json(t.at("classifier"), cfg.train.classifier);
      }
      if (t.contains("extractor")) {
        cfg.train.extractor = train_from_json(t.at("extractor"), cfg.train.extractor);
      }
    }

    if (doc.contains("noise")) {
      const auto& n = doc.at("noise");
      if (n.contains("epsilon_grid")) {
        cfg.noise.epsilon_grid = n.at("epsilon_grid").get<std::vector<double>>();
      }
      cfg.noise.iterations = n.value("iterations", cfg.noise.iterations);
      cfg.noise.epsilon_mode = n.value("epsilon_mode", cfg.noise.epsilon_mode);
      cfg.noise.epsilon_scale = n.value("epsilon_scale", cfg.noise.epsilon_scale);
      cfg.noise.lambda_reconstruction =
          n.value("lambda_reconstruction", cfg.noise.lambda_reconstruction);
      if (n.contains("lambda_attributes")) {
        cfg.noise.lambda_attributes = n.at("lambda_attributes").get<std::vector<double>>();
      }
      cfg.noise.strategy = n.value("strategy", cfg.noise.strategy);
      cfg.noise.mask_attribute_noise =
          n.value("mask_attribute_noise", cfg.noise.mask_attribute_noise);
      if (n.contains("fixed_vector")) {
        cfg.noise.fixed_vector = n.at("fixed_vector").get<std::vector<double>>();
      }
    }

    if (doc.contains("attacks")) {
      const auto& a = doc.at("attacks");
      cfg.attacks.reconstruction = a.value("reconstruction", cfg.attacks.reconstruction);
      cfg.attacks.adversarial_training =
          a.value("adversarial_training", cfg.attacks.adversarial_training);
      cfg.attacks.attribute = a.value("attribute", cfg.attacks.attribute);
      cfg.attacks.mask_search = a.value("mask_search", cfg.attacks.mask_search);
      cfg.attacks.mask_candidates = a.value("mask_candidates", cfg.attacks.mask_candidates);
      cfg.attacks.probe_fraction = a.value("probe_fraction", cfg.attacks.probe_fraction);
      cfg.attacks.victim = a.value("victim", cfg.attacks.victim);
      cfg.attacks.attacker = a.value("attacker", cfg.attacks.attacker);
      if (a.contains("hidden")) cfg.attacks.hidden = a.at("hidden").get<std::vector<int>>();
    }

    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
}

ScenarioConfig load_scenario_config(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "toml") {
    return scenario_config_from_json_text(toml_to_json_text(text));
  }
  if (ext == "json") {
    return scenario_config_from_json_text(text);
  }
  throw Error(ErrorCode::InvalidConfig,
              "config file '" + path + "' must end in .toml or .json");
}

std::string scenario_config_to_json(const ScenarioConfig& cfg) {
  nlohmann::json doc;
  doc["name"] = cfg.name;
  doc["mode"] = cfg.mode == PartitionMode::Horizontal ? "horizontal" : "vertical";
  doc["parties"] = cfg.parties;
  doc["owners"] = cfg.owners;
  doc["label_holder"] = cfg.label_holder;
  if (cfg.initiator_largest) {
    doc["initiator"] = "largest";
  } else {
    doc["initiator"] = cfg.initiator;
  }
  doc["test_fraction"] = cfg.test_fraction;
  doc["seed"] = cfg.seed;
  doc["tasks"] = cfg.tasks;
  doc["dataset"] = {{"kind", cfg.dataset.kind},   {"images", cfg.dataset.images},
                    {"labels", cfg.dataset.labels}, {"path", cfg.dataset.path},
                    {"schema", cfg.dataset.schema_path}, {"n", cfg.dataset.n},
                    {"dim", cfg.dataset.dim},       {"classes", cfg.dataset.classes},
                    {"attrs", cfg.dataset.attrs},   {"seed", cfg.dataset.seed},
                    {"limit", cfg.dataset.limit}};
  doc["arch"] = {{"latent_dim", cfg.arch.latent_dim},
                 {"enc_hidden", cfg.arch.enc_hidden},
                 {"dec_hidden", cfg.arch.dec_hidden},
                 {"sdec_hidden", cfg.arch.sdec_hidden},
                 {"clf_hidden", cfg.arch.clf_hidden},
                 {"attr_hidden", cfg.arch.attr_hidden}};
  doc["train"] = {{"autoencoder", train_to_json(cfg.train.autoencoder)},
                  {"substitute", train_to_json(cfg.train.substitute)},
                  {"classifier", train_to_json(cfg.train.classifier)},
                  {"extractor", train_to_json(cfg.train.extractor)}};
  doc["noise"] = {{"epsilon_grid", cfg.noise.epsilon_grid},
                  {"iterations", cfg.noise.iterations},
                  {"epsilon_mode", cfg.noise.epsilon_mode},
                  {"epsilon_scale", cfg.noise.epsilon_scale},
                  {"lambda_reconstruction", cfg.noise.lambda_reconstruction},
                  {"lambda_attributes", cfg.noise.lambda_attributes},
                  {"strategy", cfg.noise.strategy},
                  {"mask_attribute_noise", cfg.noise.mask_attribute_noise},
                  {"fixed_vector", cfg.noise.fixed_vector}};
  doc["attacks"] = {{"reconstruction", cfg.attacks.reconstruction},
                    {"adversarial_training", cfg.attacks.adversarial_training},
                    {"attribute", cfg.attacks.attribute},
                    {"mask_search", cfg.attacks.mask_search},
                    {"mask_candidates", cfg.attacks.mask_candidates},
                    {"probe_fraction", cfg.attacks.probe_fraction},
                    {"victim", cfg.attacks.victim},
                    {"attacker", cfg.attacks.attacker},
                    {"hidden", cfg.attacks.hidden}};
  return doc.dump(2);
}

}  // namespace ars

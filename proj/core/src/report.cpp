#include "ars/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ars/bytes.hpp"

namespace ars {

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoFailure, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  out << text;
  require(out.good(), ErrorCode::IoFailure, "short write to '" + path + "'");
}

std::string shared_record_to_json(const SharedRecord& record) {
  nlohmann::json doc;
  doc["party_id"] = record.party_id;
  doc["sample_id"] = record.sample_id;
  doc["z_hat"] = vector_to_json(record.z_hat);
  doc["label"] = vector_to_json(record.label);
  return doc.dump();
}

SharedRecord shared_record_from_json(const std::string& line) {
  try {
    const nlohmann::json doc = nlohmann::json::parse(line);
    SharedRecord record;
    record.party_id = doc.at("party_id").get<int>();
    record.sample_id = doc.at("sample_id").get<int>();
    record.z_hat = vector_from_json(doc.at("z_hat"));
    record.label = vector_from_json(doc.at("label"));
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseFailure, std::string("shared record: ") + e.what());
  }
}

std::string pool_to_jsonl(const SharedPool& pool) {
  std::string out;
  for (const auto& record : pool.records) {
    out += shared_record_to_json(record);
    out += '\n';
  }
  return out;
}

SharedPool pool_from_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoFailure, "cannot open '" + path + "'");
  SharedPool pool;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    pool.records.push_back(shared_record_from_json(line));
  }
  return pool;
}

void write_pool_jsonl(const SharedPool& pool, const std::string& path) {
  write_text_file(path, pool_to_jsonl(pool));
}

std::string pool_content_hash(const SharedPool& pool) {
  return to_hex(fnv1a64(pool_to_jsonl(pool)));
}

namespace {

nlohmann::json epsilon_row_to_json(const EpsilonRow& row) {
  nlohmann::json doc;
  doc["epsilon"] = row.epsilon;
  doc["epsilon_effective"] = row.epsilon_effective;
  doc["task_accuracy"] = row.task_accuracy;
  doc["task_f1"] = row.task_f1;
  doc["naive_mse"] = row.naive_mse;
  doc["naive_psnr"] = row.naive_psnr;
  doc["advtrain_mse"] = row.advtrain_mse;
  doc["advtrain_psnr"] = row.advtrain_psnr;
  if (row.advtrain_ssim) doc["advtrain_ssim"] = *row.advtrain_ssim;
  doc["recon_loss_signed"] = row.recon_loss_signed;
  doc["recon_loss_raw"] = row.recon_loss_raw;
  if (row.advtr_rec_acc) doc["advtr_rec_acc"] = *row.advtr_rec_acc;
  if (row.rec_acc) doc["rec_acc"] = *row.rec_acc;
  if (!row.shared_hash.empty()) doc["shared_hash"] = row.shared_hash;
  if (!row.attributes.empty()) {
    doc["attributes"] = nlohmann::json::array();
    for (const auto& a : row.attributes) {
      doc["attributes"].push_back({{"index", a.index},
                                   {"equal_to_fixed_rate", a.equal_to_fixed_rate},
                                   {"accuracy", a.accuracy}});
    }
  }
  return doc;
}

}  // namespace

std::string scenario_report_to_json(const ScenarioReport& report) {
  nlohmann::json doc;
  doc["name"] = report.name;
  doc["seed"] = report.seed;
  if (!report.config_json.empty()) {
    doc["config"] = nlohmann::json::parse(report.config_json);
  }
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) doc["rows"].push_back(epsilon_row_to_json(row));
  return doc.dump(2) + "\n";
}

std::string task_suite_report_to_json(const TaskSuiteReport& report) {
  nlohmann::json doc;
  doc["name"] = report.name;
  doc["seed"] = report.seed;
  doc["epsilon"] = report.epsilon;
  if (!report.config_json.empty()) {
    doc["config"] = nlohmann::json::parse(report.config_json);
  }
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    doc["rows"].push_back({{"task", row.task},
                           {"accuracy", row.accuracy},
                           {"shared_hash", row.shared_hash}});
  }
  return doc.dump(2) + "\n";
}

std::string attack_report_to_json(const AttackReport& report) {
  nlohmann::json doc;
  doc["kind"] = report.kind;
  if (!report.per_sample_distance.empty()) {
    doc["per_sample_distance"] = report.per_sample_distance;
    doc["mse"] = report.mse;
    doc["psnr"] = report.psnr;
  }
  if (report.ssim) doc["ssim"] = *report.ssim;
  if (!report.predicted.empty()) doc["predicted"] = report.predicted;
  if (report.equal_to_fixed_rate) doc["equal_to_fixed_rate"] = *report.equal_to_fixed_rate;
  if (report.attribute_accuracy) doc["attribute_accuracy"] = *report.attribute_accuracy;
  doc["attacker"] = {{"hidden", report.attacker_hidden},
                     {"learning_rate", report.attacker_train.learning_rate},
                     {"batch_size", report.attacker_train.batch_size},
                     {"epochs", report.attacker_train.epochs},
                     {"seed", report.attacker_seed}};
  return doc.dump(2) + "\n";
}

std::string mask_search_result_to_json(const MaskSearchResult& result) {
  nlohmann::json doc;
  doc["best_index"] = result.best_index;
  doc["candidate_scores"] = result.candidate_scores;
  doc["best_score"] = result.candidate_scores.empty()
                          ? 0.0
                          : result.candidate_scores[result.best_index];
  if (result.overlap_with_victim) {
    doc["overlap_with_victim"] = *result.overlap_with_victim;
  }
  doc["report"] = nlohmann::json::parse(attack_report_to_json(result.best_report));
  return doc.dump(2) + "\n";
}

namespace {

void append_csv_row(std::string& out, double epsilon, const std::string& metric,
                    double value, std::uint64_t seed) {
  std::ostringstream line;
  line.precision(17);
  line << epsilon << ',' << metric << ',' << value << ',' << seed << '\n';
  out += line.str();
}

void append_report_rows(std::string& out, const nlohmann::json& doc) {
  const std::uint64_t seed = doc.value("seed", std::uint64_t{0});
  for (const auto& row : doc.at("rows")) {
    const double eps = row.value("epsilon", 0.0);
    for (const auto& [key, value] : row.items()) {
      if (key == "epsilon" || key == "shared_hash") continue;
      if (value.is_number()) {
        append_csv_row(out, eps, key, value.get<double>(), seed);
      } else if (key == "attributes") {
        for (const auto& attr : value) {
          const std::string suffix = std::to_string(attr.at("index").get<int>());
          append_csv_row(out, eps, "attr" + suffix + "_equal_rate",
                         attr.at("equal_to_fixed_rate").get<double>(), seed);
          append_csv_row(out, eps, "attr" + suffix + "_accuracy",
                         attr.at("accuracy").get<double>(), seed);
        }
      }
    }
  }
}

}  // namespace

std::string scenario_report_to_csv(const ScenarioReport& report) {
  std::string out = "epsilon,metric,value,seed\n";
  append_report_rows(out, nlohmann::json::parse(scenario_report_to_json(report)));
  return out;
}

std::string merge_reports_to_csv(const std::vector<std::string>& report_json_texts) {
  std::string out = "epsilon,metric,value,seed\n";
  for (const auto& text : report_json_texts) {
    try {
      append_report_rows(out, nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseFailure, std::string("report merge: ") + e.what());
    }
  }
  return out;
}

}  // namespace ars

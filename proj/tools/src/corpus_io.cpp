#include "brm_cli/corpus_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "brm_cli/run_config.hpp"

namespace brm::cli {

namespace fs = std::filesystem;
using OrderedJson = nlohmann::ordered_json;

std::string Manifest::to_json() const {
  OrderedJson doc;
  doc["split"] = split;
  doc["vocabulary"] = vocabulary.names();
  doc["house_params"] = {{"width", house_params.width},
                         {"height", house_params.height},
                         {"min_room", house_params.min_room},
                         {"extra_door_probability", house_params.extra_door_probability}};
  OrderedJson list = OrderedJson::array();
  for (const auto& h : houses) list.push_back({{"seed", h.seed}, {"file", h.file}});
  doc["houses"] = std::move(list);
  return doc.dump(2) + "\n";
}

Manifest Manifest::from_json(const std::string& text) {
  Manifest m;
  try {
    const auto doc = nlohmann::json::parse(text);
    m.split = doc.at("split").get<std::string>();
    m.vocabulary = ConceptVocabulary(doc.at("vocabulary").get<std::vector<std::string>>());
    const auto& hp = doc.at("house_params");
    m.house_params.width = hp.at("width").get<int>();
    m.house_params.height = hp.at("height").get<int>();
    m.house_params.min_room = hp.at("min_room").get<int>();
    m.house_params.extra_door_probability = hp.at("extra_door_probability").get<double>();
    m.house_params.vocabulary = m.vocabulary;
    for (const auto& h : doc.at("houses")) {
      m.houses.push_back({h.at("seed").get<std::uint64_t>(), h.at("file").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw DataError("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::vector<std::string> write_corpus(const std::string& dir, const CorpusSplits& splits,
                                      const HouseParams& params, bool force) {
  const fs::path root(dir);
  if (fs::exists(root) && !fs::is_directory(root)) throw DataError(dir + " exists and is not a directory");
  if (fs::exists(root) && !fs::is_empty(root)) {
    if (!force) throw DataError("corpus directory " + dir + " is not empty (use --force to overwrite)");
    fs::remove_all(root / "houses");
  }
  fs::create_directories(root / "houses");

  std::vector<std::string> manifests;
  const std::pair<const char*, const std::vector<std::uint64_t>*> layout[] = {
      {"train", &splits.train}, {"valid", &splits.valid}, {"test", &splits.test}};
  for (const auto& [split, seeds] : layout) {
    Manifest m;
    m.split = split;
    m.vocabulary = params.vocabulary;
    m.house_params = params;
    for (std::size_t i = 0; i < seeds->size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "houses/%s_%03zu.json", split, i);
      const House house = generate_house((*seeds)[i], params);
      write_text_file((root / name).string(), house.to_json());
      m.houses.push_back({(*seeds)[i], name});
    }
    const std::string path = (root / (std::string(split) + ".json")).string();
    write_text_file(path, m.to_json());
    manifests.push_back(path);
  }
  return manifests;
}

Manifest read_manifest(const std::string& path) {
  if (!fs::exists(path)) throw DataError("manifest not found: " + path);
  return Manifest::from_json(read_text_file(path));
}

Corpus load_corpus(const std::string& manifest_path, const RelationSampling& sampling) {
  const Manifest m = read_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<std::pair<std::uint64_t, House>> houses;
  houses.reserve(m.houses.size());
  for (const auto& entry : m.houses) {
    const std::string file = (base / entry.file).string();
    try {
      houses.emplace_back(entry.seed, House::from_json(read_text_file(file)));
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      throw DataError("bad house file " + file + ": " + e.what());
    }
  }
  return build_corpus(m.split, m.vocabulary, std::move(houses), sampling);
}

}  // namespace brm::cli

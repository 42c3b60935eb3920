#include "vasum/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "vasum/error.hpp"

namespace vasum {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kManifestName = "manifest.json";

std::string features_file(const std::string& id) { return id + ".features.bin"; }
std::string gtscore_file(const std::string& id) { return id + ".gtscore.bin"; }
std::string usersum_file(const std::string& id) { return id + ".usersum.bin"; }

struct ManifestEntry {
  VideoRecord record;
  std::int64_t declared_picks = 0;
  std::int64_t declared_dim = 0;
  std::string features_name, gtscore_name, usersum_name;
};

// Parses one manifest entry; structural problems go to `errors`.
bool parse_entry(const json& j, ManifestEntry& entry, std::vector<std::string>& errors) {
  try {
    VideoRecord& r = entry.record;
    r.id = j.at("id").get<std::string>();
    r.n_frames = j.at("n_frames").get<std::int64_t>();
    r.fps = j.at("fps").get<double>();
    entry.declared_picks = j.at("P").get<std::int64_t>();
    entry.declared_dim = j.at("D").get<std::int64_t>();
    r.n_users = j.at("U").get<std::int64_t>();
    r.picks = j.at("picks").get<std::vector<std::int64_t>>();
    if (j.contains("change_points")) {
      for (const auto& cp : j.at("change_points")) {
        if (!cp.is_array() || cp.size() != 2) {
          errors.push_back("change point entry is not a [start, end] pair");
          return false;
        }
        r.change_points.push_back({cp[0].get<std::int64_t>(), cp[1].get<std::int64_t>()});
      }
    }
    entry.features_name = j.value("features_file", features_file(r.id));
    entry.gtscore_name = j.value("gtscore_file", gtscore_file(r.id));
    entry.usersum_name = j.value("usersum_file", usersum_file(r.id));
  } catch (const json::exception& e) {
    errors.push_back(std::string("malformed manifest entry: ") + e.what());
    return false;
  }
  return true;
}

std::string size_mismatch(const std::string& what, std::size_t actual, std::size_t expected) {
  std::ostringstream os;
  os << "dimension mismatch: " << what << " has " << actual << " bytes, expected "
     << expected;
  return os.str();
}

// Reads the sidecars into entry.record; returns false if any payload is
// unusable.
bool read_payloads(const fs::path& dir, ManifestEntry& entry,
                   std::vector<std::string>& errors) {
  VideoRecord& r = entry.record;
  const std::int64_t p = entry.declared_picks;
  const std::int64_t d = entry.declared_dim;
  if (p < 0 || d < 0 || r.n_users < 0 || r.n_frames < 0) {
    errors.push_back("negative dimension in manifest");
    return false;
  }
  bool ok = true;
  auto load = [&](const std::string& name, std::size_t expected,
                  std::vector<unsigned char>& bytes) {
    const fs::path path = dir / name;
    if (!fs::exists(path)) {
      errors.push_back("missing file " + name);
      ok = false;
      return false;
    }
    bytes = detail::read_file(path);
    if (bytes.size() != expected) {
      errors.push_back(size_mismatch(name, bytes.size(), expected));
      ok = false;
      return false;
    }
    return true;
  };

  std::vector<unsigned char> bytes;
  if (load(entry.features_name, static_cast<std::size_t>(p * d) * 4, bytes)) {
    const auto values = detail::decode_f32(bytes);
    r.features = Eigen::Map<const FeatureMatrix>(values.data(), p, d);
  }
  if (load(entry.gtscore_name, static_cast<std::size_t>(p) * 4, bytes)) {
    r.gt_score = detail::decode_f32(bytes);
  }
  if (load(entry.usersum_name, static_cast<std::size_t>(r.n_users * r.n_frames), bytes)) {
    r.user_summaries.assign(bytes.begin(), bytes.end());
  }
  return ok;
}

json read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifestName;
  std::ifstream in(path);
  if (!in) throw DatasetError("", "missing file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DatasetError("", std::string("manifest is not valid JSON: ") + e.what());
  }
}

// Shared driver for validate/load: visits every entry, reporting problems.
template <typename OnVideo>
void scan_dataset(const fs::path& dir, std::string& name, Protocol& protocol,
                  std::vector<Violation>& violations, OnVideo&& on_video) {
  const json manifest = read_manifest(dir);
  name = manifest.value("name", dir.filename().string());
  protocol = manifest.contains("protocol")
                 ? parse_protocol(manifest.at("protocol").get<std::string>())
                 : default_protocol_for(name);
  if (!manifest.contains("videos") || !manifest.at("videos").is_array()) {
    violations.push_back({"", "manifest has no 'videos' array"});
    return;
  }
  std::set<std::string> seen;
  for (const auto& j : manifest.at("videos")) {
    ManifestEntry entry;
    std::vector<std::string> errors;
    if (parse_entry(j, entry, errors) && read_payloads(dir, entry, errors)) {
      if (static_cast<std::int64_t>(entry.record.picks.size()) != entry.declared_picks) {
        errors.push_back("dimension mismatch: picks has " +
                         std::to_string(entry.record.picks.size()) + " entries, P = " +
                         std::to_string(entry.declared_picks));
      }
      for (auto& e : check_record(entry.record)) errors.push_back(std::move(e));
    }
    const std::string id = entry.record.id;
    if (!id.empty() && !seen.insert(id).second) errors.push_back("duplicate video id");
    for (auto& e : errors) violations.push_back({id, std::move(e)});
    if (errors.empty()) on_video(std::move(entry.record));
  }
}

}  // namespace

const VideoRecord* Dataset::find(std::string_view id) const {
  for (const auto& v : videos)
    if (v.id == id) return &v;
  return nullptr;
}

Protocol default_protocol_for(std::string_view dataset_name) {
  std::string lower(dataset_name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower.find("summe") != std::string::npos ? Protocol::kMax : Protocol::kMean;
}

std::vector<std::string> check_record(const VideoRecord& r) {
  std::vector<std::string> errors;
  const std::int64_t p = r.num_picks();
  if (r.n_frames <= 0) errors.push_back("n_frames must be positive");
  if (!(r.fps > 0) || !std::isfinite(r.fps)) errors.push_back("fps must be positive");
  if (r.features.rows() != p)
    errors.push_back("dimension mismatch: features rows != number of picks");
  if (static_cast<std::int64_t>(r.gt_score.size()) != p)
    errors.push_back("dimension mismatch: gt_score length != number of picks");
  if (static_cast<std::int64_t>(r.user_summaries.size()) != r.n_users * r.n_frames)
    errors.push_back("dimension mismatch: user summaries size != U x n_frames");

  for (std::int64_t i = 0; i < p; ++i) {
    if (r.picks[i] < 0 || r.picks[i] >= r.n_frames) {
      errors.push_back("pick " + std::to_string(i) + " out of frame range");
      break;
    }
    if (i > 0 && r.picks[i] <= r.picks[i - 1]) {
      errors.push_back("picks not strictly increasing at position " + std::to_string(i));
      break;
    }
  }
  if (!r.change_points.empty()) {
    std::int64_t expect = 0;
    bool ok = true;
    for (const auto& s : r.change_points) {
      if (s.first != expect || s.last < s.first) {
        ok = false;
        break;
      }
      expect = s.last + 1;
    }
    if (!ok || expect != r.n_frames)
      errors.push_back("change points do not partition [0, n_frames-1]");
  }
  if (!r.features.allFinite()) errors.push_back("non-finite feature value");
  for (float g : r.gt_score) {
    if (!(g >= 0.0f && g <= 1.0f)) {
      errors.push_back("gt_score entry outside [0, 1]");
      break;
    }
  }
  for (std::uint8_t u : r.user_summaries) {
    if (u > 1) {
      errors.push_back("user summary entry is not 0/1");
      break;
    }
  }
  return errors;
}

std::vector<Violation> validate_dataset_dir(const fs::path& dir) {
  std::vector<Violation> violations;
  std::string name;
  Protocol protocol;
  try {
    scan_dataset(dir, name, protocol, violations, [](VideoRecord&&) {});
  } catch (const Error& e) {
    violations.push_back({"", e.what()});
  }
  return violations;
}

Dataset load_dataset(const fs::path& dir) {
  Dataset ds;
  std::vector<Violation> violations;
  scan_dataset(dir, ds.name, ds.protocol, violations,
               [&](VideoRecord&& r) { ds.videos.push_back(std::move(r)); });
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw DatasetError(v.video_id, v.message);
  }
  return ds;
}

void write_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir);
  json manifest;
  manifest["name"] = ds.name;
  manifest["protocol"] = std::string(to_string(ds.protocol));
  json videos = json::array();
  for (const auto& r : ds.videos) {
    if (auto errors = check_record(r); !errors.empty()) throw DatasetError(r.id, errors.front());
    json v;
    v["id"] = r.id;
    v["n_frames"] = r.n_frames;
    v["fps"] = r.fps;
    v["P"] = r.num_picks();
    v["D"] = r.feature_dim();
    v["U"] = r.n_users;
    v["picks"] = r.picks;
    json cps = json::array();
    for (const auto& s : r.change_points) cps.push_back({s.first, s.last});
    v["change_points"] = std::move(cps);
    v["features_file"] = features_file(r.id);
    v["gtscore_file"] = gtscore_file(r.id);
    v["usersum_file"] = usersum_file(r.id);
    videos.push_back(std::move(v));

    std::vector<unsigned char> bytes;
    bytes.reserve(static_cast<std::size_t>(r.features.size()) * 4);
    for (Eigen::Index i = 0; i < r.features.size(); ++i)
      detail::append_f32(bytes, r.features.data()[i]);
    detail::write_file(dir / features_file(r.id), bytes);
    bytes.clear();
    for (float g : r.gt_score) detail::append_f32(bytes, g);
    detail::write_file(dir / gtscore_file(r.id), bytes);
    detail::write_file(dir / usersum_file(r.id), r.user_summaries);
  }
  manifest["videos"] = std::move(videos);
  std::ofstream out(dir / kManifestName, std::ios::trunc);
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("failed to write " + (dir / kManifestName).string());
}

std::vector<double> upsample_to_frames(const VideoRecord& r,
                                       std::span<const double> pick_scores) {
  if (static_cast<std::int64_t>(pick_scores.size()) != r.num_picks())
    throw ParameterError("score vector length " + std::to_string(pick_scores.size()) +
                         " does not match " + std::to_string(r.num_picks()) + " picks");
  std::vector<double> frames(static_cast<std::size_t>(r.n_frames), 0.0);
  if (pick_scores.empty()) return frames;
  std::size_t pick = 0;
  for (std::int64_t j = 0; j < r.n_frames; ++j) {
    while (pick + 1 < r.picks.size() && r.picks[pick + 1] <= j) ++pick;
    frames[j] = pick_scores[pick];
  }
  return frames;
}

std::vector<double> sample_at_picks(const VideoRecord& r,
                                    std::span<const double> frame_values) {
  std::vector<double> out;
  out.reserve(r.picks.size());
  for (std::int64_t p : r.picks) out.push_back(frame_values[p]);
  return out;
}

}  // namespace vasum

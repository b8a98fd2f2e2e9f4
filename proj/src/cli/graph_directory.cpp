#include "embisim/cli/graph_directory.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <set>

#include "embisim/em/file.hpp"

namespace embisim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json ref_json(const TableRef& r) {
  return {{"file", r.file}, {"record_width", r.record_width}, {"record_count", r.record_count},
          {"sort_key", r.sort_key}};
}

TableRef ref_from(const json& j) {
  TableRef r;
  r.file = j.at("file").get<std::string>();
  r.record_width = j.at("record_width").get<std::size_t>();
  r.record_count = j.at("record_count").get<std::uint64_t>();
  r.sort_key = j.value("sort_key", "");
  return r;
}

constexpr const char* kMeta = "meta.json";
constexpr const char* kLock = "lock";

}  // namespace

json to_json(const Meta& m) {
  json j;
  j["format_version"] = m.format_version;
  j["generation"] = m.generation;
  j["next_node_id"] = m.next_node_id;
  j["duplicate_edges_removed"] = m.duplicate_edges_removed;
  j["labels"] = m.labels;
  j["names"] = {{"file", m.names.file}, {"record_count", m.names.record_count}, {"byte_size", m.names.byte_size}};
  j["nodes"] = ref_json(m.nodes);
  j["edges_st"] = ref_json(m.edges_st);
  j["edges_ts"] = ref_json(m.edges_ts);
  if (m.history) {
    j["history"] = ref_json(*m.history);
    j["width"] = m.width;
    j["k"] = m.k;
    j["valid"] = m.valid;
    j["consistent"] = m.consistent;
    j["k_effective"] = m.k_effective;
    j["store_dir"] = m.store_dir;
    j["store"] = m.store;
    j["build_stats"] = m.build_stats;
  }
  j["last_run"] = m.last_run;
  return j;
}

Meta meta_from_json(const json& j) {
  Meta m;
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != kFormatVersion) {
    throw InputError("graph directory has format version " + std::to_string(m.format_version) + ", expected " +
                     std::to_string(kFormatVersion));
  }
  m.generation = j.at("generation").get<std::uint64_t>();
  m.next_node_id = j.at("next_node_id").get<std::uint64_t>();
  m.duplicate_edges_removed = j.value("duplicate_edges_removed", std::uint64_t{0});
  m.labels = j.at("labels").get<std::string>();
  const json& n = j.at("names");
  m.names = {n.at("file").get<std::string>(), n.at("record_count").get<std::uint64_t>(),
             n.at("byte_size").get<std::uint64_t>()};
  m.nodes = ref_from(j.at("nodes"));
  m.edges_st = ref_from(j.at("edges_st"));
  m.edges_ts = ref_from(j.at("edges_ts"));
  if (j.contains("history")) {
    m.history = ref_from(j.at("history"));
    m.width = j.at("width").get<std::uint64_t>();
    m.k = j.at("k").get<std::uint32_t>();
    m.valid = j.at("valid").get<std::uint32_t>();
    m.consistent = j.at("consistent").get<std::uint32_t>();
    m.k_effective = j.at("k_effective").get<std::uint32_t>();
    m.store_dir = j.at("store_dir").get<std::string>();
    m.store = j.at("store");
    m.build_stats = j.value("build_stats", json::array());
  }
  m.last_run = j.value("last_run", json::object());
  return m;
}

GraphDirectory::GraphDirectory(fs::path root, int lock_fd) : root_(std::move(root)), lock_fd_(lock_fd) {}

GraphDirectory::GraphDirectory(GraphDirectory&& o) noexcept
    : root_(std::move(o.root_)), lock_fd_(o.lock_fd_), meta_(std::move(o.meta_)) {
  o.lock_fd_ = -1;
}

GraphDirectory& GraphDirectory::operator=(GraphDirectory&& o) noexcept {
  if (this != &o) {
    if (lock_fd_ >= 0) ::close(lock_fd_);
    root_ = std::move(o.root_);
    lock_fd_ = o.lock_fd_;
    meta_ = std::move(o.meta_);
    o.lock_fd_ = -1;
  }
  return *this;
}

GraphDirectory::~GraphDirectory() {
  if (lock_fd_ >= 0) ::close(lock_fd_);  // releases the flock
}

void GraphDirectory::lock_or_throw() {
  const fs::path p = root_ / kLock;
  lock_fd_ = ::open(p.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) throw IoError("cannot open lock file " + p.string());
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw InputError("graph directory " + root_.string() + " is in use by another command");
  }
}

GraphDirectory GraphDirectory::create(const fs::path& root, bool force) {
  std::error_code ec;
  if (fs::exists(root / kMeta, ec) && !force) {
    throw InputError("graph directory " + root.string() + " already exists (use --force to replace it)");
  }
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());
  GraphDirectory d(root, -1);
  d.lock_or_throw();
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.path().filename() != kLock) fs::remove_all(entry.path(), ec);
  }
  fs::create_directories(d.store_parent(), ec);
  if (ec) throw IoError("cannot create " + d.store_parent().string() + ": " + ec.message());
  return d;
}

GraphDirectory GraphDirectory::open(const fs::path& root) {
  if (!fs::exists(root / kMeta)) throw InputError(root.string() + " is not a graph directory (no meta.json)");
  GraphDirectory d(root, -1);
  d.lock_or_throw();
  std::ifstream in(root / kMeta);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("corrupt meta.json in " + root.string() + ": " + e.what());
  }
  try {
    d.meta_ = meta_from_json(j);
  } catch (const json::exception& e) {
    throw InputError("incomplete meta.json in " + root.string() + ": " + e.what());
  }
  d.collect_garbage();
  std::error_code ec;
  fs::remove_all(d.scratch_root(), ec);  // left behind by a crashed command
  return d;
}

std::string GraphDirectory::fresh_name(const std::string& stem, const std::string& ext) const {
  return stem + ".g" + std::to_string(meta_.generation + 1) + "." + ext;
}

em::Table GraphDirectory::table(const TableRef& r) const {
  em::Table t = em::open_table(root_ / r.file, r.record_width, r.sort_key);
  if (t.record_count != r.record_count) {
    throw IoError("table " + r.file + " holds " + std::to_string(t.record_count) + " records, meta.json says " +
                  std::to_string(r.record_count));
  }
  return t;
}

em::VarFile GraphDirectory::var(const VarRef& r) const { return {root_ / r.file, r.record_count, r.byte_size}; }

TableRef GraphDirectory::adopt(const em::Table& t, const std::string& name) const {
  return describe(em::move_table(t, root_ / name));
}

TableRef GraphDirectory::describe(const em::Table& t) const {
  return {fs::relative(t.path, root_).string(), t.record_width, t.record_count, t.sort_key};
}

void GraphDirectory::commit(Meta m) {
  m.generation = meta_.generation + 1;
  m.format_version = kFormatVersion;
  em::write_file_atomic(root_ / kMeta, to_json(m).dump(2) + "\n");
  meta_ = std::move(m);
  collect_garbage();
}

void GraphDirectory::collect_garbage() const {
  std::set<std::string> keep{kMeta, kLock, "store", meta_.labels, meta_.names.file, meta_.nodes.file,
                             meta_.edges_st.file, meta_.edges_ts.file};
  if (meta_.history) keep.insert(meta_.history->file);
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root_, ec)) {
    const std::string name = entry.path().filename().string();
    if (keep.count(name) || name == "scratch") continue;
    fs::remove_all(entry.path(), ec);
  }
  const fs::path current = meta_.history ? root_ / meta_.store_dir : fs::path{};
  for (const auto& entry : fs::directory_iterator(store_parent(), ec)) {
    if (entry.path() != current) fs::remove_all(entry.path(), ec);
  }
}

}  // namespace embisim::cli

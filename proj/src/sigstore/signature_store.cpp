#include "embisim/sigstore/signature_store.hpp"

#include <algorithm>
#include <cstring>

#include "embisim/core/bytes.hpp"
#include "embisim/em/external_sort.hpp"

namespace embisim::sigstore {

namespace {

using em::Traffic;

/// Dictionary entry of a run: (hash, heap offset, id), 24 bytes.
struct DictRecord {
  std::uint64_t hash = 0;
  std::uint64_t offset = 0;
  std::uint64_t id = 0;
  auto operator<=>(const DictRecord&) const = default;
};

struct DictCodec {
  using value_type = DictRecord;
  static constexpr std::size_t kWidth = 24;
  constexpr std::size_t width() const { return kWidth; }
  void encode(const value_type& r, std::byte* out) const {
    store_le(out, r.hash);
    store_le(out + 8, r.offset);
    store_le(out + 16, r.id);
  }
  value_type decode(const std::byte* in) const {
    return {load_le<std::uint64_t>(in), load_le<std::uint64_t>(in + 8), load_le<std::uint64_t>(in + 16)};
  }
};

struct ByFirst {
  bool operator()(const U64PairCodec::value_type& a, const U64PairCodec::value_type& b) const {
    return a.first < b.first;
  }
};

struct ByNid {
  bool operator()(const AssignmentRecord& a, const AssignmentRecord& b) const { return a.nid < b.nid; }
};

/// (hash, key) order shared by runs, staging and bulk batches.
int compare_key(std::uint64_t ha, std::string_view ka, std::uint64_t hb, std::string_view kb) {
  if (ha != hb) return ha < hb ? -1 : 1;
  const int c = ka.compare(kb);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

// Bulk batch record: u64 hash | u64 nId | key bytes.
bool batch_less(std::string_view a, std::string_view b) {
  const auto ha = load_le<std::uint64_t>(reinterpret_cast<const std::byte*>(a.data()));
  const auto hb = load_le<std::uint64_t>(reinterpret_cast<const std::byte*>(b.data()));
  const int c = compare_key(ha, a.substr(16), hb, b.substr(16));
  if (c != 0) return c < 0;
  return load_le<std::uint64_t>(reinterpret_cast<const std::byte*>(a.data()) + 8) <
         load_le<std::uint64_t>(reinterpret_cast<const std::byte*>(b.data()) + 8);
}

std::uint64_t batch_hash(const std::string& r) { return load_le<std::uint64_t>(reinterpret_cast<const std::byte*>(r.data())); }
std::uint64_t batch_nid(const std::string& r) {
  return load_le<std::uint64_t>(reinterpret_cast<const std::byte*>(r.data()) + 8);
}

/// Sequential cursor over one run in dictionary order.
struct RunCursor {
  RunCursor(em::Workspace& ws, const std::filesystem::path& dir, const std::string& dict_name,
            const std::string& heap_name, std::uint64_t count, std::size_t buffer)
      : dict(ws, em::open_table(dir / dict_name, DictCodec::kWidth), {}, Traffic::store, buffer),
        heap(ws, em::VarFile{dir / heap_name, count, std::filesystem::file_size(dir / heap_name)}, Traffic::store,
             buffer) {
    advance();
  }
  void advance() {
    valid = dict.next(cur);
    if (valid && !heap.next(key)) throw IoError("signature heap shorter than its dictionary");
  }
  em::TableReader<DictCodec> dict;
  em::VarReader heap;
  DictRecord cur;
  std::string key;
  bool valid = false;
};

RunCursor* min_cursor(std::vector<std::unique_ptr<RunCursor>>& cs) {
  RunCursor* best = nullptr;
  for (auto& c : cs) {
    if (!c->valid) continue;
    if (!best || compare_key(c->cur.hash, c->key, best->cur.hash, best->key) < 0) best = c.get();
  }
  return best;
}

}  // namespace

std::string to_string(Backend b) { return b == Backend::in_memory ? "in_memory" : "external_sorted"; }
std::string to_string(Scope s) { return s == Scope::global_counter ? "global_counter" : "per_iteration_counter"; }

Backend parse_backend(const std::string& s) {
  if (s == "in_memory" || s == "memory") return Backend::in_memory;
  if (s == "external_sorted" || s == "external") return Backend::external_sorted;
  throw ConfigError("unknown store backend '" + s + "'");
}

Scope parse_scope(const std::string& s) {
  if (s == "global_counter" || s == "global") return Scope::global_counter;
  if (s == "per_iteration_counter" || s == "per_iteration") return Scope::per_iteration_counter;
  throw ConfigError("unknown numbering scope '" + s + "'");
}

struct SignatureStore::OpenRun {
  OpenRun(em::Workspace& ws, const std::filesystem::path& dir, const Run& r, std::size_t cache_pages)
      : dict(ws, em::open_table(dir / r.dict, DictCodec::kWidth), {}, Traffic::store, cache_pages),
        heap(ws, dir / r.heap, Traffic::store, cache_pages) {}
  em::PagedTableReader<DictCodec> dict;
  em::PagedFile heap;

  std::string key_at(std::uint64_t offset) {
    std::byte len[4];
    heap.read(offset, 4, len);
    std::string k(load_le<std::uint32_t>(len), '\0');
    heap.read(offset + 4, k.size(), reinterpret_cast<std::byte*>(k.data()));
    return k;
  }
};

SignatureStore::SignatureStore(em::Workspace& ws, std::filesystem::path dir, StoreOptions opts)
    : ws_(&ws), dir_(std::move(dir)), opts_(opts) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create store directory '" + dir_.string() + "': " + ec.message());
}

SignatureStore::~SignatureStore() = default;

std::unique_ptr<SignatureStore> SignatureStore::restore(em::Workspace& ws, std::filesystem::path dir,
                                                        const nlohmann::json& state) {
  StoreOptions o;
  try {
    o.backend = parse_backend(state.at("backend").get<std::string>());
    o.scope = parse_scope(state.at("scope").get<std::string>());
    o.share_across_levels = state.at("share_across_levels").get<bool>();
    o.restart_counter_on_reset = state.value("restart_counter_on_reset", false);
    o.max_signature_bytes = state.value("max_signature_bytes", o.max_signature_bytes);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed store state: ") + e.what());
  }
  auto s = std::make_unique<SignatureStore>(ws, std::move(dir), o);
  s->next_id_ = state.at("next_id").get<std::uint64_t>();
  s->run_seq_ = state.at("run_seq").get<std::uint64_t>();
  const auto& c = state.at("counters");
  s->counters_ = {c.at("lookups").get<std::uint64_t>(), c.at("hits").get<std::uint64_t>(),
                  c.at("issued").get<std::uint64_t>()};
  for (const auto& r : state.at("runs")) {
    Run run{r.at("dict").get<std::string>(), r.at("heap").get<std::string>(), r.at("count").get<std::uint64_t>()};
    s->committed_files_.insert(run.dict);
    s->committed_files_.insert(run.heap);
    s->run_entries_ += run.count;
    s->runs_.push_back(std::move(run));
  }
  if (o.backend == Backend::in_memory) {
    const std::size_t buf = ws.stream_buffer_bytes();
    for (const auto& r : s->runs_) {
      RunCursor rc(ws, s->dir_, r.dict, r.heap, r.count, buf);
      for (; rc.valid; rc.advance()) s->memory_.emplace(rc.key, rc.cur.id);
    }
  }
  return s;
}

nlohmann::json SignatureStore::state() {
  if (opts_.backend == Backend::in_memory) {
    // Snapshot the map as one sorted run.
    std::vector<std::pair<std::pair<std::uint64_t, std::string>, std::uint64_t>> entries;
    entries.reserve(memory_.size());
    for (const auto& [k, id] : memory_) entries.push_back({{hash_bytes(k), k}, id});
    std::sort(entries.begin(), entries.end());
    const std::string stem = new_run_stem();
    Run run{stem + ".dict", stem + ".heap", entries.size()};
    em::VarWriter heap(*ws_, dir_ / run.heap, Traffic::store);
    em::TableWriter<DictCodec> dict(*ws_, dir_ / run.dict, {}, Traffic::store);
    for (const auto& [hk, id] : entries) dict.push({hk.first, heap.push(hk.second), id});
    heap.finish();
    dict.finish();
    set_runs({run});
  } else {
    flush_staging();
  }
  committed_files_.clear();
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : runs_) {
    runs.push_back({{"dict", r.dict}, {"heap", r.heap}, {"count", r.count}});
    committed_files_.insert(r.dict);
    committed_files_.insert(r.heap);
  }
  return {{"backend", to_string(opts_.backend)},
          {"scope", to_string(opts_.scope)},
          {"share_across_levels", opts_.share_across_levels},
          {"restart_counter_on_reset", opts_.restart_counter_on_reset},
          {"max_signature_bytes", opts_.max_signature_bytes},
          {"next_id", next_id_},
          {"run_seq", run_seq_},
          {"counters", {{"lookups", counters_.lookups}, {"hits", counters_.hits}, {"issued", counters_.issued}}},
          {"runs", runs}};
}

void SignatureStore::gc() {
  std::set<std::string> live;
  for (const auto& r : runs_) {
    live.insert(r.dict);
    live.insert(r.heap);
  }
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(dir_, ec)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && !live.count(name) && !committed_files_.count(name)) em::remove_quietly(e.path());
  }
}

PartitionId SignatureStore::issue_id() {
  ++counters_.issued;
  return PartitionId{next_id_++};
}

std::uint64_t SignatureStore::size() const {
  if (opts_.backend == Backend::in_memory) return memory_.size();
  return run_entries_ + staged_.size();
}

std::string SignatureStore::key_of(Level level, const Signature& sig) const {
  std::string key;
  key.reserve(4 + canonical_size(sig.pairs().size()));
  append_le<std::uint32_t>(key, opts_.share_across_levels ? 0u : level);
  append_canonical_bytes(sig, key);
  return key;
}

void SignatureStore::check_size(NodeId n, const Signature& sig) const {
  const std::uint64_t bytes = canonical_size(sig.pairs().size());
  if (bytes > opts_.max_signature_bytes) {
    throw InputError("signature of node " + std::to_string(n.value) + " has " + std::to_string(bytes) +
                     " bytes, above the limit of " + std::to_string(opts_.max_signature_bytes));
  }
}

PartitionId SignatureStore::insert(Level level, const Signature& sig) {
  if (canonical_size(sig.pairs().size()) > opts_.max_signature_bytes) {
    throw InputError("signature with " + std::to_string(sig.pairs().size()) + " pairs exceeds the limit of " +
                     std::to_string(opts_.max_signature_bytes) + " bytes");
  }
  const std::string key = key_of(level, sig);
  ++counters_.lookups;
  if (opts_.backend == Backend::in_memory) {
    auto [it, fresh] = memory_.try_emplace(key, next_id_);
    if (fresh) {
      ++next_id_;
      ++counters_.issued;
    } else {
      ++counters_.hits;
    }
    return PartitionId{it->second};
  }
  const std::uint64_t h = hash_bytes(key);
  if (auto found = lookup(key, h)) {
    ++counters_.hits;
    return PartitionId{*found};
  }
  const std::uint64_t id = next_id_++;
  ++counters_.issued;
  staged_bytes_ += key.size() + 48;
  staged_.emplace(std::make_pair(h, key), id);
  if (staged_bytes_ > ws_->budget().store_buffer_bytes / 2) flush_staging();
  return PartitionId{id};
}

std::optional<PartitionId> SignatureStore::find(Level level, const Signature& sig) {
  const std::string key = key_of(level, sig);
  if (opts_.backend == Backend::in_memory) {
    auto it = memory_.find(key);
    if (it == memory_.end()) return std::nullopt;
    return PartitionId{it->second};
  }
  if (auto found = lookup(key, hash_bytes(key))) return PartitionId{*found};
  return std::nullopt;
}

std::optional<std::uint64_t> SignatureStore::lookup(const std::string& key, std::uint64_t hash) {
  if (auto it = staged_.find({hash, key}); it != staged_.end()) return it->second;
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    if (auto id = lookup_run(i, key, hash)) return id;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> SignatureStore::lookup_run(std::size_t i, const std::string& key, std::uint64_t hash) {
  if (open_.size() != runs_.size()) {
    open_.clear();
    const std::size_t cache =
        std::max<std::size_t>(2, ws_->budget().store_pages() / 2 / std::max<std::size_t>(1, 2 * runs_.size()));
    for (const auto& r : runs_) open_.push_back(std::make_unique<OpenRun>(*ws_, dir_, r, cache));
  }
  OpenRun& o = *open_[i];
  std::uint64_t lo = 0, hi = o.dict.size();
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    const DictRecord r = o.dict.at(mid);
    int c;
    if (r.hash != hash) {
      c = r.hash < hash ? -1 : 1;
    } else {
      c = compare_key(r.hash, o.key_at(r.offset), hash, key);
    }
    if (c == 0) return r.id;
    if (c < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return std::nullopt;
}

std::string SignatureStore::new_run_stem() { return "run-" + std::to_string(run_seq_++); }

void SignatureStore::drop_open_runs() { open_.clear(); }

void SignatureStore::set_runs(std::vector<Run> runs) {
  drop_open_runs();
  std::set<std::string> keep;
  for (const auto& r : runs) {
    keep.insert(r.dict);
    keep.insert(r.heap);
  }
  for (const auto& r : runs_) {
    for (const auto* name : {&r.dict, &r.heap}) {
      if (!keep.count(*name) && !committed_files_.count(*name)) em::remove_quietly(dir_ / *name);
    }
  }
  runs_ = std::move(runs);
  run_entries_ = 0;
  for (const auto& r : runs_) run_entries_ += r.count;
}

void SignatureStore::flush_staging() {
  if (staged_.empty()) return;
  const std::string stem = new_run_stem();
  Run run{stem + ".dict", stem + ".heap", staged_.size()};
  {
    em::VarWriter heap(*ws_, dir_ / run.heap, Traffic::store);
    em::TableWriter<DictCodec> dict(*ws_, dir_ / run.dict, {}, Traffic::store);
    for (const auto& [hk, id] : staged_) dict.push({hk.first, heap.push(hk.second), id});
    heap.finish();
    dict.finish();
  }
  staged_.clear();
  staged_bytes_ = 0;
  auto runs = runs_;
  runs.push_back(run);
  set_runs(std::move(runs));
  compact();
}

void SignatureStore::compact() {
  if (runs_.size() <= 8) return;
  set_runs({merge_runs(runs_)});
}

SignatureStore::Run SignatureStore::merge_runs(const std::vector<Run>& runs) {
  const std::size_t buf = std::max<std::size_t>(ws_->budget().page_size,
                                                ws_->budget().store_buffer_bytes / (2 * (runs.size() + 2)));
  std::vector<std::unique_ptr<RunCursor>> cs;
  for (const auto& r : runs) cs.push_back(std::make_unique<RunCursor>(*ws_, dir_, r.dict, r.heap, r.count, buf));
  const std::string stem = new_run_stem();
  Run out{stem + ".dict", stem + ".heap", 0};
  em::VarWriter heap(*ws_, dir_ / out.heap, Traffic::store, buf);
  em::TableWriter<DictCodec> dict(*ws_, dir_ / out.dict, {}, Traffic::store, buf);
  while (RunCursor* c = min_cursor(cs)) {
    dict.push({c->cur.hash, heap.push(c->key), c->cur.id});
    c->advance();
  }
  heap.finish();
  out.count = dict.finish().record_count;
  return out;
}

void SignatureStore::reset_iteration() {
  if (opts_.scope == Scope::global_counter) {
    throw ConfigError("reset_iteration is only valid for a per-iteration numbering scope");
  }
  memory_.clear();
  staged_.clear();
  staged_bytes_ = 0;
  set_runs({});
  if (opts_.restart_counter_on_reset) next_id_ = 1;
}

BulkResult SignatureStore::bulk_external(Level, em::VarFile sorted) {
  flush_staging();
  em::Workspace& ws = *ws_;
  const std::size_t buf = std::max<std::size_t>(ws.budget().page_size,
                                                ws.budget().store_buffer_bytes / (2 * (runs_.size() + 6)));
  std::vector<std::unique_ptr<RunCursor>> cs;
  for (const auto& r : runs_) cs.push_back(std::make_unique<RunCursor>(ws, dir_, r.dict, r.heap, r.count, buf));

  em::SortOptions sort_opts;
  sort_opts.traffic = Traffic::store;
  sort_opts.memory_bytes = ws.budget().store_buffer_bytes / 2;

  const std::string stem = new_run_stem();
  Run run{stem + ".dict", stem + ".heap", 0};
  em::VarWriter heap(ws, dir_ / run.heap, Traffic::store, buf);
  em::TableWriter<DictCodec> draft(ws, ws.temp_path("dict"), {}, Traffic::store, buf);
  em::TableWriter<AssignmentCodec> assigned(ws, ws.temp_path("assigned"), {}, Traffic::store, buf);
  em::TableWriter<U64PairCodec> pending(ws, ws.temp_path("pending"), {}, Traffic::store, buf);
  em::ExternalSorter<U64PairCodec, ByFirst> groups(ws, {}, ByFirst{}, sort_opts);

  auto copy_existing = [&](RunCursor& c) {
    draft.push({c.cur.hash, heap.push(c.key), c.cur.id});
    c.advance();
  };

  BulkResult res;
  std::uint64_t total = 0;
  std::uint64_t ordinal = 0;
  {
    em::VarReader in(ws, sorted, Traffic::store, buf);
    std::string rec;
    bool have = in.next(rec);
    while (have) {
      const std::uint64_t gh = batch_hash(rec);
      const std::string gkey = rec.substr(16);
      RunCursor* c;
      while ((c = min_cursor(cs)) && compare_key(c->cur.hash, c->key, gh, gkey) < 0) copy_existing(*c);
      std::optional<std::uint64_t> id;
      if (c && compare_key(c->cur.hash, c->key, gh, gkey) == 0) {
        id = c->cur.id;
        copy_existing(*c);
      } else {
        draft.push({gh, heap.push(gkey), 0});
        groups.push({batch_nid(rec), ordinal});
      }
      ++res.distinct;
      do {
        const NodeId n{batch_nid(rec)};
        ++total;
        if (id) {
          assigned.push({n, PartitionId{*id}});
        } else {
          pending.push({n.value, ordinal});
        }
        have = in.next(rec);
      } while (have && batch_hash(rec) == gh && std::string_view(rec).substr(16) == gkey);
      if (!id) ++ordinal;
    }
  }
  while (RunCursor* c = min_cursor(cs)) copy_existing(*c);
  cs.clear();
  heap.finish();
  const em::Table draft_t = draft.finish();
  const em::Table pending_t = pending.finish();
  em::remove_quietly(sorted.path);

  // New groups get ids in the order of their first node.
  const em::Table by_first = groups.finish();
  em::ExternalSorter<U64PairCodec, ByFirst> by_ordinal(ws, {}, ByFirst{}, sort_opts);
  em::scan<U64PairCodec>(ws, by_first, [&](const auto& g) { by_ordinal.push({g.second, next_id_++}); }, {},
                         Traffic::store);
  em::drop_table(by_first);
  const em::Table ids = by_ordinal.finish();

  // Placeholders in the draft appear in ordinal order.
  {
    em::TableWriter<DictCodec> dict(ws, dir_ / run.dict, {}, Traffic::store, buf);
    em::TableReader<U64PairCodec> idr(ws, ids, {}, Traffic::store, buf);
    U64PairCodec::value_type p{};
    em::scan<DictCodec>(
        ws, draft_t,
        [&](DictRecord r) {
          if (r.id == 0) {
            if (!idr.next(p)) throw IoError("signature store: ordinal table too short");
            r.id = p.second;
          }
          dict.push(r);
        },
        {}, Traffic::store);
    run.count = dict.finish().record_count;
  }
  em::drop_table(draft_t);
  {
    em::TableReader<U64PairCodec> idr(ws, ids, {}, Traffic::store, buf);
    U64PairCodec::value_type p{};
    bool have = idr.next(p);
    em::scan<U64PairCodec>(
        ws, pending_t,
        [&](const auto& e) {
          while (have && p.first < e.second) have = idr.next(p);
          assigned.push({NodeId{e.first}, PartitionId{p.second}});
        },
        {}, Traffic::store);
  }
  em::drop_table(pending_t);
  em::drop_table(ids);
  const em::Table all = assigned.finish();
  em::SortOptions final_opts = sort_opts;
  final_opts.sort_key = "nId";
  res.assignments = em::external_sort<AssignmentCodec>(ws, all, ByNid{}, final_opts);
  em::drop_table(all);

  res.issued = ordinal;
  counters_.lookups += total;
  counters_.issued += ordinal;
  counters_.hits += total - ordinal;
  set_runs({run});
  return res;
}

BulkAssigner::BulkAssigner(SignatureStore& store, Level level) : store_(&store), level_(level) {
  em::Workspace& ws = *store.ws_;
  if (store.opts_.backend == Backend::external_sorted) {
    em::VarSorter::Options o;
    o.memory_bytes = ws.budget().store_buffer_bytes / 2;
    o.fan_in = std::max<std::uint64_t>(2, ws.budget().store_pages() - 1);
    o.traffic = Traffic::store;
    sorter_ = std::make_unique<em::VarSorter>(ws, &batch_less, o);
  } else {
    out_ = std::make_unique<em::TableWriter<AssignmentCodec>>(ws, ws.temp_path("assigned"), AssignmentCodec{},
                                                               Traffic::store);
  }
}

BulkAssigner::BulkAssigner(BulkAssigner&&) noexcept = default;
BulkAssigner::~BulkAssigner() = default;

void BulkAssigner::add(NodeId n, const Signature& sig) {
  if (last_ && !(*last_ < n)) throw InputError("bulk assignment requires ascending node ids");
  last_ = n;
  store_->check_size(n, sig);
  if (sorter_) {
    std::string rec;
    const std::string key = store_->key_of(level_, sig);
    rec.reserve(16 + key.size());
    append_le<std::uint64_t>(rec, hash_bytes(key));
    append_le<std::uint64_t>(rec, n.value);
    rec += key;
    sorter_->push(std::move(rec));
    return;
  }
  const std::uint64_t before = store_->counters_.issued;
  const PartitionId id = store_->insert(level_, sig);
  issued_ += store_->counters_.issued - before;
  if (seen_.emplace(id.value, 0).second) ++distinct_;
  out_->push({n, id});
}

BulkResult BulkAssigner::finish() {
  if (sorter_) {
    em::VarFile sorted = sorter_->finish();
    sorter_.reset();
    return store_->bulk_external(level_, sorted);
  }
  BulkResult r;
  r.assignments = out_->finish("nId");
  out_.reset();
  r.distinct = distinct_;
  r.issued = issued_;
  return r;
}

}  // namespace embisim::sigstore
